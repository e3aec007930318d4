//! Perfect 1-error-correcting codes over small finite fields.
//!
//! The crate builds perfect codes as unions of mu-components indexed by an
//! outer perfect code, splits non-full-rank perfect codes back into such
//! components, and checks every structural property by exhaustive search.

pub mod census;
pub mod codespace;
pub mod combiner;
pub mod components;
pub mod decomposer;
pub mod error;
pub mod gfq;
pub mod hamming;
pub mod io;
pub mod linalg;
pub mod quasigroup;

pub use error::{Error, Result};
