//! Lower bound on the number of perfect codes, and generation of the codes
//! that realize it at small lengths.
//!
//! For a length `n = (q^m-1)/(q-1)` put `t = (n-1)/q`. Taking `k = 1` in the
//! generalized Phelps construction gives components of length `qt + 1 = n`,
//! one per word of a perfect outer code of length `t`, and each component
//! may use its own `t`-ary quasigroup `Q` of order `q`. Distinct choices
//! give distinct codes, so there are at least `Q(t,q)^R` perfect codes,
//! `R` being the size of a perfect code of length `t`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::codespace::{perfect_length_exponent, Code, CodeParameters, Word};
use crate::combiner::{combine, Assembly};
use crate::components::{build_phelps, MuComponent, Phelps};
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::hamming::{hamming_code, perfect_partition};
use crate::quasigroup::{qg_count, standard_vh_pair, MultaryQuasigroup, QuasigroupStream, SigmaFamily};

/// Largest number of codes produced without an explicit limit.
pub const EXHAUSTIVE_LIMIT: u64 = 4096;
const MAX_EXPONENT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Counted by exhaustive enumeration.
    Enumerated,
    /// `Q(m,3) = 3 * 2^m`.
    Formula,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Enumerated => "enumerated",
            Provenance::Formula => "formula",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub q: u32,
    pub t: usize,
    pub q_count: u64,
    pub provenance: Provenance,
    /// `q^t / (1 + t(q-1))`, the size of a perfect code of length `t`.
    pub r_count: u64,
    /// `q^t` over `tq - q + 1`, as numerator and denominator. This
    /// denominator equals the ball size `1 + t(q-1)` only when `t = q`.
    pub printed_r: (u64, u64),
    /// `q_count ^ r_count`.
    pub bound: BigUint,
}

impl BoundReport {
    pub fn printed_r_differs(&self) -> bool {
        let (num, den) = self.printed_r;
        num != self.r_count * den
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {}",
            self.n, self.q, self.t, self.q_count, self.r_count, self.bound
        )?;
        if self.printed_r_differs() {
            let (num, den) = self.printed_r;
            write!(
                f,
                "\n# R with denominator tq-q+1 would be {num}/{den}; using q^t/(1+t(q-1)) = {}",
                self.r_count
            )?;
        }
        Ok(())
    }
}

/// `t` and `m` for a length admitting the construction.
fn split(n: usize, q: u32) -> Result<(usize, u32)> {
    FieldTable::shared(q)?;
    match perfect_length_exponent(q, n) {
        Some(m) if m >= 2 => Ok(((n - 1) / q as usize, m)),
        _ => Err(Error::BadLength { q, n }),
    }
}

/// Number of `t`-ary quasigroups of order `q`.
fn quasigroup_count(t: usize, q: u32) -> Result<(u64, Provenance)> {
    match qg_count(t, q) {
        Ok(c) => Ok((c, Provenance::Enumerated)),
        Err(Error::TooLarge { .. }) if q == 3 && t < 63 => Ok((3 << t, Provenance::Formula)),
        Err(e) => Err(e),
    }
}

pub fn lower_bound(n: usize, q: u32) -> Result<BoundReport> {
    let (t, m) = split(n, q)?;
    let (q_count, provenance) = quasigroup_count(t, q)?;
    // t = (q^(m-1)-1)/(q-1), so a perfect code of length t has q^(t-(m-1)) words
    let exponent = t as u64 - (m as u64 - 1);
    let r_count = (q as u64)
        .checked_pow(exponent as u32)
        .filter(|&r| r <= MAX_EXPONENT)
        .ok_or_else(|| Error::too_large(format!("exponent {q}^{exponent}")))?;
    let printed_r = (
        (q as u64).checked_pow(t as u32).unwrap_or(u64::MAX),
        t as u64 * q as u64 - q as u64 + 1,
    );
    Ok(BoundReport {
        n,
        q,
        t,
        q_count,
        provenance,
        r_count,
        printed_r,
        bound: BigUint::from(q_count).pow(r_count as u32),
    })
}

/// The assemblies behind [`generate_distinct_codes`], in the same order.
///
/// Assignments of quasigroups to outer words run in lexicographic order of
/// their stream indices, the first outer word varying slowest.
pub fn generate_assemblies(n: usize, q: u32, limit: Option<usize>) -> Result<Vec<Assembly>> {
    let (t, m) = split(n, q)?;
    let params = CodeParameters::new(q, m, m - 1)?;
    debug_assert_eq!(params.t, t);
    let field = FieldTable::shared(q)?;
    let outer = hamming_code(q, m - 1)?;
    let big_r = outer.len() as u32;

    let total = match limit {
        Some(l) => l as u64,
        None => u64::try_from(&lower_bound(n, q)?.bound)
            .ok()
            .filter(|&b| b <= EXHAUSTIVE_LIMIT)
            .ok_or_else(|| Error::too_large(format!("exhaustive generation at n={n}, q={q}")))?,
    };
    let stream: Vec<MultaryQuasigroup> = QuasigroupStream::new(t, q)?.take(total as usize).collect();
    let choices = stream.len() as u64;
    let count = choices.checked_pow(big_r).map_or(total, |c| c.min(total));
    if count == 0 {
        return Ok(Vec::new());
    }

    let assignments: Vec<Vec<usize>> = (0..count)
        .map(|mut i| {
            let mut digits = vec![0; big_r as usize];
            for d in digits.iter_mut().rev() {
                *d = (i % choices) as usize;
                i /= choices;
            }
            digits
        })
        .collect();
    let needed: BTreeSet<(usize, usize)> = assignments
        .iter()
        .flat_map(|a| a.iter().copied().enumerate())
        .collect();

    let (v, h) = standard_vh_pair(field)?;
    let singletons = perfect_partition(q, 1)?;
    let vertical = vec![MultaryQuasigroup::sum(field, 2)?; t];
    let mus: Vec<Word> = outer.words();
    let built: Vec<((usize, usize), MuComponent)> = needed
        .into_par_iter()
        .map(|(c, j)| {
            let inputs = Phelps {
                partitions: vec![singletons.clone(); t + 1],
                v: v.clone(),
                h: h.clone(),
                vertical: vertical.clone(),
                selector: stream[j].clone(),
            };
            Ok(((c, j), build_phelps(&mus[c], &inputs, field)?))
        })
        .collect::<Result<_>>()?;
    let cache: BTreeMap<(usize, usize), MuComponent> = built.into_iter().collect();
    let sigma: SigmaFamily = cache.values().next().expect("at least one component").sigma().clone();

    Ok(assignments
        .iter()
        .map(|a| Assembly {
            outer: outer.clone(),
            components: a
                .iter()
                .enumerate()
                .map(|(c, &j)| (mus[c].clone(), cache[&(c, j)].clone()))
                .collect(),
            layout: params,
            sigma: sigma.clone(),
        })
        .collect())
}

/// Perfect codes of length `n`, pairwise distinct, each checked by
/// [`combine`]. Without a limit all `Q(t,q)^R` codes are produced.
pub fn generate_distinct_codes(n: usize, q: u32, limit: Option<usize>) -> Result<Vec<Code>> {
    let codes: Vec<Code> = generate_assemblies(n, q, limit)?
        .par_iter()
        .map(combine)
        .collect::<Result<_>>()?;
    let mut seen = BTreeSet::new();
    Ok(codes.into_iter().filter(|c| seen.insert(c.clone())).collect())
}
