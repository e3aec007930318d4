//! Construction and verification of mu-components.
//!
//! Both constructions produce words of length `(q-1)kt + k + t` laid out as
//! `t` blocks `(x_i1 | ... | x_ik | y_i)`, each `x_ij` a run of `q - 1`
//! symbols, followed by the tail `(z_1, ..., z_k)`. Block `i` is mapped to
//! its profile symbol by `V_i(v(x_i1), ..., v(x_ik), y_i)`.
//!
//! Each construction has two builders: a filter over the whole space that
//! evaluates the defining conditions word by word, and a solver that
//! enumerates the free `x_ij` and recovers `y_i` and `z` by inverting the
//! quasigroups. The filter is the reference; the solver is used above
//! [`FILTER_LIMIT`].

use std::fmt;

use crate::codespace::{
    check_sigma_layout, close_pair, is_perfect, sigma_profile_unchecked, BlockLayout, Code, SpaceIndex, Word,
};
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::hamming::PerfectPartition;
use crate::quasigroup::{sigma_from_component_law, vh_pair_check, MultaryQuasigroup, SigmaFamily};

/// Largest space the filter builder scans.
pub const FILTER_LIMIT: u64 = 1 << 24;
const SOLVE_LIMIT: u64 = 1 << 24;

/// A code whose every word has sigma-profile `mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuComponent {
    code: Code,
    mu: Word,
    layout: BlockLayout,
    sigma: SigmaFamily,
}

impl MuComponent {
    /// Checks shapes only; use [`component_verify`] for the law and distance.
    pub fn new(code: Code, mu: Word, layout: BlockLayout, sigma: SigmaFamily) -> Result<Self> {
        check_sigma_layout(&layout, &sigma)?;
        if code.q() != layout.q {
            return Err(Error::AlphabetMismatch {
                expected: layout.q,
                actual: code.q(),
            });
        }
        if code.n() != layout.n() {
            return Err(Error::LengthMismatch {
                expected: layout.n(),
                actual: code.n(),
            });
        }
        if mu.len() != layout.t {
            return Err(Error::LengthMismatch {
                expected: layout.t,
                actual: mu.len(),
            });
        }
        if let Some(&s) = mu.iter().find(|&&s| u32::from(s) >= layout.q) {
            return Err(Error::IndexOutOfRange { index: s.into(), q: layout.q });
        }
        Ok(MuComponent { code, mu, layout, sigma })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn mu(&self) -> &Word {
        &self.mu
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn sigma(&self) -> &SigmaFamily {
        &self.sigma
    }

    pub fn into_code(self) -> Code {
        self.code
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildStrategy {
    /// Filter when the space has at most [`FILTER_LIMIT`] words, else solve.
    #[default]
    Auto,
    Filter,
    Solve,
}

/// Inputs of the Mollard-Phelps component construction.
#[derive(Debug, Clone)]
pub struct MollardPhelps {
    /// Perfect code of length `k`.
    pub csharp: Code,
    pub v: MultaryQuasigroup,
    pub h: MultaryQuasigroup,
    /// `t` quasigroups, each `(k+1)`-ary.
    pub vertical: Vec<MultaryQuasigroup>,
    /// `k` quasigroups, each `(t+1)`-ary.
    pub horizontal: Vec<MultaryQuasigroup>,
}

/// Inputs of the generalized Phelps component construction.
#[derive(Debug, Clone)]
pub struct Phelps {
    /// `t + 1` partitions of F_q^k into perfect codes.
    pub partitions: Vec<PerfectPartition>,
    pub v: MultaryQuasigroup,
    pub h: MultaryQuasigroup,
    /// `t` quasigroups, each `(k+1)`-ary.
    pub vertical: Vec<MultaryQuasigroup>,
    /// `t`-ary quasigroup of order `(q-1)k + 1`.
    pub selector: MultaryQuasigroup,
}

fn expect_shape(g: &MultaryQuasigroup, what: &str, arity: usize, order: u32) -> Result<()> {
    if g.arity() != arity || g.order() != order {
        return Err(Error::ArityMismatch(format!(
            "{what} must be {arity}-ary of order {order}, got {}-ary of order {}",
            g.arity(),
            g.order()
        )));
    }
    Ok(())
}

fn check_vh(v: &MultaryQuasigroup, h: &MultaryQuasigroup, field: &FieldTable) -> Result<()> {
    match vh_pair_check(v, h, field)?.certificate() {
        None => Ok(()),
        Some(c) => Err(Error::BadVhPair(c.clone())),
    }
}

fn check_mu(mu: &Word, t: usize, q: u32) -> Result<()> {
    if mu.len() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            actual: mu.len(),
        });
    }
    if let Some(&s) = mu.iter().find(|&&s| u32::from(s) >= q) {
        return Err(Error::IndexOutOfRange { index: s.into(), q });
    }
    Ok(())
}

fn sigma_for(vertical: &[MultaryQuasigroup], v: &MultaryQuasigroup, k: usize) -> Result<SigmaFamily> {
    SigmaFamily::new(
        vertical
            .iter()
            .map(|big_v| sigma_from_component_law(big_v, v, k))
            .collect::<Result<_>>()?,
    )
}

/// Shared geometry of both constructions.
struct Shape {
    q: u32,
    k: usize,
    t: usize,
    w: usize,
    layout: BlockLayout,
}

impl Shape {
    fn new(q: u32, k: usize, t: usize) -> Result<Self> {
        let w = q as usize - 1;
        Ok(Shape {
            q,
            k,
            t,
            w,
            layout: BlockLayout::new(q, t, w * k + 1, k)?,
        })
    }

    #[inline]
    fn sub_block<'a>(&self, word: &'a [u8], i: usize, j: usize) -> &'a [u8] {
        let start = i * self.layout.l + j * self.w;
        &word[start..start + self.w]
    }

    #[inline]
    fn y(&self, i: usize) -> usize {
        i * self.layout.l + self.layout.l - 1
    }

    #[inline]
    fn z(&self, j: usize) -> usize {
        self.layout.prefix_len() + j
    }

    fn use_filter(&self, strategy: BuildStrategy) -> bool {
        match strategy {
            BuildStrategy::Filter => true,
            BuildStrategy::Solve => false,
            BuildStrategy::Auto => SpaceIndex::new(self.q, self.layout.n(), FILTER_LIMIT).is_ok(),
        }
    }

    /// Visits every word of F_q^n (filter builder).
    fn scan(&self, mut visit: impl FnMut(&[u8])) -> Result<()> {
        let ix = SpaceIndex::new(self.q, self.layout.n(), FILTER_LIMIT)?;
        let mut word = vec![0u8; self.layout.n()];
        for _ in 0..ix.size() {
            visit(&word);
            increment(&mut word, self.q);
        }
        Ok(())
    }

    /// Visits each assignment of the free `x_ij` symbols, written into
    /// `word`; `y` and `z` positions are left for the caller.
    fn for_each_free(&self, out_per_assignment: u64, mut visit: impl FnMut(&mut [u8])) -> Result<()> {
        let free = self.w * self.k * self.t;
        (self.q as u64)
            .checked_pow(free as u32)
            .and_then(|c| c.checked_mul(out_per_assignment))
            .filter(|&c| c <= SOLVE_LIMIT)
            .ok_or_else(|| Error::too_large(format!("component with q^{free} free choices")))?;
        let mut xs = vec![0u8; free];
        let mut word = vec![0u8; self.layout.n()];
        let per_block = self.w * self.k;
        loop {
            for i in 0..self.t {
                let start = i * self.layout.l;
                word[start..start + per_block].copy_from_slice(&xs[i * per_block..(i + 1) * per_block]);
            }
            visit(&mut word);
            if !increment(&mut xs, self.q) {
                return Ok(());
            }
        }
    }
}

/// Odometer step; false after wrapping back to all zeros.
fn increment(digits: &mut [u8], q: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if u32::from(*d) < q {
            return true;
        }
        *d = 0;
    }
    false
}

impl MollardPhelps {
    fn validate(&self, mu: &Word, field: &FieldTable) -> Result<Shape> {
        let q = field.order();
        if self.csharp.q() != q {
            return Err(Error::AlphabetMismatch {
                expected: q,
                actual: self.csharp.q(),
            });
        }
        if let Some(cert) = is_perfect(&self.csharp)?.certificate() {
            return Err(Error::NotPerfect {
                what: "C#".into(),
                certificate: cert.clone(),
            });
        }
        let k = self.csharp.n();
        let t = self.vertical.len();
        if t == 0 {
            return Err(Error::ArityMismatch("at least one vertical quasigroup is required".into()));
        }
        if self.horizontal.len() != k {
            return Err(Error::ArityMismatch(format!(
                "{} horizontal quasigroups for C# of length {k}",
                self.horizontal.len()
            )));
        }
        for (i, g) in self.vertical.iter().enumerate() {
            expect_shape(g, &format!("V_{}", i + 1), k + 1, q)?;
        }
        for (j, g) in self.horizontal.iter().enumerate() {
            expect_shape(g, &format!("H_{}", j + 1), t + 1, q)?;
        }
        check_vh(&self.v, &self.h, field)?;
        check_mu(mu, t, q)?;
        Shape::new(q, k, t)
    }

    fn accepts(&self, s: &Shape, mu: &[u8], word: &[u8], scratch: &mut Scratch) -> bool {
        for i in 0..s.t {
            for j in 0..s.k {
                scratch.args[j] = self.v.eval(s.sub_block(word, i, j));
            }
            scratch.args[s.k] = word[s.y(i)];
            if self.vertical[i].eval(&scratch.args[..=s.k]) != mu[i] {
                return false;
            }
        }
        for j in 0..s.k {
            for i in 0..s.t {
                scratch.hargs[i] = self.h.eval(s.sub_block(word, i, j));
            }
            scratch.hargs[s.t] = word[s.z(j)];
            scratch.target[j] = self.horizontal[j].eval(&scratch.hargs[..=s.t]);
        }
        self.csharp.contains(&scratch.target[..s.k])
    }
}

struct Scratch {
    args: Vec<u8>,
    hargs: Vec<u8>,
    target: Vec<u8>,
}

impl Scratch {
    fn new(s: &Shape) -> Self {
        Scratch {
            args: vec![0; s.k + 1],
            hargs: vec![0; s.t + 1],
            target: vec![0; s.k.max(s.t)],
        }
    }
}

/// Builds the Mollard-Phelps mu-component with the default strategy.
pub fn build_mollard_phelps(mu: &Word, inputs: &MollardPhelps, field: &FieldTable) -> Result<MuComponent> {
    build_mollard_phelps_with(mu, inputs, field, BuildStrategy::Auto)
}

pub fn build_mollard_phelps_with(
    mu: &Word,
    inputs: &MollardPhelps,
    field: &FieldTable,
    strategy: BuildStrategy,
) -> Result<MuComponent> {
    let s = inputs.validate(mu, field)?;
    let mut data = Vec::new();
    let mut scratch = Scratch::new(&s);
    if s.use_filter(strategy) {
        s.scan(|word| {
            if inputs.accepts(&s, mu, word, &mut scratch) {
                data.extend_from_slice(word);
            }
        })?;
    } else {
        s.for_each_free(inputs.csharp.len() as u64, |word| {
            for i in 0..s.t {
                for j in 0..s.k {
                    scratch.args[j] = inputs.v.eval(s.sub_block(word, i, j));
                }
                word[s.y(i)] = inputs.vertical[i].solve_last(&scratch.args[..s.k], mu[i]);
            }
            for c in inputs.csharp.iter() {
                for j in 0..s.k {
                    for i in 0..s.t {
                        scratch.hargs[i] = inputs.h.eval(s.sub_block(word, i, j));
                    }
                    word[s.z(j)] = inputs.horizontal[j].solve_last(&scratch.hargs[..s.t], c[j]);
                }
                data.extend_from_slice(word);
            }
        })?;
    }
    let sigma = sigma_for(&inputs.vertical, &inputs.v, s.k)?;
    MuComponent::new(Code::from_flat_unchecked(s.q, s.layout.n(), data), mu.clone(), s.layout, sigma)
}

impl Phelps {
    fn validate(&self, mu: &Word, field: &FieldTable) -> Result<Shape> {
        let q = field.order();
        let t = self.vertical.len();
        if t == 0 {
            return Err(Error::ArityMismatch("at least one vertical quasigroup is required".into()));
        }
        if self.partitions.len() != t + 1 {
            return Err(Error::BadPartition(format!(
                "{} partitions supplied, {} required",
                self.partitions.len(),
                t + 1
            )));
        }
        let k = self.partitions[0].n0();
        for (i, p) in self.partitions.iter().enumerate() {
            if p.q() != q || p.n0() != k {
                return Err(Error::BadPartition(format!(
                    "partition {} is over F_{}^{}, expected F_{q}^{k}",
                    i + 1,
                    p.q(),
                    p.n0()
                )));
            }
        }
        let parts = (q - 1) * k as u32 + 1;
        if self.selector.order() != parts {
            return Err(Error::BadOrder {
                expected: parts,
                actual: self.selector.order(),
            });
        }
        if self.selector.arity() != t {
            return Err(Error::ArityMismatch(format!(
                "Q must be {t}-ary, got {}-ary",
                self.selector.arity()
            )));
        }
        for (i, g) in self.vertical.iter().enumerate() {
            expect_shape(g, &format!("V_{}", i + 1), k + 1, q)?;
        }
        check_vh(&self.v, &self.h, field)?;
        check_mu(mu, t, q)?;
        Shape::new(q, k, t)
    }

    /// `Q(gamma_1(h(x_11), ..., h(x_1k)), ..., gamma_t(...))`.
    fn selected_part(&self, s: &Shape, word: &[u8], scratch: &mut Scratch) -> usize {
        for i in 0..s.t {
            for j in 0..s.k {
                scratch.args[j] = self.h.eval(s.sub_block(word, i, j));
            }
            scratch.target[i] = self.partitions[i].part_of(&scratch.args[..s.k]) as u8;
        }
        self.selector.eval(&scratch.target[..s.t]) as usize
    }

    fn accepts(&self, s: &Shape, mu: &[u8], word: &[u8], scratch: &mut Scratch) -> bool {
        for i in 0..s.t {
            for j in 0..s.k {
                scratch.args[j] = self.v.eval(s.sub_block(word, i, j));
            }
            scratch.args[s.k] = word[s.y(i)];
            if self.vertical[i].eval(&scratch.args[..=s.k]) != mu[i] {
                return false;
            }
        }
        let part = self.selected_part(s, word, scratch);
        self.partitions[s.t].part_of(&word[s.z(0)..]) == part
    }
}

/// Builds the generalized Phelps mu-component with the default strategy.
pub fn build_phelps(mu: &Word, inputs: &Phelps, field: &FieldTable) -> Result<MuComponent> {
    build_phelps_with(mu, inputs, field, BuildStrategy::Auto)
}

pub fn build_phelps_with(
    mu: &Word,
    inputs: &Phelps,
    field: &FieldTable,
    strategy: BuildStrategy,
) -> Result<MuComponent> {
    let s = inputs.validate(mu, field)?;
    let mut data = Vec::new();
    let mut scratch = Scratch::new(&s);
    if s.use_filter(strategy) {
        s.scan(|word| {
            if inputs.accepts(&s, mu, word, &mut scratch) {
                data.extend_from_slice(word);
            }
        })?;
    } else {
        let last = &inputs.partitions[s.t];
        let largest = last.parts().iter().map(Code::len).max().unwrap_or(0);
        s.for_each_free(largest as u64, |word| {
            for i in 0..s.t {
                for j in 0..s.k {
                    scratch.args[j] = inputs.v.eval(s.sub_block(word, i, j));
                }
                word[s.y(i)] = inputs.vertical[i].solve_last(&scratch.args[..s.k], mu[i]);
            }
            let part = inputs.selected_part(&s, word, &mut scratch);
            let z0 = s.z(0);
            for tail in last.parts()[part].iter() {
                word[z0..].copy_from_slice(tail);
                data.extend_from_slice(word);
            }
        })?;
    }
    let sigma = sigma_for(&inputs.vertical, &inputs.v, s.k)?;
    MuComponent::new(Code::from_flat_unchecked(s.q, s.layout.n(), data), mu.clone(), s.layout, sigma)
}

/// Why a component failed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentCertificate {
    /// A word whose profile differs from mu.
    Law { word: Word, profile: Word },
    /// Two codewords closer than 3.
    Distance { a: Word, b: Word },
    Cardinality { expected: u128, actual: usize },
}

impl fmt::Display for ComponentCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentCertificate::Law { word, profile } => {
                write!(f, "word {word} has profile {profile}")
            }
            ComponentCertificate::Distance { a, b } => write!(f, "words {a} and {b} are within distance 2"),
            ComponentCertificate::Cardinality { expected, actual } => {
                write!(f, "{actual} words, expected {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentCheck {
    Valid,
    Invalid(ComponentCertificate),
}

impl ComponentCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, ComponentCheck::Valid)
    }

    pub fn certificate(&self) -> Option<&ComponentCertificate> {
        match self {
            ComponentCheck::Valid => None,
            ComponentCheck::Invalid(c) => Some(c),
        }
    }
}

/// Checks, in order: the parity-check law for every word, minimum
/// distance at least 3, and (for combinable layouts) the cardinality
/// `q^(n-m-(t-r))`.
pub fn component_verify(component: &MuComponent) -> ComponentCheck {
    verify_against(component.code(), component.layout(), component.sigma(), component.mu())
}

/// [`component_verify`] with an explicit law in place of the component's own.
pub fn verify_against(code: &Code, layout: &BlockLayout, sigma: &SigmaFamily, mu: &[u8]) -> ComponentCheck {
    for w in code.iter() {
        let profile = sigma_profile_unchecked(w, layout.l, sigma);
        if profile != mu {
            return ComponentCheck::Invalid(ComponentCertificate::Law {
                word: w.into(),
                profile: profile.into(),
            });
        }
    }
    if let Some((i, j)) = close_pair(code) {
        return ComponentCheck::Invalid(ComponentCertificate::Distance {
            a: code.word(i).into(),
            b: code.word(j).into(),
        });
    }
    if let Some(params) = layout.combinable() {
        let expected = params.component_size();
        if code.len() as u128 != expected {
            return ComponentCheck::Invalid(ComponentCertificate::Cardinality {
                expected,
                actual: code.len(),
            });
        }
    }
    ComponentCheck::Valid
}

/// Translates a component with a linear sigma family to another profile.
///
/// The translation vector is supported on the first coordinate of each
/// block: `z_i = (target_i - mu_i) / a_i1`, `a_i1` being the first
/// coefficient of `sigma_i`.
pub fn component_shift(component: &MuComponent, target: &Word) -> Result<MuComponent> {
    let layout = *component.layout();
    check_mu(target, layout.t, layout.q)?;
    let field = FieldTable::shared(layout.q)?;
    let coeffs = component.sigma().linear_coefficients(field)?;
    let mut z = vec![0u8; layout.n()];
    for (i, a) in coeffs.iter().enumerate() {
        let delta = field.sub(target[i], component.mu()[i]);
        z[layout.block(i).start] = field.div(delta, a[0]);
    }
    MuComponent::new(
        component.code().translate(&z)?,
        target.clone(),
        layout,
        component.sigma().clone(),
    )
}
