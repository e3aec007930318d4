//! Splitting a non-full-rank perfect code into mu-components.
//!
//! Given a perfect code `C` of length `n = (q^m-1)/(q-1)` and `r` with
//! `1 <= r <= n - rank(C)`, `r < m`:
//!
//! 1. extend a basis of the span of `C` by unit vectors (lowest index first)
//!    to a subspace `D` of dimension `n - r`;
//! 2. take the reduced echelon basis of the dual of `D` as an `r x n` matrix;
//! 3. group its nonzero columns by normalized projective point, expecting
//!    every point `q^s` times and `n0` zero columns;
//! 4. permute coordinates so that the groups come in point order (original
//!    order inside a group, zero columns last) and scale each coordinate by
//!    the leading entry of its column, so the transformed check matrix has
//!    normalized columns;
//! 5. the outer code is the Hamming code of redundancy `r`;
//! 6. split the transformed code by block-sum profile.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codespace::{
    distance_unchecked, is_perfect, perfect_length_exponent, sigma_profile_unchecked, Certificate, Code,
    CodeParameters, MonomialTransform, SpaceIndex, Word,
};
use crate::combiner::Assembly;
use crate::components::MuComponent;
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::hamming::{hamming_code, ParityCheckMatrix};
use crate::linalg::RowBasis;
use crate::quasigroup::SigmaFamily;

/// Largest prefix space over which inner-code disjointness is checked exhaustively.
pub const EXHAUSTIVE_PREFIX_LIMIT: u64 = 1 << 22;
/// Number of random prefix pairs checked above that limit.
pub const SAMPLED_PAIRS: usize = 100_000;
const OWNER_MAP_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub psi: MonomialTransform,
    pub layout: CodeParameters,
    pub hstar: ParityCheckMatrix,
    pub outer: Code,
    /// Block sums.
    pub sigma: SigmaFamily,
    pub components: BTreeMap<Word, MuComponent>,
    /// For each profile, the tails admissible after each prefix.
    pub inner_tables: BTreeMap<Word, BTreeMap<Word, Code>>,
}

impl Decomposition {
    pub fn to_assembly(&self) -> Assembly {
        Assembly {
            outer: self.outer.clone(),
            components: self.components.clone(),
            layout: self.layout,
            sigma: self.sigma.clone(),
        }
    }
}

pub fn decompose(code: &Code, r: u32) -> Result<Decomposition> {
    let (q, n) = (code.q(), code.n());
    if let Some(cert) = is_perfect(code)?.certificate() {
        return Err(Error::NotPerfect {
            what: "input code".into(),
            certificate: cert.clone(),
        });
    }
    let m = perfect_length_exponent(q, n).ok_or(Error::BadLength { q, n })?;
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let field = FieldTable::shared(q)?;
    let mut basis = RowBasis::from_rows(field, n, code.iter());
    let max = (n - basis.rank()) as u32;
    if r > max {
        return Err(Error::RankTooHigh { r, max });
    }
    if r >= m {
        return Err(Error::InvalidParameter(format!("r={r} must be below m={m}")));
    }
    let params = CodeParameters::new(q, m, r)?;

    let target = n - r as usize;
    for i in 0..n {
        if basis.rank() == target {
            break;
        }
        basis.insert(&Word::unit(n, i, 1));
    }
    let dual = RowBasis::from_rows(field, n, basis.kernel().iter().map(Vec::as_slice));
    let rows = dual.rows();

    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    let mut zeros = Vec::new();
    let mut lead = vec![1u8; n];
    for j in 0..n {
        let col: Vec<u8> = rows.iter().map(|row| row[j]).collect();
        match col.iter().find(|&&c| c != 0) {
            None => zeros.push(j),
            Some(&a) => {
                let inv = field.inv(a)?;
                let point = col.iter().map(|&c| field.mul(c, inv)).collect();
                groups.entry(point).or_default().push(j);
                lead[j] = a;
            }
        }
    }
    let hstar = ParityCheckMatrix::canonical(q, r)?;
    if zeros.len() != params.n0
        || groups.len() != params.t
        || groups.values().any(|g| g.len() != params.l)
        || !groups.keys().eq(hstar.columns().iter())
    {
        let mult: Vec<usize> = groups.values().map(Vec::len).collect();
        return Err(Error::StructureViolation(format!(
            "check matrix has {} zero columns and point multiplicities {mult:?}; expected {} zero columns and {} points of multiplicity {}",
            zeros.len(),
            params.n0,
            params.t,
            params.l
        )));
    }

    let mut perm = vec![0; n];
    let mut scale = vec![1u8; n];
    for (pos, &j) in groups.values().flatten().chain(&zeros).enumerate() {
        perm[j] = pos;
        scale[pos] = lead[j];
    }
    let psi = MonomialTransform::new(perm, scale)?;
    let image = psi.apply(code)?;

    let outer = hamming_code(q, r)?;
    let sigma = SigmaFamily::block_sums(field, params.t, params.l)?;
    let layout = params.layout();
    let prefix = layout.prefix_len();

    let mut by_profile: BTreeMap<Word, Vec<u8>> = BTreeMap::new();
    for w in image.iter() {
        by_profile
            .entry(sigma_profile_unchecked(w, params.l, &sigma).into())
            .or_default()
            .extend_from_slice(w);
    }
    let mut components = BTreeMap::new();
    let mut inner_tables = BTreeMap::new();
    for (mu, data) in by_profile {
        let k = Code::from_flat_unchecked(q, n, data);
        let mut table: BTreeMap<Word, Vec<u8>> = BTreeMap::new();
        for w in k.iter() {
            table.entry(w[..prefix].into()).or_default().extend_from_slice(&w[prefix..]);
        }
        let table = table
            .into_iter()
            .map(|(x, tails)| (x, Code::from_flat_unchecked(q, params.n0, tails)))
            .collect();
        inner_tables.insert(mu.clone(), table);
        components.insert(mu.clone(), MuComponent::new(k, mu, layout, sigma.clone())?);
    }

    let d = Decomposition {
        psi,
        layout: params,
        hstar,
        outer,
        sigma,
        components,
        inner_tables,
    };
    match decomposition_verify(&d, code, 0)? {
        DecompositionCheck::Valid => Ok(d),
        DecompositionCheck::Invalid(c) => Err(Error::StructureViolation(c.to_string())),
    }
}

/// The first invariant a decomposition was found to break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionCertificate {
    /// A word of exactly one of `psi(C)` and the union of the components.
    Union { word: Word, in_image: bool },
    /// Two words of different components within distance 2.
    CloseWords { mu_a: Word, a: Word, mu_b: Word, b: Word },
    /// Two words of one component within distance 2.
    ComponentDistance { mu: Word, a: Word, b: Word },
    Outer(String),
    /// A word of a component not listed in its inner table, listed under
    /// the wrong profile, or a table entry missing from the component.
    InnerMismatch { mu: Word, word: Word },
    InnerNotPerfect {
        mu: Word,
        prefix: Word,
        certificate: Certificate,
    },
    /// Two prefixes within distance 2 whose inner codes share a tail.
    InnerOverlap { mu: Word, a: Word, b: Word, tail: Word },
    Cardinality { what: String, expected: u128, actual: usize },
}

impl fmt::Display for DecompositionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DecompositionCertificate::*;
        match self {
            Union { word, in_image: true } => write!(f, "{word} is in psi(C) but in no component"),
            Union { word, in_image: false } => write!(f, "{word} is in a component but not in psi(C)"),
            CloseWords { mu_a, a, mu_b, b } => {
                write!(f, "components {mu_a} and {mu_b} are within distance 2: {a} and {b}")
            }
            ComponentDistance { mu, a, b } => write!(f, "component {mu} has close words {a} and {b}"),
            Outer(msg) => write!(f, "outer code: {msg}"),
            InnerMismatch { mu, word } => write!(f, "component {mu} and its inner table disagree on {word}"),
            InnerNotPerfect { mu, prefix, certificate } => {
                write!(f, "inner code of component {mu} at prefix {prefix}: {certificate}")
            }
            InnerOverlap { mu, a, b, tail } => {
                write!(f, "component {mu}: prefixes {a} and {b} share tail {tail}")
            }
            Cardinality { what, expected, actual } => write!(f, "{what} has {actual} words, expected {expected}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionCheck {
    Valid,
    Invalid(DecompositionCertificate),
}

impl DecompositionCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, DecompositionCheck::Valid)
    }

    pub fn certificate(&self) -> Option<&DecompositionCertificate> {
        match self {
            DecompositionCheck::Valid => None,
            DecompositionCheck::Invalid(c) => Some(c),
        }
    }
}

macro_rules! fail {
    ($cert:expr) => {
        return Ok(DecompositionCheck::Invalid($cert))
    };
}

/// Re-checks every invariant of `d` against the original code, in order:
/// the union, pairwise component distance, the outer code, inner tables
/// both ways, perfectness of inner codes, disjointness of inner codes at
/// nearby prefixes, and cardinalities. `seed` drives the sampled
/// disjointness check used when the prefix space is too large to scan.
pub fn decomposition_verify(d: &Decomposition, code: &Code, seed: u64) -> Result<DecompositionCheck> {
    use DecompositionCertificate as Cert;
    let p = &d.layout;
    let (q, n) = (code.q(), code.n());
    if q != p.q || n != p.n {
        return Err(Error::LayoutMismatch(format!(
            "code over F_{q}^{n}, decomposition over F_{}^{}",
            p.q, p.n
        )));
    }
    let prefix = p.l * p.t;

    let image = d.psi.apply(code)?;
    let union = Code::union(q, n, d.components.values().map(MuComponent::code))?;
    if let Some(w) = image.iter().find(|w| !union.contains(w)) {
        fail!(Cert::Union {
            word: w.into(),
            in_image: true
        });
    }
    if let Some(w) = union.iter().find(|w| !image.contains(w)) {
        fail!(Cert::Union {
            word: w.into(),
            in_image: false
        });
    }

    if let Some(c) = close_words(d)? {
        fail!(c);
    }

    if d.hstar != ParityCheckMatrix::canonical(q, p.r)? || d.outer != hamming_code(q, p.r)? {
        fail!(Cert::Outer("not the canonical Hamming code of redundancy r".into()));
    }
    if let Some(mu) = d.outer.iter().find(|mu| !d.components.contains_key(*mu)) {
        fail!(Cert::Outer(format!("no component for {}", Word::from(mu))));
    }
    if let Some(mu) = d.components.keys().find(|mu| !d.outer.contains(mu)) {
        fail!(Cert::Outer(format!("component {mu} is not indexed by an outer word")));
    }

    let empty = BTreeMap::new();
    let mismatches: Vec<Option<Cert>> = d
        .components
        .par_iter()
        .map(|(mu, k)| {
            let table = d.inner_tables.get(mu).unwrap_or(&empty);
            for w in k.code().iter() {
                let ok = sigma_profile_unchecked(&w[..prefix], p.l, &d.sigma) == mu.symbols()
                    && table.get(&w[..prefix]).is_some_and(|c| c.contains(&w[prefix..]));
                if !ok {
                    return Some(Cert::InnerMismatch {
                        mu: mu.clone(),
                        word: w.into(),
                    });
                }
            }
            for (x, tails) in table {
                for z in tails.iter() {
                    let w = [x.symbols(), z].concat();
                    if !k.code().contains(&w) {
                        return Some(Cert::InnerMismatch {
                            mu: mu.clone(),
                            word: w.into(),
                        });
                    }
                }
            }
            None
        })
        .collect();
    if let Some(c) = mismatches.into_iter().flatten().next() {
        fail!(c);
    }
    if let Some(mu) = d.inner_tables.keys().find(|mu| !d.components.contains_key(*mu)) {
        fail!(Cert::InnerMismatch {
            mu: mu.clone(),
            word: Word::zeros(0)
        });
    }

    for (mu, table) in &d.inner_tables {
        for (x, tails) in table {
            if tails.is_empty() {
                continue;
            }
            if let Some(cert) = is_perfect(tails)?.certificate() {
                fail!(Cert::InnerNotPerfect {
                    mu: mu.clone(),
                    prefix: x.clone(),
                    certificate: cert.clone(),
                });
            }
        }
    }

    if let Some(c) = inner_overlap(d, seed)? {
        fail!(c);
    }

    let counts = [
        ("outer code", p.outer_size(), d.outer.len()),
        ("code", p.code_size(), code.len()),
        ("union of components", p.code_size(), union.len()),
    ];
    for (what, expected, actual) in counts {
        if expected != actual as u128 {
            fail!(Cert::Cardinality {
                what: what.into(),
                expected,
                actual
            });
        }
    }
    let total: usize = d.components.values().map(|k| k.code().len()).sum();
    if total != code.len() {
        fail!(Cert::Cardinality {
            what: "components together".into(),
            expected: code.len() as u128,
            actual: total
        });
    }
    for (mu, k) in &d.components {
        if k.code().len() as u128 != p.component_size() {
            fail!(Cert::Cardinality {
                what: format!("component {mu}"),
                expected: p.component_size(),
                actual: k.code().len()
            });
        }
    }
    Ok(DecompositionCheck::Valid)
}

/// Pairs of words within distance 2, reported as `CloseWords` across components
/// and `ComponentDistance` inside one.
fn close_words(d: &Decomposition) -> Result<Option<DecompositionCertificate>> {
    let words: Vec<(&Word, &[u8])> = d
        .components
        .iter()
        .flat_map(|(mu, k)| k.code().iter().map(move |w| (mu, w)))
        .collect();
    let report = |i: usize, j: usize| {
        let ((mu_a, a), (mu_b, b)) = (words[i], words[j]);
        if mu_a == mu_b {
            DecompositionCertificate::ComponentDistance {
                mu: mu_a.clone(),
                a: a.into(),
                b: b.into(),
            }
        } else {
            DecompositionCertificate::CloseWords {
                mu_a: mu_a.clone(),
                a: a.into(),
                mu_b: mu_b.clone(),
                b: b.into(),
            }
        }
    };
    match SpaceIndex::new(d.layout.q, d.layout.n, OWNER_MAP_LIMIT) {
        Ok(index) => {
            // radius-1 balls around two words meet iff the words are within distance 2
            let mut owner = vec![u32::MAX; index.size() as usize];
            let mut found = None;
            for (i, &(_, w)) in words.iter().enumerate() {
                let stopped = index.for_each_in_ball(w, index.index(w), |j| {
                    let o = &mut owner[j as usize];
                    if *o != u32::MAX {
                        found = Some(*o as usize);
                        return true;
                    }
                    *o = i as u32;
                    false
                });
                if stopped {
                    return Ok(Some(report(found.unwrap(), i)));
                }
            }
            Ok(None)
        }
        Err(_) => Ok((0..words.len())
            .flat_map(|i| (i + 1..words.len()).map(move |j| (i, j)))
            .find(|&(i, j)| distance_unchecked(words[i].1, words[j].1) <= 2)
            .map(|(i, j)| report(i, j))),
    }
}

/// Looks for two prefixes of one profile, within distance 2, whose inner
/// codes intersect.
fn inner_overlap(d: &Decomposition, seed: u64) -> Result<Option<DecompositionCertificate>> {
    let p = &d.layout;
    let entries: Vec<(&Word, &Word, &Code)> = d
        .inner_tables
        .iter()
        .flat_map(|(mu, t)| t.iter().map(move |(x, c)| (mu, x, c)))
        .filter(|(_, _, c)| !c.is_empty())
        .collect();
    let clash = |i: usize, j: usize| -> Option<DecompositionCertificate> {
        let ((mu, a, ca), (mu_b, b, cb)) = (entries[i], entries[j]);
        if i == j || mu != mu_b {
            return None;
        }
        ca.iter().find(|z| cb.contains(z)).map(|z| DecompositionCertificate::InnerOverlap {
            mu: mu.clone(),
            a: a.clone(),
            b: b.clone(),
            tail: z.into(),
        })
    };

    if let Ok(index) = SpaceIndex::new(p.q, p.l * p.t, EXHAUSTIVE_PREFIX_LIMIT) {
        let mut slot = vec![u32::MAX; index.size() as usize];
        for (i, (_, x, _)) in entries.iter().enumerate() {
            slot[index.index(x) as usize] = i as u32;
        }
        let found = entries.par_iter().enumerate().find_map_first(|(i, (_, x, _))| {
            let base = index.index(x);
            let mut hit = None;
            for dist in 1..=2 {
                index.for_each_at_distance(x, base, dist, &mut |j| {
                    let s = slot[j as usize];
                    if s != u32::MAX {
                        hit = clash(i, s as usize);
                    }
                    hit.is_some()
                });
                if hit.is_some() {
                    break;
                }
            }
            hit
        });
        return Ok(found);
    }

    let lookup: HashMap<&[u8], usize> = entries
        .iter()
        .enumerate()
        .map(|(i, (_, x, _))| (x.symbols(), i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = p.l * p.t;
    let mut y = vec![0u8; len];
    for _ in 0..SAMPLED_PAIRS {
        if entries.is_empty() {
            break;
        }
        let i = rng.gen_range(0..entries.len());
        y.copy_from_slice(entries[i].1);
        let a = rng.gen_range(0..len);
        let b = (a + rng.gen_range(1..len.max(2))) % len;
        for pos in [a, b] {
            y[pos] = ((y[pos] as u32 + rng.gen_range(1..p.q)) % p.q) as u8;
        }
        if let Some(c) = lookup.get(y.as_slice()).and_then(|&j| clash(i, j)) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
