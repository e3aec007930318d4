//! Words and codes over GF(q).
//!
//! A [`Code`] is a deduplicated set of equal-length words kept in canonical
//! lexicographic order (coordinate 0 most significant, symbols compared as
//! integers). Equality of two `Code` values is therefore set equality.

mod cover;
mod monomial;
mod params;

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::linalg::{for_each_combination, RowBasis};
use crate::quasigroup::SigmaFamily;

pub use cover::{close_pair, is_perfect, Certificate, CertificateKind, PerfectCheck, SpaceIndex, PERFECT_CHECK_LIMIT};
pub use monomial::MonomialTransform;
pub use params::{perfect_length_exponent, proj_count, BlockLayout, CodeParameters};

/// Largest span that [`span`] will materialize.
pub const SPAN_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn zeros(n: usize) -> Self {
        Word(vec![0; n])
    }

    /// Weight-one word with `value` at `pos`.
    pub fn unit(n: usize, pos: usize, value: u8) -> Self {
        let mut w = vec![0; n];
        w[pos] = value;
        Word(w)
    }

    /// Parses a digit string such as `0121`; every digit must be below `q`.
    pub fn parse_digits(s: &str, q: u32) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_digit(16) {
                Some(d) if d < q => Ok(d as u8),
                _ => Err(Error::parse(0, format!("bad digit {c:?} for q={q}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl Deref for Word {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

// Ordering and hashing agree with the slice, so maps keyed by `Word` can
// be queried with `&[u8]`.
impl std::borrow::Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

/// Writes `symbols` as concatenated digits (hex digits above 9).
pub fn write_digits(out: &mut impl fmt::Write, symbols: &[u8]) -> fmt::Result {
    for &s in symbols {
        out.write_char(char::from_digit(s.into(), 16).unwrap_or('?'))?;
    }
    Ok(())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, &self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code {
    q: u32,
    n: usize,
    // rows of length n, sorted and deduplicated
    data: Vec<u8>,
}

fn canonical_rows(n: usize, data: &[u8]) -> Vec<u8> {
    let mut rows: Vec<&[u8]> = data.chunks_exact(n).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.concat()
}

impl Code {
    /// Builds a code from arbitrary words, checking length and alphabet.
    pub fn new<W: AsRef<[u8]>>(q: u32, n: usize, words: impl IntoIterator<Item = W>) -> Result<Self> {
        let mut data = Vec::new();
        for w in words {
            let w = w.as_ref();
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: w.len(),
                });
            }
            data.extend_from_slice(w);
        }
        Code::from_flat(q, n, data)
    }

    /// Builds a code from concatenated rows of length `n`.
    pub fn from_flat(q: u32, n: usize, data: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("code length must be positive".into()));
        }
        if !data.len().is_multiple_of(n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: data.len() % n,
            });
        }
        if let Some(&bad) = data.iter().find(|&&s| u32::from(s) >= q) {
            return Err(Error::IndexOutOfRange { index: bad.into(), q });
        }
        Ok(Code::from_flat_unchecked(q, n, data))
    }

    pub(crate) fn from_flat_unchecked(q: u32, n: usize, data: Vec<u8>) -> Self {
        debug_assert!(n > 0 && data.len().is_multiple_of(n));
        Code {
            q,
            n,
            data: canonical_rows(n, &data),
        }
    }

    pub fn empty(q: u32, n: usize) -> Self {
        Code { q, n, data: Vec::new() }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Word length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords.
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn word(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.n)
    }

    pub fn words(&self) -> Vec<Word> {
        self.iter().map(Word::from).collect()
    }

    pub fn as_flat(&self) -> &[u8] {
        &self.data
    }

    pub fn position(&self, w: &[u8]) -> Option<usize> {
        if w.len() != self.n {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(w) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.position(w).is_some()
    }

    pub fn is_disjoint(&self, other: &Code) -> bool {
        self.iter().all(|w| !other.contains(w))
    }

    /// Union of codes sharing `q` and `n`.
    pub fn union<'a>(q: u32, n: usize, codes: impl IntoIterator<Item = &'a Code>) -> Result<Code> {
        let mut data = Vec::new();
        for c in codes {
            if c.q != q {
                return Err(Error::AlphabetMismatch { expected: q, actual: c.q });
            }
            if c.n != n {
                return Err(Error::LengthMismatch { expected: n, actual: c.n });
            }
            data.extend_from_slice(&c.data);
        }
        Ok(Code::from_flat_unchecked(q, n, data))
    }

    /// `{ c + z : c in self }`.
    pub fn translate(&self, z: &[u8]) -> Result<Code> {
        if z.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        let f = FieldTable::shared(self.q)?;
        let data = self
            .iter()
            .flat_map(|w| w.iter().zip(z).map(|(&a, &b)| f.add(a, b)))
            .collect();
        Ok(Code::from_flat_unchecked(self.q, self.n, data))
    }

    /// Does every codeword lie in the linear span of the code, i.e. is the
    /// code a subspace.
    pub fn is_linear(&self) -> Result<bool> {
        Ok(rank(self).map(|r| (self.q as u64).checked_pow(r as u32) == Some(self.len() as u64))?
            && self.contains(&vec![0; self.n]))
    }
}

pub fn hamming_distance(x: &[u8], y: &[u8]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(distance_unchecked(x, y))
}

#[inline]
pub(crate) fn distance_unchecked(x: &[u8], y: &[u8]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Minimum distance over all pairs of distinct codewords.
///
/// Searches outward from each codeword one radius at a time while that is
/// cheaper than comparing all pairs; falls back to the pairwise scan
/// otherwise.
pub fn min_distance(code: &Code) -> Result<usize> {
    let size = code.len();
    if size < 2 {
        return Err(Error::TooSmall(size));
    }
    let (q, n) = (code.q() as u64, code.n());
    let pairwise_cost = (size as u64 * size as u64 / 2).saturating_mul(n as u64);
    if let Ok(index) = SpaceIndex::new(code.q(), n, PERFECT_CHECK_LIMIT) {
        let members = index.membership(code);
        let mut binom = 1u64;
        let mut cost = 0u64;
        for d in 1..=n {
            binom = binom * (n - d + 1) as u64 / d as u64;
            cost = cost.saturating_add((size as u64).saturating_mul(binom.saturating_mul((q - 1).saturating_pow(d as u32))));
            if cost > pairwise_cost {
                break;
            }
            let hit = code.iter().any(|w| {
                let base = index.index(w);
                let mut found = false;
                index.for_each_at_distance(w, base, d, &mut |j| {
                    found |= members.get(j);
                    found
                });
                found
            });
            if hit {
                return Ok(d);
            }
        }
    }
    let mut best = n;
    for i in 0..size {
        for j in i + 1..size {
            best = best.min(distance_unchecked(code.word(i), code.word(j)));
            if best == 1 {
                return Ok(1);
            }
        }
    }
    Ok(best)
}

/// Dimension of the linear span of the codewords.
pub fn rank(code: &Code) -> Result<usize> {
    if code.is_empty() {
        return Err(Error::Empty);
    }
    let f = FieldTable::shared(code.q())?;
    let mut basis = RowBasis::new(f, code.n());
    for w in code.iter() {
        basis.insert(w);
        if basis.rank() == code.n() {
            break;
        }
    }
    Ok(basis.rank())
}

/// The linear span of the codewords as an explicit code.
pub fn span(code: &Code) -> Result<Code> {
    let f = FieldTable::shared(code.q())?;
    let basis = RowBasis::from_rows(f, code.n(), code.iter());
    let size = (code.q() as u64).checked_pow(basis.rank() as u32);
    if size.is_none_or(|s| s > SPAN_LIMIT) {
        return Err(Error::too_large(format!("span of dimension {}", basis.rank())));
    }
    let mut data = Vec::with_capacity(size.unwrap() as usize * code.n());
    for_each_combination(f, code.n(), basis.rows(), |v| data.extend_from_slice(v));
    Ok(Code::from_flat_unchecked(code.q(), code.n(), data))
}

/// Applies `sigma[i]` to block `i` (the `l` coordinates starting at `i*l`);
/// the trailing `n0` coordinates are ignored.
pub fn sigma_profile(x: &[u8], layout: &BlockLayout, sigma: &SigmaFamily) -> Result<Word> {
    check_sigma_layout(layout, sigma)?;
    if x.len() != layout.n() {
        return Err(Error::LengthMismatch {
            expected: layout.n(),
            actual: x.len(),
        });
    }
    Ok(Word(sigma_profile_unchecked(x, layout.l, sigma)))
}

pub(crate) fn check_sigma_layout(layout: &BlockLayout, sigma: &SigmaFamily) -> Result<()> {
    if sigma.arity() != layout.l || sigma.t() != layout.t || sigma.order() != layout.q {
        return Err(Error::ArityMismatch(format!(
            "sigma family is {} x {}-ary of order {}, layout has t={} l={} q={}",
            sigma.t(),
            sigma.arity(),
            sigma.order(),
            layout.t,
            layout.l,
            layout.q
        )));
    }
    Ok(())
}

pub(crate) fn sigma_profile_unchecked(x: &[u8], l: usize, sigma: &SigmaFamily) -> Vec<u8> {
    sigma
        .sigmas()
        .iter()
        .enumerate()
        .map(|(i, s)| s.eval(&x[i * l..(i + 1) * l]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasigroup::MultaryQuasigroup;
    use proptest::prelude::*;

    fn brute_min_distance(code: &Code) -> usize {
        let words = code.words();
        let mut best = usize::MAX;
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                best = best.min(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count());
            }
        }
        best
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&[0, 0, 0], &[0, 0, 0]).unwrap(), 0);
        assert_eq!(hamming_distance(&[0, 1, 2, 1], &[0, 2, 1, 1]).unwrap(), 2);
        assert!(matches!(hamming_distance(&[0, 1], &[0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn code_is_canonical() {
        let c = Code::new(3, 2, [[2u8, 1], [0, 2], [2, 1], [1, 0]]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.words(), vec![Word(vec![0, 2]), Word(vec![1, 0]), Word(vec![2, 1])]);
        assert!(c.contains(&[1, 0]));
        assert!(!c.contains(&[1, 1]));
        assert!(Code::new(2, 2, [[0u8, 2]]).is_err());
        assert!(Code::new(2, 2, [vec![0u8]]).is_err());
    }

    #[test]
    fn min_distance_small() {
        let c = Code::new(2, 2, [[0u8, 0], [1, 1]]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 2);
        let one = Code::new(2, 2, [[0u8, 0]]).unwrap();
        assert!(matches!(min_distance(&one), Err(Error::TooSmall(1))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Code::new(2, 4, [[0u8; 4]]).unwrap()).unwrap(), 0);
        assert_eq!(rank(&Code::new(3, 4, [[0u8, 1, 0, 2]]).unwrap()).unwrap(), 1);
        assert!(matches!(rank(&Code::empty(2, 3)), Err(Error::Empty)));
    }

    #[test]
    fn span_example() {
        let c = Code::new(2, 3, [[1u8, 1, 0], [0, 1, 1]]).unwrap();
        let s = span(&c).unwrap();
        let expected = Code::new(2, 3, [[0u8, 0, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn span_too_large() {
        let words: Vec<Vec<u8>> = (0..23).map(|i| Word::unit(23, i, 1).into_inner()).collect();
        let c = Code::new(2, 23, words).unwrap();
        assert!(matches!(span(&c), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn sigma_profile_block_parity() {
        let f = FieldTable::new(2).unwrap();
        let sum = MultaryQuasigroup::linear(&f, 2, &[1, 1], 0).unwrap();
        let sigma = SigmaFamily::new(vec![sum; 3]).unwrap();
        let layout = BlockLayout::new(2, 3, 2, 1).unwrap();
        let p = sigma_profile(&[1, 1, 0, 1, 0, 0, 0], &layout, &sigma).unwrap();
        assert_eq!(p.symbols(), &[0, 1, 0]);
        let z = sigma_profile(&[0; 7], &layout, &sigma).unwrap();
        assert_eq!(z.symbols(), &[0, 0, 0]);
        let wrong = BlockLayout::new(2, 2, 3, 1).unwrap();
        assert!(matches!(sigma_profile(&[0; 7], &wrong, &sigma), Err(Error::ArityMismatch(_))));
        assert!(matches!(sigma_profile(&[0; 6], &layout, &sigma), Err(Error::LengthMismatch { .. })));
    }

    fn arb_code(q: u32, n: usize, max: usize) -> impl Strategy<Value = Code> {
        proptest::collection::vec(proptest::collection::vec(0..q as u8, n), 1..max)
            .prop_map(move |ws| Code::new(q, n, ws).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distance_is_a_metric(
            x in proptest::collection::vec(0u8..3, 6),
            y in proptest::collection::vec(0u8..3, 6),
            z in proptest::collection::vec(0u8..3, 6),
        ) {
            let d = |a: &[u8], b: &[u8]| hamming_distance(a, b).unwrap();
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
            prop_assert_eq!(d(&x, &x), 0);
        }

        #[test]
        fn min_distance_matches_pairwise(c in arb_code(3, 5, 20)) {
            prop_assume!(c.len() >= 2);
            prop_assert_eq!(min_distance(&c).unwrap(), brute_min_distance(&c));
        }

        #[test]
        fn span_has_q_to_the_rank_words(c in arb_code(3, 4, 4)) {
            let s = span(&c).unwrap();
            prop_assert_eq!(s.len(), 3usize.pow(rank(&c).unwrap() as u32));
            prop_assert!(c.iter().all(|w| s.contains(w)));
        }
    }

    #[test]
    fn sigma_profile_matches_blockwise_fold() {
        use rand::{Rng, SeedableRng};
        let f = FieldTable::new(3).unwrap();
        let s1 = MultaryQuasigroup::linear(&f, 3, &[1, 2, 1], 1).unwrap();
        let s2 = MultaryQuasigroup::linear(&f, 3, &[2, 2, 1], 0).unwrap();
        let sigma = SigmaFamily::new(vec![s1, s2]).unwrap();
        let layout = BlockLayout::new(3, 2, 3, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: Vec<u8> = (0..7).map(|_| rng.gen_range(0..3)).collect();
            // independent evaluation: 1 + x0 + 2x1 + x2, 2x3 + 2x4 + x5 (mod 3)
            let a = (1 + x[0] + 2 * x[1] + x[2]) % 3;
            let b = (2 * x[3] + 2 * x[4] + x[5]) % 3;
            assert_eq!(sigma_profile(&x, &layout, &sigma).unwrap().symbols(), &[a, b]);
        }
    }
}
