//! Ball-covering checks over an explicit index of F_q^n.

use std::fmt;

use super::{Code, Word};
use crate::error::{Error, Result};

/// Largest space `is_perfect` will index.
pub const PERFECT_CHECK_LIMIT: u64 = 1 << 26;

// Owner maps cost four bytes per point; keep them smaller.
const OWNER_MAP_LIMIT: u64 = 1 << 24;

/// Bijection between F_q^n and `0..q^n`, coordinate 0 most significant.
#[derive(Debug, Clone)]
pub struct SpaceIndex {
    q: u64,
    n: usize,
    pow: Vec<u64>,
    size: u64,
}

pub(crate) struct BitSet(Vec<u64>);

impl BitSet {
    pub(crate) fn new(bits: u64) -> Self {
        BitSet(vec![0; bits.div_ceil(64) as usize])
    }

    #[inline]
    pub(crate) fn get(&self, i: u64) -> bool {
        self.0[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    /// Sets bit `i`, returning its previous value.
    #[inline]
    pub(crate) fn set(&mut self, i: u64) -> bool {
        let word = &mut self.0[(i >> 6) as usize];
        let mask = 1u64 << (i & 63);
        let old = *word & mask != 0;
        *word |= mask;
        old
    }
}

impl SpaceIndex {
    pub fn new(q: u32, n: usize, limit: u64) -> Result<Self> {
        let q = q as u64;
        let size = u32::try_from(n)
            .ok()
            .and_then(|e| q.checked_pow(e))
            .filter(|&s| s <= limit)
            .ok_or_else(|| Error::too_large(format!("space of {q}^{n} words")))?;
        let mut pow = vec![1u64; n];
        for i in (0..n.saturating_sub(1)).rev() {
            pow[i] = pow[i + 1] * q;
        }
        Ok(SpaceIndex { q, n, pow, size })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    #[inline]
    pub fn index(&self, w: &[u8]) -> u64 {
        w.iter().zip(&self.pow).map(|(&s, &p)| s as u64 * p).sum()
    }

    pub fn word(&self, mut idx: u64) -> Word {
        let mut w = vec![0u8; self.n];
        for i in (0..self.n).rev() {
            w[i] = (idx % self.q) as u8;
            idx /= self.q;
        }
        Word::new(w)
    }

    pub(crate) fn membership(&self, code: &Code) -> BitSet {
        let mut bits = BitSet::new(self.size);
        for w in code.iter() {
            bits.set(self.index(w));
        }
        bits
    }

    /// Visits `w` and its distance-1 neighbours: position by position, new
    /// values ascending.
    #[inline]
    pub(crate) fn for_each_in_ball(&self, w: &[u8], base: u64, mut visit: impl FnMut(u64) -> bool) -> bool {
        if visit(base) {
            return true;
        }
        for (i, &s) in w.iter().enumerate() {
            let p = self.pow[i];
            let zeroed = base - s as u64 * p;
            for v in 0..self.q {
                if v != s as u64 && visit(zeroed + v * p) {
                    return true;
                }
            }
        }
        false
    }

    /// Visits every index at distance exactly `d` from `w`; stops early when
    /// `visit` returns true.
    pub(crate) fn for_each_at_distance(&self, w: &[u8], base: u64, d: usize, visit: &mut dyn FnMut(u64) -> bool) -> bool {
        fn rec(ix: &SpaceIndex, w: &[u8], from: usize, left: usize, cur: u64, visit: &mut dyn FnMut(u64) -> bool) -> bool {
            if left == 0 {
                return visit(cur);
            }
            for i in from..=w.len() - left {
                let p = ix.pow[i];
                let zeroed = cur - w[i] as u64 * p;
                for v in 0..ix.q {
                    if v != w[i] as u64 && rec(ix, w, i + 1, left - 1, zeroed + v * p, visit) {
                        return true;
                    }
                }
            }
            false
        }
        d <= w.len() && rec(self, w, 0, d, base, visit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Uncovered,
    DoublyCovered,
}

/// A word witnessing that radius-1 balls fail to tile the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub word: Word,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            CertificateKind::Uncovered => "uncovered",
            CertificateKind::DoublyCovered => "doubly covered",
        };
        write!(f, "{what} word {}", self.word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectCheck {
    Perfect,
    Imperfect(Certificate),
}

impl PerfectCheck {
    pub fn is_perfect(&self) -> bool {
        matches!(self, PerfectCheck::Perfect)
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            PerfectCheck::Perfect => None,
            PerfectCheck::Imperfect(c) => Some(c),
        }
    }
}

/// Decides whether the radius-1 balls around the codewords tile F_q^n.
///
/// Codewords are processed in canonical order and each ball center-first,
/// so the certificate is deterministic: the first doubly covered word met,
/// or (when no ball collides but the count is short) the smallest
/// uncovered word.
pub fn is_perfect(code: &Code) -> Result<PerfectCheck> {
    let (q, n) = (code.q(), code.n());
    let index = SpaceIndex::new(q, n, PERFECT_CHECK_LIMIT)?;
    let ball = 1 + n as u64 * (q as u64 - 1);
    let size_matches = code.len() as u64 * ball == index.size();

    let mut covered = BitSet::new(index.size());
    let mut collision = None;
    for w in code.iter() {
        let base = index.index(w);
        if index.for_each_in_ball(w, base, |j| {
            let hit = covered.set(j);
            if hit {
                collision = Some(j);
            }
            hit
        }) {
            break;
        }
    }
    if let Some(j) = collision {
        return Ok(PerfectCheck::Imperfect(Certificate {
            kind: CertificateKind::DoublyCovered,
            word: index.word(j),
        }));
    }
    if size_matches {
        return Ok(PerfectCheck::Perfect);
    }
    let hole = (0..index.size()).find(|&j| !covered.get(j)).expect("too few balls leave a hole");
    Ok(PerfectCheck::Imperfect(Certificate {
        kind: CertificateKind::Uncovered,
        word: index.word(hole),
    }))
}

/// Finds two codewords at distance at most 2, returned as positions in
/// canonical order, or `None` when the minimum distance is at least 3.
pub fn close_pair(code: &Code) -> Option<(usize, usize)> {
    if let Ok(index) = SpaceIndex::new(code.q(), code.n(), OWNER_MAP_LIMIT) {
        // two radius-1 balls meet iff their centers are within distance 2
        let mut owner = vec![u32::MAX; index.size() as usize];
        let mut found = None;
        for (i, w) in code.iter().enumerate() {
            let base = index.index(w);
            if index.for_each_in_ball(w, base, |j| {
                let o = owner[j as usize];
                if o != u32::MAX && o as usize != i {
                    found = Some((o as usize, i));
                    return true;
                }
                owner[j as usize] = i as u32;
                false
            }) {
                break;
            }
        }
        return found;
    }
    for i in 0..code.len() {
        for j in i + 1..code.len() {
            if super::distance_unchecked(code.word(i), code.word(j)) <= 2 {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_cover_counts(code: &Code) -> Vec<usize> {
        let ix = SpaceIndex::new(code.q(), code.n(), 1 << 20).unwrap();
        (0..ix.size())
            .map(|j| {
                let w = ix.word(j);
                code.iter().filter(|c| super::super::distance_unchecked(c, &w) <= 1).count()
            })
            .collect()
    }

    #[test]
    fn repetition_code_is_perfect() {
        let c = Code::new(2, 3, [[0u8, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(is_perfect(&c).unwrap(), PerfectCheck::Perfect);
        assert!(brute_cover_counts(&c).iter().all(|&k| k == 1));
    }

    #[test]
    fn doubly_covered_certificate() {
        let c = Code::new(2, 3, [[0u8, 0, 0], [0, 1, 1]]).unwrap();
        let check = is_perfect(&c).unwrap();
        let cert = check.certificate().unwrap();
        assert_eq!(cert.kind, CertificateKind::DoublyCovered);
        assert_eq!(cert.word.symbols(), &[0, 0, 1]);
        let counts = brute_cover_counts(&c);
        let ix = SpaceIndex::new(2, 3, 64).unwrap();
        assert!(counts[ix.index(&cert.word) as usize] >= 2);
    }

    #[test]
    fn uncovered_certificate() {
        let c = Code::new(2, 3, [[0u8, 0, 0]]).unwrap();
        let cert = is_perfect(&c).unwrap().certificate().cloned().unwrap();
        assert_eq!(cert.kind, CertificateKind::Uncovered);
        assert_eq!(cert.word.symbols(), &[0, 1, 1]);
        let empty = Code::empty(3, 2);
        let cert = is_perfect(&empty).unwrap().certificate().cloned().unwrap();
        assert_eq!(cert.word.symbols(), &[0, 0]);
    }

    #[test]
    fn too_large_space() {
        let c = Code::new(2, 27, [[0u8; 27]]).unwrap();
        assert!(matches!(is_perfect(&c), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn distance_enumeration_counts() {
        let ix = SpaceIndex::new(3, 5, 1 << 10).unwrap();
        let w = [0u8, 2, 1, 1, 0];
        let base = ix.index(&w);
        for d in 0..=5 {
            let mut seen = Vec::new();
            ix.for_each_at_distance(&w, base, d, &mut |j| {
                seen.push(j);
                false
            });
            let expect = (0..ix.size())
                .filter(|&j| super::super::distance_unchecked(&ix.word(j), &w) == d)
                .count();
            assert_eq!(seen.len(), expect, "d={d}");
            assert!(seen.iter().all(|&j| super::super::distance_unchecked(&ix.word(j), &w) == d));
        }
    }

    #[test]
    fn close_pair_finds_distance_two() {
        let c = Code::new(3, 4, [[0u8, 0, 0, 0], [1, 1, 1, 0], [0, 2, 2, 0]]).unwrap();
        let (i, j) = close_pair(&c).unwrap();
        assert!(super::super::distance_unchecked(c.word(i), c.word(j)) <= 2);
        let far = Code::new(3, 4, [[0u8, 0, 0, 0], [1, 1, 1, 0]]).unwrap();
        assert_eq!(close_pair(&far), None);
    }
}
