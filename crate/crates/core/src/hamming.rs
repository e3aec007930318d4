//! Hamming codes and partitions of F_q^k into perfect codes.

use crate::codespace::{is_perfect, perfect_length_exponent, proj_count, Code, SpaceIndex};
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::linalg::{for_each_combination, RowBasis};

const MAX_POINTS: u64 = 100_000;
const MAX_CODE_SIZE: u64 = 1 << 22;
const MAX_PARTITION_SPACE: u64 = 1 << 22;

/// `r x t` check matrix whose columns are the normalized projective points
/// of GF(q)^r in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    q: u32,
    r: usize,
    columns: Vec<Vec<u8>>,
}

impl ParityCheckMatrix {
    pub fn canonical(q: u32, r: u32) -> Result<Self> {
        Ok(ParityCheckMatrix {
            q,
            r: r as usize,
            columns: projective_points(q, r)?,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<u8>] {
        &self.columns
    }

    /// Rows of the matrix, each of length `t`.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.r)
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect()
    }

    /// `H x` as a vector of GF(q)^r.
    pub fn syndrome(&self, field: &FieldTable, x: &[u8]) -> Vec<u8> {
        let mut s = vec![0u8; self.r];
        for (col, &xi) in self.columns.iter().zip(x) {
            if xi != 0 {
                for (acc, &c) in s.iter_mut().zip(col) {
                    *acc = field.add(*acc, field.mul(c, xi));
                }
            }
        }
        s
    }

    /// Position of the syndrome in the base-q order of GF(q)^r.
    pub fn syndrome_index(&self, field: &FieldTable, x: &[u8]) -> usize {
        self.syndrome(field, x)
            .iter()
            .fold(0, |acc, &d| acc * self.q as usize + d as usize)
    }
}

/// Nonzero vectors of GF(q)^r whose first nonzero entry is 1, in
/// lexicographic order with coordinate 0 most significant.
pub fn projective_points(q: u32, r: u32) -> Result<Vec<Vec<u8>>> {
    FieldTable::shared(q)?;
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if proj_count(q, r) > MAX_POINTS {
        return Err(Error::too_large(format!("(q^{r}-1)/(q-1) points")));
    }
    let total = (q as u64).pow(r);
    let index = SpaceIndex::new(q, r as usize, total)?;
    Ok((1..total)
        .map(|i| index.word(i).into_inner())
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect())
}

/// The Hamming code of redundancy `r`: the null space of the canonical
/// `r x (q^r-1)/(q-1)` check matrix, enumerated from a kernel basis.
pub fn hamming_code(q: u32, r: u32) -> Result<Code> {
    let h = ParityCheckMatrix::canonical(q, r)?;
    let t = h.t();
    let dim = t - r as usize;
    if (q as u64).checked_pow(dim as u32).is_none_or(|s| s > MAX_CODE_SIZE) {
        return Err(Error::too_large(format!("Hamming code with q^{dim} words")));
    }
    let f = FieldTable::shared(q)?;
    let rows = h.rows();
    let kernel = RowBasis::from_rows(f, t, rows.iter().map(|r| r.as_slice())).kernel();
    let mut data = Vec::with_capacity((q as usize).pow(dim as u32) * t);
    for_each_combination(f, t, &kernel, |v| data.extend_from_slice(v));
    Ok(Code::from_flat_unchecked(q, t, data))
}

/// A partition of F_q^k into `(q-1)k + 1` perfect codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectPartition {
    q: u32,
    n0: usize,
    parts: Vec<Code>,
    // part index of every word of F_q^n0, by SpaceIndex order
    lookup: Vec<u16>,
}

impl PerfectPartition {
    /// Validates an externally supplied partition.
    pub fn new(q: u32, n0: usize, parts: Vec<Code>) -> Result<Self> {
        let expected = (q as usize - 1) * n0 + 1;
        if parts.len() != expected {
            return Err(Error::BadPartition(format!("{} parts, expected {expected}", parts.len())));
        }
        let index = SpaceIndex::new(q, n0, MAX_PARTITION_SPACE)?;
        let mut lookup = vec![u16::MAX; index.size() as usize];
        for (j, part) in parts.iter().enumerate() {
            if part.q() != q || part.n() != n0 {
                return Err(Error::BadPartition(format!("part {j} has q={} n={}", part.q(), part.n())));
            }
            if let Some(cert) = is_perfect(part)?.certificate() {
                return Err(Error::BadPartition(format!("part {j} is not perfect: {cert}")));
            }
            for w in part.iter() {
                let slot = &mut lookup[index.index(w) as usize];
                if *slot != u16::MAX {
                    return Err(Error::BadPartition(format!(
                        "word {} lies in parts {} and {j}",
                        crate::codespace::Word::from(w),
                        *slot
                    )));
                }
                *slot = j as u16;
            }
        }
        if let Some(hole) = lookup.iter().position(|&s| s == u16::MAX) {
            return Err(Error::BadPartition(format!(
                "word {} lies in no part",
                index.word(hole as u64)
            )));
        }
        Ok(PerfectPartition { q, n0, parts, lookup })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn parts(&self) -> &[Code] {
        &self.parts
    }

    /// The partition function: index of the part containing `y`.
    #[inline]
    pub fn part_of(&self, y: &[u8]) -> usize {
        let k = self.q as usize;
        self.lookup[y.iter().fold(0, |acc, &d| acc * k + d as usize)] as usize
    }
}

/// Cosets of the Hamming code of length `n0`, part `j` being the coset with
/// syndrome index `j`. For `n0 = 1` these are the `q` singletons.
pub fn perfect_partition(q: u32, n0: usize) -> Result<PerfectPartition> {
    let s = match perfect_length_exponent(q, n0) {
        Some(s) if s >= 1 => s,
        _ => return Err(Error::BadLength { q, n: n0 }),
    };
    let f = FieldTable::shared(q)?;
    let h = ParityCheckMatrix::canonical(q, s)?;
    let index = SpaceIndex::new(q, n0, MAX_PARTITION_SPACE)?;
    let mut buckets = vec![Vec::new(); (q as usize).pow(s)];
    for i in 0..index.size() {
        let w = index.word(i);
        buckets[h.syndrome_index(f, &w)].extend_from_slice(&w);
    }
    let parts = buckets
        .into_iter()
        .map(|data| Code::from_flat_unchecked(q, n0, data))
        .collect();
    PerfectPartition::new(q, n0, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::{min_distance, rank, Word};

    #[test]
    fn projective_point_lists() {
        let p = projective_points(2, 3).unwrap();
        let want: Vec<Vec<u8>> = (1..8u8).map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1]).collect();
        assert_eq!(p, want);
        assert_eq!(projective_points(3, 2).unwrap(), vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]);
        assert_eq!(projective_points(4, 2).unwrap().len(), 5);
        assert!(matches!(projective_points(2, 20), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn projective_points_by_normalizing() {
        // independent route: normalize every nonzero vector and dedupe
        for (q, r) in [(3u32, 2u32), (4, 2), (5, 2), (3, 3)] {
            let f = FieldTable::new(q).unwrap();
            let ix = SpaceIndex::new(q, r as usize, 1 << 12).unwrap();
            let mut set = std::collections::BTreeSet::new();
            for i in 1..ix.size() {
                let w = ix.word(i);
                let lead = *w.iter().find(|&&x| x != 0).unwrap();
                let inv = f.inv(lead).unwrap();
                set.insert(w.iter().map(|&x| f.mul(x, inv)).collect::<Vec<u8>>());
            }
            assert_eq!(projective_points(q, r).unwrap(), set.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn hamming_codes_basic() {
        let h = hamming_code(2, 3).unwrap();
        assert_eq!((h.len(), h.n()), (16, 7));
        assert_eq!(min_distance(&h).unwrap(), 3);
        assert_eq!(rank(&h).unwrap(), 4);
        assert!(is_perfect(&h).unwrap().is_perfect());

        let h = hamming_code(3, 2).unwrap();
        assert_eq!((h.len(), h.n()), (9, 4));
        assert_eq!(min_distance(&h).unwrap(), 3);
        assert!(is_perfect(&h).unwrap().is_perfect());

        assert_eq!(hamming_code(2, 2).unwrap(), Code::new(2, 3, [[0u8, 0, 0], [1, 1, 1]]).unwrap());
        assert_eq!(hamming_code(5, 1).unwrap(), Code::new(5, 1, [[0u8]]).unwrap());
    }

    #[test]
    fn hamming_code_is_linear() {
        for (q, r) in [(2, 3), (2, 4), (3, 2), (4, 2), (5, 2)] {
            let h = hamming_code(q, r).unwrap();
            let f = FieldTable::shared(q).unwrap();
            for a in h.iter() {
                for b in h.iter() {
                    let s: Vec<u8> = a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect();
                    assert!(h.contains(&s));
                }
                for c in f.nonzero() {
                    let s: Vec<u8> = a.iter().map(|&x| f.mul(c, x)).collect();
                    assert!(h.contains(&s));
                }
            }
        }
    }

    #[test]
    fn hamming_code_matches_filtered_null_space() {
        for (q, r) in [(2u32, 3u32), (3, 2), (4, 2)] {
            let f = FieldTable::shared(q).unwrap();
            let h = ParityCheckMatrix::canonical(q, r).unwrap();
            let ix = SpaceIndex::new(q, h.t(), 1 << 16).unwrap();
            let filtered: Vec<Word> = (0..ix.size())
                .map(|i| ix.word(i))
                .filter(|w| h.syndrome(f, w).iter().all(|&s| s == 0))
                .collect();
            assert_eq!(hamming_code(q, r).unwrap().words(), filtered);
        }
    }

    #[test]
    fn singleton_partition() {
        let p = perfect_partition(3, 1).unwrap();
        let parts: Vec<Vec<Word>> = p.parts().iter().map(|c| c.words()).collect();
        assert_eq!(parts, vec![vec![Word::new(vec![0])], vec![Word::new(vec![1])], vec![Word::new(vec![2])]]);
        assert_eq!(p.part_of(&[2]), 2);
    }

    #[test]
    fn coset_partitions() {
        for (q, n0) in [(2u32, 3usize), (2, 7), (3, 4), (4, 5)] {
            let p = perfect_partition(q, n0).unwrap();
            assert_eq!(p.parts().len(), (q as usize - 1) * n0 + 1);
            assert_eq!(p.parts().iter().map(Code::len).sum::<usize>(), (q as usize).pow(n0 as u32));
            for part in p.parts() {
                assert!(is_perfect(part).unwrap().is_perfect());
            }
            for (j, part) in p.parts().iter().enumerate() {
                assert!(part.iter().all(|w| p.part_of(w) == j));
            }
            assert!(p.parts()[0].contains(&vec![0; n0]));
        }
        let p = perfect_partition(2, 3).unwrap();
        assert_eq!(p.parts()[0], hamming_code(2, 2).unwrap());
    }

    #[test]
    fn partition_errors() {
        assert!(matches!(perfect_partition(2, 4), Err(Error::BadLength { .. })));
        assert!(matches!(perfect_partition(3, 0), Err(Error::BadLength { .. })));
        let single = Code::new(2, 1, [[0u8]]).unwrap();
        assert!(matches!(
            PerfectPartition::new(2, 1, vec![single.clone(), single]),
            Err(Error::BadPartition(_))
        ));
        let both = Code::new(2, 1, [[0u8], [1]]).unwrap();
        assert!(matches!(PerfectPartition::new(2, 1, vec![both, Code::empty(2, 1)]), Err(Error::BadPartition(_))));
    }
}
