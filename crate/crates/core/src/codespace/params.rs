use std::fmt;

use crate::error::{Error, Result};

/// `(q^k - 1) / (q - 1)`, the number of points of the projective space of
/// dimension `k - 1` over GF(q).
pub fn proj_count(q: u32, k: u32) -> u64 {
    (0..k).map(|i| (q as u64).pow(i)).sum()
}

/// The `m` with `n = (q^m - 1)/(q - 1)`, if any.
pub fn perfect_length_exponent(q: u32, n: usize) -> Option<u32> {
    if q < 2 {
        return None;
    }
    let mut m = 0;
    loop {
        let len = proj_count(q, m);
        if len == n as u64 {
            return Some(m);
        }
        if len > n as u64 {
            return None;
        }
        m += 1;
    }
}

/// How a length-`n` word splits into `t` blocks of `l` coordinates followed
/// by a tail of `n0` coordinates: `(x_1 | ... | x_t | x_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockLayout {
    pub q: u32,
    pub t: usize,
    pub l: usize,
    pub n0: usize,
}

impl BlockLayout {
    pub fn new(q: u32, t: usize, l: usize, n0: usize) -> Result<Self> {
        if t == 0 || l == 0 {
            return Err(Error::InvalidParameter(format!("block layout needs t, l >= 1 (t={t}, l={l})")));
        }
        Ok(BlockLayout { q, t, l, n0 })
    }

    pub fn n(&self) -> usize {
        self.l * self.t + self.n0
    }

    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        i * self.l..(i + 1) * self.l
    }

    pub fn prefix_len(&self) -> usize {
        self.l * self.t
    }

    /// Recovers `(m, r)` when the layout is the one of a combinable
    /// component: `t = (q^r-1)/(q-1)`, `l = q^s`, `n0 = (q^s-1)/(q-1)`,
    /// `m = r + s`, `r >= 1`, `s >= 1`.
    pub fn combinable(&self) -> Option<CodeParameters> {
        let r = perfect_length_exponent(self.q, self.t)?;
        let s = perfect_length_exponent(self.q, self.n0)?;
        let params = CodeParameters::new(self.q, r + s, r).ok()?;
        (params.layout() == *self).then_some(params)
    }
}

impl fmt::Display for BlockLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} l={} n0={}", self.t, self.l, self.n0)
    }
}

/// The parameters of a length-`n` perfect code split for a given `r`:
/// `n = (q^m-1)/(q-1) = l*t + n0` with `t = (q^r-1)/(q-1)`, `s = m - r`,
/// `l = q^s`, `n0 = (q^s-1)/(q-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParameters {
    pub q: u32,
    pub m: u32,
    pub n: usize,
    pub r: u32,
    pub t: usize,
    pub s: u32,
    pub l: usize,
    pub n0: usize,
}

impl CodeParameters {
    pub fn new(q: u32, m: u32, r: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        if r < 1 || r >= m {
            return Err(Error::InvalidParameter(format!("need 1 <= r < m, got r={r}, m={m}")));
        }
        let s = m - r;
        let n = proj_count(q, m);
        if n > 1 << 20 {
            return Err(Error::too_large(format!("length (q^{m}-1)/(q-1)")));
        }
        Ok(CodeParameters {
            q,
            m,
            n: n as usize,
            r,
            t: proj_count(q, r) as usize,
            s,
            l: (q as usize).pow(s),
            n0: proj_count(q, s) as usize,
        })
    }

    /// Parameters for a perfect code of length `n`.
    pub fn for_length(q: u32, n: usize, r: u32) -> Result<Self> {
        let m = perfect_length_exponent(q, n).ok_or(Error::BadLength { q, n })?;
        CodeParameters::new(q, m, r)
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout {
            q: self.q,
            t: self.t,
            l: self.l,
            n0: self.n0,
        }
    }

    /// `n - m - (t - r)`, the log-size of one component.
    pub fn component_exponent(&self) -> u32 {
        (self.n as u32 - self.m) - (self.t as u32 - self.r)
    }

    /// `|C| = q^(n-m)` for a perfect code of this length.
    pub fn code_size(&self) -> u128 {
        (self.q as u128).pow(self.n as u32 - self.m)
    }

    pub fn component_size(&self) -> u128 {
        (self.q as u128).pow(self.component_exponent())
    }

    pub fn outer_size(&self) -> u128 {
        (self.q as u128).pow(self.t as u32 - self.r)
    }
}

impl fmt::Display for CodeParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.q, self.m, self.r, self.t, self.s, self.l, self.n0
        )
    }
}
