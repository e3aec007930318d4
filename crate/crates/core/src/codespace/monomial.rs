use super::Code;
use crate::error::{Error, Result};
use crate::gfq::FieldTable;

/// Coordinate permutation followed by per-coordinate nonzero scaling:
/// `y[perm[i]] = scale[perm[i]] * x[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialTransform {
    perm: Vec<usize>,
    scale: Vec<u8>,
}

impl MonomialTransform {
    pub fn new(perm: Vec<usize>, scale: Vec<u8>) -> Result<Self> {
        let n = perm.len();
        if scale.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: scale.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
        }
        if let Some(i) = scale.iter().position(|&s| s == 0) {
            return Err(Error::ZeroCoefficient(i));
        }
        Ok(MonomialTransform { perm, scale })
    }

    pub fn identity(n: usize) -> Self {
        MonomialTransform {
            perm: (0..n).collect(),
            scale: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scale(&self) -> &[u8] {
        &self.scale
    }

    pub fn apply_word(&self, field: &FieldTable, x: &[u8]) -> Vec<u8> {
        let mut y = vec![0u8; x.len()];
        for (i, &xi) in x.iter().enumerate() {
            let j = self.perm[i];
            y[j] = field.mul(self.scale[j], xi);
        }
        y
    }

    pub fn apply(&self, code: &Code) -> Result<Code> {
        if code.n() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: code.n(),
            });
        }
        let f = FieldTable::shared(code.q())?;
        if let Some(&s) = self.scale.iter().find(|&&s| u32::from(s) >= code.q()) {
            return Err(Error::IndexOutOfRange { index: s.into(), q: code.q() });
        }
        let data = code.iter().flat_map(|w| self.apply_word(f, w)).collect();
        Ok(Code::from_flat_unchecked(code.q(), code.n(), data))
    }

    pub fn inverse(&self, field: &FieldTable) -> Result<Self> {
        let n = self.len();
        let mut perm = vec![0; n];
        let mut scale = vec![0; n];
        for (i, &j) in self.perm.iter().enumerate() {
            perm[j] = i;
            scale[i] = field.inv(self.scale[j])?;
        }
        Ok(MonomialTransform { perm, scale })
    }
}
