//! Row reduction over GF(q).

use crate::gfq::FieldTable;

/// A subspace of GF(q)^n kept as a reduced row echelon basis.
#[derive(Debug, Clone)]
pub struct RowBasis<'f> {
    field: &'f FieldTable,
    n: usize,
    // each row has a leading 1 at `pivots[i]`, zeros in every other pivot column
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl<'f> RowBasis<'f> {
    pub fn new(field: &'f FieldTable, n: usize) -> Self {
        RowBasis {
            field,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a>(
        field: &'f FieldTable,
        n: usize,
        rows: impl IntoIterator<Item = &'a [u8]>,
    ) -> Self {
        let mut b = RowBasis::new(field, n);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis in place; returns true when it became zero.
    pub fn reduce(&self, v: &mut [u8]) -> bool {
        let f = self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w)
    }

    /// Adds `v` to the spanning set. Returns true if the rank grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let f = self.field;
        let mut w = v.to_vec();
        if self.reduce(&mut w) {
            return false;
        }
        let p = w.iter().position(|&x| x != 0).unwrap();
        let lead_inv = f.inv(w[p]).unwrap();
        for x in w.iter_mut() {
            *x = f.mul(*x, lead_inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&w) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis of `{ x : <row, x> = 0 for every row }`, one vector per free
    /// column in increasing column order.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let f = self.field;
        let mut out = Vec::with_capacity(self.n - self.rank());
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut x = vec![0u8; self.n];
            x[free] = 1;
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                x[p] = f.neg(row[free]);
            }
            out.push(x);
        }
        out
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank_of<'a>(field: &FieldTable, n: usize, rows: impl IntoIterator<Item = &'a [u8]>) -> usize {
    RowBasis::from_rows(field, n, rows).rank()
}

/// Calls `visit` with every GF(q)-linear combination of `basis`, in
/// odometer order of the coefficient vector (last basis vector fastest).
pub fn for_each_combination(field: &FieldTable, n: usize, basis: &[Vec<u8>], mut visit: impl FnMut(&[u8])) {
    let q = field.order() as u8;
    let k = basis.len();
    let mut coeffs = vec![0u8; k];
    let mut acc = vec![0u8; n];
    loop {
        visit(&acc);
        // increment the odometer, updating acc by the coefficient deltas
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let old = coeffs[i];
            let new = if old + 1 == q { 0 } else { old + 1 };
            coeffs[i] = new;
            let delta = field.sub(new, old);
            for (a, &b) in acc.iter_mut().zip(&basis[i]) {
                *a = field.add(*a, field.mul(delta, b));
            }
            if new != 0 {
                break;
            }
        }
    }
}
