//! Multary quasigroups as flat lookup tables.
//!
//! An `m`-ary quasigroup of order `k` is a map `f: S^m -> S`, `|S| = k`,
//! such that in `z0 = f(z1, ..., zm)` any `m` of the `m + 1` values
//! determine the remaining one. For a total table this is equivalent to
//! every line (all arguments fixed but one) being a permutation of `S`.
//!
//! Tables are row-major: the argument tuple `(x1, ..., xm)` sits at
//! `sum x_i * k^(m-i)`, so `x1` is the most significant digit.

mod enumerate;

use std::fmt;

use crate::codespace::{is_perfect, Code, PerfectCheck};
use crate::error::{Error, Result};
use crate::gfq::FieldTable;

pub use enumerate::{qg_count, QuasigroupStream};

/// Largest table materialized by composition.
pub const TABLE_LIMIT: u64 = 1 << 24;

/// A line of a candidate table that is not a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineViolation {
    /// Zero-based argument position that varies along the line.
    pub position: usize,
    /// The argument tuple at which `value` repeats.
    pub args: Vec<u8>,
    pub value: u8,
}

impl fmt::Display for LineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "value {} repeats along argument {} at (", self.value, self.position + 1)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QgCheck {
    Valid,
    Violation(LineViolation),
}

impl QgCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, QgCheck::Valid)
    }
}

fn table_len(arity: usize, order: u32) -> Option<usize> {
    (order as usize).checked_pow(u32::try_from(arity).ok()?)
}

fn digits(mut idx: usize, arity: usize, order: usize) -> Vec<u8> {
    let mut a = vec![0u8; arity];
    for slot in a.iter_mut().rev() {
        *slot = (idx % order) as u8;
        idx /= order;
    }
    a
}

/// Checks the quasigroup property of a candidate table in every direction.
pub fn qg_check(table: &[u8], arity: usize, order: u32) -> Result<QgCheck> {
    if arity == 0 || order == 0 || order > 64 {
        return Err(Error::BadShape(format!("arity {arity}, order {order}")));
    }
    let len = table_len(arity, order).ok_or_else(|| Error::BadShape("table too large".into()))?;
    if table.len() != len {
        return Err(Error::BadShape(format!(
            "table has {} entries, expected {order}^{arity} = {len}",
            table.len()
        )));
    }
    if let Some(&v) = table.iter().find(|&&v| u32::from(v) >= order) {
        return Err(Error::BadShape(format!("value {v} outside alphabet of order {order}")));
    }
    let k = order as usize;
    for pos in 0..arity {
        let stride = k.pow((arity - 1 - pos) as u32);
        for base in (0..len).filter(|&i| (i / stride).is_multiple_of(k)) {
            let mut seen = 0u64;
            for v in 0..k {
                let idx = base + v * stride;
                let val = table[idx];
                if seen >> val & 1 == 1 {
                    return Ok(QgCheck::Violation(LineViolation {
                        position: pos,
                        args: digits(idx, arity, k),
                        value: val,
                    }));
                }
                seen |= 1 << val;
            }
        }
    }
    Ok(QgCheck::Valid)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultaryQuasigroup {
    arity: usize,
    order: u32,
    table: Vec<u8>,
}

impl MultaryQuasigroup {
    /// Wraps a table after checking the quasigroup property.
    pub fn new(arity: usize, order: u32, table: Vec<u8>) -> Result<Self> {
        match qg_check(&table, arity, order)? {
            QgCheck::Valid => Ok(MultaryQuasigroup { arity, order, table }),
            QgCheck::Violation(v) => Err(Error::NotQuasigroup(v)),
        }
    }

    pub(crate) fn from_table_unchecked(arity: usize, order: u32, table: Vec<u8>) -> Self {
        debug_assert!(qg_check(&table, arity, order).map(|c| c.is_valid()).unwrap_or(false));
        MultaryQuasigroup { arity, order, table }
    }

    /// `f(x) = c + sum coeffs[i] * x_i` over GF(q).
    pub fn linear(field: &FieldTable, arity: usize, coeffs: &[u8], c: u8) -> Result<Self> {
        if coeffs.len() != arity || arity == 0 {
            return Err(Error::ArityMismatch(format!(
                "{} coefficients for arity {arity}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|&a| a == 0) {
            return Err(Error::ZeroCoefficient(i));
        }
        let q = field.order();
        if let Some(&bad) = coeffs.iter().chain([&c]).find(|&&a| u32::from(a) >= q) {
            return Err(Error::IndexOutOfRange { index: bad.into(), q });
        }
        let len = table_len(arity, q)
            .filter(|&l| l as u64 <= TABLE_LIMIT)
            .ok_or_else(|| Error::too_large(format!("{arity}-ary table of order {q}")))?;
        // table[i] for the odometer order, built one digit at a time
        let mut table = vec![c];
        table.reserve(len);
        for &a in coeffs {
            let prev = std::mem::take(&mut table);
            for &base in &prev {
                for x in 0..q as u8 {
                    table.push(field.add(base, field.mul(a, x)));
                }
            }
        }
        Ok(MultaryQuasigroup::from_table_unchecked(arity, q, table))
    }

    /// Sum of all arguments.
    pub fn sum(field: &FieldTable, arity: usize) -> Result<Self> {
        MultaryQuasigroup::linear(field, arity, &vec![1; arity], 0)
    }

    /// Unary quasigroup given by a permutation of the alphabet.
    pub fn permutation(perm: &[u8]) -> Result<Self> {
        MultaryQuasigroup::new(1, perm.len() as u32, perm.to_vec())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    #[inline]
    pub fn index(&self, args: &[u8]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let k = self.order as usize;
        args.iter().fold(0, |acc, &x| acc * k + x as usize)
    }

    #[inline]
    pub fn eval(&self, args: &[u8]) -> u8 {
        self.table[self.index(args)]
    }

    /// The value of argument `position` that makes `f(args) = target`,
    /// other arguments taken from `args`.
    pub fn solve(&self, position: usize, args: &[u8], target: u8) -> u8 {
        let k = self.order as usize;
        let stride = k.pow((self.arity - 1 - position) as u32);
        let base = self.index(args) - args[position] as usize * stride;
        (0..k)
            .find(|&v| self.table[base + v * stride] == target)
            .expect("every line of a quasigroup is a permutation") as u8
    }

    /// Solves for the last argument given the first `arity - 1`.
    #[inline]
    pub fn solve_last(&self, prefix: &[u8], target: u8) -> u8 {
        let k = self.order as usize;
        let base = prefix.iter().fold(0, |acc, &x| acc * k + x as usize) * k;
        self.table[base..base + k]
            .iter()
            .position(|&v| v == target)
            .expect("every line of a quasigroup is a permutation") as u8
    }

    /// When the table is `c + sum a_i x_i` over GF(q), returns `(a, c)`.
    pub fn linear_form(&self, field: &FieldTable) -> Option<(Vec<u8>, u8)> {
        if field.order() != self.order {
            return None;
        }
        let c = self.table[0];
        let k = self.order as usize;
        let coeffs: Vec<u8> = (0..self.arity)
            .map(|i| field.sub(self.table[k.pow((self.arity - 1 - i) as u32)], c))
            .collect();
        let candidate = MultaryQuasigroup::linear(field, self.arity, &coeffs, c).ok()?;
        (candidate.table == self.table).then_some((coeffs, c))
    }
}

/// The `l`-ary quasigroups applied block by block to compute a word's
/// profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SigmaFamily {
    sigmas: Vec<MultaryQuasigroup>,
}

impl SigmaFamily {
    pub fn new(sigmas: Vec<MultaryQuasigroup>) -> Result<Self> {
        let first = sigmas
            .first()
            .ok_or_else(|| Error::ArityMismatch("empty sigma family".into()))?;
        if let Some(i) = sigmas
            .iter()
            .position(|s| s.arity != first.arity || s.order != first.order)
        {
            return Err(Error::ArityMismatch(format!(
                "sigma {} is {}-ary of order {}, sigma 1 is {}-ary of order {}",
                i + 1,
                sigmas[i].arity,
                sigmas[i].order,
                first.arity,
                first.order
            )));
        }
        Ok(SigmaFamily { sigmas })
    }

    /// `t` copies of the `l`-ary sum over GF(q).
    pub fn block_sums(field: &FieldTable, t: usize, l: usize) -> Result<Self> {
        SigmaFamily::new(vec![MultaryQuasigroup::sum(field, l)?; t])
    }

    pub fn t(&self) -> usize {
        self.sigmas.len()
    }

    pub fn arity(&self) -> usize {
        self.sigmas[0].arity
    }

    pub fn order(&self) -> u32 {
        self.sigmas[0].order
    }

    pub fn sigmas(&self) -> &[MultaryQuasigroup] {
        &self.sigmas
    }

    /// Coefficient rows of a family of linear quasigroups with zero constant.
    pub fn linear_coefficients(&self, field: &FieldTable) -> Result<Vec<Vec<u8>>> {
        self.sigmas
            .iter()
            .enumerate()
            .map(|(i, s)| match s.linear_form(field) {
                Some((a, 0)) => Ok(a),
                _ => Err(Error::NonlinearSigma(i)),
            })
            .collect()
    }
}

/// Materializes the code `{ (y | v(y) | h(y)) : y in F_q^(q-1) }` and checks
/// that it is perfect.
pub fn vh_pair_check(v: &MultaryQuasigroup, h: &MultaryQuasigroup, field: &FieldTable) -> Result<PerfectCheck> {
    let q = field.order();
    for (name, g) in [("v", v), ("h", h)] {
        if g.arity != q as usize - 1 || g.order != q {
            return Err(Error::ArityMismatch(format!(
                "{name} must be {}-ary of order {q}, got {}-ary of order {}",
                q - 1,
                g.arity,
                g.order
            )));
        }
    }
    let k = q as usize - 1;
    let mut data = Vec::with_capacity(v.table.len() * (k + 2));
    for (idx, (&a, &b)) in v.table.iter().zip(&h.table).enumerate() {
        data.extend(digits(idx, k, q as usize));
        data.push(a);
        data.push(b);
    }
    is_perfect(&Code::from_flat(q, k + 2, data)?)
}

/// The `((q-1)k+1)`-ary quasigroup `V(v(x_1), ..., v(x_k), y)` where each
/// `x_j` is a run of `q - 1` arguments.
pub fn sigma_from_component_law(
    outer: &MultaryQuasigroup,
    inner: &MultaryQuasigroup,
    k: usize,
) -> Result<MultaryQuasigroup> {
    if outer.arity != k + 1 {
        return Err(Error::ArityMismatch(format!(
            "V must be {}-ary, got {}-ary",
            k + 1,
            outer.arity
        )));
    }
    if outer.order != inner.order {
        return Err(Error::ArityMismatch(format!(
            "V has order {}, v has order {}",
            outer.order, inner.order
        )));
    }
    let q = inner.order;
    let w = inner.arity;
    if w + 1 != q as usize {
        return Err(Error::ArityMismatch(format!("v must be {}-ary, got {w}-ary", q - 1)));
    }
    let arity = w * k + 1;
    let len = table_len(arity, q)
        .filter(|&l| l as u64 <= TABLE_LIMIT)
        .ok_or_else(|| Error::too_large(format!("{arity}-ary composed table of order {q}")))?;
    let mut table = Vec::with_capacity(len);
    let mut args = vec![0u8; arity];
    let mut outer_args = vec![0u8; k + 1];
    for _ in 0..len {
        for j in 0..k {
            outer_args[j] = inner.eval(&args[j * w..(j + 1) * w]);
        }
        outer_args[k] = args[arity - 1];
        table.push(outer.eval(&outer_args));
        // odometer
        for slot in args.iter_mut().rev() {
            *slot += 1;
            if u32::from(*slot) < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(MultaryQuasigroup::from_table_unchecked(arity, q, table))
}

/// Nonzero field elements in index order, used as the coefficients of the
/// standard `h` partner of `v = y_1 + ... + y_(q-1)`.
pub fn standard_vh_pair(field: &FieldTable) -> Result<(MultaryQuasigroup, MultaryQuasigroup)> {
    let k = field.order() as usize - 1;
    let v = MultaryQuasigroup::sum(field, k)?;
    let alphas: Vec<u8> = field.nonzero().collect();
    let h = MultaryQuasigroup::linear(field, k, &alphas, 0)?;
    Ok((v, h))
}
