//! Table-driven arithmetic in GF(q) for prime powers q <= 16.
//!
//! Elements are indices `0..q`. Index `i` stands for the polynomial whose
//! GF(p) coefficients are the base-p digits of `i`, the most significant
//! digit being the coefficient of the highest power of x. Multiplication is
//! reduced modulo the lexicographically smallest monic irreducible
//! polynomial of the extension degree, so the indexing is canonical.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    q: u32,
    p: u32,
    e: u32,
    /// Monic modulus, highest-degree coefficient first.
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Splits `q` into `(p, e)` with `q = p^e`, `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Polynomials over GF(p), lowest coefficient first.
fn poly_from_index(mut i: u32, p: u32, len: usize) -> Vec<u32> {
    let mut c = vec![0; len];
    for slot in c.iter_mut() {
        *slot = i % p;
        i /= p;
    }
    c
}

fn poly_to_index(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn degree(c: &[u32]) -> Option<usize> {
    c.iter().rposition(|&d| d != 0)
}

fn inverse_mod_p(a: u32, p: u32) -> u32 {
    (1..p).find(|b| a * b % p == 1).expect("nonzero residue mod a prime")
}

/// Remainder of `a` modulo `b` (b nonzero) over GF(p).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = degree(b).expect("nonzero divisor");
    let lead_inv = inverse_mod_p(b[db], p);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let factor = r[dr] * lead_inv % p;
        let shift = dr - db;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            r[j + shift] = (r[j + shift] + p * p - factor * bj % p) % p;
        }
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = degree(f).unwrap_or(0);
    // trial division by every monic polynomial of degree 1..=d/2
    for dd in 1..=d / 2 {
        let count = p.pow(dd as u32);
        for low in 0..count {
            let mut g = poly_from_index(low, p, dd + 1);
            g[dd] = 1;
            if degree(&poly_rem(f, &g, p)).is_none() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let base = p.pow(e);
    (base..2 * base)
        .map(|v| poly_from_index(v, p, e as usize + 1))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl FieldTable {
    /// Builds the arithmetic tables of GF(q).
    pub fn new(q: u32) -> Result<Self> {
        let (p, e) = match prime_power(q) {
            Some(pe) if q <= MAX_ORDER => pe,
            _ => return Err(Error::NotPrimePower(q)),
        };
        let modulus = smallest_irreducible(p, e);
        let e_us = e as usize;
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let pa = poly_from_index(a, p, e_us);
            for b in 0..q {
                let pb = poly_from_index(b, p, e_us);
                let sum: Vec<u32> = pa.iter().zip(&pb).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = poly_to_index(&sum, p) as u8;

                let mut prod = vec![0u32; 2 * e_us];
                for (i, x) in pa.iter().enumerate() {
                    for (j, y) in pb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let reduced = poly_rem(&prod, &modulus, p);
                mul[(a * q + b) as usize] = poly_to_index(&reduced[..e_us], p) as u8;
            }
        }
        let neg = (0..qs)
            .map(|a| (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8)
            .collect();
        let mut inv = vec![0u8; qs];
        for a in 1..qs {
            inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u8;
        }
        Ok(FieldTable {
            q,
            p,
            e,
            modulus: modulus.iter().rev().map(|&c| c as u8).collect(),
            add,
            mul,
            neg,
            inv,
        })
    }

    /// Process-wide shared table for GF(q), built on first use.
    pub fn shared(q: u32) -> Result<&'static FieldTable> {
        static CACHE: [OnceLock<Option<FieldTable>>; MAX_ORDER as usize + 1] =
            [const { OnceLock::new() }; MAX_ORDER as usize + 1];
        if q > MAX_ORDER {
            return Err(Error::NotPrimePower(q));
        }
        CACHE[q as usize]
            .get_or_init(|| FieldTable::new(q).ok())
            .as_ref()
            .ok_or(Error::NotPrimePower(q))
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    fn check(&self, a: u8) -> Result<()> {
        if u32::from(a) < self.q {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: a.into(),
                q: self.q,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn checked_add(&self, a: u8, b: u8) -> Result<u8> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_mul(&self, a: u8, b: u8) -> Result<u8> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    /// `a / b`; panics on `b == 0`.
    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        assert!(b != 0, "division by zero in GF({})", self.q);
        self.mul(a, self.inv[b as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u8> {
        1..self.q as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &FieldTable) {
        let q = f.order() as u8;
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                if a != 0 && b != 0 {
                    assert_ne!(f.mul(a, b), 0, "zero divisor in GF({})", q);
                }
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_hold_exhaustively() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            check_axioms(&FieldTable::new(q).unwrap());
        }
    }

    #[test]
    fn larger_orders_are_fields() {
        for q in [11, 13, 16] {
            check_axioms(&FieldTable::new(q).unwrap());
        }
    }

    #[test]
    fn small_examples() {
        let f3 = FieldTable::new(3).unwrap();
        assert_eq!(f3.add(1, 2), 0);
        assert_eq!(f3.mul(2, 2), 1);

        let f4 = FieldTable::new(4).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        // x * x = x + 1
        assert_eq!(f4.mul(2, 2), 3);
        // x + (x + 1) = 1
        assert_eq!(f4.add(2, 3), 1);

        let f5 = FieldTable::new(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3);
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(FieldTable::new(3).unwrap().modulus(), &[1, 0]);
        assert_eq!(FieldTable::new(8).unwrap().modulus(), &[1, 0, 1, 1]);
        assert_eq!(FieldTable::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldTable::new(16).unwrap().modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn rejects_non_prime_powers() {
        for q in [0, 1, 6, 10, 12, 15, 17, 25, 32] {
            assert!(matches!(FieldTable::new(q), Err(Error::NotPrimePower(_))), "q={q}");
        }
    }

    #[test]
    fn error_paths() {
        let f = FieldTable::new(5).unwrap();
        assert!(matches!(f.inv(0), Err(Error::ZeroInverse)));
        assert!(matches!(f.checked_add(5, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(f.checked_mul(1, 9), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(f.inv(7), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn deterministic_and_shared() {
        for q in [2, 4, 9] {
            assert_eq!(FieldTable::new(q).unwrap(), FieldTable::new(q).unwrap());
            assert_eq!(FieldTable::shared(q).unwrap(), &FieldTable::new(q).unwrap());
        }
        assert!(FieldTable::shared(6).is_err());
        assert!(FieldTable::shared(40).is_err());
    }
}
