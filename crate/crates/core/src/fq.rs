//! The coefficient field k_E = F_{p^m}, with all arithmetic routed through a
//! precomputed context.
//!
//! Elements are stored as indices into the canonical enumeration of k_E:
//! the element with coordinate vector (c_0, ..., c_{m-1}) in the power basis
//! of the defining polynomial has index sum(c_i * p^i). Indices 0..p are
//! therefore exactly the prime subfield, `0` is zero and `1` is one.

use crate::error::{Error, Result};

/// An element of k_E. Meaningful only relative to the [`FieldCtx`] it was
/// produced by; mixing contexts is a caller bug.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> FqElem {
        FqElem(i as u32)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Largest supported |k_E|; keeps the ctx tables at a few megabytes.
pub const MAX_FIELD_SIZE: usize = 1024;

/// Arithmetic tables for one instance of k_E = F_p[x]/(field_poly).
#[derive(Clone)]
pub struct FieldCtx {
    p: i64,
    m: usize,
    q: usize,
    poly: Vec<i64>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>, // inv[0] unused
    frob: Vec<u32>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldCtx(p={}, m={}, poly={:?})", self.p, self.m, self.poly)
    }
}

impl FieldCtx {
    /// Build the context for F_p[x]/(poly). `poly` is little-endian of length
    /// m+1 and must be monic irreducible; residues are normalized mod p.
    pub fn new(p: i64, m: usize, poly: Vec<i64>) -> Result<FieldCtx> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("p must be an odd prime, got {p}")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("m must be positive".into()));
        }
        let q = (p as u128).checked_pow(m as u32).ok_or_else(|| {
            Error::InvalidInput("p^m overflows".into())
        })?;
        if q as usize > MAX_FIELD_SIZE {
            return Err(Error::InvalidInput(format!(
                "field size p^m = {q} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        let q = q as usize;
        let poly: Vec<i64> = poly.iter().map(|c| c.rem_euclid(p)).collect();
        if poly.len() != m + 1 || poly[m] != 1 {
            return Err(Error::InvalidInput(format!(
                "field_poly must be monic of degree {m} (little-endian, {} coefficients)",
                m + 1
            )));
        }
        if m > 1 && !poly_is_irreducible(p, &poly) {
            return Err(Error::InvalidInput("field_poly is not irreducible".into()));
        }

        // x^k mod poly for k in [0, 2m-2], as coordinate vectors.
        let mut powers: Vec<Vec<i64>> = Vec::with_capacity(2 * m - 1);
        let mut cur = vec![0i64; m];
        cur[0] = 1;
        powers.push(cur.clone());
        for _ in 1..(2 * m).max(2) - 1 {
            // multiply by x
            let carry = cur[m - 1];
            for i in (1..m).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if carry != 0 {
                for i in 0..m {
                    cur[i] = (cur[i] - carry * poly[i]).rem_euclid(p);
                }
            }
            powers.push(cur.clone());
        }

        let digits = |i: usize| -> Vec<i64> {
            let mut v = Vec::with_capacity(m);
            let mut x = i as i64;
            for _ in 0..m {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let pack = |v: &[i64]| -> u32 {
            let mut acc = 0i64;
            for &c in v.iter().rev() {
                acc = acc * p + c.rem_euclid(p);
            }
            acc as u32
        };

        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        for a in 0..q {
            let da = digits(a);
            let nv: Vec<i64> = da.iter().map(|c| (-c).rem_euclid(p)).collect();
            neg[a] = pack(&nv);
            for b in 0..q {
                let db = digits(b);
                let sv: Vec<i64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = pack(&sv);
                // convolution then reduction through the x^k table
                let mut prod = vec![0i64; 2 * m - 1];
                for (i, &x) in da.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut red = vec![0i64; m];
                for (k, &c) in prod.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for i in 0..m {
                        red[i] = (red[i] + c * powers[k][i]) % p;
                    }
                }
                mul[a * q + b] = pack(&red);
            }
        }

        let mut inv = vec![0u32; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == 0 {
                return Err(Error::InvalidInput(
                    "field_poly is not irreducible (a nonzero element has no inverse)".into(),
                ));
            }
        }

        let mut frob = vec![0u32; q];
        let mut ctx = FieldCtx { p, m, q, poly, add, mul, neg, inv, frob: Vec::new() };
        for a in 0..q {
            frob[a] = ctx.pow(FqElem(a as u32), p as u64).0;
        }
        ctx.frob = frob;
        Ok(ctx)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// |k_E| = p^m.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field_poly(&self) -> &[i64] {
        &self.poly
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[a.index() * self.q + b.index()])
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.index()])
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[a.index() * self.q + b.index()])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(FqElem(self.inv[a.index()]))
    }

    /// The p-power Frobenius x -> x^p.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        FqElem(self.frob[a.index()])
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Embed a residue of the prime subfield.
    pub fn from_prime(&self, c: i64) -> FqElem {
        FqElem(c.rem_euclid(self.p) as u32)
    }

    /// Element from coordinates in the power basis (little-endian, length m).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FqElem> {
        if coeffs.len() != self.m {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                self.m,
                coeffs.len()
            )));
        }
        let mut acc = 0i64;
        for &c in coeffs.iter().rev() {
            acc = acc * self.p + c.rem_euclid(self.p);
        }
        Ok(FqElem(acc as u32))
    }

    /// Coordinates of `a` in the power basis (little-endian, length m).
    pub fn coeffs(&self, a: FqElem) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.m);
        let mut x = a.index() as i64;
        for _ in 0..self.m {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    /// The class of x (a root of the defining polynomial); equals 1 when m=1.
    pub fn generator(&self) -> FqElem {
        if self.m == 1 {
            FqElem::ONE
        } else {
            FqElem(self.p as u32)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q as u32).map(FqElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q as u32).map(FqElem)
    }
}

pub(crate) fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Irreducibility over F_p by trial division against every monic polynomial
/// of degree in [1, deg/2]. Fine at the sizes this crate supports.
fn poly_is_irreducible(p: i64, poly: &[i64]) -> bool {
    let deg = poly.len() - 1;
    for ddeg in 1..=deg / 2 {
        let count = (p as usize).pow(ddeg as u32);
        for idx in 0..count {
            // candidate monic divisor of degree ddeg
            let mut div = Vec::with_capacity(ddeg + 1);
            let mut x = idx as i64;
            for _ in 0..ddeg {
                div.push(x % p);
                x /= p;
            }
            div.push(1);
            // long division: does div divide poly?
            let mut rem: Vec<i64> = poly.to_vec();
            while rem.len() >= div.len() {
                let lead = *rem.last().unwrap() % p;
                if lead != 0 {
                    let shift = rem.len() - div.len();
                    for (i, &c) in div.iter().enumerate() {
                        rem[shift + i] = (rem[shift + i] - lead * c).rem_euclid(p);
                    }
                }
                rem.pop();
            }
            if rem.iter().all(|&c| c % p == 0) {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree m
/// over F_p, scanning the non-leading coefficients as base-p integers from 0
/// upward. Deterministic, so runs are reproducible without external tables.
pub fn default_field_poly(p: i64, m: usize) -> Vec<i64> {
    if m == 1 {
        return vec![0, 1]; // x itself: k_E = F_p
    }
    let count = (p as usize).pow(m as u32);
    for idx in 0..count {
        let mut poly = Vec::with_capacity(m + 1);
        let mut x = idx as i64;
        for _ in 0..m {
            poly.push(x % p);
            x /= p;
        }
        poly.push(1);
        if poly_is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3, 1, default_field_poly(3, 1)).unwrap()
    }

    fn f9() -> FieldCtx {
        FieldCtx::new(3, 2, default_field_poly(3, 2)).unwrap()
    }

    #[test]
    fn default_poly_examples() {
        assert_eq!(default_field_poly(3, 1), vec![0, 1]);
        // x^2 + 1 is the first irreducible quadratic over F_3
        assert_eq!(default_field_poly(3, 2), vec![1, 0, 1]);
        assert_eq!(default_field_poly(5, 1), vec![0, 1]);
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let k = f3();
        assert_eq!(k.frobenius(k.from_prime(2)), k.from_prime(2));
    }

    #[test]
    fn frobenius_order_divides_m() {
        let k = f9();
        let x = k.generator();
        assert_ne!(k.frobenius(x), x);
        assert_eq!(k.frobenius(k.frobenius(x)), x);
        for a in k.elements() {
            assert_eq!(k.frobenius(k.frobenius(a)), a);
        }
    }

    #[test]
    fn inverse_in_f3() {
        let k = f3();
        assert_eq!(k.inv(k.from_prime(2)).unwrap(), k.from_prime(2));
        assert!(k.inv(FqElem::ZERO).is_err());
    }

    /// Independent oracle: naive polynomial arithmetic mod (field_poly, p),
    /// exhaustive over p=3, m <= 2.
    #[test]
    fn matches_naive_polynomial_oracle() {
        for m in 1..=2usize {
            let p = 3i64;
            let poly = default_field_poly(p, m);
            let k = FieldCtx::new(p, m, poly.clone()).unwrap();
            let q = k.q();
            let digits = |i: usize| -> Vec<i64> {
                let mut v = Vec::new();
                let mut x = i as i64;
                for _ in 0..m {
                    v.push(x % p);
                    x /= p;
                }
                v
            };
            let pack = |v: &[i64]| -> usize {
                let mut acc = 0i64;
                for &c in v.iter().rev() {
                    acc = acc * p + c.rem_euclid(p);
                }
                acc as usize
            };
            let oracle_mul = |a: usize, b: usize| -> usize {
                let da = digits(a);
                let db = digits(b);
                let mut prod = vec![0i64; 2 * m];
                for i in 0..m {
                    for j in 0..m {
                        prod[i + j] += da[i] * db[j];
                    }
                }
                // reduce by long division
                for k in (m..2 * m).rev() {
                    let c = prod[k].rem_euclid(p);
                    if c != 0 {
                        for i in 0..=m {
                            prod[k - m + i] = (prod[k - m + i] - c * poly[i]).rem_euclid(p);
                        }
                    }
                    prod[k] = 0;
                }
                pack(&prod[..m])
            };
            for a in 0..q {
                for b in 0..q {
                    let sum: Vec<i64> = digits(a)
                        .iter()
                        .zip(digits(b))
                        .map(|(x, y)| (x + y) % p)
                        .collect();
                    assert_eq!(
                        k.add(FqElem::from_index(a), FqElem::from_index(b)).index(),
                        pack(&sum)
                    );
                    assert_eq!(
                        k.mul(FqElem::from_index(a), FqElem::from_index(b)).index(),
                        oracle_mul(a, b)
                    );
                }
                if a != 0 {
                    // oracle inverse: brute scan
                    let ainv = (1..q).find(|&b| oracle_mul(a, b) == 1).unwrap();
                    assert_eq!(k.inv(FqElem::from_index(a)).unwrap().index(), ainv);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldCtx::new(2, 1, vec![0, 1]).is_err());
        assert!(FieldCtx::new(9, 1, vec![0, 1]).is_err());
        // x^2 + 2 = (x+1)(x+2) over F_3
        assert!(FieldCtx::new(3, 2, vec![2, 0, 1]).is_err());
    }
}
