//! The truncated series ring k_E[u]/(u^N), valuations, and the
//! component-to-component twist u -> u^p.
//!
//! Every value carries its own precision so that precision-doubling
//! certificates can run two truncation levels side by side.

use crate::error::{Error, Result};
use crate::fq::{FieldCtx, FqElem};

/// Element of k_E[u]/(u^prec); `coeffs[k]` is the coefficient of u^k.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncSeries {
    prec: usize,
    coeffs: Vec<FqElem>,
}

/// Valuation of a truncated series: either an exact order of vanishing, or
/// "at least the working precision" for a series that is zero mod u^prec.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LaurentVal {
    Finite(usize),
    AtLeast(usize),
}

impl LaurentVal {
    pub fn is_at_least(self, k: usize) -> bool {
        match self {
            LaurentVal::Finite(v) => v >= k,
            LaurentVal::AtLeast(_) => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            LaurentVal::Finite(v) => Some(v),
            LaurentVal::AtLeast(_) => None,
        }
    }
}

impl TruncSeries {
    pub fn zero(prec: usize) -> TruncSeries {
        TruncSeries { prec, coeffs: vec![FqElem::ZERO; prec] }
    }

    pub fn one(prec: usize) -> TruncSeries {
        Self::monomial(FqElem::ONE, 0, prec)
    }

    /// c * u^k (zero when k >= prec).
    pub fn monomial(c: FqElem, k: usize, prec: usize) -> TruncSeries {
        let mut s = Self::zero(prec);
        if k < prec {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_coeffs(coeffs: &[FqElem], prec: usize) -> TruncSeries {
        let mut s = Self::zero(prec);
        for (k, &c) in coeffs.iter().enumerate().take(prec) {
            s.coeffs[k] = c;
        }
        s
    }

    /// Coefficients given as prime-subfield residues.
    pub fn from_prime_coeffs(ctx: &FieldCtx, coeffs: &[i64], prec: usize) -> TruncSeries {
        let v: Vec<FqElem> = coeffs.iter().map(|&c| ctx.from_prime(c)).collect();
        Self::from_coeffs(&v, prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, k: usize) -> FqElem {
        if k < self.prec {
            self.coeffs[k]
        } else {
            FqElem::ZERO
        }
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Degree of the largest nonzero coefficient, None for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn val(&self) -> LaurentVal {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => LaurentVal::Finite(k),
            None => LaurentVal::AtLeast(self.prec),
        }
    }

    /// Re-truncate (or zero-extend) to precision `prec`.
    pub fn truncate(&self, prec: usize) -> TruncSeries {
        let mut s = Self::zero(prec);
        for k in 0..prec.min(self.prec) {
            s.coeffs[k] = self.coeffs[k];
        }
        s
    }

    pub fn add(&self, ctx: &FieldCtx, other: &TruncSeries) -> TruncSeries {
        debug_assert_eq!(self.prec, other.prec);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ctx.add(a, b))
            .collect();
        TruncSeries { prec: self.prec, coeffs }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &TruncSeries) -> TruncSeries {
        debug_assert_eq!(self.prec, other.prec);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ctx.sub(a, b))
            .collect();
        TruncSeries { prec: self.prec, coeffs }
    }

    pub fn neg(&self, ctx: &FieldCtx) -> TruncSeries {
        TruncSeries {
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&a| ctx.neg(a)).collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FqElem) -> TruncSeries {
        TruncSeries {
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &TruncSeries) -> TruncSeries {
        debug_assert_eq!(self.prec, other.prec);
        let mut coeffs = vec![FqElem::ZERO; self.prec];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= self.prec {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = ctx.add(coeffs[i + j], ctx.mul(a, b));
                }
            }
        }
        TruncSeries { prec: self.prec, coeffs }
    }

    /// Multiply by u^k.
    pub fn shift(&self, k: usize) -> TruncSeries {
        let mut s = Self::zero(self.prec);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i + k < self.prec {
                s.coeffs[i + k] = c;
            }
        }
        s
    }

    /// Inverse of a unit (val = 0), by the standard recursion on coefficients.
    pub fn unit_inverse(&self, ctx: &FieldCtx) -> Result<TruncSeries> {
        if self.coeffs.is_empty() || self.coeffs[0].is_zero() {
            return Err(Error::Domain("series is not a unit (valuation > 0)".into()));
        }
        let a0_inv = ctx.inv(self.coeffs[0])?;
        let mut inv = vec![FqElem::ZERO; self.prec];
        inv[0] = a0_inv;
        for k in 1..self.prec {
            let mut acc = FqElem::ZERO;
            for j in 0..k {
                acc = ctx.add(acc, ctx.mul(self.coeffs[k - j], inv[j]));
            }
            inv[k] = ctx.neg(ctx.mul(a0_inv, acc));
        }
        Ok(TruncSeries { prec: self.prec, coeffs: inv })
    }

    /// The twist u -> u^p: the coefficient of u^k moves to u^{pk}, terms with
    /// pk >= prec are discarded, coefficients themselves are untouched.
    pub fn phi_twist(&self, ctx: &FieldCtx) -> TruncSeries {
        let p = ctx.p() as usize;
        let mut s = Self::zero(self.prec);
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match k.checked_mul(p) {
                Some(pk) if pk < self.prec => s.coeffs[pk] = c,
                _ => {}
            }
        }
        s
    }
}

impl std::fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "[{}]", c.index())?,
                1 => write!(f, "[{}]u", c.index())?,
                _ => write!(f, "[{}]u^{}", c.index(), k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " (mod u^{})", self.prec)
    }
}
