//! Global parameters: the odd prime p, the number f of embeddings of the
//! unramified base, the coefficient field k_E = F_{p^m} with f | m, and the
//! series truncation order N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::{default_field_poly, FieldCtx};

/// Parameter record as it appears in configuration files. `field_poly` is
/// little-endian in the degree; when absent the deterministic default is used.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub p: i64,
    pub f: usize,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_poly: Option<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct GlobalParams {
    p: i64,
    f: usize,
    n: usize,
    ctx: FieldCtx,
}

impl GlobalParams {
    pub fn new(p: i64, f: usize, m: usize, n: usize) -> Result<GlobalParams> {
        Self::with_poly(p, f, m, n, default_field_poly(p, m))
    }

    pub fn with_poly(p: i64, f: usize, m: usize, n: usize, poly: Vec<i64>) -> Result<GlobalParams> {
        if f == 0 {
            return Err(Error::InvalidInput("f must be positive".into()));
        }
        if m % f != 0 {
            return Err(Error::InvalidInput(format!(
                "f = {f} must divide m = {m} so the residue field embeds in k_E"
            )));
        }
        let ctx = FieldCtx::new(p, m, poly)?;
        if n < (p + 1) as usize {
            return Err(Error::InvalidInput(format!(
                "truncation order N = {n} is below the minimum p + 1 = {}",
                p + 1
            )));
        }
        p.checked_pow(f as u32)
            .ok_or_else(|| Error::InvalidInput("p^f overflows".into()))?;
        Ok(GlobalParams { p, f, n, ctx })
    }

    pub fn from_config(cfg: &ParamsConfig) -> Result<GlobalParams> {
        match &cfg.field_poly {
            Some(poly) => Self::with_poly(cfg.p, cfg.f, cfg.m, cfg.n, poly.clone()),
            None => Self::new(cfg.p, cfg.f, cfg.m, cfg.n),
        }
    }

    pub fn to_config(&self) -> ParamsConfig {
        ParamsConfig {
            p: self.p,
            f: self.f,
            m: self.ctx.m(),
            n: self.n,
            field_poly: Some(self.ctx.field_poly().to_vec()),
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn m(&self) -> usize {
        self.ctx.m()
    }

    /// Truncation order: all series arithmetic happens mod u^N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldCtx {
        &self.ctx
    }

    /// p^f - 1, the modulus for inertia-exponent arithmetic.
    pub fn residue_modulus(&self) -> i64 {
        self.p.pow(self.f as u32) - 1
    }

    /// sum_s p^{f-1-s} t_s reduced to [0, p^f - 1).
    pub fn weighted_residue(&self, t: &[i64]) -> i64 {
        debug_assert_eq!(t.len(), self.f);
        let modulus = self.residue_modulus();
        let mut acc: i64 = 0;
        for &ts in t {
            acc = (acc * self.p + ts).rem_euclid(modulus);
        }
        acc
    }

    /// A copy with a different truncation order (used by precision doubling).
    pub fn with_truncation(&self, n: usize) -> GlobalParams {
        GlobalParams { p: self.p, f: self.f, n, ctx: self.ctx.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_divisibility_and_bounds() {
        assert!(GlobalParams::new(3, 2, 2, 8).is_ok());
        assert!(GlobalParams::new(3, 2, 3, 8).is_err()); // f does not divide m
        assert!(GlobalParams::new(3, 1, 1, 3).is_err()); // N below p + 1
        assert!(GlobalParams::new(4, 1, 1, 8).is_err()); // p not prime
    }

    #[test]
    fn weighted_residue_is_horner_mod_pf_minus_1() {
        let params = GlobalParams::new(3, 2, 2, 8).unwrap();
        // 3*1 + 0 = 3 mod 8
        assert_eq!(params.weighted_residue(&[1, 0]), 3);
        // 3*3 + 3 = 12 = 4 mod 8
        assert_eq!(params.weighted_residue(&[3, 3]), 4);
    }

    #[test]
    fn config_round_trip() {
        let params = GlobalParams::new(5, 1, 2, 12).unwrap();
        let cfg = params.to_config();
        let again = GlobalParams::from_config(&cfg).unwrap();
        assert_eq!(again.to_config(), cfg);
    }
}
