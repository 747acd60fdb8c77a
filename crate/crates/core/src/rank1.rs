//! Rank-1 torsion modules, their alpha invariants, the iso/hom criteria, and
//! the classification of admissible weight-difference vectors into strings.
//!
//! A rank-1 module is determined by its weight string t = (t_0, ..., t_{f-1})
//! and a unit a: on component s the Frobenius sends the generator of
//! component s-1 to (a)_s u^{t_s} times the generator, where (a)_s is a at
//! s = 0 and 1 otherwise.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::params::GlobalParams;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rank1Kisin {
    /// Weight string; nonnegative, one entry per embedding.
    pub t: Vec<i64>,
    /// The unit (a)_0; must be nonzero.
    pub a: FqElem,
}

impl Rank1Kisin {
    pub fn new(params: &GlobalParams, t: Vec<i64>, a: FqElem) -> Result<Rank1Kisin> {
        if t.len() != params.f() {
            return Err(Error::InvalidInput(format!(
                "weight string has {} entries, expected f = {}",
                t.len(),
                params.f()
            )));
        }
        if t.iter().any(|&ts| ts < 0) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        if a.is_zero() {
            return Err(Error::InvalidInput("unit a must be nonzero".into()));
        }
        Ok(Rank1Kisin { t, a })
    }

    /// Inertia exponent: sum_s p^{f-1-s} t_s mod p^f - 1.
    pub fn residue(&self, params: &GlobalParams) -> i64 {
        params.weighted_residue(&self.t)
    }
}

/// Serialized form of a rank-1 module: weight string plus the coordinates of
/// the unit in the power basis of k_E.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rank1Record {
    pub t: Vec<i64>,
    pub a: Vec<i64>,
}

impl Rank1Record {
    pub fn encode(params: &GlobalParams, n: &Rank1Kisin) -> Rank1Record {
        Rank1Record { t: n.t.clone(), a: params.field().coeffs(n.a) }
    }

    pub fn decode(&self, params: &GlobalParams) -> Result<Rank1Kisin> {
        let a = params.field().from_coeffs(&self.a)?;
        Rank1Kisin::new(params, self.t.clone(), a)
    }
}

/// The f exact rationals alpha_0, ..., alpha_{f-1}; common denominator
/// p^f - 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlphaVector {
    pub values: Vec<Ratio<i64>>,
}

/// alpha_s = (1/(p^f-1)) sum_{j=1}^{f} p^{f-j} t_{j+s}, indices mod f.
/// Satisfies alpha_s + t_s = p * alpha_{s-1} for every s.
pub fn alpha_invariant(params: &GlobalParams, n: &Rank1Kisin) -> AlphaVector {
    alpha_of_weights(params, &n.t)
}

pub fn alpha_of_weights(params: &GlobalParams, t: &[i64]) -> AlphaVector {
    let p = params.p();
    let f = params.f();
    let denom = params.residue_modulus();
    let mut values = Vec::with_capacity(f);
    for s in 0..f {
        let mut num = 0i64;
        for j in 1..=f {
            num += p.pow((f - j) as u32) * t[(j + s) % f];
        }
        values.push(Ratio::new(num, denom));
    }
    AlphaVector { values }
}

/// Isomorphism of the associated restricted representations: the weighted
/// residues agree mod p^f - 1 and the units are equal.
pub fn iso_as_g_inf(params: &GlobalParams, n: &Rank1Kisin, n2: &Rank1Kisin) -> bool {
    n.a == n2.a && n.residue(params) == n2.residue(params)
}

/// The same criterion through the alpha route: some (equivalently every)
/// alpha difference is an integer, and the units are equal. Kept as an
/// independent implementation to guard the index-orientation convention.
pub fn iso_via_alpha(params: &GlobalParams, n: &Rank1Kisin, n2: &Rank1Kisin) -> bool {
    if n.a != n2.a {
        return false;
    }
    let a = alpha_invariant(params, n);
    let b = alpha_invariant(params, n2);
    a.values
        .iter()
        .zip(&b.values)
        .any(|(x, y)| (x - y).is_integer())
}

/// Nonzero morphism n -> n2 exists iff alpha_s(n) - alpha_s(n2) is a
/// nonnegative integer for every s and the units are equal.
pub fn hom_exists(params: &GlobalParams, n: &Rank1Kisin, n2: &Rank1Kisin) -> bool {
    if n.a != n2.a {
        return false;
    }
    let a = alpha_invariant(params, n);
    let b = alpha_invariant(params, n2);
    a.values.iter().zip(&b.values).all(|(x, y)| {
        let d = x - y;
        d.is_integer() && *d.numer() >= 0
    })
}

/// Sign of a string in a decomposition.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One cyclic string of a decomposition: either a run of zeros, or a signed
/// copy of (-1, p-1, ..., p-1, p) (no p-1 entries when len = 2).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum StringPiece {
    Zero { start: usize, len: usize },
    Signed { sign: Sign, start: usize, len: usize },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DecompositionKind {
    /// The whole vector is +(p-1, ..., p-1) or -(p-1, ..., p-1).
    AllPMinusOne(Sign),
    StringList,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StringDecomposition {
    pub kind: DecompositionKind,
    /// Empty in the AllPMinusOne case.
    pub strings: Vec<StringPiece>,
    /// True when another valid segmentation exists (any zero run of two or
    /// more entries may be split arbitrarily); strings are canonicalized to
    /// maximal zero runs with the smallest starting index.
    pub ambiguous: bool,
}

impl StringDecomposition {
    /// Rebuild the difference vector this decomposition describes.
    pub fn reassemble(&self, params: &GlobalParams) -> Vec<i64> {
        let f = params.f();
        let p = params.p();
        let mut out = vec![0i64; f];
        match &self.kind {
            DecompositionKind::AllPMinusOne(sign) => {
                for v in out.iter_mut() {
                    *v = sign.factor() * (p - 1);
                }
            }
            DecompositionKind::StringList => {
                for s in &self.strings {
                    if let StringPiece::Signed { sign, start, len } = s {
                        for k in 0..*len {
                            let pos = (start + k) % f;
                            let val = if k == 0 {
                                -1
                            } else if k + 1 == *len {
                                p
                            } else {
                                p - 1
                            };
                            out[pos] = sign.factor() * val;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Break an admissible difference vector into strings.
///
/// Precondition: entries in [-p, p] and sum_s p^{f-1-s} diff_s = 0 mod
/// p^f - 1. Either the vector is a signed constant (p-1, ..., p-1), or every
/// entry is one of 0, -1, p-1, p (up to sign) and the roles force a unique
/// segmentation: -1 opens a positive string, p closes it, p-1 sits inside
/// (mirrored for negative strings), zeros form zero strings.
pub fn classify_difference(params: &GlobalParams, diff: &[i64]) -> Result<StringDecomposition> {
    let f = params.f();
    let p = params.p();
    if diff.len() != f {
        return Err(Error::InvalidInput(format!(
            "difference vector has {} entries, expected f = {}",
            diff.len(),
            f
        )));
    }
    if diff.iter().any(|&d| d < -p || d > p) {
        return Err(Error::InvalidInput(format!("entries must lie in [-{p}, {p}]")));
    }
    let modulus = params.residue_modulus();
    let mut acc = 0i64;
    for &d in diff {
        acc = (acc * p + d).rem_euclid(modulus);
    }
    if acc != 0 {
        return Err(Error::InvalidInput(
            "weighted sum is not divisible by p^f - 1".into(),
        ));
    }

    if diff.iter().all(|&d| d == p - 1) {
        return Ok(StringDecomposition {
            kind: DecompositionKind::AllPMinusOne(Sign::Plus),
            strings: Vec::new(),
            ambiguous: false,
        });
    }
    if diff.iter().all(|&d| d == -(p - 1)) {
        return Ok(StringDecomposition {
            kind: DecompositionKind::AllPMinusOne(Sign::Minus),
            strings: Vec::new(),
            ambiguous: false,
        });
    }

    // Walk signed strings from their -1 anchors.
    let mut covered = vec![false; f];
    let mut strings = Vec::new();
    for start in 0..f {
        let sign = match diff[start] {
            -1 => Sign::Plus,
            1 => Sign::Minus,
            _ => continue,
        };
        let sgn = sign.factor();
        let mut len = 1usize;
        loop {
            if len > f {
                return Err(Error::Classification(
                    "string starting at -1 never closes with p".into(),
                ));
            }
            let pos = (start + len) % f;
            if covered[pos] {
                return Err(Error::Classification("overlapping strings".into()));
            }
            let v = sgn * diff[pos];
            if v == p {
                len += 1;
                break;
            } else if v == p - 1 {
                len += 1;
            } else {
                return Err(Error::Classification(format!(
                    "unexpected entry {} inside a string",
                    diff[pos]
                )));
            }
        }
        for k in 0..len {
            let pos = (start + k) % f;
            if covered[pos] {
                return Err(Error::Classification("overlapping strings".into()));
            }
            covered[pos] = true;
        }
        strings.push(StringPiece::Signed { sign, start, len });
    }

    // Remaining positions must be zeros; group them into maximal cyclic runs.
    for (pos, &c) in covered.iter().enumerate() {
        if !c && diff[pos] != 0 {
            return Err(Error::Classification(format!(
                "entry {} at position {pos} belongs to no string",
                diff[pos]
            )));
        }
    }
    let mut ambiguous = false;
    if covered.iter().all(|&c| !c) {
        // whole cycle is zero
        strings.push(StringPiece::Zero { start: 0, len: f });
        ambiguous = f >= 2;
    } else {
        for start in 0..f {
            // a maximal run starts where the predecessor is covered
            if covered[start] || !covered[(start + f - 1) % f] {
                continue;
            }
            let mut len = 1usize;
            while !covered[(start + len) % f] {
                len += 1;
            }
            if len >= 2 {
                ambiguous = true;
            }
            strings.push(StringPiece::Zero { start, len });
        }
    }

    strings.sort_by_key(|s| match s {
        StringPiece::Zero { start, .. } => *start,
        StringPiece::Signed { start, .. } => *start,
    });
    Ok(StringDecomposition { kind: DecompositionKind::StringList, strings, ambiguous })
}

/// All weight strings t in [0, range_max]^f whose inertia exponent equals
/// `target_residue` mod p^f - 1, in lexicographic order.
pub fn chars_with_weight_string(
    params: &GlobalParams,
    target_residue: i64,
    range_max: i64,
) -> Vec<Vec<i64>> {
    let f = params.f();
    if range_max < 0 {
        return Vec::new();
    }
    let modulus = params.residue_modulus();
    let target = target_residue.rem_euclid(modulus);
    let mut out = Vec::new();
    let mut cur = vec![0i64; f];
    loop {
        if params.weighted_residue(&cur) == target {
            out.push(cur.clone());
        }
        if !lex_increment(&mut cur, range_max) {
            return out;
        }
    }
}

/// Advance to the lexicographic successor in [0, max]^f; false at the end.
fn lex_increment(cur: &mut [i64], max: i64) -> bool {
    for k in (0..cur.len()).rev() {
        if cur[k] < max {
            cur[k] += 1;
            for v in cur.iter_mut().skip(k + 1) {
                *v = 0;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: i64, f: usize) -> GlobalParams {
        GlobalParams::new(p, f, f, (p + 1) as usize).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let pr = params(3, 1);
        let n = Rank1Kisin::new(&pr, vec![0], FqElem::ONE).unwrap();
        assert_eq!(alpha_invariant(&pr, &n).values, vec![Ratio::new(0, 1)]);

        let pr = params(3, 2);
        let n = Rank1Kisin::new(&pr, vec![2, 2], FqElem::ONE).unwrap();
        assert_eq!(
            alpha_invariant(&pr, &n).values,
            vec![Ratio::new(1, 1), Ratio::new(1, 1)]
        );
        let n = Rank1Kisin::new(&pr, vec![1, 0], FqElem::ONE).unwrap();
        // direct rational evaluation: alpha_0 = 1/8, alpha_1 = 3/8
        assert_eq!(
            alpha_invariant(&pr, &n).values,
            vec![Ratio::new(1, 8), Ratio::new(3, 8)]
        );
    }

    #[test]
    fn alpha_recurrence_holds() {
        let pr = params(3, 2);
        let n = Rank1Kisin::new(&pr, vec![1, 0], FqElem::ONE).unwrap();
        let alpha = alpha_invariant(&pr, &n).values;
        for s in 0..2 {
            let prev = alpha[(s + 1) % 2]; // alpha_{s-1} for s, f = 2
            assert_eq!(alpha[s] + Ratio::from_integer(n.t[s]), prev * Ratio::from_integer(3));
        }
    }

    #[test]
    fn iso_criterion() {
        let pr = params(3, 1);
        let a = FqElem::ONE;
        let n1 = Rank1Kisin::new(&pr, vec![3], a).unwrap();
        let n2 = Rank1Kisin::new(&pr, vec![1], a).unwrap();
        assert!(iso_as_g_inf(&pr, &n1, &n1));
        assert!(iso_as_g_inf(&pr, &n1, &n2)); // 3 = 1 mod 2
        let g = pr.field().from_prime(2);
        let n3 = Rank1Kisin::new(&pr, vec![1], g).unwrap();
        assert!(!iso_as_g_inf(&pr, &n2, &n3)); // unit mismatch
        assert!(iso_via_alpha(&pr, &n1, &n2));
    }

    #[test]
    fn hom_criterion() {
        let pr = params(3, 1);
        let a = FqElem::ONE;
        let n = Rank1Kisin::new(&pr, vec![2], a).unwrap();
        let n0 = Rank1Kisin::new(&pr, vec![0], a).unwrap();
        assert!(hom_exists(&pr, &n, &n)); // identity morphism
        assert!(hom_exists(&pr, &n, &n0)); // alpha difference = 1
        assert!(!hom_exists(&pr, &n0, &n)); // alpha difference = -1
    }

    #[test]
    fn homs_both_ways_force_isomorphism() {
        // exhaustive over p = 3, f <= 2, weights in [0, p]
        for f in 1..=2usize {
            let pr = params(3, f);
            let mut t1 = vec![0i64; f];
            loop {
                let n1 = Rank1Kisin::new(&pr, t1.clone(), FqElem::ONE).unwrap();
                let mut t2 = vec![0i64; f];
                loop {
                    let n2 = Rank1Kisin::new(&pr, t2.clone(), FqElem::ONE).unwrap();
                    if hom_exists(&pr, &n1, &n2) && hom_exists(&pr, &n2, &n1) {
                        assert!(iso_as_g_inf(&pr, &n1, &n2), "t1={t1:?} t2={t2:?}");
                    }
                    if !lex_increment(&mut t2, 3) {
                        break;
                    }
                }
                if !lex_increment(&mut t1, 3) {
                    break;
                }
            }
        }
    }

    #[test]
    fn classify_all_p_minus_one() {
        let pr = params(3, 2);
        let d = classify_difference(&pr, &[2, 2]).unwrap();
        assert_eq!(d.kind, DecompositionKind::AllPMinusOne(Sign::Plus));
        assert_eq!(d.reassemble(&pr), vec![2, 2]);
        let d = classify_difference(&pr, &[-2, -2]).unwrap();
        assert_eq!(d.kind, DecompositionKind::AllPMinusOne(Sign::Minus));
    }

    #[test]
    fn classify_hook_string() {
        let pr = params(3, 2);
        let d = classify_difference(&pr, &[-1, 3]).unwrap();
        assert_eq!(d.kind, DecompositionKind::StringList);
        assert_eq!(
            d.strings,
            vec![StringPiece::Signed { sign: Sign::Plus, start: 0, len: 2 }]
        );
        assert_eq!(d.reassemble(&pr), vec![-1, 3]);
        assert!(!d.ambiguous);
    }

    #[test]
    fn classify_zero_vector() {
        let pr = params(3, 4);
        let d = classify_difference(&pr, &[0, 0, 0, 0]).unwrap();
        assert_eq!(d.strings, vec![StringPiece::Zero { start: 0, len: 4 }]);
        assert!(d.ambiguous); // the run may be split
    }

    #[test]
    fn classify_wrapping_string() {
        let pr = params(3, 2);
        // (3, -1): the string (-1, p) starting at index 1, wrapping around
        let d = classify_difference(&pr, &[3, -1]).unwrap();
        assert_eq!(
            d.strings,
            vec![StringPiece::Signed { sign: Sign::Plus, start: 1, len: 2 }]
        );
        assert_eq!(d.reassemble(&pr), vec![3, -1]);
    }

    #[test]
    fn classify_rejects_bad_input() {
        let pr = params(3, 2);
        assert!(matches!(classify_difference(&pr, &[1, 1]), Err(Error::InvalidInput(_))));
        assert!(matches!(classify_difference(&pr, &[4, 0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn weight_string_search() {
        let pr = params(3, 1);
        assert_eq!(chars_with_weight_string(&pr, 0, 3), vec![vec![0], vec![2]]);
        assert_eq!(chars_with_weight_string(&pr, 1, 3), vec![vec![1], vec![3]]);
        let pr = params(3, 2);
        assert_eq!(chars_with_weight_string(&pr, 0, 0), vec![vec![0, 0]]);
    }
}
