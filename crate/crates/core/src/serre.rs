//! Decidable condition gates on character lists and weight data: the
//! character-ratio condition, the forbidden extreme weight pair, the four
//! liftability cases on a weight template, and their translation to shifted
//! weight tuples.
//!
//! Membership-style clauses ("p-1 does not occur", "entries stay below p")
//! are evaluated in pairwise-difference/span form. On min-0 normalized
//! templates this agrees with the membership reading, and it is the form
//! that remains correct for arbitrary templates and matches the shifted
//! weight clauses exactly.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::model::CharClass;
use crate::params::GlobalParams;
use crate::rank1::Rank1Kisin;

/// The reduced cyclotomic class in (exponent, unit) coordinates: the
/// exponent is sum_s p^{f-1-s}; the unramified part is configurable and
/// defaults to 1.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct CycloClass {
    pub e_cyc: i64,
    pub a_cyc: FqElem,
}

impl CycloClass {
    pub fn new(params: &GlobalParams, a_cyc: FqElem) -> Result<CycloClass> {
        if a_cyc.is_zero() {
            return Err(Error::InvalidInput("cyclotomic unit must be nonzero".into()));
        }
        let ones = vec![1i64; params.f()];
        Ok(CycloClass { e_cyc: params.weighted_residue(&ones), a_cyc })
    }

    pub fn standard(params: &GlobalParams) -> CycloClass {
        Self::new(params, FqElem::ONE).expect("1 is a unit")
    }
}

/// No ratio of a later character by an earlier one is trivial or
/// cyclotomic. Returns the verdict together with the violating pairs.
pub fn check_c2a(
    params: &GlobalParams,
    chars: &[CharClass],
    cyc: &CycloClass,
) -> Result<(bool, Vec<(usize, usize)>)> {
    let ctx = params.field();
    let modulus = params.residue_modulus();
    let mut violations = Vec::new();
    for i in 0..chars.len() {
        for j in (i + 1)..chars.len() {
            let de = (chars[j].e - chars[i].e).rem_euclid(modulus);
            let da = ctx.mul(chars[j].a, ctx.inv(chars[i].a)?);
            let trivial = de == 0 && da == FqElem::ONE;
            let cyclotomic = de == cyc.e_cyc.rem_euclid(modulus) && da == cyc.a_cyc;
            if trivial || cyclotomic {
                violations.push((i, j));
            }
        }
    }
    Ok((violations.is_empty(), violations))
}

/// No earlier module has the all-zero weight string while a later one has
/// the all-p string. Returns the verdict and the first violating pair.
pub fn check_c2b(params: &GlobalParams, seq: &[Rank1Kisin]) -> (bool, Option<(usize, usize)>) {
    let p = params.p();
    let zeros: Vec<usize> = (0..seq.len())
        .filter(|&i| seq[i].t.iter().all(|&w| w == 0))
        .collect();
    for &i in &zeros {
        for (j, later) in seq.iter().enumerate().skip(i + 1) {
            if later.t.iter().all(|&w| w == p) {
                return (false, Some((i, j)));
            }
        }
    }
    (true, None)
}

pub(crate) fn has_pair_difference(col: &[i64], diff: i64) -> bool {
    col.iter().any(|&x| col.iter().any(|&y| x - y == diff))
}

fn span(col: &[i64]) -> i64 {
    match (col.iter().max(), col.iter().min()) {
        (Some(max), Some(min)) => max - min,
        _ => 0,
    }
}

/// The four liftability cases evaluated on weight columns (one sorted set of
/// d integers per embedding). Cases 1 and 2 need the character list; when it
/// is absent they are never reported.
///
/// 1. f = 1, no pair of h_0 differs by p-1, and the character condition;
/// 2. no pair of any h_s differs by 1, some h_{s0} has no pair differing by
///    p-1, and the character condition;
/// 3. the weight clauses of case 2, and some h_{s0'} has span different
///    from p;
/// 4. every span is at most p-1 and some span is at most p-2.
pub fn corollary_cases(
    params: &GlobalParams,
    cols: &[Vec<i64>],
    chars: Option<&[CharClass]>,
    cyc: &CycloClass,
) -> Result<BTreeSet<u8>> {
    if cols.len() != params.f() {
        return Err(Error::InvalidInput(format!(
            "expected {} weight columns, got {}",
            params.f(),
            cols.len()
        )));
    }
    let p = params.p();
    let c2a = match chars {
        Some(list) => check_c2a(params, list, cyc)?.0,
        None => false,
    };
    let never_1 = cols.iter().all(|h| !has_pair_difference(h, 1));
    let pm1_free_somewhere = cols.iter().any(|h| !has_pair_difference(h, p - 1));
    let span_not_p_somewhere = cols.iter().any(|h| span(h) != p);
    let spans_small = cols.iter().all(|h| span(h) <= p - 1);
    let span_tiny_somewhere = cols.iter().any(|h| span(h) <= p - 2);

    let mut cases = BTreeSet::new();
    if params.f() == 1 && !has_pair_difference(&cols[0], p - 1) && c2a {
        cases.insert(1);
    }
    if never_1 && pm1_free_somewhere && c2a {
        cases.insert(2);
    }
    if never_1 && pm1_free_somewhere && span_not_p_somewhere {
        cases.insert(3);
    }
    if spans_small && span_tiny_somewhere {
        cases.insert(4);
    }
    Ok(cases)
}

/// Witnessing embeddings for the existential clauses of the cases.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize)]
pub struct CaseWitnesses {
    /// Some column has no pair differing by p-1.
    pub pm1_free_s0: Option<usize>,
    /// Some column has span different from p.
    pub span_not_p_s0: Option<usize>,
    /// Some column has span at most p-2.
    pub span_tiny_s0: Option<usize>,
}

pub fn case_witnesses(params: &GlobalParams, cols: &[Vec<i64>]) -> CaseWitnesses {
    let p = params.p();
    CaseWitnesses {
        pm1_free_s0: cols.iter().position(|h| !has_pair_difference(h, p - 1)),
        span_not_p_s0: cols.iter().position(|h| span(h) != p),
        span_tiny_s0: cols.iter().position(|h| span(h) <= p - 2),
    }
}

/// A weight tuple per embedding, rows weakly decreasing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SerreWeight {
    /// rows[s] = (a_{s,1} >= ... >= a_{s,d}).
    pub rows: Vec<Vec<i64>>,
}

impl SerreWeight {
    pub fn new(params: &GlobalParams, rows: Vec<Vec<i64>>) -> Result<SerreWeight> {
        if rows.len() != params.f() {
            return Err(Error::InvalidInput(format!(
                "expected {} weight rows, got {}",
                params.f(),
                rows.len()
            )));
        }
        let d = rows.first().map_or(0, |r| r.len());
        if d == 0 {
            return Err(Error::InvalidInput("weight rows must be nonempty".into()));
        }
        for r in &rows {
            if r.len() != d {
                return Err(Error::InvalidInput("weight rows must share a length".into()));
            }
            if r.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidInput("weight rows must be weakly decreasing".into()));
            }
        }
        Ok(SerreWeight { rows })
    }

    pub fn d(&self) -> usize {
        self.rows[0].len()
    }

    /// Consecutive entries differ by at most p-1.
    pub fn is_serre_weight(&self, params: &GlobalParams) -> bool {
        let p = params.p();
        self.rows
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] - w[1] <= p - 1))
    }

    /// The standing bound of the liftability translation:
    /// a_{s,1} - a_{s,d} <= p - d + 1 for every s.
    pub fn standing_bound_ok(&self, params: &GlobalParams) -> bool {
        let d = self.d() as i64;
        self.rows
            .iter()
            .all(|r| r[0] - r[r.len() - 1] <= params.p() - d + 1)
    }

    /// Shifted entries b_{s,i} = a_{s,i} + d - i (1-indexed i), decreasing.
    pub fn shifted_row(&self, s: usize) -> Vec<i64> {
        let d = self.d() as i64;
        self.rows[s]
            .iter()
            .enumerate()
            .map(|(i, &a)| a + d - 1 - i as i64)
            .collect()
    }
}

/// The weight columns of the associated Hodge type: h_s = {a_{s,i} + d - i}.
/// Entries may leave [0, p] when the weight is large; the gate predicates
/// accept that.
pub fn serre_to_hodge(w: &SerreWeight) -> Vec<Vec<i64>> {
    (0..w.rows.len())
        .map(|s| {
            let mut col = w.shifted_row(s);
            col.sort_unstable();
            col
        })
        .collect()
}

/// The four liftability cases evaluated directly on a shifted weight tuple;
/// agrees with `corollary_cases` over `serre_to_hodge` case by case.
///
/// 1. f = 1 and no shifted difference b_{0,i} - b_{0,j} (i < j) equals p-1,
///    plus the character condition;
/// 2. entries of every row distinct, some row's shifted differences avoid
///    p-1, plus the character condition;
/// 3. the weight clauses of case 2 and some row with shifted span not p;
/// 4. every shifted span at most p-1, some shifted span at most p-2.
pub fn application_conditions(
    params: &GlobalParams,
    w: &SerreWeight,
    chars: Option<&[CharClass]>,
    cyc: &CycloClass,
) -> Result<BTreeSet<u8>> {
    let p = params.p();
    let f = params.f();
    let c2a = match chars {
        Some(list) => check_c2a(params, list, cyc)?.0,
        None => false,
    };
    let d = w.d();

    let distinct_rows = (0..f).all(|s| {
        let r = &w.rows[s];
        (0..d).all(|i| ((i + 1)..d).all(|j| r[i] != r[j]))
    });
    let shifted_pm1_free = |s: usize| -> bool {
        let b = w.shifted_row(s);
        (0..d).all(|i| ((i + 1)..d).all(|j| b[i] - b[j] != p - 1))
    };
    let shifted_span = |s: usize| -> i64 {
        let b = w.shifted_row(s);
        b[0] - b[d - 1]
    };

    let pm1_free_somewhere = (0..f).any(shifted_pm1_free);
    let span_not_p_somewhere = (0..f).any(|s| shifted_span(s) != p);
    let spans_small = (0..f).all(|s| shifted_span(s) <= p - 1);
    let span_tiny_somewhere = (0..f).any(|s| shifted_span(s) <= p - 2);

    let mut cases = BTreeSet::new();
    if f == 1 && shifted_pm1_free(0) && c2a {
        cases.insert(1);
    }
    if distinct_rows && pm1_free_somewhere && c2a {
        cases.insert(2);
    }
    if distinct_rows && pm1_free_somewhere && span_not_p_somewhere {
        cases.insert(3);
    }
    if spans_small && span_tiny_somewhere {
        cases.insert(4);
    }
    Ok(cases)
}
