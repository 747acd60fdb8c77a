//! Upper-triangular torsion modules as tuples of Frobenius matrices, the
//! degree and monomial shape predicates on their entries, allowable column
//! procedures, diagonal normalization, and the brute-force verification
//! harness for the shape lemma.

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::matrix::{gl_matrices, FqMat, SeriesMat};
use crate::params::GlobalParams;
use crate::rank1::{alpha_of_weights, hom_exists, Rank1Kisin};
use crate::series::{LaurentVal, TruncSeries};

/// Rank-d upper-triangular module: one Frobenius matrix per embedding, with
/// diagonal entry (i, i) of component s equal to (a_i)_s u^{t_{i,s}}, where
/// (a_i)_s is the unit a_i at s = 0 and 1 otherwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TriangularKisin {
    t: Vec<Vec<i64>>,
    units: Vec<FqElem>,
    mats: Vec<SeriesMat>,
}

impl TriangularKisin {
    /// The module with zero off-diagonal entries.
    pub fn diagonal(
        params: &GlobalParams,
        t: Vec<Vec<i64>>,
        units: Vec<FqElem>,
    ) -> Result<TriangularKisin> {
        let d = t.len();
        if d == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        if units.len() != d {
            return Err(Error::InvalidInput("one unit per row is required".into()));
        }
        if units.iter().any(|a| a.is_zero()) {
            return Err(Error::InvalidInput("units must be nonzero".into()));
        }
        let f = params.f();
        let n = params.n();
        for row in &t {
            if row.len() != f {
                return Err(Error::InvalidInput("each weight row needs f entries".into()));
            }
            if row.iter().any(|&w| w < 0 || w as usize >= n) {
                return Err(Error::InvalidInput(
                    "weights must be nonnegative and below the truncation order".into(),
                ));
            }
        }
        let mut mats = Vec::with_capacity(f);
        for s in 0..f {
            let mut m = SeriesMat::zeros(d, d, n);
            for i in 0..d {
                let unit = if s == 0 { units[i] } else { FqElem::ONE };
                m.set(i, i, TruncSeries::monomial(unit, t[i][s] as usize, n));
            }
            mats.push(m);
        }
        Ok(TriangularKisin { t, units, mats })
    }

    /// Replace an off-diagonal entry (i < j) of component s.
    pub fn set_entry(&mut self, s: usize, i: usize, j: usize, v: TruncSeries) -> Result<()> {
        if i >= j || j >= self.d() || s >= self.f() {
            return Err(Error::InvalidInput(
                "only strictly upper entries may be assigned".into(),
            ));
        }
        self.mats[s].set(i, j, v);
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.t.len()
    }

    pub fn f(&self) -> usize {
        self.mats.len()
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.t
    }

    pub fn weight(&self, i: usize, s: usize) -> i64 {
        self.t[i][s]
    }

    pub fn units(&self) -> &[FqElem] {
        &self.units
    }

    pub fn unit_at(&self, i: usize, s: usize) -> FqElem {
        if s == 0 {
            self.units[i]
        } else {
            FqElem::ONE
        }
    }

    pub fn mat(&self, s: usize) -> &SeriesMat {
        &self.mats[s]
    }

    pub fn entry(&self, s: usize, i: usize, j: usize) -> &TruncSeries {
        self.mats[s].get(i, j)
    }

    /// The rank-1 module carried by row i.
    pub fn row_module(&self, params: &GlobalParams, i: usize) -> Rank1Kisin {
        Rank1Kisin::new(params, self.t[i].clone(), self.units[i])
            .expect("rows of a validated module are well-formed")
    }

    /// Structural invariants: zero below the diagonal, exact monomials on it.
    pub fn validate(&self, params: &GlobalParams) -> Result<()> {
        let d = self.d();
        for s in 0..self.f() {
            for i in 0..d {
                for j in 0..i {
                    if !self.entry(s, i, j).is_zero() {
                        return Err(Error::Shape(format!(
                            "entry ({i},{j}) of component {s} below the diagonal is nonzero"
                        )));
                    }
                }
                let expect = TruncSeries::monomial(
                    self.unit_at(i, s),
                    self.t[i][s] as usize,
                    params.n(),
                );
                if *self.entry(s, i, i) != expect {
                    return Err(Error::Shape(format!(
                        "diagonal entry ({i},{i}) of component {s} is not (a_i)_s u^t"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One strictly-upper entry's classification.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ShapeEntry {
    pub s: usize,
    pub i: usize,
    pub j: usize,
    /// deg(x) < t_{j,s}.
    pub deg_ok: bool,
    /// x = u^{t_{i,s}} y with y scalar when t_{j,s} > t_{i,s}, x = 0 otherwise.
    pub p_ok: bool,
}

/// An admissible extra term: entry (i, j) at the chosen component s0 may pick
/// up one term of the listed degree when a nonzero morphism row_j -> row_i
/// exists.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExtraTermSlot {
    pub i: usize,
    pub j: usize,
    pub s0: usize,
    pub degree: i64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShapeClass {
    pub entries: Vec<ShapeEntry>,
    pub deg_ok_all: bool,
    pub p_shape_all: bool,
    /// Free positions (i, j, s) with t_{j,s} > t_{i,s}: where a monomial
    /// coefficient may sit under the monomial shape.
    pub y_slots: Vec<(usize, usize, usize)>,
    pub extra_term_slots: Vec<ExtraTermSlot>,
}

fn entry_deg_ok(x: &TruncSeries, tj: i64) -> bool {
    match x.degree() {
        None => true,
        Some(deg) => (deg as i64) < tj,
    }
}

fn entry_p_ok(x: &TruncSeries, ti: i64, tj: i64) -> bool {
    if tj > ti {
        x.is_zero() || (x.val() == LaurentVal::Finite(ti as usize) && x.degree() == Some(ti as usize))
    } else {
        x.is_zero()
    }
}

pub fn classify_shape(params: &GlobalParams, m: &TriangularKisin) -> ShapeClass {
    let d = m.d();
    let f = m.f();
    let mut entries = Vec::new();
    let mut y_slots = Vec::new();
    for s in 0..f {
        for i in 0..d {
            for j in (i + 1)..d {
                let x = m.entry(s, i, j);
                let ti = m.weight(i, s);
                let tj = m.weight(j, s);
                entries.push(ShapeEntry {
                    s,
                    i,
                    j,
                    deg_ok: entry_deg_ok(x, tj),
                    p_ok: entry_p_ok(x, ti, tj),
                });
                if tj > ti {
                    y_slots.push((i, j, s));
                }
            }
        }
    }
    let mut extra_term_slots = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let ni = m.row_module(params, i);
            let nj = m.row_module(params, j);
            if hom_exists(params, &nj, &ni) {
                let ai = alpha_of_weights(params, &m.weights()[i]);
                let aj = alpha_of_weights(params, &m.weights()[j]);
                for s0 in 0..f {
                    let extra = Ratio::from_integer(m.weight(j, s0)) + aj.values[s0] - ai.values[s0];
                    debug_assert!(extra.is_integer());
                    extra_term_slots.push(ExtraTermSlot {
                        i,
                        j,
                        s0,
                        degree: extra.to_integer(),
                    });
                }
            }
        }
    }
    ShapeClass {
        deg_ok_all: entries.iter().all(|e| e.deg_ok),
        p_shape_all: entries.iter().all(|e| e.p_ok),
        entries,
        y_slots,
        extra_term_slots,
    }
}

/// Right-multiplication of component s by Id - c_s E_{i,j}: column j picks up
/// -c_s times column i. Legal when i < j and t_{i,s} < t_{j,s} wherever
/// c_s is nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AllowableMove {
    pub i: usize,
    pub j: usize,
    /// One scalar per component; zero entries leave that component alone.
    pub c: Vec<FqElem>,
}

impl AllowableMove {
    pub fn inverse(&self, params: &GlobalParams) -> AllowableMove {
        let ctx = params.field();
        AllowableMove {
            i: self.i,
            j: self.j,
            c: self.c.iter().map(|&x| ctx.neg(x)).collect(),
        }
    }
}

pub fn allowable_procedure(
    params: &GlobalParams,
    m: &TriangularKisin,
    mv: &AllowableMove,
) -> Result<TriangularKisin> {
    let ctx = params.field();
    let (i, j) = (mv.i, mv.j);
    if i >= j || j >= m.d() {
        return Err(Error::InvalidMove(format!("need i < j < d, got ({i}, {j})")));
    }
    if mv.c.len() != m.f() {
        return Err(Error::InvalidMove("one scalar per component is required".into()));
    }
    let mut out = m.clone();
    for (s, &cs) in mv.c.iter().enumerate() {
        if cs.is_zero() {
            continue;
        }
        if m.weight(i, s) >= m.weight(j, s) {
            return Err(Error::InvalidMove(format!(
                "component {s}: move needs t_i < t_j, got {} >= {}",
                m.weight(i, s),
                m.weight(j, s)
            )));
        }
        for k in 0..=i {
            let delta = m.entry(s, k, i).scale(ctx, cs);
            let new = m.entry(s, k, j).sub(ctx, &delta);
            out.mats[s].set(k, j, new);
        }
    }
    Ok(out)
}

/// Clear the off-diagonal entries of a module in monomial shape, recording
/// the moves used: last column upward, then the previous column, and so on.
/// Replaying the moves on the input reproduces the diagonal output.
pub fn normalize_to_diagonal(
    params: &GlobalParams,
    m: &TriangularKisin,
) -> Result<(TriangularKisin, Vec<AllowableMove>)> {
    let shape = classify_shape(params, m);
    if !shape.p_shape_all {
        return Err(Error::Shape(
            "normalization requires the monomial shape on every entry".into(),
        ));
    }
    let ctx = params.field();
    let d = m.d();
    let f = m.f();
    let mut cur = m.clone();
    let mut moves = Vec::new();
    for j in (1..d).rev() {
        for i in (0..j).rev() {
            let mut c = vec![FqElem::ZERO; f];
            let mut any = false;
            for (s, cs) in c.iter_mut().enumerate() {
                let x = cur.entry(s, i, j);
                if x.is_zero() {
                    continue;
                }
                let y = x.coeff(cur.weight(i, s) as usize);
                // cancel against the diagonal (a_i)_s u^{t_i}
                *cs = ctx.mul(y, ctx.inv(cur.unit_at(i, s))?);
                any = true;
            }
            if !any {
                continue;
            }
            let mv = AllowableMove { i, j, c };
            cur = allowable_procedure(params, &cur, &mv)?;
            moves.push(mv);
        }
    }
    for s in 0..f {
        for i in 0..d {
            for j in (i + 1)..d {
                debug_assert!(cur.entry(s, i, j).is_zero());
            }
        }
    }
    Ok((cur, moves))
}

/// Divisibility of the columns of X A by the respective u^{t_i}: entry i is
/// true when every coefficient of column i of X A vanishes below degree t_i.
pub fn column_divisibility(
    params: &GlobalParams,
    x: &SeriesMat,
    a: &FqMat,
    t: &[i64],
) -> Result<Vec<bool>> {
    let ctx = params.field();
    if !a.is_invertible(ctx) {
        return Err(Error::InvalidInput("scalar matrix must be invertible".into()));
    }
    if x.cols() != a.rows() || t.len() != a.cols() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let prod = x.mul_fq(ctx, a);
    Ok((0..prod.cols())
        .map(|i| {
            (0..prod.rows()).all(|k| prod.get(k, i).val().is_at_least(t[i].max(0) as usize))
        })
        .collect())
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SublemmaTag {
    /// t_d is maximal.
    MaxAtLast,
    /// t_1 is maximal.
    MaxAtFirst,
    /// the maximum sits strictly inside.
    MaxInterior,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VerifyMode {
    Exhaustive,
    Randomized { trials: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShapeCounterexample {
    /// Flattened strictly-upper coefficients of X, index order (i, j, deg).
    pub x_coeffs: Vec<usize>,
    /// Flattened entries of A, row-major element indices.
    pub a_entries: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShapeVerifyReport {
    pub t: Vec<i64>,
    pub mode: VerifyMode,
    pub tag: SublemmaTag,
    pub cases_examined: u64,
    /// (X, A) pairs that satisfied the divisibility hypothesis.
    pub hypothesis_hits: u64,
    pub counterexamples: Vec<ShapeCounterexample>,
}

fn sublemma_tag(t: &[i64]) -> SublemmaTag {
    let max = *t.iter().max().unwrap();
    if t[t.len() - 1] == max {
        SublemmaTag::MaxAtLast
    } else if t[0] == max {
        SublemmaTag::MaxAtFirst
    } else {
        SublemmaTag::MaxInterior
    }
}

/// Sweep matrices X (upper triangular, diagonal u^{t_i}, entry degrees below
/// the column weight) against A in GL_d(k_E); whenever u^{t_i} divides
/// column i of X A for every i, the monomial shape must hold for X.
/// Exhaustive mode walks the whole coefficient space (within `budget` pairs);
/// randomized mode samples `trials` pairs.
pub fn shapelemma_verify(
    params: &GlobalParams,
    t: &[i64],
    mode: VerifyMode,
    budget: u64,
    seed: u64,
) -> Result<ShapeVerifyReport> {
    let ctx = params.field();
    let d = t.len();
    let p = params.p();
    if d == 0 {
        return Err(Error::InvalidInput("need at least one weight".into()));
    }
    for &w in t {
        if !(0..=p).contains(&w) {
            return Err(Error::InvalidInput(format!("weights must lie in [0, {p}]")));
        }
    }
    {
        let mut sorted = t.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != d {
            return Err(Error::InvalidInput("weights must be distinct".into()));
        }
    }

    // strictly-upper coefficient slots: (i, j, deg) with deg < t_j
    let mut slots = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            for deg in 0..t[j] {
                slots.push((i, j, deg as usize));
            }
        }
    }
    let n = params.n();
    let q = ctx.q() as u64;
    let gl = gl_matrices(ctx, d);

    let build_x = |coeffs: &[usize]| -> SeriesMat {
        let mut x = SeriesMat::zeros(d, d, n);
        for (idx, &(i, j, deg)) in slots.iter().enumerate() {
            if coeffs[idx] != 0 {
                let cur = x.get(i, j).add(
                    ctx,
                    &TruncSeries::monomial(FqElem::from_index(coeffs[idx]), deg, n),
                );
                x.set(i, j, cur);
            }
        }
        for i in 0..d {
            x.set(i, i, TruncSeries::monomial(FqElem::ONE, t[i] as usize, n));
        }
        x
    };
    let satisfies_p = |x: &SeriesMat| -> bool {
        (0..d).all(|i| {
            ((i + 1)..d).all(|j| entry_p_ok(x.get(i, j), t[i], t[j]))
        })
    };
    let hypothesis = |x: &SeriesMat, a: &FqMat| -> bool {
        let prod = x.mul_fq(ctx, a);
        (0..d).all(|i| {
            (0..d).all(|k| prod.get(k, i).val().is_at_least(t[i] as usize))
        })
    };

    let mut report = ShapeVerifyReport {
        t: t.to_vec(),
        mode,
        tag: sublemma_tag(t),
        cases_examined: 0,
        hypothesis_hits: 0,
        counterexamples: Vec::new(),
    };

    match mode {
        VerifyMode::Exhaustive => {
            let x_count = q.checked_pow(slots.len() as u32).ok_or_else(|| {
                Error::InvalidInput("coefficient space too large to enumerate".into())
            })?;
            let total = x_count.saturating_mul(gl.len() as u64);
            let mut coeffs = vec![0usize; slots.len()];
            loop {
                let x = build_x(&coeffs);
                let p_holds = satisfies_p(&x);
                for a in &gl {
                    if report.cases_examined >= budget {
                        return Err(Error::Budget { examined: report.cases_examined, total });
                    }
                    report.cases_examined += 1;
                    if hypothesis(&x, a) {
                        report.hypothesis_hits += 1;
                        if !p_holds {
                            report.counterexamples.push(ShapeCounterexample {
                                x_coeffs: coeffs.clone(),
                                a_entries: (0..d * d)
                                    .map(|c| a.get(c / d, c % d).index())
                                    .collect(),
                            });
                        }
                    }
                }
                // odometer over the coefficient space
                let mut k = 0;
                loop {
                    if k == coeffs.len() {
                        return Ok(report);
                    }
                    coeffs[k] += 1;
                    if coeffs[k] < q as usize {
                        break;
                    }
                    coeffs[k] = 0;
                    k += 1;
                }
            }
        }
        VerifyMode::Randomized { trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials.min(budget) {
                report.cases_examined += 1;
                let coeffs: Vec<usize> =
                    (0..slots.len()).map(|_| rng.gen_range(0..q as usize)).collect();
                let x = build_x(&coeffs);
                let a = &gl[rng.gen_range(0..gl.len())];
                if hypothesis(&x, a) {
                    report.hypothesis_hits += 1;
                    if !satisfies_p(&x) {
                        report.counterexamples.push(ShapeCounterexample {
                            x_coeffs: coeffs.clone(),
                            a_entries: (0..d * d)
                                .map(|c| a.get(c / d, c % d).index())
                                .collect(),
                        });
                    }
                }
            }
            if trials > budget {
                return Err(Error::Budget { examined: budget, total: trials });
            }
            Ok(report)
        }
    }
}

/// Recover diagonal exponents through a two-sided base change: with
/// B invertible over k_E[[u]], D = diag(u^{r_i}), and A invertible with all
/// entries in the image of the twist, compute M = B D A; when M is upper
/// triangular with unit-times-monomial diagonal, the diagonal exponents must
/// equal {r_i} as a multiset. Returns None when M fails the triangularity
/// filter (nothing to check), otherwise whether the multisets agree.
pub fn diag_recovery_check(
    params: &GlobalParams,
    b: &SeriesMat,
    r: &[i64],
    a: &SeriesMat,
) -> Result<Option<bool>> {
    let ctx = params.field();
    let d = r.len();
    let p = params.p();
    if b.rows() != d || b.cols() != d || a.rows() != d || a.cols() != d {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if !b.is_series_invertible(ctx) {
        return Err(Error::InvalidInput("B must be invertible over k_E[[u]]".into()));
    }
    if !a.is_series_invertible(ctx) {
        return Err(Error::InvalidInput("A must be invertible".into()));
    }
    for i in 0..d {
        for j in 0..d {
            let s = a.get(i, j);
            for (k, c) in s.coeffs().iter().enumerate() {
                if !c.is_zero() && k % (p as usize) != 0 {
                    return Err(Error::InvalidInput(
                        "entries of A must lie in the image of the twist".into(),
                    ));
                }
            }
        }
    }
    if r.windows(2).any(|w| w[0] > w[1]) || r.iter().any(|&x| !(0..=p).contains(&x)) {
        return Err(Error::InvalidInput(format!(
            "exponents must be sorted inside [0, {p}]"
        )));
    }

    let n = params.n();
    let mut dm = SeriesMat::zeros(d, d, n);
    for i in 0..d {
        dm.set(i, i, TruncSeries::monomial(FqElem::ONE, r[i] as usize, n));
    }
    let m = b.mul(ctx, &dm).mul(ctx, a);

    for i in 0..d {
        for j in 0..i {
            if !m.get(i, j).is_zero() {
                return Ok(None);
            }
        }
    }
    let mut diag_vals = Vec::with_capacity(d);
    for i in 0..d {
        match m.get(i, i).val() {
            LaurentVal::Finite(v) => diag_vals.push(v as i64),
            LaurentVal::AtLeast(_) => return Ok(None),
        }
    }
    let mut lhs = diag_vals;
    lhs.sort_unstable();
    let mut rhs = r.to_vec();
    rhs.sort_unstable();
    Ok(Some(lhs == rhs))
}
