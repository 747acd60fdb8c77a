//! Extension classes of torsion modules at the matrix level: block Frobenius
//! data [[A, C], [0, A']], the equivalence C ~ C + A phi(W) - W A', the
//! semilinear coefficient solver, and extension-space dimensions with their
//! precision certificates.
//!
//! Orientation: `sub` is the first block (the submodule), `quot` the second;
//! the twist maps component s-1 into component s, so the equivalence reads
//! componentwise as C_s -> C_s + A_s phi(W_{s-1}) - W_s A'_s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::matrix::{Echelon, FqMat, SeriesMat};
use crate::params::GlobalParams;
use crate::rank1::{hom_exists, Rank1Kisin};
use crate::series::{LaurentVal, TruncSeries};
use crate::shape::TriangularKisin;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ShapeTag {
    /// Height condition only.
    Raw,
    /// Entry degrees below the quotient row weights.
    ExtShape,
    /// Monomial entries u^{t_sub} * scalar, supported where the quotient
    /// weight strictly exceeds the sub weight.
    PhiShape,
}

/// Extension data: one k x k' block per component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtClass {
    pub c: Vec<SeriesMat>,
    pub tag: ShapeTag,
}

impl ExtClass {
    /// Check the invariant of this class's tag against its problem:
    /// raw needs the block height condition, the degree-bounded tag needs
    /// entry degrees below the quotient row weights, and the monomial tag
    /// needs u^{t_sub} scalars supported where the quotient weight exceeds
    /// the sub weight.
    pub fn validate(&self, params: &GlobalParams, prob: &ExtProblem) -> Result<()> {
        prob.check_class_dims(params, &self.c)?;
        match self.tag {
            ShapeTag::Raw => {
                let block = assemble(params, prob, &self.c)?;
                if !height_condition(params, &block, prob.height)? {
                    return Err(Error::Shape(format!(
                        "block does not divide u^{}",
                        prob.height
                    )));
                }
            }
            ShapeTag::ExtShape => {
                for (s, m) in self.c.iter().enumerate() {
                    for i in 0..prob.k() {
                        for j in 0..prob.k_prime() {
                            let deg = m.get(i, j).degree();
                            let bound = prob.quot.weight(j, s);
                            if deg.is_some_and(|d| d as i64 >= bound) {
                                return Err(Error::Shape(format!(
                                    "entry ({i},{j}) of component {s} has degree >= {bound}"
                                )));
                            }
                        }
                    }
                }
            }
            ShapeTag::PhiShape => {
                for (s, m) in self.c.iter().enumerate() {
                    for i in 0..prob.k() {
                        for j in 0..prob.k_prime() {
                            let x = m.get(i, j);
                            let ti = prob.sub.weight(i, s);
                            let tj = prob.quot.weight(j, s);
                            let ok = if tj > ti {
                                x.is_zero()
                                    || (x.val() == LaurentVal::Finite(ti as usize)
                                        && x.degree() == Some(ti as usize))
                            } else {
                                x.is_zero()
                            };
                            if !ok {
                                return Err(Error::Shape(format!(
                                    "entry ({i},{j}) of component {s} is not a u^{ti} scalar slot"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A base-change witness: C2 - C1 = W A' - A phi(W) componentwise, verified
/// at the stated precision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivWitness {
    pub w: Vec<SeriesMat>,
    pub precision: usize,
}

#[derive(Clone, Debug)]
pub struct ExtProblem {
    pub sub: TriangularKisin,
    pub quot: TriangularKisin,
    /// Height exponent r: the block Frobenius must divide u^r.
    pub height: i64,
}

impl ExtProblem {
    pub fn new(params: &GlobalParams, sub: TriangularKisin, quot: TriangularKisin) -> Result<ExtProblem> {
        Self::with_height(params, sub, quot, params.p())
    }

    pub fn with_height(
        params: &GlobalParams,
        sub: TriangularKisin,
        quot: TriangularKisin,
        height: i64,
    ) -> Result<ExtProblem> {
        if sub.f() != params.f() || quot.f() != params.f() {
            return Err(Error::InvalidInput("component counts must match".into()));
        }
        if height < 0 {
            return Err(Error::InvalidInput("height must be nonnegative".into()));
        }
        sub.validate(params)?;
        quot.validate(params)?;
        Ok(ExtProblem { sub, quot, height })
    }

    /// Rank of the sub block.
    pub fn k(&self) -> usize {
        self.sub.d()
    }

    /// Rank of the quotient block.
    pub fn k_prime(&self) -> usize {
        self.quot.d()
    }

    pub fn zero_class(&self, params: &GlobalParams, tag: ShapeTag) -> ExtClass {
        let c = (0..params.f())
            .map(|_| SeriesMat::zeros(self.k(), self.k_prime(), params.n()))
            .collect();
        ExtClass { c, tag }
    }

    fn check_class_dims(&self, params: &GlobalParams, c: &[SeriesMat]) -> Result<()> {
        if c.len() != params.f() {
            return Err(Error::InvalidInput("one block per component is required".into()));
        }
        for m in c {
            if m.rows() != self.k() || m.cols() != self.k_prime() {
                return Err(Error::InvalidInput(format!(
                    "block must be {} x {}",
                    self.k(),
                    self.k_prime()
                )));
            }
        }
        Ok(())
    }
}

/// The assembled block module [[A, C], [0, A']].
pub fn assemble(
    params: &GlobalParams,
    prob: &ExtProblem,
    c: &[SeriesMat],
) -> Result<TriangularKisin> {
    prob.check_class_dims(params, c)?;
    assemble_from_mats(params, &prob.sub, &prob.quot, c)
}

pub fn assemble_class(
    params: &GlobalParams,
    prob: &ExtProblem,
    class: &ExtClass,
) -> Result<TriangularKisin> {
    assemble(params, prob, &class.c)
}

fn assemble_from_mats(
    params: &GlobalParams,
    sub: &TriangularKisin,
    quot: &TriangularKisin,
    c: &[SeriesMat],
) -> Result<TriangularKisin> {
    let k = sub.d();
    let kp = quot.d();
    let mut weights = sub.weights().to_vec();
    weights.extend_from_slice(quot.weights());
    let mut units = sub.units().to_vec();
    units.extend_from_slice(quot.units());
    let mut out = TriangularKisin::diagonal(params, weights, units)?;
    for s in 0..params.f() {
        for i in 0..k {
            for j in (i + 1)..k {
                out.set_entry(s, i, j, sub.entry(s, i, j).clone())?;
            }
        }
        for i in 0..kp {
            for j in (i + 1)..kp {
                out.set_entry(s, k + i, k + j, quot.entry(s, i, j).clone())?;
            }
        }
        for i in 0..k {
            for j in 0..kp {
                out.set_entry(s, i, k + j, c[s].get(i, j).clone())?;
            }
        }
    }
    Ok(out)
}

/// Height condition on an upper-triangular module: u^r times the inverse of
/// every component matrix is integral, checked through adjugate valuations
/// (val(adj entry) + r >= val(det), det being the product of the diagonal).
pub fn height_condition(params: &GlobalParams, m: &TriangularKisin, r: i64) -> Result<bool> {
    let ctx = params.field();
    let n = params.n();
    for s in 0..m.f() {
        let v_det: i64 = (0..m.d()).map(|i| m.weight(i, s)).sum();
        if v_det as usize >= n {
            return Err(Error::Precision(format!(
                "determinant valuation {v_det} is not readable at truncation {n}"
            )));
        }
        let adj = m.mat(s).adjugate(ctx);
        for i in 0..m.d() {
            for j in 0..m.d() {
                let ok = match adj.get(i, j).val() {
                    LaurentVal::Finite(v) => v as i64 + r >= v_det,
                    LaurentVal::AtLeast(prec) => prec as i64 + r >= v_det,
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// C_new,s = C_s + A_s phi(W_{s-1}) - W_s A'_s.
pub fn block_basis_change(
    params: &GlobalParams,
    prob: &ExtProblem,
    c: &[SeriesMat],
    w: &[SeriesMat],
) -> Result<Vec<SeriesMat>> {
    let ctx = params.field();
    prob.check_class_dims(params, c)?;
    prob.check_class_dims(params, w)?;
    let f = params.f();
    let mut out = Vec::with_capacity(f);
    for s in 0..f {
        let prev = (s + f - 1) % f;
        let gain = prob.sub.mat(s).mul(ctx, &w[prev].phi_twist(ctx));
        let loss = w[s].mul(ctx, prob.quot.mat(s));
        out.push(c[s].add(ctx, &gain).sub(ctx, &loss));
    }
    Ok(out)
}

/// The k_E-linear map W -> (W_s A'_s - A_s phi(W_{s-1}))_s; a class is
/// equivalent to zero exactly when it lies in the image.
pub fn twisted_image(
    params: &GlobalParams,
    prob: &ExtProblem,
    w: &[SeriesMat],
) -> Result<Vec<SeriesMat>> {
    let ctx = params.field();
    prob.check_class_dims(params, w)?;
    let f = params.f();
    let mut out = Vec::with_capacity(f);
    for s in 0..f {
        let prev = (s + f - 1) % f;
        let a_phi = prob.sub.mat(s).mul(ctx, &w[prev].phi_twist(ctx));
        out.push(w[s].mul(ctx, prob.quot.mat(s)).sub(ctx, &a_phi));
    }
    Ok(out)
}

/// Coefficient-vector bookkeeping for the ambient space of C blocks.
struct ExtSpace<'a> {
    params: &'a GlobalParams,
    prob: &'a ExtProblem,
    k: usize,
    kp: usize,
    n: usize,
}

impl<'a> ExtSpace<'a> {
    fn new(params: &'a GlobalParams, prob: &'a ExtProblem) -> ExtSpace<'a> {
        ExtSpace { params, prob, k: prob.k(), kp: prob.k_prime(), n: params.n() }
    }

    fn ambient_dim(&self) -> usize {
        self.params.f() * self.k * self.kp * self.n
    }

    fn index(&self, s: usize, i: usize, j: usize, deg: usize) -> usize {
        ((s * self.k + i) * self.kp + j) * self.n + deg
    }

    fn class_to_vec(&self, c: &[SeriesMat]) -> Vec<FqElem> {
        let mut v = vec![FqElem::ZERO; self.ambient_dim()];
        for (s, m) in c.iter().enumerate() {
            for i in 0..self.k {
                for j in 0..self.kp {
                    for (deg, &coeff) in m.get(i, j).coeffs().iter().enumerate().take(self.n) {
                        v[self.index(s, i, j, deg)] = coeff;
                    }
                }
            }
        }
        v
    }

    fn vec_to_class(&self, v: &[FqElem]) -> Vec<SeriesMat> {
        let f = self.params.f();
        let mut out = Vec::with_capacity(f);
        for s in 0..f {
            let mut m = SeriesMat::zeros(self.k, self.kp, self.n);
            for i in 0..self.k {
                for j in 0..self.kp {
                    let coeffs: Vec<FqElem> =
                        (0..self.n).map(|deg| v[self.index(s, i, j, deg)]).collect();
                    m.set(i, j, TruncSeries::from_coeffs(&coeffs, self.n));
                }
            }
            out.push(m);
        }
        out
    }

    /// Image of the unit W-coefficient (s0, i, j, e) under the twisted map,
    /// built without full matrix products: the A' row scaled by u^e lands in
    /// component s0, minus the A column scaled by u^{p e} in component s0+1.
    fn generator(&self, s0: usize, i: usize, j: usize, e: usize) -> Vec<FqElem> {
        let ctx = self.params.field();
        let f = self.params.f();
        let p = self.params.p() as usize;
        let mut v = vec![FqElem::ZERO; self.ambient_dim()];
        for j2 in 0..self.kp {
            let series = self.prob.quot.mat(s0).get(j, j2);
            for (deg, &coeff) in series.coeffs().iter().enumerate() {
                if coeff.is_zero() || e + deg >= self.n {
                    continue;
                }
                let idx = self.index(s0, i, j2, e + deg);
                v[idx] = ctx.add(v[idx], coeff);
            }
        }
        let s1 = (s0 + 1) % f;
        if let Some(pe) = e.checked_mul(p) {
            for i2 in 0..self.k {
                let series = self.prob.sub.mat(s1).get(i2, i);
                for (deg, &coeff) in series.coeffs().iter().enumerate() {
                    if coeff.is_zero() || pe + deg >= self.n {
                        continue;
                    }
                    let idx = self.index(s1, i2, j, pe + deg);
                    v[idx] = ctx.sub(v[idx], coeff);
                }
            }
        }
        v
    }

    /// Slot basis vectors of the admissible C space under `tag`.
    fn slot_vectors(&self, tag: ShapeTag) -> Result<Vec<Vec<FqElem>>> {
        let f = self.params.f();
        let mut out = Vec::new();
        match tag {
            ShapeTag::ExtShape => {
                for s in 0..f {
                    for i in 0..self.k {
                        for j in 0..self.kp {
                            for deg in 0..self.prob.quot.weight(j, s) {
                                let mut v = vec![FqElem::ZERO; self.ambient_dim()];
                                v[self.index(s, i, j, deg as usize)] = FqElem::ONE;
                                out.push(v);
                            }
                        }
                    }
                }
            }
            ShapeTag::PhiShape => {
                for s in 0..f {
                    for i in 0..self.k {
                        for j in 0..self.kp {
                            if self.prob.quot.weight(j, s) > self.prob.sub.weight(i, s) {
                                let mut v = vec![FqElem::ZERO; self.ambient_dim()];
                                v[self.index(s, i, j, self.prob.sub.weight(i, s) as usize)] =
                                    FqElem::ONE;
                                out.push(v);
                            }
                        }
                    }
                }
            }
            ShapeTag::Raw => {
                return Err(Error::InvalidInput(
                    "dimension computation needs a finite slot space (degree-bounded or monomial)"
                        .into(),
                ))
            }
        }
        Ok(out)
    }

    fn w_generators(&self, w_deg_bound: usize) -> Vec<Vec<FqElem>> {
        let f = self.params.f();
        let mut gens = Vec::new();
        for s in 0..f {
            for i in 0..self.k {
                for j in 0..self.kp {
                    for e in 0..w_deg_bound {
                        gens.push(self.generator(s, i, j, e));
                    }
                }
            }
        }
        gens
    }
}

/// Default degree bound for base-change witnesses: p times the largest total
/// column weight, plus p.
pub fn default_w_degree_bound(params: &GlobalParams, prob: &ExtProblem) -> usize {
    let p = params.p() as usize;
    let mut max_col = 0i64;
    for s in 0..params.f() {
        let total: i64 = (0..prob.k()).map(|i| prob.sub.weight(i, s)).sum::<i64>()
            + (0..prob.k_prime()).map(|j| prob.quot.weight(j, s)).sum::<i64>();
        max_col = max_col.max(total);
    }
    p * max_col as usize + p
}

/// Solve C_target,s = W_s A'_s - A_s phi(W_{s-1}) for W with entry degrees
/// below `w_degree_bound`, as a k_E-linear system on coefficients. Returns
/// None when the system is inconsistent at the working precision; errors
/// with Precision when doubling the degree bound changes solvability.
pub fn semilinear_solve(
    params: &GlobalParams,
    prob: &ExtProblem,
    c_target: &[SeriesMat],
    w_degree_bound: usize,
) -> Result<Option<EquivWitness>> {
    if w_degree_bound > params.n() {
        return Err(Error::InvalidInput(
            "witness degree bound exceeds the truncation order".into(),
        ));
    }
    prob.check_class_dims(params, c_target)?;
    let first = solve_at(params, prob, c_target, w_degree_bound)?;
    let doubled = solve_at(params, prob, c_target, (2 * w_degree_bound).min(params.n()))?;
    if first.is_none() && doubled.is_some() {
        return Err(Error::Precision(format!(
            "solvability changes between witness degrees {w_degree_bound} and {}",
            2 * w_degree_bound
        )));
    }
    Ok(first.map(|w| EquivWitness { w, precision: params.n() }))
}

fn solve_at(
    params: &GlobalParams,
    prob: &ExtProblem,
    c_target: &[SeriesMat],
    w_deg_bound: usize,
) -> Result<Option<Vec<SeriesMat>>> {
    let ctx = params.field();
    let space = ExtSpace::new(params, prob);
    let target = space.class_to_vec(c_target);
    let gens = space.w_generators(w_deg_bound);
    let rows = space.ambient_dim();
    let cols = gens.len();
    let mut a = FqMat::zeros(rows, cols);
    for (col, g) in gens.iter().enumerate() {
        for (row, &v) in g.iter().enumerate() {
            if !v.is_zero() {
                a.set(row, col, v);
            }
        }
    }
    let Some(x) = crate::matrix::solve(ctx, &a, &target) else {
        return Ok(None);
    };
    // unpack the coefficient solution into W matrices
    let f = params.f();
    let n = params.n();
    let mut w = vec![SeriesMat::zeros(space.k, space.kp, n); f];
    let mut idx = 0usize;
    for ws in w.iter_mut().take(f) {
        for i in 0..space.k {
            for j in 0..space.kp {
                let mut coeffs = vec![FqElem::ZERO; n];
                for c in coeffs.iter_mut().take(w_deg_bound) {
                    *c = x[idx];
                    idx += 1;
                }
                ws.set(i, j, TruncSeries::from_coeffs(&coeffs, n));
            }
        }
    }
    Ok(Some(w))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StabilityCert {
    pub n_base: usize,
    pub n_doubled: usize,
    pub w_bound_base: usize,
    pub w_bound_doubled: usize,
    pub dim_base: usize,
    pub dim_doubled: usize,
}

#[derive(Clone, Debug)]
pub struct ExtDim {
    pub dim: usize,
    /// Representative classes spanning a complement of the trivial ones.
    pub basis: Vec<ExtClass>,
    pub cert: StabilityCert,
}

/// Dimension of the admissible-C space under `tag`, modulo the image of the
/// twisted map, with a doubling stability certificate: the dimension must
/// agree at (N, W-bound) and (2N, 2 W-bound).
pub fn ext_dim(
    params: &GlobalParams,
    prob: &ExtProblem,
    tag: ShapeTag,
    n: usize,
) -> Result<ExtDim> {
    let base_params = params.with_truncation(n);
    let base_prob = reprecision_problem(&base_params, prob)?;
    let (dim_base, basis, w_base) = ext_dim_at(&base_params, &base_prob, tag)?;

    let doubled_params = params.with_truncation(2 * n);
    let doubled_prob = reprecision_problem(&doubled_params, prob)?;
    let (dim_doubled, _, w_doubled) = ext_dim_at(&doubled_params, &doubled_prob, tag)?;

    let cert = StabilityCert {
        n_base: n,
        n_doubled: 2 * n,
        w_bound_base: w_base,
        w_bound_doubled: w_doubled,
        dim_base,
        dim_doubled,
    };
    if dim_base != dim_doubled {
        return Err(Error::Precision(format!(
            "extension dimension changed from {dim_base} at N = {n} to {dim_doubled} at N = {}",
            2 * n
        )));
    }
    Ok(ExtDim { dim: dim_base, basis, cert })
}

fn reprecision_problem(params: &GlobalParams, prob: &ExtProblem) -> Result<ExtProblem> {
    Ok(ExtProblem {
        sub: reprecision_module(params, &prob.sub)?,
        quot: reprecision_module(params, &prob.quot)?,
        height: prob.height,
    })
}

fn reprecision_module(params: &GlobalParams, m: &TriangularKisin) -> Result<TriangularKisin> {
    let mut out =
        TriangularKisin::diagonal(params, m.weights().to_vec(), m.units().to_vec())?;
    for s in 0..m.f() {
        for i in 0..m.d() {
            for j in (i + 1)..m.d() {
                out.set_entry(s, i, j, m.entry(s, i, j).truncate(params.n()))?;
            }
        }
    }
    Ok(out)
}

fn ext_dim_at(
    params: &GlobalParams,
    prob: &ExtProblem,
    tag: ShapeTag,
) -> Result<(usize, Vec<ExtClass>, usize)> {
    let ctx = params.field();
    let space = ExtSpace::new(params, prob);
    let slots = space.slot_vectors(tag)?;
    let w_bound = default_w_degree_bound(params, prob).min(params.n());

    let mut combined = Echelon::new(space.ambient_dim());
    for g in space.w_generators(w_bound) {
        combined.add_row(ctx, g);
    }
    // slot vectors that stay independent modulo the image span a complement
    let mut basis = Vec::new();
    for v in &slots {
        if combined.add_row(ctx, v.clone()) {
            basis.push(ExtClass { c: space.vec_to_class(v), tag });
        }
    }
    Ok((basis.len(), basis, w_bound))
}

/// Count of (quotient row, embedding) pairs whose weight strictly exceeds the
/// rank-1 sub's weight there.
pub fn d_nek(sub_row: &[i64], quot_rows: &[Vec<i64>]) -> usize {
    quot_rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(sub_row)
                .filter(|(q, s)| q > s)
                .count()
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub dim: usize,
    pub d_nek: usize,
    pub holds: bool,
    pub cert: StabilityCert,
}

/// For a rank-1 sub, the monomial-shape extension dimension is bounded by
/// the weight-excess count. Hypothesis: no nonzero morphism from a lower row
/// to a higher one among the assembled rank-1 pieces.
pub fn check_upper_bound(params: &GlobalParams, prob: &ExtProblem) -> Result<BoundReport> {
    if prob.k() != 1 {
        return Err(Error::InvalidInput("the sub block must have rank 1".into()));
    }
    let mut rows: Vec<Rank1Kisin> = Vec::new();
    rows.push(prob.sub.row_module(params, 0));
    for i in 0..prob.k_prime() {
        rows.push(prob.quot.row_module(params, i));
    }
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            if hom_exists(params, &rows[j], &rows[i]) {
                return Err(Error::Hypothesis(format!(
                    "nonzero morphism from row {j} to row {i} exists"
                )));
            }
        }
    }
    let result = ext_dim(params, prob, ShapeTag::PhiShape, params.n())?;
    let bound = d_nek(&prob.sub.weights()[0], prob.quot.weights());
    Ok(BoundReport {
        dim: result.dim,
        d_nek: bound,
        holds: result.dim <= bound,
        cert: result.cert,
    })
}

/// Assemble a chain of rank-1 modules along successive extension data:
/// classes[i] extends the (i+2)-th rank-1 module by the already assembled
/// rank-(i+1) module.
pub fn successive_ext_assemble(
    params: &GlobalParams,
    chain: &[Rank1Kisin],
    classes: &[ExtClass],
) -> Result<TriangularKisin> {
    if chain.is_empty() {
        return Err(Error::InvalidInput("chain must be nonempty".into()));
    }
    if classes.len() + 1 != chain.len() {
        return Err(Error::InvalidInput(format!(
            "{} classes cannot assemble a chain of {} modules",
            classes.len(),
            chain.len()
        )));
    }
    let rank1_module = |n: &Rank1Kisin| -> Result<TriangularKisin> {
        TriangularKisin::diagonal(params, vec![n.t.clone()], vec![n.a])
    };
    let mut cur = rank1_module(&chain[0])?;
    for (step, class) in classes.iter().enumerate() {
        let quot = rank1_module(&chain[step + 1])?;
        let prob = ExtProblem::new(params, cur, quot)?;
        cur = assemble_class(params, &prob, class)?;
    }
    Ok(cur)
}

/// Invert the assembly: the strictly-upper column blocks above each diagonal
/// position, innermost first.
pub fn forgetful_decompose(params: &GlobalParams, m: &TriangularKisin) -> Vec<ExtClass> {
    let d = m.d();
    let f = m.f();
    let n = params.n();
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for col in 1..d {
        let mut mats = Vec::with_capacity(f);
        for s in 0..f {
            let mut block = SeriesMat::zeros(col, 1, n);
            for i in 0..col {
                block.set(i, 0, m.entry(s, i, col).clone());
            }
            mats.push(block);
        }
        out.push(ExtClass { c: mats, tag: ShapeTag::Raw });
    }
    out
}
