//! Dense matrices over k_E and over the truncated series ring, with the
//! small-scale linear algebra the verification sweeps need: row reduction,
//! solving, and exhaustive GL_d(k_E) enumeration.

use crate::error::{Error, Result};
use crate::fq::{FieldCtx, FqElem};
use crate::series::TruncSeries;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FqMat {
    rows: usize,
    cols: usize,
    data: Vec<FqElem>,
}

impl FqMat {
    pub fn zeros(rows: usize, cols: usize) -> FqMat {
        FqMat { rows, cols, data: vec![FqElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> FqMat {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FqElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FqElem>]) -> FqMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FqElem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FqElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &FqMat) -> FqMat {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = ctx.mul(a, other.get(k, j));
                    out.set(i, j, ctx.add(out.get(i, j), add));
                }
            }
        }
        out
    }

    pub fn is_invertible(&self, ctx: &FieldCtx) -> bool {
        self.rows == self.cols && rank(ctx, self) == self.rows
    }
}

/// Row rank by Gaussian elimination.
pub fn rank(ctx: &FieldCtx, m: &FqMat) -> usize {
    let mut ech = Echelon::new(m.cols);
    for i in 0..m.rows {
        let row: Vec<FqElem> = (0..m.cols).map(|j| m.get(i, j)).collect();
        ech.add_row(ctx, row);
    }
    ech.rank()
}

/// Incremental row-echelon accumulator over k_E.
pub struct Echelon {
    cols: usize,
    /// Reduced rows, each with its pivot column.
    rows: Vec<(usize, Vec<FqElem>)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Echelon {
        Echelon { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the accumulated basis; if a new pivot survives,
    /// keep it and return true.
    pub fn add_row(&mut self, ctx: &FieldCtx, row: Vec<FqElem>) -> bool {
        let reduced = self.reduce(ctx, row);
        match reduced.iter().position(|c| !c.is_zero()) {
            None => false,
            Some(pivot) => {
                let inv = ctx.inv(reduced[pivot]).expect("pivot is nonzero");
                let normalized: Vec<FqElem> =
                    reduced.iter().map(|&c| ctx.mul(c, inv)).collect();
                self.rows.push((pivot, normalized));
                self.rows.sort_by_key(|(p, _)| *p);
                true
            }
        }
    }

    /// Would `row` increase the rank? Non-destructive membership test.
    pub fn reduces_to_zero(&self, ctx: &FieldCtx, row: Vec<FqElem>) -> bool {
        self.reduce(ctx, row).iter().all(|c| c.is_zero())
    }

    fn reduce(&self, ctx: &FieldCtx, mut row: Vec<FqElem>) -> Vec<FqElem> {
        assert_eq!(row.len(), self.cols);
        for (pivot, basis) in &self.rows {
            let c = row[*pivot];
            if c.is_zero() {
                continue;
            }
            for j in *pivot..self.cols {
                row[j] = ctx.sub(row[j], ctx.mul(c, basis[j]));
            }
        }
        row
    }
}

/// Solve A x = b over k_E; returns one solution if consistent.
pub fn solve(ctx: &FieldCtx, a: &FqMat, b: &[FqElem]) -> Option<Vec<FqElem>> {
    assert_eq!(a.rows, b.len());
    let rows = a.rows;
    let cols = a.cols;
    // augmented elimination
    let mut m: Vec<Vec<FqElem>> = (0..rows)
        .map(|i| {
            let mut row: Vec<FqElem> = (0..cols).map(|j| a.get(i, j)).collect();
            row.push(b[i]);
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = ctx.inv(m[r][c]).expect("pivot nonzero");
        for j in c..=cols {
            m[r][j] = ctx.mul(m[r][j], inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                for j in c..=cols {
                    let sub = ctx.mul(factor, m[r][j]);
                    m[i][j] = ctx.sub(m[i][j], sub);
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    // consistency: no row (0 ... 0 | nonzero)
    for row in m.iter().skip(r) {
        if row[..cols].iter().all(|c| c.is_zero()) && !row[cols].is_zero() {
            return None;
        }
    }
    // also rows above r can't be inconsistent by construction
    let mut x = vec![FqElem::ZERO; cols];
    for c in 0..cols {
        if let Some(pr) = pivot_of_col[c] {
            x[c] = m[pr][cols];
        }
    }
    // verify (guards the early-exit at r == rows)
    for i in 0..rows {
        let mut acc = FqElem::ZERO;
        for j in 0..cols {
            acc = ctx.add(acc, ctx.mul(a.get(i, j), x[j]));
        }
        if acc != b[i] {
            return None;
        }
    }
    Some(x)
}

/// All d x d matrices over k_E (q^{d^2} of them), in index order.
pub fn all_matrices(ctx: &FieldCtx, d: usize) -> impl Iterator<Item = FqMat> + '_ {
    let q = ctx.q();
    let cells = d * d;
    let total = (q as u64).pow(cells as u32);
    (0..total).map(move |mut idx| {
        let mut m = FqMat::zeros(d, d);
        for cell in 0..cells {
            m.data[cell] = FqElem::from_index((idx % q as u64) as usize);
            idx /= q as u64;
        }
        m
    })
}

/// GL_d(k_E) by filtering; fine at desk scale.
pub fn gl_matrices(ctx: &FieldCtx, d: usize) -> Vec<FqMat> {
    all_matrices(ctx, d).filter(|m| m.is_invertible(ctx)).collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMat {
    rows: usize,
    cols: usize,
    prec: usize,
    data: Vec<TruncSeries>,
}

impl SeriesMat {
    pub fn zeros(rows: usize, cols: usize, prec: usize) -> SeriesMat {
        SeriesMat { rows, cols, prec, data: vec![TruncSeries::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: usize) -> SeriesMat {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m.set(i, i, TruncSeries::one(prec));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncSeries) {
        assert_eq!(v.precision(), self.prec);
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, ctx: &FieldCtx, other: &SeriesMat) -> SeriesMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].add(ctx, &other.data[i]);
        }
        out
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &SeriesMat) -> SeriesMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].sub(ctx, &other.data[i]);
        }
        out
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &SeriesMat) -> SeriesMat {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols, self.prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(ctx, &a.mul(ctx, b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Multiply on the right by a scalar matrix over k_E.
    pub fn mul_fq(&self, ctx: &FieldCtx, other: &FqMat) -> SeriesMat {
        assert_eq!(self.cols, other.rows());
        let mut out = Self::zeros(self.rows, other.cols(), self.prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols() {
                    let c = other.get(k, j);
                    if c.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(ctx, &a.scale(ctx, c));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Apply the u -> u^p twist entrywise.
    pub fn phi_twist(&self, ctx: &FieldCtx) -> SeriesMat {
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].phi_twist(ctx);
        }
        out
    }

    pub fn neg(&self, ctx: &FieldCtx) -> SeriesMat {
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].neg(ctx);
        }
        out
    }

    pub fn truncate(&self, prec: usize) -> SeriesMat {
        let mut out = Self::zeros(self.rows, self.cols, prec);
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].truncate(prec);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    /// The matrix of constant terms.
    pub fn constant_term(&self) -> FqMat {
        let mut m = FqMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).coeff(0));
            }
        }
        m
    }

    /// Determinant by cofactor expansion; exact up to the working precision.
    pub fn det(&self, ctx: &FieldCtx) -> TruncSeries {
        assert_eq!(self.rows, self.cols);
        if self.rows == 0 {
            return TruncSeries::one(self.prec);
        }
        if self.rows == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = TruncSeries::zero(self.prec);
        for j in 0..self.cols {
            let e = self.get(0, j);
            if e.is_zero() {
                continue;
            }
            let term = e.mul(ctx, &self.minor(0, j).det(ctx));
            acc = if j % 2 == 0 { acc.add(ctx, &term) } else { acc.sub(ctx, &term) };
        }
        acc
    }

    /// Delete row i and column j.
    pub fn minor(&self, i: usize, j: usize) -> SeriesMat {
        let mut out = Self::zeros(self.rows - 1, self.cols - 1, self.prec);
        let mut r = 0;
        for ii in 0..self.rows {
            if ii == i {
                continue;
            }
            let mut c = 0;
            for jj in 0..self.cols {
                if jj == j {
                    continue;
                }
                out.set(r, c, self.get(ii, jj).clone());
                c += 1;
            }
            r += 1;
        }
        out
    }

    /// Adjugate: adj[i][j] = (-1)^{i+j} det(minor(j, i)).
    pub fn adjugate(&self, ctx: &FieldCtx) -> SeriesMat {
        assert_eq!(self.rows, self.cols);
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.minor(j, i).det(ctx);
                out.set(i, j, if (i + j) % 2 == 0 { d } else { d.neg(ctx) });
            }
        }
        out
    }
}

impl SeriesMat {
    /// Invertible over k_E[[u]]: the constant-term matrix is invertible.
    pub fn is_series_invertible(&self, ctx: &FieldCtx) -> bool {
        self.rows == self.cols && self.constant_term().is_invertible(ctx)
    }

    /// Inverse of a matrix that is invertible over k_E[[u]], mod u^prec.
    pub fn series_inverse(&self, ctx: &FieldCtx) -> Result<SeriesMat> {
        if !self.is_series_invertible(ctx) {
            return Err(Error::InvalidInput(
                "matrix is not invertible over the series ring".into(),
            ));
        }
        let det = self.det(ctx);
        let det_inv = det.unit_inverse(ctx)?;
        let adj = self.adjugate(ctx);
        let mut out = Self::zeros(self.rows, self.cols, self.prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, adj.get(i, j).mul(ctx, &det_inv));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::default_field_poly;

    fn f3() -> FieldCtx {
        FieldCtx::new(3, 1, default_field_poly(3, 1)).unwrap()
    }

    #[test]
    fn gl2_f3_has_48_elements() {
        let k = f3();
        assert_eq!(gl_matrices(&k, 2).len(), 48);
    }

    #[test]
    fn solve_small_system() {
        let k = f3();
        // x + 2y = 1, 2x + y = 2 over F_3
        let a = FqMat::from_rows(&[
            vec![k.from_prime(1), k.from_prime(2)],
            vec![k.from_prime(2), k.from_prime(1)],
        ]);
        let b = vec![k.from_prime(1), k.from_prime(2)];
        let x = solve(&k, &a, &b).unwrap();
        for i in 0..2 {
            let mut acc = FqElem::ZERO;
            for j in 0..2 {
                acc = k.add(acc, k.mul(a.get(i, j), x[j]));
            }
            assert_eq!(acc, b[i]);
        }
        // inconsistent: x + y = 1, x + y = 2
        let a = FqMat::from_rows(&[
            vec![k.from_prime(1), k.from_prime(1)],
            vec![k.from_prime(1), k.from_prime(1)],
        ]);
        assert!(solve(&k, &a, &[k.from_prime(1), k.from_prime(2)]).is_none());
    }

    #[test]
    fn series_inverse_round_trip() {
        let k = f3();
        let prec = 8;
        let mut m = SeriesMat::identity(2, prec);
        m.set(0, 1, TruncSeries::from_prime_coeffs(&k, &[1, 1], prec));
        m.set(1, 1, TruncSeries::from_prime_coeffs(&k, &[1, 0, 2], prec));
        let inv = m.series_inverse(&k).unwrap();
        assert_eq!(m.mul(&k, &inv), SeriesMat::identity(2, prec));
    }

    #[test]
    fn echelon_rank_tracking() {
        let k = f3();
        let mut e = Echelon::new(3);
        assert!(e.add_row(&k, vec![k.from_prime(1), k.from_prime(2), k.from_prime(0)]));
        assert!(!e.add_row(&k, vec![k.from_prime(2), k.from_prime(1), k.from_prime(0)]));
        assert!(e.add_row(&k, vec![k.from_prime(0), k.from_prime(0), k.from_prime(1)]));
        assert_eq!(e.rank(), 2);
    }
}
