//! Weight templates, models, and the decidable uniqueness/sufficiency
//! conditions on them.
//!
//! A model of an ordered list of characters with respect to a template
//! (h_0, ..., h_{f-1}) is a d x f integer matrix whose column s is a
//! permutation of h_s and whose row i has inertia exponent equal to the
//! i-th character's.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::FqElem;
use crate::params::GlobalParams;

/// A character through its complete restriction data: the inertia exponent
/// e mod p^f - 1 and the unramified unit a.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct CharClass {
    pub e: i64,
    pub a: FqElem,
}

impl CharClass {
    pub fn new(params: &GlobalParams, e: i64, a: FqElem) -> Result<CharClass> {
        if a.is_zero() {
            return Err(Error::InvalidInput("unit of a character must be nonzero".into()));
        }
        Ok(CharClass { e: e.rem_euclid(params.residue_modulus()), a })
    }

    /// The character cut out by a weight row and unit.
    pub fn from_weight_row(params: &GlobalParams, t: &[i64], a: FqElem) -> CharClass {
        CharClass { e: params.weighted_residue(t), a }
    }
}

/// Per-embedding weight sets: f sets of d distinct integers in [0, p].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WeightTemplate {
    /// cols[s] is h_s, stored sorted ascending.
    pub cols: Vec<Vec<i64>>,
}

impl WeightTemplate {
    pub fn new(params: &GlobalParams, cols: Vec<Vec<i64>>) -> Result<WeightTemplate> {
        if cols.len() != params.f() {
            return Err(Error::InvalidInput(format!(
                "template has {} columns, expected f = {}",
                cols.len(),
                params.f()
            )));
        }
        let d = cols.first().map_or(0, |c| c.len());
        if d == 0 {
            return Err(Error::InvalidInput("template columns must be nonempty".into()));
        }
        let mut sorted = Vec::with_capacity(cols.len());
        for h in &cols {
            if h.len() != d {
                return Err(Error::InvalidInput("all template columns must share a size".into()));
            }
            let mut hs = h.clone();
            hs.sort_unstable();
            hs.dedup();
            if hs.len() != d {
                return Err(Error::InvalidInput("template entries must be distinct per column".into()));
            }
            if hs[0] < 0 || *hs.last().unwrap() > params.p() {
                return Err(Error::InvalidInput(format!(
                    "template entries must lie in [0, {}]",
                    params.p()
                )));
            }
            sorted.push(hs);
        }
        Ok(WeightTemplate { cols: sorted })
    }

    pub fn d(&self) -> usize {
        self.cols[0].len()
    }

    pub fn f(&self) -> usize {
        self.cols.len()
    }
}

/// A d x f weight matrix; rows are weight strings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Model {
    pub rows: Vec<Vec<i64>>,
}

impl Model {
    pub fn d(&self) -> usize {
        self.rows.len()
    }

    pub fn f(&self) -> usize {
        self.rows[0].len()
    }

    pub fn entry(&self, i: usize, s: usize) -> i64 {
        self.rows[i][s]
    }

    pub fn column(&self, s: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[s]).collect()
    }

    /// Check both defining invariants against chars and template.
    pub fn is_model_of(
        &self,
        params: &GlobalParams,
        chars: &[CharClass],
        template: &WeightTemplate,
    ) -> bool {
        if self.d() != chars.len() || self.f() != template.f() || self.d() != template.d() {
            return false;
        }
        for s in 0..self.f() {
            let mut col = self.column(s);
            col.sort_unstable();
            if col != template.cols[s] {
                return false;
            }
        }
        self.rows
            .iter()
            .zip(chars)
            .all(|(row, ch)| params.weighted_residue(row) == ch.e)
    }
}

/// All models of `chars` with respect to `template`, sorted lexicographically
/// by flattened matrix.
///
/// Backtracking over per-column bijections h_s -> rows, pruning a partial
/// assignment when some row's weighted sum can no longer reach its target
/// residue given the remaining column ranges.
pub fn enumerate_models(
    params: &GlobalParams,
    chars: &[CharClass],
    template: &WeightTemplate,
) -> Result<Vec<Model>> {
    let d = template.d();
    let f = template.f();
    if chars.len() != d {
        return Err(Error::InvalidInput(format!(
            "{} characters for a template of column size {d}",
            chars.len()
        )));
    }
    let p = params.p();
    let modulus = params.residue_modulus();
    let targets: Vec<i64> = chars.iter().map(|c| c.e.rem_euclid(modulus)).collect();

    // rest_min[s] / rest_max[s]: extreme weighted contributions of columns s..f.
    let mut rest_min = vec![0i64; f + 1];
    let mut rest_max = vec![0i64; f + 1];
    for s in (0..f).rev() {
        let w = p.pow((f - 1 - s) as u32);
        rest_min[s] = rest_min[s + 1] + w * template.cols[s][0];
        rest_max[s] = rest_max[s + 1] + w * template.cols[s][d - 1];
    }

    let mut search = ModelSearch {
        modulus,
        template,
        targets,
        rest_min,
        rest_max,
        weights: (0..f).map(|s| p.pow((f - 1 - s) as u32)).collect(),
        partial: vec![0i64; d],
        rows: vec![vec![0i64; f]; d],
        out: Vec::new(),
    };
    search.column(0);
    let mut out = search.out;
    out.sort();
    out.dedup();
    Ok(out)
}

struct ModelSearch<'a> {
    modulus: i64,
    template: &'a WeightTemplate,
    targets: Vec<i64>,
    rest_min: Vec<i64>,
    rest_max: Vec<i64>,
    weights: Vec<i64>,
    partial: Vec<i64>,
    rows: Vec<Vec<i64>>,
    out: Vec<Model>,
}

impl ModelSearch<'_> {
    fn column(&mut self, s: usize) {
        if s == self.template.f() {
            if (0..self.template.d())
                .all(|i| self.partial[i].rem_euclid(self.modulus) == self.targets[i])
            {
                self.out.push(Model { rows: self.rows.clone() });
            }
            return;
        }
        let mut used = vec![false; self.template.d()];
        self.assign(s, 0, &mut used);
    }

    /// Hand row i one of the still-free entries of column s, in value order.
    fn assign(&mut self, s: usize, i: usize, used: &mut Vec<bool>) {
        let d = self.template.d();
        if i == d {
            self.column(s + 1);
            return;
        }
        for k in 0..d {
            if used[k] {
                continue;
            }
            let v = self.template.cols[s][k];
            let new_partial = self.partial[i] + self.weights[s] * v;
            let lo = new_partial + self.rest_min[s + 1];
            let hi = new_partial + self.rest_max[s + 1];
            if !residue_reachable(lo, hi, self.targets[i], self.modulus) {
                continue;
            }
            used[k] = true;
            let old = self.partial[i];
            self.partial[i] = new_partial;
            self.rows[i][s] = v;
            self.assign(s, i + 1, used);
            self.partial[i] = old;
            used[k] = false;
        }
    }
}

/// Is there an x in [lo, hi] with x = target mod modulus?
fn residue_reachable(lo: i64, hi: i64, target: i64, modulus: i64) -> bool {
    let k_hi = num_integer::Integer::div_floor(&(hi - target), &modulus);
    // ceil division for the lower end
    let k_lo = -num_integer::Integer::div_floor(&-(lo - target), &modulus);
    k_hi >= k_lo
}

/// Uniqueness condition: exactly one model exists.
pub fn check_c1(
    params: &GlobalParams,
    chars: &[CharClass],
    template: &WeightTemplate,
) -> Result<(bool, Vec<Model>)> {
    let models = enumerate_models(params, chars, template)?;
    Ok((models.len() == 1, models))
}

fn has_pair_difference(col: &[i64], diff: i64) -> bool {
    col.iter()
        .any(|&x| col.iter().any(|&y| x - y == diff))
}

/// Sufficient conditions for uniqueness. Each case is evaluated in its
/// pairwise-difference form, which is what the uniqueness proof consumes and
/// which stays valid for templates whose columns do not contain 0:
/// 1. f = 1 and no two elements of h_0 differ by p-1;
/// 2. no two elements of any h_s differ by 1, and for some s0 no two
///    elements of h_{s0} differ by p-1;
/// 3. every h_s sits inside [0, p-1], and for some s0 no two elements of
///    h_{s0} differ by p-1.
pub fn c1_sufficient(params: &GlobalParams, template: &WeightTemplate) -> BTreeSet<u8> {
    let p = params.p();
    let mut cases = BTreeSet::new();
    let no_pm1_somewhere = template
        .cols
        .iter()
        .any(|h| !has_pair_difference(h, p - 1));
    if params.f() == 1 && !has_pair_difference(&template.cols[0], p - 1) {
        cases.insert(1);
    }
    if template.cols.iter().all(|h| !has_pair_difference(h, 1)) && no_pm1_somewhere {
        cases.insert(2);
    }
    if template
        .cols
        .iter()
        .all(|h| h.iter().all(|&x| (0..p).contains(&x)))
        && no_pm1_somewhere
    {
        cases.insert(3);
    }
    cases
}

/// The connectivity condition: some embedding's weight set has no pair
/// differing by p-1. Returns the witnessing s0.
pub fn check_c3(params: &GlobalParams, template: &WeightTemplate) -> Option<usize> {
    let p = params.p();
    template
        .cols
        .iter()
        .position(|h| !has_pair_difference(h, p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: i64, f: usize) -> GlobalParams {
        GlobalParams::new(p, f, f, (p + 1) as usize).unwrap()
    }

    fn chars_of_rows(params: &GlobalParams, rows: &[Vec<i64>]) -> Vec<CharClass> {
        rows.iter()
            .map(|r| CharClass::from_weight_row(params, r, FqElem::ONE))
            .collect()
    }

    #[test]
    fn forced_single_row_model() {
        let pr = params(3, 2);
        let template = WeightTemplate::new(&pr, vec![vec![1], vec![2]]).unwrap();
        let chars = chars_of_rows(&pr, &[vec![1, 2]]);
        let models = enumerate_models(&pr, &chars, &template).unwrap();
        assert_eq!(models, vec![Model { rows: vec![vec![1, 2]] }]);
        let (unique, _) = check_c1(&pr, &chars, &template).unwrap();
        assert!(unique);
    }

    #[test]
    fn infeasible_residue_gives_no_models() {
        let pr = params(3, 1);
        let template = WeightTemplate::new(&pr, vec![vec![0, 1]]).unwrap();
        // residue 3 is unreachable: rows take values 0 or 1 mod 2 -> {0, 1}
        // but as a pair they take residues {0,1} in some order; ask for (0,0)
        let chars = vec![
            CharClass::new(&pr, 0, FqElem::ONE).unwrap(),
            CharClass::new(&pr, 0, FqElem::ONE).unwrap(),
        ];
        assert!(enumerate_models(&pr, &chars, &template).unwrap().is_empty());
    }

    #[test]
    fn two_element_template_unique_model() {
        let pr = params(3, 1);
        let template = WeightTemplate::new(&pr, vec![vec![0, 1]]).unwrap();
        let chars = chars_of_rows(&pr, &[vec![0], vec![1]]);
        let (unique, models) = check_c1(&pr, &chars, &template).unwrap();
        assert!(unique);
        assert_eq!(models[0].rows, vec![vec![0], vec![1]]);
    }

    /// The four-row pair of 2-column matrices over p = 5 that share a
    /// template and characters (frozen from the displayed counterexample).
    pub(crate) fn p5_counterexample(
        pr: &GlobalParams,
    ) -> (Vec<CharClass>, WeightTemplate, Model, Model) {
        let n = Model {
            rows: vec![vec![1, 1], vec![4, 5], vec![0, 0], vec![5, 4]],
        };
        let n2 = Model {
            rows: vec![vec![5, 5], vec![0, 1], vec![4, 4], vec![1, 0]],
        };
        let template =
            WeightTemplate::new(pr, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]).unwrap();
        let chars = chars_of_rows(pr, &n.rows);
        (chars, template, n, n2)
    }

    #[test]
    fn counterexample_pair_both_models() {
        let pr = params(5, 2);
        let (chars, template, n, n2) = p5_counterexample(&pr);
        assert!(n.is_model_of(&pr, &chars, &template));
        assert!(n2.is_model_of(&pr, &chars, &template));
        let models = enumerate_models(&pr, &chars, &template).unwrap();
        assert!(models.contains(&n));
        assert!(models.contains(&n2));
        let (unique, _) = check_c1(&pr, &chars, &template).unwrap();
        assert!(!unique);
    }

    #[test]
    fn sufficiency_cases() {
        let pr = params(3, 1);
        let t = WeightTemplate::new(&pr, vec![vec![0, 1]]).unwrap();
        assert_eq!(c1_sufficient(&pr, &t), BTreeSet::from([1, 3]));
        let t = WeightTemplate::new(&pr, vec![vec![0, 2]]).unwrap();
        assert!(c1_sufficient(&pr, &t).is_empty());
        let pr = params(5, 2);
        let t = WeightTemplate::new(&pr, vec![vec![0, 2], vec![0, 2]]).unwrap();
        assert_eq!(c1_sufficient(&pr, &t), BTreeSet::from([2, 3]));
    }

    #[test]
    fn c3_examples() {
        let pr = params(3, 1);
        let t = WeightTemplate::new(&pr, vec![vec![0, 1]]).unwrap();
        assert_eq!(check_c3(&pr, &t), Some(0));
        let pr = params(5, 2);
        let t = WeightTemplate::new(&pr, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]).unwrap();
        assert_eq!(check_c3(&pr, &t), None);
        let t = WeightTemplate::new(&pr, vec![vec![0, 1, 4, 5], vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(check_c3(&pr, &t), Some(1));
    }
}
