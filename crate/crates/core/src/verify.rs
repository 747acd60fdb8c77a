//! The registered verification suites: exhaustive and seeded-random sweeps
//! of the library's structural claims at desk scale. Each suite is pure
//! given its options and reports a deterministic outcome.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ext::{
    block_basis_change, check_upper_bound, ExtProblem,
};
use crate::fq::FqElem;
use crate::matrix::SeriesMat;
use crate::model::{c1_sufficient, check_c3, enumerate_models, CharClass, Model, WeightTemplate};
use crate::params::GlobalParams;
use crate::pls::pls_reachability;
use crate::rank1::{alpha_of_weights, classify_difference, iso_via_alpha, Rank1Kisin};
use crate::serre::{application_conditions, corollary_cases, serre_to_hodge, CycloClass, SerreWeight};
use crate::series::TruncSeries;
use crate::shape::{
    allowable_procedure, normalize_to_diagonal, shapelemma_verify, TriangularKisin, VerifyMode,
};

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SuiteStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub status: SuiteStatus,
    pub cases: u64,
    /// First few failure descriptions, when any.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> SuiteOutcome {
        SuiteOutcome {
            name: name.to_string(),
            status: SuiteStatus::Pass,
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        self.status = SuiteStatus::Fail;
        if self.failures.len() < 16 {
            self.failures.push(msg);
        }
    }

    fn inconclusive(&mut self, msg: String) {
        if self.status == SuiteStatus::Pass {
            self.status = SuiteStatus::Inconclusive;
        }
        self.notes.push(msg);
    }
}

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct SweepOptions {
    pub seed: u64,
    /// Per-suite case budget; suites that would exceed it are reported
    /// inconclusive rather than truncated silently.
    pub budget: u64,
}

impl Default for SweepOptions {
    fn default() -> SweepOptions {
        SweepOptions { seed: 0, budget: 200_000_000 }
    }
}

fn desk_params(p: i64, f: usize) -> GlobalParams {
    GlobalParams::new(p, f, f, (p as usize) * 4 + 4).expect("desk parameters are valid")
}

fn all_weight_vectors(f: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; f];
    loop {
        out.push(cur.clone());
        let mut k = f;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < max {
                cur[k] += 1;
                for v in cur.iter_mut().skip(k + 1) {
                    *v = 0;
                }
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Exhaustive identity p * alpha_{s-1} - alpha_s = t_s over p in {3, 5},
/// f <= 3, all weight strings in [0, p]^f.
pub fn suite_alpha_recurrence(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("alpha-recurrence");
    for p in [3i64, 5] {
        for f in 1..=3usize {
            let params = desk_params(p, f);
            for t in all_weight_vectors(f, p) {
                out.cases += 1;
                let alpha = alpha_of_weights(&params, &t).values;
                for s in 0..f {
                    let prev = alpha[(s + f - 1) % f];
                    let lhs = Ratio::from_integer(p) * prev - alpha[s];
                    if lhs != Ratio::from_integer(t[s]) {
                        out.fail(format!("p={p} f={f} t={t:?} s={s}: recurrence broken"));
                    }
                }
            }
        }
    }
    out
}

/// Every admissible difference vector decomposes and reassembles exactly:
/// p in {3, 5}, f <= 4, all entries in [-p, p] with weighted sum divisible
/// by p^f - 1.
pub fn suite_string_classifier(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("string-classifier");
    for p in [3i64, 5] {
        for f in 1..=4usize {
            let params = desk_params(p, f);
            let modulus = params.residue_modulus();
            // walk [-p, p]^f through an offset of [0, 2p]^f
            for raw in all_weight_vectors(f, 2 * p) {
                let diff: Vec<i64> = raw.iter().map(|&x| x - p).collect();
                let mut acc = 0i64;
                for &d in &diff {
                    acc = (acc * p + d).rem_euclid(modulus);
                }
                if acc != 0 {
                    continue;
                }
                out.cases += 1;
                match classify_difference(&params, &diff) {
                    Ok(dec) => {
                        if dec.reassemble(&params) != diff {
                            out.fail(format!("p={p} f={f} diff={diff:?}: reassembly mismatch"));
                        }
                    }
                    Err(e) => out.fail(format!("p={p} f={f} diff={diff:?}: {e}")),
                }
            }
        }
    }
    out
}

/// The residue criterion and the alpha-integrality criterion agree, and
/// integrality at one component forces it at all: p = 3, f <= 3, all pairs
/// of weight strings in [0, p]^f.
pub fn suite_iso_equivalence(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("iso-criterion-equivalence");
    let p = 3i64;
    for f in 1..=3usize {
        let params = desk_params(p, f);
        let vectors = all_weight_vectors(f, p);
        for t1 in &vectors {
            let n1 = Rank1Kisin::new(&params, t1.clone(), FqElem::ONE).unwrap();
            let a1 = alpha_of_weights(&params, t1).values;
            for t2 in &vectors {
                out.cases += 1;
                let n2 = Rank1Kisin::new(&params, t2.clone(), FqElem::ONE).unwrap();
                let by_residue = crate::rank1::iso_as_g_inf(&params, &n1, &n2);
                let by_alpha = iso_via_alpha(&params, &n1, &n2);
                if by_residue != by_alpha {
                    out.fail(format!("p={p} f={f} t={t1:?} t'={t2:?}: criteria disagree"));
                }
                let a2 = alpha_of_weights(&params, t2).values;
                let integral: Vec<bool> = a1
                    .iter()
                    .zip(&a2)
                    .map(|(x, y)| (x - y).is_integer())
                    .collect();
                if integral.iter().any(|&b| b) != integral.iter().all(|&b| b) {
                    out.fail(format!(
                        "p={p} f={f} t={t1:?} t'={t2:?}: integrality not uniform across components"
                    ));
                }
            }
        }
    }
    out
}

fn sorted_subsets(range_max: i64, d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: i64, range_max: i64, d: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for v in start..=range_max {
            cur.push(v);
            rec(v + 1, range_max, d, cur, out);
            cur.pop();
        }
    }
    rec(0, range_max, d, &mut cur, &mut out);
    out
}

fn cartesian_templates(cols: &[Vec<i64>], f: usize) -> Vec<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for _ in 0..f {
        let mut next = Vec::new();
        for partial in &out {
            for col in cols {
                let mut t = partial.clone();
                t.push(col.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// All residue vectors realized by column-assignment matrices of a template,
/// together with one realizing matrix each.
fn realizable_char_vectors(
    params: &GlobalParams,
    template: &WeightTemplate,
) -> Vec<Vec<i64>> {
    use itertools::Itertools;
    let d = template.d();
    let f = template.f();
    let mut vectors: BTreeSet<Vec<i64>> = BTreeSet::new();
    let column_perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
    let mut counters = vec![0usize; f];
    loop {
        let mut rows = vec![vec![0i64; f]; d];
        for s in 0..f {
            let perm = &column_perms[counters[s]];
            for i in 0..d {
                rows[i][s] = template.cols[s][perm[i]];
            }
        }
        vectors.insert(
            rows.iter().map(|r| params.weighted_residue(r)).collect(),
        );
        // advance
        let mut k = 0;
        loop {
            if k == f {
                return vectors.into_iter().collect();
            }
            counters[k] += 1;
            if counters[k] < column_perms.len() {
                break;
            }
            counters[k] = 0;
            k += 1;
        }
    }
}

/// Templates passing any sufficiency case have exactly one model for every
/// realizable character list: p = 3, f <= 2, d <= 3, columns inside [0, p].
pub fn suite_c1_sufficiency(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("uniqueness-sufficiency");
    let p = 3i64;
    for f in 1..=2usize {
        let params = desk_params(p, f);
        for d in 1..=3usize {
            let cols = sorted_subsets(p, d);
            for raw in cartesian_templates(&cols, f) {
                let template = WeightTemplate::new(&params, raw).unwrap();
                let cases = c1_sufficient(&params, &template);
                if cases.is_empty() {
                    continue;
                }
                for residues in realizable_char_vectors(&params, &template) {
                    out.cases += 1;
                    let chars: Vec<CharClass> = residues
                        .iter()
                        .map(|&e| CharClass { e, a: FqElem::ONE })
                        .collect();
                    match enumerate_models(&params, &chars, &template) {
                        Ok(models) if models.len() == 1 => {}
                        Ok(models) => out.fail(format!(
                            "f={f} template={:?} residues={residues:?}: {} models under cases {cases:?}",
                            template.cols,
                            models.len()
                        )),
                        Err(e) => out.fail(format!("enumeration error: {e}")),
                    }
                }
            }
        }
    }
    out
}

/// The divisibility hypothesis forces the monomial shape: exhaustive d = 2
/// over F_3 and F_5 for all distinct weight pairs in [0, p]; seeded random
/// d = 3 sweeps over F_3 (10^4 trials spread over the weight triples).
pub fn suite_shape_lemma(opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("shape-lemma");
    let mut saw_last_max = false;
    let mut saw_first_max = false;
    let mut total_hits = 0u64;
    for p in [3i64, 5] {
        let params = desk_params(p, 1);
        for t1 in 0..=p {
            for t2 in 0..=p {
                if t1 == t2 {
                    continue;
                }
                match shapelemma_verify(
                    &params,
                    &[t1, t2],
                    VerifyMode::Exhaustive,
                    opts.budget,
                    opts.seed,
                ) {
                    Ok(report) => {
                        out.cases += report.cases_examined;
                        total_hits += report.hypothesis_hits;
                        match report.tag {
                            crate::shape::SublemmaTag::MaxAtLast => saw_last_max = true,
                            crate::shape::SublemmaTag::MaxAtFirst => saw_first_max = true,
                            crate::shape::SublemmaTag::MaxInterior => {}
                        }
                        if !report.counterexamples.is_empty() {
                            out.fail(format!(
                                "p={p} t=({t1},{t2}): {} counterexamples",
                                report.counterexamples.len()
                            ));
                        }
                    }
                    Err(Error::Budget { examined, total }) => {
                        out.cases += examined;
                        out.inconclusive(format!(
                            "p={p} t=({t1},{t2}): budget hit after {examined} of {total}"
                        ));
                    }
                    Err(e) => out.fail(format!("p={p} t=({t1},{t2}): {e}")),
                }
            }
        }
    }
    // randomized d = 3 over F_3
    let params = desk_params(3, 1);
    let triples: Vec<Vec<i64>> = {
        let mut v = Vec::new();
        for a in 0..=3i64 {
            for b in 0..=3i64 {
                for c in 0..=3i64 {
                    if a != b && a != c && b != c {
                        v.push(vec![a, b, c]);
                    }
                }
            }
        }
        v
    };
    let per_triple = 10_000u64 / triples.len() as u64 + 1;
    for (k, t) in triples.iter().enumerate() {
        match shapelemma_verify(
            &params,
            t,
            VerifyMode::Randomized { trials: per_triple },
            opts.budget,
            opts.seed.wrapping_add(k as u64),
        ) {
            Ok(report) => {
                out.cases += report.cases_examined;
                if !report.counterexamples.is_empty() {
                    out.fail(format!("d=3 t={t:?}: counterexample found"));
                }
            }
            Err(e) => out.fail(format!("d=3 t={t:?}: {e}")),
        }
    }
    if !(saw_last_max && saw_first_max) {
        out.fail("sweep failed to cover both boundary-maximum configurations".into());
    }
    if total_hits == 0 {
        out.fail("the divisibility hypothesis never held: the sweep is vacuous".into());
    }
    out
}

fn random_monomial_shape_instance(
    params: &GlobalParams,
    rng: &mut ChaCha8Rng,
    d: usize,
) -> TriangularKisin {
    let ctx = params.field();
    let p = params.p();
    let f = params.f();
    let n = params.n();
    let t: Vec<Vec<i64>> = (0..d)
        .map(|_| (0..f).map(|_| rng.gen_range(0..=p)).collect())
        .collect();
    let units: Vec<FqElem> = (0..d)
        .map(|_| FqElem::from_index(rng.gen_range(1..ctx.q())))
        .collect();
    let mut m = TriangularKisin::diagonal(params, t, units).expect("valid weights");
    for s in 0..f {
        for i in 0..d {
            for j in (i + 1)..d {
                if m.weight(j, s) > m.weight(i, s) {
                    let y = FqElem::from_index(rng.gen_range(0..ctx.q()));
                    if !y.is_zero() {
                        m.set_entry(s, i, j, TruncSeries::monomial(y, m.weight(i, s) as usize, n))
                            .unwrap();
                    }
                }
            }
        }
    }
    m
}

/// Normalization round trip on random monomial-shape instances over F_3,
/// ranks up to 4: replaying the inverse moves in reverse order restores the
/// input exactly.
pub fn suite_normalization_roundtrip(opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("normalization-roundtrip");
    let params = desk_params(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(6));
    for trial in 0..1000u64 {
        out.cases += 1;
        let d = rng.gen_range(1..=4usize);
        let m = random_monomial_shape_instance(&params, &mut rng, d);
        match normalize_to_diagonal(&params, &m) {
            Ok((diag, moves)) => {
                let mut replay = m.clone();
                for mv in &moves {
                    replay = match allowable_procedure(&params, &replay, mv) {
                        Ok(next) => next,
                        Err(e) => {
                            out.fail(format!("trial {trial}: replay error {e}"));
                            break;
                        }
                    };
                }
                if replay != diag {
                    out.fail(format!("trial {trial}: replay does not match the output"));
                }
                let mut undo = diag;
                for mv in moves.iter().rev() {
                    undo = match allowable_procedure(&params, &undo, &mv.inverse(&params)) {
                        Ok(next) => next,
                        Err(e) => {
                            out.fail(format!("trial {trial}: undo error {e}"));
                            break;
                        }
                    };
                }
                if undo != m {
                    out.fail(format!("trial {trial}: inverse replay does not restore the input"));
                }
            }
            Err(e) => out.fail(format!("trial {trial}: {e}")),
        }
    }
    out
}

fn random_series(params: &GlobalParams, rng: &mut ChaCha8Rng, max_deg: usize) -> TruncSeries {
    let ctx = params.field();
    let n = params.n();
    let coeffs: Vec<FqElem> = (0..max_deg.min(n))
        .map(|_| FqElem::from_index(rng.gen_range(0..ctx.q())))
        .collect();
    TruncSeries::from_coeffs(&coeffs, n)
}

fn random_triangular(
    params: &GlobalParams,
    rng: &mut ChaCha8Rng,
    d: usize,
) -> TriangularKisin {
    let ctx = params.field();
    let p = params.p();
    let t: Vec<Vec<i64>> = (0..d)
        .map(|_| (0..params.f()).map(|_| rng.gen_range(0..=p)).collect())
        .collect();
    let units: Vec<FqElem> = (0..d)
        .map(|_| FqElem::from_index(rng.gen_range(1..ctx.q())))
        .collect();
    let mut m = TriangularKisin::diagonal(params, t, units).expect("valid weights");
    for s in 0..params.f() {
        for i in 0..d {
            for j in (i + 1)..d {
                let e = random_series(params, rng, (p + 1) as usize);
                m.set_entry(s, i, j, e).unwrap();
            }
        }
    }
    m
}

/// The componentwise base-change formula agrees with explicit block
/// conjugation on random instances.
pub fn suite_basis_change_conjugation(opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("basis-change-conjugation");
    for f in 1..=2usize {
        let params = desk_params(3, f);
        let ctx = params.field();
        let n = params.n();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(7 + f as u64));
        for trial in 0..500u64 {
            out.cases += 1;
            let k = rng.gen_range(1..=2usize);
            let kp = rng.gen_range(1..=2usize);
            let sub = random_triangular(&params, &mut rng, k);
            let quot = random_triangular(&params, &mut rng, kp);
            let prob = ExtProblem::new(&params, sub, quot).unwrap();
            let mut c = Vec::new();
            let mut w = Vec::new();
            for _ in 0..f {
                let mut cm = SeriesMat::zeros(k, kp, n);
                let mut wm = SeriesMat::zeros(k, kp, n);
                for i in 0..k {
                    for j in 0..kp {
                        cm.set(i, j, random_series(&params, &mut rng, 6));
                        wm.set(i, j, random_series(&params, &mut rng, 6));
                    }
                }
                c.push(cm);
                w.push(wm);
            }
            let moved = block_basis_change(&params, &prob, &c, &w).unwrap();
            // conjugation oracle on the assembled block matrices
            for s in 0..f {
                let prev = (s + f - 1) % f;
                let dtot = k + kp;
                let mut block = SeriesMat::zeros(dtot, dtot, n);
                for i in 0..k {
                    for j in 0..k {
                        block.set(i, j, prob.sub.mat(s).get(i, j).clone());
                    }
                    for j in 0..kp {
                        block.set(i, k + j, c[s].get(i, j).clone());
                    }
                }
                for i in 0..kp {
                    for j in 0..kp {
                        block.set(k + i, k + j, prob.quot.mat(s).get(i, j).clone());
                    }
                }
                let mut left = SeriesMat::identity(dtot, n);
                let mut right = SeriesMat::identity(dtot, n);
                for i in 0..k {
                    for j in 0..kp {
                        left.set(i, k + j, w[s].get(i, j).neg(ctx));
                        right.set(i, k + j, w[prev].get(i, j).phi_twist(ctx));
                    }
                }
                let conj = left.mul(ctx, &block).mul(ctx, &right);
                for i in 0..k {
                    for j in 0..kp {
                        if conj.get(i, k + j) != moved[s].get(i, j) {
                            out.fail(format!(
                                "trial {trial} f={f} s={s}: conjugation disagrees at ({i},{j})"
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

fn distinct_tuples(range_max: i64, d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(range_max: i64, d: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for v in 0..=range_max {
            if cur.contains(&v) {
                continue;
            }
            cur.push(v);
            rec(range_max, d, cur, out);
            cur.pop();
        }
    }
    rec(range_max, d, &mut cur, &mut out);
    out
}

/// The monomial-shape extension dimension stays below the weight-excess
/// count on an exhaustive sweep of rank-1-sub problems (p = 3, f <= 2,
/// total rank <= 3) with distinct per-column weights and no morphisms
/// between the rank-1 rows; every instance must certify stably.
pub fn suite_ext_dimension_bound(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("ext-dimension-bound");
    for f in 1..=2usize {
        for d in 2..=3usize {
            let p = 3i64;
            let n = (p as usize) * d * (p as usize + 1);
            let params = GlobalParams::new(p, f, f, n).expect("valid parameters");
            let ctx = params.field();
            let columns = distinct_tuples(p, d);
            let mut col_choice = vec![0usize; f];
            loop {
                // weights[i][s] from the chosen column tuples
                let t: Vec<Vec<i64>> = (0..d)
                    .map(|i| (0..f).map(|s| columns[col_choice[s]][i]).collect())
                    .collect();
                for units_kind in 0..2 {
                    let units: Vec<FqElem> = (0..d)
                        .map(|i| {
                            if units_kind == 0 {
                                FqElem::ONE
                            } else {
                                FqElem::from_index(1 + (i % (ctx.q() - 1)))
                            }
                        })
                        .collect();
                    let rows: Vec<Rank1Kisin> = (0..d)
                        .map(|i| Rank1Kisin::new(&params, t[i].clone(), units[i]).unwrap())
                        .collect();
                    let no_homs = (0..d).all(|i| {
                        ((i + 1)..d).all(|j| !crate::rank1::hom_exists(&params, &rows[j], &rows[i]))
                    });
                    if !no_homs {
                        continue;
                    }
                    for quot_kind in 0..2 {
                        let sub = TriangularKisin::diagonal(
                            &params,
                            vec![t[0].clone()],
                            vec![units[0]],
                        )
                        .unwrap();
                        let mut quot = TriangularKisin::diagonal(
                            &params,
                            t[1..].to_vec(),
                            units[1..].to_vec(),
                        )
                        .unwrap();
                        if quot_kind == 1 && d == 3 {
                            let mut touched = false;
                            for s in 0..f {
                                if quot.weight(1, s) > quot.weight(0, s) {
                                    let deg = quot.weight(0, s) as usize;
                                    quot.set_entry(
                                        s,
                                        0,
                                        1,
                                        TruncSeries::monomial(FqElem::ONE, deg, n),
                                    )
                                    .unwrap();
                                    touched = true;
                                }
                            }
                            if !touched {
                                continue;
                            }
                        } else if quot_kind == 1 {
                            continue;
                        }
                        out.cases += 1;
                        let prob = ExtProblem::new(&params, sub, quot).unwrap();
                        match check_upper_bound(&params, &prob) {
                            Ok(report) => {
                                if !report.holds {
                                    out.fail(format!(
                                        "f={f} t={t:?} units_kind={units_kind}: dim {} > bound {}",
                                        report.dim, report.d_nek
                                    ));
                                }
                            }
                            Err(e) => out.fail(format!(
                                "f={f} t={t:?} units_kind={units_kind} quot_kind={quot_kind}: {e}"
                            )),
                        }
                    }
                }
                // advance column choice
                let mut k = 0;
                loop {
                    if k == f {
                        break;
                    }
                    col_choice[k] += 1;
                    if col_choice[k] < columns.len() {
                        break;
                    }
                    col_choice[k] = 0;
                    k += 1;
                }
                if k == f {
                    break;
                }
            }
        }
    }
    out
}

/// The two frozen model pairs stay unreachable, and every small instance
/// with the connectivity condition has a single component: p in {3, 5},
/// f <= 2, d <= 4.
pub fn suite_pls_regression(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("swap-connectivity");

    // frozen pair 1: 4 x 2 over p = 5
    let params = desk_params(5, 2);
    let n1 = Model { rows: vec![vec![1, 1], vec![4, 5], vec![0, 0], vec![5, 4]] };
    let n2 = Model { rows: vec![vec![5, 5], vec![0, 1], vec![4, 4], vec![1, 0]] };
    let template =
        WeightTemplate::new(&params, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]).unwrap();
    let chars: Vec<CharClass> = n1
        .rows
        .iter()
        .map(|r| CharClass::from_weight_row(&params, r, FqElem::ONE))
        .collect();
    out.cases += 1;
    match pls_reachability(&params, &chars, &template) {
        Ok(components) => {
            let find = |m: &Model| components.iter().position(|c| c.contains(m));
            match (find(&n1), find(&n2)) {
                (Some(c1), Some(c2)) if c1 != c2 => {}
                (Some(c1), Some(c2)) => {
                    out.fail(format!("pair 1 connected (components {c1} = {c2})"))
                }
                _ => out.fail("pair 1: a frozen model is missing from the set".into()),
            }
        }
        Err(e) => out.fail(format!("pair 1: {e}")),
    }

    // frozen pair 2: 3 x 4 over p = 5 with two free entries. b = 0 is left
    // out of the disconnection sweep: it makes row2 - row3 end in (.., 4, 5),
    // an extra (-1, p-1, p) segment unrelated to the pair's difference
    // matrix, and the models then do connect (checked separately below).
    let params4 = desk_params(5, 4);
    for a in [1i64, 2, 3, 5] {
        for b in [2i64, 3, 4] {
            out.cases += 1;
            let m1 = Model {
                rows: vec![vec![0, 0, 5, 1], vec![4, 4, 4, 5], vec![a, 5, 0, b]],
            };
            let m2 = Model {
                rows: vec![vec![4, 5, 4, 5], vec![0, 0, 0, 1], vec![a, 4, 5, b]],
            };
            let cols: Vec<Vec<i64>> = (0..4).map(|s| m1.column(s)).collect();
            let template = match WeightTemplate::new(&params4, cols) {
                Ok(t) => t,
                Err(e) => {
                    out.fail(format!("pair 2 (a={a}, b={b}): bad template: {e}"));
                    continue;
                }
            };
            let chars: Vec<CharClass> = m1
                .rows
                .iter()
                .map(|r| CharClass::from_weight_row(&params4, r, FqElem::ONE))
                .collect();
            if !m1.is_model_of(&params4, &chars, &template)
                || !m2.is_model_of(&params4, &chars, &template)
            {
                out.fail(format!("pair 2 (a={a}, b={b}): frozen matrices are not both models"));
                continue;
            }
            match pls_reachability(&params4, &chars, &template) {
                Ok(components) => {
                    let find = |m: &Model| components.iter().position(|c| c.contains(m));
                    match (find(&m1), find(&m2)) {
                        (Some(c1), Some(c2)) if c1 != c2 => {}
                        (Some(_), Some(_)) => {
                            out.fail(format!("pair 2 (a={a}, b={b}): pair is connected"))
                        }
                        _ => out.fail(format!("pair 2 (a={a}, b={b}): model missing")),
                    }
                }
                Err(e) => out.fail(format!("pair 2 (a={a}, b={b}): {e}")),
            }
        }
    }
    // the b = 0 coincidence connects the pair through three swaps
    {
        out.cases += 1;
        let (a, b) = (1i64, 0i64);
        let m1 = Model {
            rows: vec![vec![0, 0, 5, 1], vec![4, 4, 4, 5], vec![a, 5, 0, b]],
        };
        let m2 = Model {
            rows: vec![vec![4, 5, 4, 5], vec![0, 0, 0, 1], vec![a, 4, 5, b]],
        };
        let cols: Vec<Vec<i64>> = (0..4).map(|s| m1.column(s)).collect();
        let template = WeightTemplate::new(&params4, cols).unwrap();
        let chars: Vec<CharClass> = m1
            .rows
            .iter()
            .map(|r| CharClass::from_weight_row(&params4, r, FqElem::ONE))
            .collect();
        match pls_reachability(&params4, &chars, &template) {
            Ok(components) => {
                let same = components
                    .iter()
                    .any(|c| c.contains(&m1) && c.contains(&m2));
                if !same {
                    out.fail("pair 2 (a=1, b=0): expected the coincidence to connect".into());
                }
            }
            Err(e) => out.fail(format!("pair 2 (a=1, b=0): {e}")),
        }
    }

    // exhaustive connectivity under the difference condition
    for p in [3i64, 5] {
        for f in 1..=2usize {
            let params = desk_params(p, f);
            for d in 1..=4usize {
                if d as i64 > p + 1 {
                    continue;
                }
                let cols = sorted_subsets(p, d);
                for raw in cartesian_templates(&cols, f) {
                    let template = WeightTemplate::new(&params, raw).unwrap();
                    if check_c3(&params, &template).is_none() {
                        continue;
                    }
                    for residues in realizable_char_vectors(&params, &template) {
                        out.cases += 1;
                        let chars: Vec<CharClass> = residues
                            .iter()
                            .map(|&e| CharClass { e, a: FqElem::ONE })
                            .collect();
                        match pls_reachability(&params, &chars, &template) {
                            Ok(components) => {
                                if components.len() != 1 {
                                    out.fail(format!(
                                        "p={p} f={f} template={:?} residues={residues:?}: {} components",
                                        template.cols,
                                        components.len()
                                    ));
                                }
                            }
                            Err(e) => out.fail(format!("p={p} f={f}: {e}")),
                        }
                    }
                }
            }
        }
    }
    out
}

fn decreasing_rows(max: i64, d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(max: i64, d: usize, floor: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        let hi = cur.last().copied().unwrap_or(max);
        for v in (floor..=hi).rev() {
            cur.push(v);
            rec(max, d, floor, cur, out);
            cur.pop();
        }
    }
    rec(max, d, 0, &mut cur, &mut out);
    out
}

/// The shifted-weight conditions match the template conditions through the
/// weight-to-type translation: exhaustive over p = 5, d <= 3, f <= 2,
/// entries in [0, p-1], with and without characters.
pub fn suite_gate_consistency(_opts: &SweepOptions) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("gate-consistency");
    let p = 5i64;
    for f in 1..=2usize {
        let params = desk_params(p, f);
        let ctx = params.field();
        let cyc = CycloClass::standard(&params);
        for d in 1..=3usize {
            let rows = decreasing_rows(p - 1, d);
            // chars: None, a ratio-avoiding list, and a violating list
            let good: Vec<CharClass> = (0..d)
                .map(|i| CharClass { e: 0, a: FqElem::from_index(1 + (i % (ctx.q() - 1))) })
                .collect();
            let bad: Vec<CharClass> =
                (0..d).map(|_| CharClass { e: 0, a: FqElem::ONE }).collect();
            let mut row_choice = vec![0usize; f];
            loop {
                let weight_rows: Vec<Vec<i64>> =
                    row_choice.iter().map(|&k| rows[k].clone()).collect();
                let w = SerreWeight::new(&params, weight_rows).unwrap();
                let hodge = serre_to_hodge(&w);
                for chars in [None, Some(good.as_slice()), Some(bad.as_slice())] {
                    out.cases += 1;
                    let via_weight = application_conditions(&params, &w, chars, &cyc);
                    let via_template = corollary_cases(&params, &hodge, chars, &cyc);
                    match (via_weight, via_template) {
                        (Ok(x), Ok(y)) => {
                            if x != y {
                                out.fail(format!(
                                    "f={f} rows={:?} chars={}: {x:?} vs {y:?}",
                                    w.rows,
                                    chars.map_or("none", |_| "some")
                                ));
                            }
                        }
                        (Err(e), _) | (_, Err(e)) => out.fail(format!("gate error: {e}")),
                    }
                }
                let mut k = 0;
                loop {
                    if k == f {
                        break;
                    }
                    row_choice[k] += 1;
                    if row_choice[k] < rows.len() {
                        break;
                    }
                    row_choice[k] = 0;
                    k += 1;
                }
                if k == f {
                    break;
                }
            }
        }
    }
    out
}

/// Names of the registered desk-scale suites, in acceptance order.
pub fn desk_suite_names() -> Vec<&'static str> {
    vec![
        "alpha-recurrence",
        "string-classifier",
        "iso-criterion-equivalence",
        "uniqueness-sufficiency",
        "shape-lemma",
        "normalization-roundtrip",
        "basis-change-conjugation",
        "ext-dimension-bound",
        "swap-connectivity",
        "gate-consistency",
    ]
}

/// The registered desk-scale suites, in acceptance order.
pub fn desk_suites(opts: &SweepOptions) -> Vec<SuiteOutcome> {
    vec![
        suite_alpha_recurrence(opts),
        suite_string_classifier(opts),
        suite_iso_equivalence(opts),
        suite_c1_sufficiency(opts),
        suite_shape_lemma(opts),
        suite_normalization_roundtrip(opts),
        suite_basis_change_conjugation(opts),
        suite_ext_dimension_bound(opts),
        suite_pls_regression(opts),
        suite_gate_consistency(opts),
    ]
}

/// A deliberately failing suite, used to exercise the harness end to end.
pub fn selftest_failing_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::new("selftest-falsified");
    out.cases = 1;
    out.fail("intentional fixture failure".into());
    out
}
