//! Structural invariants checked over random inputs: twist and valuation
//! multiplicativity, linearity of the twisted map, action composition of
//! base changes, column preservation under swaps, and enumeration
//! consistency under re-indexing.

use proptest::prelude::*;

use kisin_core::ext::{block_basis_change, ext_dim, twisted_image, ExtProblem, ShapeTag};
use kisin_core::matrix::SeriesMat;
use kisin_core::model::{enumerate_models, CharClass, WeightTemplate};
use kisin_core::pls::{pls_apply, pls_moves};
use kisin_core::series::LaurentVal;
use kisin_core::shape::{allowable_procedure, classify_shape, AllowableMove, TriangularKisin};
use kisin_core::{FqElem, GlobalParams, TruncSeries};

fn params_f3(n: usize) -> GlobalParams {
    GlobalParams::new(3, 1, 1, n).unwrap()
}

fn series_strategy(n: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..3, n)
}

proptest! {
    #[test]
    fn twist_is_multiplicative(a in series_strategy(18), b in series_strategy(18)) {
        let pr = params_f3(18);
        let ctx = pr.field();
        let sa = TruncSeries::from_prime_coeffs(ctx, &a, 18);
        let sb = TruncSeries::from_prime_coeffs(ctx, &b, 18);
        let lhs = sa.mul(ctx, &sb).phi_twist(ctx);
        let rhs = sa.phi_twist(ctx).mul(ctx, &sb.phi_twist(ctx));
        // agreement at least up to floor(N / p)
        let bound = 18 / 3;
        prop_assert_eq!(lhs.truncate(bound), rhs.truncate(bound));
    }

    #[test]
    fn valuations_add_under_product(a in series_strategy(16), b in series_strategy(16)) {
        let pr = params_f3(16);
        let ctx = pr.field();
        let sa = TruncSeries::from_prime_coeffs(ctx, &a, 16);
        let sb = TruncSeries::from_prime_coeffs(ctx, &b, 16);
        if let (LaurentVal::Finite(va), LaurentVal::Finite(vb)) = (sa.val(), sb.val()) {
            if va + vb < 16 {
                // the product of the leading terms cannot cancel in a domain
                prop_assert_eq!(sa.mul(ctx, &sb).val(), LaurentVal::Finite(va + vb));
            }
        }
    }

    #[test]
    fn unit_inverse_is_two_sided(mut a in series_strategy(12)) {
        let pr = params_f3(12);
        let ctx = pr.field();
        a[0] = 1 + (a[0].rem_euclid(2)); // force a unit constant term
        let s = TruncSeries::from_prime_coeffs(ctx, &a, 12);
        let inv = s.unit_inverse(ctx).unwrap();
        prop_assert_eq!(s.mul(ctx, &inv), TruncSeries::one(12));
        prop_assert_eq!(inv.mul(ctx, &s), TruncSeries::one(12));
    }
}

fn small_prob(pr: &GlobalParams, t_sub: i64, t_quot: i64) -> ExtProblem {
    let sub = TriangularKisin::diagonal(pr, vec![vec![t_sub]], vec![FqElem::ONE]).unwrap();
    let quot = TriangularKisin::diagonal(pr, vec![vec![t_quot]], vec![FqElem::ONE]).unwrap();
    ExtProblem::new(pr, sub, quot).unwrap()
}

fn one_by_one(pr: &GlobalParams, coeffs: &[i64]) -> Vec<SeriesMat> {
    let ctx = pr.field();
    let mut m = SeriesMat::zeros(1, 1, pr.n());
    m.set(0, 0, TruncSeries::from_prime_coeffs(ctx, coeffs, pr.n()));
    vec![m]
}

proptest! {
    #[test]
    fn basis_change_is_an_action(
        c in series_strategy(8),
        w1 in series_strategy(8),
        w2 in series_strategy(8),
        t_sub in 0i64..4,
        t_quot in 0i64..4,
    ) {
        let pr = params_f3(16);
        let ctx = pr.field();
        let prob = small_prob(&pr, t_sub, t_quot);
        let c = one_by_one(&pr, &c);
        let w1 = one_by_one(&pr, &w1);
        let w2 = one_by_one(&pr, &w2);
        let step = block_basis_change(&pr, &prob, &c, &w1).unwrap();
        let two_steps = block_basis_change(&pr, &prob, &step, &w2).unwrap();
        let combined: Vec<SeriesMat> = w1.iter().zip(&w2).map(|(x, y)| x.add(ctx, y)).collect();
        let direct = block_basis_change(&pr, &prob, &c, &combined).unwrap();
        prop_assert_eq!(two_steps, direct);
    }

    #[test]
    fn twisted_map_is_linear(
        w1 in series_strategy(8),
        w2 in series_strategy(8),
        scalar in 0i64..3,
        t_sub in 0i64..4,
        t_quot in 0i64..4,
    ) {
        let pr = params_f3(16);
        let ctx = pr.field();
        let prob = small_prob(&pr, t_sub, t_quot);
        let w1 = one_by_one(&pr, &w1);
        let w2 = one_by_one(&pr, &w2);
        let c = ctx.from_prime(scalar);
        // L(c w1 + w2) = c L(w1) + L(w2)
        let mixed: Vec<SeriesMat> = w1
            .iter()
            .zip(&w2)
            .map(|(x, y)| {
                let mut m = SeriesMat::zeros(1, 1, pr.n());
                m.set(0, 0, x.get(0, 0).scale(ctx, c).add(ctx, y.get(0, 0)));
                m
            })
            .collect();
        let lhs = twisted_image(&pr, &prob, &mixed).unwrap();
        let l1 = twisted_image(&pr, &prob, &w1).unwrap();
        let l2 = twisted_image(&pr, &prob, &w2).unwrap();
        for s in 0..1 {
            let expect = l1[s].get(0, 0).scale(ctx, c).add(ctx, l2[s].get(0, 0));
            prop_assert_eq!(lhs[s].get(0, 0), &expect);
        }
    }
}

#[test]
fn swaps_preserve_columns() {
    let pr = GlobalParams::new(3, 2, 2, 8).unwrap();
    let instances = [
        (vec![vec![0i64, 1], vec![0, 3]], vec![3i64, 3]), // hook-linked pair
        (vec![vec![0, 2], vec![0, 2]], vec![0, 0]),       // constant-linked pair
    ];
    let mut seen_moves = 0;
    for (cols, residues) in instances {
        let template = WeightTemplate::new(&pr, cols).unwrap();
        let chars: Vec<CharClass> = residues
            .iter()
            .map(|&e| CharClass { e, a: FqElem::ONE })
            .collect();
        let models = enumerate_models(&pr, &chars, &template).unwrap();
        assert_eq!(models.len(), 2);
        for model in models {
            for mv in pls_moves(&pr, &model) {
                seen_moves += 1;
                let next = pls_apply(&pr, &model, &mv).unwrap();
                for s in 0..2 {
                    let mut before = model.column(s);
                    let mut after = next.column(s);
                    before.sort_unstable();
                    after.sort_unstable();
                    assert_eq!(before, after);
                }
            }
        }
    }
    assert!(seen_moves > 0);
}

/// Completeness oracle for the backtracking enumerator: filter every
/// per-column permutation matrix by the row residues and compare.
#[test]
fn enumeration_matches_brute_force() {
    use itertools::Itertools;
    for (p, f, cols) in [
        (3i64, 1usize, vec![vec![0i64, 1, 2]]),
        (3, 2, vec![vec![0, 1, 3], vec![0, 2, 3]]),
        (5, 2, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]),
    ] {
        let pr = GlobalParams::new(p, f, f, (p as usize) + 3).unwrap();
        let template = WeightTemplate::new(&pr, cols).unwrap();
        let d = template.d();
        let perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
        // brute force: all per-column assignments, grouped by residue vector
        let mut by_residues: std::collections::BTreeMap<Vec<i64>, Vec<Vec<Vec<i64>>>> =
            Default::default();
        let mut choice = vec![0usize; f];
        loop {
            let rows: Vec<Vec<i64>> = (0..d)
                .map(|i| (0..f).map(|s| template.cols[s][perms[choice[s]][i]]).collect())
                .collect();
            let key: Vec<i64> = rows.iter().map(|r| pr.weighted_residue(r)).collect();
            by_residues.entry(key).or_default().push(rows);
            let mut k = 0;
            while k < f {
                choice[k] += 1;
                if choice[k] < perms.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == f {
                break;
            }
        }
        for (residues, mut expected) in by_residues {
            expected.sort();
            expected.dedup();
            let chars: Vec<CharClass> = residues
                .iter()
                .map(|&e| CharClass { e, a: FqElem::ONE })
                .collect();
            let got: Vec<Vec<Vec<i64>>> = enumerate_models(&pr, &chars, &template)
                .unwrap()
                .into_iter()
                .map(|m| m.rows)
                .collect();
            assert_eq!(got, expected, "p={p} f={f} residues={residues:?}");
        }
    }
}

#[test]
fn enumeration_count_is_reindexing_invariant() {
    let pr = GlobalParams::new(5, 2, 2, 8).unwrap();
    let template =
        WeightTemplate::new(&pr, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]).unwrap();
    let rows = [vec![1i64, 1], vec![4, 5], vec![0, 0], vec![5, 4]];
    let chars: Vec<CharClass> = rows
        .iter()
        .map(|r| CharClass::from_weight_row(&pr, r, FqElem::ONE))
        .collect();
    let baseline = enumerate_models(&pr, &chars, &template).unwrap().len();
    // permute the character list: the model count is preserved
    let perm = [2usize, 0, 3, 1];
    let permuted: Vec<CharClass> = perm.iter().map(|&i| chars[i]).collect();
    let permuted_count = enumerate_models(&pr, &permuted, &template).unwrap().len();
    assert_eq!(baseline, permuted_count);
}

#[test]
fn models_satisfy_their_invariants() {
    let pr = GlobalParams::new(5, 2, 2, 8).unwrap();
    let template =
        WeightTemplate::new(&pr, vec![vec![0, 1, 4, 5], vec![0, 1, 4, 5]]).unwrap();
    let rows = [vec![1i64, 1], vec![4, 5], vec![0, 0], vec![5, 4]];
    let chars: Vec<CharClass> = rows
        .iter()
        .map(|r| CharClass::from_weight_row(&pr, r, FqElem::ONE))
        .collect();
    let models = enumerate_models(&pr, &chars, &template).unwrap();
    assert!(!models.is_empty());
    for m in &models {
        assert!(m.is_model_of(&pr, &chars, &template));
    }
}

#[test]
fn allowable_moves_preserve_shape_predicates() {
    let pr = GlobalParams::new(3, 1, 1, 8).unwrap();
    let ctx = pr.field();
    let mut m = TriangularKisin::diagonal(
        &pr,
        vec![vec![0], vec![1], vec![2]],
        vec![FqElem::ONE; 3],
    )
    .unwrap();
    m.set_entry(0, 0, 1, TruncSeries::monomial(ctx.from_prime(2), 0, 8)).unwrap();
    m.set_entry(0, 1, 2, TruncSeries::monomial(FqElem::ONE, 1, 8)).unwrap();
    let before = classify_shape(&pr, &m);
    assert!(before.p_shape_all);
    for c in [1i64, 2] {
        let mv = AllowableMove { i: 0, j: 2, c: vec![ctx.from_prime(c)] };
        let moved = allowable_procedure(&pr, &m, &mv).unwrap();
        let after = classify_shape(&pr, &moved);
        assert_eq!(before.deg_ok_all, after.deg_ok_all);
        assert_eq!(before.p_shape_all, after.p_shape_all);
        assert_eq!(before.y_slots, after.y_slots);
    }
}

/// Random two-sided base changes B diag(u^r) A never produce an upper
/// triangular matrix whose diagonal exponents differ from {r_i}.
#[test]
fn diag_recovery_randomized_trials() {
    use kisin_core::shape::diag_recovery_check;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    let pr = GlobalParams::new(3, 1, 1, 8).unwrap();
    let ctx = pr.field();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let r = [0i64, 2];
    let mut checked = 0u32;
    for _ in 0..1000 {
        // B: random until invertible over the series ring
        let b = loop {
            let mut m = SeriesMat::zeros(2, 2, 8);
            for i in 0..2 {
                for j in 0..2 {
                    let coeffs: Vec<i64> = (0..4).map(|_| rng.gen_range(0..3)).collect();
                    m.set(i, j, TruncSeries::from_prime_coeffs(ctx, &coeffs, 8));
                }
            }
            if m.is_series_invertible(ctx) {
                break m;
            }
        };
        // A: entries supported on powers of u^p, invertible
        let a = loop {
            let mut m = SeriesMat::zeros(2, 2, 8);
            for i in 0..2 {
                for j in 0..2 {
                    let mut coeffs = vec![0i64; 8];
                    coeffs[0] = rng.gen_range(0..3);
                    coeffs[3] = rng.gen_range(0..3);
                    coeffs[6] = rng.gen_range(0..3);
                    m.set(i, j, TruncSeries::from_prime_coeffs(ctx, &coeffs, 8));
                }
            }
            if m.is_series_invertible(ctx) {
                break m;
            }
        };
        if let Some(verdict) = diag_recovery_check(&pr, &b, &r, &a).unwrap() {
            checked += 1;
            assert!(verdict, "multiset mismatch through a triangular product");
        }
    }
    assert!(checked > 0, "the triangularity filter accepted nothing");
}

/// Rescaling every unit by the same global unit leaves the extension
/// dimension unchanged.
#[test]
fn ext_dim_invariant_under_global_unit_rescale() {
    let pr = GlobalParams::new(3, 1, 1, 12).unwrap();
    let ctx = pr.field();
    let g = ctx.from_prime(2);
    for (ts, tq) in [(0i64, 2i64), (1, 3), (2, 1)] {
        let mk = |unit_scale: FqElem| -> ExtProblem {
            let sub = TriangularKisin::diagonal(
                &pr,
                vec![vec![ts]],
                vec![ctx.mul(FqElem::ONE, unit_scale)],
            )
            .unwrap();
            let quot = TriangularKisin::diagonal(
                &pr,
                vec![vec![tq]],
                vec![ctx.mul(ctx.from_prime(2), unit_scale)],
            )
            .unwrap();
            ExtProblem::new(&pr, sub, quot).unwrap()
        };
        let base = ext_dim(&pr, &mk(FqElem::ONE), ShapeTag::PhiShape, 12).unwrap();
        let scaled = ext_dim(&pr, &mk(g), ShapeTag::PhiShape, 12).unwrap();
        assert_eq!(base.dim, scaled.dim);
    }
}
