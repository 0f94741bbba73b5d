use gmwp::analysis::{brute_force_global, single_source_solve};
use gmwp::harness::matrix_hash;
use gmwp::solver::{armijo_search, dca_step, solve, SolverParams, Variant};
use gmwp::{random_init, ConvexRegion, GaugeKind, GaugeSet, InitBox, Matrix, ProblemInstance};
use proptest::prelude::*;

fn gauge_kind() -> impl Strategy<Value = GaugeKind> {
    prop_oneof![
        Just(GaugeKind::Euclidean),
        Just(GaugeKind::L1),
        Just(GaugeKind::LInf)
    ]
}

fn gauge() -> impl Strategy<Value = GaugeSet> {
    (gauge_kind(), 0.25f64..4.0).prop_map(|(kind, r)| GaugeSet::new(kind, r).unwrap())
}

fn matrix(rows: usize, cols: usize, span: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-span..span, rows * cols)
        .prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

/// `(instance, centers)` with `1 <= k <= m`.
fn instance_and_centers() -> impl Strategy<Value = (ProblemInstance, Matrix)> {
    (2usize..10, 1usize..4, 1usize..4)
        .prop_flat_map(|(m, k, n)| {
            let k = k.min(m);
            (matrix(m, n, 5.0), matrix(k, n, 5.0), gauge(), Just(k))
        })
        .prop_map(|(a, x, g, k)| (ProblemInstance::new(a, k, g).unwrap(), x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dc_split_matches_objective((p, x) in instance_and_centers()) {
        let f = p.objective_true(&x).unwrap();
        let dc = p.dc_components(&x).unwrap();
        prop_assert!((dc.g - dc.h - f).abs() <= 1e-10 * (1.0 + f.abs()));
        prop_assert!(dc.h >= 0.0);
    }

    #[test]
    fn objective_ignores_center_order((p, x) in instance_and_centers()) {
        let mut rows = x.to_rows();
        rows.reverse();
        let y = Matrix::from_rows(&rows).unwrap();
        let (a, b) = (p.objective_true(&x).unwrap(), p.objective_true(&y).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn smoothing_underestimates_within_bound((p, x) in instance_and_centers(), mu in 1e-3f64..3.0) {
        let f = p.objective_true(&x).unwrap();
        let fs = p.smoothed_objective(&x, mu, 0.0).unwrap();
        let (_, polar) = p.gauge().norms(p.dim());
        let bound = 0.5 * mu * (p.num_points() * p.k()) as f64 * polar * polar;
        let slack = 1e-10 * (1.0 + f.abs());
        prop_assert!(f - fs >= -slack);
        prop_assert!(f - fs <= bound + slack);
    }

    #[test]
    fn conjugate_gradient_round_trip((p, x) in instance_and_centers(), mu in 1e-2f64..3.0) {
        let y = p.grad_g(&x, mu, 0.0).unwrap();
        let back = p.grad_g_conj(&y, mu, 0.0).unwrap();
        prop_assert!(back.fro_dist(&x) <= 1e-12 * (1.0 + x.fro_norm()));
    }

    #[test]
    fn h2_subgradient_inequality((p, x) in instance_and_centers(), seed in any::<u64>()) {
        let v = p.subgrad_h2(&x).unwrap();
        let hx = p.h2_value(&x);
        let init = InitBox::cube(p.dim(), -6.0, 6.0).unwrap();
        let y = random_init(&p, &init, seed, 0);
        let lin = hx + v.dot(&y.sub(&x));
        prop_assert!(p.h2_value(&y) >= lin - 1e-10 * (1.0 + hx.abs()));
    }

    #[test]
    fn dca_step_does_not_increase_smoothed_objective(
        (p, x) in instance_and_centers(),
        mu in 1e-2f64..2.0,
    ) {
        let z = dca_step(&p, &x, mu, 0.0).unwrap().z;
        let before = p.smoothed_objective(&x, mu, 0.0).unwrap();
        let after = p.smoothed_objective(&z, mu, 0.0).unwrap();
        prop_assert!(after <= before + 1e-9 * (1.0 + before.abs()), "{before} -> {after}");
    }

    #[test]
    fn armijo_acceptance_holds(
        (p, x) in instance_and_centers(),
        trial in 0.01f64..50.0,
    ) {
        let mu = 0.1;
        let z = dca_step(&p, &x, mu, 0.0).unwrap().z;
        let d = z.sub(&x);
        let f = |m: &Matrix| p.objective_true(m).unwrap();
        let ls = armijo_search(f, &z, &d, trial, 0.05, 0.5, 1e-10);
        prop_assert!(ls.lambda >= 0.0 && ls.lambda <= trial);
        let lhs = p.objective_true(&z.add_scaled(ls.lambda, &d)).unwrap();
        prop_assert!(lhs <= ls.f_start - 0.05 * ls.lambda * ls.lambda * d.dot(&d) + 1e-12 * (1.0 + ls.f_start.abs()));
    }

    #[test]
    fn random_init_is_reproducible_and_in_box(
        (p, _) in instance_and_centers(),
        seed in any::<u64>(),
        run in 0u64..1000,
    ) {
        let b = InitBox::bounding(&p);
        let x = random_init(&p, &b, seed, run);
        prop_assert_eq!(matrix_hash(&x), matrix_hash(&random_init(&p, &b, seed, run)));
        for row in x.row_iter() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!(*v >= b.lo[j] && *v <= b.hi[j]);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_feasible(
        c in prop::collection::vec(-3.0f64..3.0, 3),
        r in 0.1f64..3.0,
        x in prop::collection::vec(-10.0f64..10.0, 3),
    ) {
        let sets = [
            ConvexRegion::ball(c.clone(), r).unwrap(),
            ConvexRegion::boxed(c.iter().map(|v| v - r).collect(), c.iter().map(|v| v + r).collect()).unwrap(),
        ];
        for set in sets {
            let px = set.project(&x);
            prop_assert!(set.distance(&px) <= 1e-12);
            let ppx = set.project(&px);
            prop_assert!(px.iter().zip(&ppx).all(|(a, b)| (a - b).abs() <= 1e-12));
            prop_assert!(set.phi(&x) <= x.iter().map(|v| v * v).sum::<f64>() + 1e-9);
        }
    }

    #[test]
    fn polar_projection_lands_in_polar_set(g in gauge(), y in prop::collection::vec(-10.0f64..10.0, 1..5)) {
        let p = g.polar_projection(&y);
        prop_assert!(g.polar_value(&p) <= 1.0 + 1e-12);
        prop_assert!(g.polar_distance(&y) >= 0.0);
    }

    #[test]
    fn gauge_duality_bound(g in gauge(), x in prop::collection::vec(-10.0f64..10.0, 1..5), u in prop::collection::vec(-10.0f64..10.0, 5)) {
        let u = &u[..x.len()];
        let inner: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
        prop_assert!(inner <= g.value(&x) * g.polar_value(u) + 1e-9 * (1.0 + inner.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_source_beats_every_data_point(
        kind in gauge_kind(),
        a in matrix(7, 3, 4.0),
    ) {
        let g = GaugeSet::unit(kind);
        let rows: Vec<&[f64]> = a.row_iter().collect();
        let s = single_source_solve(&rows, &g, 1e-8).unwrap();
        prop_assert!(s.lower_bound <= s.value + 1e-12);
        for c in a.row_iter() {
            let at_c: f64 = rows.iter().map(|r| g.value_between(c, r)).sum();
            prop_assert!(s.value <= at_c + 1e-8);
        }
    }

    #[test]
    fn solver_never_beats_oracle(
        kind in gauge_kind(),
        a in matrix(6, 2, 2.0),
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let p = ProblemInstance::new(a, k, GaugeSet::unit(kind)).unwrap();
        let oracle = brute_force_global(&p, 1e-9).unwrap();
        prop_assert!(oracle.lower_bound <= oracle.value + 1e-12);
        let x0 = random_init(&p, &InitBox::bounding(&p), seed, 0);
        let r = solve(&p, &x0, &SolverParams::default(), Variant::AbdcaSkip).unwrap();
        prop_assert!(r.value >= oracle.value - 1e-6, "solver {} oracle {}", r.value, oracle.value);
    }

    #[test]
    fn penalty_drives_centers_into_constraints(
        a in matrix(12, 2, 5.0),
        seed in any::<u64>(),
    ) {
        let ball = ConvexRegion::ball(vec![0.0, 0.0], 0.5).unwrap();
        let p = ProblemInstance::new(a, 2, GaugeSet::euclidean())
            .unwrap()
            .with_constraints(vec![vec![ball]; 2])
            .unwrap();
        let x0 = random_init(&p, &InitBox::bounding(&p), seed, 0);
        let r = solve(&p, &x0, &SolverParams::default(), Variant::Dca).unwrap();
        prop_assert!(p.max_violation(&r.centers) <= 1e-4, "{}", p.max_violation(&r.centers));
    }
}
