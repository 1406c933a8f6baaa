use netcollapse::dynamics::{
    glv_analytic_fixed_point, make_glv, make_sis, mean_field_trajectory, simulate, step_full,
    ClampMode, CouplingTerm, DynamicsModel, RunStatus, SimulationSettings, SteadyStateRecord,
};
use netcollapse::network::{
    a_eff, build_mutualistic, generate_ba, generate_er, generate_random_matrix, generate_sw,
    matrix_stats, mean_field, BipartiteSpec, Incidence, InteractionMatrix, Marginal, MeanField,
    RandomMatrixSpec,
};
use netcollapse::reduction::{
    build_effective, chebyshev_fit_1d, collapse_error, fixed_points_of, project_onto_manifold,
};
use netcollapse::theory::{
    a_eff_rmt_from_matrix, glv_effective_params, glv_error_prediction, glv_x_eff_prediction,
    sis_threshold, Branch, GlvEnsemble, SisPhase,
};
use proptest::prelude::*;

fn matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = InteractionMatrix> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |e| InteractionMatrix::new(n, e, true).unwrap())
}

fn sized_matrix(lo: f64, hi: f64) -> impl Strategy<Value = InteractionMatrix> {
    (2usize..8).prop_flat_map(move |n| matrix(n, lo, hi))
}

fn random_spec(size: usize, seed: u64) -> RandomMatrixSpec {
    RandomMatrixSpec {
        size,
        mu_x: -0.04,
        sigma_x: 0.04 / 3.0,
        rho: 0.0,
        connectivity: 0.5,
        mu_d: 1.0,
        sigma_d: 1.0 / 3.0,
        marginal: Marginal::Normal,
        seed,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

proptest! {
    #[test]
    fn a_eff_matches_double_sum(a in sized_matrix(0.0, 1.0)) {
        let n = a.n_nodes();
        let total: f64 = a.entries().iter().sum();
        prop_assume!(total > 1e-3);
        let mut num = 0.0;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    num += a.get(i, k) * a.get(k, j);
                }
            }
        }
        let oracle = num / total;
        let got = a_eff(&a).unwrap();
        prop_assert!((got - oracle).abs() <= 1e-10 * oracle.abs().max(1e-300));
    }

    #[test]
    fn mean_field_is_linear(
        a in matrix(5, 0.0, 1.0),
        x in prop::collection::vec(-2.0f64..2.0, 5),
        y in prop::collection::vec(-2.0f64..2.0, 5),
        s in -3.0f64..3.0,
        c in -5.0f64..5.0,
    ) {
        prop_assume!(a.entries().iter().sum::<f64>() > 1e-3);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| s * p + q).collect();
        let lhs = mean_field(&a, &combo).unwrap();
        let rhs = s * mean_field(&a, &x).unwrap() + mean_field(&a, &y).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!((mean_field(&a, &[c; 5]).unwrap() - c).abs() <= 1e-15 * c.abs().max(1.0) * 4.0);
    }

    #[test]
    fn trade_off_rows_sum_to_mu_gamma(
        rows in prop::collection::vec(prop::collection::vec(0u8..2, 1..7), 1..7),
        mu in 0.05f64..1.0,
        seed in any::<u64>(),
    ) {
        let width = rows[0].len();
        let rows: Vec<Vec<u8>> = rows.into_iter().map(|mut r| { r.resize(width, 0); r }).collect();
        let inc = Incidence::from_rows(&rows).unwrap();
        let net = build_mutualistic(&BipartiteSpec::new(inc.clone(), mu, seed).with_sigma_gamma(0.0)).unwrap();
        let (sp, sa) = (inc.plants(), inc.animals());
        for p in 0..sp {
            let sum: f64 = (0..sa).map(|a| net.matrix.get(p, sp + a)).sum();
            let expected = if inc.plant_degree(p) > 0 { mu } else { 0.0 };
            prop_assert!((sum - expected).abs() < 1e-12);
        }
        for a in 0..sa {
            let sum: f64 = (0..sp).map(|p| net.matrix.get(sp + a, p)).sum();
            let expected = if inc.animal_degree(a) > 0 { mu } else { 0.0 };
            prop_assert!((sum - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 8usize..30) {
        prop_assert_eq!(generate_er(n, 0.3, seed).unwrap(), generate_er(n, 0.3, seed).unwrap());
        prop_assert_eq!(generate_ba(n, 2, seed).unwrap(), generate_ba(n, 2, seed).unwrap());
        prop_assert_eq!(generate_sw(n, 4, 0.2, seed).unwrap(), generate_sw(n, 4, 0.2, seed).unwrap());
        prop_assert_eq!(
            generate_random_matrix(&random_spec(n, seed)).unwrap(),
            generate_random_matrix(&random_spec(n, seed)).unwrap()
        );
    }
}

#[test]
fn sampled_moments_converge_with_size() {
    let dev = |size: usize| {
        let (mu_a, sigma_a) = netcollapse::theory::connectivity_rescale(-0.04, 0.04 / 3.0, 0.5);
        let (dm, ds): (Vec<f64>, Vec<f64>) = (0..20u64)
            .map(|seed| {
                let st = matrix_stats(&generate_random_matrix(&random_spec(size, seed)).unwrap()).unwrap();
                ((st.mu_a - mu_a).abs(), (st.sigma_a - sigma_a).abs())
            })
            .unzip();
        (median(dm), median(ds))
    };
    let (small, large) = (dev(25), dev(200));
    assert!(large.0 < small.0 && large.1 < small.1, "{small:?} {large:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_glv_point_is_fixed(seed in any::<u64>(), size in 3usize..25) {
        let a = generate_random_matrix(&random_spec(size, seed)).unwrap();
        let alpha = netcollapse::dynamics::sample_normal(size, 1.0, 1.0 / 3.0, &mut netcollapse::seeded_rng(seed));
        let x = glv_analytic_fixed_point(&a, &alpha).unwrap();
        let next = step_full(&a, &make_glv(&alpha).unwrap(), &x, ClampMode::None).unwrap();
        let d = x.iter().zip(&next).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-9);
    }

    #[test]
    fn sis_zero_state_is_absorbing(a in sized_matrix(0.0, 1.0), e in 0.0f64..1.0) {
        let n = a.n_nodes();
        let next = step_full(&a, &make_sis(&vec![e; n]).unwrap(), &vec![0.0; n], ClampMode::UnitInterval).unwrap();
        prop_assert!(next.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sis_trajectories_stay_in_unit_box(
        a in matrix(6, 0.0, 0.8),
        e in prop::collection::vec(0.0f64..1.5, 6),
        x0 in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let model = make_sis(&e).unwrap();
        let mut x = x0;
        for _ in 0..200 {
            x = step_full(&a, &model, &x, ClampMode::UnitInterval).unwrap();
            prop_assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn simulation_is_deterministic_and_self_certifying(seed in any::<u64>()) {
        let a = generate_random_matrix(&random_spec(15, seed)).unwrap();
        let alpha = netcollapse::dynamics::sample_normal(15, 1.0, 1.0 / 3.0, &mut netcollapse::seeded_rng(seed));
        let model = make_glv(&alpha).unwrap();
        let x0 = vec![0.05; 15];
        let settings = SimulationSettings::default();
        let r1 = simulate(&a, &model, &x0, &settings).unwrap();
        let r2 = simulate(&a, &model, &x0, &settings).unwrap();
        prop_assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        if r1.status == RunStatus::Converged {
            let next = step_full(&a, &model, &r1.x_star, model.clamp()).unwrap();
            let change = next.iter().zip(&r1.x_star).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            prop_assert!(change < settings.convergence_tol);
        }
    }
}

/// Circulant matrices have identical row and column sums.
fn circulant(first_row: &[f64]) -> InteractionMatrix {
    let n = first_row.len();
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = first_row[(j + n - i) % n];
        }
    }
    InteractionMatrix::new(n, e, true).unwrap()
}

fn term_strategy() -> impl Strategy<Value = CouplingTerm> {
    (1usize..3, 1usize..3, -0.2f64..0.2).prop_map(|(p, q, c)| CouplingTerm::new(p, q, c))
}

proptest! {
    #[test]
    fn homogeneous_systems_reduce_exactly(
        row in prop::collection::vec(0.0f64..0.15, 4..9),
        self_poly in prop::collection::vec(-0.5f64..0.9, 1..4),
        terms in prop::collection::vec(term_strategy(), 0..3),
        x0 in 0.0f64..0.5,
    ) {
        let a = circulant(&row);
        prop_assume!(a.total_weight() > 1e-3);
        let n = a.n_nodes();
        let model = DynamicsModel::uniform(n, &self_poly, &terms, ClampMode::None).unwrap();
        let steps = 40;
        let traj = mean_field_trajectory(&a, &model, &vec![x0; n], steps, ClampMode::None);
        prop_assume!(traj.as_ref().is_ok_and(|t| t.iter().all(|v| v.abs() < 10.0)));
        let traj = traj.unwrap();
        let reduced = build_effective(&a, &model).unwrap().iterate(x0, steps);
        for (p, q) in traj.iter().zip(&reduced) {
            prop_assert!((p - q).abs() < 1e-8, "{p} vs {q}");
        }
    }

    #[test]
    fn chebyshev_recovers_polynomials(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..6),
        extra in 0usize..3,
        lo in -1.0f64..0.0,
        width in 0.5f64..2.0,
    ) {
        let degree = coeffs.len() - 1 + extra;
        let c = coeffs.clone();
        let fit = chebyshev_fit_1d(
            move |x| c.iter().rev().fold(0.0, |acc, k| acc * x + k),
            (lo, lo + width),
            degree,
        )
        .unwrap();
        for (k, got) in fit.coeffs.iter().enumerate() {
            let want = coeffs.get(k).copied().unwrap_or(0.0);
            prop_assert!((got - want).abs() < 1e-8, "coefficient {k}: {got} vs {want}");
        }
    }

    #[test]
    fn quadratic_stability_bands(d2 in -1.5f64..3.5, d3 in -5.0f64..-0.01) {
        let near = |b: f64| (d2 - b).abs() < 1e-9;
        prop_assume!(!near(-1.0) && !near(1.0) && !near(3.0));
        let r = fixed_points_of(&[0.0, d2, d3]).unwrap();
        let zero = r.roots.iter().find(|p| p.x == 0.0).unwrap();
        prop_assert_eq!(zero.stable, d2.abs() < 1.0);
        let other = r.roots.iter().find(|p| p.x != 0.0).unwrap();
        prop_assert!((other.x - (1.0 - d2) / d3).abs() < 1e-12 * (1.0 + other.x.abs()));
        prop_assert_eq!(other.stable, d2 > 1.0 && d2 < 3.0);
    }

    #[test]
    fn collapse_error_ignores_labels(
        a in matrix(6, 0.0, 0.3),
        alpha in prop::collection::vec(0.1f64..1.0, 6),
        x in prop::collection::vec(0.0f64..1.0, 6),
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        prop_assume!(a.total_weight() > 1e-3);
        let mut e = a.entries().to_vec();
        for i in 0..6 {
            e[i * 6 + i] = -1.0;
        }
        let a = InteractionMatrix::new(6, e, true).unwrap();
        prop_assume!(a.total_weight().abs() > 1e-3);
        let model = make_glv(&alpha).unwrap();
        let pa = a.permuted(&perm);
        let palpha: Vec<f64> = perm.iter().map(|&k| alpha[k]).collect();
        let px: Vec<f64> = perm.iter().map(|&k| x[k]).collect();
        let record = |m: &InteractionMatrix, xs: &[f64]| SteadyStateRecord {
            x_star: xs.to_vec(),
            x_eff: MeanField::new(m).unwrap().apply(xs),
            mean_state: 0.0,
            steps: 0,
            status: RunStatus::Converged,
            period_two: false,
            d: Vec::new(),
        };
        let s1 = build_effective(&a, &model).unwrap();
        let s2 = build_effective(&pa, &make_glv(&palpha).unwrap()).unwrap();
        let e1 = collapse_error(&record(&a, &x), &s1);
        let e2 = collapse_error(&record(&pa, &px), &s2);
        match (e1, e2) {
            (Ok(e1), Ok(e2)) => prop_assert!((e1.err - e2.err).abs() < 1e-12 * (1.0 + e1.err.abs()), "{e1:?} vs {e2:?}"),
            (Err(_), Err(_)) => {}
            (e1, e2) => prop_assert!(false, "{e1:?} vs {e2:?}"),
        }
    }
}

/// d_s built by enumerating the three cases of the piecewise rule directly.
#[test]
fn piecewise_rule_matches_brute_force() {
    let n = 4;
    let a = circulant(&[0.2, 0.5, 0.1, 0.7]);
    let w = a.out_degrees();
    let total: f64 = w.iter().sum();
    let l = |v: &[f64]| v.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>() / total;
    let a_eff_direct = l(&a.in_degrees());
    for m in 1..=4usize {
        for nn in 1..=4usize {
            let self_rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..m).map(|k| 0.1 * (i + 1) as f64 + 0.01 * k as f64).collect())
                .collect();
            // one term per collapsed power l = p + q - 1, using q = 1
            let coupling: Vec<Vec<CouplingTerm>> = (0..n)
                .map(|i| (1..=nn).map(|lp| CouplingTerm::new(lp, 1, 0.3 - 0.05 * (i + lp) as f64)).collect())
                .collect();
            let model = DynamicsModel::new(self_rows.clone(), coupling.clone(), ClampMode::None).unwrap();
            let sys = build_effective(&a, &model).unwrap();
            let s_max = m.max(nn);
            assert_eq!(sys.d.len(), s_max);
            for s in 1..=s_max {
                let b = if s <= m {
                    l(&self_rows.iter().map(|r| r[s - 1]).collect::<Vec<_>>())
                } else {
                    0.0
                };
                let c = if s <= nn {
                    l(&coupling.iter().map(|t| t[s - 1].coeff).collect::<Vec<_>>())
                } else {
                    0.0
                };
                let expected = if s <= m.min(nn) {
                    b + a_eff_direct * c
                } else if m < nn {
                    a_eff_direct * c
                } else {
                    b
                };
                assert!((sys.d[s - 1] - expected).abs() < 1e-14, "m={m} n={nn} s={s}");
            }
        }
    }
}

proptest! {
    #[test]
    fn error_prediction_consistency(
        size in 2usize..300,
        mu_alpha in -2.0f64..2.0,
        mu_a in -0.2f64..0.0,
        mu_d in 0.1f64..3.0,
        sigma_d in 0.0f64..1.0,
    ) {
        let ens = GlvEnsemble {
            size, mu_alpha, sigma_alpha: 0.0, mu_a, sigma_a: 0.0, rho_a: 0.0, mu_d, sigma_d,
        };
        let (d2, d3) = glv_effective_params(&ens).unwrap();
        let x = glv_x_eff_prediction(&ens, Branch::Nonzero).unwrap();
        let err = glv_error_prediction(&ens, Branch::Nonzero).unwrap();
        prop_assert!((err - (x - (1.0 - d2) / d3).abs()).abs() <= 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn growth_sign_selects_branch(mu_alpha in 0.01f64..0.9, size in 2usize..100) {
        for (sign, nonzero_stable) in [(1.0, true), (-1.0, false)] {
            let ens = GlvEnsemble {
                size, mu_alpha: sign * mu_alpha, sigma_alpha: 0.0, mu_a: -0.02, sigma_a: 0.0,
                rho_a: 0.0, mu_d: 1.0, sigma_d: 1.0 / 3.0,
            };
            let (d2, d3) = glv_effective_params(&ens).unwrap();
            let r = fixed_points_of(&[0.0, d2, d3]).unwrap();
            let stable: Vec<f64> = r.stable().map(|p| p.x).collect();
            prop_assert_eq!(stable.len(), 1);
            prop_assert_eq!(stable[0] != 0.0, nonzero_stable);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sis_threshold_matches_zero_root(e_eff in 0.0f64..1.0, a_eff in 0.0f64..1.0) {
        prop_assume!(a_eff != e_eff);
        let r = fixed_points_of(&[0.0, 1.0 - e_eff + a_eff, -a_eff]);
        let zero_stable = match r {
            Ok(r) => r.roots.iter().find(|p| p.x == 0.0).map_or(false, |p| p.stable),
            Err(_) => false,
        };
        prop_assert_eq!(sis_threshold(e_eff, a_eff) == SisPhase::Extinct, zero_stable);
    }
}

#[test]
fn realized_rmt_a_eff_approaches_sampled_value() {
    let errs: Vec<f64> = [25usize, 50, 100, 200]
        .iter()
        .map(|&size| {
            median(
                (0..50u64)
                    .map(|seed| {
                        let a = generate_random_matrix(&random_spec(size, 1000 + seed)).unwrap();
                        let actual = a_eff(&a).unwrap();
                        ((a_eff_rmt_from_matrix(&a).unwrap() - actual) / actual).abs()
                    })
                    .collect(),
            )
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn projection_reproduces_quadratic_root() {
    let report = fixed_points_of(&[0.0, 2.0, -1.98]).unwrap();
    let e = project_onto_manifold(0.5, &report).unwrap();
    assert!((e.root - 1.0 / 1.98).abs() < 1e-15);
}
