//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use netcollapse::dynamics::{
    glv_analytic_fixed_point, make_glv, make_sis, mean_field_trajectory, sample_normal, simulate,
    step_full, ClampMode, InitialRegime, RunStatus, SimulationSettings,
};
use netcollapse::experiments::{
    run_glv_empirical, run_glv_random, run_sis, ExperimentPlan, GraphFamily, ResultRow, Scenario,
};
use netcollapse::network::{
    a_eff, build_mutualistic, generate_random_matrix, read_incidence, BipartiteSpec,
    InteractionMatrix, Marginal, ParseOptions, RandomMatrixSpec,
};
use netcollapse::reduction::{build_effective, fixed_points_of};
use netcollapse::seeded_rng;
use netcollapse::theory::{a_eff_rmt, connectivity_rescale, Diagonal};

const BASE_SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn converged(rows: &[ResultRow]) -> Vec<&ResultRow> {
    rows.iter().filter(|r| r.status == RunStatus::Converged).collect()
}

fn incidence_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/incidence")
}

fn glv_plan(parameter: &str, values: Vec<f64>) -> ExperimentPlan {
    let mut p = ExperimentPlan::new(Scenario::GlvRandom, parameter, values);
    p.base_seed = BASE_SEED;
    p
}

/// Defaults, 50 replicas, both regimes.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rows = run_glv_random(&glv_plan("mu_alpha", vec![1.0])).expect("sweep runs");
    let elapsed = start.elapsed();
    let ok = converged(&rows);
    let pred_x = rows[0].pred_xeff;
    let pred_err = rows[0].pred_err;
    let within = ok.iter().filter(|r| r.err < 0.05 * pred_x.abs()).count();
    let frac = within as f64 / ok.len().max(1) as f64;
    let errs: Vec<f64> = ok.iter().map(|r| r.err).collect();
    let (m, se) = mean_se(&errs);
    let agrees = (m - pred_err).abs() <= 2.0 * se;
    let fast = elapsed <= Duration::from_secs(120);
    outcome(
        frac >= 0.95 && agrees && fast,
        format!(
            "converged {}/{}; err < 5% of |x_eff pred| in {:.1}% (need 95%); mean err {m:.5} +/- {se:.5} vs predicted {pred_err:.5} ({:.1} SE); {:.1}s",
            ok.len(),
            rows.len(),
            100.0 * frac,
            (m - pred_err).abs() / se,
            elapsed.as_secs_f64()
        ),
    )
}

/// 21-point mu_alpha sweep over [-0.5, 0.5].
fn criterion_2() -> Outcome {
    let values: Vec<f64> = (0..21).map(|k| -0.5 + 0.05 * k as f64).collect();
    let mut plan = glv_plan("mu_alpha", values.clone());
    plan.replicas = 10;
    let rows = run_glv_random(&plan).expect("sweep runs");
    let occupied: Vec<bool> = values
        .iter()
        .map(|&v| {
            let at: Vec<&ResultRow> = rows.iter().filter(|r| r.value == v && r.x_eff.is_finite()).collect();
            let high = at.iter().filter(|r| r.x_eff > 0.01).count();
            2 * high > at.len()
        })
        .collect();
    let first = occupied.iter().position(|&o| o);
    let upward_closed = first.is_some_and(|k| occupied[k..].iter().all(|&o| o));
    let onset = first.map(|k| values[k]);
    let step = 0.05;
    let pass = upward_closed && onset.is_some_and(|v| v > -1e-12 && v <= step + 1e-12);
    outcome(
        pass,
        format!(
            "coexistence first occupied at mu_alpha = {}, contiguous above: {upward_closed}",
            onset.map_or("none".into(), |v| format!("{v:.2}"))
        ),
    )
}

/// Median error across S in {25, 50, 100, 200}.
fn criterion_3() -> Outcome {
    let sizes = vec![25.0, 50.0, 100.0, 200.0];
    let rows = run_glv_random(&glv_plan("S", sizes.clone())).expect("sweep runs");
    let medians: Vec<f64> = sizes
        .iter()
        .map(|&s| {
            let mut e: Vec<f64> = rows
                .iter()
                .filter(|r| r.value == s && r.err.is_finite())
                .map(|r| r.err)
                .collect();
            median(&mut e)
        })
        .collect();
    let monotone = medians.windows(2).all(|w| w[1] < w[0]);
    outcome(
        monotone,
        format!(
            "median err by S: {}",
            sizes
                .iter()
                .zip(&medians)
                .map(|(s, m)| format!("{s}: {m:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

/// Analytic fixed point of 100 random GLV instances at S = 20.
fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut singular = 0;
    for k in 0..100u64 {
        let a = generate_random_matrix(&RandomMatrixSpec {
            size: 20,
            mu_x: -0.04,
            sigma_x: 0.04 / 3.0,
            rho: 0.0,
            connectivity: 0.5,
            mu_d: 1.0,
            sigma_d: 1.0 / 3.0,
            marginal: Marginal::Normal,
            seed: BASE_SEED + k,
        })
        .unwrap();
        let alpha = sample_normal(20, 1.0, 1.0 / 3.0, &mut seeded_rng(k));
        let model = make_glv(&alpha).unwrap();
        match glv_analytic_fixed_point(&a, &alpha) {
            Ok(x) => {
                let next = step_full(&a, &model, &x, ClampMode::None).unwrap();
                let d = x.iter().zip(&next).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                worst = worst.max(d);
            }
            Err(_) => singular += 1,
        }
    }
    outcome(
        worst < 1e-9 && singular == 0,
        format!("max |step(x*) - x*| = {worst:.2e} over {} instances, {singular} singular", 100 - singular),
    )
}

/// Relative error of the moment prediction of A_eff.
fn criterion_5() -> Outcome {
    let rel = |size: usize| -> f64 {
        let (mu_a, sigma_a) = connectivity_rescale(-0.04, 0.04 / 3.0, 0.5);
        let pred = a_eff_rmt(size, mu_a, sigma_a, 0.0, &Diagonal::Moments { mu_d: 1.0, sigma_d: 1.0 / 3.0 }).unwrap();
        let mut errs: Vec<f64> = (0..50u64)
            .map(|k| {
                let a = generate_random_matrix(&RandomMatrixSpec {
                    size,
                    mu_x: -0.04,
                    sigma_x: 0.04 / 3.0,
                    rho: 0.0,
                    connectivity: 0.5,
                    mu_d: 1.0,
                    sigma_d: 1.0 / 3.0,
                    marginal: Marginal::Normal,
                    seed: BASE_SEED ^ (k * 7919 + size as u64),
                })
                .unwrap();
                let actual = a_eff(&a).unwrap();
                ((pred - actual) / actual).abs()
            })
            .collect();
        median(&mut errs)
    };
    let (small, large) = (rel(25), rel(200));
    outcome(
        large < 0.05 && large < small,
        format!("median relative error S=25: {:.3}%, S=200: {:.3}%", 100.0 * small, 100.0 * large),
    )
}

/// Stability flags of the quadratic map with d3 = -1 flip at d2 = -1, 1, 3.
fn criterion_6() -> Outcome {
    let flags = |d2: f64| {
        let r = fixed_points_of(&[0.0, d2, -1.0]).unwrap();
        let zero = r.roots.iter().find(|p| p.x.abs() < 1e-15).map(|p| p.stable);
        let nonzero = r.roots.iter().find(|p| p.x.abs() >= 1e-15).map(|p| p.stable);
        (zero, nonzero)
    };
    let delta = 5e-10;
    let mut notes = Vec::new();
    let mut pass = true;
    for (boundary, which) in [(-1.0, 0usize), (1.0, 0), (1.0, 1), (3.0, 1)] {
        let pick = |f: (Option<bool>, Option<bool>)| if which == 0 { f.0 } else { f.1 };
        let (lo, hi) = (pick(flags(boundary - delta)), pick(flags(boundary + delta)));
        let flipped = matches!((lo, hi), (Some(a), Some(b)) if a != b);
        pass &= flipped;
        notes.push(format!(
            "{} root at d2={boundary}: {lo:?} -> {hi:?}",
            if which == 0 { "zero" } else { "nonzero" }
        ));
    }
    // interior checks
    pass &= flags(0.0) == (Some(true), Some(false));
    pass &= flags(2.0) == (Some(false), Some(true));
    pass &= flags(3.5) == (Some(false), Some(false));
    outcome(pass, notes.join("; "))
}

/// SIS threshold prediction and initial-condition independence on 200
/// ER/BA/WS instances.
fn criterion_7() -> Outcome {
    let mut plans = Vec::new();
    let mut er = ExperimentPlan::new(Scenario::SisGraph, "er_p", (1..=10).map(|k| 0.02 * k as f64).collect());
    er.replicas = 7;
    plans.push(er);
    let mut ba = ExperimentPlan::new(Scenario::SisGraph, "ba_m", (1..=6).map(f64::from).collect());
    ba.replicas = 11;
    plans.push(ba);
    let mut sw = ExperimentPlan::new(Scenario::SisGraph, "mu_e", (0..8).map(|k| 0.3 + 0.05 * k as f64).collect());
    sw.graph = GraphFamily::Sw;
    sw.replicas = 8;
    plans.push(sw);

    let (mut instances, mut rows_ok, mut agree, mut pairs, mut same, mut active) = (0, 0, 0, 0, 0, 0);
    for mut plan in plans {
        plan.base_seed = BASE_SEED;
        instances += plan.sweep.values.len() * plan.replicas;
        let rows = run_sis(&plan).expect("sweep runs");
        for r in rows.iter().filter(|r| r.status == RunStatus::Converged) {
            rows_ok += 1;
            let predicted = r.pred_xeff > 0.0;
            active += usize::from(predicted);
            if predicted == (r.x_eff > 0.01) {
                agree += 1;
            }
        }
        for pair in rows.chunks(2) {
            if let [lo, hi] = pair {
                pairs += 1;
                if (lo.x_eff > 0.01) == (hi.x_eff > 0.01) {
                    same += 1;
                }
            }
        }
    }
    let acc = agree as f64 / rows_ok as f64;
    let regime = same as f64 / pairs as f64;
    outcome(
        acc >= 0.95 && regime >= 0.99 && instances >= 200,
        format!(
            "{instances} instances, {rows_ok} converged rows ({active} predicted active); threshold accuracy {:.1}% (need 95%); regimes agree {:.1}% (need 99%)",
            100.0 * acc,
            100.0 * regime
        ),
    )
}

/// Homogeneous systems: L(x[t]) follows the effective map exactly.
fn criterion_8() -> Outcome {
    let n = 12;
    let steps = 200;
    let check = |a: &InteractionMatrix, model: &netcollapse::dynamics::DynamicsModel, x0: f64| -> f64 {
        let traj = mean_field_trajectory(a, model, &vec![x0; n], steps, ClampMode::None).unwrap();
        let sys = build_effective(a, model).unwrap();
        let red = sys.iterate(x0, steps);
        traj.iter().zip(&red).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let mut glv = vec![-0.03; n * n];
    let mut sis = vec![0.04; n * n];
    for i in 0..n {
        glv[i * n + i] = -1.0;
        sis[i * n + i] = 0.0;
    }
    let glv_a = InteractionMatrix::new(n, glv, false).unwrap();
    let sis_a = InteractionMatrix::new(n, sis, false).unwrap();
    let g = check(&glv_a, &make_glv(&vec![0.8; n]).unwrap(), 0.05);
    let s = check(&sis_a, &make_sis(&vec![0.3; n]).unwrap(), 0.02);
    outcome(
        g < 1e-8 && s < 1e-8,
        format!("max deviation over {steps} steps: GLV {g:.2e}, SIS {s:.2e}"),
    )
}

/// Empirical incidence files: collapse at alpha_eff = 0 and the
/// competition-only fixed point at mu_gamma = 0.
fn criterion_9() -> Outcome {
    let dir = incidence_dir();
    let values = vec![-0.3, -0.2, -0.1, 0.1, 0.2, 0.3];
    let mut plan = ExperimentPlan::new(Scenario::GlvEmpirical, "mu_alpha", values);
    plan.network_source = Some(dir.clone());
    plan.replicas = 5;
    plan.base_seed = BASE_SEED;
    let rows = run_glv_empirical(&plan, &dir).expect("sweep runs");
    let mut networks: Vec<&str> = rows.iter().map(|r| r.scenario.as_str()).collect();
    networks.dedup();
    // for GLV, d2 = 1 + alpha_eff
    let alpha_eff = |r: &ResultRow| r.d.get(1).map_or(f64::NAN, |d2| d2 - 1.0);
    let mismatched: Vec<&ResultRow> = rows
        .iter()
        .filter(|r| (alpha_eff(r) > 0.0) != (r.x_eff > 0.01))
        .collect();
    let high_mismatches = mismatched.iter().filter(|r| r.regime == InitialRegime::High).count();
    let transition_ok = mismatched.is_empty();

    // mu_gamma = 0: guilds decouple, so the community's steady state is the
    // union of each guild simulated on its own.
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let tight = SimulationSettings {
        convergence_tol: 1e-13,
        ..SimulationSettings::default()
    };
    let mut worst: f64 = 0.0;
    for (k, path) in paths.iter().enumerate() {
        let inc = read_incidence(path, ParseOptions::default()).unwrap();
        let net = build_mutualistic(&BipartiteSpec::new(inc.clone(), 0.0, k as u64)).unwrap();
        let a = &net.matrix;
        let s = a.n_nodes();
        let alpha = sample_normal(s, 1.0, 1.0 / 3.0, &mut seeded_rng(k as u64));
        let x0 = InitialRegime::High.sample(s, &mut seeded_rng(100 + k as u64));
        let full = simulate(a, &make_glv(&alpha).unwrap(), &x0, &tight).unwrap();
        let sp = inc.plants();
        for block in [0..sp, sp..s] {
            let idx: Vec<usize> = block.collect();
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| a.get(i, j)).collect()).collect();
            let sub = InteractionMatrix::from_rows(&rows).unwrap();
            let sub_alpha: Vec<f64> = idx.iter().map(|&i| alpha[i]).collect();
            let sub_x0: Vec<f64> = idx.iter().map(|&i| x0[i]).collect();
            let part = simulate(&sub, &make_glv(&sub_alpha).unwrap(), &sub_x0, &tight).unwrap();
            for (p, &i) in idx.iter().enumerate() {
                worst = worst.max((part.x_star[p] - full.x_star[i]).abs());
            }
        }
    }
    outcome(
        networks.len() >= 3 && transition_ok && worst < 1e-9,
        format!(
            "{} networks; rows off the alpha_eff = 0 transition: {}/{} ({high_mismatches} from the high regime); competition-only mismatch {worst:.2e}",
            networks.len(),
            mismatched.len(),
            rows.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 GLV manifold collapse", criterion_1),
        ("2 transition location", criterion_2),
        ("3 error scaling with S", criterion_3),
        ("4 analytic GLV fixed point", criterion_4),
        ("5 random-matrix A_eff", criterion_5),
        ("6 reduced-map stability bands", criterion_6),
        ("7 SIS threshold", criterion_7),
        ("8 homogeneous exactness", criterion_8),
        ("9 empirical-network pipeline", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
