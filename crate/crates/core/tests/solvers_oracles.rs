use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stch::problems::{Problem, ProblemId};
use stch::scalarize::eval_stch;
use stch::solvers::{
    min_norm_residual, min_norm_weights, solve_mgda, solve_scalarized, SolveConfig, StepSchedule,
    StopReason, Trajectory,
};
use stch::{IdealPoint, Matrix, Preference, ScalarizationSpec};

fn toy() -> Problem {
    Problem::new(ProblemId::Toy)
}

fn pref(v: &[f64]) -> Preference {
    Preference::new(v.to_vec()).unwrap()
}

fn config(iters: usize, step: StepSchedule, seed: u64) -> SolveConfig {
    SolveConfig {
        max_iters: iters,
        step,
        seed,
        ..SolveConfig::default()
    }
}

/// Minimizer of a 1-D function on the toy's box by exhaustive search at
/// spacing 1e-6.
fn grid_argmin(g: impl Fn(f64) -> f64) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=3_000_000u32 {
        let x = -1.0 + f64::from(i) * 1e-6;
        let v = g(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best.1
}

fn balance(f: &[f64], lambda: &Preference, z: &[f64]) -> f64 {
    let l = lambda.values();
    (l[0] * (f[0] - z[0]) - l[1] * (f[1] - z[1])).abs()
}

fn assert_well_formed(problem: &Problem, t: &Trajectory) {
    for w in t.iterates.windows(2) {
        assert!(w[0].iter < w[1].iter);
        assert!(w[0].evals <= w[1].evals);
    }
    for it in &t.iterates {
        for (j, v) in it.x.iter().enumerate() {
            assert!(*v >= problem.lower[j] && *v <= problem.upper[j]);
        }
    }
}

#[test]
fn stch_on_toy_balances_weighted_gaps() {
    let problem = toy();
    let z = [-0.1, -0.1];
    let lambda = pref(&[0.5, 0.5]);
    let spec = ScalarizationSpec::stch(IdealPoint::new(z.to_vec()), 0.05).unwrap();
    let oracle = grid_argmin(|x| eval_stch(&problem.evaluate(&[x]).unwrap(), &lambda, &spec).unwrap().value);
    for seed in 0..5 {
        let t = solve_scalarized(&problem, &spec, &lambda, &config(200, StepSchedule::Constant(0.25), seed)).unwrap();
        assert_well_formed(&problem, &t);
        let last = t.last().unwrap();
        assert!((last.x[0] - oracle).abs() <= 1e-5, "x {} vs oracle {oracle}", last.x[0]);
        assert!(balance(&last.f, &lambda, &z) <= 1e-3);
    }
}

#[test]
fn tch_subgradient_trails_stch_at_equal_budget() {
    let problem = toy();
    let z = vec![-0.1, -0.1];
    let lambda = pref(&[0.5, 0.5]);
    let tch = ScalarizationSpec::tch(IdealPoint::new(z.clone()));
    let stch = ScalarizationSpec::stch(IdealPoint::new(z), 0.05).unwrap();
    let oracle = grid_argmin(|x| {
        stch::scalarize::eval_tch(&problem.evaluate(&[x]).unwrap(), &lambda, &tch).unwrap().0
    });
    let mut tch_gap = 0.0;
    let mut stch_gap = 0.0;
    for seed in 0..20 {
        let mut cfg = config(199, StepSchedule::InvSqrtT(0.5), seed);
        cfg.tolerance = 0.0;
        let a = solve_scalarized(&problem, &tch, &lambda, &cfg).unwrap();
        cfg.step = StepSchedule::Constant(0.25);
        let b = solve_scalarized(&problem, &stch, &lambda, &cfg).unwrap();
        assert_eq!(a.evaluations(), 200);
        assert_eq!(b.evaluations(), 200);
        tch_gap += (a.last().unwrap().x[0] - oracle).abs();
        stch_gap += (b.last().unwrap().x[0] - oracle).abs();
    }
    assert!(stch_gap < tch_gap, "stch {stch_gap} vs tch {tch_gap}");
}

#[test]
fn linear_scalarization_misses_concave_front_interior() {
    let problem = Problem::new(ProblemId::F4);
    for k in 0..=10 {
        let l1 = k as f64 / 10.0;
        let lambda = pref(&[l1, 1.0 - l1]);
        let spec = ScalarizationSpec::linear(2);
        let t = solve_scalarized(&problem, &spec, &lambda, &config(5000, StepSchedule::Constant(0.02), k)).unwrap();
        // a zero weight leaves the other objective free, so f1 may exceed 1
        let f1 = t.last().unwrap().f[0];
        assert!(f1 <= 1e-2 || f1 >= 1.0 - 1e-2, "λ1 = {l1}: f1 = {f1}");
    }
}

#[test]
fn mgda_reaches_pareto_stationarity_on_toy() {
    let problem = toy();
    let spec_cfg = SolveConfig {
        tolerance: 1e-7,
        ..config(5000, StepSchedule::Constant(0.1), 0)
    };
    for seed in 0..10 {
        let cfg = SolveConfig { seed, ..spec_cfg.clone() };
        let t = solve_mgda(&problem, &cfg).unwrap();
        assert_eq!(t.stop, StopReason::Converged);
        let last = t.last().unwrap();
        assert!(last.grad_norm <= 1e-6);
        // just outside [0, 1] both gradients agree in sign and ‖d‖ = 2·distance
        let outside = (-last.x[0]).max(last.x[0] - 1.0).max(0.0);
        assert!(outside <= 0.5 * cfg.tolerance, "x = {}", last.x[0]);
        let (_, residual) = min_norm_residual(&problem.jacobian(&last.x).unwrap());
        assert!(residual <= 1e-6);
    }
}

#[test]
fn mgda_pays_more_gradient_passes_than_stch() {
    let problem = Problem::new(ProblemId::DiskBrake);
    let spec = ScalarizationSpec::stch(IdealPoint::new(vec![0.0; 3]), 0.1).unwrap();
    let mut cfg = config(20, StepSchedule::Constant(1e-6), 3);
    cfg.tolerance = 0.0;
    let a = solve_mgda(&problem, &cfg).unwrap();
    let b = solve_scalarized(&problem, &spec, &Preference::uniform(3), &cfg).unwrap();
    assert_eq!(a.evaluations(), b.evaluations());
    assert!(a.cost.gradient_passes >= b.cost.gradient_passes);
    assert_eq!(a.cost.gradient_passes, 3 * b.cost.gradient_passes);
    assert_eq!(a.cost.qp_solves, a.evaluations());
    assert_eq!(b.cost.qp_solves, 0);
}

#[test]
fn stch_descent_is_monotone_with_small_constant_step() {
    let problem = toy();
    let mu = 0.1;
    let lambda = pref(&[0.3, 0.7]);
    let spec = ScalarizationSpec::stch(IdealPoint::new(vec![-0.1, -0.1]), mu).unwrap();
    // curvature bound on [−1, 2]: max λ_i f_i'' + (max |λ_i f_i'|)² / μ
    let lipschitz = 2.0 * 0.7 + (0.7f64 * 4.0).powi(2) / mu;
    for seed in 0..5 {
        let t = solve_scalarized(&problem, &spec, &lambda, &config(300, StepSchedule::Constant(0.1 / lipschitz), seed))
            .unwrap();
        for w in t.iterates.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-12);
        }
    }
}

#[test]
fn balance_tightens_as_mu_shrinks() {
    let problem = toy();
    let z = vec![-0.1, -0.1];
    for l1 in [0.2, 0.35, 0.65, 0.8] {
        let lambda = pref(&[l1, 1.0 - l1]);
        let residual = |mu: f64| {
            let spec = ScalarizationSpec::stch(IdealPoint::new(z.clone()), mu).unwrap();
            let x = grid_argmin(|x| eval_stch(&problem.evaluate(&[x]).unwrap(), &lambda, &spec).unwrap().value);
            balance(problem.evaluate(&[x]).unwrap().values(), &lambda, &z)
        };
        let (coarse, fine) = (residual(0.1), residual(0.01));
        assert!(fine < coarse, "λ1 = {l1}: {fine} vs {coarse}");
    }
}

#[test]
fn stationary_stch_solves_certify_pareto_stationarity() {
    let cases = [
        (ProblemId::Toy, 1),
        (ProblemId::F1, 5),
        (ProblemId::F2, 5),
        (ProblemId::F4, 5),
        (ProblemId::F5, 5),
    ];
    for (id, n) in cases {
        let problem = Problem::with_dim(id, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut certified = 0;
        for seed in 0..5 {
            let l1 = rng.gen_range(0.2..0.8);
            let lambda = pref(&[l1, 1.0 - l1]);
            let spec = ScalarizationSpec::stch(IdealPoint::new(vec![-0.1, -0.1]), 0.1).unwrap();
            let mut cfg = config(20_000, StepSchedule::Constant(0.05), seed);
            cfg.record_every = 1000;
            let t = solve_scalarized(&problem, &spec, &lambda, &cfg).unwrap();
            let last = t.last().unwrap();
            if last.grad_norm > 1e-8 {
                continue;
            }
            certified += 1;
            let (f, jac) = problem.evaluate_with_jacobian(&last.x).unwrap();
            let w_bar = eval_stch(&f, &lambda, &spec).unwrap().normalized_weights();
            let combo = jac.combine_rows(&w_bar).unwrap();
            assert!(combo.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-6);
            assert!(min_norm_residual(&jac).1 <= 1e-6);
        }
        assert!(certified > 0, "{}: no solve reached the gradient threshold", problem.name());
    }
}

#[test]
fn solves_are_deterministic() {
    let problem = Problem::new(ProblemId::F3);
    let spec = ScalarizationSpec::stch(IdealPoint::new(vec![-0.1, -0.1]), 0.1).unwrap();
    let lambda = pref(&[0.4, 0.6]);
    let cfg = config(100, StepSchedule::Constant(0.05), 42);
    let a = solve_scalarized(&problem, &spec, &lambda, &cfg).unwrap();
    let b = solve_scalarized(&problem, &spec, &lambda, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(solve_mgda(&problem, &cfg).unwrap(), solve_mgda(&problem, &cfg).unwrap());
}

/// Squared norm minimized over the 2-simplex by nested grids: a full sweep
/// at spacing 1e-3, then two zoomed sweeps around the incumbent.
fn grid_min_norm_sq(g: &Matrix) -> f64 {
    let value = |a: f64, b: f64| {
        let c = 1.0 - a - b;
        let d = g.combine_rows(&[a, b, c]).unwrap();
        d.iter().map(|v| v * v).sum::<f64>()
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let scan = |a0: f64, b0: f64, radius: f64, step: f64, best: &mut (f64, f64, f64)| {
        let k = (2.0 * radius / step).round() as i64;
        for i in 0..=k {
            let a = a0 - radius + i as f64 * step;
            if !(0.0..=1.0).contains(&a) {
                continue;
            }
            for j in 0..=k {
                let b = b0 - radius + j as f64 * step;
                if b < 0.0 || a + b > 1.0 + 1e-15 {
                    continue;
                }
                let v = value(a, b.min(1.0 - a));
                if v < best.0 {
                    *best = (v, a, b.min(1.0 - a));
                }
            }
        }
    };
    scan(0.5, 0.5, 0.5, 1e-3, &mut best);
    let (_, a, b) = best;
    scan(a, b, 2e-3, 1e-5, &mut best);
    let (_, a, b) = best;
    scan(a, b, 2e-5, 1e-7, &mut best);
    best.0
}

#[test]
fn min_norm_matches_simplex_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let g = Matrix::from_row_major(3, 2, (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let alpha = min_norm_weights(&g);
        assert!((alpha.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let d = g.combine_rows(&alpha).unwrap();
        let ours = d.iter().map(|v| v * v).sum::<f64>();
        let oracle = grid_min_norm_sq(&g);
        assert!((ours - oracle).abs() <= 1e-6, "fw {ours} vs grid {oracle}");
    }
    let sym = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert_eq!(min_norm_weights(&sym), vec![0.5, 0.5]);
}
