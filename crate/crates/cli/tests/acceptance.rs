//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines always
//! show in `cargo test` output. Set `STCH_ACCEPTANCE_FULL=1` to also run the
//! full-budget benchmark table (slow). Numeric arguments select criteria,
//! e.g. `cargo test --test acceptance -- 1 8`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stch::metrics::hypervolume;
use stch::problems::{Problem, ProblemId};
use stch::psl::{batch_loss, loss_spec, predict, test_preferences, train, MlpModel, TrainConfig, PSL_DEFAULT_MU};
use stch::scalarize::{eval_stch, eval_tch, grad_stch, sample_preference};
use stch::solvers::{min_norm_residual, min_norm_weights, solve_scalarized, SolveConfig, StepSchedule};
use stch::{IdealPoint, Matrix, ObjectiveVector, Preference, ScalarizationKind, ScalarizationSpec};
use stch_cli::args::{Budget, RaceArgs, TableArgs, TrainArgs};
use stch_cli::race::{self, RaceSettings};
use stch_cli::table::{self, TableSettings};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Adds the runtime bound to a verdict.
fn timed(v: Verdict, elapsed: Duration, limit: Option<Duration>) -> Verdict {
    match limit {
        Some(limit) if elapsed > limit => verdict(false, format!("{}; runtime {elapsed:.1?} exceeds {limit:?}", v.detail)),
        _ => v,
    }
}

fn main() {
    let full = std::env::var("STCH_ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |id: u8| only.is_empty() || only.contains(&id);
    let criteria: Vec<(u8, &str, Option<Duration>, Box<dyn Fn() -> Verdict>)> = vec![
        (1, "bounded approximation", Some(Duration::from_secs(1)), Box::new(bounded_approximation)),
        (2, "gradient oracle", Some(Duration::from_secs(10)), Box::new(gradient_oracle)),
        (3, "stationarity certificate", None, Box::new(stationarity_certificate)),
        (4, "convergence race", Some(Duration::from_secs(30)), Box::new(convergence_race)),
        (5, "non-convex front coverage", Some(Duration::from_secs(300)), Box::new(concave_coverage)),
        (6, "benchmark table (desk budget)", Some(Duration::from_secs(20 * 60)), Box::new(|| benchmark_table(Budget::Desk))),
        (7, "hypervolume correctness", Some(Duration::from_secs(60)), Box::new(hypervolume_correctness)),
        (8, "min-norm solver", Some(Duration::from_secs(5)), Box::new(min_norm)),
        (9, "determinism", None, Box::new(determinism)),
    ];
    let mut failed = 0;
    let mut report = |id: u8, name: &str, limit: Option<Duration>, check: &dyn Fn() -> Verdict| {
        let started = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let v = timed(v, elapsed, limit);
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {id} [{name}]: {} ({}; {elapsed:.1?})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    };
    for (id, name, limit, check) in criteria.iter().filter(|c| selected(c.0)) {
        report(*id, name, *limit, check.as_ref());
    }
    if selected(6) && full {
        report(6, "benchmark table (full budget)", Some(Duration::from_secs(2 * 3600)), &|| benchmark_table(Budget::Full));
    } else if selected(6) {
        println!("criterion 6 [benchmark table (full budget)]: not run (set STCH_ACCEPTANCE_FULL=1)");
    }
    if failed > 0 {
        println!("{failed} criterion check(s) failed");
        std::process::exit(1);
    }
}

// 1 ---------------------------------------------------------------------

fn bounded_approximation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..10_000 {
        let m = rng.gen_range(2..=4);
        let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(-12.0..-10.0)).collect();
        let lambda = sample_preference(&mut rng, m, 0.0).unwrap();
        let mu = rng.gen_range(1e-3..=1.0);
        let fv = ObjectiveVector::new(f.clone()).unwrap();
        let s = eval_stch(&fv, &lambda, &ScalarizationSpec::stch(IdealPoint::new(z.clone()), mu).unwrap())
            .unwrap()
            .value;
        let t = eval_tch(&fv, &lambda, &ScalarizationSpec::tch(IdealPoint::new(z.clone()))).unwrap().0;
        // the TCH value itself, straight from the definition
        let direct = (0..m).map(|i| lambda.values()[i] * (f[i] - z[i])).fold(f64::NEG_INFINITY, f64::max);
        let lower = s - mu * (m as f64).ln() - t;
        let upper = t - s;
        worst = worst.max(lower).max(upper);
        if lower > 1e-12 || upper > 1e-12 || (t - direct).abs() > 1e-12 {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("10000 tuples, {violations} violations, worst excess {worst:.3e}"))
}

// 2 ---------------------------------------------------------------------

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn grad_stch_errors() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ids = [ProblemId::Toy, ProblemId::F2, ProblemId::F4, ProblemId::F6, ProblemId::HatchCover];
    (0..20)
        .map(|k| {
            let problem = Problem::with_dim(ids[k % ids.len()], 5).unwrap_or_else(|_| Problem::new(ids[k % ids.len()]));
            let x: Vec<f64> =
                problem.lower.iter().zip(&problem.upper).map(|(l, u)| l + (u - l) * rng.gen_range(0.1..0.9)).collect();
            let f = problem.evaluate(&x).unwrap();
            let lambda = sample_preference(&mut rng, problem.m, 0.05).unwrap();
            let scale = f.values().iter().fold(1e-3f64, |a, v| a.max(v.abs()));
            let z: Vec<f64> = f.values().iter().map(|v| v - 0.5 * scale).collect();
            let spec = ScalarizationSpec::stch(IdealPoint::new(z), scale * rng.gen_range(0.05..0.5)).unwrap();
            let analytic = grad_stch(&f, &problem.jacobian(&x).unwrap(), &lambda, &spec).unwrap();
            let g = |x: &[f64]| eval_stch(&problem.evaluate(x).unwrap(), &lambda, &spec).unwrap().value;
            let norm = analytic.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            (0..x.len())
                .map(|j| {
                    let h = 1e-6 * x[j].abs().max(1.0);
                    let (mut xp, mut xm) = (x.clone(), x.clone());
                    xp[j] += h;
                    xm[j] -= h;
                    ((g(&xp) - g(&xm)) / (2.0 * h) - analytic[j]).abs() / norm
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

fn prefs_matrix(prefs: &[Preference]) -> Array2<f64> {
    let m = prefs[0].len();
    Array2::from_shape_vec((prefs.len(), m), prefs.iter().flat_map(|p| p.values().to_vec()).collect()).unwrap()
}

fn backward_errors() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let problems = [
        Problem::with_dim(ProblemId::F1, 3).unwrap(),
        Problem::with_dim(ProblemId::F5, 3).unwrap(),
        Problem::new(ProblemId::DiskBrake),
        Problem::new(ProblemId::Toy),
    ];
    let kinds = [ScalarizationKind::SmoothTchebycheff, ScalarizationKind::Linear];
    let h = 1e-5;
    (0..20)
        .map(|k| {
            let problem = &problems[k % problems.len()];
            let norm = problem.reference_front(100).unwrap().normalization();
            let spec = loss_spec(kinds[k % 2], norm, rng.gen_range(0.01..0.5)).unwrap();
            let mut model = MlpModel::init(problem.m, problem.lower.clone(), problem.upper.clone(), 100 + k as u64).unwrap();
            let prefs: Vec<Preference> = (0..4).map(|_| sample_preference(&mut rng, problem.m, 0.01).unwrap()).collect();
            let (x, cache) = model.forward_batch(&prefs_matrix(&prefs)).unwrap();
            let (_, upstream) = batch_loss(problem, &spec, &x, &prefs).unwrap();
            let grad = model.backward(&cache, &upstream).unwrap().flatten();
            let theta = model.flatten();
            let mut loss = |t: &[f64]| {
                model.set_flat(t).unwrap();
                let (x, _) = model.forward_batch(&prefs_matrix(&prefs)).unwrap();
                batch_loss(problem, &spec, &x, &prefs).unwrap().0
            };
            // random unit direction through every parameter
            let mut v: Vec<f64> = (0..theta.len()).map(|_| standard_normal(&mut rng)).collect();
            let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= vn);
            let at = |s: f64| -> Vec<f64> { theta.iter().zip(&v).map(|(t, d)| t + s * d).collect() };
            let fd = (loss(&at(h)) - loss(&at(-h))) / (2.0 * h);
            let an: f64 = grad.iter().zip(&v).map(|(g, d)| g * d).sum();
            let dir_err = (fd - an).abs() / an.abs().max(1e-12);
            // plus the largest coordinates, relative to the gradient on them
            let mut coords: Vec<usize> = (0..theta.len()).collect();
            coords.sort_by(|&a, &b| grad[b].abs().total_cmp(&grad[a].abs()));
            coords.truncate(10);
            let (mut num, mut den) = (0.0, 0.0);
            for &j in &coords {
                let mut tp = theta.clone();
                tp[j] += h;
                let mut tm = theta.clone();
                tm[j] -= h;
                let fd = (loss(&tp) - loss(&tm)) / (2.0 * h);
                num += (fd - grad[j]).powi(2);
                den += grad[j].powi(2);
            }
            dir_err.max((num / den.max(1e-300)).sqrt())
        })
        .collect()
}

fn gradient_oracle() -> Verdict {
    let a = grad_stch_errors();
    let b = backward_errors();
    let worst_a = a.iter().cloned().fold(0.0, f64::max);
    let worst_b = b.iter().cloned().fold(0.0, f64::max);
    verdict(
        worst_a <= 1e-4 && worst_b <= 1e-4,
        format!("grad_stch max rel err {worst_a:.2e} over {}, backward max rel err {worst_b:.2e} over {}", a.len(), b.len()),
    )
}

// 3 ---------------------------------------------------------------------

fn stationarity_certificate() -> Verdict {
    let cases = [(ProblemId::Toy, 1), (ProblemId::F1, 5), (ProblemId::F2, 5), (ProblemId::F4, 5), (ProblemId::F5, 5)];
    let mut worst: f64 = 0.0;
    let mut counts = Vec::new();
    let mut pass = true;
    for (id, n) in cases {
        let problem = Problem::with_dim(id, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let mut certified = 0;
        for seed in 0..5 {
            let l1 = rng.gen_range(0.2..0.8);
            let lambda = Preference::new(vec![l1, 1.0 - l1]).unwrap();
            let spec = ScalarizationSpec::stch(IdealPoint::new(vec![-0.1, -0.1]), 0.1).unwrap();
            let cfg = SolveConfig {
                max_iters: 20_000,
                step: StepSchedule::Constant(0.05),
                seed,
                record_every: 1000,
                tolerance: 1e-8,
                x0: None,
            };
            let t = solve_scalarized(&problem, &spec, &lambda, &cfg).unwrap();
            let last = t.last().unwrap();
            if last.grad_norm > 1e-8 {
                continue;
            }
            certified += 1;
            let (f, jac) = problem.evaluate_with_jacobian(&last.x).unwrap();
            let w_bar = eval_stch(&f, &lambda, &spec).unwrap().normalized_weights();
            let combo = jac.combine_rows(&w_bar).unwrap();
            let r = combo.iter().map(|v| v * v).sum::<f64>().sqrt().max(min_norm_residual(&jac).1);
            worst = worst.max(r);
            pass &= r <= 1e-6;
        }
        pass &= certified > 0;
        counts.push(format!("{}:{certified}/5", problem.name()));
    }
    verdict(pass, format!("stationary solves {}, max residual {worst:.2e}", counts.join(" ")))
}

// 4 ---------------------------------------------------------------------

fn convergence_race() -> Verdict {
    let s = RaceSettings::resolve(RaceArgs::default()).unwrap();
    let c = race::curves(&s).unwrap();
    let behind = c
        .evals
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= 50)
        .filter(|(i, _)| c.mean_stch[*i] >= c.mean_tch[*i])
        .count();
    let stch_hit = c.first_below(&c.mean_stch, 1e-3);
    // TCH's hitting time, from a run long enough to observe it
    let long = RaceSettings { iters: 100_000, ..s.clone() };
    let lc = race::curves(&long).unwrap();
    let tch_hit = lc.first_below(&lc.mean_tch, 1e-3);
    let ratio_ok = matches!((stch_hit, tch_hit), (Some(a), Some(b)) if 2 * a <= b);
    verdict(
        behind == 0 && ratio_ok,
        format!(
            "{} trials; STCH mean gap not below TCH at {behind} eval counts >= 50; gap 1e-3 reached at {} (STCH) vs {} (TCH) evals; at {} evals mean gap {:.2e} (STCH) vs {:.2e} (TCH)",
            s.trials,
            stch_hit.map_or("never".into(), |e| e.to_string()),
            tch_hit.map_or("never".into(), |e| e.to_string()),
            s.iters + 1,
            c.mean_stch[s.iters],
            c.mean_tch[s.iters],
        ),
    )
}

// 5 ---------------------------------------------------------------------

fn concave_coverage() -> Verdict {
    let problem = Problem::new(ProblemId::F4);
    let norm = problem.reference_front(1000).unwrap().normalization();
    let prefs = test_preferences(2, 100, 0).unwrap();
    let f1 = |kind| -> Vec<f64> {
        let cfg = TrainConfig::new(loss_spec(kind, norm.clone(), PSL_DEFAULT_MU).unwrap(), 0);
        let model = train(&problem, &cfg).unwrap().model;
        predict(&model, &problem, &prefs).unwrap().iter().map(|(_, f)| norm.apply(f).unwrap()[0]).collect()
    };
    let mut stch = f1(ScalarizationKind::SmoothTchebycheff);
    stch.sort_by(|a, b| a.total_cmp(b));
    let gap = stch.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let ls = f1(ScalarizationKind::Linear);
    let ends = ls.iter().filter(|&&v| v <= 1e-2 || v >= 1.0 - 1e-2).count();
    verdict(gap <= 0.1 && ends >= 80, format!("STCH max f1 gap {gap:.4}; LS {ends}/100 within 1e-2 of an endpoint"))
}

// 6 ---------------------------------------------------------------------

fn benchmark_table(budget: Budget) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let args = TableArgs {
        train: TrainArgs { budget: Some(budget), out: Some(dir.path().to_path_buf()), ..Default::default() },
        ..Default::default()
    };
    let s = TableSettings::resolve(args).unwrap();
    let report = table::run(&s).unwrap();
    let f1 = |k| report.cell("F1", k).unwrap().mean_std().0;
    let f1_stch = f1(ScalarizationKind::SmoothTchebycheff);
    let f1_tch = f1(ScalarizationKind::Tchebycheff);
    let (wins, compared) = report.stch_wins();
    let needed = match budget {
        Budget::Desk => 6,
        Budget::Full => 8,
    };
    let failed = report.cells.iter().filter(|c| !c.ok()).count();
    let lost: Vec<&str> = ProblemId::SUITE
        .iter()
        .map(|id| id.name())
        .filter(|name| {
            let s = report.cell(name, ScalarizationKind::SmoothTchebycheff).map(|c| c.mean_std().0);
            let others = [ScalarizationKind::Linear, ScalarizationKind::Tchebycheff]
                .map(|k| report.cell(name, k).map(|c| c.mean_std().0));
            match (s, others) {
                (Some(s), [Some(a), Some(b)]) => !(s < a && s < b),
                _ => true,
            }
        })
        .collect();
    verdict(
        (1e-3..=5e-2).contains(&f1_stch) && wins >= needed && failed == 0,
        format!(
            "{} budget, {} seeds x {} iterations; F1 STCH mean ΔHV {f1_stch:.3e} (TCH {f1_tch:.3e}); STCH best on {wins}/{compared} (need {needed}), not best on [{}]; {failed} failed cells",
            budget.id(),
            s.train.seeds.len(),
            s.train.iterations,
            lost.join(", ")
        ),
    )
}

// 7 ---------------------------------------------------------------------

/// Uniform sampling of the box `[min, reference]`; returns the estimate and
/// its standard error.
fn mc_volume(points: &[Vec<f64>], reference: &[f64], samples: usize, seed: u64) -> (f64, f64) {
    let m = reference.len();
    let lo: Vec<f64> = (0..m).map(|i| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let box_volume: f64 = (0..m).map(|i| reference[i] - lo[i]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for i in 0..m {
            u[i] = lo[i] + (reference[i] - lo[i]) * rng.gen::<f64>();
        }
        if points.iter().any(|p| p.iter().zip(&u).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (box_volume * p, box_volume * (p * (1.0 - p) / samples as f64).sqrt())
}

fn hypervolume_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_z: f64 = 0.0;
    let mut pass = true;
    for m in [2, 3] {
        for set in 0..10 {
            let count = rng.gen_range(5..=20);
            let points: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    v.iter().map(|a| a / r + rng.gen_range(0.0..0.1)).collect()
                })
                .collect();
            let reference = vec![1.2; m];
            let exact = hypervolume(&points, &reference).unwrap().volume;
            let (est, se) = mc_volume(&points, &reference, 10_000_000, 100 * m as u64 + set);
            let z = (exact - est).abs() / se;
            worst_z = worst_z.max(z);
            pass &= z <= 3.0;
        }
    }
    let h2 = hypervolume(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[2.0, 2.0]).unwrap().volume;
    let h3 = hypervolume(&[vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]], &[2.0, 2.0, 2.0]).unwrap().volume;
    verdict(
        pass && h2 == 3.0 && h3 == 5.0,
        format!("20 sets, max |exact − MC| = {worst_z:.2} standard errors; hand values {h2} and {h3}"),
    )
}

// 8 ---------------------------------------------------------------------

/// Min norm over the 2-simplex by nested grids (spacing 1e-3, then 1e-5 and
/// 1e-7 around the incumbent).
fn grid_min_norm(g: &Matrix) -> f64 {
    // ‖Σ α_i g_i‖² = αᵀ G α with the Gram matrix G
    let gram: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| g.row(i).iter().zip(g.row(j)).map(|(p, q)| p * q).sum()).collect())
        .collect();
    let value = |a: f64, b: f64| {
        let w = [a, b, 1.0 - a - b];
        (0..3).map(|i| (0..3).map(|j| w[i] * gram[i][j] * w[j]).sum::<f64>()).sum::<f64>()
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut scan = |a0: f64, b0: f64, radius: f64, step: f64| {
        let k = (2.0 * radius / step).round() as i64;
        for i in 0..=k {
            let a = a0 - radius + i as f64 * step;
            if !(0.0..=1.0).contains(&a) {
                continue;
            }
            for j in 0..=k {
                let b = (b0 - radius + j as f64 * step).min(1.0 - a);
                if b < 0.0 {
                    continue;
                }
                let v = value(a, b);
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        (best.1, best.2)
    };
    let (a, b) = scan(0.5, 0.5, 0.5, 1e-3);
    let (a, b) = scan(a, b, 2e-3, 1e-5);
    scan(a, b, 2e-5, 1e-7);
    best.0.max(0.0).sqrt()
}

fn min_norm() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=4);
        let g = Matrix::from_row_major(3, n, (0..3 * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let d = g.combine_rows(&min_norm_weights(&g)).unwrap();
        let ours = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max((ours - grid_min_norm(&g)).abs());
    }
    let sym = min_norm_weights(&Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
    verdict(
        worst <= 1e-6 && sym == vec![0.5, 0.5],
        format!("50 instances, max |‖d‖ − grid| = {worst:.2e}; symmetric case {sym:?}"),
    )
}

// 9 ---------------------------------------------------------------------

fn files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Verdict {
    let commands: [&[&str]; 7] = [
        &["solve", "--problem", "toy", "--method", "stch", "--lambda", "0.5,0.5", "--iters", "200"],
        &["solve", "--problem", "RE24", "--method", "tch", "--iters", "300", "--resolution", "100"],
        &["solve", "--problem", "F5", "--method", "mgda", "--iters", "300"],
        &["race"],
        &["psl", "--problem", "RE37", "--method", "stch", "--seeds", "2", "--iterations", "40", "--resolution", "100"],
        &["table", "--problems", "F3,RE21", "--seeds", "2", "--iterations", "20", "--resolution", "100"],
        &["front", "--problem", "RE33", "--resolution", "100"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for (k, args) in commands.iter().enumerate() {
        let run = |tag: &str| {
            let out = dir.path().join(format!("{k}{tag}"));
            let status = Command::new(env!("CARGO_BIN_EXE_stch"))
                .args(*args)
                .arg("--out")
                .arg(&out)
                .env("RUST_LOG", "error")
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "{args:?} failed");
            files(&out)
        };
        let (a, b) = (run("a"), run("b"));
        compared += a.len();
        if a.is_empty() || a != b {
            mismatched.push(args[0]);
        }
    }
    verdict(
        mismatched.is_empty(),
        format!("{} commands run twice, {compared} files compared, mismatches: {mismatched:?}", commands.len()),
    )
}
