//! Minimum-norm point in the convex hull of objective gradients.

use crate::linalg::{dot, Matrix};

/// Frank-Wolfe iteration cap for three or more gradients.
pub const FW_MAX_ITERS: usize = 200;
/// Duality-gap stopping threshold, relative to the current objective.
pub const FW_GAP_TOL: f64 = 1e-9;

/// Weights `α` on the simplex minimizing `‖Σ α_i g_i‖²` where `g_i` are the
/// rows of `gradients`.
///
/// Two gradients are solved in closed form. Three or more use pairwise
/// Frank-Wolfe on the Gram matrix with exact line search; the Frank-Wolfe
/// gap bounds the suboptimality at exit.
pub fn min_norm_weights(gradients: &Matrix) -> Vec<f64> {
    let m = gradients.rows();
    match m {
        0 => Vec::new(),
        1 => vec![1.0],
        2 => {
            let (g1, g2) = (gradients.row(0), gradients.row(1));
            let diff_sq: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
            if diff_sq <= f64::MIN_POSITIVE {
                return vec![0.5, 0.5];
            }
            // argmin over a of ‖a g1 + (1 − a) g2‖²
            let num: f64 = g2.iter().zip(g1).map(|(b, a)| b * (b - a)).sum();
            let a = (num / diff_sq).clamp(0.0, 1.0);
            vec![a, 1.0 - a]
        }
        _ => frank_wolfe(&gram(gradients)),
    }
}

fn gram(g: &Matrix) -> Vec<Vec<f64>> {
    let m = g.rows();
    let mut k = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = dot(g.row(i), g.row(j));
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

fn frank_wolfe(gram: &[Vec<f64>]) -> Vec<f64> {
    let m = gram.len();
    let mut alpha = vec![1.0 / m as f64; m];
    let mut g_alpha: Vec<f64> = (0..m).map(|i| dot(&gram[i], &alpha)).collect();
    for _ in 0..FW_MAX_ITERS {
        let quad = dot(&alpha, &g_alpha);
        let (toward, &g_min) = g_alpha
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("m >= 3");
        // gradient of αᵀKα is 2Kα; the gap is relative so near-stationary
        // certificates stay accurate
        if 2.0 * (quad - g_min) <= (FW_GAP_TOL * quad).max(1e-24) {
            break;
        }
        let (away, _) = g_alpha
            .iter()
            .enumerate()
            .filter(|&(i, _)| alpha[i] > 0.0)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("support is non-empty");
        if away == toward {
            break;
        }
        let curvature = gram[toward][toward] + gram[away][away] - 2.0 * gram[toward][away];
        let slope = g_alpha[toward] - g_alpha[away];
        let max_step = alpha[away];
        let step = if curvature > 0.0 {
            (-slope / curvature).clamp(0.0, max_step)
        } else {
            max_step
        };
        if step == 0.0 {
            break;
        }
        alpha[toward] += step;
        alpha[away] -= step;
        if alpha[away] < 1e-15 {
            alpha[toward] += alpha[away];
            alpha[away] = 0.0;
        }
        for (i, ga) in g_alpha.iter_mut().enumerate() {
            *ga = dot(&gram[i], &alpha);
        }
    }
    alpha
}

/// Norm of the min-norm combination `‖Σ α_i g_i‖` together with `α`.
pub fn min_norm_residual(gradients: &Matrix) -> (Vec<f64>, f64) {
    let alpha = min_norm_weights(gradients);
    let d = gradients.combine_rows(&alpha).expect("shape matches");
    let n = dot(&d, &d).sqrt();
    (alpha, n)
}
