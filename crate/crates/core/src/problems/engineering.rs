//! Engineering design problems: four-bar truss, hatch cover, disk brake,
//! gear train and rocket injector.
//!
//! Constraint-violation objectives use the hinge `max{−g, 0}`; its
//! derivative is `−∇g` where `−g > 0` and zero otherwise (including the kink).

use std::f64::consts::SQRT_2;

use crate::linalg::Matrix;

pub(crate) mod bar_truss {
    use super::*;

    pub const F: f64 = 10.0;
    pub const E: f64 = 2e5;
    pub const L: f64 = 200.0;
    pub const SIGMA: f64 = 10.0;
    pub const A: f64 = F / SIGMA;

    pub fn bounds() -> (Vec<f64>, Vec<f64>) {
        (
            vec![A, SQRT_2 * A, SQRT_2 * A, A],
            vec![3.0 * A, 3.0 * A, 3.0 * A, 3.0 * A],
        )
    }

    pub fn evaluate(x: &[f64]) -> Vec<f64> {
        let f1 = L * (2.0 * x[0] + SQRT_2 * x[1] + x[2].sqrt() + x[3]);
        let f2 = F * L / E
            * (2.0 / x[0] + 2.0 * SQRT_2 / x[1] - 2.0 * SQRT_2 / x[2] + 2.0 / x[3]);
        vec![f1, f2]
    }

    pub fn jacobian(x: &[f64]) -> Matrix {
        let c = F * L / E;
        let rows = [
            vec![2.0 * L, SQRT_2 * L, L / (2.0 * x[2].sqrt()), L],
            vec![
                -2.0 * c / (x[0] * x[0]),
                -2.0 * SQRT_2 * c / (x[1] * x[1]),
                2.0 * SQRT_2 * c / (x[2] * x[2]),
                -2.0 * c / (x[3] * x[3]),
            ],
        ];
        Matrix::from_rows(&rows).expect("fixed shape")
    }
}

pub(crate) mod hatch_cover {
    use super::*;

    const E: f64 = 700_000.0;
    const SIGMA_B_MAX: f64 = 700.0;
    const TAU_MAX: f64 = 450.0;
    const DELTA_MAX: f64 = 1.5;

    pub fn bounds() -> (Vec<f64>, Vec<f64>) {
        (vec![0.5, 0.5], vec![4.0, 50.0])
    }

    /// Violations `−g_i` and their gradients.
    fn violations(x: &[f64]) -> [(f64, [f64; 2]); 4] {
        let (x1, x2) = (x[0], x[1]);
        let sigma_b = 4500.0 / (x1 * x2);
        let tau = 1800.0 / x2;
        let delta = 56.2e4 / (E * x1 * x2 * x2);
        let sigma_k = E * x1 * x1 / 100.0;
        let ratio = sigma_b / sigma_k;
        [
            (
                sigma_b / SIGMA_B_MAX - 1.0,
                [-sigma_b / x1 / SIGMA_B_MAX, -sigma_b / x2 / SIGMA_B_MAX],
            ),
            (tau / TAU_MAX - 1.0, [0.0, -tau / x2 / TAU_MAX]),
            (
                delta / DELTA_MAX - 1.0,
                [-delta / x1 / DELTA_MAX, -2.0 * delta / x2 / DELTA_MAX],
            ),
            (ratio - 1.0, [-3.0 * ratio / x1, -ratio / x2]),
        ]
    }

    pub fn evaluate(x: &[f64]) -> Vec<f64> {
        let f1 = x[0] + 120.0 * x[1];
        let f2 = violations(x).iter().map(|(v, _)| v.max(0.0)).sum();
        vec![f1, f2]
    }

    pub fn jacobian(x: &[f64]) -> Matrix {
        let mut g2 = [0.0; 2];
        for (v, grad) in violations(x) {
            if v > 0.0 {
                g2[0] += grad[0];
                g2[1] += grad[1];
            }
        }
        Matrix::from_rows(&[vec![1.0, 120.0], g2.to_vec()]).expect("fixed shape")
    }
}

// the published formulation uses the literal 3.14
#[allow(clippy::approx_constant)]
pub(crate) mod disk_brake {
    use super::*;

    pub fn bounds() -> (Vec<f64>, Vec<f64>) {
        (vec![55.0, 75.0, 1000.0, 11.0], vec![80.0, 110.0, 3000.0, 20.0])
    }

    fn violations(x: &[f64]) -> [(f64, [f64; 4]); 4] {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let a = x2 * x2 - x1 * x1;
        let b = x2 * x2 * x2 - x1 * x1 * x1;
        let (da1, da2) = (-2.0 * x1, 2.0 * x2);
        let (db1, db2) = (-3.0 * x1 * x1, 3.0 * x2 * x2);

        // −g2 = x3 / (3.14 a) − 0.4
        let v2 = x3 / (3.14 * a) - 0.4;
        let q2 = -x3 / (3.14 * a * a);
        // −g3 = 2.22e-3 x3 b / a² − 1
        let u = b / (a * a);
        let du1 = (db1 * a - 2.0 * b * da1) / (a * a * a);
        let du2 = (db2 * a - 2.0 * b * da2) / (a * a * a);
        // −g4 = 900 − 2.66e-2 x3 x4 b / a
        let w = b / a;
        let dw1 = (db1 * a - b * da1) / (a * a);
        let dw2 = (db2 * a - b * da2) / (a * a);
        let k4 = 2.66e-2;

        [
            ((20.0 - (x2 - x1)), [1.0, -1.0, 0.0, 0.0]),
            (v2, [q2 * da1, q2 * da2, 1.0 / (3.14 * a), 0.0]),
            (
                2.22e-3 * x3 * u - 1.0,
                [2.22e-3 * x3 * du1, 2.22e-3 * x3 * du2, 2.22e-3 * u, 0.0],
            ),
            (
                900.0 - k4 * x3 * x4 * w,
                [
                    -k4 * x3 * x4 * dw1,
                    -k4 * x3 * x4 * dw2,
                    -k4 * x4 * w,
                    -k4 * x3 * w,
                ],
            ),
        ]
    }

    pub fn evaluate(x: &[f64]) -> Vec<f64> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let a = x2 * x2 - x1 * x1;
        let b = x2 * x2 * x2 - x1 * x1 * x1;
        let f1 = 4.9e-5 * a * (x4 - 1.0);
        let f2 = 9.82e6 * a / (x3 * x4 * b);
        let f3 = violations(x).iter().map(|(v, _)| v.max(0.0)).sum();
        vec![f1, f2, f3]
    }

    pub fn jacobian(x: &[f64]) -> Matrix {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let a = x2 * x2 - x1 * x1;
        let b = x2 * x2 * x2 - x1 * x1 * x1;
        let c = 4.9e-5;
        let row1 = vec![c * -2.0 * x1 * (x4 - 1.0), c * 2.0 * x2 * (x4 - 1.0), 0.0, c * a];

        let f2 = 9.82e6 * a / (x3 * x4 * b);
        let s = 9.82e6 / (x3 * x4);
        let dq1 = (-2.0 * x1 * b + 3.0 * x1 * x1 * a) / (b * b);
        let dq2 = (2.0 * x2 * b - 3.0 * x2 * x2 * a) / (b * b);
        let row2 = vec![s * dq1, s * dq2, -f2 / x3, -f2 / x4];

        let mut row3 = vec![0.0; 4];
        for (v, grad) in violations(x) {
            if v > 0.0 {
                row3.iter_mut().zip(grad).for_each(|(r, g)| *r += g);
            }
        }
        Matrix::from_rows(&[row1, row2, row3]).expect("fixed shape")
    }
}

pub(crate) mod gear_train {
    use super::*;

    pub const TARGET_RATIO: f64 = 6.931;

    pub fn bounds() -> (Vec<f64>, Vec<f64>) {
        (vec![12.0; 4], vec![60.0; 4])
    }

    fn ratio(x: &[f64]) -> f64 {
        x[2] * x[3] / (x[0] * x[1])
    }

    pub fn evaluate(x: &[f64]) -> Vec<f64> {
        let f1 = (TARGET_RATIO - ratio(x)).abs();
        let f2 = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let f3 = (f1 / TARGET_RATIO - 0.5).max(0.0);
        vec![f1, f2, f3]
    }

    pub fn jacobian(x: &[f64]) -> Matrix {
        let r = ratio(x);
        let dr = [-r / x[0], -r / x[1], r / x[2], r / x[3]];
        let diff = TARGET_RATIO - r;
        // d|u|/du taken as 0 at u = 0
        let sign = if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        };
        let row1: Vec<f64> = dr.iter().map(|d| -sign * d).collect();

        let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let k = x.iter().position(|&v| v == max).unwrap_or(0);
        let mut row2 = vec![0.0; 4];
        row2[k] = 1.0;

        let row3 = if diff.abs() / TARGET_RATIO - 0.5 > 0.0 {
            row1.iter().map(|v| v / TARGET_RATIO).collect()
        } else {
            vec![0.0; 4]
        };
        Matrix::from_rows(&[row1, row2, row3]).expect("fixed shape")
    }
}

pub(crate) mod rocket_injector {
    use super::*;

    /// `(coefficient, exponents of x1..x4)`
    type Term = (f64, [u8; 4]);

    const F1: &[Term] = &[
        (0.692, [0, 0, 0, 0]),
        (0.477, [1, 0, 0, 0]),
        (-0.687, [0, 1, 0, 0]),
        (-0.080, [0, 0, 1, 0]),
        (-0.0650, [0, 0, 0, 1]),
        (-0.167, [2, 0, 0, 0]),
        (-0.0129, [1, 1, 0, 0]),
        (0.0796, [0, 2, 0, 0]),
        (-0.00634, [1, 0, 1, 0]),
        (-0.0257, [0, 1, 1, 0]),
        (0.0877, [0, 0, 2, 0]),
        (-0.0521, [1, 0, 0, 1]),
        (0.00156, [0, 1, 0, 1]),
        (0.00198, [0, 0, 1, 1]),
        (0.0184, [0, 0, 0, 2]),
    ];

    const F2: &[Term] = &[
        (0.153, [0, 0, 0, 0]),
        (0.322, [1, 0, 0, 0]),
        (-0.396, [0, 1, 0, 0]),
        (-0.424, [0, 0, 1, 0]),
        (-0.0226, [0, 0, 0, 1]),
        (-0.175, [2, 0, 0, 0]),
        (-0.0185, [1, 1, 0, 0]),
        (0.0701, [0, 2, 0, 0]),
        (-0.251, [1, 0, 1, 0]),
        (-0.179, [0, 1, 1, 0]),
        (0.0150, [0, 0, 2, 0]),
        (-0.0134, [1, 0, 0, 1]),
        (0.0296, [0, 1, 0, 1]),
        (0.0752, [0, 0, 1, 1]),
        (0.0192, [0, 0, 0, 2]),
    ];

    const F3: &[Term] = &[
        (0.370, [0, 0, 0, 0]),
        (0.205, [1, 0, 0, 0]),
        (-0.0307, [0, 1, 0, 0]),
        (-0.108, [0, 0, 1, 0]),
        (-1.019, [0, 0, 0, 1]),
        (-0.135, [2, 0, 0, 0]),
        (-0.0141, [1, 1, 0, 0]),
        (0.0998, [0, 2, 0, 0]),
        (-0.208, [1, 0, 1, 0]),
        (-0.0301, [0, 1, 1, 0]),
        (0.226, [0, 0, 2, 0]),
        (-0.353, [1, 0, 0, 1]),
        (0.0497, [0, 0, 1, 1]),
        (0.423, [0, 0, 0, 2]),
        (0.202, [2, 1, 0, 0]),
        (-0.281, [2, 0, 1, 0]),
        (-0.342, [1, 2, 0, 0]),
        (-0.245, [0, 2, 1, 0]),
        (0.281, [0, 1, 2, 0]),
        (-0.184, [1, 0, 0, 2]),
        (-0.281, [1, 1, 1, 0]),
    ];

    pub fn bounds() -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; 4], vec![1.0; 4])
    }

    fn monomial(x: &[f64], e: &[u8; 4]) -> f64 {
        x.iter().zip(e).map(|(v, &p)| v.powi(p as i32)).product()
    }

    fn poly(terms: &[Term], x: &[f64]) -> f64 {
        terms.iter().map(|(c, e)| c * monomial(x, e)).sum()
    }

    fn poly_grad(terms: &[Term], x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; 4];
        for (c, e) in terms {
            for k in 0..4 {
                if e[k] == 0 {
                    continue;
                }
                let mut d = *e;
                d[k] -= 1;
                g[k] += c * e[k] as f64 * monomial(x, &d);
            }
        }
        g
    }

    pub fn evaluate(x: &[f64]) -> Vec<f64> {
        vec![poly(F1, x), poly(F2, x), poly(F3, x)]
    }

    pub fn jacobian(x: &[f64]) -> Matrix {
        Matrix::from_rows(&[poly_grad(F1, x), poly_grad(F2, x), poly_grad(F3, x)])
            .expect("fixed shape")
    }
}
