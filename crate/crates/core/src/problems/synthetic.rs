//! F1–F6: bi-objective problems with a position variable `x_1` and
//! coupling variables `x_2..x_n` split into odd (J1) and even (J2) index
//! sets (1-based). The Pareto set is `x_j = t_j(x_1)` for all `j ≥ 2`.

use std::f64::consts::PI;

use crate::linalg::Matrix;

/// Floor applied to `x_1` where a derivative has a `x_1^{p<1}` singularity.
const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Coupling {
    /// `(2 x_1 − 1)^2`
    Quadratic,
    /// `x_1^{0.5 (1 + 3 (j − 2) / (n − 2))}`
    Power,
    /// `sin(4π x_1 + jπ / n)`
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FrontShape {
    /// `f_2 = a_2 (1 − sqrt(x_1 / a_2))`
    Convex,
    /// `f_2 = a_2 (1 − (x_1 / a_2)^2)`
    Concave,
}

impl Coupling {
    /// Target and its derivative for 1-based index `j`.
    fn target(self, x1: f64, j: usize, n: usize) -> (f64, f64) {
        match self {
            Coupling::Quadratic => {
                let u = 2.0 * x1 - 1.0;
                (u * u, 4.0 * u)
            }
            Coupling::Power => {
                let p = 0.5 * (1.0 + 3.0 * (j as f64 - 2.0) / (n as f64 - 2.0));
                let d = if p < 1.0 {
                    p * x1.max(SINGULAR_FLOOR).powf(p - 1.0)
                } else {
                    p * x1.powf(p - 1.0)
                };
                (x1.powf(p), d)
            }
            Coupling::Sine => {
                let arg = 4.0 * PI * x1 + j as f64 * PI / n as f64;
                (arg.sin(), 4.0 * PI * arg.cos())
            }
        }
    }
}

/// Coupling targets `t_j(x_1)` for `j = 2..=n`, indexed by 0-based position.
pub(crate) fn pareto_decision(coupling: Coupling, x1: f64, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = x1;
    for j in 2..=n {
        x[j - 1] = coupling.target(x1, j, n).0;
    }
    x
}

struct Penalties {
    a1: f64,
    a2: f64,
    /// `∂a_k/∂x` for k = 1, 2
    da1: Vec<f64>,
    da2: Vec<f64>,
}

fn penalties(coupling: Coupling, x: &[f64], with_grad: bool) -> Penalties {
    let n = x.len();
    let x1 = x[0];
    let (mut s1, mut s2) = (0.0, 0.0);
    let (mut c1, mut c2) = (0usize, 0usize);
    let (mut da1, mut da2) = if with_grad {
        (vec![0.0; n], vec![0.0; n])
    } else {
        (Vec::new(), Vec::new())
    };
    for j in 2..=n {
        let (t, dt) = coupling.target(x1, j, n);
        let r = x[j - 1] - t;
        if j % 2 == 1 {
            s1 += r * r;
            c1 += 1;
            if with_grad {
                da1[j - 1] = 2.0 * r;
                da1[0] -= 2.0 * r * dt;
            }
        } else {
            s2 += r * r;
            c2 += 1;
            if with_grad {
                da2[j - 1] = 2.0 * r;
                da2[0] -= 2.0 * r * dt;
            }
        }
    }
    let (c1, c2) = (c1.max(1) as f64, c2.max(1) as f64);
    da1.iter_mut().for_each(|v| *v /= c1);
    da2.iter_mut().for_each(|v| *v /= c2);
    Penalties {
        a1: 1.0 + s1 / c1,
        a2: 1.0 + s2 / c2,
        da1,
        da2,
    }
}

pub(crate) fn evaluate(coupling: Coupling, shape: FrontShape, x: &[f64]) -> [f64; 2] {
    let p = penalties(coupling, x, false);
    let x1 = x[0];
    let f1 = p.a1 * x1;
    let f2 = match shape {
        FrontShape::Convex => p.a2 * (1.0 - (x1 / p.a2).sqrt()),
        FrontShape::Concave => p.a2 * (1.0 - (x1 / p.a2).powi(2)),
    };
    [f1, f2]
}

pub(crate) fn jacobian(coupling: Coupling, shape: FrontShape, x: &[f64]) -> Matrix {
    let n = x.len();
    let p = penalties(coupling, x, true);
    let x1 = x[0];
    let mut jac = Matrix::zeros(2, n);

    // f1 = a1 x1
    for k in 0..n {
        jac.set(0, k, x1 * p.da1[k]);
    }
    jac.set(0, 0, jac.get(0, 0) + p.a1);

    // f2 = g(x1, a2)
    let (df_dx1, df_da2) = match shape {
        FrontShape::Convex => {
            // a2 − sqrt(x1 a2)
            let root = (x1.max(SINGULAR_FLOOR) * p.a2).sqrt();
            (-p.a2 / (2.0 * root), 1.0 - x1 / (2.0 * root))
        }
        FrontShape::Concave => {
            // a2 − x1² / a2
            (-2.0 * x1 / p.a2, 1.0 + x1 * x1 / (p.a2 * p.a2))
        }
    };
    for k in 0..n {
        jac.set(1, k, df_da2 * p.da2[k]);
    }
    jac.set(1, 0, jac.get(1, 0) + df_dx1);
    jac
}
