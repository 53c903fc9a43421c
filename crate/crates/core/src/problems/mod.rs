//! Benchmark problems with analytic objectives, Jacobians and box bounds.

mod engineering;
mod front;
mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::scalarize::ObjectiveVector;

pub use front::{halton_point, FrontSource, ReferenceFront};
use synthetic::{Coupling, FrontShape};

/// Decision dimension of F1–F6 unless overridden.
pub const DEFAULT_SYNTHETIC_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    /// `f1 = x², f2 = (x − 1)²` on `[−1, 2]`; the convergence-race testbed.
    Toy,
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    BarTruss,
    HatchCover,
    DiskBrake,
    GearTrain,
    RocketInjector,
}

impl ProblemId {
    /// The eleven problems of the benchmark table, in column order.
    pub const SUITE: [ProblemId; 11] = [
        ProblemId::F1,
        ProblemId::F2,
        ProblemId::F3,
        ProblemId::F4,
        ProblemId::F5,
        ProblemId::F6,
        ProblemId::BarTruss,
        ProblemId::HatchCover,
        ProblemId::DiskBrake,
        ProblemId::GearTrain,
        ProblemId::RocketInjector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Toy => "toy",
            ProblemId::F1 => "F1",
            ProblemId::F2 => "F2",
            ProblemId::F3 => "F3",
            ProblemId::F4 => "F4",
            ProblemId::F5 => "F5",
            ProblemId::F6 => "F6",
            ProblemId::BarTruss => "BarTruss",
            ProblemId::HatchCover => "HatchCover",
            ProblemId::DiskBrake => "DiskBrake",
            ProblemId::GearTrain => "GearTrain",
            ProblemId::RocketInjector => "RocketInjector",
        }
    }

    /// Accepts display names, the RE codes (`RE21`, …) and is case-insensitive.
    pub fn from_name(name: &str) -> Result<Self> {
        let id = match name.to_ascii_lowercase().as_str() {
            "toy" => ProblemId::Toy,
            "f1" => ProblemId::F1,
            "f2" => ProblemId::F2,
            "f3" => ProblemId::F3,
            "f4" => ProblemId::F4,
            "f5" => ProblemId::F5,
            "f6" => ProblemId::F6,
            "bartruss" | "re21" => ProblemId::BarTruss,
            "hatchcover" | "re24" => ProblemId::HatchCover,
            "diskbrake" | "re33" => ProblemId::DiskBrake,
            "geartrain" | "re36" => ProblemId::GearTrain,
            "rocketinjector" | "re37" => ProblemId::RocketInjector,
            _ => return Err(Error::UnknownProblem(name.to_string())),
        };
        Ok(id)
    }

    fn synthetic(self) -> Option<(Coupling, FrontShape)> {
        use Coupling::*;
        use FrontShape::*;
        Some(match self {
            ProblemId::F1 => (Quadratic, Convex),
            ProblemId::F2 => (Power, Convex),
            ProblemId::F3 => (Sine, Convex),
            ProblemId::F4 => (Quadratic, Concave),
            ProblemId::F5 => (Power, Concave),
            ProblemId::F6 => (Sine, Concave),
            _ => return None,
        })
    }

    pub fn is_synthetic(self) -> bool {
        self.synthetic().is_some()
    }

    pub fn num_objectives(self) -> usize {
        match self {
            ProblemId::DiskBrake | ProblemId::GearTrain | ProblemId::RocketInjector => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An evaluatable problem: objectives, Jacobian and box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: ProblemId,
    pub n: usize,
    pub m: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per-variable integrality flag (gear train only).
    pub integrality: Vec<bool>,
    /// When set, `evaluate` rejects non-integral values of flagged variables.
    pub enforce_integrality: bool,
}

impl Problem {
    pub fn new(id: ProblemId) -> Self {
        Self::with_dim(id, DEFAULT_SYNTHETIC_DIM).expect("default dimension is valid")
    }

    /// Builds a problem; `n` is only honoured by F1–F6 (which need `n ≥ 3`).
    pub fn with_dim(id: ProblemId, n: usize) -> Result<Self> {
        let (lower, upper) = match id {
            ProblemId::Toy => (vec![-1.0], vec![2.0]),
            ProblemId::F1 | ProblemId::F2 | ProblemId::F4 | ProblemId::F5 => {
                check_synthetic_dim(n)?;
                (vec![0.0; n], vec![1.0; n])
            }
            ProblemId::F3 | ProblemId::F6 => {
                check_synthetic_dim(n)?;
                let mut lo = vec![-1.0; n];
                lo[0] = 0.0;
                (lo, vec![1.0; n])
            }
            ProblemId::BarTruss => engineering::bar_truss::bounds(),
            ProblemId::HatchCover => engineering::hatch_cover::bounds(),
            ProblemId::DiskBrake => engineering::disk_brake::bounds(),
            ProblemId::GearTrain => engineering::gear_train::bounds(),
            ProblemId::RocketInjector => engineering::rocket_injector::bounds(),
        };
        let n = lower.len();
        Ok(Self {
            id,
            n,
            m: id.num_objectives(),
            lower,
            upper,
            integrality: vec![id == ProblemId::GearTrain; n],
            enforce_integrality: false,
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(Self::new(ProblemId::from_name(name)?))
    }

    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn with_integrality_enforced(mut self, enforce: bool) -> Self {
        self.enforce_integrality = enforce;
        self
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        for (i, &v) in x.iter().enumerate() {
            if !(v >= self.lower[i] && v <= self.upper[i]) {
                return Err(Error::OutOfBounds {
                    index: i,
                    value: v,
                    lower: self.lower[i],
                    upper: self.upper[i],
                });
            }
            if self.enforce_integrality && self.integrality[i] && v.fract() != 0.0 {
                return Err(Error::NonInteger { index: i, value: v });
            }
        }
        Ok(())
    }

    fn raw_values(&self, x: &[f64]) -> Vec<f64> {
        if let Some((c, s)) = self.id.synthetic() {
            return synthetic::evaluate(c, s, x).to_vec();
        }
        match self.id {
            ProblemId::Toy => vec![x[0] * x[0], (x[0] - 1.0) * (x[0] - 1.0)],
            ProblemId::BarTruss => engineering::bar_truss::evaluate(x),
            ProblemId::HatchCover => engineering::hatch_cover::evaluate(x),
            ProblemId::DiskBrake => engineering::disk_brake::evaluate(x),
            ProblemId::GearTrain => engineering::gear_train::evaluate(x),
            ProblemId::RocketInjector => engineering::rocket_injector::evaluate(x),
            _ => unreachable!("synthetic handled above"),
        }
    }

    /// Objective values at `x`, which must lie in the box.
    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveVector> {
        self.check_input(x)?;
        ObjectiveVector::new(self.raw_values(x))
    }

    /// Evaluates with integer-flagged variables rounded to the nearest integer.
    pub fn evaluate_rounded(&self, x: &[f64]) -> Result<ObjectiveVector> {
        check_len(self.n, x.len())?;
        let rounded: Vec<f64> = x
            .iter()
            .zip(&self.integrality)
            .map(|(&v, &int)| if int { v.round() } else { v })
            .collect();
        self.evaluate(&rounded)
    }

    /// Analytic m × n Jacobian at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        self.check_input(x)?;
        let jac = if let Some((c, s)) = self.id.synthetic() {
            synthetic::jacobian(c, s, x)
        } else {
            match self.id {
                ProblemId::Toy => {
                    Matrix::from_row_major(2, 1, vec![2.0 * x[0], 2.0 * (x[0] - 1.0)])?
                }
                ProblemId::BarTruss => engineering::bar_truss::jacobian(x),
                ProblemId::HatchCover => engineering::hatch_cover::jacobian(x),
                ProblemId::DiskBrake => engineering::disk_brake::jacobian(x),
                ProblemId::GearTrain => engineering::gear_train::jacobian(x),
                ProblemId::RocketInjector => engineering::rocket_injector::jacobian(x),
                _ => unreachable!("synthetic handled above"),
            }
        };
        if !jac.is_finite() {
            return Err(Error::NonFinite(format!("{} jacobian at {x:?}", self.name())));
        }
        Ok(jac)
    }

    /// Values and Jacobian together.
    pub fn evaluate_with_jacobian(&self, x: &[f64]) -> Result<(ObjectiveVector, Matrix)> {
        Ok((self.evaluate(x)?, self.jacobian(x)?))
    }

    /// A decision vector on the Pareto set whose first coordinate is `x1`
    /// (F1–F6 only).
    pub fn pareto_decision(&self, x1: f64) -> Option<Vec<f64>> {
        self.id
            .synthetic()
            .map(|(c, _)| synthetic::pareto_decision(c, x1, self.n))
    }

    /// Reference Pareto front: analytic for F1–F6 and the toy, a dense
    /// low-discrepancy sweep of the box, refined around its non-dominated
    /// points, otherwise.
    pub fn reference_front(&self, resolution: usize) -> Result<ReferenceFront> {
        front::reference_front(self, resolution)
    }
}

fn check_synthetic_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "synthetic problems need n >= 3, got {n}"
        )));
    }
    Ok(())
}

/// The eleven shipped benchmark problems with default dimensions.
pub fn list_problems() -> Vec<Problem> {
    ProblemId::SUITE.iter().map(|&id| Problem::new(id)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog() {
        let all = list_problems();
        assert_eq!(all.len(), 11);
        let brake = Problem::by_name("RE33").unwrap();
        assert_eq!(brake.m, 3);
        let gear = Problem::by_name("GearTrain").unwrap();
        assert!(gear.integrality.iter().all(|&b| b));
        assert_eq!(gear.lower, vec![12.0; 4]);
        assert_eq!(gear.upper, vec![60.0; 4]);
        for p in &all {
            assert!(p.lower.iter().zip(&p.upper).all(|(l, u)| l < u));
            assert!(p.m == 2 || p.m == 3);
        }
        assert!(matches!(Problem::by_name("zdt1"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn f1_and_f4_hand_values() {
        let f1 = Problem::with_dim(ProblemId::F1, 6).unwrap();
        let f = f1.evaluate(&[0.25; 6]).unwrap();
        assert!((f.values()[0] - 0.25).abs() < 1e-15);
        assert!((f.values()[1] - 0.5).abs() < 1e-15);
        let f4 = Problem::with_dim(ProblemId::F4, 6).unwrap();
        let f = f4.evaluate(&[0.25; 6]).unwrap();
        assert!((f.values()[1] - 0.9375).abs() < 1e-15);
    }

    #[test]
    fn out_of_bounds_rejected() {
        let p = Problem::new(ProblemId::RocketInjector);
        assert!(matches!(
            p.evaluate(&[0.5, 1.5, 0.5, 0.5]),
            Err(Error::OutOfBounds { index: 1, .. })
        ));
        assert!(matches!(p.evaluate(&[0.5; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gear_integrality_modes() {
        let p = Problem::new(ProblemId::GearTrain);
        let x = [20.5, 30.0, 40.0, 50.0];
        assert!(p.evaluate(&x).is_ok());
        let strict = p.clone().with_integrality_enforced(true);
        assert!(matches!(strict.evaluate(&x), Err(Error::NonInteger { index: 0, .. })));
        let r = strict.evaluate_rounded(&x).unwrap();
        assert_eq!(r, strict.evaluate(&[21.0, 30.0, 40.0, 50.0]).unwrap());
    }

    #[test]
    fn synthetic_dim_validation() {
        assert!(Problem::with_dim(ProblemId::F2, 2).is_err());
        assert_eq!(Problem::with_dim(ProblemId::F3, 8).unwrap().lower[1], -1.0);
    }
}
