//! Reference Pareto fronts and their CSV cache.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Problem, ProblemId};
use crate::error::{Error, Result};
use crate::metrics::{lex_cmp, nondominated_filter};
use crate::scalarize::Normalization;

/// Reference point = ideal + this factor × (nadir − ideal).
pub const REFERENCE_POINT_FACTOR: f64 = 1.1;

/// Evaluations per unit of resolution for the dense sweep.
const SWEEP_BUDGET_PER_RESOLUTION: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontSource {
    Analytic,
    DenseSweep,
}

impl FrontSource {
    fn as_str(self) -> &'static str {
        match self {
            FrontSource::Analytic => "Analytic",
            FrontSource::DenseSweep => "DenseSweep",
        }
    }
}

/// Non-dominated reference set with its hypervolume reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    pub problem: String,
    pub source: FrontSource,
    /// Sorted lexicographically.
    pub points: Vec<Vec<f64>>,
    pub reference_point: Vec<f64>,
}

impl ReferenceFront {
    /// Builds a front from arbitrary points: filters to the non-dominated
    /// subset and places the reference point beyond the nadir.
    pub fn from_points(problem: &str, source: FrontSource, points: Vec<Vec<f64>>) -> Result<Self> {
        let points = nondominated_filter(&points)?;
        if points.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "front for {problem} needs at least two points"
            )));
        }
        let (ideal, nadir) = bounding_box(&points);
        if ideal.iter().zip(&nadir).any(|(lo, hi)| !(hi > lo)) {
            return Err(Error::InvalidParameter(format!(
                "front for {problem} is degenerate in some objective"
            )));
        }
        let reference_point = ideal
            .iter()
            .zip(&nadir)
            .map(|(lo, hi)| lo + REFERENCE_POINT_FACTOR * (hi - lo))
            .collect();
        Ok(Self {
            problem: problem.to_string(),
            source,
            points,
            reference_point,
        })
    }

    pub fn num_objectives(&self) -> usize {
        self.reference_point.len()
    }

    /// Bounding box of the front as an objective normalization.
    pub fn normalization(&self) -> Normalization {
        let (ideal, nadir) = bounding_box(&self.points);
        Normalization::new(ideal, nadir).expect("validated at construction")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# problem={}", self.problem);
        let _ = writeln!(out, "# source={}", self.source.as_str());
        let _ = writeln!(out, "# reference_point={}", join(&self.reference_point));
        let header: Vec<String> = (1..=self.num_objectives()).map(|i| format!("f{i}")).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for p in &self.points {
            let _ = writeln!(out, "{}", join(p));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut problem = None;
        let mut source = None;
        let mut reference_point = None;
        let mut points = Vec::new();
        let mut saw_header = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad header line `{line}`")))?;
                match key {
                    "problem" => problem = Some(value.to_string()),
                    "source" => {
                        source = Some(match value {
                            "Analytic" => FrontSource::Analytic,
                            "DenseSweep" => FrontSource::DenseSweep,
                            other => return Err(Error::Parse(format!("unknown source `{other}`"))),
                        })
                    }
                    "reference_point" => reference_point = Some(parse_row(value)?),
                    _ => {}
                }
            } else if !saw_header {
                saw_header = true;
            } else {
                points.push(parse_row(line)?);
            }
        }
        let missing = |what: &str| Error::Parse(format!("front csv missing {what}"));
        Ok(Self {
            problem: problem.ok_or_else(|| missing("problem"))?,
            source: source.ok_or_else(|| missing("source"))?,
            points,
            reference_point: reference_point.ok_or_else(|| missing("reference_point"))?,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&fs::read_to_string(path)?)
    }

    /// Cache file name for a problem and resolution.
    pub fn cache_path(dir: &Path, problem: &Problem, resolution: usize) -> PathBuf {
        dir.join(format!("front_{}_r{}.csv", problem.name(), resolution))
    }

    /// Loads the front from `dir` when cached, otherwise computes and stores it.
    pub fn load_or_compute(problem: &Problem, resolution: usize, dir: &Path) -> Result<Self> {
        let path = Self::cache_path(dir, problem, resolution);
        if path.exists() {
            let front = Self::read_csv(&path)?;
            if front.problem == problem.name() {
                return Ok(front);
            }
        }
        let front = problem.reference_front(resolution)?;
        front.write_csv(&path)?;
        Ok(front)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_row(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        })
        .collect()
}

fn bounding_box(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = points[0].len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points {
        for i in 0..m {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Point `index` of the Halton sequence in `[0, 1)^dim` (dim ≤ 8).
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    PRIMES[..dim]
        .iter()
        .map(|&b| radical_inverse(index, b))
        .collect()
}

pub(super) fn reference_front(problem: &Problem, resolution: usize) -> Result<ReferenceFront> {
    if resolution < 100 {
        return Err(Error::InvalidParameter(format!(
            "front resolution must be >= 100, got {resolution}"
        )));
    }
    let t = |i: usize| i as f64 / (resolution - 1) as f64;
    let analytic = |f: &dyn Fn(f64) -> Vec<f64>| -> Vec<Vec<f64>> {
        (0..resolution).map(|i| f(t(i))).collect()
    };
    let (source, points) = match problem.id {
        ProblemId::F1 | ProblemId::F2 | ProblemId::F3 => {
            (FrontSource::Analytic, analytic(&|t| vec![t, 1.0 - t.sqrt()]))
        }
        ProblemId::F4 | ProblemId::F5 | ProblemId::F6 => {
            (FrontSource::Analytic, analytic(&|t| vec![t, 1.0 - t * t]))
        }
        ProblemId::Toy => (
            FrontSource::Analytic,
            analytic(&|x| vec![x * x, (x - 1.0) * (x - 1.0)]),
        ),
        _ => (FrontSource::DenseSweep, dense_sweep(problem, resolution)),
    };
    ReferenceFront::from_points(problem.name(), source, points)
}

/// Fraction of the box span covered by each local refinement neighbourhood.
const LOCAL_RADIUS: f64 = 0.05;

/// Half the budget scans the whole box with a Halton sequence; the other
/// half scans small neighbourhoods around the scan's non-dominated decisions.
fn dense_sweep(problem: &Problem, resolution: usize) -> Vec<Vec<f64>> {
    let budget = resolution * SWEEP_BUDGET_PER_RESOLUTION;
    let span: Vec<f64> = problem
        .lower
        .iter()
        .zip(&problem.upper)
        .map(|(l, u)| u - l)
        .collect();
    let global = budget / 2;
    let mut seeds = sweep(problem, global, |i| {
        halton_point(i as u64 + 1, problem.n)
            .iter()
            .zip(&problem.lower)
            .zip(&span)
            .map(|((u, l), s)| l + u * s)
            .collect()
    });
    seeds.sort_by(|a, b| lex_cmp(&a.1, &b.1));
    let per_seed = (budget - global) / seeds.len().max(1);
    let local = sweep(problem, per_seed * seeds.len(), |i| {
        let (x, _) = &seeds[i / per_seed];
        halton_point((i % per_seed) as u64 + 1, problem.n)
            .iter()
            .enumerate()
            .map(|(j, u)| {
                let v = x[j] + (2.0 * u - 1.0) * LOCAL_RADIUS * span[j];
                v.clamp(problem.lower[j], problem.upper[j])
            })
            .collect()
    });
    seeds
        .into_iter()
        .chain(local)
        .map(|(_, f)| f)
        .collect()
}

/// Evaluates `point(i)` for `i < count` in parallel chunks and returns the
/// non-dominated `(x, f)` pairs in a deterministic order.
fn sweep<P>(problem: &Problem, count: usize, point: P) -> Vec<(Vec<f64>, Vec<f64>)>
where
    P: Fn(usize) -> Vec<f64> + Sync,
{
    const CHUNK: usize = 4096;
    let chunks: Vec<Vec<(Vec<f64>, Vec<f64>)>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(count);
            let evaluated = (start..end).filter_map(|i| {
                let x = point(i);
                problem.evaluate(&x).ok().map(|f| (x, f.into_inner()))
            });
            nondominated_pairs(evaluated.collect())
        })
        .collect();
    nondominated_pairs(chunks.into_iter().flatten().collect())
}

fn nondominated_pairs(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Vec<(Vec<f64>, Vec<f64>)> {
    let objectives: Vec<Vec<f64>> = pairs.iter().map(|(_, f)| f.clone()).collect();
    let kept = nondominated_filter(&objectives).unwrap_or_default();
    // one decision per surviving objective vector, first occurrence wins
    let mut out = Vec::with_capacity(kept.len());
    let mut sorted: Vec<(Vec<f64>, Vec<f64>)> = pairs;
    sorted.sort_by(|a, b| lex_cmp(&a.1, &b.1));
    let mut k = kept.iter().peekable();
    for (x, f) in sorted {
        match k.peek() {
            Some(target) if **target == f => {
                out.push((x, f));
                k.next();
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_fronts_have_expected_points() {
        let f1 = Problem::new(ProblemId::F1).reference_front(101).unwrap();
        assert_eq!(f1.source, FrontSource::Analytic);
        assert!(f1.points.contains(&vec![0.0, 1.0]));
        assert!(f1.points.contains(&vec![1.0, 0.0]));
        let f4 = Problem::new(ProblemId::F4).reference_front(101).unwrap();
        assert!(f4.points.contains(&vec![0.5, 0.75]));
        assert!((f4.reference_point[0] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn resolution_floor() {
        assert!(Problem::new(ProblemId::F1).reference_front(99).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = Problem::new(ProblemId::F2).reference_front(100).unwrap();
        let back = ReferenceFront::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn halton_is_in_unit_cube() {
        for i in 1..200 {
            assert!(halton_point(i, 4).iter().all(|&v| (0.0..1.0).contains(&v)));
        }
        assert_eq!(halton_point(1, 2), vec![0.5, 1.0 / 3.0]);
    }
}
