//! Exact hypervolume for two and three objectives and a Monte Carlo oracle.
//!
//! Points that do not strictly dominate the reference point are dropped and
//! counted rather than rejected.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dominance::{nondominated_filter, Key};
use crate::error::{check_len, Error, Result};

/// Hypervolume together with the number of points excluded for not
/// dominating the reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypervolume {
    pub volume: f64,
    pub dropped: usize,
}

fn admissible(points: &[Vec<f64>], reference: &[f64]) -> Result<(Vec<Vec<f64>>, usize)> {
    let mut kept = Vec::with_capacity(points.len());
    for p in points {
        check_len(reference.len(), p.len())?;
        if p.iter().zip(reference).all(|(v, r)| v < r) {
            kept.push(p.clone());
        }
    }
    let dropped = points.len() - kept.len();
    Ok((nondominated_filter(&kept)?, dropped))
}

/// Exact 2-D hypervolume by a sweep over `f1`.
pub fn hypervolume_2d(points: &[Vec<f64>], reference: &[f64]) -> Result<Hypervolume> {
    check_len(2, reference.len())?;
    let (front, dropped) = admissible(points, reference)?;
    // lexicographic order of a 2-D front: f1 ascending, f2 descending
    let mut volume = 0.0;
    for (i, p) in front.iter().enumerate() {
        let next_f1 = front.get(i + 1).map_or(reference[0], |q| q[0]);
        volume += (next_f1 - p[0]) * (reference[1] - p[1]);
    }
    Ok(Hypervolume { volume, dropped })
}

/// Incrementally maintained 2-D front and its dominated area.
struct Staircase {
    steps: BTreeMap<Key, f64>,
    area: f64,
    r1: f64,
    r2: f64,
}

impl Staircase {
    fn new(r1: f64, r2: f64) -> Self {
        Self {
            steps: BTreeMap::new(),
            area: 0.0,
            r1,
            r2,
        }
    }

    fn insert(&mut self, a: f64, b: f64) {
        let left = self.steps.range(..=Key(a)).next_back().map(|(_, &f2)| f2);
        if let Some(f2) = left {
            if f2 <= b {
                return;
            }
        }
        // Walk right of `a`: between consecutive abscissae the covered region
        // starts at `ceiling`; the new point adds `ceiling − b` where positive.
        let mut ceiling = left.unwrap_or(self.r2);
        let mut x = a;
        let mut doomed = Vec::new();
        let mut blocked = false;
        for (k, &f2) in self.steps.range(Key(a)..) {
            self.area += (k.0 - x) * (ceiling - b);
            if f2 <= b {
                blocked = true;
                break;
            }
            doomed.push(*k);
            ceiling = f2;
            x = k.0;
        }
        if !blocked {
            self.area += (self.r1 - x) * (ceiling - b);
        }
        for k in doomed {
            self.steps.remove(&k);
        }
        self.steps.insert(Key(a), b);
    }
}

/// Exact 3-D hypervolume by sweeping slabs along `f3`, keeping the 2-D
/// dominated area of the active points up to date as points enter.
pub fn hypervolume_3d(points: &[Vec<f64>], reference: &[f64]) -> Result<Hypervolume> {
    check_len(3, reference.len())?;
    let (mut front, dropped) = admissible(points, reference)?;
    front.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut stairs = Staircase::new(reference[0], reference[1]);
    let mut volume = 0.0;
    for (i, p) in front.iter().enumerate() {
        stairs.insert(p[0], p[1]);
        let next_f3 = front.get(i + 1).map_or(reference[2], |q| q[2]);
        volume += stairs.area * (next_f3 - p[2]);
    }
    Ok(Hypervolume { volume, dropped })
}

/// Exact hypervolume for two or three objectives.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<Hypervolume> {
    match reference.len() {
        2 => hypervolume_2d(points, reference),
        3 => hypervolume_3d(points, reference),
        m => Err(Error::InvalidParameter(format!(
            "exact hypervolume supports 2 or 3 objectives, got {m}"
        ))),
    }
}

/// Monte Carlo hypervolume estimate and its standard error, sampling
/// uniformly in the box spanned by the points' minimum corner and the
/// reference point.
pub fn hypervolume_mc(
    points: &[Vec<f64>],
    reference: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo hypervolume needs >= 10000 samples, got {samples}"
        )));
    }
    let (front, _) = admissible(points, reference)?;
    if front.is_empty() {
        return Ok((0.0, 0.0));
    }
    let m = reference.len();
    let mut lo = vec![f64::INFINITY; m];
    for p in &front {
        for i in 0..m {
            lo[i] = lo[i].min(p[i]);
        }
    }
    let span: Vec<f64> = lo.iter().zip(reference).map(|(l, r)| r - l).collect();
    if span.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter("degenerate sampling box".into()));
    }
    let box_volume: f64 = span.iter().product();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0.0; m];
    let mut hits = 0u64;
    for _ in 0..samples {
        for i in 0..m {
            u[i] = lo[i] + rng.gen::<f64>() * span[i];
        }
        if front.iter().any(|p| p.iter().zip(&u).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    let stderr = box_volume * (frac * (1.0 - frac) / samples as f64).sqrt();
    Ok((box_volume * frac, stderr))
}
