use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{check_len, Result};

/// `a` Pareto-dominates `b`: no worse everywhere, strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// `a` weakly dominates `b`: no worse in every objective.
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `f64` with a total order, for use as a map key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Key(pub f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Maximal non-dominated subset, duplicates collapsed, sorted
/// lexicographically by objectives.
///
/// After a lexicographic sort only earlier points can dominate later ones,
/// so a single sweep suffices: O(n log n) for two and three objectives,
/// quadratic in the number of survivors otherwise.
pub fn nondominated_filter(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let m = first.len();
    for p in points {
        check_len(m, p.len())?;
    }
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    sorted.dedup_by(|a, b| lex_cmp(a, b) == Ordering::Equal);

    let kept = match m {
        0 | 1 => sorted.into_iter().take(1).cloned().collect(),
        2 => {
            let mut best = f64::INFINITY;
            let mut out = Vec::new();
            for p in sorted {
                if p[1] < best {
                    best = p[1];
                    out.push(p.clone());
                }
            }
            out
        }
        3 => filter_3d(sorted),
        _ => {
            let mut out: Vec<Vec<f64>> = Vec::new();
            for p in sorted {
                if !out.iter().any(|q| weakly_dominates(q, p)) {
                    out.push(p.clone());
                }
            }
            out
        }
    };
    Ok(kept)
}

fn filter_3d(sorted: Vec<&Vec<f64>>) -> Vec<Vec<f64>> {
    // 2-D staircase over (f2, f3) of everything kept so far; f3 strictly
    // decreases as f2 increases.
    let mut stairs: BTreeMap<Key, f64> = BTreeMap::new();
    let mut out = Vec::new();
    for p in sorted {
        let (b, c) = (p[1], p[2]);
        if let Some((_, &f3)) = stairs.range(..=Key(b)).next_back() {
            if f3 <= c {
                continue;
            }
        }
        let doomed: Vec<Key> = stairs
            .range(Key(b)..)
            .take_while(|(_, &f3)| f3 >= c)
            .map(|(k, _)| *k)
            .collect();
        for k in doomed {
            stairs.remove(&k);
        }
        stairs.insert(Key(b), c);
        out.push(p.clone());
    }
    out
}
