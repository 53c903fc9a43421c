//! Non-dominated filtering, hypervolume and the hypervolume difference.

mod dominance;
mod hypervolume;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::problems::ReferenceFront;

pub use dominance::{dominates, nondominated_filter, weakly_dominates};
pub(crate) use dominance::lex_cmp;
pub use hypervolume::{hypervolume, hypervolume_2d, hypervolume_3d, hypervolume_mc, Hypervolume};

/// A decision vector and its objective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Mutually non-dominated solutions and the reference point used for
/// hypervolume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    pub reference_point: Vec<f64>,
}

impl ParetoArchive {
    pub fn new(reference_point: Vec<f64>) -> Self {
        Self {
            entries: Vec::new(),
            reference_point,
        }
    }

    /// Builds an archive from candidate solutions, keeping the non-dominated
    /// ones. Among solutions with identical objectives the first is kept.
    pub fn from_entries(reference_point: Vec<f64>, candidates: Vec<ArchiveEntry>) -> Result<Self> {
        let mut archive = Self::new(reference_point);
        for c in candidates {
            archive.insert(c.x, c.f)?;
        }
        Ok(archive)
    }

    /// Inserts a solution unless an existing one weakly dominates it, then
    /// evicts entries it dominates. Returns whether it was added.
    pub fn insert(&mut self, x: Vec<f64>, f: Vec<f64>) -> Result<bool> {
        check_len(self.reference_point.len(), f.len())?;
        if self.entries.iter().any(|e| weakly_dominates(&e.f, &f)) {
            return Ok(false);
        }
        self.entries.retain(|e| !dominates(&f, &e.f));
        self.entries.push(ArchiveEntry { x, f });
        Ok(true)
    }

    /// Entries sorted lexicographically by objectives.
    pub fn entries(&self) -> Vec<&ArchiveEntry> {
        let mut e: Vec<&ArchiveEntry> = self.entries.iter().collect();
        e.sort_by(|a, b| dominance::lex_cmp(&a.f, &b.f));
        e
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.entries().into_iter().map(|e| e.f.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hypervolume(&self) -> Result<Hypervolume> {
        hypervolume(&self.objectives(), &self.reference_point)
    }
}

/// Hypervolume difference between a reference front and an archive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaHv {
    pub delta: f64,
    pub front_hv: f64,
    pub archive_hv: f64,
    /// Archive entries outside the reference box, excluded from HV.
    pub dropped: usize,
}

/// `HV(front) − HV(archive)`, both computed after normalizing objectives by
/// the front's bounding box, w.r.t. the front's reference point.
pub fn delta_hv(archive: &ParetoArchive, front: &ReferenceFront) -> Result<DeltaHv> {
    let m = front.num_objectives();
    check_len(m, archive.reference_point.len())?;
    if archive.reference_point != front.reference_point {
        return Err(Error::InvalidParameter(format!(
            "reference points differ: archive {:?} vs front {:?}",
            archive.reference_point, front.reference_point
        )));
    }
    let norm = front.normalization();
    let reference = norm.apply(&front.reference_point)?;
    let normalize_all = |pts: Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>> {
        pts.iter().map(|p| norm.apply(p)).collect()
    };
    let front_hv = hypervolume(&normalize_all(front.points.clone())?, &reference)?;
    let archive_hv = hypervolume(&normalize_all(archive.objectives())?, &reference)?;
    Ok(DeltaHv {
        delta: front_hv.volume - archive_hv.volume,
        front_hv: front_hv.volume,
        archive_hv: archive_hv.volume,
        dropped: archive_hv.dropped,
    })
}
