//! `stch table`: ΔHV over problems × methods × seeds.
//!
//! Each finished cell is cached under `<out>/cells/` with the configuration
//! in its header, so an interrupted run resumes where it stopped and a rerun
//! with the same configuration reads every cell back. Cells with failing
//! seeds are reported with a `failed` status and are not cached.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use stch::problems::{Problem, ProblemId, ReferenceFront};
use stch::ScalarizationKind;

use crate::args::TableArgs;
use crate::config;
use crate::output::{create_dir, csv_text, num, read_csv, write_csv, Header};
use crate::psl::{mean_std, run_seed, TrainSettings};
use crate::{CliError, CliResult};

pub const DEFAULT_METHODS: [ScalarizationKind; 3] =
    [ScalarizationKind::Linear, ScalarizationKind::Tchebycheff, ScalarizationKind::SmoothTchebycheff];

#[derive(Debug, Clone)]
pub struct TableSettings {
    pub problems: Vec<Problem>,
    pub kinds: Vec<ScalarizationKind>,
    pub train: TrainSettings,
}

impl TableSettings {
    pub fn resolve(args: TableArgs) -> CliResult<Self> {
        let file = config::load_table(args.config.as_deref())?;
        let a = args.overlay(file);
        let problems = match a.problems {
            Some(names) => names.iter().map(|n| config::parse_problem(n, None)).collect::<CliResult<Vec<_>>>()?,
            None => ProblemId::SUITE.iter().map(|&id| Problem::new(id)).collect(),
        };
        let kinds = match a.methods {
            Some(ids) => ids.iter().map(|m| config::parse_kind(m)).collect::<CliResult<Vec<_>>>()?,
            None => DEFAULT_METHODS.to_vec(),
        };
        if problems.is_empty() || kinds.is_empty() {
            return Err(CliError::Config("table needs at least one problem and one method".into()));
        }
        Ok(Self { problems, kinds, train: TrainSettings::resolve(a.train, "out/table")? })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedScore {
    pub seed: u64,
    pub dhv: f64,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub problem: String,
    pub method: ScalarizationKind,
    pub scores: Vec<SeedScore>,
    /// Failure messages of seeds that did not finish.
    pub failures: Vec<String>,
}

impl Cell {
    pub fn mean_std(&self) -> (f64, f64) {
        let v: Vec<f64> = self.scores.iter().map(|s| s.dhv).collect();
        if v.is_empty() {
            return (f64::NAN, f64::NAN);
        }
        mean_std(&v)
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn status(&self, n_seeds: usize) -> String {
        match self.failures.first() {
            None => "ok".into(),
            Some(first) => format!("failed {}/{n_seeds} seeds: {first}", self.failures.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TableReport {
    pub cells: Vec<Cell>,
}

impl TableReport {
    pub fn cell(&self, problem: &str, method: ScalarizationKind) -> Option<&Cell> {
        self.cells.iter().find(|c| c.problem == problem && c.method == method)
    }

    /// Problems where STCH's mean ΔHV is strictly below that of every other
    /// method, and the number of problems where all methods finished.
    pub fn stch_wins(&self) -> (usize, usize) {
        let mut by_problem: BTreeMap<&str, Vec<&Cell>> = BTreeMap::new();
        for c in &self.cells {
            by_problem.entry(c.problem.as_str()).or_default().push(c);
        }
        let mut wins = 0;
        let mut compared = 0;
        for cells in by_problem.values() {
            if cells.len() < 2 || !cells.iter().all(|c| c.ok()) {
                continue;
            }
            let Some(stch) = cells.iter().find(|c| c.method == ScalarizationKind::SmoothTchebycheff) else {
                continue;
            };
            compared += 1;
            let s = stch.mean_std().0;
            if cells.iter().filter(|c| c.method != stch.method).all(|c| s < c.mean_std().0) {
                wins += 1;
            }
        }
        (wins, compared)
    }
}

fn cell_header(ts: &TrainSettings, problem: &Problem, kind: ScalarizationKind) -> Header {
    ts.describe(Header::new("table-cell").with("problem", problem.name()).with("method", kind.id()), Some(problem.m))
}

fn cell_path(dir: &Path, problem: &Problem, kind: ScalarizationKind) -> PathBuf {
    dir.join(format!("{}_{}.csv", problem.name(), kind.id()))
}

/// A cached cell, if its header matches the current configuration.
fn load_cell(path: &Path, header: &Header, problem: &Problem, kind: ScalarizationKind) -> Option<Cell> {
    let text = std::fs::read_to_string(path).ok()?;
    if !text.starts_with(&header.render()) {
        return None;
    }
    let (_, rows) = read_csv(path).ok()?;
    let scores = rows
        .iter()
        .map(|r| {
            Some(SeedScore { seed: r.get(0)?.parse().ok()?, dhv: r.get(1)?.parse().ok()?, dropped: r.get(2)?.parse().ok()? })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Cell { problem: problem.name().into(), method: kind, scores, failures: Vec::new() })
}

fn store_cell(path: &Path, header: &Header, cell: &Cell) -> CliResult<()> {
    let rows = cell
        .scores
        .iter()
        .map(|s| vec![s.seed.to_string(), num(s.dhv), s.dropped.to_string()]);
    write_csv(path, header, &csv_text(&["seed", "dhv", "dropped"], rows)?)
}

/// Fills every cell, from cache where possible, and writes `table.csv` with
/// columns `problem, method, mean_dhv, std_dhv, n_seeds, status`.
pub fn run(s: &TableSettings) -> CliResult<TableReport> {
    let ts = &s.train;
    let cells_dir = ts.out.join("cells");
    create_dir(&ts.out)?;
    create_dir(&ts.cache_dir)?;
    create_dir(&cells_dir)?;

    let fronts: Vec<Result<ReferenceFront, String>> = s
        .problems
        .iter()
        .map(|p| ReferenceFront::load_or_compute(p, ts.resolution, &ts.cache_dir).map_err(|e| e.to_string()))
        .collect();

    let mut cells: Vec<Option<Cell>> = Vec::new();
    let mut jobs: Vec<(usize, usize, usize, u64)> = Vec::new();
    for (pi, problem) in s.problems.iter().enumerate() {
        for &kind in &s.kinds {
            let header = cell_header(ts, problem, kind);
            let cached = load_cell(&cell_path(&cells_dir, problem, kind), &header, problem, kind);
            if cached.is_none() {
                jobs.extend(ts.seeds.iter().map(|&seed| (cells.len(), pi, s.kinds.iter().position(|k| *k == kind).unwrap(), seed)));
            } else {
                log::info!("{} {}: cached", problem.name(), kind);
            }
            cells.push(cached);
        }
    }

    let started = Instant::now();
    let results: Vec<(usize, u64, Result<SeedScore, String>)> = ts.in_pool(|| {
        jobs.par_iter()
            .map(|&(ci, pi, ki, seed)| {
                let problem = &s.problems[pi];
                let score = match &fronts[pi] {
                    Err(e) => Err(format!("reference front: {e}")),
                    Ok(front) => run_seed(problem, s.kinds[ki], front, ts, seed)
                        .map(|r| SeedScore { seed, dhv: r.dhv.delta, dropped: r.dhv.dropped })
                        .map_err(|e| e.to_string()),
                };
                if let Err(e) = &score {
                    log::warn!("{} {} seed {seed}: {e}", problem.name(), s.kinds[ki]);
                }
                (ci, seed, score)
            })
            .collect()
    })?;
    if !jobs.is_empty() {
        log::info!("table: {} training runs in {:.3?}", jobs.len(), started.elapsed());
    }

    let mut fresh: BTreeMap<usize, Cell> = BTreeMap::new();
    for (ci, _, score) in results {
        let pi = ci / s.kinds.len();
        let cell = fresh.entry(ci).or_insert_with(|| Cell {
            problem: s.problems[pi].name().into(),
            method: s.kinds[ci % s.kinds.len()],
            scores: Vec::new(),
            failures: Vec::new(),
        });
        match score {
            Ok(sc) => cell.scores.push(sc),
            Err(e) => cell.failures.push(e),
        }
    }
    for (ci, cell) in fresh {
        let problem = &s.problems[ci / s.kinds.len()];
        if cell.ok() {
            store_cell(&cell_path(&cells_dir, problem, cell.method), &cell_header(ts, problem, cell.method), &cell)?;
        }
        cells[ci] = Some(cell);
    }
    let cells: Vec<Cell> = cells.into_iter().map(|c| c.expect("every cell is cached or computed")).collect();

    let header = ts.describe(
        Header::new("table")
            .with("problems", s.problems.iter().map(|p| p.name()).collect::<Vec<_>>().join(";"))
            .with("methods", s.kinds.iter().map(|k| k.id()).collect::<Vec<_>>().join(";")),
        None,
    );
    let rows = cells.iter().map(|c| {
        let (mean, std) = c.mean_std();
        vec![
            c.problem.clone(),
            c.method.id().to_string(),
            num(mean),
            num(std),
            c.scores.len().to_string(),
            c.status(ts.seeds.len()),
        ]
    });
    let body = csv_text(&["problem", "method", "mean_dhv", "std_dhv", "n_seeds", "status"], rows)?;
    write_csv(&ts.out.join("table.csv"), &header, &body)?;
    let report = TableReport { cells };
    let (wins, compared) = report.stch_wins();
    println!("stch best on {wins} of {compared} problems");
    Ok(report)
}
