//! Monte Carlo sweeps, golden checks against the reference scenario, and
//! graph export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fleet;
use crate::geometry::{build_conflict_sets, ConflictMatrix, Lane, VehicleRecord};
use crate::graphs::{build_cdg, build_cug};
use crate::schedule::{mm_schedule, Scheduler};
use crate::sim::{simulate, ArrivalModel, SimConfig, SimError, SimInput, SimOptions};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{scheduler} n={n} seed={seed}: {source}")]
    Run {
        scheduler: Scheduler,
        n: usize,
        seed: u64,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("fleet rejected: {0}")]
    Fleet(String),
    #[error("cannot parse scenario file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Everything a sweep needs. Loadable from TOML; missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    /// Arrival probability per lane per slot.
    pub p: f64,
    /// Fleet sizes to sweep.
    pub n: Vec<usize>,
    pub seeds: Vec<u64>,
    pub schedulers: Vec<Scheduler>,
    /// Record scheduler wall-clock time. When off, `runtime_ms` is written as
    /// zero and repeated sweeps produce identical files.
    pub timing: bool,
    pub sim: SimConfig,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            p: 0.3,
            n: vec![84],
            seeds: (1..=20).collect(),
            schedulers: Scheduler::ALL.to_vec(),
            timing: true,
            sim: SimConfig::default(),
        }
    }
}

impl ScenarioSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let spec: ScenarioSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(ExperimentError::InvalidScenario(format!(
                "p must lie in (0, 1], got {}",
                self.p
            )));
        }
        if self.n.is_empty() || self.seeds.is_empty() || self.schedulers.is_empty() {
            return Err(ExperimentError::InvalidScenario(
                "n, seeds and schedulers must all be non-empty".into(),
            ));
        }
        self.sim.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheduler: Scheduler,
    pub n: usize,
    pub seed: u64,
    pub d_all: usize,
    pub evac_s: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scheduler: Scheduler,
    pub n: usize,
    pub runs: usize,
    pub d_all_mean: f64,
    pub d_all_std: f64,
    pub evac_mean: f64,
    pub evac_std: f64,
    pub runtime_ms_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by scheduler, then `n`, then seed.
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<Aggregate>,
}

/// Runs one simulation per (scheduler, n, seed) in parallel.
pub fn run_sweep(spec: &ScenarioSpec) -> Result<SweepResult, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(Scheduler, usize, u64)> = spec
        .schedulers
        .iter()
        .flat_map(|&s| {
            spec.n
                .iter()
                .flat_map(move |&n| spec.seeds.iter().map(move |&seed| (s, n, seed)))
        })
        .collect();
    let mut rows = jobs
        .into_par_iter()
        .map(|(scheduler, n, seed)| {
            let input = SimInput::Arrivals(ArrivalModel {
                p: spec.p,
                seed,
                n_total: n,
            });
            let out = simulate(&input, scheduler, &spec.sim, SimOptions::default()).map_err(
                |source| ExperimentError::Run {
                    scheduler,
                    n,
                    seed,
                    source,
                },
            )?;
            let runtime_ms = if spec.timing {
                out.scheduler_time.as_secs_f64() * 1e3
            } else {
                0.0
            };
            Ok(SweepRow {
                scheduler,
                n,
                seed,
                d_all: out.metrics.d_all,
                evac_s: out.metrics.evacuation_time,
                runtime_ms,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    rows.sort_by_key(|r| (r.scheduler, r.n, r.seed));
    let aggregates = aggregate(&rows);
    Ok(SweepResult { rows, aggregates })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Mean and sample standard deviation per (scheduler, n).
pub fn aggregate(rows: &[SweepRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Scheduler, usize), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.scheduler, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((scheduler, n), rs)| {
            let d: Vec<f64> = rs.iter().map(|r| r.d_all as f64).collect();
            let e: Vec<f64> = rs.iter().map(|r| r.evac_s).collect();
            let t: Vec<f64> = rs.iter().map(|r| r.runtime_ms).collect();
            let (d_all_mean, d_all_std) = mean_std(&d);
            let (evac_mean, evac_std) = mean_std(&e);
            Aggregate {
                scheduler,
                n,
                runs: rs.len(),
                d_all_mean,
                d_all_std,
                evac_mean,
                evac_std,
                runtime_ms_mean: mean_std(&t).0,
            }
        })
        .collect()
}

impl SweepResult {
    pub fn aggregate_for(&self, scheduler: Scheduler, n: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.scheduler == scheduler && a.n == n)
    }

    /// Relative reduction of mean evacuation time of `better` against `base`.
    pub fn evac_saving(&self, base: Scheduler, better: Scheduler, n: usize) -> Option<f64> {
        let b = self.aggregate_for(base, n)?.evac_mean;
        let o = self.aggregate_for(better, n)?.evac_mean;
        Some((b - o) / b)
    }

    /// Per-run CSV with header `scheduler,n,seed,d_all,evac_s,runtime_ms`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheduler", "n", "seed", "d_all", "evac_s", "runtime_ms"])?;
        for r in &self.rows {
            w.write_record([
                r.scheduler.name().to_string(),
                r.n.to_string(),
                r.seed.to_string(),
                r.d_all.to_string(),
                format!("{:.3}", r.evac_s),
                format!("{:.3}", r.runtime_ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: io::Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "scheduler",
            "n",
            "runs",
            "d_all_mean",
            "d_all_std",
            "evac_mean",
            "evac_std",
            "runtime_ms_mean",
        ])?;
        for a in &self.aggregates {
            w.write_record([
                a.scheduler.name().to_string(),
                a.n.to_string(),
                a.runs.to_string(),
                format!("{:.4}", a.d_all_mean),
                format!("{:.4}", a.d_all_std),
                format!("{:.4}", a.evac_mean),
                format!("{:.4}", a.evac_std),
                format!("{:.4}", a.runtime_ms_mean),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `sweep.csv`, `summary.csv` and `summary.json` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        std::fs::create_dir_all(dir)?;
        let sweep = dir.join("sweep.csv");
        let summary = dir.join("summary.csv");
        let json = dir.join("summary.json");
        self.write_csv(std::fs::File::create(&sweep)?)?;
        self.write_summary_csv(std::fs::File::create(&summary)?)?;
        std::fs::write(
            &json,
            serde_json::to_string_pretty(&self.aggregates)? + "\n",
        )?;
        Ok(vec![sweep, summary, json])
    }
}

/// Expected results for a fixed fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenExpectations {
    /// Lanes in arrival order.
    pub lanes: Vec<Lane>,
    /// `(crossing, diverging)` per vehicle, by arrival index.
    pub conflict_sets: Vec<(Vec<usize>, Vec<usize>)>,
    pub uni_edges: Vec<(usize, usize)>,
    pub bi_edges: Vec<(usize, usize)>,
    pub cug_edges: Vec<(usize, usize)>,
    pub d_all: BTreeMap<Scheduler, usize>,
    pub opt_dfst_parents: Vec<usize>,
    pub opt_dfst_depths: Vec<usize>,
    /// Layers of the MM order; compared as sets of sets.
    pub mm_layers: Vec<Vec<usize>>,
}

impl GoldenExpectations {
    /// The six-vehicle reference scenario.
    pub fn example1() -> Self {
        GoldenExpectations {
            lanes: fleet::example1_lanes(),
            conflict_sets: vec![
                (vec![], vec![0]),
                (vec![], vec![0]),
                (vec![1, 2], vec![0]),
                (vec![2, 3], vec![0]),
                (vec![1, 4], vec![0]),
                (vec![1, 4], vec![5]),
            ],
            uni_edges: vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (5, 6)],
            bi_edges: vec![
                (1, 3),
                (1, 5),
                (1, 6),
                (2, 3),
                (2, 4),
                (3, 4),
                (4, 5),
                (4, 6),
            ],
            cug_edges: vec![(1, 2), (1, 4), (2, 5), (2, 6), (3, 5), (3, 6)],
            d_all: BTreeMap::from([
                (Scheduler::Dfst, 5),
                (Scheduler::OptDfst, 4),
                (Scheduler::Mm, 3),
            ]),
            opt_dfst_parents: vec![0, 0, 1, 3, 2, 4],
            opt_dfst_depths: vec![1, 1, 2, 3, 2, 4],
            mm_layers: vec![vec![1, 4], vec![3, 5], vec![2, 6]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenReport {
    pub checks: Vec<GoldenCheck>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GoldenCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            if c.pass {
                let _ = writeln!(s, "ok    {} = {}", c.name, c.actual);
            } else {
                let _ = writeln!(
                    s,
                    "FAIL  {}: expected {}, got {}",
                    c.name, c.expected, c.actual
                );
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }
}

fn push<T: std::fmt::Debug + PartialEq>(
    checks: &mut Vec<GoldenCheck>,
    name: impl Into<String>,
    expected: T,
    actual: T,
) {
    checks.push(GoldenCheck {
        name: name.into(),
        pass: expected == actual,
        expected: format!("{expected:?}"),
        actual: format!("{actual:?}"),
    });
}

fn sorted_layers(layers: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = layers
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort_unstable();
            l
        })
        .collect();
    out.sort();
    out
}

/// Recomputes every artefact of the expected fleet and compares field by field.
pub fn run_golden(exp: &GoldenExpectations) -> Result<GoldenReport, ExperimentError> {
    let records = fleet::fleet_from_lanes(&exp.lanes);
    let n = records.len();
    let table = build_conflict_sets(ConflictMatrix::standard(), &records)
        .map_err(|e| ExperimentError::Fleet(e.to_string()))?;
    let cdg = build_cdg(&table, n).map_err(|e| ExperimentError::Fleet(e.to_string()))?;
    let cug = build_cug(&cdg);

    let mut checks = Vec::new();
    for i in 1..=n.max(exp.conflict_sets.len()) {
        let actual = table.get(i).map(|s| {
            (
                s.crossing.iter().copied().collect(),
                s.diverging.iter().copied().collect(),
            )
        });
        let expected = exp.conflict_sets.get(i - 1).cloned();
        push(&mut checks, format!("conflict_sets[{i}]"), expected, actual);
    }
    push(
        &mut checks,
        "cdg.uni_edges",
        exp.uni_edges.clone(),
        cdg.uni_edges().to_vec(),
    );
    push(
        &mut checks,
        "cdg.bi_edges",
        exp.bi_edges.clone(),
        cdg.bi_edges().to_vec(),
    );
    push(&mut checks, "cug.edges", exp.cug_edges.clone(), cug.edges());

    for s in Scheduler::ALL {
        let schedule = s.schedule(&cdg);
        push(
            &mut checks,
            format!("{}.valid", s.name()),
            "valid".to_string(),
            match schedule.audit(&cdg) {
                Ok(()) => "valid".to_string(),
                Err(e) => e.to_string(),
            },
        );
        if let Some(&d) = exp.d_all.get(&s) {
            push(
                &mut checks,
                format!("{}.d_all", s.name()),
                d,
                schedule.d_all(),
            );
        }
        if s == Scheduler::OptDfst {
            let parents: Vec<usize> = (1..=n).map(|i| schedule.parent(i)).collect();
            let depths: Vec<usize> = (1..=n).map(|i| schedule.depth(i)).collect();
            push(
                &mut checks,
                "opt_dfst.parents",
                exp.opt_dfst_parents.clone(),
                parents,
            );
            push(
                &mut checks,
                "opt_dfst.depths",
                exp.opt_dfst_depths.clone(),
                depths,
            );
        }
    }
    let mm = mm_schedule(&cug, &cdg);
    push(
        &mut checks,
        "mm.layers",
        sorted_layers(&exp.mm_layers),
        sorted_layers(&mm.schedule.layers()),
    );
    Ok(GoldenReport { checks })
}

/// Text artefacts for one fleet: conflict sets, both graphs and one passing
/// order per scheduler. Keys are file names.
pub fn graph_artifacts(
    records: &[VehicleRecord],
) -> Result<BTreeMap<String, String>, ExperimentError> {
    let table = build_conflict_sets(ConflictMatrix::standard(), records)
        .map_err(|e| ExperimentError::Fleet(e.to_string()))?;
    let cdg =
        build_cdg(&table, records.len()).map_err(|e| ExperimentError::Fleet(e.to_string()))?;
    let cug = build_cug(&cdg);
    let mut files = BTreeMap::new();

    let mut fleet = String::from("i lane crossing diverging\n");
    for r in records {
        let s = table.get(r.index).expect("every record has conflict sets");
        let join = |xs: &std::collections::BTreeSet<usize>| {
            if xs.is_empty() {
                "-".to_string()
            } else {
                xs.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        let _ = writeln!(
            fleet,
            "{} {} {} {}",
            r.index,
            r.lane,
            join(&s.crossing),
            join(&s.diverging)
        );
    }
    files.insert("conflict_sets.txt".to_string(), fleet);
    files.insert("cdg.txt".to_string(), cdg.to_text());
    files.insert("cug.txt".to_string(), cug.to_text());
    for s in Scheduler::ALL {
        files.insert(
            format!("schedule_{}.txt", s.name()),
            s.schedule(&cdg).to_text(),
        );
    }
    Ok(files)
}

pub fn export_graphs(
    records: &[VehicleRecord],
    dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, text) in graph_artifacts(records)? {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

/// Wall-clock seconds for display.
pub fn format_duration(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}
