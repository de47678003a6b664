//! Benchmark suites: load instances, run generators, tabulate results.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{remove_features, FeatureSet, GroundedModel, ModelError};
use crate::oracle;
use crate::pddl::{ground, ground_pair, parse_domain, parse_problem, GroundedTask, PddlError};
use crate::reconcile::{explain, verify_online, ExplainOptions, ReconcileError, ReconciliationProblem, Variant};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reconcile(#[from] ReconcileError),
}

pub fn read_file(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Feature names from a removal list: one per line, blank lines and lines
/// starting with `#` ignored.
pub fn parse_removal_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// Where the human model comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HumanSource {
    /// PDDL text of a domain with the same predicates and action signatures.
    Domain(String),
    /// Features to delete from the grounded robot model.
    Removals(Vec<String>),
}

/// A grounded robot task with a human model over the same universe.
#[derive(Debug, Clone)]
pub struct Instance {
    pub task: GroundedTask,
    pub human: GroundedModel,
}

impl Instance {
    pub fn load(domain: &str, problem: &str, human: &HumanSource) -> Result<Self, LoadError> {
        let robot = parse_domain(domain)?;
        let problem = parse_problem(problem)?;
        match human {
            HumanSource::Domain(text) => {
                let h = parse_domain(text)?;
                let (task, human) = ground_pair(&robot, &h, &problem)?;
                Ok(Instance { task, human })
            }
            HumanSource::Removals(names) => {
                let task = ground(&robot, &problem)?;
                let removed = FeatureSet::parse_names(names.iter().map(String::as_str), task.universe())?;
                let human = remove_features(&task.model, &removed)?;
                Ok(Instance { task, human })
            }
        }
    }

    /// The reconciliation problem with the planner's plan for the robot.
    pub fn problem(&self) -> Result<ReconciliationProblem, ReconcileError> {
        ReconciliationProblem::from_task(&self.task, self.human.clone())
    }
}

fn default_methods() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

fn default_time_limit() -> f64 {
    60.0
}

/// One suite entry. Exactly one of the three human-model fields is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub id: String,
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_domain: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remove_features: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remove_features_file: Option<PathBuf>,
}

/// A benchmark suite read from JSON. Relative paths resolve against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub entries: Vec<SuiteEntry>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Variant>,
    #[serde(default)]
    pub seed: u64,
    /// Seconds per run.
    #[serde(default = "default_time_limit")]
    pub time_limit: f64,
    #[serde(default)]
    pub oracle_checks: bool,
    /// Use exact mode for `oeg-pp`.
    #[serde(default)]
    pub exact: bool,
    /// Run entries on the rayon pool. Row order is unaffected.
    #[serde(default)]
    pub parallel: bool,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl SuiteConfig {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, LoadError> {
        let mut config: SuiteConfig = serde_json::from_str(text).map_err(|e| LoadError::Config(e.to_string()))?;
        config.base_dir = base_dir.into();
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = read_file(path)?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new("")))
    }

    fn check(&self) -> Result<(), LoadError> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(LoadError::Config(format!(
                "time_limit must be positive, got {}",
                self.time_limit
            )));
        }
        for e in &self.entries {
            let sources = [
                e.human_domain.is_some(),
                e.remove_features.is_some(),
                e.remove_features_file.is_some(),
            ];
            if sources.iter().filter(|&&s| s).count() != 1 {
                return Err(LoadError::Config(format!(
                    "entry {}: give exactly one of human_domain, remove_features, remove_features_file",
                    e.id
                )));
            }
        }
        Ok(())
    }

    fn path(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// Reads and grounds one entry.
    pub fn instance(&self, entry: &SuiteEntry) -> Result<Instance, LoadError> {
        let domain = read_file(&self.path(&entry.domain))?;
        let problem = read_file(&self.path(&entry.problem))?;
        let human = if let Some(h) = &entry.human_domain {
            HumanSource::Domain(read_file(&self.path(h))?)
        } else if let Some(list) = &entry.remove_features {
            HumanSource::Removals(list.clone())
        } else if let Some(f) = &entry.remove_features_file {
            HumanSource::Removals(parse_removal_list(&read_file(&self.path(f))?))
        } else {
            unreachable!("checked when the config was read")
        };
        Instance::load(&domain, &problem, &human)
    }
}

/// One row of results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub problem: String,
    pub method: Variant,
    pub total_features: Option<usize>,
    pub num_parts: Option<usize>,
    pub avg_part_size: Option<f64>,
    pub distance: Option<f64>,
    pub time_s: f64,
    pub verified: bool,
    pub oracle_verified: Option<bool>,
    pub error: Option<String>,
}

impl BenchRecord {
    fn failed(problem: &str, method: Variant, time_s: f64, error: String) -> Self {
        BenchRecord {
            problem: problem.to_string(),
            method,
            total_features: None,
            num_parts: None,
            avg_part_size: None,
            distance: None,
            time_s,
            verified: false,
            oracle_verified: None,
            error: Some(error),
        }
    }
}

/// Oracle cross-check of a run, where one applies and the instance is small.
fn oracle_check(problem: &ReconciliationProblem, method: Variant, features: &FeatureSet) -> Option<bool> {
    if problem.missing().len() > oracle::SUBSET_GUARD {
        return None;
    }
    match method {
        Variant::Mce => {
            let minimal = oracle::min_complete_subsets(problem, features.len()).ok()?;
            Some(minimal.contains(features))
        }
        Variant::MceR | Variant::Pp | Variant::Ap => Some(oracle::is_complete(problem, features)),
        Variant::Na => None,
    }
}

fn run_one(id: &str, problem: &Arc<ReconciliationProblem>, method: Variant, config: &SuiteConfig) -> BenchRecord {
    let options = ExplainOptions {
        seed: config.seed,
        exact: config.exact,
    };
    let (tx, rx) = mpsc::channel();
    let job = Arc::clone(problem);
    let start = Instant::now();
    thread::spawn(move || {
        let out = explain(&job, method, options);
        let _ = tx.send((out, start.elapsed()));
    });
    let limit = Duration::from_secs_f64(config.time_limit);
    let (result, elapsed) = match rx.recv_timeout(limit) {
        Ok(r) => r,
        Err(_) => {
            return BenchRecord::failed(id, method, limit.as_secs_f64(), "timeout".into());
        }
    };
    let explanation = match result {
        Ok(e) => e,
        Err(e) => return BenchRecord::failed(id, method, elapsed.as_secs_f64(), e.to_string()),
    };
    let report = verify_online(problem, &explanation);
    BenchRecord {
        problem: id.to_string(),
        method,
        total_features: Some(explanation.total_features()),
        num_parts: Some(explanation.num_parts()),
        avg_part_size: Some(explanation.avg_part_size()),
        distance: Some(report.distance),
        time_s: elapsed.as_secs_f64(),
        verified: report.passed(),
        oracle_verified: if config.oracle_checks {
            oracle_check(problem, method, &explanation.features())
        } else {
            None
        },
        error: None,
    }
}

fn run_entry(config: &SuiteConfig, entry: &SuiteEntry) -> Vec<BenchRecord> {
    let loaded = config
        .instance(entry)
        .and_then(|i| i.problem().map_err(LoadError::from))
        .map(Arc::new);
    match loaded {
        Ok(problem) => config
            .methods
            .iter()
            .map(|&m| run_one(&entry.id, &problem, m, config))
            .collect(),
        Err(e) => config
            .methods
            .iter()
            .map(|&m| BenchRecord::failed(&entry.id, m, 0.0, e.to_string()))
            .collect(),
    }
}

/// One record per entry and method, in config order. Failures are recorded
/// in the row and never abort the suite.
pub fn run_suite(config: &SuiteConfig) -> Vec<BenchRecord> {
    let rows: Vec<Vec<BenchRecord>> = if config.parallel {
        config.entries.par_iter().map(|e| run_entry(config, e)).collect()
    } else {
        config.entries.iter().map(|e| run_entry(config, e)).collect()
    };
    rows.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "markdown" | "md" => Some(Format::Markdown),
            _ => None,
        }
    }
}

pub const COLUMNS: [&str; 8] = [
    "problem",
    "method",
    "total_features",
    "num_parts",
    "avg_part_size",
    "distance",
    "time_s",
    "verified",
];

/// Footnote under markdown tables.
pub const DISTANCE_NOTE: &str =
    "\ndistance = 1 - shared actions (as a multiset) / length of the longer of the human's final plan and the robot's plan\n";

fn cells(r: &BenchRecord) -> [String; 8] {
    let na = || "n/a".to_string();
    [
        r.problem.clone(),
        r.method.to_string(),
        r.total_features.map_or_else(na, |v| v.to_string()),
        r.num_parts.map_or_else(na, |v| v.to_string()),
        r.avg_part_size.map_or_else(na, |v| format!("{v:.3}")),
        r.distance.map_or_else(na, |v| format!("{v:.3}")),
        format!("{:.6}", r.time_s),
        r.verified.to_string(),
    ]
}

/// Renders records as CSV with a header row, a JSON array or a markdown
/// table. Rows keep the order given.
pub fn emit_table(records: &[BenchRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("writing to memory");
            for r in records {
                w.write_record(cells(r)).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
        }
        Format::Json => serde_json::to_string_pretty(records).expect("records serialize") + "\n",
        Format::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
            for r in records {
                let row: Vec<String> = cells(r).iter().map(|c| c.replace('|', "\\|")).collect();
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out.push_str(DISTANCE_NOTE);
            out
        }
    }
}
