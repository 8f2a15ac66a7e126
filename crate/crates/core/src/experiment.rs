//! Sweep orchestration, seeding and run-log persistence.
//!
//! A sweep is the Cartesian product of task, mutation magnitude, map
//! resolution and mutation type, each combination repeated for a fixed
//! number of runs. Every run gets a seed derived from the master seed and
//! its (combination, run) indices, so results do not depend on execution
//! order and a crashed sweep resumes by skipping completed run files.
//!
//! Per-evaluation series are thinned to a deterministic checkpoint schedule:
//! every evaluation up to 100, then multiplicatively spaced steps (factor
//! 1.2), with the trace milestones 350/1250/5000 and the final evaluation
//! always included.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait::MorphologySpec;
use crate::map_elites::{self, Interval, MapConfig, MutationType, RunConfig};
use crate::measures::PerformanceRecord;
use crate::rng::derive_seed;
use crate::tasks::{ArcTask, CrawlerTask};
use crate::trajectory::{EvalOutcome, Evaluator};

/// Default behavior extents: turn rate in rad/s.
pub const DEFAULT_TURN_EXTENT: (f64, f64) = (-3.0, 3.0);
/// Default behavior extents: adjusted forward speed in m/s.
pub const DEFAULT_SPEED_EXTENT: (f64, f64) = (-0.75, 0.75);

/// Trace milestones marked in coverage-precision plots.
pub const MILESTONES: [u64; 3] = [350, 1250, 5000];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("could not parse sweep config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("run {run_id}: {source}")]
    Run {
        run_id: String,
        source: map_elites::MapError,
    },
    #[error("persistence failure for run {run_id} at {path}: {source}")]
    Persist {
        run_id: String,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no run records found in {0}")]
    NoRecords(PathBuf),
}

/// One evaluation task of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Closed-form circular-arc task (4 genes).
    Arc { label: String },
    /// Differential-drive crawler over a joint morphology.
    Crawler {
        label: String,
        morphology: MorphologySpec,
    },
}

impl TaskSpec {
    pub fn label(&self) -> &str {
        match self {
            TaskSpec::Arc { label } | TaskSpec::Crawler { label, .. } => label,
        }
    }

    pub fn build(&self) -> Result<Task, ExperimentError> {
        match self {
            TaskSpec::Arc { .. } => Ok(Task::Arc(ArcTask::default())),
            TaskSpec::Crawler { morphology, .. } => CrawlerTask::new(morphology.clone())
                .map(Task::Crawler)
                .map_err(|e| ExperimentError::Config(format!("task {:?}: {e}", self.label()))),
        }
    }
}

/// A built evaluation task.
#[derive(Clone, Debug)]
pub enum Task {
    Arc(ArcTask),
    Crawler(CrawlerTask),
}

impl Evaluator for Task {
    fn genome_len(&self) -> usize {
        match self {
            Task::Arc(t) => t.genome_len(),
            Task::Crawler(t) => t.genome_len(),
        }
    }

    fn evaluate(&self, genome: &crate::map_elites::Genome) -> EvalOutcome {
        match self {
            Task::Arc(t) => t.evaluate(genome),
            Task::Crawler(t) => t.evaluate(genome),
        }
    }
}

fn default_init_pop() -> usize {
    100
}

fn default_init_sigma() -> f64 {
    0.5
}

fn default_turn_extent() -> (f64, f64) {
    DEFAULT_TURN_EXTENT
}

fn default_speed_extent() -> (f64, f64) {
    DEFAULT_SPEED_EXTENT
}

/// Full sweep description, loadable from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sigma_values: Vec<f64>,
    pub resolutions: Vec<(usize, usize)>,
    pub mutation_types: Vec<MutationType>,
    pub tasks: Vec<TaskSpec>,
    pub runs_per_combination: usize,
    pub eval_budget: usize,
    pub master_seed: u64,
    /// Optional default output directory; the CLI flag overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_init_pop")]
    pub init_pop: usize,
    #[serde(default = "default_init_sigma")]
    pub init_sigma: f64,
    #[serde(default = "default_turn_extent")]
    pub turn_rate_extent: (f64, f64),
    #[serde(default = "default_speed_extent")]
    pub forward_speed_extent: (f64, f64),
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let config: SweepConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let err = |msg: String| Err(ExperimentError::Config(msg));
        if self.sigma_values.is_empty() {
            return err("sigma_values must not be empty".into());
        }
        if let Some(s) = self.sigma_values.iter().find(|s| !s.is_finite() || **s <= 0.0) {
            return err(format!("sigma_values entry {s} must be positive"));
        }
        if self.resolutions.is_empty() {
            return err("resolutions must not be empty".into());
        }
        if self.resolutions.iter().any(|r| r.0 == 0 || r.1 == 0) {
            return err("resolutions entries must be at least 1x1".into());
        }
        if self.mutation_types.is_empty() {
            return err("mutation_types must not be empty".into());
        }
        if self.tasks.is_empty() {
            return err("tasks must not be empty".into());
        }
        let mut labels = BTreeSet::new();
        for t in &self.tasks {
            if !labels.insert(t.label()) {
                return err(format!("tasks contains duplicate label {:?}", t.label()));
            }
            t.build()?;
        }
        if self.runs_per_combination == 0 {
            return err("runs_per_combination must be positive".into());
        }
        if self.init_pop == 0 {
            return err("init_pop must be positive".into());
        }
        if self.eval_budget < self.init_pop {
            return err("eval_budget must be at least init_pop".into());
        }
        if !self.init_sigma.is_finite() || self.init_sigma <= 0.0 {
            return err("init_sigma must be positive".into());
        }
        for (name, (lo, hi)) in [
            ("turn_rate_extent", self.turn_rate_extent),
            ("forward_speed_extent", self.forward_speed_extent),
        ] {
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return err(format!("{name} must be a finite interval of positive width"));
            }
        }
        Ok(())
    }

    fn map_config(&self, resolution: (usize, usize)) -> MapConfig {
        MapConfig {
            resolution,
            turn_rate: Interval {
                min: self.turn_rate_extent.0,
                max: self.turn_rate_extent.1,
            },
            forward_speed: Interval {
                min: self.forward_speed_extent.0,
                max: self.forward_speed_extent.1,
            },
        }
    }

    /// Combinations in the sweep (runs excluded).
    pub fn combination_count(&self) -> usize {
        self.tasks.len()
            * self.sigma_values.len()
            * self.resolutions.len()
            * self.mutation_types.len()
    }
}

/// One planned run of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedRun {
    pub combination_id: u64,
    pub run_index: u64,
    pub seed: u64,
    pub task_index: usize,
    pub sigma: f64,
    pub resolution: (usize, usize),
    pub mutation_type: MutationType,
}

impl PlannedRun {
    pub fn run_id(&self) -> String {
        format!("c{:05}_r{:03}", self.combination_id, self.run_index)
    }

    fn file_name(&self) -> String {
        format!("{}.csv", self.run_id())
    }
}

/// Expands a sweep config into the full product of combinations times runs,
/// with per-run seeds derived from `(master_seed, combination, run)`.
pub fn expand_sweep(config: &SweepConfig) -> Result<Vec<PlannedRun>, ExperimentError> {
    config.validate()?;
    let mut plan = Vec::with_capacity(config.combination_count() * config.runs_per_combination);
    let mut combination_id = 0u64;
    for (task_index, _) in config.tasks.iter().enumerate() {
        for &sigma in &config.sigma_values {
            for &resolution in &config.resolutions {
                for &mutation_type in &config.mutation_types {
                    for run_index in 0..config.runs_per_combination as u64 {
                        plan.push(PlannedRun {
                            combination_id,
                            run_index,
                            seed: derive_seed(config.master_seed, &[combination_id, run_index]),
                            task_index,
                            sigma,
                            resolution,
                            mutation_type,
                        });
                    }
                    combination_id += 1;
                }
            }
        }
    }
    Ok(plan)
}

/// Deterministic checkpoint schedule for a given budget.
pub fn checkpoint_schedule(budget: u64) -> Vec<u64> {
    let mut set: BTreeSet<u64> = (1..=budget.min(100)).collect();
    let mut c = 100u64;
    while c < budget {
        c = (((c as f64) * 1.2).round() as u64).max(c + 1);
        if c < budget {
            set.insert(c);
        }
    }
    for m in MILESTONES {
        if m <= budget {
            set.insert(m);
        }
    }
    if budget > 0 {
        set.insert(budget);
    }
    set.into_iter().collect()
}

/// Thins a per-evaluation stream down to the checkpoint schedule, always
/// keeping the last completed evaluation.
struct CheckpointLogger {
    schedule: Vec<u64>,
    next: usize,
    series: Vec<PerformanceRecord>,
    latest: Option<PerformanceRecord>,
}

impl CheckpointLogger {
    fn new(budget: u64) -> Self {
        Self {
            schedule: checkpoint_schedule(budget),
            next: 0,
            series: Vec::new(),
            latest: None,
        }
    }

    fn finish(mut self) -> Vec<PerformanceRecord> {
        if let Some(latest) = self.latest {
            if self.series.last().map(|r| r.eval_index) != Some(latest.eval_index) {
                self.series.push(latest);
            }
        }
        self.series
    }
}

impl map_elites::PerformanceLogger for CheckpointLogger {
    fn log(&mut self, record: PerformanceRecord) {
        self.latest = Some(record);
        if self.next < self.schedule.len() && record.eval_index == self.schedule[self.next] {
            self.series.push(record);
            self.next += 1;
        }
    }
}

/// One persisted run with its parameters and thinned performance series.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub combination_id: u64,
    pub task_label: String,
    pub sigma: f64,
    pub resolution: (usize, usize),
    pub mutation_type: MutationType,
    pub run_index: u64,
    pub seed: u64,
    pub evaluations: u64,
    pub aborted: bool,
    pub series: Vec<PerformanceRecord>,
    /// Final (coverage, precision, reliability), consistent with the series
    /// tail.
    pub final_objectives: (f64, f64, f64),
}

impl RunRecord {
    /// Final (coverage, precision) pair used as the analysis objective
    /// vector; reliability is their product and adds no dominance
    /// information.
    pub fn final_coverage_precision(&self) -> Vec<f64> {
        vec![self.final_objectives.0, self.final_objectives.1]
    }
}

#[derive(Serialize, Deserialize)]
struct RunHeader {
    combination_id: u64,
    task: String,
    sigma: f64,
    resolution: (usize, usize),
    mutation: MutationType,
    run_index: u64,
    seed: u64,
    evaluations: u64,
    aborted: bool,
    #[serde(rename = "final")]
    final_objectives: (f64, f64, f64),
}

fn write_record(record: &RunRecord, path: &Path) -> std::io::Result<()> {
    let header = RunHeader {
        combination_id: record.combination_id,
        task: record.task_label.clone(),
        sigma: record.sigma,
        resolution: record.resolution,
        mutation: record.mutation_type,
        run_index: record.run_index,
        seed: record.seed,
        evaluations: record.evaluations,
        aborted: record.aborted,
        final_objectives: record.final_objectives,
    };
    let mut text = serde_json::to_string(&header).expect("header serializes");
    text.push('\n');
    text.push_str("eval_index,coverage,precision,reliability\n");
    for r in &record.series {
        text.push_str(&format!(
            "{},{},{},{}\n",
            r.eval_index, r.coverage, r.precision, r.reliability
        ));
    }
    // Write via a temp file so partially written runs never look complete.
    let tmp = path.with_extension("csv.part");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

fn parse_record(path: &Path) -> Result<RunRecord, String> {
    let file = fs::File::open(path).map_err(|e| e.to_string())?;
    let mut lines = BufReader::new(file).lines();
    let header_line = lines
        .next()
        .ok_or("empty file")?
        .map_err(|e| e.to_string())?;
    let header: RunHeader =
        serde_json::from_str(&header_line).map_err(|e| format!("bad header: {e}"))?;
    let columns = lines
        .next()
        .ok_or("missing column row")?
        .map_err(|e| e.to_string())?;
    if columns.trim() != "eval_index,coverage,precision,reliability" {
        return Err(format!("unexpected column row {columns:?}"));
    }
    let mut series = Vec::new();
    for line in lines {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut next = || fields.next().ok_or_else(|| format!("short row {line:?}"));
        let eval_index: u64 = next()?.parse().map_err(|e| format!("bad eval_index: {e}"))?;
        let coverage: f64 = next()?.parse().map_err(|e| format!("bad coverage: {e}"))?;
        let precision: f64 = next()?.parse().map_err(|e| format!("bad precision: {e}"))?;
        let reliability: f64 = next()?
            .parse()
            .map_err(|e| format!("bad reliability: {e}"))?;
        series.push(PerformanceRecord {
            eval_index,
            coverage,
            precision,
            reliability,
        });
    }
    if series.is_empty() {
        return Err("record has an empty series".into());
    }
    let tail = series.last().unwrap();
    let final_objectives = (tail.coverage, tail.precision, tail.reliability);
    if final_objectives != header.final_objectives {
        return Err("header final objectives disagree with series tail".into());
    }
    Ok(RunRecord {
        combination_id: header.combination_id,
        task_label: header.task,
        sigma: header.sigma,
        resolution: header.resolution,
        mutation_type: header.mutation,
        run_index: header.run_index,
        seed: header.seed,
        evaluations: header.evaluations,
        aborted: header.aborted,
        series,
        final_objectives,
    })
}

/// Executes one planned run in memory.
pub fn execute_run(
    config: &SweepConfig,
    planned: &PlannedRun,
) -> Result<RunRecord, ExperimentError> {
    let spec = &config.tasks[planned.task_index];
    let task = spec.build()?;
    let run_config = RunConfig {
        sigma: planned.sigma,
        mutation_type: planned.mutation_type,
        map: config.map_config(planned.resolution),
        eval_budget: config.eval_budget,
        init_pop: config.init_pop,
        init_sigma: config.init_sigma,
        master_seed: planned.seed,
    };
    let mut logger = CheckpointLogger::new(config.eval_budget as u64);
    let (_, log) =
        map_elites::run(&run_config, &task, &mut logger).map_err(|source| ExperimentError::Run {
            run_id: planned.run_id(),
            source,
        })?;
    let series = logger.finish();
    let tail = series.last().copied().unwrap_or(PerformanceRecord {
        eval_index: 0,
        coverage: 0.0,
        precision: 0.0,
        reliability: 0.0,
    });
    Ok(RunRecord {
        combination_id: planned.combination_id,
        task_label: spec.label().to_string(),
        sigma: planned.sigma,
        resolution: planned.resolution,
        mutation_type: planned.mutation_type,
        run_index: planned.run_index,
        seed: planned.seed,
        evaluations: log.evaluations as u64,
        aborted: log.aborted,
        series,
        final_objectives: (tail.coverage, tail.precision, tail.reliability),
    })
}

/// Sweep execution summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecReport {
    pub executed: usize,
    pub skipped_existing: usize,
}

/// Runs a sweep with a bounded worker pool, persisting each run on
/// completion. Completed run files from an earlier attempt are skipped.
pub fn execute(
    config: &SweepConfig,
    out_dir: &Path,
    jobs: usize,
) -> Result<ExecReport, ExperimentError> {
    let plan = expand_sweep(config)?;
    fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let pending: Vec<&PlannedRun> = plan
        .iter()
        .filter(|p| !out_dir.join(p.file_name()).exists())
        .collect();
    let skipped_existing = plan.len() - pending.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        pending
            .par_iter()
            .map(|planned| {
                let record = execute_run(config, planned)?;
                let path = out_dir.join(planned.file_name());
                write_record(&record, &path).map_err(|source| ExperimentError::Persist {
                    run_id: planned.run_id(),
                    path: path.clone(),
                    source,
                })?;
                Ok(())
            })
            .collect::<Result<Vec<()>, ExperimentError>>()
    })?;
    Ok(ExecReport {
        executed: pending.len(),
        skipped_existing,
    })
}

/// Result of scanning a run directory.
#[derive(Debug)]
pub struct LoadReport {
    /// Records sorted by (combination, run) for deterministic downstream
    /// processing.
    pub records: Vec<RunRecord>,
    /// Malformed files that were skipped, with reasons.
    pub warnings: Vec<(PathBuf, String)>,
}

/// Loads every run record in a directory produced by [`execute`].
pub fn load_records(dir: &Path) -> Result<LoadReport, ExperimentError> {
    let entries = fs::read_dir(dir).map_err(|source| ExperimentError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    for path in paths {
        match parse_record(&path) {
            Ok(record) => records.push(record),
            Err(reason) => warnings.push((path, reason)),
        }
    }
    if records.is_empty() {
        return Err(ExperimentError::NoRecords(dir.to_path_buf()));
    }
    records.sort_by_key(|r| (r.combination_id, r.run_index));
    Ok(LoadReport { records, warnings })
}

/// The shipped desk-scale sweep: four tasks, five mutation magnitudes,
/// three resolutions and both mutation types at eight runs of 2000
/// evaluations per combination.
pub fn desk_preset() -> SweepConfig {
    static DESK: &str = include_str!("../presets/desk.toml");
    SweepConfig::from_toml(DESK).expect("desk preset parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gait::JointGroup;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            sigma_values: vec![0.2, 0.4],
            resolutions: vec![(5, 5)],
            mutation_types: vec![MutationType::All],
            tasks: vec![TaskSpec::Arc {
                label: "arc".into(),
            }],
            runs_per_combination: 2,
            eval_budget: 150,
            master_seed: 11,
            output_dir: None,
            init_pop: 30,
            init_sigma: 0.5,
            turn_rate_extent: DEFAULT_TURN_EXTENT,
            forward_speed_extent: DEFAULT_SPEED_EXTENT,
        }
    }

    #[test]
    fn expand_counts_full_product() {
        let mut config = tiny_config();
        config.sigma_values = vec![0.1, 0.2, 0.4, 0.8, 0.05];
        config.resolutions = vec![(5, 5), (7, 7), (9, 9)];
        config.mutation_types = vec![MutationType::All, MutationType::Some];
        config.tasks = vec![
            TaskSpec::Arc { label: "a".into() },
            TaskSpec::Arc { label: "b".into() },
            TaskSpec::Arc { label: "c".into() },
            TaskSpec::Arc { label: "d".into() },
        ];
        config.runs_per_combination = 12;
        let plan = expand_sweep(&config).unwrap();
        assert_eq!(plan.len(), 5 * 3 * 2 * 4 * 12);
        assert_eq!(config.combination_count(), 120);
    }

    #[test]
    fn expand_single_run() {
        let mut config = tiny_config();
        config.sigma_values = vec![0.2];
        config.runs_per_combination = 1;
        let plan = expand_sweep(&config).unwrap();
        assert_eq!(plan.len(), 1);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let config = tiny_config();
        let a = expand_sweep(&config).unwrap();
        let b = expand_sweep(&config).unwrap();
        assert_eq!(a, b);
        let mut seeds: Vec<u64> = a.iter().map(|p| p.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), a.len());
    }

    #[test]
    fn schedule_is_dense_then_geometric() {
        let s = checkpoint_schedule(2000);
        assert!(s.contains(&1));
        assert!(s.contains(&100));
        assert!(s.contains(&120));
        assert!(s.contains(&350));
        assert!(s.contains(&1250));
        assert!(!s.contains(&5000));
        assert_eq!(*s.last().unwrap(), 2000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));

        let small = checkpoint_schedule(50);
        assert_eq!(small, (1..=50).collect::<Vec<u64>>());
    }

    #[test]
    fn execute_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config();
        let report = execute(&config, dir.path(), 2).unwrap();
        assert_eq!(report.executed, 4);
        assert_eq!(report.skipped_existing, 0);

        let loaded = load_records(dir.path()).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.records.len(), 4);

        // Re-execution skips everything.
        let report = execute(&config, dir.path(), 2).unwrap();
        assert_eq!(report.executed, 0);
        assert_eq!(report.skipped_existing, 4);

        // Round trip is bit-exact against in-memory execution.
        let plan = expand_sweep(&config).unwrap();
        for planned in &plan {
            let fresh = execute_run(&config, planned).unwrap();
            let loaded_record = loaded
                .records
                .iter()
                .find(|r| {
                    r.combination_id == planned.combination_id && r.run_index == planned.run_index
                })
                .unwrap();
            assert_eq!(&fresh, loaded_record);
        }
    }

    #[test]
    fn load_skips_malformed_files_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config();
        execute(&config, dir.path(), 1).unwrap();
        fs::write(dir.path().join("broken.csv"), "not a run record\n").unwrap();
        let loaded = load_records(dir.path()).unwrap();
        assert_eq!(loaded.records.len(), 4);
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn load_empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        match load_records(dir.path()) {
            Err(ExperimentError::NoRecords(_)) => {}
            other => panic!("expected NoRecords, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_names_the_offending_key() {
        let mut config = tiny_config();
        config.sigma_values = vec![];
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("sigma_values"), "{err}");

        let mut config = tiny_config();
        config.eval_budget = 10;
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("eval_budget"), "{err}");
    }

    #[test]
    fn toml_round_trip_with_crawler_task() {
        let text = r#"
sigma_values = [0.1, 0.4]
resolutions = [[5, 5], [7, 7]]
mutation_types = ["all", "some"]
runs_per_combination = 2
eval_budget = 200
master_seed = 9

[[tasks]]
kind = "arc"
label = "arc"

[[tasks]]
kind = "crawler"
label = "quad"

[tasks.morphology]
control_period = 1.0
groups = [
    { kind = "mirror_pair", left = 0, right = 1 },
    { kind = "mirror_pair", left = 2, right = 3 },
    { kind = "single", joint = 4 },
]
"#;
        let config = SweepConfig::from_toml(text).unwrap();
        assert_eq!(config.tasks.len(), 2);
        match &config.tasks[1] {
            TaskSpec::Crawler { morphology, .. } => {
                assert_eq!(morphology.groups.len(), 3);
                assert_eq!(morphology.groups[2], JointGroup::Single { joint: 4 });
                assert_eq!(morphology.genome_len(), 14);
            }
            other => panic!("expected crawler, got {other:?}"),
        }
        // Defaults fill in.
        assert_eq!(config.init_pop, 100);
        assert_eq!(config.turn_rate_extent, DEFAULT_TURN_EXTENT);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
sigma_values = [0.1]
resolutions = [[5, 5]]
mutation_types = ["all"]
runs_per_combination = 1
eval_budget = 200
master_seed = 9
not_a_real_key = true

[[tasks]]
kind = "arc"
label = "arc"
"#;
        let err = SweepConfig::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("not_a_real_key"), "{err}");
    }

    #[test]
    fn desk_preset_parses_and_validates() {
        let config = desk_preset();
        assert_eq!(config.tasks.len(), 4);
        assert_eq!(config.sigma_values, vec![0.05, 0.1, 0.2, 0.4, 0.8]);
        assert_eq!(config.resolutions, vec![(5, 5), (7, 7), (9, 9)]);
        assert_eq!(config.mutation_types.len(), 2);
        assert_eq!(config.runs_per_combination, 8);
        assert_eq!(config.eval_budget, 2000);
    }
}
