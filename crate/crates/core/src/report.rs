//! Analysis products: pairwise effect-size tables, implied orderings,
//! half-dominated regions and mean coverage-precision traces.
//!
//! Tables compare every pair of values of one swept parameter with the
//! Pareto-dominance delta over final (coverage, precision) vectors,
//! stratified the way the underlying study design demands: resolutions are
//! compared within (task, sigma), sigmas within (task, resolution) and
//! mutation types within (task, sigma, resolution). Reliability is left out
//! of the objective vector; it is the product of the other two and cannot
//! change any dominance verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::effect_size::{
    bootstrap_ci, is_significant, DeltaEstimate, Group, GroupedSample, ParetoKernel, StatError,
};
use crate::experiment::{RunRecord, MILESTONES};
use crate::map_elites::MutationType;
use crate::rng::stream_rng;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("parameter {0:?} has fewer than two distinct values")]
    TooFewValues(String),
    #[error("records do not share a checkpoint schedule")]
    MismatchedSchedules,
    #[error("statistics: {0}")]
    Stats(#[from] StatError),
    #[error("region needs at least one point")]
    NoPoints,
    #[error("region fraction must lie in (0, 1]")]
    BadFraction,
    #[error("region points must be finite and non-negative")]
    BadPoint,
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// The swept parameter a table or plot groups by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parameter {
    Sigma,
    Resolution,
    MutationType,
}

impl Parameter {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sigma" => Some(Parameter::Sigma),
            "resolution" => Some(Parameter::Resolution),
            "mutation" => Some(Parameter::MutationType),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Parameter::Sigma => "sigma",
            Parameter::Resolution => "resolution",
            Parameter::MutationType => "mutation",
        }
    }

    /// Human-readable description of the comparison strata.
    pub fn grouping_description(&self) -> &'static str {
        match self {
            Parameter::Sigma => "task x resolution",
            Parameter::Resolution => "task x sigma",
            Parameter::MutationType => "task x sigma x resolution",
        }
    }

    /// Label of this parameter's value in a record.
    pub fn value_label(&self, record: &RunRecord) -> String {
        match self {
            Parameter::Sigma => format!("{}", record.sigma),
            Parameter::Resolution => format!("{}x{}", record.resolution.0, record.resolution.1),
            Parameter::MutationType => record.mutation_type.to_string(),
        }
    }

    /// Sort key for value labels; sigma sorts numerically, resolutions by
    /// cell counts, mutation types in declaration order.
    fn value_sort_key(&self, record: &RunRecord) -> (f64, f64) {
        match self {
            Parameter::Sigma => (record.sigma, 0.0),
            Parameter::Resolution => (record.resolution.0 as f64, record.resolution.1 as f64),
            Parameter::MutationType => (
                match record.mutation_type {
                    MutationType::All => 0.0,
                    MutationType::Some => 1.0,
                },
                0.0,
            ),
        }
    }

    /// Stratum key holding everything fixed except this parameter.
    fn stratum_label(&self, record: &RunRecord) -> String {
        let task = &record.task_label;
        let sigma = record.sigma;
        let res = format!("{}x{}", record.resolution.0, record.resolution.1);
        match self {
            Parameter::Sigma => format!("task={task}|res={res}"),
            Parameter::Resolution => format!("task={task}|sigma={sigma}"),
            Parameter::MutationType => format!("task={task}|sigma={sigma}|res={res}"),
        }
    }

    /// Distinct value labels in ascending parameter order.
    pub fn distinct_values(&self, records: &[RunRecord]) -> Vec<String> {
        let mut seen: Vec<((f64, f64), String)> = Vec::new();
        for r in records {
            let label = self.value_label(r);
            if !seen.iter().any(|(_, l)| *l == label) {
                seen.push((self.value_sort_key(r), label));
            }
        }
        seen.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        seen.into_iter().map(|(_, l)| l).collect()
    }
}

/// Bootstrap parameters of a table computation.
#[derive(Clone, Copy, Debug)]
pub struct BootstrapSettings {
    pub n_boot: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        Self {
            n_boot: 10_000,
            level: 0.99,
            seed: 0,
        }
    }
}

/// Lower-triangular matrix of pairwise effect sizes for one parameter.
///
/// `entries[i][j]` (for `j < i`) compares value `labels[i]` (arm a) against
/// `labels[j]` (arm b); `None` marks a pair with no shared strata.
#[derive(Clone, Debug)]
pub struct PairwiseTable {
    pub parameter: Parameter,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Option<DeltaEstimate>>>,
    pub order: ImpliedOrder,
    pub settings: BootstrapSettings,
}

impl PairwiseTable {
    pub fn entry(&self, a: usize, b: usize) -> Option<&DeltaEstimate> {
        self.entries[a][b].as_ref()
    }
}

/// Computes the full pairwise table for one parameter.
pub fn pairwise_table(
    records: &[RunRecord],
    parameter: Parameter,
    settings: BootstrapSettings,
) -> Result<PairwiseTable, ReportError> {
    let labels = parameter.distinct_values(records);
    if labels.len() < 2 {
        return Err(ReportError::TooFewValues(parameter.name().into()));
    }
    // stratum -> value label -> final objective vectors
    let mut strata: BTreeMap<String, BTreeMap<String, Vec<Vec<f64>>>> = BTreeMap::new();
    for r in records {
        strata
            .entry(parameter.stratum_label(r))
            .or_default()
            .entry(parameter.value_label(r))
            .or_default()
            .push(r.final_coverage_precision());
    }

    let param_index = match parameter {
        Parameter::Sigma => 0u64,
        Parameter::Resolution => 1,
        Parameter::MutationType => 2,
    };
    let mut entries: Vec<Vec<Option<DeltaEstimate>>> = Vec::with_capacity(labels.len());
    for (i, a_label) in labels.iter().enumerate() {
        let mut row = Vec::with_capacity(i);
        for (j, b_label) in labels.iter().enumerate().take(i) {
            let groups: Vec<Group<Vec<f64>>> = strata
                .iter()
                .filter_map(|(stratum, by_value)| {
                    let a = by_value.get(a_label)?;
                    let b = by_value.get(b_label)?;
                    Some(Group {
                        label: stratum.clone(),
                        a: a.clone(),
                        b: b.clone(),
                    })
                })
                .collect();
            if groups.is_empty() {
                row.push(None);
                continue;
            }
            let sample = GroupedSample::new(groups)?;
            let mut rng = stream_rng(settings.seed, &[param_index, i as u64, j as u64]);
            let estimate = bootstrap_ci(
                &sample,
                &ParetoKernel,
                settings.level,
                settings.n_boot,
                &mut rng,
            )?;
            row.push(Some(estimate));
        }
        entries.push(row);
    }
    let order = implied_order(&labels, &entries);
    Ok(PairwiseTable {
        parameter,
        labels,
        entries,
        order,
        settings,
    })
}

/// Partial order over parameter values implied by significant effect sizes.
#[derive(Clone, Debug, PartialEq)]
pub enum ImpliedOrder {
    /// No significant pair.
    Empty,
    /// Total order over clusters of mutually indistinguishable values,
    /// best first.
    Chain(Vec<Vec<String>>),
    /// Significant relations that do not collapse into a chain; transitive
    /// reduction edges as (winner, loser).
    Partial(Vec<(String, String)>),
    /// Contradictory significance formed a cycle.
    Inconsistent(Vec<String>),
}

impl std::fmt::Display for ImpliedOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImpliedOrder::Empty => write!(f, "(no significant differences)"),
            ImpliedOrder::Chain(clusters) => {
                let parts: Vec<String> = clusters
                    .iter()
                    .map(|c| {
                        if c.len() == 1 {
                            c[0].clone()
                        } else {
                            format!("{{{}}}", c.join(", "))
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" \u{227b} "))
            }
            ImpliedOrder::Partial(edges) => {
                let parts: Vec<String> = edges
                    .iter()
                    .map(|(w, l)| format!("{w} \u{227b} {l}"))
                    .collect();
                write!(f, "{}", parts.join(", "))
            }
            ImpliedOrder::Inconsistent(cycle) => {
                write!(f, "inconsistent: {}", cycle.join(" \u{227b} "))
            }
        }
    }
}

/// Extracts the order implied by a table's significant entries: an edge
/// winner -> loser per significant pair, reported as a chain of clusters
/// when the relation is a weak order, as reduced edges otherwise, and as an
/// inconsistency when the edges form a cycle.
pub fn implied_order(labels: &[String], entries: &[Vec<Option<DeltaEstimate>>]) -> ImpliedOrder {
    let n = labels.len();
    let mut beats = vec![vec![false; n]; n];
    let mut any = false;
    for (i, row) in entries.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if let Some(est) = cell {
                if is_significant(est) {
                    any = true;
                    if est.delta > 0.0 {
                        beats[i][j] = true;
                    } else {
                        beats[j][i] = true;
                    }
                }
            }
        }
    }
    if !any {
        return ImpliedOrder::Empty;
    }

    // Reachability closure.
    let mut reach = beats.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    if let Some(start) = (0..n).find(|&i| reach[i][i]) {
        // Walk one cycle for the report.
        let mut cycle = vec![labels[start].clone()];
        let mut cur = start;
        loop {
            let next = (0..n)
                .find(|&j| beats[cur][j] && reach[j][start])
                .expect("cycle successor exists");
            cycle.push(labels[next].clone());
            if next == start {
                break;
            }
            cur = next;
        }
        return ImpliedOrder::Inconsistent(cycle);
    }

    // Clusters of values that are incomparable and relate identically to
    // everything else.
    let mut cluster_of: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let incomparable = !reach[i][j] && !reach[j][i];
            let same_profile = (0..n).filter(|&w| w != i && w != j).all(|w| {
                reach[i][w] == reach[j][w] && reach[w][i] == reach[w][j]
            });
            if incomparable && same_profile {
                let target = cluster_of[i];
                let from = cluster_of[j];
                for c in cluster_of.iter_mut() {
                    if *c == from {
                        *c = target;
                    }
                }
            }
        }
    }
    let mut cluster_ids: Vec<usize> = cluster_of.clone();
    cluster_ids.sort_unstable();
    cluster_ids.dedup();
    let clusters: Vec<Vec<usize>> = cluster_ids
        .iter()
        .map(|&id| (0..n).filter(|&i| cluster_of[i] == id).collect())
        .collect();

    // Verify the quotient is totally ordered; otherwise report edges.
    let cluster_beats = |a: &Vec<usize>, b: &Vec<usize>| reach[a[0]][b[0]];
    let total = clusters.iter().enumerate().all(|(x, a)| {
        clusters
            .iter()
            .enumerate()
            .all(|(y, b)| x == y || cluster_beats(a, b) || cluster_beats(b, a))
    });
    if total {
        let mut ordered = clusters.clone();
        ordered.sort_by_key(|c| clusters.iter().filter(|o| cluster_beats(o, c)).count());
        let named = ordered
            .into_iter()
            .map(|mut c| {
                // Members listed descending, matching the larger-first style
                // of brace clusters in effect-size tables.
                c.sort_unstable_by(|a, b| b.cmp(a));
                c.into_iter().map(|i| labels[i].clone()).collect()
            })
            .collect();
        return ImpliedOrder::Chain(named);
    }

    // Transitive reduction of the significant edges.
    let mut reduced = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if beats[i][j] {
                let redundant =
                    (0..n).any(|w| w != i && w != j && reach[i][w] && reach[w][j]);
                if !redundant {
                    reduced.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
    }
    ImpliedOrder::Partial(reduced)
}

/// Staircase region dominated by at least a fraction of a point set, closed
/// against the axes. Vertices run from the precision axis across to the
/// coverage axis and are non-decreasing in coverage.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPolygon {
    steps: Vec<(f64, f64)>,
    vertices: Vec<(f64, f64)>,
}

impl RegionPolygon {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Membership in the closed region (restricted to the non-negative
    /// quadrant).
    pub fn contains(&self, coverage: f64, precision: f64) -> bool {
        if coverage < 0.0 || precision < 0.0 {
            return false;
        }
        match self.steps.iter().find(|(u, _)| coverage <= *u) {
            Some(&(_, v)) => precision <= v,
            None => false,
        }
    }
}

/// Boundary of the set of points weakly dominated by at least
/// `ceil(fraction * n)` of the given `(coverage, precision)` points.
pub fn half_dominated_region(
    points: &[(f64, f64)],
    fraction: f64,
) -> Result<RegionPolygon, ReportError> {
    if points.is_empty() {
        return Err(ReportError::NoPoints);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ReportError::BadFraction);
    }
    if points
        .iter()
        .any(|(c, p)| !c.is_finite() || !p.is_finite() || *c < 0.0 || *p < 0.0)
    {
        return Err(ReportError::BadPoint);
    }
    let n = points.len();
    let k = ((fraction * n as f64).ceil() as usize).clamp(1, n);

    let mut coverages: Vec<f64> = points.iter().map(|p| p.0).collect();
    coverages.sort_by(|a, b| a.total_cmp(b));
    coverages.dedup();

    let mut steps = Vec::new();
    for &u in &coverages {
        let mut precisions: Vec<f64> = points
            .iter()
            .filter(|p| p.0 >= u)
            .map(|p| p.1)
            .collect();
        if precisions.len() < k {
            break;
        }
        precisions.sort_by(|a, b| b.total_cmp(a));
        steps.push((u, precisions[k - 1]));
    }
    debug_assert!(!steps.is_empty());

    let mut vertices = vec![(0.0, 0.0), (0.0, steps[0].1)];
    for (idx, &(u, v)) in steps.iter().enumerate() {
        push_vertex(&mut vertices, (u, v));
        if let Some(&(_, v_next)) = steps.get(idx + 1) {
            push_vertex(&mut vertices, (u, v_next));
        }
    }
    push_vertex(&mut vertices, (steps.last().unwrap().0, 0.0));
    Ok(RegionPolygon { steps, vertices })
}

fn push_vertex(vertices: &mut Vec<(f64, f64)>, v: (f64, f64)) {
    if vertices.last() != Some(&v) {
        vertices.push(v);
    }
}

/// Mean coverage-precision path of one parameter value over checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    pub label: String,
    /// (eval_index, mean coverage, mean precision) per checkpoint.
    pub points: Vec<(u64, f64, f64)>,
    /// Indices into `points` marking the milestone evaluations.
    pub milestones: Vec<usize>,
}

/// Averages run series per parameter value. All grouped records must share
/// the checkpoint schedule.
pub fn trace_series(
    records: &[RunRecord],
    parameter: Parameter,
) -> Result<Vec<TraceSeries>, ReportError> {
    let labels = parameter.distinct_values(records);
    let mut out = Vec::with_capacity(labels.len());
    for label in labels {
        let members: Vec<&RunRecord> = records
            .iter()
            .filter(|r| parameter.value_label(r) == label)
            .collect();
        let schedule: Vec<u64> = members[0].series.iter().map(|r| r.eval_index).collect();
        for m in &members {
            let other: Vec<u64> = m.series.iter().map(|r| r.eval_index).collect();
            if other != schedule {
                return Err(ReportError::MismatchedSchedules);
            }
        }
        let count = members.len() as f64;
        let points: Vec<(u64, f64, f64)> = schedule
            .iter()
            .enumerate()
            .map(|(idx, &eval)| {
                let cov = members.iter().map(|m| m.series[idx].coverage).sum::<f64>() / count;
                let prec = members.iter().map(|m| m.series[idx].precision).sum::<f64>() / count;
                (eval, cov, prec)
            })
            .collect();
        let milestones = points
            .iter()
            .enumerate()
            .filter(|(_, p)| MILESTONES.contains(&p.0))
            .map(|(i, _)| i)
            .collect();
        out.push(TraceSeries {
            label,
            points,
            milestones,
        });
    }
    Ok(out)
}

/// One table cell in the report format: signed point estimate, a `*` flag
/// on significance, and the CI half-width.
pub fn format_cell(estimate: Option<&DeltaEstimate>) -> String {
    match estimate {
        None => "n/a".to_string(),
        Some(est) => {
            let flag = if is_significant(est) { "*" } else { "" };
            format!("{:+.3}{} \u{b1}{:.3}", est.delta, flag, est.half_width())
        }
    }
}

/// Renders one table as a plain-text grid with the implied-order line.
pub fn render_table_text(table: &PairwiseTable) -> String {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "Pareto effect sizes for {} (strata: {}; {:.0}% CI, {} bootstrap, {} replicates)",
        table.parameter.name(),
        table.parameter.grouping_description(),
        table.settings.level * 100.0,
        match table.entries.iter().flatten().flatten().next() {
            Some(e) => e.method.to_string(),
            None => "percentile".to_string(),
        },
        table.settings.n_boot,
    );
    text.push('\n');

    let m = table.labels.len();
    let cell_width = (0..m)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| format_cell(table.entry(i, j)).chars().count())
        .chain(table.labels.iter().map(|l| l.chars().count()))
        .max()
        .unwrap_or(8)
        + 2;
    let row_label_width = table.labels.iter().map(|l| l.chars().count()).max().unwrap_or(4) + 2;

    let _ = write!(text, "{:row_label_width$}", "a \\ b");
    for b_label in &table.labels[..m - 1] {
        let _ = write!(text, "{b_label:>cell_width$}");
    }
    text.push('\n');
    for i in 1..m {
        let _ = write!(text, "{:row_label_width$}", table.labels[i]);
        for j in 0..i {
            let _ = write!(text, "{:>cell_width$}", format_cell(table.entry(i, j)));
        }
        text.push('\n');
    }
    text.push('\n');
    let _ = writeln!(text, "order: {}", table.order);
    text.push_str("* = significant (CI excludes zero)\n");
    text
}

/// Renders one table as machine-readable CSV.
pub fn render_table_csv(table: &PairwiseTable) -> String {
    let mut text = String::from(
        "parameter,a,b,delta,ci_low,ci_high,half_width,significant,p_a,p_b,p_draw,n_boot,level,method,degenerate_strata\n",
    );
    for i in 1..table.labels.len() {
        for j in 0..i {
            let row = match table.entry(i, j) {
                None => format!(
                    "{},{},{},,,,,,,,,{},{},,\n",
                    table.parameter.name(),
                    table.labels[i],
                    table.labels[j],
                    table.settings.n_boot,
                    table.settings.level,
                ),
                Some(est) => format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    table.parameter.name(),
                    table.labels[i],
                    table.labels[j],
                    est.delta,
                    est.ci_low,
                    est.ci_high,
                    est.half_width(),
                    is_significant(est),
                    est.p_a,
                    est.p_b,
                    est.p_draw,
                    est.n_boot,
                    est.level,
                    est.method,
                    est.degenerate_strata,
                ),
            };
            text.push_str(&row);
        }
    }
    text
}

fn write_file(path: &Path, content: &str) -> Result<(), ReportError> {
    std::fs::write(path, content).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `effects_<parameter>.txt` and `effects_<parameter>.csv` for each
/// table into `dir` and returns the paths written.
pub fn emit_tables(tables: &[PairwiseTable], dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for table in tables {
        let txt = dir.join(format!("effects_{}.txt", table.parameter.name()));
        write_file(&txt, &render_table_text(table))?;
        written.push(txt);
        let csv = dir.join(format!("effects_{}.csv", table.parameter.name()));
        write_file(&csv, &render_table_csv(table))?;
        written.push(csv);
    }
    Ok(written)
}

/// Raw final measures, one row per run, for external plotting.
pub fn export_finals(records: &[RunRecord], path: &Path) -> Result<(), ReportError> {
    let mut text =
        String::from("task,sigma,resolution,mutation,run_index,coverage,precision,reliability\n");
    for r in records {
        let _ = writeln!(
            text,
            "{},{},{}x{},{},{},{},{},{}",
            r.task_label,
            r.sigma,
            r.resolution.0,
            r.resolution.1,
            r.mutation_type,
            r.run_index,
            r.final_objectives.0,
            r.final_objectives.1,
            r.final_objectives.2,
        );
    }
    write_file(path, &text)
}
