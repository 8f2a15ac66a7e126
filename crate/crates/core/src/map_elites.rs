//! MAP-Elites archive and search loop.
//!
//! A 2-D grid over behavior space where each cell keeps the best solution
//! whose behavior lands in it. The loop seeds the archive from Gaussian
//! perturbations of the zero genome, then repeats select-mutate-evaluate-
//! insert until the evaluation budget is spent. Replacement is strict:
//! an occupant is displaced only by a strictly higher fitness. Behaviors
//! outside the map extents are discarded rather than clamped.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures;
use crate::measures::PerformanceRecord;
use crate::rng::stream_rng;
use crate::trajectory::{BehaviorDescriptor, EvalOutcome, Evaluator};

/// An unbounded real parameter vector. Length is fixed per task and
/// preserved by every mutation operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    params: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("genome parameters must be finite")]
    NonFiniteGenome,
    #[error("genome must have at least one parameter")]
    EmptyGenome,
    #[error("map resolution must be at least 1x1")]
    ZeroResolution,
    #[error("map extents must have positive width")]
    EmptyExtent,
    #[error("behavior descriptor is not finite")]
    NonFiniteBehavior,
    #[error("fitness {0} is not finite and non-negative")]
    InvalidFitness(f64),
    #[error("cannot select an elite from an empty map")]
    EmptyMap,
    #[error("run config invalid: {0}")]
    BadRunConfig(&'static str),
    #[error("archive still empty after the initialization phase")]
    NothingInserted,
}

impl Genome {
    pub fn new(params: Vec<f64>) -> Result<Self, MapError> {
        if params.is_empty() {
            return Err(MapError::EmptyGenome);
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(MapError::NonFiniteGenome);
        }
        Ok(Self { params })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            params: vec![0.0; len],
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

/// Closed interval of one behavior axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self, MapError> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(MapError::EmptyExtent);
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Grid shape and behavior-space extents of an elite map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    /// Cells along (turn rate, forward speed).
    pub resolution: (usize, usize),
    pub turn_rate: Interval,
    pub forward_speed: Interval,
}

impl MapConfig {
    pub fn new(
        resolution: (usize, usize),
        turn_rate: Interval,
        forward_speed: Interval,
    ) -> Result<Self, MapError> {
        if resolution.0 == 0 || resolution.1 == 0 {
            return Err(MapError::ZeroResolution);
        }
        Ok(Self {
            resolution,
            turn_rate,
            forward_speed,
        })
    }

    /// Total cell count.
    pub fn cell_count(&self) -> usize {
        self.resolution.0 * self.resolution.1
    }
}

/// Bins one coordinate onto `r` half-open cells with the top edge closed.
/// Agrees exactly with a scan over boundaries `min + i * width / r`.
fn bin_axis(value: f64, interval: Interval, r: usize) -> Option<usize> {
    if !(value >= interval.min && value <= interval.max) {
        return None;
    }
    let cell_width = interval.width() / r as f64;
    let last = r as isize - 1;
    let mut i = (((value - interval.min) / cell_width).floor() as isize).clamp(0, last);
    // Nudge against the boundary grid so interior edges go to the upper cell.
    if value < interval.min + i as f64 * cell_width {
        i -= 1;
    } else if i < last && value >= interval.min + (i + 1) as f64 * cell_width {
        i += 1;
    }
    Some(i.clamp(0, last) as usize)
}

/// Maps a behavior to its cell, or `None` when it falls outside the extents.
pub fn bin(behavior: BehaviorDescriptor, config: &MapConfig) -> Option<(usize, usize)> {
    let i = bin_axis(behavior.turn_rate, config.turn_rate, config.resolution.0)?;
    let j = bin_axis(
        behavior.forward_speed,
        config.forward_speed,
        config.resolution.1,
    )?;
    Some((i, j))
}

/// Result of one insertion attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    NewCell,
    Improved,
    Rejected,
    OutOfBounds,
}

/// Occupant of one map cell.
#[derive(Clone, Debug)]
pub struct Elite {
    pub genome: Genome,
    pub behavior: BehaviorDescriptor,
    pub fitness: f64,
}

/// The behavior-space archive.
#[derive(Clone, Debug)]
pub struct EliteMap {
    config: MapConfig,
    cells: Vec<Option<Elite>>,
    filled: Vec<usize>,
}

impl EliteMap {
    pub fn new(config: MapConfig) -> Self {
        let cells = vec![None; config.cell_count()];
        Self {
            config,
            cells,
            filled: Vec::new(),
        }
    }

    pub fn config(&self) -> &MapConfig {
        &self.config
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<&Elite> {
        self.cells[i * self.config.resolution.1 + j].as_ref()
    }

    pub fn filled_count(&self) -> usize {
        self.filled.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filled.is_empty()
    }

    /// Iterates over occupied cells.
    pub fn elites(&self) -> impl Iterator<Item = &Elite> {
        self.cells.iter().flatten()
    }

    /// Tries to place a solution; strict improvement is required to displace
    /// an occupant, and ties are rejected.
    pub fn try_insert(
        &mut self,
        genome: Genome,
        behavior: BehaviorDescriptor,
        fitness: f64,
    ) -> Result<InsertOutcome, MapError> {
        if !behavior.turn_rate.is_finite() || !behavior.forward_speed.is_finite() {
            return Err(MapError::NonFiniteBehavior);
        }
        if !fitness.is_finite() || fitness < 0.0 {
            return Err(MapError::InvalidFitness(fitness));
        }
        let Some((i, j)) = bin(behavior, &self.config) else {
            return Ok(InsertOutcome::OutOfBounds);
        };
        let index = i * self.config.resolution.1 + j;
        match &self.cells[index] {
            None => {
                self.cells[index] = Some(Elite {
                    genome,
                    behavior,
                    fitness,
                });
                self.filled.push(index);
                Ok(InsertOutcome::NewCell)
            }
            Some(existing) if fitness > existing.fitness => {
                self.cells[index] = Some(Elite {
                    genome,
                    behavior,
                    fitness,
                });
                Ok(InsertOutcome::Improved)
            }
            Some(_) => Ok(InsertOutcome::Rejected),
        }
    }

    /// Uniform draw over filled cells; returns a copy of the occupant genome.
    pub fn select_random_elite<R: Rng>(&self, rng: &mut R) -> Result<Genome, MapError> {
        if self.filled.is_empty() {
            return Err(MapError::EmptyMap);
        }
        let index = self.filled[rng.random_range(0..self.filled.len())];
        Ok(self.cells[index].as_ref().unwrap().genome.clone())
    }
}

/// Perturbs every parameter with an independent `N(0, sigma^2)` draw.
pub fn mutate_all<R: Rng>(genome: &Genome, sigma: f64, rng: &mut R) -> Genome {
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    Genome {
        params: genome.params.iter().map(|p| p + normal.sample(rng)).collect(),
    }
}

/// Perturbs each parameter with probability `1/k`, leaving the rest
/// bit-identical. The expected number of changed parameters is one.
pub fn mutate_some<R: Rng>(genome: &Genome, sigma: f64, rng: &mut R) -> Genome {
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    let p = 1.0 / genome.len() as f64;
    Genome {
        params: genome
            .params
            .iter()
            .map(|v| {
                if rng.random::<f64>() < p {
                    v + normal.sample(rng)
                } else {
                    *v
                }
            })
            .collect(),
    }
}

/// Which mutation operator the search applies after initialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationType {
    All,
    Some,
}

impl std::fmt::Display for MutationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MutationType::All => write!(f, "all"),
            MutationType::Some => write!(f, "some"),
        }
    }
}

/// Full parameterization of one search run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Mutation standard deviation.
    pub sigma: f64,
    pub mutation_type: MutationType,
    pub map: MapConfig,
    /// Total evaluations, initialization included.
    pub eval_budget: usize,
    /// Initial population size.
    pub init_pop: usize,
    /// Standard deviation of the all-parameter initialization mutation
    /// applied to the zero genome.
    pub init_sigma: f64,
    pub master_seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), MapError> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(MapError::BadRunConfig("sigma must be positive"));
        }
        if !self.init_sigma.is_finite() || self.init_sigma <= 0.0 {
            return Err(MapError::BadRunConfig("init_sigma must be positive"));
        }
        if self.init_pop == 0 {
            return Err(MapError::BadRunConfig("init_pop must be positive"));
        }
        if self.eval_budget < self.init_pop {
            return Err(MapError::BadRunConfig("eval_budget must cover init_pop"));
        }
        Ok(())
    }
}

/// Receives one map-quality record after every completed evaluation.
pub trait PerformanceLogger {
    fn log(&mut self, record: PerformanceRecord);
}

impl<F: FnMut(PerformanceRecord)> PerformanceLogger for F {
    fn log(&mut self, record: PerformanceRecord) {
        self(record)
    }
}

/// Discards all records.
pub struct NullLogger;

impl PerformanceLogger for NullLogger {
    fn log(&mut self, _record: PerformanceRecord) {}
}

/// Summary counters of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunLog {
    pub evaluations: usize,
    pub aborted: bool,
    pub new_cells: usize,
    pub improved: usize,
    pub rejected: usize,
    pub out_of_bounds: usize,
}

impl RunLog {
    fn count(&mut self, outcome: InsertOutcome) {
        match outcome {
            InsertOutcome::NewCell => self.new_cells += 1,
            InsertOutcome::Improved => self.improved += 1,
            InsertOutcome::Rejected => self.rejected += 1,
            InsertOutcome::OutOfBounds => self.out_of_bounds += 1,
        }
    }
}

/// Executes one MAP-Elites run.
///
/// Phase one evaluates `init_pop` genomes drawn as all-parameter Gaussian
/// perturbations (`init_sigma`) of the zero genome. Phase two selects a
/// uniform random elite, mutates it and inserts the result, until
/// `eval_budget` evaluations have been spent or the task signals an abort.
/// Fully deterministic given `master_seed`.
pub fn run<E: Evaluator, L: PerformanceLogger>(
    config: &RunConfig,
    evaluator: &E,
    logger: &mut L,
) -> Result<(EliteMap, RunLog), MapError> {
    config.validate()?;
    let genome_len = evaluator.genome_len();
    if genome_len == 0 {
        return Err(MapError::EmptyGenome);
    }
    let mut rng = stream_rng(config.master_seed, &[]);
    let mut map = EliteMap::new(config.map.clone());
    let mut log = RunLog::default();
    let origin = Genome::zeros(genome_len);

    for eval_index in 1..=config.eval_budget {
        let genome = if eval_index <= config.init_pop {
            mutate_all(&origin, config.init_sigma, &mut rng)
        } else {
            if map.is_empty() {
                return Err(MapError::NothingInserted);
            }
            let parent = map.select_random_elite(&mut rng)?;
            match config.mutation_type {
                MutationType::All => mutate_all(&parent, config.sigma, &mut rng),
                MutationType::Some => mutate_some(&parent, config.sigma, &mut rng),
            }
        };
        match evaluator.evaluate(&genome) {
            EvalOutcome::Aborted => {
                log.aborted = true;
                break;
            }
            EvalOutcome::Completed(result) => {
                let outcome = map.try_insert(genome, result.behavior, result.fitness)?;
                log.count(outcome);
                log.evaluations = eval_index;
                logger.log(measures::snapshot(&map, eval_index as u64));
            }
        }
    }
    Ok((map, log))
}
