//! Quality-diversity search with multi-objective performance analysis.
//!
//! The crate bundles a MAP-Elites implementation over a gait-style behavior
//! space, deterministic surrogate evaluation tasks, map-quality measures,
//! ordinal effect-size statistics (Cliff's delta and its Pareto-dominance
//! generalization with bootstrap confidence intervals), a sweep/persistence
//! harness and report generation (effect-size tables, coverage-precision
//! plots).

pub mod effect_size;
pub mod experiment;
pub mod gait;
pub mod map_elites;
pub mod measures;
pub mod plot;
pub mod report;
pub mod rng;
pub mod tasks;
pub mod trajectory;

pub use map_elites::{EliteMap, Genome, InsertOutcome, MapConfig, MutationType, RunConfig};
pub use measures::PerformanceRecord;
pub use trajectory::{BehaviorDescriptor, EvalOutcome, EvalResult, Evaluator};
