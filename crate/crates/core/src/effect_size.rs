//! Ordinal effect sizes and their Pareto-dominance generalization.
//!
//! Cliff's delta is `P(a > b) - P(a < b)` over random pairs drawn from two
//! samples. It can be enumerated exactly, derived from the Wilcoxon-
//! Mann-Whitney U statistic (with half credit for ties), or approximated by
//! random pairs. Replacing the scalar comparison with strict Pareto
//! dominance yields a multi-objective analogue; the U shortcut does not
//! carry over because dominance is not a total order, so that statistic is
//! always enumerated.
//!
//! Comparisons across incomparable groups (different tasks, say) are done
//! within groups only and averaged with equal group weights. Confidence
//! intervals come from a percentile bootstrap that resamples observations
//! with replacement within each (group, arm) stratum.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use thiserror::Error;

use crate::rng::stream_rng;

/// Exact enumeration is used up to this many pairs; beyond it the sampled
/// estimator takes over.
pub const EXACT_PAIR_LIMIT: u64 = 10_000_000;

/// Pair count used by the sampled estimator when dispatched automatically.
pub const AUTO_SAMPLED_PAIRS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("sample must not be empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("objective vectors have mismatched dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("group {0:?} must have at least one observation in each arm")]
    EmptyArm(String),
    #[error("at least one group is required")]
    NoGroups,
    #[error("confidence level must lie strictly between 0 and 1")]
    BadLevel,
    #[error("bootstrap needs at least one replicate")]
    ZeroReplicates,
    #[error("pair sampling needs at least one pair")]
    ZeroPairs,
}

/// How one `(a, b)` pair compares under a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOutcome {
    AWins,
    BWins,
    Draw,
}

/// A pairwise comparison rule. Implementations must be antisymmetric:
/// swapping the arguments swaps `AWins` and `BWins`.
pub trait DeltaKernel<T: ?Sized> {
    fn compare(&self, a: &T, b: &T) -> PairOutcome;
}

/// Plain scalar comparison with ties as draws.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarKernel;

impl DeltaKernel<f64> for ScalarKernel {
    fn compare(&self, a: &f64, b: &f64) -> PairOutcome {
        if a > b {
            PairOutcome::AWins
        } else if a < b {
            PairOutcome::BWins
        } else {
            PairOutcome::Draw
        }
    }
}

/// Strict Pareto dominance over objective vectors (all maximized).
#[derive(Clone, Copy, Debug, Default)]
pub struct ParetoKernel;

impl DeltaKernel<Vec<f64>> for ParetoKernel {
    fn compare(&self, a: &Vec<f64>, b: &Vec<f64>) -> PairOutcome {
        match pareto_dominates(a, b) {
            Dominance::Dominates => PairOutcome::AWins,
            Dominance::DominatedBy => PairOutcome::BWins,
            Dominance::Incomparable => PairOutcome::Draw,
        }
    }
}

/// Three-way dominance classification. Equal vectors are `Incomparable`
/// because strict dominance requires one strictly better objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Incomparable,
}

/// Strict Pareto comparison: `x` dominates `y` when every objective is at
/// least as good and at least one is better. Both vectors are maximized and
/// must have equal dimensions.
pub fn pareto_dominates(x: &[f64], y: &[f64]) -> Dominance {
    debug_assert_eq!(x.len(), y.len());
    let mut better = false;
    let mut worse = false;
    for (xi, yi) in x.iter().zip(y) {
        if xi > yi {
            better = true;
        } else if xi < yi {
            worse = true;
        }
    }
    match (better, worse) {
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        _ => Dominance::Incomparable,
    }
}

/// Point value of an ordinal effect size with the pair probabilities
/// behind it: `delta = p_a - p_b` and `p_a + p_b + p_draw = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaCounts {
    pub delta: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_draw: f64,
}

impl DeltaCounts {
    fn from_tallies(wins: u64, losses: u64, draws: u64) -> Self {
        let total = (wins + losses + draws) as f64;
        Self {
            delta: (wins as f64 - losses as f64) / total,
            p_a: wins as f64 / total,
            p_b: losses as f64 / total,
            p_draw: draws as f64 / total,
        }
    }
}

fn pairwise_counts<T, K: DeltaKernel<T>>(a: &[T], b: &[T], kernel: &K) -> DeltaCounts {
    let mut wins = 0u64;
    let mut losses = 0u64;
    let mut draws = 0u64;
    for x in a {
        for y in b {
            match kernel.compare(x, y) {
                PairOutcome::AWins => wins += 1,
                PairOutcome::BWins => losses += 1,
                PairOutcome::Draw => draws += 1,
            }
        }
    }
    DeltaCounts::from_tallies(wins, losses, draws)
}

fn check_scalar_sample(s: &[f64]) -> Result<(), StatError> {
    if s.is_empty() {
        return Err(StatError::EmptySample);
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(StatError::NonFinite);
    }
    Ok(())
}

/// Cliff's delta by full pairwise enumeration.
pub fn cliffs_delta_exact(a: &[f64], b: &[f64]) -> Result<DeltaCounts, StatError> {
    check_scalar_sample(a)?;
    check_scalar_sample(b)?;
    Ok(pairwise_counts(a, b, &ScalarKernel))
}

/// Cliff's delta through the WMW U statistic: `2U / (|a||b|) - 1`, with U
/// accumulated from midranks so ties get half credit.
pub fn cliffs_delta_from_u(a: &[f64], b: &[f64]) -> Result<f64, StatError> {
    check_scalar_sample(a)?;
    check_scalar_sample(b)?;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank_sum_a = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // Average of the 1-based ranks i+1 ..= j+1.
        let midrank = (i + j + 2) as f64 / 2.0;
        for entry in &pooled[i..=j] {
            if entry.1 {
                rank_sum_a += midrank;
            }
        }
        i = j + 1;
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    Ok(2.0 * u / (na * nb) - 1.0)
}

/// Monte-Carlo Cliff's delta over `n_pairs` random pairs.
pub fn cliffs_delta_sampled<R: Rng>(
    a: &[f64],
    b: &[f64],
    n_pairs: usize,
    rng: &mut R,
) -> Result<DeltaCounts, StatError> {
    check_scalar_sample(a)?;
    check_scalar_sample(b)?;
    if n_pairs == 0 {
        return Err(StatError::ZeroPairs);
    }
    let mut wins = 0u64;
    let mut losses = 0u64;
    let mut draws = 0u64;
    for _ in 0..n_pairs {
        let x = a[rng.random_range(0..a.len())];
        let y = b[rng.random_range(0..b.len())];
        match ScalarKernel.compare(&x, &y) {
            PairOutcome::AWins => wins += 1,
            PairOutcome::BWins => losses += 1,
            PairOutcome::Draw => draws += 1,
        }
    }
    Ok(DeltaCounts::from_tallies(wins, losses, draws))
}

/// Cliff's delta with automatic estimator choice: exact enumeration up to
/// [`EXACT_PAIR_LIMIT`] pairs, sampled with [`AUTO_SAMPLED_PAIRS`] beyond.
pub fn cliffs_delta<R: Rng>(a: &[f64], b: &[f64], rng: &mut R) -> Result<DeltaCounts, StatError> {
    if (a.len() as u64).saturating_mul(b.len() as u64) <= EXACT_PAIR_LIMIT {
        cliffs_delta_exact(a, b)
    } else {
        cliffs_delta_sampled(a, b, AUTO_SAMPLED_PAIRS, rng)
    }
}

/// Vargha-Delaney effect size: `(delta + 1) / 2`.
pub fn vargha_delaney_a(delta: f64) -> f64 {
    (delta + 1.0) / 2.0
}

fn check_vector_sample(s: &[Vec<f64>], dim: usize) -> Result<(), StatError> {
    if s.is_empty() {
        return Err(StatError::EmptySample);
    }
    for v in s {
        if v.len() != dim {
            return Err(StatError::DimensionMismatch(dim, v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(StatError::NonFinite);
        }
    }
    Ok(())
}

/// Pareto-dominance delta by full pairwise enumeration. In dimension one it
/// coincides exactly with [`cliffs_delta_exact`].
pub fn pareto_delta(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<DeltaCounts, StatError> {
    let dim = a.first().or_else(|| b.first()).map_or(0, Vec::len);
    check_vector_sample(a, dim)?;
    check_vector_sample(b, dim)?;
    Ok(pairwise_counts(a, b, &ParetoKernel))
}

/// One stratum of a grouped comparison: observations of both arms measured
/// under the same conditions.
#[derive(Clone, Debug)]
pub struct Group<T> {
    pub label: String,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Strata over which deltas are computed separately and averaged with equal
/// weights, so incommensurable groups can be pooled.
#[derive(Clone, Debug)]
pub struct GroupedSample<T> {
    groups: Vec<Group<T>>,
}

impl<T> GroupedSample<T> {
    pub fn new(groups: Vec<Group<T>>) -> Result<Self, StatError> {
        if groups.is_empty() {
            return Err(StatError::NoGroups);
        }
        for g in &groups {
            if g.a.is_empty() || g.b.is_empty() {
                return Err(StatError::EmptyArm(g.label.clone()));
            }
        }
        Ok(Self { groups })
    }

    /// Single unlabeled group.
    pub fn ungrouped(a: Vec<T>, b: Vec<T>) -> Result<Self, StatError> {
        Self::new(vec![Group {
            label: String::new(),
            a,
            b,
        }])
    }

    pub fn groups(&self) -> &[Group<T>] {
        &self.groups
    }

    /// Number of (group, arm) strata with a single observation, where
    /// bootstrap resamples degenerate to copies.
    pub fn degenerate_strata(&self) -> usize {
        self.groups
            .iter()
            .map(|g| usize::from(g.a.len() == 1) + usize::from(g.b.len() == 1))
            .sum()
    }
}

fn grouped_counts<T, K: DeltaKernel<T>>(sample: &GroupedSample<T>, kernel: &K) -> DeltaCounts {
    let mut acc = DeltaCounts {
        delta: 0.0,
        p_a: 0.0,
        p_b: 0.0,
        p_draw: 0.0,
    };
    for g in &sample.groups {
        let c = pairwise_counts(&g.a, &g.b, kernel);
        acc.delta += c.delta;
        acc.p_a += c.p_a;
        acc.p_b += c.p_b;
        acc.p_draw += c.p_draw;
    }
    let n = sample.groups.len() as f64;
    DeltaCounts {
        delta: acc.delta / n,
        p_a: acc.p_a / n,
        p_b: acc.p_b / n,
        p_draw: acc.p_draw / n,
    }
}

/// Unweighted mean of per-group deltas under one kernel.
pub fn grouped_delta<T, K: DeltaKernel<T>>(sample: &GroupedSample<T>, kernel: &K) -> f64 {
    grouped_counts(sample, kernel).delta
}

/// How a confidence interval was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BootstrapMethod {
    Percentile,
}

impl std::fmt::Display for BootstrapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BootstrapMethod::Percentile => write!(f, "percentile"),
        }
    }
}

/// Effect-size point estimate with a bootstrap confidence interval.
#[derive(Clone, Debug)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Confidence level of the interval.
    pub level: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_draw: f64,
    pub n_boot: usize,
    /// Count of size-one (group, arm) strata in the input.
    pub degenerate_strata: usize,
    pub method: BootstrapMethod,
}

impl DeltaEstimate {
    /// Half-width of the interval, the `±` figure used in reports.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Linear-interpolation empirical quantile over a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap for a grouped delta.
///
/// Observations are resampled with replacement within each (group, arm)
/// stratum; the point estimate comes from the original data; the interval
/// is the empirical `(alpha/2, 1 - alpha/2)` quantile pair of the replicate
/// statistics. Replicates use seeds derived from the caller's RNG, so
/// results do not depend on the parallel schedule.
pub fn bootstrap_ci<T, K, R>(
    sample: &GroupedSample<T>,
    kernel: &K,
    level: f64,
    n_boot: usize,
    rng: &mut R,
) -> Result<DeltaEstimate, StatError>
where
    T: Clone + Sync,
    K: DeltaKernel<T> + Sync,
    R: RngCore,
{
    if !(level > 0.0 && level < 1.0) {
        return Err(StatError::BadLevel);
    }
    if n_boot == 0 {
        return Err(StatError::ZeroReplicates);
    }
    let point = grouped_counts(sample, kernel);
    let base_seed = rng.next_u64();

    let mut replicates: Vec<f64> = (0..n_boot)
        .into_par_iter()
        .map(|i| {
            let mut r = stream_rng(base_seed, &[i as u64]);
            let mut sum = 0.0;
            for g in &sample.groups {
                let mut resample = |src: &[T]| -> Vec<T> {
                    (0..src.len())
                        .map(|_| src[r.random_range(0..src.len())].clone())
                        .collect()
                };
                let a = resample(&g.a);
                let b = resample(&g.b);
                sum += pairwise_counts(&a, &b, kernel).delta;
            }
            sum / sample.groups.len() as f64
        })
        .collect();
    replicates.sort_by(|x, y| x.total_cmp(y));

    let alpha = 1.0 - level;
    let ci_low = quantile(&replicates, alpha / 2.0).min(point.delta);
    let ci_high = quantile(&replicates, 1.0 - alpha / 2.0).max(point.delta);

    Ok(DeltaEstimate {
        delta: point.delta,
        ci_low,
        ci_high,
        level,
        p_a: point.p_a,
        p_b: point.p_b,
        p_draw: point.p_draw,
        n_boot,
        degenerate_strata: sample.degenerate_strata(),
        method: BootstrapMethod::Percentile,
    })
}

/// Significance by interval position: true only when the whole interval
/// lies strictly on one side of zero. A bound exactly at zero counts as
/// overlapping.
pub fn is_significant(est: &DeltaEstimate) -> bool {
    est.ci_low > 0.0 || est.ci_high < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_counts(c: DeltaCounts, delta: f64, p_a: f64, p_b: f64, p_draw: f64) {
        assert!((c.delta - delta).abs() < 1e-15, "delta {} vs {delta}", c.delta);
        assert!((c.p_a - p_a).abs() < 1e-15);
        assert!((c.p_b - p_b).abs() < 1e-15);
        assert!((c.p_draw - p_draw).abs() < 1e-15);
        assert!((c.p_a + c.p_b + c.p_draw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_delta_basic_fixtures() {
        let c = cliffs_delta_exact(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_counts(c, 1.0, 1.0, 0.0, 0.0);

        let c = cliffs_delta_exact(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_counts(c, 0.0, 0.25, 0.25, 0.5);

        let c = cliffs_delta_exact(&[2.0, 2.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_counts(c, 1.0 / 3.0, 6.0 / 9.0, 3.0 / 9.0, 0.0);
    }

    #[test]
    fn exact_delta_rejects_bad_input() {
        assert_eq!(
            cliffs_delta_exact(&[], &[1.0]).unwrap_err(),
            StatError::EmptySample
        );
        assert_eq!(
            cliffs_delta_exact(&[f64::NAN], &[1.0]).unwrap_err(),
            StatError::NonFinite
        );
    }

    #[test]
    fn u_delta_matches_exact_on_fixtures() {
        let cases: [(&[f64], &[f64]); 4] = [
            (&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]),
            (&[1.0, 2.0], &[1.0, 2.0]),
            (&[2.0, 2.0, 0.0], &[1.0, 1.0, 1.0]),
            (&[5.0], &[5.0]),
        ];
        for (a, b) in cases {
            let exact = cliffs_delta_exact(a, b).unwrap().delta;
            let from_u = cliffs_delta_from_u(a, b).unwrap();
            assert!((exact - from_u).abs() <= 1e-12, "{a:?} vs {b:?}");
        }
        assert_eq!(cliffs_delta_from_u(&[5.0], &[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn u_delta_is_symmetric_on_shuffled_identicals() {
        let a: Vec<f64> = (1..=100).map(f64::from).collect();
        let mut b = a.clone();
        b.reverse();
        b.swap(3, 57);
        assert!(cliffs_delta_from_u(&a, &b).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn u_delta_matches_exact_on_random_tied_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let na = rng.random_range(1..=50);
            let nb = rng.random_range(1..=50);
            // Draw from a small integer lattice so ties are common.
            let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..10) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..10) as f64).collect();
            let exact = cliffs_delta_exact(&a, &b).unwrap().delta;
            let from_u = cliffs_delta_from_u(&a, &b).unwrap();
            assert!((exact - from_u).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampled_delta_degenerate_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let c = cliffs_delta_sampled(&[2.0, 3.0], &[0.0, 1.0], 1000, &mut rng).unwrap();
        assert_eq!(c.delta, 1.0);

        let a: Vec<f64> = (0..40).map(|i| (i % 7) as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| (i % 5) as f64 + 0.5).collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let s1 = cliffs_delta_sampled(&a, &b, 5000, &mut r1).unwrap();
        let s2 = cliffs_delta_sampled(&a, &b, 5000, &mut r2).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn sampled_delta_close_to_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..25).map(|_| rng.random::<f64>() * 1.3 - 0.1).collect();
        let exact = cliffs_delta_exact(&a, &b).unwrap().delta;
        let sampled = cliffs_delta_sampled(&a, &b, 1_000_000, &mut rng).unwrap().delta;
        assert!((exact - sampled).abs() < 0.005);
    }

    #[test]
    fn vargha_delaney_mapping() {
        assert_eq!(vargha_delaney_a(1.0), 1.0);
        assert_eq!(vargha_delaney_a(0.0), 0.5);
        assert!((vargha_delaney_a(-0.8) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn dominance_classification() {
        assert_eq!(pareto_dominates(&[2.0, 2.0], &[1.0, 1.0]), Dominance::Dominates);
        assert_eq!(pareto_dominates(&[1.0, 1.0], &[2.0, 2.0]), Dominance::DominatedBy);
        assert_eq!(pareto_dominates(&[1.0, 0.0], &[0.0, 1.0]), Dominance::Incomparable);
        assert_eq!(pareto_dominates(&[1.0, 1.0], &[1.0, 1.0]), Dominance::Incomparable);
        assert_eq!(pareto_dominates(&[2.0, 1.0], &[1.0, 1.0]), Dominance::Dominates);
    }

    #[test]
    fn pareto_delta_fixtures() {
        let c = pareto_delta(&[vec![1.0, 1.0]], &[vec![0.0, 0.0]]).unwrap();
        assert_counts(c, 1.0, 1.0, 0.0, 0.0);

        let a = vec![vec![2.0, 2.0], vec![0.0, 0.0]];
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let c = pareto_delta(&a, &b).unwrap();
        assert_counts(c, 0.0, 0.5, 0.5, 0.0);
    }

    #[test]
    fn pareto_delta_dimension_mismatch() {
        let err = pareto_delta(&[vec![1.0, 2.0]], &[vec![1.0]]).unwrap_err();
        assert_eq!(err, StatError::DimensionMismatch(2, 1));
    }

    #[test]
    fn pareto_delta_reduces_to_cliffs_in_1d() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..200 {
            let na = rng.random_range(1..=12);
            let nb = rng.random_range(1..=12);
            let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..6) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..6) as f64).collect();
            let scalar = cliffs_delta_exact(&a, &b).unwrap();
            let vectors_a: Vec<Vec<f64>> = a.iter().map(|&v| vec![v]).collect();
            let vectors_b: Vec<Vec<f64>> = b.iter().map(|&v| vec![v]).collect();
            let vector = pareto_delta(&vectors_a, &vectors_b).unwrap();
            assert_eq!(scalar, vector);
        }
    }

    #[test]
    fn antisymmetry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..100 {
            let a: Vec<f64> = (0..10).map(|_| rng.random_range(0..5) as f64).collect();
            let b: Vec<f64> = (0..8).map(|_| rng.random_range(0..5) as f64).collect();
            let ab = cliffs_delta_exact(&a, &b).unwrap();
            let ba = cliffs_delta_exact(&b, &a).unwrap();
            assert_eq!(ab.delta, -ba.delta);
            assert_eq!(ab.p_a, ba.p_b);

            let va: Vec<Vec<f64>> = a.chunks(2).map(|c| c.to_vec()).collect();
            let vb: Vec<Vec<f64>> = b.chunks(2).map(|c| c.to_vec()).collect();
            let pab = pareto_delta(&va, &vb).unwrap();
            let pba = pareto_delta(&vb, &va).unwrap();
            assert_eq!(pab.delta, -pba.delta);
        }
    }

    #[test]
    fn ordinal_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let increasing = |v: f64| (v * 0.7).exp() + 3.0 * v;
        for _ in 0..100 {
            let a: Vec<f64> = (0..9).map(|_| rng.random_range(0..5) as f64).collect();
            let b: Vec<f64> = (0..7).map(|_| rng.random_range(0..5) as f64).collect();
            let before = cliffs_delta_exact(&a, &b).unwrap();
            let ta: Vec<f64> = a.iter().map(|&v| increasing(v)).collect();
            let tb: Vec<f64> = b.iter().map(|&v| increasing(v)).collect();
            let after = cliffs_delta_exact(&ta, &tb).unwrap();
            assert_eq!(before, after);

            // Per-coordinate strictly increasing maps preserve dominance.
            let va: Vec<Vec<f64>> = a.windows(2).map(|w| w.to_vec()).collect();
            let vb: Vec<Vec<f64>> = b.windows(2).map(|w| w.to_vec()).collect();
            let p_before = pareto_delta(&va, &vb).unwrap();
            let map2 = |v: &Vec<f64>| vec![increasing(v[0]), v[1].powi(3) + v[1]];
            let ta: Vec<Vec<f64>> = va.iter().map(map2).collect();
            let tb: Vec<Vec<f64>> = vb.iter().map(map2).collect();
            let p_after = pareto_delta(&ta, &tb).unwrap();
            assert_eq!(p_before, p_after);
        }
    }

    #[test]
    fn grouped_delta_averages_groups() {
        let g = GroupedSample::new(vec![
            Group {
                label: "g1".into(),
                a: vec![1.0],
                b: vec![0.0],
            },
            Group {
                label: "g2".into(),
                a: vec![0.0],
                b: vec![1.0],
            },
        ])
        .unwrap();
        assert_eq!(grouped_delta(&g, &ScalarKernel), 0.0);

        let single = GroupedSample::ungrouped(vec![2.0, 2.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        let plain = cliffs_delta_exact(&[2.0, 2.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(grouped_delta(&single, &ScalarKernel), plain.delta);
    }

    #[test]
    fn grouped_delta_four_group_mean() {
        // Four strata with per-group deltas 0.2, 0.4, -0.1, 0.1; their
        // unweighted mean is 0.15. Each stratum compares 10 a-values against
        // 10 zeros, so delta = (positives - negatives) / 10 in that stratum.
        let make = |wins: usize, losses: usize| -> Group<f64> {
            let mut a = vec![0.0; 10];
            for (i, v) in a.iter_mut().enumerate() {
                if i < wins {
                    *v = 1.0;
                } else if i < wins + losses {
                    *v = -1.0;
                }
            }
            Group {
                label: format!("w{wins}l{losses}"),
                a,
                b: vec![0.0; 10],
            }
        };
        let g = GroupedSample::new(vec![make(2, 0), make(4, 0), make(0, 1), make(1, 0)]).unwrap();
        assert!((grouped_delta(&g, &ScalarKernel) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn grouped_sample_rejects_empty_arm() {
        let err = GroupedSample::new(vec![Group {
            label: "empty-b".into(),
            a: vec![1.0],
            b: Vec::<f64>::new(),
        }])
        .unwrap_err();
        assert_eq!(err, StatError::EmptyArm("empty-b".into()));
        assert_eq!(
            GroupedSample::<f64>::new(vec![]).unwrap_err(),
            StatError::NoGroups
        );
    }

    #[test]
    fn bootstrap_identical_observations_give_zero_width_ci() {
        let g = GroupedSample::ungrouped(vec![3.0; 8], vec![3.0; 8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let est = bootstrap_ci(&g, &ScalarKernel, 0.99, 1000, &mut rng).unwrap();
        assert_eq!(est.delta, 0.0);
        assert_eq!(est.ci_low, 0.0);
        assert_eq!(est.ci_high, 0.0);
        assert!(!is_significant(&est));
    }

    #[test]
    fn bootstrap_is_seed_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let a: Vec<f64> = (0..12).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..12).map(|_| rng.random::<f64>() + 0.4).collect();
        let g = GroupedSample::ungrouped(a, b).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        let e1 = bootstrap_ci(&g, &ScalarKernel, 0.99, 2000, &mut r1).unwrap();
        let e2 = bootstrap_ci(&g, &ScalarKernel, 0.99, 2000, &mut r2).unwrap();
        assert_eq!(e1.ci_low, e2.ci_low);
        assert_eq!(e1.ci_high, e2.ci_high);
        assert_eq!(e1.delta, e2.delta);
    }

    #[test]
    fn bootstrap_flags_degenerate_strata() {
        let g = GroupedSample::new(vec![Group {
            label: "tiny".into(),
            a: vec![1.0],
            b: vec![0.0, 2.0],
        }])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let est = bootstrap_ci(&g, &ScalarKernel, 0.99, 1000, &mut rng).unwrap();
        assert_eq!(est.degenerate_strata, 1);
        assert_eq!(est.method, BootstrapMethod::Percentile);
    }

    #[test]
    fn bootstrap_separated_arms_are_significant() {
        let g = GroupedSample::ungrouped(
            (0..12).map(|i| 10.0 + i as f64).collect(),
            (0..12).map(|i| i as f64 * 0.1).collect(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let est = bootstrap_ci(&g, &ScalarKernel, 0.99, 1000, &mut rng).unwrap();
        assert_eq!(est.delta, 1.0);
        assert!(is_significant(&est));
        assert!(est.ci_low <= est.delta && est.delta <= est.ci_high);
    }

    #[test]
    fn significance_boundary_conventions() {
        let base = DeltaEstimate {
            delta: -0.17,
            ci_low: -0.22,
            ci_high: -0.12,
            level: 0.99,
            p_a: 0.0,
            p_b: 0.0,
            p_draw: 1.0,
            n_boot: 1000,
            degenerate_strata: 0,
            method: BootstrapMethod::Percentile,
        };
        assert!(is_significant(&base));
        let overlapping = DeltaEstimate {
            delta: -0.05,
            ci_low: -0.10,
            ci_high: 0.01,
            ..base.clone()
        };
        assert!(!is_significant(&overlapping));
        let boundary = DeltaEstimate {
            delta: 0.1,
            ci_low: 0.0,
            ci_high: 0.2,
            ..base
        };
        assert!(!is_significant(&boundary));
    }
}
