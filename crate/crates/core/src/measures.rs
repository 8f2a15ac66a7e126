//! Map-quality measures.
//!
//! Coverage is the fraction of cells filled, precision the average score of
//! filled cells and global reliability the average score across all cells,
//! which equals both the QD-score normalized by cell count and the product
//! of precision and coverage. Cell scores are used as stored; nothing is
//! rescaled against per-cell best-known values.

use serde::{Deserialize, Serialize};

use crate::map_elites::EliteMap;

/// Map-quality snapshot taken after one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    /// 1-based evaluation counter.
    pub eval_index: u64,
    pub coverage: f64,
    pub precision: f64,
    pub reliability: f64,
}

/// Sum of fitness over filled cells (empty cells contribute zero).
pub fn qd_score(map: &EliteMap) -> f64 {
    map.elites().map(|e| e.fitness).sum()
}

/// Fraction of cells filled.
pub fn coverage(map: &EliteMap) -> f64 {
    map.filled_count() as f64 / map.cell_count() as f64
}

/// Average score of filled cells; zero for an empty map so logging is total
/// from the first evaluation.
pub fn precision(map: &EliteMap) -> f64 {
    let n = map.filled_count();
    if n == 0 {
        0.0
    } else {
        qd_score(map) / n as f64
    }
}

/// QD-score normalized by cell count; equals precision times coverage.
pub fn reliability(map: &EliteMap) -> f64 {
    qd_score(map) / map.cell_count() as f64
}

/// Bundles the three measures for the per-evaluation log stream.
pub fn snapshot(map: &EliteMap, eval_index: u64) -> PerformanceRecord {
    PerformanceRecord {
        eval_index,
        coverage: coverage(map),
        precision: precision(map),
        reliability: reliability(map),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_elites::{EliteMap, Genome, MapConfig, Interval};
    use crate::trajectory::BehaviorDescriptor;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config() -> MapConfig {
        MapConfig::new(
            (5, 5),
            Interval::new(-3.0, 3.0).unwrap(),
            Interval::new(-0.75, 0.75).unwrap(),
        )
        .unwrap()
    }

    fn insert(map: &mut EliteMap, t: f64, f: f64, fitness: f64) {
        map.try_insert(
            Genome::new(vec![fitness.max(0.1)]).unwrap(),
            BehaviorDescriptor {
                turn_rate: t,
                forward_speed: f,
            },
            fitness,
        )
        .unwrap();
    }

    #[test]
    fn empty_map_measures() {
        let map = EliteMap::new(config());
        assert_eq!(qd_score(&map), 0.0);
        assert_eq!(coverage(&map), 0.0);
        assert_eq!(precision(&map), 0.0);
        assert_eq!(reliability(&map), 0.0);
    }

    #[test]
    fn hand_filled_measures() {
        let mut map = EliteMap::new(config());
        insert(&mut map, -2.5, -0.6, 1.0);
        insert(&mut map, 0.0, 0.0, 2.0);
        insert(&mut map, 2.5, 0.6, 3.0);
        assert_eq!(qd_score(&map), 6.0);
        assert_eq!(coverage(&map), 3.0 / 25.0);
        assert_eq!(precision(&map), 2.0);
        assert_eq!(reliability(&map), 6.0 / 25.0);
    }

    #[test]
    fn replacement_keeps_coverage() {
        let mut map = EliteMap::new(config());
        insert(&mut map, 0.0, 0.0, 1.0);
        let before = coverage(&map);
        insert(&mut map, 0.0, 0.0, 5.0);
        assert_eq!(coverage(&map), before);
        assert_eq!(precision(&map), 5.0);
    }

    #[test]
    fn random_map_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let mut map = EliteMap::new(config());
            for _ in 0..rng.random_range(0..60) {
                insert(
                    &mut map,
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-0.75..0.75),
                    rng.random_range(0.0..10.0),
                );
            }
            // Brute force over every cell, empties as zero.
            let mut sum = 0.0;
            let mut filled = 0usize;
            for i in 0..5 {
                for j in 0..5 {
                    if let Some(e) = map.cell(i, j) {
                        sum += e.fitness;
                        filled += 1;
                    }
                }
            }
            assert_eq!(qd_score(&map), sum);
            assert_eq!(coverage(&map), filled as f64 / 25.0);
            let g = reliability(&map);
            let pc = precision(&map) * coverage(&map);
            assert!((g - pc).abs() <= 1e-12 * g.abs().max(1.0));
        }
    }
}
