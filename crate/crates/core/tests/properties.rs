use proptest::prelude::*;
use qsync::channel::spatial_weight;
use qsync::geometry::{ccr_positions, coherence_length, grid_offsets};
use qsync::random::{binomial_pmf_vec, poisson_pmf_vec};
use qsync::stats::{tv_distance, wilson_ci, DistributionTable};
use qsync::{Point, SystemConfig};

proptest! {
    #[test]
    fn array_is_centered(nx in 1u32..20, ny in 1u32..20, d in 0.001f64..0.2) {
        let cfg = SystemConfig { n_arx: nx, n_ary: ny, d_ar: d, ..SystemConfig::default() };
        let array = ccr_positions(&cfg);
        prop_assert_eq!(array.len(), (nx * ny) as usize);
        let c = array.centroid();
        prop_assert!(c.norm() < 1e-12);
    }

    #[test]
    fn grid_offsets_sum_to_zero(nx in 1u32..16, ny in 1u32..16, d in 0.001f64..0.2) {
        let cfg = SystemConfig { n_grx: nx, n_gry: ny, d_gr: d, ..SystemConfig::default() };
        let grid = grid_offsets(&cfg);
        let sum = grid.offsets.iter().fold(Point::ORIGIN, |a, &p| a + p);
        prop_assert!(sum.norm() < 1e-10);
        prop_assert_eq!(grid.index(1, 1), 0);
        prop_assert_eq!(grid.index(nx as usize, ny as usize), grid.len() - 1);
    }

    #[test]
    fn weight_decreases_with_distance(r1 in 0.0f64..2.0, dr in 1e-6f64..1.0, w_z in 0.05f64..2.0) {
        let near = spatial_weight(Point::ORIGIN, Point::ORIGIN, Point::new(r1, 0.0), w_z);
        let far = spatial_weight(Point::ORIGIN, Point::ORIGIN, Point::new(r1 + dr, 0.0), w_z);
        prop_assert!(near <= 1.0 && far >= 0.0);
        prop_assert!(far <= near);
    }

    #[test]
    fn coherence_length_falls_with_turbulence(c1 in 1e-17f64..1e-13, factor in 1.01f64..100.0) {
        let weak = coherence_length(1550e-9, c1, 500.0);
        let strong = coherence_length(1550e-9, c1 * factor, 500.0);
        prop_assert!(strong < weak);
    }

    #[test]
    fn count_pmfs_are_normalized(trials in 1u64..3_000, p in 1e-5f64..0.5) {
        let mean = trials as f64 * p;
        let k_max = (mean + 12.0 * mean.sqrt() + 30.0) as u64;
        let b = binomial_pmf_vec(trials, p, k_max);
        let q = poisson_pmf_vec(mean, k_max as usize);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let tv = tv_distance(&b, &q);
        prop_assert!((0.0..=1.0).contains(&tv));
        // total variation of binomial vs Poisson is at most p
        prop_assert!(tv <= p + 1e-9);
    }

    #[test]
    fn wilson_interval_brackets_the_proportion(n in 1usize..10_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_ci(k, n, 1.96);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn histogram_from_counts_is_a_pmf(counts in prop::collection::vec(0u64..50, 1..200)) {
        let table = DistributionTable::from_counts(counts.iter().copied());
        prop_assert!((table.total() - 1.0).abs() < 1e-12);
        let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        prop_assert!((table.mean() - mean).abs() < 1e-9);
    }
}
