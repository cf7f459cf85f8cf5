//! Goodness-of-fit distances, confidence intervals and tabulated distributions.

use crate::error::{Error, Result};

/// Two-sided 95% standard-normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`. Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], mut cdf: impl FnMut(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Total-variation distance `½ Σ |p - q|`; the shorter table is padded with zeros.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|k| (at(p, k) - at(q, k)).abs()).sum::<f64>()
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An estimate with a symmetric-or-not confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    pub fn degenerate(value: f64) -> Self {
        Self {
            value,
            lo: value,
            hi: value,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Mean and standard deviation of a sample with 95% intervals.
///
/// The standard-deviation interval uses the delta method on the sample
/// fourth moment, which stays valid for non-Gaussian data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: Estimate,
    pub std: Estimate,
}

impl SampleSummary {
    pub fn from_samples(xs: &[f64]) -> Option<Self> {
        let n = xs.len();
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        if n == 1 {
            return Some(Self {
                n,
                mean: Estimate::degenerate(mean),
                std: Estimate::degenerate(0.0),
            });
        }
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
        let var = m2 * nf / (nf - 1.0);
        let sd = var.sqrt();
        let mean_half = Z_95 * sd / nf.sqrt();
        let std_se = if sd > 0.0 {
            ((m4 - m2 * m2).max(0.0) / nf).sqrt() / (2.0 * sd)
        } else {
            0.0
        };
        Some(Self {
            n,
            mean: Estimate {
                value: mean,
                lo: mean - mean_half,
                hi: mean + mean_half,
            },
            std: Estimate {
                value: sd,
                lo: (sd - Z_95 * std_se).max(0.0),
                hi: sd + Z_95 * std_se,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Pmf,
    Pdf,
}

/// A probability mass function over counts or a density sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub kind: TableKind,
    pub support: Vec<f64>,
    pub values: Vec<f64>,
}

impl DistributionTable {
    /// Pmf over `0, 1, …, mass.len() - 1`.
    pub fn pmf(mass: Vec<f64>) -> Self {
        Self {
            kind: TableKind::Pmf,
            support: (0..mass.len()).map(|n| n as f64).collect(),
            values: mass,
        }
    }

    pub fn pdf(grid: Vec<f64>, density: Vec<f64>) -> Self {
        assert_eq!(grid.len(), density.len(), "grid and density lengths differ");
        Self {
            kind: TableKind::Pdf,
            support: grid,
            values: density,
        }
    }

    /// Empirical pmf of nonnegative integer observations.
    pub fn from_counts(observations: impl IntoIterator<Item = u64>) -> Self {
        let mut mass: Vec<f64> = Vec::new();
        let mut total = 0usize;
        for x in observations {
            let k = x as usize;
            if k >= mass.len() {
                mass.resize(k + 1, 0.0);
            }
            mass[k] += 1.0;
            total += 1;
        }
        if total > 0 {
            mass.iter_mut().for_each(|m| *m /= total as f64);
        }
        Self::pmf(mass)
    }

    /// Sum of masses, or trapezoid integral of the density.
    pub fn total(&self) -> f64 {
        match self.kind {
            TableKind::Pmf => self.values.iter().sum(),
            TableKind::Pdf => self
                .support
                .windows(2)
                .zip(self.values.windows(2))
                .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
                .sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Numerical(format!("distribution table has invalid entry {bad}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::Numerical(format!("distribution table normalizes to {total}")));
        }
        Ok(())
    }

    fn moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        match self.kind {
            TableKind::Pmf => self.support.iter().zip(&self.values).map(|(&x, &p)| f(x) * p).sum(),
            TableKind::Pdf => self
                .support
                .windows(2)
                .zip(self.values.windows(2))
                .map(|(x, d)| 0.5 * (x[1] - x[0]) * (f(x[0]) * d[0] + f(x[1]) * d[1]))
                .sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(|x| x) / self.total()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.moment(|x| (x - mean).powi(2)) / self.total()
    }

    /// Cumulative distribution at each support point.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        match self.kind {
            TableKind::Pmf => self
                .values
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect(),
            TableKind::Pdf => {
                let mut out = Vec::with_capacity(self.values.len());
                out.push(0.0);
                for (x, d) in self.support.windows(2).zip(self.values.windows(2)) {
                    acc += 0.5 * (x[1] - x[0]) * (d[0] + d[1]);
                    out.push(acc);
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_of_identical_is_zero() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(tv_distance(&p, &p), 0.0);
        assert!((tv_distance(&[1.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let mut xs: Vec<f64> = (0..100).map(|k| (k as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn two_sample_ks_matches_shifted_sets() {
        let mut a: Vec<f64> = (0..10).map(f64::from).collect();
        let mut b: Vec<f64> = (5..15).map(f64::from).collect();
        assert!((ks_two_sample(&mut a, &mut b) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wilson_interval_brackets_estimate() {
        let (lo, hi) = wilson_ci(30, 100, Z_95);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.219_1).abs() < 1e-3 && (hi - 0.396_1).abs() < 1e-3, "{lo} {hi}");
        assert_eq!(wilson_ci(0, 10, Z_95).0, 0.0);
    }

    #[test]
    fn singleton_summary_is_degenerate() {
        let s = SampleSummary::from_samples(&[2.5]).unwrap();
        assert_eq!(s.mean, Estimate::degenerate(2.5));
        assert_eq!(s.std.value, 0.0);
    }

    #[test]
    fn table_moments() {
        let t = DistributionTable::pmf(vec![0.25, 0.5, 0.25]);
        t.validate().unwrap();
        assert!((t.mean() - 1.0).abs() < 1e-15);
        assert!((t.variance() - 0.5).abs() < 1e-15);
        let e = DistributionTable::from_counts([0, 2, 2, 3]);
        assert_eq!(e.values, vec![0.25, 0.0, 0.5, 0.25]);
    }

    #[test]
    fn bad_tables_fail_validation() {
        assert!(DistributionTable::pmf(vec![0.5, 0.4]).validate().is_err());
        assert!(DistributionTable::pmf(vec![1.5, -0.5]).validate().is_err());
    }
}
