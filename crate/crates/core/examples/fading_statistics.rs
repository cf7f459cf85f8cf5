//! Gamma-Gamma turbulence fading: sampler moments and KS distance to the exact cdf.

use qsync::geometry::gamma_gamma_variance;
use qsync::random::{GammaGamma, GgCdfTable};
use qsync::stats::ks_statistic;
use qsync::RngStream;
use rand_distr::Distribution;

pub fn run(samples: usize) -> qsync::Result<()> {
    for (alpha, beta) in [(3.0, 2.0), (4.0, 1.9), (50.0, 50.0)] {
        let gg = GammaGamma::new(alpha, beta)?;
        let mut rng = RngStream::new(7, 0);
        let mut xs: Vec<f64> = (0..samples).map(|_| gg.sample(&mut rng)).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let table = GgCdfTable::new(alpha, beta)?;
        let ks = ks_statistic(&mut xs, |h| table.cdf(h));
        println!(
            "alpha={alpha:<4} beta={beta:<4} mean={mean:.4} var={var:.4} (expected {:.4}) KS={ks:.4}",
            gamma_gamma_variance(alpha, beta)
        );
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    run(samples)
}
