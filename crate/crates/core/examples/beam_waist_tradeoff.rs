//! Waist that minimizes the timing error for each pointing accuracy.
//!
//! Narrow beams concentrate power but miss the array under large pointing
//! errors; wide beams always hit but spread the power.

use qsync::analytic::QuadratureSpec;
use qsync::experiments::{run_sweep, waist_optima, write_sweep_csv, SweepAxis, SweepSpec};
use qsync::SystemConfig;

pub fn run(trials: u64, csv: Option<&std::path::Path>) -> qsync::Result<()> {
    let spec = SweepSpec {
        axis: SweepAxis::WZ,
        values: vec![0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0],
        sigma_p_outer: vec![0.1, 0.3, 0.5],
        trials,
        seed: 6,
        parallelism: 1,
    };
    let rows = run_sweep(&SystemConfig::default(), &spec, &QuadratureSpec::default());
    for opt in waist_optima(&rows) {
        println!(
            "sigma_p = {:.1} m: best w_z {:?} m (model), {:?} m (simulation)",
            opt.sigma_p, opt.w_z_analytic, opt.w_z_mc
        );
    }
    if let Some(path) = csv {
        write_sweep_csv(std::fs::File::create(path)?, &rows)?;
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let csv = std::env::args().nth(2).map(std::path::PathBuf::from);
    run(trials, csv.as_deref())
}
