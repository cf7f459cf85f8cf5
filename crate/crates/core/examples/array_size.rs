//! Diminishing returns of larger retroreflector arrays.

use qsync::analytic::QuadratureSpec;
use qsync::experiments::{run_sweep, SweepAxis, SweepSpec};
use qsync::SystemConfig;

pub fn run(trials: u64) -> qsync::Result<()> {
    let spec = SweepSpec {
        axis: SweepAxis::NArSide,
        values: vec![4.0, 8.0, 12.0],
        sigma_p_outer: Vec::new(),
        trials,
        seed: 7,
        parallelism: 1,
    };
    let rows = run_sweep(&SystemConfig::default(), &spec, &QuadratureSpec::default());
    let mut previous: Option<f64> = None;
    for row in &rows {
        let Some(std) = row.std_nch_analytic() else { continue };
        let gain = previous.map_or(String::new(), |p| format!("  gain {:.2} ps", (p - std) * 1e12));
        let mc = row.empirical.as_ref().and_then(|e| e.nch).map_or(String::new(), |s| {
            format!("  MC {:.2} ps [{:.2}, {:.2}]", s.std.value * 1e12, s.std.lo * 1e12, s.std.hi * 1e12)
        });
        println!("{:>2}x{:<2} model {:.2} ps{mc}{gain}", row.value, row.value, std * 1e12);
        previous = Some(std);
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    run(trials)
}
