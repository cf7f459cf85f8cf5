//! Outage probability and timing error as the pointing error grows.

use qsync::analytic::QuadratureSpec;
use qsync::experiments::{run_sweep, SweepAxis, SweepSpec};
use qsync::SystemConfig;

pub fn run(trials: u64) -> qsync::Result<()> {
    let spec = SweepSpec {
        axis: SweepAxis::SigmaP,
        values: (1..=10).map(|k| 0.1 * k as f64).collect(),
        sigma_p_outer: Vec::new(),
        trials,
        seed: 5,
        parallelism: 1,
    };
    let rows = run_sweep(&SystemConfig::default(), &spec, &QuadratureSpec::default());
    println!("sigma_p  outage(model)  outage(MC) [95% CI]       STD model   STD MC (ps)");
    for row in &rows {
        let (Some(a), Some(e)) = (&row.analytic, &row.empirical) else {
            println!("{:7.2}  {}", row.value, row.error.as_deref().unwrap_or("no result"));
            continue;
        };
        let o = e.empirical_outage;
        println!(
            "{:7.2}  {:13.4}  {:.4} [{:.4}, {:.4}]  {:10.2}  {:10.2}",
            row.value,
            a.outage,
            o.value,
            o.lo,
            o.hi,
            a.sync.std * 1e12,
            row.std_nch_mc().map_or(f64::NAN, |s| s * 1e12),
        );
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    run(trials)
}
