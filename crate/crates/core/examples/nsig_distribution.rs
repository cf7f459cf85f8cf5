//! Distribution of signal detections per acquisition for several beam waists,
//! analytic against Monte Carlo.

use qsync::analytic::{analyze, QuadratureSpec};
use qsync::stats::tv_distance;
use qsync::{run_campaign, CampaignSpec, Scenario, SystemConfig};

pub fn run(trials: u64) -> qsync::Result<()> {
    println!("  w_z   E[N_sig]   Var[N_sig]   TV(conditional)   TV(raw histogram)");
    for w_z in [0.25, 0.5, 0.75, 1.0] {
        let scn = Scenario::new(SystemConfig { w_z, ..SystemConfig::default() })?;
        let report = analyze(&scn, &QuadratureSpec::default())?;
        let stats = run_campaign(&scn, &CampaignSpec::new(trials, 4))?;
        println!(
            "{w_z:5.2}  {:9.2}  {:11.1}  {:16.4}  {:18.4}",
            report.mean_nsig,
            report.nsig.variance(),
            tv_distance(&report.nsig.values, &stats.nsig_conditional.values),
            tv_distance(&report.nsig.values, &stats.nsig_histogram.values),
        );
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    run(trials)
}
