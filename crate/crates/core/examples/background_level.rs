//! Sensitivity of the timing error to ambient background light.

use qsync::analytic::{analyze, QuadratureSpec};
use qsync::{run_campaign, CampaignSpec, Scenario, SystemConfig};

pub fn run(trials: u64) -> qsync::Result<()> {
    for sigma_p in [0.1, 0.8] {
        println!("sigma_p = {sigma_p} m");
        for mu_bg in [0.0, 1e-4, 1e-3] {
            let scn = Scenario::new(SystemConfig { sigma_p, mu_bg, ..SystemConfig::default() })?;
            let report = analyze(&scn, &QuadratureSpec::default())?;
            let stats = run_campaign(&scn, &CampaignSpec::new(trials, 8))?;
            let mc = stats.nch.map_or("-".to_string(), |s| format!("{:.2}", s.std.value * 1e12));
            println!(
                "  mu_bg {mu_bg:<7} E[N_bg] {:8.2} (MC {:8.2})  N_t,min {:3}  STD model {:6.2} ps, MC {mc} ps",
                scn.derived.mean_background, stats.nbg_mean, report.n_t_min, report.sync.std * 1e12
            );
        }
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    run(trials)
}
