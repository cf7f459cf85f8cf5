//! Per-slot reception probability: closed form against the integrated beam
//! profile, and the Gaussian approximation against sampled fading.

use qsync::channel::{p_hap, p_hit_oracle, p_rec_conditional_moments};
use qsync::experiments::clt_ks;
use qsync::{Point, Scenario, SystemConfig};

pub fn run(draws: usize) -> qsync::Result<()> {
    let scn = Scenario::new(SystemConfig::default())?;
    let j = scn.grid.central_index();
    let r_dev = Point::new(0.1, -0.05);

    println!("reflector  closed-form   integrated    ratio");
    for i in [0, scn.ccr.len() / 2, scn.ccr.len() - 1] {
        let closed = p_hap(&scn, i, j, r_dev)?;
        let oracle = p_hit_oracle(&scn, i, j, r_dev, 20)? * scn.derived.p_ap;
        println!("{i:>9}  {closed:.6e}  {oracle:.6e}  {:.5}", closed / oracle);
    }

    let (mean, var) = p_rec_conditional_moments(&scn, j, r_dev);
    println!("P_rec given r_dev: mean {mean:.4e}, sd {:.4e}", var.sqrt());

    let ks = clt_ks(&scn, draws, 1)?;
    println!("KS(sampled P_rec, Gaussian) over {draws} draws: {ks:.4}");
    Ok(())
}

fn main() -> qsync::Result<()> {
    let draws = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    run(draws)
}
