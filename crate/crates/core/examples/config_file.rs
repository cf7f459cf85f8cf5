//! Parsing a scenario file with unit suffixes and reporting invalid input.

use qsync::SystemConfig;

const SCENARIO: &str = "\
# narrow beam, larger array
w_z = 25 cm
N_arx = 12
N_ary = 12
sigma_p = 0.2 m
t_aq = 100 us
";

pub fn run() -> qsync::Result<()> {
    let cfg = SystemConfig::parse(SCENARIO)?;
    println!("w_z = {} m, array side = {:?}, sigma_p = {} m", cfg.w_z, cfg.n_ar_side(), cfg.sigma_p);

    for bad in ["alpha = -1", "w_z = 3 parsecs", "unknown_key = 1"] {
        match SystemConfig::parse(bad) {
            Ok(_) => println!("{bad:<20} accepted"),
            Err(e) => println!("{bad:<20} rejected: {e}"),
        }
    }

    // round trip through the text format
    let again = SystemConfig::parse(&cfg.to_config_text())?;
    assert_eq!(again, cfg);
    Ok(())
}

fn main() -> qsync::Result<()> {
    run()
}
