//! The oracle validation suite on the default scenario.

use qsync::experiments::{validate, ValidationSpec};
use qsync::SystemConfig;

pub fn run(spec: ValidationSpec) -> qsync::Result<bool> {
    let report = validate(&SystemConfig::default(), &spec)?;
    for c in &report.checks {
        let verdict = if c.passed { "ok  " } else { "FAIL" };
        println!("{verdict} {:<36} {:.4e} < {:.1e}  ({})", c.name, c.measured, c.tolerance, c.detail);
    }
    Ok(report.all_passed())
}

fn main() -> qsync::Result<()> {
    let passed = run(ValidationSpec::default())?;
    std::process::exit(if passed { 0 } else { 3 });
}
