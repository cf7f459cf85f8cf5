//! Every example, run at reduced size.

#[allow(dead_code)]
#[path = "../examples/link_budget.rs"]
mod link_budget;
#[allow(dead_code)]
#[path = "../examples/config_file.rs"]
mod config_file;
#[allow(dead_code)]
#[path = "../examples/fading_statistics.rs"]
mod fading_statistics;
#[allow(dead_code)]
#[path = "../examples/reception_probability.rs"]
mod reception_probability;
#[allow(dead_code)]
#[path = "../examples/nsig_distribution.rs"]
mod nsig_distribution;
#[allow(dead_code)]
#[path = "../examples/outage_vs_pointing.rs"]
mod outage_vs_pointing;
#[allow(dead_code)]
#[path = "../examples/beam_waist_tradeoff.rs"]
mod beam_waist_tradeoff;
#[allow(dead_code)]
#[path = "../examples/array_size.rs"]
mod array_size;
#[allow(dead_code)]
#[path = "../examples/background_level.rs"]
mod background_level;
#[allow(dead_code)]
#[path = "../examples/single_trial.rs"]
mod single_trial;
#[allow(dead_code)]
#[path = "../examples/validate.rs"]
mod validate;

#[test]
fn link_budget_runs() {
    link_budget::run(qsync::SystemConfig::default()).unwrap();
}

#[test]
fn config_file_runs() {
    config_file::run().unwrap();
}

#[test]
fn fading_statistics_runs() {
    fading_statistics::run(2_000).unwrap();
}

#[test]
fn reception_probability_runs() {
    reception_probability::run(500).unwrap();
}

#[test]
fn nsig_distribution_runs() {
    nsig_distribution::run(5).unwrap();
}

#[test]
fn outage_vs_pointing_runs() {
    outage_vs_pointing::run(3).unwrap();
}

#[test]
fn beam_waist_tradeoff_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    beam_waist_tradeoff::run(0, Some(&path)).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 * 3);
}

#[test]
fn array_size_runs() {
    array_size::run(3).unwrap();
}

#[test]
fn background_level_runs() {
    background_level::run(3).unwrap();
}

#[test]
fn single_trial_runs() {
    single_trial::run(3).unwrap();
}

#[test]
fn validate_runs() {
    let spec = qsync::experiments::ValidationSpec {
        clt_draws: 2_000,
        gg_samples: 2_000,
        campaign_trials: 20,
        ..Default::default()
    };
    validate::run(spec).unwrap();
}
