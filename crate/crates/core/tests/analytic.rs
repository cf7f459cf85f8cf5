use qsync::analytic::{analyze, mu_ch_table, n_t_min, outage_from_pmfs, QuadratureSpec};
use qsync::channel::{mu_ch_all, ChannelRealization};
use qsync::stats::ks_statistic;
use qsync::{Point, RngStream, Scenario, SystemConfig};

fn scenario(edit: impl FnOnce(&mut SystemConfig)) -> Scenario {
    let mut cfg = SystemConfig::default();
    edit(&mut cfg);
    Scenario::new(cfg).unwrap()
}

#[test]
fn signal_count_pmf_is_normalized() {
    let report = analyze(&scenario(|_| {}), &QuadratureSpec::default()).unwrap();
    let total = report.nsig.total();
    assert!((0.999..=1.001).contains(&total), "{total}");
    assert!((report.nbg.total() - 1.0).abs() < 1e-3);
}

#[test]
fn default_threshold_and_summary() {
    let scn = scenario(|_| {});
    assert_eq!(n_t_min(&scn), 10);
    let report = analyze(&scn, &QuadratureSpec::default()).unwrap();
    assert!((report.mean_nsig - 98.1).abs() < 0.1, "{}", report.mean_nsig);
    assert!((report.sync.std - 14.81e-12).abs() < 0.01e-12, "{}", report.sync.std);
    assert!((report.outage - 0.0433).abs() < 1e-3, "{}", report.outage);
    assert!(report.outage_no_detection < report.outage);
}

#[test]
fn explicit_threshold_overrides_the_rule() {
    let scn = scenario(|c| c.n_t_min = Some(25));
    assert_eq!(n_t_min(&scn), 25);
}

#[test]
fn no_background_gives_unit_mass_at_zero() {
    let report = analyze(&scenario(|c| c.mu_bg = 0.0), &QuadratureSpec::default()).unwrap();
    assert_eq!(report.nbg.values[0], 1.0);
    assert!(report.nbg.values[1..].iter().all(|&p| p == 0.0));
}

#[test]
fn narrow_waist_widens_the_signal_distribution() {
    let narrow = analyze(&scenario(|c| c.w_z = 0.25), &QuadratureSpec::default()).unwrap();
    let wide = analyze(&scenario(|c| c.w_z = 1.0), &QuadratureSpec::default()).unwrap();
    assert!(narrow.nsig.variance() / wide.nsig.variance() > 1.0);
}

#[test]
fn quadrature_refinement_changes_little() {
    let scn = scenario(|_| {});
    let base = QuadratureSpec::default();
    let a = analyze(&scn, &base).unwrap();
    let b = analyze(&scn, &base.refined()).unwrap();
    assert!((a.sync.std / b.sync.std - 1.0).abs() < 1e-3);
    assert!((a.outage - b.outage).abs() < 1e-3);
    assert!((a.mean_nsig / b.mean_nsig - 1.0).abs() < 1e-3);
}

#[test]
fn vanishing_pointing_error_is_continuous() {
    let zero = analyze(&scenario(|c| c.sigma_p = 0.0), &QuadratureSpec::default()).unwrap();
    let tiny = analyze(&scenario(|c| c.sigma_p = 1e-5), &QuadratureSpec::default()).unwrap();
    assert!((zero.sync.std / tiny.sync.std - 1.0).abs() < 1e-3);
    assert!((zero.mean_nsig / tiny.mean_nsig - 1.0).abs() < 1e-3);
}

#[test]
fn outage_grows_with_pointing_error() {
    let mut last = 0.0;
    for k in 1..=10 {
        let report = analyze(&scenario(|c| c.sigma_p = 0.1 * k as f64), &QuadratureSpec::default()).unwrap();
        assert!(report.outage >= last - 1e-12, "sigma_p = {}", 0.1 * k as f64);
        last = report.outage;
    }
}

#[test]
fn larger_arrays_help_with_diminishing_returns() {
    let std: Vec<f64> = [4, 8, 12]
        .iter()
        .map(|&n| {
            let scn = scenario(|c| {
                c.n_arx = n;
                c.n_ary = n;
            });
            analyze(&scn, &QuadratureSpec::default()).unwrap().sync.std
        })
        .collect();
    assert!(std[0] > std[1] && std[1] > std[2]);
    assert!(std[0] - std[1] > std[1] - std[2]);
}

#[test]
fn threshold_one_outage_is_the_empty_acquisition() {
    let p_sig = [0.1, 0.2, 0.7];
    let p_bg = [0.5, 0.5];
    assert!((outage_from_pmfs(&p_sig, &p_bg, 1) - 0.05).abs() < 1e-15);
    assert!((outage_from_pmfs(&p_sig, &p_bg, 0)).abs() < 1e-15);
}

/// The rate density against rates sampled with the same radial reduction.
#[test]
fn rate_density_matches_sampled_rates() {
    let scn = scenario(|_| {});
    let table = mu_ch_table(&scn, &QuadratureSpec::default(), 4_000).unwrap();
    let cdf = table.cdf();
    let total = *cdf.last().unwrap();
    // trapezoid on a uniform grid undersamples the spikes near zero rate
    assert!((total - 1.0).abs() < 1e-2, "{total}");

    let mut rng = RngStream::new(11, 0);
    let mut rates: Vec<f64> = (0..20_000)
        .map(|_| {
            let r = scn.cfg.sigma_p * (-2.0 * (1.0 - rng.uniform()).ln()).sqrt();
            let channel = ChannelRealization::draw_fading(&scn, Point::new(r, 0.0), &mut rng).unwrap();
            scn.derived.lambda_grid * mu_ch_all(&scn, &channel).unwrap().iter().sum::<f64>()
        })
        .collect();
    let grid = &table.support;
    let ks = ks_statistic(&mut rates, |x| {
        let k = grid.partition_point(|&g| g < x);
        if k == 0 {
            0.0
        } else if k >= grid.len() {
            1.0
        } else {
            let t = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
            (cdf[k - 1] + t * (cdf[k] - cdf[k - 1])) / total
        }
    });
    assert!(ks < 0.04, "KS {ks}");
}
