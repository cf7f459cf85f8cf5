//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use qsync::analytic::{analyze, binomial_poisson_tv, AnalyticReport, QuadratureSpec};
use qsync::channel::{p_hap, p_hit_oracle};
use qsync::experiments::clt_ks;
use qsync::geometry::gamma_gamma_variance;
use qsync::random::{GammaGamma, GgCdfTable};
use qsync::stats::{ks_statistic, tv_distance, wilson_ci, Z_95};
use qsync::{run_campaign, CampaignSpec, CampaignStats, Point, RngStream, Scenario, SystemConfig};
use rand_distr::Distribution;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn scenario(edit: impl FnOnce(&mut SystemConfig)) -> Scenario {
    let mut cfg = SystemConfig::default();
    edit(&mut cfg);
    Scenario::new(cfg).expect("valid scenario")
}

fn analytic(scn: &Scenario) -> AnalyticReport {
    analyze(scn, &QuadratureSpec::default()).expect("analytic model")
}

fn campaign(scn: &Scenario, trials: u64, seed: u64) -> CampaignStats {
    run_campaign(scn, &CampaignSpec::new(trials, seed)).expect("campaign")
}

fn ps(x: f64) -> f64 {
    x * 1e12
}

/// Closed-form hit probability against the integrated beam profile.
fn hit_probability() -> Outcome {
    let mut rng = RngStream::new(101, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w_z = 0.2 + 1.3 * rng.uniform();
        let side = 0.1 * w_z * (0.05 + 0.95 * rng.uniform());
        let n = 2 + (rng.uniform() * 10.0) as u32;
        let scn = scenario(|c| {
            c.w_z = w_z;
            c.a_ar = side * side;
            c.d_ar = c.d_ar.max(1.5 * side);
            c.n_arx = n;
            c.n_ary = n;
        });
        let i = (rng.uniform() * scn.ccr.len() as f64) as usize;
        let j = (rng.uniform() * scn.grid.len() as f64) as usize;
        // beam center within one waist of the reflector
        let radius = w_z * rng.uniform().sqrt();
        let angle = std::f64::consts::TAU * rng.uniform();
        let d = Point::new(radius * angle.cos(), radius * angle.sin());
        let r_dev = scn.ccr.positions[i] - scn.grid.offsets[j] - d;
        let closed = p_hap(&scn, i, j, r_dev).expect("closed form");
        let oracle = p_hit_oracle(&scn, i, j, r_dev, 20).expect("oracle") * scn.derived.p_ap;
        worst = worst.max((closed / oracle - 1.0).abs());
    }
    outcome(worst < 0.01, format!("max |closed/oracle - 1| = {worst:.2e} over 100 configs (tol 1e-2)"))
}

fn gamma_gamma() -> Outcome {
    let (alpha, beta) = (3.0, 2.0);
    let gg = GammaGamma::new(alpha, beta).unwrap();
    let mut rng = RngStream::new(102, 0);
    let n = 1_000_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let h: f64 = gg.sample(&mut rng);
        sum += h;
        sum_sq += h * h;
    }
    let mean = sum / n as f64;
    let var = (sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0);
    let c_ab = gamma_gamma_variance(alpha, beta);

    let table = GgCdfTable::new(alpha, beta).unwrap();
    let mut rng = RngStream::new(102, 1);
    let mut xs: Vec<f64> = (0..100_000).map(|_| gg.sample(&mut rng)).collect();
    let ks = ks_statistic(&mut xs, |h| table.cdf(h));
    let passed = (mean - 1.0).abs() < 0.01 && (var - c_ab).abs() < 0.05 && ks < 0.01;
    outcome(
        passed,
        format!("mean {mean:.4} (1 +- 0.01), var {var:.4} (c_ab {c_ab:.3} +- 0.05), KS {ks:.4} (tol 0.01)"),
    )
}

fn reception_clt() -> Outcome {
    let scn = scenario(|_| {});
    let ks = clt_ks(&scn, 100_000, 103).expect("clt draws");
    outcome(ks < 0.02, format!("KS {ks:.4} over 1e5 draws, N_ar = {} (tol 0.02)", scn.derived.n_ar))
}

fn binomial_poisson() -> Outcome {
    let worst = [1e-3, 5e-4, 2e-4, 1e-4, 1e-5]
        .iter()
        .map(|&p| binomial_poisson_tv(1_000, p, 30))
        .fold(0.0, f64::max);
    outcome(worst < 1e-3, format!("max TV {worst:.2e} over p <= 1e-3, L_sv = 1000 (tol 1e-3)"))
}

fn signal_distribution() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (k, w_z) in [0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let scn = scenario(|c| c.w_z = w_z);
        let report = analytic(&scn);
        let stats = campaign(&scn, 10_000, 105 + k as u64);
        let tv = tv_distance(&report.nsig.values, &stats.nsig_conditional.values);
        let raw = tv_distance(&report.nsig.values, &stats.nsig_histogram.values);
        passed &= tv < 0.05;
        parts.push(format!("w_z {w_z}: TV {tv:.4} (raw histogram {raw:.4})"));
    }
    outcome(passed, format!("{} (tol 0.05, 1e4 trials each)", parts.join("; ")))
}

fn outage_vs_pointing() -> Outcome {
    let mut passed = true;
    let mut last = 0.0;
    let mut parts = Vec::new();
    for k in 1..=10 {
        let sigma_p = 0.1 * k as f64;
        let scn = scenario(|c| c.sigma_p = sigma_p);
        let report = analytic(&scn);
        let stats = campaign(&scn, 3_000, 106 + k);
        let monotone = report.outage >= last;
        last = report.outage;
        let outages = stats.results.iter().filter(|r| r.outage).count();
        let (lo, hi) = wilson_ci(outages, stats.results.len(), Z_95);
        let covered = lo <= report.outage && report.outage <= hi;
        let mc_std = stats.nch.map_or(f64::NAN, |s| s.std.value);
        let rel = mc_std / report.sync.std - 1.0;
        let std_ok = report.outage >= 0.1 || rel.abs() < 0.1;
        passed &= monotone && covered && std_ok;
        parts.push(format!(
            "{sigma_p:.1}: out {:.4} [{lo:.4},{hi:.4}]{} std {:.2}/{:.2}ps{}",
            report.outage,
            if covered { "" } else { " MISS" },
            ps(report.sync.std),
            ps(mc_std),
            if std_ok { "" } else { " OFF" },
        ));
    }
    outcome(passed, parts.join("; "))
}

fn array_size() -> Outcome {
    let stds: Vec<_> = [4u32, 8, 12]
        .iter()
        .map(|&n| {
            let scn = scenario(|c| {
                c.n_arx = n;
                c.n_ary = n;
            });
            campaign(&scn, 5_000, 107 + u64::from(n)).nch.expect("aligned trials").std
        })
        .collect();
    let se = |e: &qsync::stats::Estimate| (e.hi - e.lo) / (2.0 * Z_95);
    let ordered = stds[0].lo > stds[1].hi && stds[1].lo > stds[2].hi;
    let d1 = stds[0].value - stds[1].value;
    let d2 = stds[1].value - stds[2].value;
    let se_diff = (se(&stds[0]).powi(2) + 4.0 * se(&stds[1]).powi(2) + se(&stds[2]).powi(2)).sqrt();
    let diminishing = d1 - d2 > Z_95 * se_diff;
    outcome(
        ordered && diminishing,
        format!(
            "STD 4x4 {:.2} [{:.2},{:.2}], 8x8 {:.2} [{:.2},{:.2}], 12x12 {:.2} [{:.2},{:.2}] ps; gains {:.2} vs {:.2} +- {:.2} ps",
            ps(stds[0].value), ps(stds[0].lo), ps(stds[0].hi),
            ps(stds[1].value), ps(stds[1].lo), ps(stds[1].hi),
            ps(stds[2].value), ps(stds[2].lo), ps(stds[2].hi),
            ps(d1), ps(d2), ps(Z_95 * se_diff),
        ),
    )
}

fn background_level() -> Outcome {
    let run = |sigma_p: f64, mu_bg: f64, seed: u64| {
        let scn = scenario(|c| {
            c.sigma_p = sigma_p;
            c.mu_bg = mu_bg;
        });
        let model = analytic(&scn).sync.std;
        let stats = campaign(&scn, 3_000, seed);
        (model, stats.nch.expect("aligned trials").std)
    };
    let small: Vec<_> = [0.0, 1e-4, 1e-3].iter().enumerate().map(|(k, &mu)| run(0.1, mu, 108 + k as u64)).collect();
    let lo = small.iter().map(|s| s.1.value).fold(f64::INFINITY, f64::min);
    let hi = small.iter().map(|s| s.1.value).fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    let (m0, clean) = run(0.8, 0.0, 111);
    let (m3, noisy) = run(0.8, 1e-3, 112);
    let separated = noisy.lo > clean.hi;
    outcome(
        spread < 0.1 && separated,
        format!(
            "sigma_p 0.1: MC STD {:.2}/{:.2}/{:.2} ps (model {:.2}/{:.2}/{:.2}), spread {:.1}% (tol 10%); \
             sigma_p 0.8: mu_bg=1e-3 {:.2} [{:.2},{:.2}] vs mu_bg=0 {:.2} [{:.2},{:.2}] ps (model {:.2} vs {:.2})",
            ps(small[0].1.value), ps(small[1].1.value), ps(small[2].1.value),
            ps(small[0].0), ps(small[1].0), ps(small[2].0),
            100.0 * spread,
            ps(noisy.value), ps(noisy.lo), ps(noisy.hi),
            ps(clean.value), ps(clean.lo), ps(clean.hi),
            ps(m3), ps(m0),
        ),
    )
}

fn estimator_soundness() -> Outcome {
    let scn = scenario(|c| {
        c.sigma_spad = 0.0;
        c.mu_bg = 0.0;
        c.p_pol = 0.0;
    });
    let stats = campaign(&scn, 1_000, 109);
    let attempted: Vec<_> = stats.results.iter().filter(|r| !r.outage).collect();
    let exact = attempted.iter().all(|r| r.n_ch == Some(0.0));
    let recovered = attempted.iter().filter(|r| r.aligned).count();

    let defaults = campaign(&scenario(|_| {}), 5_000, 110);
    let mean = defaults.nch.expect("aligned trials").mean;
    let unbiased = mean.contains(0.0);
    outcome(
        exact && recovered == attempted.len() && unbiased,
        format!(
            "noiseless: n_ch == 0 in {}/{} non-outage trials, shift recovered {recovered}/{}; \
             defaults: E[n_ch] {:.3} ps, 95% CI [{:.3}, {:.3}]",
            attempted.iter().filter(|r| r.n_ch == Some(0.0)).count(),
            attempted.len(),
            attempted.len(),
            ps(mean.value),
            ps(mean.lo),
            ps(mean.hi),
        ),
    )
}

fn background_model() -> Outcome {
    let scn = scenario(|_| {});
    let stats = campaign(&scn, 10_000, 111);
    let expected = scn.derived.lambda_total * scn.cfg.mu_bg * (-scn.cfg.mu_bg).exp();
    let rel = stats.nbg_mean / expected - 1.0;
    outcome(
        rel.abs() < 0.02,
        format!("mean N_bg {:.4} vs {expected:.4}, {:+.2}% (tol 2%)", stats.nbg_mean, 100.0 * rel),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("first", "1"), ("second", "1"), ("threaded", "8")] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qsync"))
            .args(["simulate", "--trials", "1000", "--seed", "11", "--parallelism", threads, "--out"])
            .arg(&out)
            .status()
            .expect("run qsync");
        assert!(status.success());
        let files: Vec<Vec<u8>> = ["trials.csv", "summary.csv"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    outcome(identical, format!("trials.csv and summary.csv identical across 2 runs and parallelism 1/8: {identical}"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("hit probability vs quadrature", 10, hit_probability),
        ("gamma-gamma statistics", 30, gamma_gamma),
        ("reception Gaussian approximation", 30, reception_clt),
        ("binomial to Poisson", 1, binomial_poisson),
        ("signal-count distribution vs waist", 300, signal_distribution),
        ("outage and STD vs pointing error", 600, outage_vs_pointing),
        ("array-size trend", 600, array_size),
        ("background-level trend", 600, background_level),
        ("estimator soundness", 120, estimator_soundness),
        ("background count model", 120, background_model),
        ("determinism", 120, determinism),
    ];
    let mut failures = 0;
    for (k, (name, limit, criterion)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = criterion();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let passed = result.passed && in_time;
        failures += usize::from(!passed);
        println!(
            "{} criterion {:>2} {name}: {} [{:.1} s, limit {limit} s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            result.summary,
            elapsed.as_secs_f64(),
        );
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
