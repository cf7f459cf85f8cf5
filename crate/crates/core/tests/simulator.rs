use qsync::sim::{align_sequences, estimate_delay, generate_reference, propagate_and_detect};
use qsync::channel::{mu_ch_all, ChannelRealization};
use qsync::{run_campaign, run_trial, CampaignSpec, Error, Point, RngStream, Scenario, SystemConfig};

fn scenario(edit: impl FnOnce(&mut SystemConfig)) -> Scenario {
    let mut cfg = SystemConfig::default();
    edit(&mut cfg);
    Scenario::new(cfg).unwrap()
}

fn noiseless() -> Scenario {
    scenario(|c| {
        c.sigma_spad = 0.0;
        c.mu_bg = 0.0;
        c.p_pol = 0.0;
    })
}

#[test]
fn reference_keeps_single_pair_slots() {
    let scn = scenario(|_| {});
    let reference = generate_reference(&scn, &mut RngStream::new(3, 0));
    let n = scn.derived.l_seq as f64;
    let p = scn.derived.lambda_slot;
    let z = (reference.len() as f64 - n * p) / (n * p * (1.0 - p)).sqrt();
    assert!(z.abs() < 5.0, "z = {z}");
    assert!(reference.slots.windows(2).all(|w| w[0] < w[1]));
    assert!(reference.bits.iter().all(|&b| b <= 1));
}

#[test]
fn signal_rate_per_cell_matches_the_channel() {
    let scn = scenario(|c| c.mu_bg = 0.0);
    let channel = ChannelRealization::unfaded(&scn, Point::new(0.05, 0.0));
    let mu = mu_ch_all(&scn, &channel).unwrap();
    let l_sv = scn.derived.l_sv as f64;
    let p_slot = scn.derived.lambda_slot;
    let per_cell: Vec<f64> = mu.iter().map(|m| l_sv * p_slot * (1.0 - (-m).exp())).collect();
    let expected: f64 = per_cell.iter().sum();
    let variance: f64 = mu
        .iter()
        .map(|m| {
            let q = p_slot * (1.0 - (-m).exp());
            l_sv * q * (1.0 - q)
        })
        .sum();

    let runs = 200;
    let mut total = 0.0;
    let mut busiest = 0.0;
    let j_max = (0..mu.len()).max_by(|&a, &b| mu[a].total_cmp(&mu[b])).unwrap();
    for run in 0..runs {
        let mut rng = RngStream::new(21, run);
        let reference = generate_reference(&scn, &mut rng);
        let det = propagate_and_detect(&scn, &channel, &reference, &mut rng).unwrap();
        total += det.n_sig() as f64;
        busiest += det.events.iter().filter(|d| scn.grid_index_of_slot(d.slot) == j_max).count() as f64;
    }
    let mean = total / runs as f64;
    let se = (variance / runs as f64).sqrt();
    assert!((mean - expected).abs() < 5.0 * se, "mean {mean} expected {expected} se {se}");
    let busiest = busiest / runs as f64;
    assert!((busiest / per_cell[j_max] - 1.0).abs() < 0.05, "{busiest} vs {}", per_cell[j_max]);
}

#[test]
fn noiseless_link_is_exact() {
    let scn = noiseless();
    for trial in 0..50 {
        let r = run_trial(&scn, &mut RngStream::new(9, trial)).unwrap();
        if r.outage {
            continue;
        }
        assert!(r.aligned, "trial {trial}");
        assert_eq!(r.n_ch, Some(0.0), "trial {trial}");
        assert_eq!(r.n_bg, 0);
    }
}

#[test]
fn campaign_is_independent_of_thread_count() {
    let scn = scenario(|_| {});
    let serial = run_campaign(&scn, &CampaignSpec::new(40, 17)).unwrap();
    let parallel = run_campaign(
        &scn,
        &CampaignSpec {
            parallelism: 8,
            ..CampaignSpec::new(40, 17)
        },
    )
    .unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn different_seeds_give_different_campaigns() {
    let scn = scenario(|_| {});
    let a = run_campaign(&scn, &CampaignSpec::new(10, 1)).unwrap();
    let b = run_campaign(&scn, &CampaignSpec::new(10, 2)).unwrap();
    assert_ne!(a.results, b.results);
}

#[test]
fn empty_campaign_is_an_error() {
    let scn = scenario(|_| {});
    assert!(matches!(run_campaign(&scn, &CampaignSpec::new(0, 1)), Err(Error::Argument(_))));
}

#[test]
fn alignment_recovers_a_planted_shift() {
    let mut rng = RngStream::new(4, 0);
    let mut reference = Vec::new();
    for slot in 0..2_000 {
        if rng.uniform() < 0.3 {
            reference.push((slot, rng.fair_bit() as u8));
        }
    }
    let shift = 5;
    let received: Vec<(usize, u8)> = reference.iter().step_by(7).map(|&(s, b)| (s + shift, b)).collect();
    assert_eq!(align_sequences(&reference, &received, 7, 10).unwrap(), shift);
}

#[test]
fn alignment_needs_enough_overlap() {
    let reference = vec![(0, 1), (4, 0), (9, 1)];
    let received = vec![(1, 1), (5, 0)];
    match align_sequences(&reference, &received, 3, 10) {
        Err(Error::Alignment { best_overlap, required }) => {
            assert_eq!(best_overlap, 2);
            assert_eq!(required, 10);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn delay_estimate_is_the_mean_deviation() {
    let (t, n) = estimate_delay(&[1.0e-6 + 2e-12, 1.0e-6 - 1e-12], 1.0e-6).unwrap();
    assert!((n - 0.5e-12).abs() < 1e-21);
    assert!((t - 1.0e-6 - 0.5e-12).abs() < 1e-20);
    assert!(matches!(estimate_delay(&[], 1.0), Err(Error::NoDetection)));
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let draw = |seed, stream| {
        let mut rng = RngStream::new(seed, stream);
        (0..8).map(|_| rng.uniform()).collect::<Vec<_>>()
    };
    assert_eq!(draw(5, 3), draw(5, 3));
    assert_ne!(draw(5, 3), draw(5, 4));
    assert_ne!(draw(5, 3), draw(6, 3));
}
