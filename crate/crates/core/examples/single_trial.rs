//! One acquisition step by step: channel draw, reference sequence, detections,
//! alignment and delay estimate.

use qsync::channel::{mu_ch_all, ChannelRealization};
use qsync::sim::{align_sequences, generate_reference, propagate_and_detect};
use qsync::{run_trial, RngStream, Scenario, SystemConfig};

pub fn run(seed: u64) -> qsync::Result<()> {
    let scn = Scenario::new(SystemConfig::default())?;
    let mut rng = RngStream::new(seed, 0);

    let channel = ChannelRealization::draw(&scn, &mut rng)?;
    let mu: f64 = mu_ch_all(&scn, &channel)?.iter().sum();
    println!("pointing offset {:?}, expected signal photons per slot summed over cells {mu:.3e}", channel.r_dev);

    let reference = generate_reference(&scn, &mut rng);
    println!("{} of {} slots carry exactly one pair ({:.3})", reference.len(), reference.l_seq, reference.valid_fraction());

    let detections = propagate_and_detect(&scn, &channel, &reference, &mut rng)?;
    println!("detections: {} signal, {} background", detections.n_sig(), detections.n_bg());

    let ref_bits: Vec<(usize, u8)> = reference.slots.iter().copied().zip(reference.bits.iter().copied()).collect();
    let rx_bits: Vec<(usize, u8)> = detections.events.iter().map(|d| (d.rx_slot, d.bit)).collect();
    match align_sequences(&ref_bits, &rx_bits, scn.derived.delta_n_max, scn.cfg.n_s_min as usize) {
        Ok(k) => println!("alignment shift {k} (true {})", detections.shift_true),
        Err(e) => println!("alignment failed: {e}"),
    }

    // the same trial through the one-call API
    let trial = run_trial(&scn, &mut RngStream::new(seed, 0))?;
    match trial.n_ch {
        Some(n) => println!("delay error {:.2} ps, outage {}", n * 1e12, trial.outage),
        None => println!("no delay estimate, outage {}", trial.outage),
    }
    Ok(())
}

fn main() -> qsync::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    run(seed)
}
