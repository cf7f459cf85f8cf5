//! Slot-level Monte Carlo of one synchronization acquisition and of campaigns of them.
//!
//! Timestamps are kept as an offset from the start of their generation slot, so
//! `absolute = t0 + slot * t_qb + offset`. Delay differences are formed from the
//! offsets, which keeps noiseless runs exact in floating point.

use rayon::prelude::*;

use crate::analytic::n_t_min;
use crate::channel::{mu_ch_all, ChannelRealization};
use crate::error::{Error, Result};
use crate::geometry::{Point, Scenario};
use crate::random::{background_arrival, binomial_pmf_vec, RngStream};
use crate::stats::{wilson_ci, DistributionTable, Estimate, SampleSummary, Z_95};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Signal,
    Background,
    None,
}

/// One qubit slot as seen by both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub global_slot: usize,
    pub grid_index: usize,
    pub ref_bit: Option<u8>,
    pub ref_time: Option<f64>,
    pub rx_bit: Option<u8>,
    pub rx_time: Option<f64>,
    pub provenance: Provenance,
}

/// Valid reference slots: exactly one pair was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSequence {
    pub l_seq: usize,
    /// Ascending slot indices.
    pub slots: Vec<usize>,
    pub bits: Vec<u8>,
    /// Detector jitter relative to the slot start (s).
    pub offsets: Vec<f64>,
}

impl ReferenceSequence {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Position of `slot` among the valid slots.
    pub fn find(&self, slot: usize) -> Option<usize> {
        self.slots.binary_search(&slot).ok()
    }

    pub fn valid_fraction(&self) -> f64 {
        self.slots.len() as f64 / self.l_seq as f64
    }
}

/// Draws the pair count of every slot and timestamps the slots holding exactly one pair.
pub fn generate_reference(scn: &Scenario, rng: &mut RngStream) -> ReferenceSequence {
    let l_seq = scn.derived.l_seq;
    let mu_t = scn.cfg.mu_t;
    // exactly one pair iff the uniform falls in [P(0), P(0) + P(1))
    let p0 = (-mu_t).exp();
    let p01 = p0 * (1.0 + mu_t);
    let expected = (scn.derived.lambda_slot * l_seq as f64 * 1.05) as usize + 16;
    let mut out = ReferenceSequence {
        l_seq,
        slots: Vec::with_capacity(expected),
        bits: Vec::with_capacity(expected),
        offsets: Vec::with_capacity(expected),
    };
    for slot in 0..l_seq {
        let u = rng.uniform();
        if u < p0 || u >= p01 {
            continue;
        }
        out.slots.push(slot);
        out.bits.push(u8::from(rng.fair_bit()));
        out.offsets.push(scn.cfg.sigma_spad * rng.standard_normal());
    }
    out
}

/// A receiver detection on a valid reference slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Generation slot of the matching reference photon.
    pub slot: usize,
    /// Slot index the receiver assigns, `slot + shift_true`.
    pub rx_slot: usize,
    pub bit: u8,
    /// Arrival time relative to the generation slot start, including the round-trip delay (s).
    pub offset: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detections {
    pub shift_true: usize,
    pub events: Vec<Detection>,
}

impl Detections {
    pub fn n_sig(&self) -> usize {
        self.events.iter().filter(|d| d.provenance == Provenance::Signal).count()
    }

    pub fn n_bg(&self) -> usize {
        self.events.iter().filter(|d| d.provenance == Provenance::Background).count()
    }
}

/// Sends the twin of every valid reference photon through the channel.
///
/// When a signal and a background photon both register in one slot the signal is kept.
pub fn propagate_and_detect(
    scn: &Scenario,
    realization: &ChannelRealization,
    reference: &ReferenceSequence,
    rng: &mut RngStream,
) -> Result<Detections> {
    let cfg = &scn.cfg;
    let p_signal: Vec<f64> = mu_ch_all(scn, realization)?
        .into_iter()
        .map(|mu| -(-mu).exp_m1())
        .collect();
    let p_background = cfg.mu_bg * (-cfg.mu_bg).exp();
    let shift_true = scn.shift_true();
    let t_ch = scn.derived.t_ch_true;
    let mut events = Vec::new();
    for (k, &slot) in reference.slots.iter().enumerate() {
        let j = scn.grid_index_of_slot(slot);
        let signal = rng.bernoulli(p_signal[j]);
        let background = rng.bernoulli(p_background);
        let event = if signal {
            let flip = rng.bernoulli(cfg.p_pol);
            Detection {
                slot,
                rx_slot: slot + shift_true,
                bit: reference.bits[k] ^ u8::from(flip),
                offset: t_ch + cfg.sigma_spad * rng.standard_normal(),
                provenance: Provenance::Signal,
            }
        } else if background {
            Detection {
                slot,
                rx_slot: slot + shift_true,
                bit: u8::from(rng.fair_bit()),
                offset: t_ch + background_arrival(rng, cfg.t_qb),
                provenance: Provenance::Background,
            }
        } else {
            continue;
        };
        events.push(event);
    }
    Ok(Detections { shift_true, events })
}

/// Full per-slot view of one acquisition, with absolute timestamps.
pub fn slot_records(scn: &Scenario, reference: &ReferenceSequence, detections: &Detections) -> Vec<SlotRecord> {
    let t0 = scn.cfg.t0;
    let t_qb = scn.cfg.t_qb;
    let mut records: Vec<SlotRecord> = (0..reference.l_seq)
        .map(|slot| SlotRecord {
            global_slot: slot,
            grid_index: scn.grid_index_of_slot(slot),
            ref_bit: None,
            ref_time: None,
            rx_bit: None,
            rx_time: None,
            provenance: Provenance::None,
        })
        .collect();
    for (k, &slot) in reference.slots.iter().enumerate() {
        records[slot].ref_bit = Some(reference.bits[k]);
        records[slot].ref_time = Some(t0 + slot as f64 * t_qb + reference.offsets[k]);
    }
    for d in &detections.events {
        let r = &mut records[d.slot];
        r.rx_bit = Some(d.bit);
        r.rx_time = Some(t0 + d.slot as f64 * t_qb + d.offset);
        r.provenance = d.provenance;
    }
    records
}

/// Finds the shift `k ∈ [0, delta_n_max]` that maximizes bit agreement between
/// `received[u]` and `reference[u - k]`.
///
/// Both inputs are `(slot, bit)` pairs sorted by slot. Ties go to the smallest `k`.
/// Fails when no shift overlaps at least `min_overlap` non-null slot pairs.
pub fn align_sequences(
    reference: &[(usize, u8)],
    received: &[(usize, u8)],
    delta_n_max: usize,
    min_overlap: usize,
) -> Result<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_overlap = 0;
    for k in 0..=delta_n_max {
        let (mut i, mut overlap, mut matches) = (0, 0, 0);
        for &(u, bit) in received {
            let Some(target) = u.checked_sub(k) else { continue };
            while i < reference.len() && reference[i].0 < target {
                i += 1;
            }
            if i < reference.len() && reference[i].0 == target {
                overlap += 1;
                matches += usize::from(reference[i].1 == bit);
            }
        }
        best_overlap = best_overlap.max(overlap);
        if overlap >= min_overlap && best.is_none_or(|(_, m)| matches > m) {
            best = Some((k, matches));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::Alignment {
        best_overlap,
        required: min_overlap,
    })
}

/// `(t_ch_hat, n_ch)` from the per-detection delay samples `rx - ref`.
///
/// The mean is taken of deviations from `t_ch_true` so an exact channel gives `n_ch = 0` exactly.
pub fn estimate_delay(delays: &[f64], t_ch_true: f64) -> Result<(f64, f64)> {
    if delays.is_empty() {
        return Err(Error::NoDetection);
    }
    let n_ch = delays.iter().map(|d| d - t_ch_true).sum::<f64>() / delays.len() as f64;
    Ok((t_ch_true + n_ch, n_ch))
}

/// Pmf of `N_sig` given the channel: a sum of per-cell binomials.
pub fn conditional_nsig_pmf(scn: &Scenario, realization: &ChannelRealization) -> Result<Vec<f64>> {
    let l_sv = scn.derived.l_sv as u64;
    let mut pmf = vec![1.0];
    for mu in mu_ch_all(scn, realization)? {
        let q = scn.derived.lambda_slot * -(-mu).exp_m1();
        let mean = l_sv as f64 * q;
        let k_max = (mean + 12.0 * mean.sqrt() + 12.0).ceil() as u64;
        let cell = binomial_pmf_vec(l_sv, q, k_max);
        let mut next = vec![0.0; pmf.len() + cell.len() - 1];
        for (a, &pa) in pmf.iter().enumerate() {
            if pa < 1e-300 {
                continue;
            }
            for (b, &pb) in cell.iter().enumerate() {
                next[a + b] += pa * pb;
            }
        }
        while next.len() > 1 && *next.last().unwrap() < 1e-16 {
            next.pop();
        }
        pmf = next;
    }
    Ok(pmf)
}

/// Outcome of one acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u64,
    pub r_dev: Point,
    pub n_sig: usize,
    pub n_bg: usize,
    pub n_tot: usize,
    pub shift_true: usize,
    pub shift_est: Option<usize>,
    pub t_ch_hat: Option<f64>,
    pub n_ch: Option<f64>,
    pub outage: bool,
    /// Alignment returned the true shift.
    pub aligned: bool,
    /// Pmf of `N_sig` given this trial's channel draw.
    pub nsig_pmf: Vec<f64>,
}

pub fn run_trial(scn: &Scenario, rng: &mut RngStream) -> Result<TrialResult> {
    let realization = ChannelRealization::draw(scn, rng)?;
    let reference = generate_reference(scn, rng);
    let detections = propagate_and_detect(scn, &realization, &reference, rng)?;
    let nsig_pmf = conditional_nsig_pmf(scn, &realization)?;

    let n_sig = detections.n_sig();
    let n_bg = detections.n_bg();
    let n_tot = n_sig + n_bg;
    let outage = n_tot < n_t_min(scn) as usize;

    let ref_bits: Vec<(usize, u8)> = reference.slots.iter().copied().zip(reference.bits.iter().copied()).collect();
    let rx_bits: Vec<(usize, u8)> = detections.events.iter().map(|d| (d.rx_slot, d.bit)).collect();
    let shift_est = align_sequences(
        &ref_bits,
        &rx_bits,
        scn.derived.delta_n_max,
        scn.cfg.n_s_min.max(1) as usize,
    )
    .ok();

    let (mut t_ch_hat, mut n_ch) = (None, None);
    if let Some(k) = shift_est {
        let t_qb = scn.cfg.t_qb;
        let delays: Vec<f64> = detections
            .events
            .iter()
            .filter_map(|d| {
                let ref_slot = d.rx_slot.checked_sub(k)?;
                let idx = reference.find(ref_slot)?;
                // rx generation slot minus paired reference slot
                let slot_gap = ref_slot as f64 - d.slot as f64;
                Some(d.offset - slot_gap * t_qb - reference.offsets[idx])
            })
            .collect();
        if let Ok((t, n)) = estimate_delay(&delays, scn.derived.t_ch_true) {
            t_ch_hat = Some(t);
            n_ch = Some(n);
        }
    }

    Ok(TrialResult {
        trial: rng.stream_id(),
        r_dev: realization.r_dev,
        n_sig,
        n_bg,
        n_tot,
        shift_true: detections.shift_true,
        shift_est,
        t_ch_hat,
        n_ch,
        outage,
        aligned: shift_est == Some(detections.shift_true),
        nsig_pmf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CampaignSpec {
    pub trials: u64,
    pub seed: u64,
    pub parallelism: usize,
}

impl CampaignSpec {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            parallelism: 1,
        }
    }
}

/// Aggregated campaign output. Identical for any degree of parallelism.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignStats {
    pub trials: u64,
    /// Empirical pmf of the observed `N_sig`.
    pub nsig_histogram: DistributionTable,
    /// Average over trials of the conditional `N_sig` pmf given each channel draw.
    pub nsig_conditional: DistributionTable,
    pub nbg_mean: f64,
    pub empirical_outage: Estimate,
    /// Fraction of trials with no valid detection at all.
    pub no_detection_rate: Estimate,
    /// `n_ch` over non-outage, correctly aligned trials.
    pub nch: Option<SampleSummary>,
    /// Correct alignments among non-outage trials.
    pub alignment_success_rate: Estimate,
    /// Per-trial results in trial order, with the conditional pmfs dropped.
    pub results: Vec<TrialResult>,
}

pub fn run_campaign(scn: &Scenario, spec: &CampaignSpec) -> Result<CampaignStats> {
    if spec.trials == 0 {
        return Err(Error::Argument("a campaign needs at least one trial".into()));
    }
    let run = |trial: u64| run_trial(scn, &mut RngStream::new(spec.seed, trial));
    let results: Vec<TrialResult> = if spec.parallelism <= 1 {
        (0..spec.trials).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.parallelism)
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
        pool.install(|| (0..spec.trials).into_par_iter().map(run).collect::<Result<_>>())?
    };
    Ok(aggregate(results))
}

/// Reduces trial results in trial order.
pub fn aggregate(mut results: Vec<TrialResult>) -> CampaignStats {
    let n = results.len();
    let nf = n as f64;
    let nsig_histogram = DistributionTable::from_counts(results.iter().map(|r| r.n_sig as u64));
    let mut conditional: Vec<f64> = Vec::new();
    for r in &results {
        if r.nsig_pmf.len() > conditional.len() {
            conditional.resize(r.nsig_pmf.len(), 0.0);
        }
        for (c, p) in conditional.iter_mut().zip(&r.nsig_pmf) {
            *c += p / nf;
        }
    }
    let nbg_mean = results.iter().map(|r| r.n_bg as f64).sum::<f64>() / nf;
    let outages = results.iter().filter(|r| r.outage).count();
    let empty = results.iter().filter(|r| r.n_tot == 0).count();
    let attempted: Vec<&TrialResult> = results.iter().filter(|r| !r.outage).collect();
    let aligned = attempted.iter().filter(|r| r.aligned).count();
    let nch_samples: Vec<f64> = attempted.iter().filter(|r| r.aligned).filter_map(|r| r.n_ch).collect();
    let proportion = |k: usize, total: usize| {
        let (lo, hi) = wilson_ci(k, total, Z_95);
        let value = if total == 0 { 0.0 } else { k as f64 / total as f64 };
        if total <= 1 {
            Estimate::degenerate(value)
        } else {
            Estimate { value, lo, hi }
        }
    };
    let alignment_success_rate = proportion(aligned, attempted.len());
    for r in &mut results {
        r.nsig_pmf = Vec::new();
    }
    CampaignStats {
        trials: n as u64,
        nsig_histogram,
        nsig_conditional: DistributionTable::pmf(conditional),
        nbg_mean,
        empirical_outage: proportion(outages, n),
        no_detection_rate: proportion(empty, n),
        nch: SampleSummary::from_samples(&nch_samples),
        alignment_success_rate,
        results,
    }
}
