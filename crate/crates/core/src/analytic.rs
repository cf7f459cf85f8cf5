//! Closed-form and quadrature predictions: detection-count distributions,
//! synchronization-error variance and outage probability.
//!
//! The pointing offset is marginalized through its radius only, placed on the
//! x-axis (`r_dev = (r, 0)`) with a Rayleigh density. Given `r`, the per-acquisition
//! signal rate `μ` is Gaussian; `N_sig` is Poisson with that rate.

use crate::channel::{check_validity, weight_sums};
use crate::error::{Error, Result};
use crate::geometry::{Point, Scenario};
use crate::random::{binomial_pmf_vec, poisson_pmf_vec};
use crate::special::{normal_cdf, normal_pdf, GaussLegendre};
use crate::stats::{tv_distance, DistributionTable};

/// Tail mass below which the count tables are truncated.
pub const TAIL_EPS: f64 = 1e-6;

/// Integration ranges and node counts for the mixture integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Upper limit of the radial integral in units of `σ_p`.
    pub r_max_sigmas: f64,
    /// Half-width of the Gaussian rate integral in units of its standard deviation.
    pub mu_sigmas: f64,
    pub nodes_r: usize,
    pub nodes_mu: usize,
    /// Explicit upper count for `N_sig`; `None` picks it from the tail mass.
    pub n_max: Option<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            r_max_sigmas: 6.0,
            mu_sigmas: 8.0,
            nodes_r: 64,
            nodes_mu: 64,
            n_max: None,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_r < 16 || self.nodes_mu < 16 {
            return Err(Error::Argument(format!(
                "quadrature needs at least 16 nodes (nodes_r={}, nodes_mu={})",
                self.nodes_r, self.nodes_mu
            )));
        }
        if self.r_max_sigmas < 4.0 || self.mu_sigmas < 4.0 {
            return Err(Error::Argument("quadrature truncation must be at least 4 sigma".into()));
        }
        Ok(())
    }

    /// The same ranges with twice the nodes.
    pub fn refined(&self) -> Self {
        Self {
            nodes_r: 2 * self.nodes_r,
            nodes_mu: 2 * self.nodes_mu,
            ..*self
        }
    }
}

pub fn rayleigh_pdf(r: f64, sigma: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    r / (sigma * sigma) * (-r * r / (2.0 * sigma * sigma)).exp()
}

/// Mean and standard deviation of the acquisition-level signal rate given radial offset `r`.
pub fn mu_total_conditional_moments(scn: &Scenario, r: f64) -> (f64, f64) {
    let r_dev = Point::new(r, 0.0);
    let (s1, s2) = (0..scn.derived.n_gr).fold((0.0, 0.0), |(a, b), j| {
        let (w1, w2) = weight_sums(scn, j, r_dev);
        (a + w1, b + w2)
    });
    let scale = scn.cfg.eta_spad * scn.derived.lambda_grid * scn.derived.c0;
    (scale * s1, scale * (scn.derived.fading_variance * s2).sqrt())
}

/// Gaussian density of the acquisition-level signal rate given radial offset `r`.
pub fn mu_ch_total_conditional_pdf(mu: f64, r: f64, scn: &Scenario) -> f64 {
    let (mean, sd) = mu_total_conditional_moments(scn, r);
    normal_pdf(mu, mean, sd)
}

/// One radial node of the offset marginalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNode {
    pub r: f64,
    /// Quadrature weight times Rayleigh density, normalized over all nodes.
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Radial quadrature nodes with the conditional rate moments at each.
pub fn radial_nodes(scn: &Scenario, quad: &QuadratureSpec) -> Result<Vec<RadialNode>> {
    quad.validate()?;
    check_validity(scn)?;
    let sigma = scn.cfg.sigma_p;
    if sigma == 0.0 {
        let (mean, sd) = mu_total_conditional_moments(scn, 0.0);
        return Ok(vec![RadialNode {
            r: 0.0,
            weight: 1.0,
            mean,
            sd,
        }]);
    }
    let gl = GaussLegendre::new(quad.nodes_r);
    let mut nodes: Vec<RadialNode> = gl
        .mapped(0.0, quad.r_max_sigmas * sigma)
        .map(|(r, w)| {
            let (mean, sd) = mu_total_conditional_moments(scn, r);
            RadialNode {
                r,
                weight: w * rayleigh_pdf(r, sigma),
                mean,
                sd,
            }
        })
        .collect();
    let total: f64 = nodes.iter().map(|n| n.weight).sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numerical(format!("radial quadrature mass is {total}")));
    }
    nodes.iter_mut().for_each(|n| n.weight /= total);
    Ok(nodes)
}

/// Marginal density of the acquisition-level signal rate.
///
/// Each conditional Gaussian is truncated at zero and renormalized.
pub fn mu_ch_pdf(mu: f64, scn: &Scenario, quad: &QuadratureSpec) -> Result<f64> {
    let nodes = radial_nodes(scn, quad)?;
    mu_ch_pdf_from_nodes(mu, &nodes)
}

fn mu_ch_pdf_from_nodes(mu: f64, nodes: &[RadialNode]) -> Result<f64> {
    if mu < 0.0 {
        return Ok(0.0);
    }
    let mut density = 0.0;
    for node in nodes {
        if node.sd == 0.0 {
            return Err(Error::Numerical(
                "signal rate has no density when fading is deterministic".into(),
            ));
        }
        let kept = 1.0 - normal_cdf(0.0, node.mean, node.sd);
        density += node.weight * normal_pdf(mu, node.mean, node.sd) / kept;
    }
    Ok(density)
}

/// The marginal rate density tabulated on `points` equally spaced values.
pub fn mu_ch_table(scn: &Scenario, quad: &QuadratureSpec, points: usize) -> Result<DistributionTable> {
    let nodes = radial_nodes(scn, quad)?;
    let hi = nodes
        .iter()
        .map(|n| n.mean + quad.mu_sigmas * n.sd)
        .fold(0.0, f64::max);
    let points = points.max(2);
    let grid: Vec<f64> = (0..points).map(|k| hi * k as f64 / (points - 1) as f64).collect();
    let density = grid
        .iter()
        .map(|&mu| mu_ch_pdf_from_nodes(mu, &nodes))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionTable::pdf(grid, density))
}

/// Distribution of the signal count as a Poisson mixture over the rate.
///
/// Negative-rate mass of each conditional Gaussian is assigned to `N_sig = 0`.
/// The table stops where the remaining tail mass falls below [`TAIL_EPS`].
pub fn p_nsig_table(scn: &Scenario, quad: &QuadratureSpec) -> Result<DistributionTable> {
    let nodes = radial_nodes(scn, quad)?;
    let hi = nodes
        .iter()
        .map(|n| n.mean + quad.mu_sigmas * n.sd)
        .fold(0.0, f64::max);
    let n_cap = quad
        .n_max
        .unwrap_or_else(|| (hi + 12.0 * hi.sqrt() + 30.0).ceil() as usize);
    let gl = GaussLegendre::new(quad.nodes_mu);
    let mut pmf = vec![0.0; n_cap + 1];
    for node in &nodes {
        if node.sd == 0.0 {
            for (p, q) in pmf.iter_mut().zip(poisson_pmf_vec(node.mean.max(0.0), n_cap)) {
                *p += node.weight * q;
            }
            continue;
        }
        pmf[0] += node.weight * normal_cdf(0.0, node.mean, node.sd);
        let lo = (node.mean - quad.mu_sigmas * node.sd).max(0.0);
        let up = node.mean + quad.mu_sigmas * node.sd;
        if up <= lo {
            continue;
        }
        for (mu, w) in gl.mapped(lo, up) {
            let weight = node.weight * w * normal_pdf(mu, node.mean, node.sd);
            for (p, q) in pmf.iter_mut().zip(poisson_pmf_vec(mu, n_cap)) {
                *p += weight * q;
            }
        }
    }
    let total: f64 = pmf.iter().sum();
    if !(total.is_finite() && (total - 1.0).abs() < 1e-3) {
        return Err(Error::Numerical(format!(
            "signal-count mixture integrates to {total}; increase n_max or the quadrature nodes"
        )));
    }
    let mut tail = 1.0 - pmf.iter().sum::<f64>();
    let mut keep = pmf.len();
    while keep > 1 && tail + pmf[keep - 1] < TAIL_EPS {
        tail += pmf[keep - 1];
        keep -= 1;
    }
    pmf.truncate(keep);
    Ok(DistributionTable::pmf(pmf))
}

pub fn p_nsig(n: usize, scn: &Scenario, quad: &QuadratureSpec) -> Result<f64> {
    Ok(p_nsig_table(scn, quad)?.values.get(n).copied().unwrap_or(0.0))
}

/// Background-count pmf, truncated where the tail is below 1e-15.
pub fn p_nbg_table(scn: &Scenario) -> DistributionTable {
    let mean = scn.derived.mean_background;
    let n_cap = (mean + 20.0 * mean.sqrt() + 40.0).ceil() as usize;
    let mut pmf = poisson_pmf_vec(mean, n_cap);
    while pmf.len() > 1 && *pmf.last().unwrap() < 1e-17 && pmf.len() - 1 > mean as usize {
        pmf.pop();
    }
    DistributionTable::pmf(pmf)
}

pub fn p_nbg(n: usize, scn: &Scenario) -> f64 {
    crate::random::poisson_pmf_unchecked(n as u64, scn.derived.mean_background)
}

/// Detection threshold: the larger of `N_s_min` and `m` times the expected background count.
pub fn n_t_min(scn: &Scenario) -> u32 {
    if let Some(n) = scn.cfg.n_t_min {
        return n;
    }
    let background = (scn.cfg.m * scn.derived.mean_background).ceil();
    scn.cfg.n_s_min.max(background as u32)
}

/// Error variance of the averaged delay given `n_sig` signal and `n_bg` background detections.
pub fn conditional_error_variance(n_sig: u64, n_bg: u64, sigma_spad: f64, t_qb: f64) -> f64 {
    let total = (n_sig + n_bg) as f64;
    let s2 = sigma_spad * sigma_spad;
    (2.0 * n_sig as f64 * s2 + n_bg as f64 * (t_qb * t_qb / 12.0 + s2)) / (total * total)
}

/// Expected synchronization-error variance over acquisitions that reach the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncErrorVariance {
    /// `E[Var | N_tot ≥ N_t,min]` (s²).
    pub variance: f64,
    pub std: f64,
    /// `Σ P(N_sig) P(N_bg) Var(N_sig, N_bg)` over the retained terms, without renormalizing.
    pub unnormalized: f64,
    /// `P(N_tot ≥ N_t,min)`.
    pub retained_mass: f64,
    pub low_confidence: bool,
    pub n_t_min: u32,
}

pub fn sync_error_variance_from_pmfs(
    p_sig: &[f64],
    p_bg: &[f64],
    n_t_min: u32,
    sigma_spad: f64,
    t_qb: f64,
) -> Result<SyncErrorVariance> {
    let threshold = n_t_min.max(1) as usize;
    let mut acc = 0.0;
    let mut mass = 0.0;
    for (s, &ps) in p_sig.iter().enumerate() {
        if ps == 0.0 {
            continue;
        }
        for (b, &pb) in p_bg.iter().enumerate().skip(threshold.saturating_sub(s)) {
            let joint = ps * pb;
            acc += joint * conditional_error_variance(s as u64, b as u64, sigma_spad, t_qb);
            mass += joint;
        }
    }
    if mass <= 0.0 {
        return Err(Error::Numerical(format!(
            "no probability mass at or above the detection threshold {threshold}"
        )));
    }
    let variance = acc / mass;
    Ok(SyncErrorVariance {
        variance,
        std: variance.sqrt(),
        unnormalized: acc,
        retained_mass: mass,
        low_confidence: mass < 0.5,
        n_t_min,
    })
}

pub fn sync_error_variance(scn: &Scenario, quad: &QuadratureSpec) -> Result<SyncErrorVariance> {
    let sig = p_nsig_table(scn, quad)?;
    let bg = p_nbg_table(scn);
    sync_error_variance_from_pmfs(&sig.values, &bg.values, n_t_min(scn), scn.cfg.sigma_spad, scn.cfg.t_qb)
}

/// `P(N_sig + N_bg < threshold)` for independent counts.
pub fn outage_from_pmfs(p_sig: &[f64], p_bg: &[f64], threshold: u32) -> f64 {
    let threshold = threshold as usize;
    let mut out = 0.0;
    for (s, &ps) in p_sig.iter().enumerate().take(threshold) {
        out += ps * p_bg.iter().take(threshold - s).sum::<f64>();
    }
    out.clamp(0.0, 1.0)
}

pub fn outage_probability(scn: &Scenario, quad: &QuadratureSpec) -> Result<f64> {
    let sig = p_nsig_table(scn, quad)?;
    let bg = p_nbg_table(scn);
    Ok(outage_from_pmfs(&sig.values, &bg.values, n_t_min(scn)))
}

/// Everything the analytic model predicts for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    pub n_t_min: u32,
    pub nsig: DistributionTable,
    pub nbg: DistributionTable,
    pub mean_nsig: f64,
    pub sync: SyncErrorVariance,
    /// `P(N_tot < N_t,min)`.
    pub outage: f64,
    /// `P(N_tot = 0)`: no valid detection at all.
    pub outage_no_detection: f64,
}

pub fn analyze(scn: &Scenario, quad: &QuadratureSpec) -> Result<AnalyticReport> {
    let nsig = p_nsig_table(scn, quad)?;
    let nbg = p_nbg_table(scn);
    let threshold = n_t_min(scn);
    let sync = sync_error_variance_from_pmfs(&nsig.values, &nbg.values, threshold, scn.cfg.sigma_spad, scn.cfg.t_qb)?;
    let outage = outage_from_pmfs(&nsig.values, &nbg.values, threshold);
    let outage_no_detection = outage_from_pmfs(&nsig.values, &nbg.values, 1);
    Ok(AnalyticReport {
        n_t_min: threshold,
        mean_nsig: nsig.mean(),
        nsig,
        nbg,
        sync,
        outage,
        outage_no_detection,
    })
}

/// Total-variation distance between `Binomial(trials, p)` and `Poisson(trials·p)` over `0..=n_max`.
pub fn binomial_poisson_tv(trials: u64, p: f64, n_max: usize) -> f64 {
    let binomial = binomial_pmf_vec(trials, p, n_max as u64);
    let poisson = poisson_pmf_vec(trials as f64 * p, n_max);
    tv_distance(&binomial, &poisson)
}
