//! Single-photon reception through the retroreflector array.

use std::f64::consts::PI;

use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::geometry::{Point, Scenario};
use crate::random::{sample_r_dev, GammaGamma, RngStream};
use crate::special::{normal_pdf, GaussLegendre};

/// Largest `sqrt(A_ar) / w_z` for which the point-sampled beam approximation is used.
pub const VALIDITY_RATIO: f64 = 0.5;

/// One draw of the random channel: a pointing offset and a fading coefficient
/// for every (retroreflector, grid cell) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub r_dev: Point,
    n_ar: usize,
    n_gr: usize,
    /// Cell-major: `fading[j * n_ar + i]`.
    fading: Vec<f64>,
}

impl ChannelRealization {
    /// Draws `r_dev` first, then the fading matrix.
    pub fn draw(scn: &Scenario, rng: &mut RngStream) -> Result<Self> {
        let r_dev = sample_r_dev(rng, scn.cfg.sigma_p);
        Self::draw_fading(scn, r_dev, rng)
    }

    /// Draws only the fading matrix for a given offset.
    pub fn draw_fading(scn: &Scenario, r_dev: Point, rng: &mut RngStream) -> Result<Self> {
        let (n_ar, n_gr) = (scn.derived.n_ar, scn.derived.n_gr);
        if scn.cfg.deterministic_fading {
            return Ok(Self::unfaded(scn, r_dev));
        }
        let gg = GammaGamma::new(scn.cfg.alpha, scn.cfg.beta)?;
        let fading = if scn.cfg.fading_static_across_grid {
            let column: Vec<f64> = (0..n_ar).map(|_| gg.sample(rng)).collect();
            (0..n_gr).flat_map(|_| column.iter().copied()).collect()
        } else {
            (0..n_ar * n_gr).map(|_| gg.sample(rng)).collect()
        };
        Ok(Self {
            r_dev,
            n_ar,
            n_gr,
            fading,
        })
    }

    /// All fading coefficients equal to one.
    pub fn unfaded(scn: &Scenario, r_dev: Point) -> Self {
        let (n_ar, n_gr) = (scn.derived.n_ar, scn.derived.n_gr);
        Self {
            r_dev,
            n_ar,
            n_gr,
            fading: vec![1.0; n_ar * n_gr],
        }
    }

    pub fn from_parts(r_dev: Point, n_ar: usize, n_gr: usize, fading: Vec<f64>) -> Result<Self> {
        if fading.len() != n_ar * n_gr {
            return Err(Error::Argument(format!(
                "fading matrix has {} entries, expected {n_ar} x {n_gr}",
                fading.len()
            )));
        }
        if let Some(bad) = fading.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::Argument(format!("fading coefficient {bad} is not a finite nonnegative value")));
        }
        Ok(Self {
            r_dev,
            n_ar,
            n_gr,
            fading,
        })
    }

    pub fn n_ar(&self) -> usize {
        self.n_ar
    }

    pub fn n_gr(&self) -> usize {
        self.n_gr
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.fading[j * self.n_ar + i]
    }

    /// Fading coefficients seen from grid cell `j`, indexed by retroreflector.
    pub fn cell(&self, j: usize) -> &[f64] {
        &self.fading[j * self.n_ar..(j + 1) * self.n_ar]
    }

    fn check_dims(&self, scn: &Scenario) -> Result<()> {
        if self.n_ar != scn.derived.n_ar || self.n_gr != scn.derived.n_gr {
            return Err(Error::Argument(format!(
                "realization is {} x {}, scenario needs {} x {}",
                self.n_ar, self.n_gr, scn.derived.n_ar, scn.derived.n_gr
            )));
        }
        Ok(())
    }
}

/// `exp(-2 ‖p_ar - p_grid - r_dev‖² / w_z²)`.
pub fn spatial_weight(p_ar: Point, p_grid: Point, r_dev: Point, w_z: f64) -> f64 {
    (-2.0 * (p_ar - p_grid - r_dev).norm_sq() / (w_z * w_z)).exp()
}

/// Weight of retroreflector `i` when the beam is steered at cell `j`.
pub fn weight(scn: &Scenario, i: usize, j: usize, r_dev: Point) -> f64 {
    spatial_weight(scn.ccr.positions[i], scn.grid.offsets[j], r_dev, scn.cfg.w_z)
}

/// `(Σ_i w, Σ_i w²)` over the array for cell `j`.
pub fn weight_sums(scn: &Scenario, j: usize, r_dev: Point) -> (f64, f64) {
    scn.ccr.positions.iter().fold((0.0, 0.0), |(s1, s2), &p| {
        let w = spatial_weight(p, scn.grid.offsets[j], r_dev, scn.cfg.w_z);
        (s1 + w, s2 + w * w)
    })
}

/// Model-validity error when the beam is too narrow for the point-sampled approximation.
pub fn check_validity(scn: &Scenario) -> Result<()> {
    let ratio = scn.cfg.a_ar.sqrt() / scn.cfg.w_z;
    if ratio > VALIDITY_RATIO {
        return Err(Error::ModelValidity(format!(
            "sqrt(A_ar)/w_z = {ratio:.3} exceeds {VALIDITY_RATIO}; beam too narrow for the point-sampled approximation"
        )));
    }
    Ok(())
}

/// Probability that a photon hits retroreflector `i` and its return is captured by the aperture.
pub fn p_hap(scn: &Scenario, i: usize, j: usize, r_dev: Point) -> Result<f64> {
    check_validity(scn)?;
    let cfg = &scn.cfg;
    let p = 2.0 * cfg.a_ar / (PI * cfg.w_z * cfg.w_z) * weight(scn, i, j, r_dev) * scn.derived.p_ap;
    if p >= 1.0 {
        return Err(Error::ModelValidity(format!("hit-and-capture probability {p} is not below 1")));
    }
    Ok(p)
}

/// Gaussian beam power falling on a square of side `side` centered at `square_center`.
///
/// Tensor Gauss–Legendre quadrature starting at `order` nodes per axis and doubling
/// until the relative change drops below 1e-8.
pub fn gaussian_beam_on_square(
    square_center: Point,
    side: f64,
    beam_center: Point,
    w_z: f64,
    order: usize,
) -> Result<f64> {
    const MAX_ORDER: usize = 1024;
    let density = |x: f64, y: f64| {
        let d2 = (x - beam_center.x).powi(2) + (y - beam_center.y).powi(2);
        2.0 / (PI * w_z * w_z) * (-2.0 * d2 / (w_z * w_z)).exp()
    };
    let evaluate = |n: usize| {
        let gl = GaussLegendre::new(n);
        let h = side / 2.0;
        let xs: Vec<(f64, f64)> = gl.mapped(square_center.x - h, square_center.x + h).collect();
        let ys: Vec<(f64, f64)> = gl.mapped(square_center.y - h, square_center.y + h).collect();
        let mut total = 0.0;
        for &(y, wy) in &ys {
            for &(x, wx) in &xs {
                total += wx * wy * density(x, y);
            }
        }
        total
    };
    let mut n = order.max(2);
    let mut previous = evaluate(n);
    while n < MAX_ORDER {
        n *= 2;
        let current = evaluate(n);
        let scale = current.abs().max(f64::MIN_POSITIVE);
        if (current - previous).abs() <= 1e-8 * scale {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Numerical(format!(
        "beam-on-square quadrature not converged at {MAX_ORDER} nodes per axis"
    )))
}

/// Hit probability of retroreflector `i` (a square of area `A_ar`) by exact integration
/// of the beam profile; the reference for [`p_hap`].
pub fn p_hit_oracle(scn: &Scenario, i: usize, j: usize, r_dev: Point, quad_order: usize) -> Result<f64> {
    gaussian_beam_on_square(
        scn.ccr.positions[i],
        scn.cfg.a_ar.sqrt(),
        scn.grid.offsets[j] + r_dev,
        scn.cfg.w_z,
        quad_order,
    )
}

/// Reception probability of a photon sent while the beam dwells on cell `j`.
pub fn p_rec_slot(scn: &Scenario, j: usize, realization: &ChannelRealization) -> Result<f64> {
    check_validity(scn)?;
    realization.check_dims(scn)?;
    let sum: f64 = scn
        .ccr
        .positions
        .iter()
        .zip(realization.cell(j))
        .map(|(&p, &h)| h * spatial_weight(p, scn.grid.offsets[j], realization.r_dev, scn.cfg.w_z))
        .sum();
    let p = scn.derived.c0 * sum;
    if p >= 1.0 {
        return Err(Error::ModelValidity(format!(
            "reception probability {p} in cell {j} is not below 1"
        )));
    }
    Ok(p)
}

/// Mean and standard deviation of the Gaussian approximation to `P_rec,j` given `r_dev`.
pub fn p_rec_conditional_moments(scn: &Scenario, j: usize, r_dev: Point) -> (f64, f64) {
    let (s1, s2) = weight_sums(scn, j, r_dev);
    let c0 = scn.derived.c0;
    (c0 * s1, c0 * (scn.derived.fading_variance * s2).sqrt())
}

pub fn p_rec_conditional_pdf(p: f64, scn: &Scenario, j: usize, r_dev: Point) -> f64 {
    if scn.derived.n_ar < 8 {
        log::warn!(
            "Gaussian approximation used with only {} retroreflectors",
            scn.derived.n_ar
        );
    }
    let (mean, sd) = p_rec_conditional_moments(scn, j, r_dev);
    normal_pdf(p, mean, sd)
}

/// Expected detected photons per slot in cell `j`.
pub fn mu_ch_slot(scn: &Scenario, j: usize, realization: &ChannelRealization) -> Result<f64> {
    Ok(scn.cfg.eta_spad * p_rec_slot(scn, j, realization)?)
}

/// `μ_ch,j` for every cell.
pub fn mu_ch_all(scn: &Scenario, realization: &ChannelRealization) -> Result<Vec<f64>> {
    (0..scn.derived.n_gr).map(|j| mu_ch_slot(scn, j, realization)).collect()
}

/// Density of `μ_ch,j = η P_rec,j` given `r_dev`.
pub fn mu_ch_conditional_pdf(mu: f64, scn: &Scenario, j: usize, r_dev: Point) -> f64 {
    let eta = scn.cfg.eta_spad;
    p_rec_conditional_pdf(mu / eta, scn, j, r_dev) / eta
}
