//! Seeded random streams and the distributions used by the channel and simulator.
//!
//! Every random draw in the crate goes through an [`RngStream`]. A stream is
//! fully determined by `(master_seed, stream_id)`: the master seed is expanded
//! with SplitMix64 into a ChaCha8 key and the stream id selects one of ChaCha's
//! independent 2^64 streams. Sequences are reproducible within this crate only;
//! the statistical properties are what other implementations should match.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::special::{integrate_adaptive, ln_bessel_k, ln_gamma};

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines two seeds into one; used to derive per-point seeds in sweeps.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(32))
}

/// A reproducible, independent random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    pub fn fair_bit(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

fn check_shape(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0) {
        return Err(Error::Argument(format!(
            "Gamma-Gamma parameters must be finite and positive (alpha={alpha}, beta={beta})"
        )));
    }
    Ok(())
}

/// Gamma-Gamma density of the turbulence coefficient `h`.
///
/// At `h = 0` the density takes its limit: 0 when `min(α, β) > 1`,
/// `(αβ) Γ(|α-β|) / (Γ(α) Γ(β))` when `min(α, β) = 1 < max(α, β)`, infinite otherwise.
pub fn gg_pdf(h: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_shape(alpha, beta)?;
    if !h.is_finite() || h < 0.0 {
        return Err(Error::Argument(format!("gg_pdf requires finite h >= 0 (h={h})")));
    }
    let nu = alpha - beta;
    if h == 0.0 {
        let lo = alpha.min(beta);
        return Ok(if lo > 1.0 {
            0.0
        } else if lo == 1.0 && nu != 0.0 {
            (alpha * beta * ln_gamma(nu.abs()).exp()) / (ln_gamma(alpha) + ln_gamma(beta)).exp()
        } else {
            f64::INFINITY
        });
    }
    let ab = alpha * beta;
    let half_sum = 0.5 * (alpha + beta);
    let ln_prefactor = std::f64::consts::LN_2 + half_sum * ab.ln() - ln_gamma(alpha) - ln_gamma(beta);
    let ln_density = ln_prefactor + (half_sum - 1.0) * h.ln() + ln_bessel_k(nu, 2.0 * (ab * h).sqrt())?;
    Ok(ln_density.exp())
}

/// `P(H <= h)` by adaptive quadrature of [`gg_pdf`].
pub fn gg_cdf_by_quadrature(h: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_shape(alpha, beta)?;
    if h <= 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let value = integrate_adaptive(
        |x| {
            if x <= 0.0 {
                return 0.0;
            }
            match gg_pdf(x, alpha, beta) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        h,
        1e-12,
        1e-10,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value.min(1.0)),
    }
}

/// Gamma-Gamma CDF tabulated by integrating [`gg_pdf`] segment by segment.
///
/// Evaluation adds the partial segment by a fixed Gauss–Legendre rule, so each
/// call costs a dozen density evaluations.
#[derive(Debug, Clone)]
pub struct GgCdfTable {
    alpha: f64,
    beta: f64,
    step: f64,
    cdf: Vec<f64>,
    gl: crate::special::GaussLegendre,
}

impl GgCdfTable {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_shape(alpha, beta)?;
        let sd = crate::geometry::gamma_gamma_variance(alpha, beta).sqrt();
        let h_max = 1.0 + 60.0 * sd;
        let segments = 20_000;
        let step = h_max / segments as f64;
        let gl = crate::special::GaussLegendre::new(12);
        let mut cdf = Vec::with_capacity(segments + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for k in 0..segments {
            let (a, b) = (k as f64 * step, (k + 1) as f64 * step);
            let mut piece = 0.0;
            for (x, w) in gl.mapped(a, b) {
                piece += w * gg_pdf(x, alpha, beta)?;
            }
            acc += piece;
            cdf.push(acc);
        }
        if (acc - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!("Gamma-Gamma CDF table integrates to {acc}")));
        }
        Ok(Self {
            alpha,
            beta,
            step,
            cdf,
            gl,
        })
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let x = h / self.step;
        let k = x.floor() as usize;
        if k + 1 >= self.cdf.len() {
            return 1.0;
        }
        let a = k as f64 * self.step;
        let partial: f64 = self
            .gl
            .mapped(a, h)
            .map(|(x, w)| w * gg_pdf(x, self.alpha, self.beta).unwrap_or(0.0))
            .sum();
        (self.cdf[k] + partial).min(1.0)
    }
}

/// Unit-mean Gamma-Gamma variate as the product of two unit-mean Gamma variates.
#[derive(Debug, Clone, Copy)]
pub struct GammaGamma {
    large_scale: Gamma<f64>,
    small_scale: Gamma<f64>,
}

impl GammaGamma {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_shape(alpha, beta)?;
        let large_scale = Gamma::new(alpha, 1.0 / alpha).map_err(|e| Error::Argument(e.to_string()))?;
        let small_scale = Gamma::new(beta, 1.0 / beta).map_err(|e| Error::Argument(e.to_string()))?;
        Ok(Self {
            large_scale,
            small_scale,
        })
    }
}

impl Distribution<f64> for GammaGamma {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.large_scale.sample(rng) * self.small_scale.sample(rng)
    }
}

pub fn gg_sample(rng: &mut RngStream, alpha: f64, beta: f64) -> Result<f64> {
    Ok(GammaGamma::new(alpha, beta)?.sample(rng))
}

/// Pointing offset `(x_dev, y_dev)` with i.i.d. `N(0, σ_p²)` components.
pub fn sample_r_dev(rng: &mut RngStream, sigma_p: f64) -> Point {
    let x = sigma_p * rng.standard_normal();
    let y = sigma_p * rng.standard_normal();
    Point::new(x, y)
}

/// `μⁿ e^{-μ} / n!`.
pub fn poisson_pmf(n: u64, mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::Argument(format!("Poisson mean must be finite and >= 0 (mu={mu})")));
    }
    Ok(poisson_pmf_unchecked(n, mu))
}

pub(crate) fn poisson_pmf_unchecked(n: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n = n as f64;
    (n * mu.ln() - mu - ln_gamma(n + 1.0)).exp()
}

/// Poisson pmf for `n = 0..=n_max` by the multiplicative recurrence.
pub fn poisson_pmf_vec(mu: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    if mu <= 0.0 {
        out.push(1.0);
        out.resize(n_max + 1, 0.0);
        return out;
    }
    // start at the mode to avoid underflow of e^{-μ} for large μ
    let mode = (mu.floor() as usize).min(n_max);
    out.resize(n_max + 1, 0.0);
    out[mode] = poisson_pmf_unchecked(mode as u64, mu);
    for n in (0..mode).rev() {
        out[n] = out[n + 1] * (n + 1) as f64 / mu;
    }
    for n in mode + 1..=n_max {
        out[n] = out[n - 1] * mu / n as f64;
    }
    out
}

/// Binomial pmf for `k = 0..=k_max` (`k_max` clipped to `trials`).
pub fn binomial_pmf_vec(trials: u64, p: f64, k_max: u64) -> Vec<f64> {
    let k_max = k_max.min(trials);
    if p <= 0.0 {
        let mut out = vec![0.0; k_max as usize + 1];
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        let mut out = vec![0.0; k_max as usize + 1];
        if k_max == trials {
            out[k_max as usize] = 1.0;
        }
        return out;
    }
    // start at the mode and recur outwards; avoids underflow of (1-p)^n for large means
    let n = trials as f64;
    let mode = (((n + 1.0) * p).floor() as u64).min(k_max);
    let ln_mode = ln_gamma(n + 1.0) - ln_gamma(mode as f64 + 1.0) - ln_gamma(n - mode as f64 + 1.0)
        + mode as f64 * p.ln()
        + (n - mode as f64) * (-p).ln_1p();
    let odds = p / (1.0 - p);
    let mut out = vec![0.0; k_max as usize + 1];
    out[mode as usize] = ln_mode.exp();
    for k in (0..mode).rev() {
        let k1 = (k + 1) as f64;
        out[k as usize] = out[k as usize + 1] * k1 / ((n - k1 + 1.0) * odds);
    }
    for k in mode + 1..=k_max {
        let kf = k as f64;
        out[k as usize] = out[k as usize - 1] * (n - kf + 1.0) / kf * odds;
    }
    out
}

/// Poisson variate: sequential inversion for small means, `rand_distr` otherwise.
pub fn poisson_sample(rng: &mut RngStream, mu: f64) -> Result<u64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::Argument(format!("Poisson mean must be finite and >= 0 (mu={mu})")));
    }
    if mu == 0.0 {
        return Ok(0);
    }
    if mu < 30.0 {
        let u = rng.uniform();
        let mut n = 0u64;
        let mut p = (-mu).exp();
        let mut cdf = p;
        while u >= cdf {
            n += 1;
            p *= mu / n as f64;
            cdf += p;
            if p < 1e-300 && cdf >= 1.0 - 1e-15 {
                break;
            }
        }
        return Ok(n);
    }
    let dist = rand_distr::Poisson::new(mu).map_err(|e| Error::Argument(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// Background photon arrival time, uniform on `[-t_qb/2, t_qb/2]`.
pub fn background_arrival(rng: &mut RngStream, t_qb: f64) -> f64 {
    (rng.uniform() - 0.5) * t_qb
}
