//! Special functions and quadrature rules used by the analytic models.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use statrs::function::gamma::ln_gamma;

/// Taylor coefficients of `1/Γ(z) = Σ c_k z^k`, starting at `c_1`.
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// `1/Γ(1+x)` for `|x| <= 1/2`.
fn recip_gamma_1p(x: f64) -> f64 {
    // 1/Γ(1+x) = Σ_{k>=0} c_{k+1} x^k
    RECIP_GAMMA.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Temme's auxiliary functions: `(Γ₁, Γ₂, 1/Γ(1+x), 1/Γ(1-x))` for `|x| <= 1/2`.
fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    let gampl = recip_gamma_1p(x);
    let gammi = recip_gamma_1p(-x);
    // Γ₁ = (1/Γ(1-x) - 1/Γ(1+x)) / 2x, from the odd coefficients to avoid cancellation.
    let mut gam1 = 0.0;
    let mut power = 1.0;
    for k in (1..RECIP_GAMMA.len()).step_by(2) {
        gam1 -= RECIP_GAMMA[k] * power;
        power *= x * x;
    }
    let gam2 = 0.5 * (gammi + gampl);
    (gam1, gam2, gampl, gammi)
}

const BESSEL_EPS: f64 = 1e-16;
const BESSEL_MAX_ITER: usize = 10_000;

/// `e^x K_ν(x)`, the exponentially scaled modified Bessel function of the second kind.
///
/// Temme's series for `x < 2`, Steed's continued fraction otherwise, then forward
/// recurrence from the reduced order `|μ| <= 1/2` up to `ν`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() || x <= 0.0 {
        return Err(Error::Argument(format!("bessel_k requires finite nu and x > 0 (nu={nu}, x={x})")));
    }
    let nu = nu.abs();
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let (mut rkmu, mut rk1) = if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < 1e-300 { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < 1e-300 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..=BESSEL_MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * BESSEL_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("bessel_k series did not converge (nu={nu}, x={x})")));
        }
        let scale = x.exp();
        (sum * scale, sum1 * xi2 * scale)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..=BESSEL_MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < BESSEL_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "bessel_k continued fraction did not converge (nu={nu}, x={x})"
            )));
        }
        h *= a1;
        let rkmu = (PI / (2.0 * x)).sqrt() / s;
        let rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
        (rkmu, rk1)
    };

    for i in 1..=nl {
        let next = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = next;
    }
    Ok(rkmu)
}

/// `K_ν(x)` for real order `ν` and `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

/// `ln K_ν(x)`, finite even where `K_ν(x)` underflows.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)?.ln() - x)
}

pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
                }
                pp = nf * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS7_WEIGHTS[3];
    for k in 0..7 {
        let dx = half * KRONROD_NODES[k];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += KRONROD_WEIGHTS[k] * pair;
        if k % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[k / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration on a finite interval.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_INTERVALS: usize = 20_000;
    let (first, err) = gauss_kronrod_15(a, b, &mut f);
    let mut intervals = vec![(a, b, first, err)];
    let mut total = first;
    let mut total_err = err;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "adaptive quadrature on [{a}, {b}] did not converge (estimated error {total_err:e})"
            )));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one interval");
        let (lo, hi, value, error) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = gauss_kronrod_15(lo, mid, &mut f);
        let (right, right_err) = gauss_kronrod_15(mid, hi, &mut f);
        total += left + right - value;
        total_err += left_err + right_err - error;
        intervals.push((lo, mid, left, left_err));
        intervals.push((mid, hi, right, right_err));
    }
    // re-sum to shed accumulated update rounding
    Ok(intervals.iter().map(|iv| iv.2).sum())
}

/// Integral over `[a, ∞)` via the substitution `x = a + t / (1 - t)`.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    integrate_adaptive(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}
