//! Retroreflector array and scan grid geometry, plus the deterministic link constants.

use std::f64::consts::PI;

use crate::config::{SystemConfig, DEFAULT_H_LA, DEFAULT_H_LC_PER_ETA};
use crate::error::Result;

/// A point in the target plane (m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Deterministic constants derived from a [`SystemConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants {
    pub n_ar: usize,
    pub n_gr: usize,
    /// Slots in one acquisition.
    pub l_seq: usize,
    /// Slots per grid cell.
    pub l_sv: usize,
    /// Probability that a slot carries exactly one photon pair.
    pub lambda_slot: f64,
    /// Expected valid slots per grid cell.
    pub lambda_grid: f64,
    /// Expected valid slots per acquisition.
    pub lambda_total: f64,
    pub h_la: f64,
    pub h_lc: f64,
    /// Aperture capture probability of the reflected photon.
    pub p_ap: f64,
    /// Deterministic scalar of the reception probability.
    pub c0: f64,
    /// Gamma-Gamma variance `1/α + 1/β + 1/(αβ)`.
    pub c_ab: f64,
    /// Variance of the fading coefficient actually simulated (0 when fading is disabled).
    pub fading_variance: f64,
    /// Diffraction divergence of the returned beam (rad).
    pub theta_dev: f64,
    /// Returned-beam waist at the receiver (m).
    pub w_z2: f64,
    pub r0: Option<f64>,
    /// True round-trip delay (s).
    pub t_ch_true: f64,
    /// Half-width of the alignment search (slots).
    pub delta_n_max: usize,
    /// Qubit rate `1 / t_qb` (Hz).
    pub r_qb: f64,
    /// Expected background detections per acquisition.
    pub mean_background: f64,
}

/// Computes every derived constant of a scenario.
pub fn derive_constants(cfg: &SystemConfig) -> Result<DerivedConstants> {
    cfg.validate()?;
    let n_ar = cfg.n_arx as usize * cfg.n_ary as usize;
    let n_gr = cfg.n_grx as usize * cfg.n_gry as usize;
    let l_seq = (cfg.t_aq / cfg.t_qb).round() as usize;
    let l_sv = l_seq / n_gr;

    let lambda_slot = cfg.mu_t * (-cfg.mu_t).exp();
    let lambda_grid = l_sv as f64 * lambda_slot;
    let lambda_total = n_gr as f64 * lambda_grid;

    let h_la = match (cfg.h_la, cfg.sigma_atm) {
        (Some(h), _) => h,
        (None, Some(sigma)) => (-sigma * 2.0 * cfg.l_tar).exp(),
        (None, None) => DEFAULT_H_LA,
    };
    let h_lc = cfg.h_lc.unwrap_or(DEFAULT_H_LC_PER_ETA * cfg.eta_spad);
    let p_ap = aperture_capture_probability(cfg.a_ar, cfg.r_ap, cfg.lambda, cfg.l_tar);
    let c0 = 2.0 * cfg.a_ar / (PI * cfg.w_z * cfg.w_z) * h_la * h_lc * p_ap;
    let c_ab = gamma_gamma_variance(cfg.alpha, cfg.beta);

    let theta_dev = cfg.lambda / cfg.a_ar.sqrt();
    let t_ch_true = 2.0 * cfg.l_tar / cfg.speed_of_light;
    let max_misalignment = 2.0 * cfg.pos_uncertainty / cfg.speed_of_light / cfg.t_qb;
    // tolerate rounding on exact multiples
    let delta_n_max = (max_misalignment - 1e-9).ceil().max(0.0) as usize;

    Ok(DerivedConstants {
        n_ar,
        n_gr,
        l_seq,
        l_sv,
        lambda_slot,
        lambda_grid,
        lambda_total,
        h_la,
        h_lc,
        p_ap,
        c0,
        c_ab,
        fading_variance: if cfg.deterministic_fading { 0.0 } else { c_ab },
        theta_dev,
        w_z2: cfg.l_tar * theta_dev,
        r0: cfg.c_n2.map(|c| coherence_length(cfg.lambda, c, cfg.l_tar)),
        t_ch_true,
        delta_n_max,
        r_qb: 1.0 / cfg.t_qb,
        mean_background: lambda_total * cfg.mu_bg * (-cfg.mu_bg).exp(),
    })
}

/// `1 - exp(-2 A r_ap² / (λ² L²))`: the diffracted return beam captured by the aperture.
pub fn aperture_capture_probability(a_ar: f64, r_ap: f64, lambda: f64, l_tar: f64) -> f64 {
    -(-2.0 * a_ar * r_ap * r_ap / (lambda * lambda * l_tar * l_tar)).exp_m1()
}

pub fn gamma_gamma_variance(alpha: f64, beta: f64) -> f64 {
    1.0 / alpha + 1.0 / beta + 1.0 / (alpha * beta)
}

/// Turbulence coherence length `r0 = [0.423 k² C_n² L]^(-3/5)` with `k = 2π/λ`.
pub fn coherence_length(lambda: f64, c_n2: f64, l_tar: f64) -> f64 {
    let k = 2.0 * PI / lambda;
    (0.423 * k * k * c_n2 * l_tar).powf(-0.6)
}

/// Retroreflector centers, row-major with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CcrArrayGeometry {
    pub positions: Vec<Point>,
}

pub fn ccr_positions(cfg: &SystemConfig) -> CcrArrayGeometry {
    let nx = cfg.n_arx as usize;
    let ny = cfg.n_ary as usize;
    let half_x = (nx as f64 - 1.0) / 2.0;
    let half_y = (ny as f64 - 1.0) / 2.0;
    let positions = (0..ny)
        .flat_map(|iy| {
            (0..nx).map(move |ix| Point::new((ix as f64 - half_x) * cfg.d_ar, (iy as f64 - half_y) * cfg.d_ar))
        })
        .collect();
    CcrArrayGeometry { positions }
}

impl CcrArrayGeometry {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn centroid(&self) -> Point {
        let n = self.positions.len() as f64;
        let sum = self.positions.iter().fold(Point::ORIGIN, |acc, &p| acc + p);
        Point::new(sum.x / n, sum.y / n)
    }
}

/// Ideal scan-cell offsets relative to the coarse target estimate.
///
/// Cells are indexed `j = (j_y - 1) * N_grx + j_x - 1` (0-based here), so
/// consecutive indices walk along x first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub n_grx: usize,
    pub n_gry: usize,
    pub offsets: Vec<Point>,
}

pub fn grid_offsets(cfg: &SystemConfig) -> ScanGrid {
    let nx = cfg.n_grx as usize;
    let ny = cfg.n_gry as usize;
    let cx = (nx as f64 + 1.0) / 2.0;
    let cy = (ny as f64 + 1.0) / 2.0;
    let offsets = (1..=ny)
        .flat_map(|jy| (1..=nx).map(move |jx| Point::new((jx as f64 - cx) * cfg.d_gr, (jy as f64 - cy) * cfg.d_gr)))
        .collect();
    ScanGrid {
        n_grx: nx,
        n_gry: ny,
        offsets,
    }
}

impl ScanGrid {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// 0-based index of 1-based cell coordinates `(j_x, j_y)`.
    pub fn index(&self, jx: usize, jy: usize) -> usize {
        assert!((1..=self.n_grx).contains(&jx) && (1..=self.n_gry).contains(&jy), "cell out of range");
        (jy - 1) * self.n_grx + (jx - 1)
    }

    pub fn offset(&self, jx: usize, jy: usize) -> Point {
        self.offsets[self.index(jx, jy)]
    }

    /// The cell nearest the grid center (lower-left of the four central cells for even sizes).
    pub fn central_index(&self) -> usize {
        self.index(self.n_grx.div_ceil(2), self.n_gry.div_ceil(2))
    }
}

/// A validated configuration together with its derived constants and geometry.
///
/// Everything downstream takes a `&Scenario`; it is immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: SystemConfig,
    pub derived: DerivedConstants,
    pub ccr: CcrArrayGeometry,
    pub grid: ScanGrid,
}

impl Scenario {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        let derived = derive_constants(&cfg)?;
        let ccr = ccr_positions(&cfg);
        let grid = grid_offsets(&cfg);
        Ok(Self {
            cfg,
            derived,
            ccr,
            grid,
        })
    }

    /// Integer slot shift of the receiver sequence that alignment has to recover.
    ///
    /// The whole-slot part of the round-trip delay, reduced into `[0, delta_n_max]`;
    /// the coarse remainder is treated as known from the initial range estimate.
    pub fn shift_true(&self) -> usize {
        let nominal = (self.derived.t_ch_true / self.cfg.t_qb).round() as usize;
        nominal % (self.derived.delta_n_max + 1)
    }

    /// Grid cell that slot `slot` belongs to.
    pub fn grid_index_of_slot(&self, slot: usize) -> usize {
        slot / self.derived.l_sv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sequence_lengths() {
        let d = derive_constants(&SystemConfig::default()).unwrap();
        assert_eq!(d.l_seq, 100_000);
        assert_eq!(d.l_sv, 1_000);
        assert_eq!(d.n_ar, 64);
        assert_eq!(d.n_gr, 100);
        assert_eq!(d.lambda_total, d.n_gr as f64 * d.lambda_grid);
    }

    #[test]
    fn alignment_half_width() {
        let mut cfg = SystemConfig::default();
        cfg.speed_of_light = 3e8;
        assert_eq!(derive_constants(&cfg).unwrap().delta_n_max, 7);
        // 2 m / c * 1 GHz = 6.67 with the exact speed of light too
        assert_eq!(derive_constants(&SystemConfig::default()).unwrap().delta_n_max, 7);
        cfg.pos_uncertainty = 1.5;
        assert_eq!(derive_constants(&cfg).unwrap().delta_n_max, 10);
    }

    #[test]
    fn gamma_gamma_variance_value() {
        assert!((gamma_gamma_variance(3.0, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn aperture_capture_value() {
        // 2 * 3e-4 * 0.05^2 / (1550e-9 * 500)^2 = 2.4974...
        let p = aperture_capture_probability(3e-4, 0.05, 1550e-9, 500.0);
        assert!((p - 0.917_701_182_797_641_8).abs() < 1e-12, "{p}");
    }

    #[test]
    fn c0_matches_hand_evaluation() {
        let mut cfg = SystemConfig::default();
        cfg.w_z = 0.25;
        let d = derive_constants(&cfg).unwrap();
        let expected = 2.0 * 3e-4 / (PI * 0.0625) * 0.7 * 0.48 * d.p_ap;
        assert!((d.c0 - expected).abs() < 1e-18);
        assert!((d.c0 - 9.42e-4).abs() < 0.005e-4, "{}", d.c0);
    }

    #[test]
    fn attenuation_from_extinction() {
        let mut cfg = SystemConfig::default();
        cfg.sigma_atm = Some(1e-4);
        let d = derive_constants(&cfg).unwrap();
        assert!((d.h_la - (-0.1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn coherence_length_values() {
        assert!((coherence_length(1550e-9, 1e-13, 500.0) - 0.029_881_058_154_643_83).abs() < 1e-12);
        assert!((coherence_length(1550e-9, 1e-15, 500.0) - 0.473_582_856_528_296_46).abs() < 1e-12);
        let base = coherence_length(1550e-9, 1e-14, 500.0);
        let scaled = coherence_length(1550e-9, 1e-14 * 2f64.powf(5.0 / 3.0), 500.0);
        assert!((scaled / base - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_element_array_is_at_origin() {
        let mut cfg = SystemConfig::default();
        cfg.n_arx = 1;
        cfg.n_ary = 1;
        assert_eq!(ccr_positions(&cfg).positions, vec![Point::ORIGIN]);
    }

    #[test]
    fn two_element_array_is_symmetric() {
        let mut cfg = SystemConfig::default();
        cfg.n_arx = 2;
        cfg.n_ary = 1;
        let p = ccr_positions(&cfg).positions;
        assert_eq!(p, vec![Point::new(-0.02, 0.0), Point::new(0.02, 0.0)]);
    }

    #[test]
    fn default_array_extent() {
        let geo = ccr_positions(&SystemConfig::default());
        assert_eq!(geo.len(), 64);
        let max_x = geo.positions.iter().map(|p| p.x).fold(f64::MIN, f64::max);
        let min_y = geo.positions.iter().map(|p| p.y).fold(f64::MAX, f64::min);
        assert!((max_x - 3.5 * 0.04).abs() < 1e-15);
        assert!((min_y + 3.5 * 0.04).abs() < 1e-15);
        assert!(geo.centroid().norm() < 1e-15);
    }

    #[test]
    fn grid_offset_values() {
        let mut cfg = SystemConfig::default();
        cfg.n_grx = 3;
        cfg.n_gry = 3;
        assert_eq!(grid_offsets(&cfg).offset(2, 2), Point::ORIGIN);
        let grid = grid_offsets(&SystemConfig::default());
        assert!((grid.offset(1, 4).x + 0.18).abs() < 1e-15);
        assert_eq!(grid.index(3, 2), 12);
    }

    #[test]
    fn shift_true_is_within_search_window() {
        let scn = Scenario::new(SystemConfig::default()).unwrap();
        assert!(scn.shift_true() <= scn.derived.delta_n_max);
        let mut cfg = SystemConfig::default();
        cfg.speed_of_light = 3e8;
        // 3333 slots mod 8
        assert_eq!(Scenario::new(cfg).unwrap().shift_true(), 5);
    }
}
