//! Scenario configuration and the `key = value` config file format.
//!
//! Every physical and protocol parameter of a link lives in [`SystemConfig`].
//! Values are stored in SI base units. The text format accepts optional unit
//! suffixes (`25 cm`, `1 ns`, `1550 nm`, ...) and `#` comments; keys absent
//! from a file keep their defaults, unknown keys are rejected.

use std::fmt::Write as _;

use crate::error::ConfigError;

/// Physical quantity of a config field; decides which unit suffixes are legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Length,
    Area,
    Time,
    InverseLength,
    Speed,
    StructureParameter,
    Dimensionless,
    Count,
    Flag,
}

/// Full description of one link scenario, in SI units.
///
/// Defaults reproduce the reference parameter table with `w_z = 0.5 m` and
/// `sigma_p = 0.3 m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Distance to the target array (m).
    pub l_tar: f64,
    /// Optical wavelength (m).
    pub lambda: f64,
    /// Beam waist at the target plane (m).
    pub w_z: f64,
    /// Receiver aperture radius (m).
    pub r_ap: f64,
    /// Effective area of one retroreflector (m²).
    pub a_ar: f64,
    pub n_arx: u32,
    pub n_ary: u32,
    /// Retroreflector pitch (m).
    pub d_ar: f64,
    pub n_grx: u32,
    pub n_gry: u32,
    /// Scan grid step (m).
    pub d_gr: f64,
    /// Pointing-offset standard deviation per axis (m).
    pub sigma_p: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Round-trip atmospheric attenuation. Mutually exclusive with `sigma_atm`.
    pub h_la: Option<f64>,
    /// Extinction coefficient (1/m), used to derive `h_la` when given.
    pub sigma_atm: Option<f64>,
    /// Coupling loss; `None` means `0.8 * eta_spad`.
    pub h_lc: Option<f64>,
    pub eta_spad: f64,
    /// SPAD timing jitter standard deviation (s).
    pub sigma_spad: f64,
    /// Qubit slot duration (s).
    pub t_qb: f64,
    /// Total acquisition time (s).
    pub t_aq: f64,
    /// Dwell time per grid cell (s).
    pub t_j: f64,
    /// Mean photon pairs per slot.
    pub mu_t: f64,
    /// Mean background photons per slot.
    pub mu_bg: f64,
    /// Polarization flip probability.
    pub p_pol: f64,
    /// Minimum detections needed to match sequences.
    pub n_s_min: u32,
    /// Background suppression margin.
    pub m: f64,
    /// Refractive-index structure parameter (m^-2/3).
    pub c_n2: Option<f64>,
    pub speed_of_light: f64,
    /// Range uncertainty that bounds the alignment search (m).
    pub pos_uncertainty: f64,
    /// Explicit detection threshold, overriding the `max(N_s_min, ceil(m E[N_bg]))` rule.
    pub n_t_min: Option<u32>,
    /// Hold each retroreflector's fading coefficient constant over the whole scan.
    pub fading_static_across_grid: bool,
    /// Disable turbulence fading (every coefficient is exactly 1).
    pub deterministic_fading: bool,
    /// Acquisition start time (s).
    pub t0: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            l_tar: 500.0,
            lambda: 1550e-9,
            w_z: 0.5,
            r_ap: 0.05,
            a_ar: 3e-4,
            n_arx: 8,
            n_ary: 8,
            d_ar: 0.04,
            n_grx: 10,
            n_gry: 10,
            d_gr: 0.04,
            sigma_p: 0.3,
            alpha: 3.0,
            beta: 2.0,
            h_la: None,
            sigma_atm: None,
            h_lc: None,
            eta_spad: 0.6,
            sigma_spad: 50e-12,
            t_qb: 1e-9,
            t_aq: 100e-6,
            t_j: 1e-6,
            mu_t: 0.5,
            mu_bg: 1e-4,
            p_pol: 0.1,
            n_s_min: 10,
            m: 3.0,
            c_n2: None,
            speed_of_light: 299_792_458.0,
            pos_uncertainty: 1.0,
            n_t_min: None,
            fading_static_across_grid: false,
            deterministic_fading: false,
            t0: 0.0,
        }
    }
}

/// Round-trip attenuation used when neither `h_La` nor `sigma_atm` is given.
pub const DEFAULT_H_LA: f64 = 0.7;

/// Coupling loss as a multiple of the SPAD efficiency when `h_Lc` is absent.
pub const DEFAULT_H_LC_PER_ETA: f64 = 0.8;

struct FieldSpec {
    key: &'static str,
    quantity: Quantity,
}

const FIELDS: &[FieldSpec] = &[
    FieldSpec { key: "L_tar", quantity: Quantity::Length },
    FieldSpec { key: "lambda", quantity: Quantity::Length },
    FieldSpec { key: "w_z", quantity: Quantity::Length },
    FieldSpec { key: "r_ap", quantity: Quantity::Length },
    FieldSpec { key: "A_ar", quantity: Quantity::Area },
    FieldSpec { key: "N_arx", quantity: Quantity::Count },
    FieldSpec { key: "N_ary", quantity: Quantity::Count },
    FieldSpec { key: "d_ar", quantity: Quantity::Length },
    FieldSpec { key: "N_grx", quantity: Quantity::Count },
    FieldSpec { key: "N_gry", quantity: Quantity::Count },
    FieldSpec { key: "d_gr", quantity: Quantity::Length },
    FieldSpec { key: "sigma_p", quantity: Quantity::Length },
    FieldSpec { key: "alpha", quantity: Quantity::Dimensionless },
    FieldSpec { key: "beta", quantity: Quantity::Dimensionless },
    FieldSpec { key: "h_La", quantity: Quantity::Dimensionless },
    FieldSpec { key: "sigma_atm", quantity: Quantity::InverseLength },
    FieldSpec { key: "h_Lc", quantity: Quantity::Dimensionless },
    FieldSpec { key: "eta_spad", quantity: Quantity::Dimensionless },
    FieldSpec { key: "sigma_spad", quantity: Quantity::Time },
    FieldSpec { key: "t_qb", quantity: Quantity::Time },
    FieldSpec { key: "t_aq", quantity: Quantity::Time },
    FieldSpec { key: "t_j", quantity: Quantity::Time },
    FieldSpec { key: "mu_t", quantity: Quantity::Dimensionless },
    FieldSpec { key: "mu_bg", quantity: Quantity::Dimensionless },
    FieldSpec { key: "P_pol", quantity: Quantity::Dimensionless },
    FieldSpec { key: "N_s_min", quantity: Quantity::Count },
    FieldSpec { key: "m", quantity: Quantity::Dimensionless },
    FieldSpec { key: "C_n2", quantity: Quantity::StructureParameter },
    FieldSpec { key: "speed_of_light", quantity: Quantity::Speed },
    FieldSpec { key: "pos_uncertainty", quantity: Quantity::Length },
    FieldSpec { key: "n_t_min", quantity: Quantity::Count },
    FieldSpec { key: "fading_static_across_grid", quantity: Quantity::Flag },
    FieldSpec { key: "deterministic_fading", quantity: Quantity::Flag },
    FieldSpec { key: "t0", quantity: Quantity::Time },
];

/// A parsed config value before it is assigned to a field.
#[derive(Debug, Clone, Copy)]
enum Value {
    Real(f64),
    Count(u32),
    Flag(bool),
}

fn unit_scale(quantity: Quantity, unit: &str) -> Option<f64> {
    let unit = unit.trim();
    match quantity {
        Quantity::Length => match unit {
            "" | "m" => Some(1.0),
            "km" => Some(1e3),
            "cm" => Some(1e-2),
            "mm" => Some(1e-3),
            "um" | "µm" => Some(1e-6),
            "nm" => Some(1e-9),
            _ => None,
        },
        Quantity::Area => match unit {
            "" | "m2" | "m^2" => Some(1.0),
            "cm2" | "cm^2" => Some(1e-4),
            "mm2" | "mm^2" => Some(1e-6),
            _ => None,
        },
        Quantity::Time => match unit {
            "" | "s" => Some(1.0),
            "ms" => Some(1e-3),
            "us" | "µs" => Some(1e-6),
            "ns" => Some(1e-9),
            "ps" => Some(1e-12),
            "fs" => Some(1e-15),
            _ => None,
        },
        Quantity::InverseLength => match unit {
            "" | "1/m" | "/m" => Some(1.0),
            "1/km" | "/km" => Some(1e-3),
            _ => None,
        },
        Quantity::Speed => match unit {
            "" | "m/s" => Some(1.0),
            _ => None,
        },
        Quantity::StructureParameter => match unit {
            "" | "m^-2/3" | "m^(-2/3)" => Some(1.0),
            _ => None,
        },
        Quantity::Dimensionless | Quantity::Count | Quantity::Flag => unit.is_empty().then_some(1.0),
    }
}

/// Splits `"25 cm"` / `"25cm"` / `"3e-4"` into the numeric part and the unit suffix.
fn split_number(text: &str) -> (&str, &str) {
    let text = text.trim();
    let bytes = text.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        let exponent_sign =
            (c == '+' || c == '-') && end > 0 && matches!(bytes[end - 1] as char, 'e' | 'E');
        let exponent = (c == 'e' || c == 'E')
            && end > 0
            && bytes.get(end + 1).is_some_and(|n| {
                (*n as char).is_ascii_digit() || *n == b'-' || *n == b'+'
            });
        if c.is_ascii_digit() || c == '.' || (end == 0 && (c == '-' || c == '+')) || exponent_sign || exponent {
            end += 1;
        } else {
            break;
        }
    }
    (text[..end].trim(), text[end..].trim())
}

fn parse_value(key: &str, quantity: Quantity, raw: &str) -> Result<Value, String> {
    match quantity {
        Quantity::Flag => match raw.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(Value::Flag(true)),
            "false" | "no" | "off" | "0" => Ok(Value::Flag(false)),
            other => Err(format!("{key}: expected a boolean, got `{other}`")),
        },
        Quantity::Count => {
            let (number, unit) = split_number(raw);
            if !unit.is_empty() {
                return Err(format!("{key}: counts take no unit suffix (got `{unit}`)"));
            }
            number
                .parse::<u32>()
                .map(Value::Count)
                .map_err(|_| format!("{key}: expected a non-negative integer, got `{}`", raw.trim()))
        }
        _ => {
            let (number, unit) = split_number(raw);
            let value: f64 = number
                .parse()
                .map_err(|_| format!("{key}: malformed number `{}`", raw.trim()))?;
            let scale = unit_scale(quantity, unit)
                .ok_or_else(|| format!("{key}: unit `{unit}` not valid for this quantity"))?;
            let value = value * scale;
            if !value.is_finite() {
                return Err(format!("{key}: value must be finite"));
            }
            Ok(Value::Real(value))
        }
    }
}

fn require(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

impl SystemConfig {
    /// Parses the `key = value` config format on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (index, line) in text.lines().enumerate() {
            let line_no = index + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, raw) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at_line(line_no, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let spec = FIELDS
                .iter()
                .find(|f| f.key == key)
                .ok_or_else(|| ConfigError::at_line(line_no, format!("unknown key `{key}`")))?;
            if !seen.insert(key) {
                return Err(ConfigError::at_line(line_no, format!("duplicate key `{key}`")));
            }
            let value = parse_value(key, spec.quantity, raw).map_err(|m| ConfigError::at_line(line_no, m))?;
            cfg.assign(key, value);
            cfg.check_field(key).map_err(|m| ConfigError::at_line(line_no, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets a single field from its textual form, e.g. `set("w_z", "25 cm")`.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let spec = FIELDS
            .iter()
            .find(|f| f.key == key)
            .ok_or_else(|| ConfigError::new(format!("unknown key `{key}`")))?;
        let value = parse_value(key, spec.quantity, raw).map_err(ConfigError::new)?;
        self.assign(key, value);
        self.check_field(key).map_err(ConfigError::new)
    }

    fn assign(&mut self, key: &str, value: Value) {
        let real = |v: Value| match v {
            Value::Real(x) => x,
            Value::Count(n) => f64::from(n),
            Value::Flag(b) => f64::from(u8::from(b)),
        };
        let count = |v: Value| match v {
            Value::Count(n) => n,
            _ => unreachable!("count fields parse as counts"),
        };
        let flag = |v: Value| match v {
            Value::Flag(b) => b,
            _ => unreachable!("flag fields parse as flags"),
        };
        match key {
            "L_tar" => self.l_tar = real(value),
            "lambda" => self.lambda = real(value),
            "w_z" => self.w_z = real(value),
            "r_ap" => self.r_ap = real(value),
            "A_ar" => self.a_ar = real(value),
            "N_arx" => self.n_arx = count(value),
            "N_ary" => self.n_ary = count(value),
            "d_ar" => self.d_ar = real(value),
            "N_grx" => self.n_grx = count(value),
            "N_gry" => self.n_gry = count(value),
            "d_gr" => self.d_gr = real(value),
            "sigma_p" => self.sigma_p = real(value),
            "alpha" => self.alpha = real(value),
            "beta" => self.beta = real(value),
            "h_La" => self.h_la = Some(real(value)),
            "sigma_atm" => self.sigma_atm = Some(real(value)),
            "h_Lc" => self.h_lc = Some(real(value)),
            "eta_spad" => self.eta_spad = real(value),
            "sigma_spad" => self.sigma_spad = real(value),
            "t_qb" => self.t_qb = real(value),
            "t_aq" => self.t_aq = real(value),
            "t_j" => self.t_j = real(value),
            "mu_t" => self.mu_t = real(value),
            "mu_bg" => self.mu_bg = real(value),
            "P_pol" => self.p_pol = real(value),
            "N_s_min" => self.n_s_min = count(value),
            "m" => self.m = real(value),
            "C_n2" => self.c_n2 = Some(real(value)),
            "speed_of_light" => self.speed_of_light = real(value),
            "pos_uncertainty" => self.pos_uncertainty = real(value),
            "n_t_min" => self.n_t_min = Some(count(value)),
            "fading_static_across_grid" => self.fading_static_across_grid = flag(value),
            "deterministic_fading" => self.deterministic_fading = flag(value),
            "t0" => self.t0 = real(value),
            _ => unreachable!("key validated against FIELDS"),
        }
    }

    /// Single-field invariants, reported against the line that set them.
    fn check_field(&self, key: &str) -> Result<(), String> {
        let positive = |name: &str, v: f64| require(v > 0.0, || format!("{name} must be > 0 (got {v})"));
        let probability =
            |name: &str, v: f64| require((0.0..=1.0).contains(&v), || format!("{name} must lie in [0, 1] (got {v})"));
        let non_negative = |name: &str, v: f64| require(v >= 0.0, || format!("{name} must be >= 0 (got {v})"));
        match key {
            "L_tar" => positive(key, self.l_tar),
            "lambda" => positive(key, self.lambda),
            "w_z" => positive(key, self.w_z),
            "r_ap" => positive(key, self.r_ap),
            "A_ar" => positive(key, self.a_ar),
            "N_arx" => require(self.n_arx >= 1, || "N_arx must be >= 1".into()),
            "N_ary" => require(self.n_ary >= 1, || "N_ary must be >= 1".into()),
            "d_ar" => positive(key, self.d_ar),
            "N_grx" => require(self.n_grx >= 1, || "N_grx must be >= 1".into()),
            "N_gry" => require(self.n_gry >= 1, || "N_gry must be >= 1".into()),
            "d_gr" => positive(key, self.d_gr),
            "sigma_p" => non_negative(key, self.sigma_p),
            "alpha" => positive(key, self.alpha),
            "beta" => positive(key, self.beta),
            "h_La" => {
                let v = self.h_la.unwrap_or(DEFAULT_H_LA);
                require(v > 0.0 && v <= 1.0, || format!("h_La must lie in (0, 1] (got {v})"))
            }
            "sigma_atm" => non_negative(key, self.sigma_atm.unwrap_or(0.0)),
            "h_Lc" => {
                let v = self.h_lc.unwrap_or(0.0);
                require(v > 0.0 && v <= 1.0, || format!("h_Lc must lie in (0, 1] (got {v})"))
            }
            "eta_spad" => require(self.eta_spad > 0.0 && self.eta_spad <= 1.0, || {
                format!("eta_spad must lie in (0, 1] (got {})", self.eta_spad)
            }),
            "sigma_spad" => non_negative(key, self.sigma_spad),
            "t_qb" => positive(key, self.t_qb),
            "t_aq" => positive(key, self.t_aq),
            "t_j" => positive(key, self.t_j),
            "mu_t" => positive(key, self.mu_t),
            "mu_bg" => non_negative(key, self.mu_bg),
            "P_pol" => probability(key, self.p_pol),
            "N_s_min" => Ok(()),
            "m" => non_negative(key, self.m),
            "C_n2" => positive(key, self.c_n2.unwrap_or(0.0)),
            "speed_of_light" => positive(key, self.speed_of_light),
            "pos_uncertainty" => non_negative(key, self.pos_uncertainty),
            _ => Ok(()),
        }
    }

    /// Checks every invariant, single-field and cross-field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for spec in FIELDS {
            let applicable = match spec.key {
                "h_La" => self.h_la.is_some(),
                "sigma_atm" => self.sigma_atm.is_some(),
                "h_Lc" => self.h_lc.is_some(),
                "C_n2" => self.c_n2.is_some(),
                _ => true,
            };
            if applicable {
                self.check_field(spec.key).map_err(ConfigError::new)?;
            }
        }
        if self.h_la.is_some() && self.sigma_atm.is_some() {
            return Err(ConfigError::new("h_La and sigma_atm are mutually exclusive"));
        }
        let n_gr = f64::from(self.n_grx) * f64::from(self.n_gry);
        if (self.t_aq - n_gr * self.t_j).abs() > self.t_qb {
            return Err(ConfigError::new(format!(
                "inconsistent timing: t_aq = {} s but N_gr * t_j = {} s",
                self.t_aq,
                n_gr * self.t_j
            )));
        }
        let l_seq = self.t_aq / self.t_qb;
        if (l_seq - l_seq.round()).abs() > 1e-6 * l_seq.max(1.0) || l_seq.round() < 1.0 {
            return Err(ConfigError::new(format!("t_aq / t_qb = {l_seq} is not a positive integer")));
        }
        let l_seq = l_seq.round() as u64;
        if !l_seq.is_multiple_of(u64::from(self.n_grx) * u64::from(self.n_gry)) {
            return Err(ConfigError::new(format!(
                "L_seq = {l_seq} is not divisible by N_gr = {n_gr}; L_sv must be an integer"
            )));
        }
        if self.d_ar <= self.a_ar.sqrt() {
            return Err(ConfigError::new(format!(
                "d_ar = {} m must exceed the retroreflector side sqrt(A_ar) = {} m",
                self.d_ar,
                self.a_ar.sqrt()
            )));
        }
        if let Some(c_n2) = self.c_n2 {
            let r0 = crate::geometry::coherence_length(self.lambda, c_n2, self.l_tar);
            if self.d_ar <= r0 {
                return Err(ConfigError::new(format!(
                    "d_ar = {} m must exceed the coherence length r0 = {r0} m for independent fading",
                    self.d_ar
                )));
            }
        }
        Ok(())
    }

    /// Side length of the retroreflector array when it is square.
    pub fn n_ar_side(&self) -> Option<u32> {
        (self.n_arx == self.n_ary).then_some(self.n_arx)
    }

    /// Renders the config in the text format accepted by [`SystemConfig::parse`].
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        line("L_tar", format!("{}", self.l_tar));
        line("lambda", format!("{}", self.lambda));
        line("w_z", format!("{}", self.w_z));
        line("r_ap", format!("{}", self.r_ap));
        line("A_ar", format!("{}", self.a_ar));
        line("N_arx", format!("{}", self.n_arx));
        line("N_ary", format!("{}", self.n_ary));
        line("d_ar", format!("{}", self.d_ar));
        line("N_grx", format!("{}", self.n_grx));
        line("N_gry", format!("{}", self.n_gry));
        line("d_gr", format!("{}", self.d_gr));
        line("sigma_p", format!("{}", self.sigma_p));
        line("alpha", format!("{}", self.alpha));
        line("beta", format!("{}", self.beta));
        if let Some(v) = self.h_la {
            line("h_La", format!("{v}"));
        }
        if let Some(v) = self.sigma_atm {
            line("sigma_atm", format!("{v}"));
        }
        if let Some(v) = self.h_lc {
            line("h_Lc", format!("{v}"));
        }
        line("eta_spad", format!("{}", self.eta_spad));
        line("sigma_spad", format!("{}", self.sigma_spad));
        line("t_qb", format!("{}", self.t_qb));
        line("t_aq", format!("{}", self.t_aq));
        line("t_j", format!("{}", self.t_j));
        line("mu_t", format!("{}", self.mu_t));
        line("mu_bg", format!("{}", self.mu_bg));
        line("P_pol", format!("{}", self.p_pol));
        line("N_s_min", format!("{}", self.n_s_min));
        line("m", format!("{}", self.m));
        if let Some(v) = self.c_n2 {
            line("C_n2", format!("{v}"));
        }
        line("speed_of_light", format!("{}", self.speed_of_light));
        line("pos_uncertainty", format!("{}", self.pos_uncertainty));
        if let Some(v) = self.n_t_min {
            line("n_t_min", format!("{v}"));
        }
        line("fading_static_across_grid", format!("{}", self.fading_static_across_grid));
        line("deterministic_fading", format!("{}", self.deterministic_fading));
        line("t0", format!("{}", self.t0));
        out
    }
}

impl std::str::FromStr for SystemConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
