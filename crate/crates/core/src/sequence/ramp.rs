use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::AU_FIELD_V_PER_CM;

/// Which levels of the normalized step response define the rise time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RiseConvention {
    /// 10% to 90% of the final value.
    #[default]
    TenNinety,
    /// Start of the ramp to 90%.
    ZeroNinety,
    /// Start of the ramp to `1 - 1/e`.
    TimeConstant,
}

impl RiseConvention {
    fn levels(self) -> (f64, f64) {
        match self {
            RiseConvention::TenNinety => (0.1, 0.9),
            RiseConvention::ZeroNinety => (0.0, 0.9),
            RiseConvention::TimeConstant => (0.0, 1.0 - (-1.0f64).exp()),
        }
    }
}

/// Butterworth damping of a second-order low pass.
pub const BUTTERWORTH_DAMPING: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Field-ionization pulse shaped by a second-order low pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRamp {
    /// V/cm
    #[serde(default = "default_target")]
    pub target: f64,
    /// us, under `convention`.
    #[serde(default = "default_rise")]
    pub rise_time: f64,
    /// 1 is critical, below 1 rings, above 1 is sluggish.
    #[serde(default = "default_damping")]
    pub damping: f64,
    /// Delay between trigger (t = 0) and the start of the ramp, us.
    #[serde(default)]
    pub switch_delay: f64,
    #[serde(default)]
    pub convention: RiseConvention,
}

fn default_target() -> f64 {
    300.0
}

fn default_rise() -> f64 {
    55.0
}

fn default_damping() -> f64 {
    BUTTERWORTH_DAMPING
}

impl Default for FieldRamp {
    fn default() -> Self {
        FieldRamp {
            target: default_target(),
            rise_time: default_rise(),
            damping: default_damping(),
            switch_delay: 0.0,
            convention: RiseConvention::default(),
        }
    }
}

/// Normalized unit-step response at dimensionless time `tau = omega_n t`.
fn step_response(tau: f64, zeta: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    if (zeta - 1.0).abs() < 1e-9 {
        return 1.0 - (-tau).exp() * (1.0 + tau);
    }
    if zeta < 1.0 {
        let wd = (1.0 - zeta * zeta).sqrt();
        1.0 - (-zeta * tau).exp() * ((wd * tau).cos() + zeta / wd * (wd * tau).sin())
    } else {
        let r = (zeta * zeta - 1.0).sqrt();
        let (s1, s2) = (-(zeta - r), -(zeta + r));
        1.0 - (s2 * (s1 * tau).exp() - s1 * (s2 * tau).exp()) / (s2 - s1)
    }
}

/// Rising edge `[0, tau_peak]` on which the response is monotone, and its top.
fn rising_edge(zeta: f64) -> (f64, f64) {
    if zeta < 1.0 {
        let tp = std::f64::consts::PI / (1.0 - zeta * zeta).sqrt();
        (tp, step_response(tp, zeta))
    } else {
        (f64::INFINITY, 1.0)
    }
}

/// First `tau` at which the normalized response reaches `level`.
fn first_crossing(level: f64, zeta: f64) -> Option<f64> {
    if level <= 0.0 {
        return Some(0.0);
    }
    let (edge, top) = rising_edge(zeta);
    if level >= top {
        return None;
    }
    let mut hi = if edge.is_finite() { edge } else { 1.0 };
    while step_response(hi, zeta) < level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step_response(mid, zeta) < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

impl FieldRamp {
    pub fn validate(&self) -> Result<()> {
        if !(self.target > 0.0 && self.target.is_finite()) {
            return Err(Error::config(format!("ramp target {} V/cm must be positive", self.target)));
        }
        if !(self.rise_time > 0.0 && self.rise_time.is_finite()) {
            return Err(Error::config(format!("rise time {} us must be positive", self.rise_time)));
        }
        if !(self.damping > 0.0 && self.damping.is_finite()) {
            return Err(Error::config(format!("damping {} must be positive", self.damping)));
        }
        if !(self.switch_delay >= 0.0) {
            return Err(Error::config("switch delay must be >= 0"));
        }
        Ok(())
    }

    /// Undamped natural angular frequency in rad/us that gives `rise_time`.
    pub fn natural_frequency(&self) -> f64 {
        let (a, b) = self.convention.levels();
        let span = first_crossing(b, self.damping).unwrap_or(f64::NAN) - first_crossing(a, self.damping).unwrap_or(0.0);
        span / self.rise_time
    }

    /// Field in V/cm at `t` us after the trigger.
    pub fn field(&self, t: f64) -> f64 {
        self.target * step_response(self.natural_frequency() * (t - self.switch_delay), self.damping)
    }

    /// Largest field the ramp ever reaches.
    pub fn peak_field(&self) -> f64 {
        self.target * rising_edge(self.damping).1
    }

    /// First time (us after the trigger) at which the field reaches `level`.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        first_crossing(level / self.target, self.damping).map(|tau| self.switch_delay + tau / self.natural_frequency())
    }
}

/// `field_ramp(t, ramp)`; 0 before the switch.
pub fn field_ramp(t: f64, ramp: &FieldRamp) -> f64 {
    ramp.field(t)
}

/// Classical saddle-point ionization field `1 / (16 n*^4)` a.u. in V/cm.
pub fn ionization_threshold(n_star: f64) -> Result<f64> {
    if !(n_star > 0.0) {
        return Err(Error::domain(format!("effective quantum number {n_star} must be positive")));
    }
    Ok(AU_FIELD_V_PER_CM / (16.0 * n_star.powi(4)))
}
