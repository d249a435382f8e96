use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MCP efficiency from steady-state MOT depletion under photo-ionization.
///
/// The MOT number follows `dN/dt = L - N/tau - R`; switching on a constant
/// ionization rate `R` moves it from `L tau` to `(L - R) tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpCalibration {
    /// Atoms before ionization, `L tau`.
    pub unperturbed: f64,
    /// Atoms once the new steady state is reached, `(L - R) tau`.
    pub steady_state: f64,
    /// `R tau`
    pub depletion: f64,
    /// Atoms per signal unit, `R / signal`.
    pub atoms_per_signal: f64,
    /// MOT lifetime, s.
    pub lifetime: f64,
}

impl McpCalibration {
    /// Time (s) for the depletion to reach `fraction` of its final value.
    pub fn settle_time(&self, fraction: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::domain(format!("settling fraction {fraction} must lie in [0, 1)")));
        }
        Ok(-self.lifetime * (1.0 - fraction).ln())
    }

    /// Atom number `t` seconds after the ionization starts.
    pub fn atoms_at(&self, t: f64) -> f64 {
        self.steady_state + self.depletion * (-t / self.lifetime).exp()
    }
}

/// `loading` and `ionization` in atoms/s, `lifetime` in s, `signal` in
/// signal units per s.
pub fn mcp_calibration(loading: f64, lifetime: f64, ionization: f64, signal: f64) -> Result<McpCalibration> {
    if !(loading > 0.0) || !(lifetime > 0.0) || !loading.is_finite() || !lifetime.is_finite() {
        return Err(Error::config("loading rate and MOT lifetime must be positive"));
    }
    if !(ionization >= 0.0) || !(signal >= 0.0) {
        return Err(Error::config("ionization rate and signal must be non-negative"));
    }
    if ionization == 0.0 || signal == 0.0 {
        return Err(Error::domain("no ionization signal: the calibration is undefined"));
    }
    if ionization >= loading {
        return Err(Error::MotExtinction { rate: ionization, loading });
    }
    Ok(McpCalibration {
        unperturbed: loading * lifetime,
        steady_state: (loading - ionization) * lifetime,
        depletion: ionization * lifetime,
        atoms_per_signal: ionization / signal,
        lifetime,
    })
}
