//! Autler-Townes splitting of the red transition seen through a weak
//! Rydberg probe.
//!
//! Conventions: the red detuning is `Delta = omega_0 - omega_L` (positive for
//! a red-detuned laser) and the probe detuning `delta` is measured from the
//! undressed two-photon resonance. The dressed states of the ground and
//! intermediate levels sit at `(Delta -+ R)/2` with `R = sqrt(Delta^2 + Omega^2)`,
//! so the probe finds them at `delta = (Delta +- R)/2`. With
//! `tan 2 theta = -Omega / Delta`, the line at `(Delta + R)/2` carries ground
//! character `cos^2 theta = (1 + Delta/R)/2`, which sets its area, and decays
//! at `Gamma sin^2 theta`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{SpectralLine, Spectrum};
use crate::structure::AtomData;

/// Mean squared Clebsch-Gordan factor of the D2 line in an unpolarized cloud.
pub const MEAN_D2_COUPLING: f64 = 7.0 / 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserDrive {
    /// `I / I_s`
    pub saturation: f64,
    /// Natural linewidth of the driven transition, MHz.
    pub linewidth: f64,
    /// `omega_0 - omega_L`, MHz.
    #[serde(default)]
    pub detuning: f64,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

fn default_coupling() -> f64 {
    MEAN_D2_COUPLING
}

impl LaserDrive {
    pub fn new(saturation: f64, linewidth: f64) -> Self {
        LaserDrive { saturation, linewidth, detuning: 0.0, coupling: MEAN_D2_COUPLING }
    }

    /// Drive on the D2 line using the shipped natural linewidth.
    pub fn d2(atom: &AtomData, saturation: f64) -> Result<Self> {
        Ok(Self::new(saturation, atom.d2_linewidth()?))
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.saturation >= 0.0) || !self.saturation.is_finite() {
            return Err(Error::config(format!("intensity ratio {} must be >= 0", self.saturation)));
        }
        if !(self.linewidth > 0.0) {
            return Err(Error::config(format!("linewidth {} must be positive", self.linewidth)));
        }
        if !(self.coupling > 0.0 && self.coupling <= 1.0) {
            return Err(Error::config(format!("coupling factor {} must lie in (0, 1]", self.coupling)));
        }
        if !self.detuning.is_finite() {
            return Err(Error::config("detuning must be finite"));
        }
        Ok(())
    }
}

/// `Omega = c_g Gamma sqrt(s / 2)` in MHz.
pub fn rabi_frequency(drive: &LaserDrive) -> Result<f64> {
    drive.validate()?;
    Ok(drive.coupling * drive.linewidth * (drive.saturation / 2.0).sqrt())
}

/// The two dressed lines in probe-detuning space, `[(Delta+R)/2, (Delta-R)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedPair {
    pub centers: [f64; 2],
    /// Ground-state character, sums to 1.
    pub amplitudes: [f64; 2],
    /// Intermediate-state character, `1 - amplitude`.
    pub admixtures: [f64; 2],
}

impl DressedPair {
    pub fn splitting(&self) -> f64 {
        self.centers[0] - self.centers[1]
    }
}

pub fn dressed_lines(omega: f64, detuning: f64) -> Result<DressedPair> {
    if !(omega >= 0.0) || !detuning.is_finite() {
        return Err(Error::domain(format!("Rabi frequency {omega} must be >= 0 and detuning finite")));
    }
    let r = detuning.hypot(omega);
    if r == 0.0 {
        return Ok(DressedPair { centers: [0.0, 0.0], amplitudes: [0.5, 0.5], admixtures: [0.5, 0.5] });
    }
    let upper = 0.5 * (1.0 + detuning / r);
    let lower = 0.5 * (1.0 - detuning / r);
    Ok(DressedPair {
        centers: [0.5 * (detuning + r), 0.5 * (detuning - r)],
        amplitudes: [upper, lower],
        admixtures: [lower, upper],
    })
}

/// Weak-probe spectrum of the dressed pair. Each line's Lorentzian width is the
/// intermediate-state decay it inherits plus `probe_linewidth`; `extra_widths`
/// are Gaussian FWHMs added in quadrature.
pub fn autler_townes_spectrum(
    drive: &LaserDrive,
    grid: &[f64],
    probe_linewidth: f64,
    extra_widths: &[f64],
) -> Result<Spectrum> {
    let pair = dressed_lines(rabi_frequency(drive)?, drive.detuning)?;
    let lines = ["upper", "lower"]
        .iter()
        .enumerate()
        .map(|(k, label)| {
            SpectralLine::new(*label, pair.centers[k], pair.amplitudes[k])
                .with_lorentzian(&[drive.linewidth * pair.admixtures[k], probe_linewidth])
                .with_gaussian(extra_widths)
        })
        .collect();
    Spectrum::synthesize(grid, lines)
}

/// One row of an intensity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub saturation: f64,
    pub splitting: f64,
    /// Maxima found in the synthesized spectrum.
    pub peaks: Vec<f64>,
}

impl SweepPoint {
    pub fn resolved(&self) -> bool {
        self.peaks.len() >= 2
    }
}

/// Relative prominence a maximum needs to count as a resolved line.
pub const PEAK_PROMINENCE: f64 = 1e-3;

/// Largest grid step (MHz) for which a peak count is meaningful.
pub const MAX_PEAK_STEP: f64 = 0.2;

/// Splitting and peak count over a list of intensity ratios.
pub fn saturation_sweep(
    drive: &LaserDrive,
    saturations: &[f64],
    grid: &[f64],
    probe_linewidth: f64,
    extra_widths: &[f64],
) -> Result<Vec<SweepPoint>> {
    if grid.windows(2).any(|w| w[1] - w[0] > MAX_PEAK_STEP + 1e-12) {
        return Err(Error::config(format!("peak counting needs a grid step <= {MAX_PEAK_STEP} MHz")));
    }
    saturations
        .par_iter()
        .map(|&s| {
            let d = LaserDrive { saturation: s, ..drive.clone() };
            let pair = dressed_lines(rabi_frequency(&d)?, d.detuning)?;
            let spectrum = autler_townes_spectrum(&d, grid, probe_linewidth, extra_widths)?;
            Ok(SweepPoint { saturation: s, splitting: pair.splitting(), peaks: spectrum.peaks(PEAK_PROMINENCE) })
        })
        .collect()
}
