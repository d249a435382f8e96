use serde::{Deserialize, Serialize};

use super::profile::{find_peaks, integrate, line_profile};
use crate::error::{Error, Result};
use crate::format::g9;

/// Smallest number of sub-lines used to sample a top-hat distribution.
const MIN_TOPHAT_SAMPLES: usize = 9;

/// One spectral component and its width budget (all MHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub label: String,
    pub center: f64,
    pub strength: f64,
    /// Combined Gaussian FWHM.
    pub gaussian_fwhm: f64,
    /// Combined Lorentzian FWHM.
    pub lorentzian_fwhm: f64,
    /// Full width of a uniform spread of centers (field inhomogeneity).
    #[serde(default)]
    pub tophat_width: f64,
}

impl SpectralLine {
    pub fn new(label: impl Into<String>, center: f64, strength: f64) -> Self {
        SpectralLine {
            label: label.into(),
            center,
            strength,
            gaussian_fwhm: 0.0,
            lorentzian_fwhm: 0.0,
            tophat_width: 0.0,
        }
    }

    /// Add Gaussian components in quadrature.
    pub fn with_gaussian(mut self, widths: &[f64]) -> Self {
        let sum: f64 = widths.iter().map(|w| w * w).sum::<f64>() + self.gaussian_fwhm.powi(2);
        self.gaussian_fwhm = sum.sqrt();
        self
    }

    /// Add Lorentzian components (their FWHMs add linearly).
    pub fn with_lorentzian(mut self, widths: &[f64]) -> Self {
        self.lorentzian_fwhm += widths.iter().sum::<f64>();
        self
    }

    pub fn with_tophat(mut self, width: f64) -> Self {
        self.tophat_width = width;
        self
    }

    fn sample(&self, grid: &[f64]) -> Result<Vec<f64>> {
        if !(self.tophat_width > 0.0) {
            return line_profile(grid, self.center, self.strength, self.lorentzian_fwhm, self.gaussian_fwhm);
        }
        let step = grid[1] - grid[0];
        let finest = [self.gaussian_fwhm, self.lorentzian_fwhm, step]
            .into_iter()
            .filter(|w| *w > 0.0)
            .fold(f64::MAX, f64::min);
        let count = ((4.0 * self.tophat_width / finest).ceil() as usize).max(MIN_TOPHAT_SAMPLES) | 1;
        let mut out = vec![0.0; grid.len()];
        for k in 0..count {
            let offset = self.tophat_width * ((k as f64 + 0.5) / count as f64 - 0.5);
            let sub = line_profile(
                grid,
                self.center + offset,
                self.strength / count as f64,
                self.lorentzian_fwhm,
                self.gaussian_fwhm,
            )?;
            for (o, s) in out.iter_mut().zip(sub) {
                *o += s;
            }
        }
        Ok(out)
    }
}

/// Intensity against probe detuning with its per-line decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub detuning: Vec<f64>,
    pub intensity: Vec<f64>,
    pub lines: Vec<SpectralLine>,
    /// `[line][sample]`, same order as `lines`.
    pub contributions: Vec<Vec<f64>>,
    /// Lines whose centers fall outside the grid and were left out.
    pub excluded: Vec<String>,
    /// Multiplies intensities (atoms per signal unit from an MCP calibration).
    pub scale: f64,
}

impl Spectrum {
    /// Sum of line profiles on `grid`. Each line is normalized on the grid so
    /// the integral of the spectrum equals the total included strength.
    pub fn synthesize(grid: &[f64], lines: Vec<SpectralLine>) -> Result<Self> {
        if grid.len() < 2 || grid[grid.len() - 1] <= grid[0] {
            return Err(Error::domain("spectrum grid has zero span"));
        }
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        let mut kept = Vec::new();
        let mut excluded = Vec::new();
        for line in lines {
            if !(line.strength >= 0.0) {
                return Err(Error::domain(format!("line {} has negative strength", line.label)));
            }
            if line.center < lo || line.center > hi {
                excluded.push(line.label);
            } else {
                kept.push(line);
            }
        }
        let contributions: Vec<Vec<f64>> = kept.iter().map(|l| l.sample(grid)).collect::<Result<_>>()?;
        let mut intensity = vec![0.0; grid.len()];
        for c in &contributions {
            for (i, v) in intensity.iter_mut().zip(c) {
                *i += v;
            }
        }
        Ok(Spectrum {
            detuning: grid.to_vec(),
            intensity,
            lines: kept,
            contributions,
            excluded,
            scale: 1.0,
        })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        let ratio = scale / self.scale;
        for v in self.intensity.iter_mut().chain(self.contributions.iter_mut().flatten()) {
            *v *= ratio;
        }
        self.scale = scale;
        self
    }

    pub fn integral(&self) -> f64 {
        integrate(&self.detuning, &self.intensity)
    }

    pub fn total_strength(&self) -> f64 {
        self.scale * self.lines.iter().map(|l| l.strength).sum::<f64>()
    }

    /// Detunings of resolved maxima.
    pub fn peaks(&self, rel_prominence: f64) -> Vec<f64> {
        find_peaks(&self.intensity, rel_prominence).into_iter().map(|i| self.detuning[i]).collect()
    }

    /// CSV `detuning_MHz,intensity[,<line labels>...]`.
    pub fn to_csv(&self, with_lines: bool) -> String {
        let mut out = String::from("detuning_MHz,intensity");
        if with_lines {
            for l in &self.lines {
                out.push(',');
                out.push_str(&l.label);
            }
        }
        out.push('\n');
        for (i, &d) in self.detuning.iter().enumerate() {
            out.push_str(&g9(d));
            out.push(',');
            out.push_str(&g9(self.intensity[i]));
            if with_lines {
                for c in &self.contributions {
                    out.push(',');
                    out.push_str(&g9(c[i]));
                }
            }
            out.push('\n');
        }
        out
    }
}
