use serde::{Deserialize, Serialize};

use super::spectrum::{SpectralLine, Spectrum};
use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::stark::StarkMap;
use crate::units::UM_PER_CM;

/// MOT cloud and field geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudGeometry {
    #[serde(default = "default_diameter")]
    pub diameter_um: f64,
    /// Magnetic quadrupole gradient, G/cm.
    #[serde(default = "default_b_gradient")]
    pub b_gradient: f64,
    /// Electric-field gradient along the addressing direction, V/cm^2.
    #[serde(default = "default_e_gradient")]
    pub e_gradient: f64,
    #[serde(default)]
    pub beam_offset_um: f64,
    /// Field gradient across the cloud along the excitation beam, V/cm^2.
    #[serde(default = "default_e_gradient")]
    pub transverse_e_gradient: f64,
}

fn default_diameter() -> f64 {
    500.0
}

fn default_b_gradient() -> f64 {
    16.0
}

fn default_e_gradient() -> f64 {
    18.8
}

impl Default for CloudGeometry {
    fn default() -> Self {
        CloudGeometry {
            diameter_um: default_diameter(),
            b_gradient: default_b_gradient(),
            e_gradient: default_e_gradient(),
            beam_offset_um: 0.0,
            transverse_e_gradient: default_e_gradient(),
        }
    }
}

impl CloudGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.diameter_um > 0.0) {
            return Err(Error::config(format!("cloud diameter {} um must be positive", self.diameter_um)));
        }
        let finite = [self.b_gradient, self.e_gradient, self.beam_offset_um, self.transverse_e_gradient];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("geometry values must be finite"));
        }
        Ok(())
    }

    /// Field spread across the cloud along the beam, V/cm.
    pub fn transverse_spread(&self) -> f64 {
        (self.transverse_e_gradient * self.diameter_um / UM_PER_CM).abs()
    }
}

/// Line frequency of one map target as a smooth function of field.
#[derive(Debug, Clone)]
pub struct LineCurve {
    pub target: String,
    spline: CubicSpline,
}

impl LineCurve {
    /// Follows the track with the largest target character at each field.
    pub fn from_map(map: &StarkMap, target: &str) -> Result<Self> {
        let t = map.target_index(target)?;
        let mut pts: Vec<(f64, f64)> =
            map.fields.iter().copied().zip(map.target_energies(t).into_iter().map(|e| e * 1e3)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Ok(LineCurve { target: target.to_string(), spline: CubicSpline::new(&x, &y)? })
    }

    fn check(&self, field: f64) -> Result<()> {
        let (min, max) = self.spline.domain();
        if field < min - 1e-12 || field > max + 1e-12 {
            return Err(Error::OutOfRange { field, min, max });
        }
        Ok(())
    }

    /// MHz relative to the map reference.
    pub fn frequency(&self, field: f64) -> Result<f64> {
        self.check(field)?;
        Ok(self.spline.value(field))
    }

    /// MHz per V/cm.
    pub fn slope(&self, field: f64) -> Result<f64> {
        self.check(field)?;
        Ok(self.spline.derivative(field))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddressingPoint {
    pub offset_um: f64,
    pub field: f64,
    pub center_mhz: f64,
    /// Relative to the zero-offset center.
    pub shift_mhz: f64,
    /// Local `d nu / dE`, MHz per V/cm.
    pub slope: f64,
    pub width_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddressingTrace {
    pub target: String,
    pub points: Vec<AddressingPoint>,
}

/// Line centers and widths of every map target as the excitation beam is
/// moved by `offsets` (um) through a field gradient around the bias `e0`.
///
/// Width is `|slope| * transverse spread` combined in quadrature with
/// `other_widths` (MHz).
pub fn gradient_addressing_scan(
    map: &StarkMap,
    geom: &CloudGeometry,
    e0: f64,
    offsets: &[f64],
    other_widths: &[f64],
) -> Result<Vec<AddressingTrace>> {
    geom.validate()?;
    let others: f64 = other_widths.iter().map(|w| w * w).sum();
    let field_at = |offset: f64| e0 + geom.e_gradient * (geom.beam_offset_um + offset) / UM_PER_CM;
    map.targets
        .iter()
        .map(|target| {
            let curve = LineCurve::from_map(map, target)?;
            let base = curve.frequency(field_at(0.0))?;
            let points = offsets
                .iter()
                .map(|&offset| {
                    let field = field_at(offset);
                    let center = curve.frequency(field)?;
                    let slope = curve.slope(field)?;
                    let inhom = slope.abs() * geom.transverse_spread();
                    Ok(AddressingPoint {
                        offset_um: offset,
                        field,
                        center_mhz: center,
                        shift_mhz: center - base,
                        slope,
                        width_mhz: (inhom * inhom + others).sqrt(),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(AddressingTrace { target: target.clone(), points })
        })
        .collect()
}

/// Bias field at which the shifts of two lines over one offset come closest
/// to a requested ratio of magnitudes. `ratio` keeps its sign, so opposite
/// shift directions show up as a negative value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingFieldFit {
    pub e0: f64,
    pub ratio: f64,
    pub shift_a: f64,
    pub shift_b: f64,
}

pub fn fit_operating_field(
    map: &StarkMap,
    geom: &CloudGeometry,
    targets: (&str, &str),
    ratio: f64,
    offset_um: f64,
) -> Result<OperatingFieldFit> {
    geom.validate()?;
    let a = LineCurve::from_map(map, targets.0)?;
    let b = LineCurve::from_map(map, targets.1)?;
    let (min, max) = a.spline.domain();
    let span = geom.e_gradient * offset_um / UM_PER_CM;
    let (lo, hi) = if span >= 0.0 { (min, max - span) } else { (min - span, max) };
    if hi <= lo {
        return Err(Error::domain("map range is narrower than the addressed field span"));
    }
    let eval = |e0: f64| -> Result<OperatingFieldFit> {
        let sa = a.frequency(e0 + span)? - a.frequency(e0)?;
        let sb = b.frequency(e0 + span)? - b.frequency(e0)?;
        Ok(OperatingFieldFit { e0, ratio: sa / sb, shift_a: sa, shift_b: sb })
    };
    let steps = 2000;
    let mut best: Option<OperatingFieldFit> = None;
    for k in 0..=steps {
        let e0 = lo + (hi - lo) * k as f64 / steps as f64;
        let fit = eval(e0)?;
        if !fit.ratio.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|cur| (fit.ratio.abs() - ratio).abs() < (cur.ratio.abs() - ratio).abs()) {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| Error::domain("no bias field gives a finite shift ratio"))
}

/// Spectrum of every track at field index `i` of a map. Each line carries the
/// Gaussian and Lorentzian widths given, plus a top-hat spread from the local
/// slope times the transverse field spread.
pub fn stark_spectrum(
    map: &StarkMap,
    i: usize,
    geom: &CloudGeometry,
    gaussian: &[f64],
    lorentzian: &[f64],
    grid: &[f64],
    rel_threshold: f64,
) -> Result<Spectrum> {
    if i >= map.fields.len() {
        return Err(Error::config(format!("field index {i} is outside the map")));
    }
    let strengths = &map.strengths[i];
    let max = strengths.iter().cloned().fold(0.0, f64::max);
    let spread = geom.transverse_spread();
    let lines = (0..map.track_count())
        .filter(|&t| strengths[t] > rel_threshold * max)
        .map(|t| {
            let slope = track_slope(map, t, i);
            SpectralLine::new(format!("track_{t}"), map.energies[i][t] * 1e3, strengths[t])
                .with_gaussian(gaussian)
                .with_lorentzian(lorentzian)
                .with_tophat(slope.abs() * spread)
        })
        .collect();
    Spectrum::synthesize(grid, lines)
}

/// Finite-difference slope of a track in MHz per V/cm.
fn track_slope(map: &StarkMap, t: usize, i: usize) -> f64 {
    let n = map.fields.len();
    if n < 2 {
        return 0.0;
    }
    let (a, b) = if i == 0 { (0, 1) } else if i == n - 1 { (n - 2, n - 1) } else { (i - 1, i + 1) };
    (map.energies[b][t] - map.energies[a][t]) * 1e3 / (map.fields[b] - map.fields[a])
}
