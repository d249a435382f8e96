use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_PI_INV: f64 = 0.564_189_583_547_756_3;
const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Uniform frequency grid in MHz, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FrequencyGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        FrequencyGrid { start, stop, step }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop <= self.start {
            return Err(Error::domain(format!("grid span [{}, {}] is empty", self.start, self.stop)));
        }
        if !(self.step > 0.0) || self.step > self.stop - self.start {
            return Err(Error::domain(format!("grid step {} does not fit the span", self.step)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Faddeeva function `w(z)` for `Im z >= 0` (Humlicek's four-region rational
/// approximation, relative accuracy about 1e-4).
pub fn faddeeva(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let t = Complex64::new(y, -x);
    let s = x.abs() + y;
    if s >= 15.0 {
        t * SQRT_PI_INV / (0.5 + t * t)
    } else if s >= 5.5 {
        let u = t * t;
        t * (1.410474 + u * SQRT_PI_INV) / (0.75 + u * (3.0 + u))
    } else if y >= 0.195 * x.abs() - 0.176 {
        (16.4955 + t * (20.20933 + t * (11.96482 + t * (3.778987 + t * 0.5642236))))
            / (16.4955 + t * (38.82363 + t * (39.27121 + t * (21.69274 + t * (6.699398 + t)))))
    } else {
        let u = t * t;
        let num = t
            * (36183.31
                - u * (3321.9905 - u * (1540.787 - u * (219.0313 - u * (35.76683 - u * (1.320522 - u * 0.56419))))));
        let den = 32066.6
            - u * (24322.84 - u * (9022.228 - u * (2186.181 - u * (364.2191 - u * (61.57037 - u * (1.841439 - u))))));
        u.exp() - num / den
    }
}

/// Area-normalized Voigt profile at offset `x` (MHz) for Gaussian and
/// Lorentzian FWHMs (MHz).
pub fn voigt(x: f64, gaussian_fwhm: f64, lorentzian_fwhm: f64) -> f64 {
    let gamma = 0.5 * lorentzian_fwhm;
    if gaussian_fwhm <= 0.0 {
        if gamma <= 0.0 {
            return if x == 0.0 { f64::INFINITY } else { 0.0 };
        }
        return gamma / (std::f64::consts::PI * (x * x + gamma * gamma));
    }
    let sigma = gaussian_fwhm / FWHM_PER_SIGMA;
    if gamma <= 0.0 {
        return (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    }
    let z = Complex64::new(x, gamma) / (sigma * std::f64::consts::SQRT_2);
    faddeeva(z).re / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Trapezoid integral of samples on a uniform grid.
pub fn integrate(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2).zip(values.windows(2)).map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1])).sum()
}

/// Voigt line sampled on `grid` and scaled so that its trapezoid integral is
/// exactly `strength`. Zero widths collapse the line onto the nearest sample.
pub fn line_profile(
    grid: &[f64],
    center: f64,
    strength: f64,
    lorentzian_fwhm: f64,
    gaussian_fwhm: f64,
) -> Result<Vec<f64>> {
    if grid.len() < 2 || grid[grid.len() - 1] <= grid[0] {
        return Err(Error::domain("line profile needs a grid with nonzero span"));
    }
    if !(lorentzian_fwhm >= 0.0 && gaussian_fwhm >= 0.0) {
        return Err(Error::domain(format!(
            "widths must be non-negative (Lorentzian {lorentzian_fwhm}, Gaussian {gaussian_fwhm})"
        )));
    }
    let mut out = vec![0.0; grid.len()];
    if strength == 0.0 {
        return Ok(out);
    }
    if lorentzian_fwhm == 0.0 && gaussian_fwhm == 0.0 {
        let i = nearest(grid, center);
        out[i] = 1.0;
    } else {
        for (o, &x) in out.iter_mut().zip(grid) {
            *o = voigt(x - center, gaussian_fwhm, lorentzian_fwhm);
        }
    }
    let area = integrate(grid, &out);
    if !(area > 0.0) {
        return Err(Error::domain(format!("line at {center} MHz has no support on the grid")));
    }
    let scale = strength / area;
    for o in &mut out {
        *o *= scale;
    }
    Ok(out)
}

fn nearest(grid: &[f64], x: f64) -> usize {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - x).abs().total_cmp(&(grid[b] - x).abs())).unwrap_or(0)
}

/// Full width at half maximum of the tallest feature, by linear interpolation
/// of the half-height crossings.
pub fn fwhm(grid: &[f64], values: &[f64]) -> Option<f64> {
    let (imax, &vmax) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(vmax > 0.0) {
        return None;
    }
    let half = 0.5 * vmax;
    let left = (0..imax).rev().find(|&i| values[i] < half)?;
    let right = (imax + 1..values.len()).find(|&i| values[i] < half)?;
    let cross = |a: usize, b: usize| grid[a] + (half - values[a]) * (grid[b] - grid[a]) / (values[b] - values[a]);
    Some(cross(right - 1, right) - cross(left, left + 1))
}

/// Indices of local maxima whose topographic prominence is at least
/// `rel_prominence` times the global maximum.
pub fn find_peaks(values: &[f64], rel_prominence: f64) -> Vec<usize> {
    let n = values.len();
    let vmax = values.iter().cloned().fold(f64::MIN, f64::max);
    if n < 3 || !(vmax > 0.0) {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if values[i] > values[i - 1] {
            // walk across a flat top
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                let mid = (i + j) / 2;
                let v = values[mid];
                let mut left_min = v;
                for &x in values[..i].iter().rev() {
                    if x > v {
                        break;
                    }
                    left_min = left_min.min(x);
                }
                let mut right_min = v;
                for &x in &values[j + 1..] {
                    if x > v {
                        break;
                    }
                    right_min = right_min.min(x);
                }
                if v - left_min.max(right_min) >= rel_prominence * vmax {
                    peaks.push(mid);
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}
