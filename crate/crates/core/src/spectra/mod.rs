//! Two-photon excitation spectra: line profiles, spatial addressing in a field
//! gradient and hyperfine-selective excitation.

mod addressing;
mod hfselect;
mod profile;
mod spectrum;
mod spline;

pub use addressing::{
    fit_operating_field, gradient_addressing_scan, stark_spectrum, AddressingPoint, AddressingTrace, CloudGeometry,
    LineCurve, OperatingFieldFit,
};
pub use hfselect::{hyperfine_selective_spectrum, hyperfine_strength, HfSelectRequest, RedLaser};
pub use profile::{faddeeva, find_peaks, fwhm, integrate, line_profile, voigt, FrequencyGrid};
pub use spectrum::{SpectralLine, Spectrum};
pub use spline::CubicSpline;

use crate::angular::HalfInt;
use crate::error::Result;
use crate::structure::{zeeman_width, AtomData};

/// Inhomogeneous Zeeman width (MHz) of lines starting from ground state `F`
/// across the cloud: the `m_F` spacing times the field spread over the
/// cloud diameter, times the number of spacings `2F`.
pub fn ground_zeeman_width(atom: &AtomData, geom: &CloudGeometry, f: HalfInt) -> Result<f64> {
    let spacing = atom.mf_spacing("5S1/2", f)?;
    Ok(zeeman_width(spacing, geom.b_gradient, geom.diameter_um, f.twice() as u32))
}
