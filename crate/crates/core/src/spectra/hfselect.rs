use serde::{Deserialize, Serialize};

use super::profile::FrequencyGrid;
use super::spectrum::{SpectralLine, Spectrum};
use crate::angular::{wigner_6j, HalfInt};
use crate::error::{Error, Result};
use crate::radial::RadialCache;
use crate::stark::angular_dipole;
use crate::structure::AtomData;

/// A red laser tuned to `5S1/2 F -> intermediate F'` with a detuning (MHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedLaser {
    pub ground_f: HalfInt,
    pub intermediate_f: HalfInt,
    #[serde(default)]
    pub detuning_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HfSelectRequest {
    /// Fraction of the atoms in the lower ground state F=1 (0 without pumping).
    #[serde(default)]
    pub f1_fraction: f64,
    /// Cooling (F=2 -> F'=3) and repumping (F=1 -> F'=1) lasers by default.
    #[serde(default = "default_lasers")]
    pub lasers: Vec<RedLaser>,
    #[serde(default = "default_targets")]
    pub targets: Vec<String>,
    /// Blue detuning is measured from `reference - intermediate centroid`.
    #[serde(default = "default_reference")]
    pub reference: String,
    #[serde(default = "default_intermediate")]
    pub intermediate: String,
    /// Lorentzian FWHM (MHz), laser linewidth.
    #[serde(default = "default_lorentzian")]
    pub lorentzian_fwhm: f64,
    /// Gaussian FWHM (MHz), e.g. an unquantified field gradient.
    #[serde(default)]
    pub gaussian_fwhm: f64,
    #[serde(default = "default_grid")]
    pub grid: FrequencyGrid,
}

fn default_grid() -> FrequencyGrid {
    FrequencyGrid::new(-800.0, 400.0, 0.5)
}

impl Default for HfSelectRequest {
    fn default() -> Self {
        Self::new(0.0, default_grid())
    }
}

fn default_lasers() -> Vec<RedLaser> {
    vec![
        RedLaser { ground_f: HalfInt::integer(2), intermediate_f: HalfInt::integer(3), detuning_mhz: 0.0 },
        RedLaser { ground_f: HalfInt::integer(1), intermediate_f: HalfInt::integer(1), detuning_mhz: 0.0 },
    ]
}

fn default_targets() -> Vec<String> {
    vec!["41D3/2".into(), "41D5/2".into()]
}

fn default_reference() -> String {
    "41D5/2".into()
}

fn default_intermediate() -> String {
    "5P3/2".into()
}

fn default_lorentzian() -> f64 {
    1.0
}

impl HfSelectRequest {
    pub fn new(f1_fraction: f64, grid: FrequencyGrid) -> Self {
        HfSelectRequest {
            f1_fraction,
            lasers: default_lasers(),
            targets: default_targets(),
            reference: default_reference(),
            intermediate: default_intermediate(),
            lorentzian_fwhm: default_lorentzian(),
            gaussian_fwhm: 0.0,
            grid,
        }
    }
}

/// Relative hyperfine transition strength `S_FF' = (2F'+1)(2J+1) {J J' 1; F' F I}^2`.
pub fn hyperfine_strength(j: HalfInt, f: HalfInt, jp: HalfInt, fp: HalfInt, i: HalfInt) -> Result<f64> {
    let six = wigner_6j(j, jp, HalfInt::ONE, fp, f, i)?;
    Ok((fp.multiplicity() * j.multiplicity()) as f64 * six * six)
}

/// Blue-laser spectrum when the red lasers address the ground hyperfine
/// states separately.
///
/// A path `F -> F' -> Rydberg` is resonant at blue detuning
/// `E(Rydberg) - E(F') - delta_red`, measured from the reference level minus
/// the intermediate centroid, so paths through different `F'` appear split by
/// the intermediate hyperfine interval. Each line's strength is the ground
/// population times the red hyperfine factor times the Rydberg line strength.
pub fn hyperfine_selective_spectrum(
    atom: &AtomData,
    cache: &RadialCache,
    req: &HfSelectRequest,
) -> Result<Spectrum> {
    if !(0.0..=1.0).contains(&req.f1_fraction) {
        return Err(Error::config(format!("F=1 fraction {} must lie in [0, 1]", req.f1_fraction)));
    }
    req.grid.validate()?;
    let ground = atom.level_constants("5S1/2")?.channel.j;
    let lower = atom.level_by_label(&req.intermediate)?;
    let inter = atom.level_constants(&req.intermediate)?;
    let i_nuc = atom.nuclear_spin;
    let reference = atom.level_energy(&atom.level_by_label(&req.reference)?);

    let populations = [(HalfInt::integer(1), req.f1_fraction), (HalfInt::integer(2), 1.0 - req.f1_fraction)];
    let mut lines = Vec::new();
    for (f, pop) in populations {
        let lasers: Vec<&RedLaser> = req.lasers.iter().filter(|l| l.ground_f == f).collect();
        if lasers.is_empty() {
            if pop > 0.0 {
                return Err(Error::config(format!("no red laser lock point defined for ground state F={f}")));
            }
            continue;
        }
        for laser in lasers {
            let fp = laser.intermediate_f;
            let red = hyperfine_strength(ground, f, inter.channel.j, fp, i_nuc)?;
            let shift = atom.level_hyperfine_shift(&req.intermediate, fp)?;
            for target in &req.targets {
                let lvl = atom.level_by_label(target)?;
                let center = (atom.level_energy(&lvl) - reference) * 1e3 - shift - laser.detuning_mhz;
                let blue = line_strength(cache, &lvl, &lower)?;
                lines.push(
                    SpectralLine::new(format!("F{f}_F'{fp}_{target}"), center, pop * red * blue)
                        .with_lorentzian(&[req.lorentzian_fwhm])
                        .with_gaussian(&[req.gaussian_fwhm]),
                );
            }
        }
    }
    Spectrum::synthesize(&req.grid.points(), lines)
}

/// `sum |<upper m| r_q |lower m'>|^2 / (2 j_lower + 1)` in (e a0)^2.
fn line_strength(
    cache: &RadialCache,
    upper: &crate::structure::RydbergLevel,
    lower: &crate::structure::RydbergLevel,
) -> Result<f64> {
    let radial = cache.dipole(upper, lower)?;
    let mut total = 0.0;
    for m in upper.j.projections() {
        for mp in lower.j.projections() {
            for q in -1..=1 {
                let a = angular_dipole(upper.l, upper.j, m, lower.l, lower.j, mp, q)?;
                total += a * a;
            }
        }
    }
    Ok(total * radial * radial / lower.j.multiplicity() as f64)
}
