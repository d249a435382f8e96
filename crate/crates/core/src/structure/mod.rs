//! Field-free level structure: quantum-defect energies, hyperfine shifts and
//! Zeeman broadening of the ground state in a MOT gradient.

mod constants;

pub use constants::{
    parse_level_label, AtomData, Channel, DefectSeries, LevelConstants, Record, CONSTANTS_ENV,
    RB87_CONSTANTS,
};

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::units::{BOHR_MAGNETON_MHZ_PER_G, UM_PER_CM};

/// A fine-structure level `n l j` with its effective principal quantum number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergLevel {
    pub n: u32,
    pub l: u32,
    pub j: HalfInt,
    pub n_star: f64,
}

impl RydbergLevel {
    /// Level with an explicit effective quantum number.
    pub fn with_n_star(n: u32, l: u32, j: HalfInt, n_star: f64) -> Result<Self> {
        Channel::new(l, j)?;
        if l >= n {
            return Err(Error::domain(format!("l={l} must be below n={n}")));
        }
        if !(n_star > 0.0) {
            return Err(Error::domain(format!("effective quantum number {n_star} is not positive")));
        }
        Ok(RydbergLevel { n, l, j, n_star })
    }

    /// Pure Coulomb level, n* = n.
    pub fn hydrogenic(n: u32, l: u32, j: HalfInt) -> Result<Self> {
        Self::with_n_star(n, l, j, n as f64)
    }

    pub fn channel(&self) -> Channel {
        Channel { l: self.l, j: self.j }
    }

    pub fn defect(&self) -> f64 {
        self.n as f64 - self.n_star
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.n, self.channel())
    }
}

impl AtomData {
    /// Build the level `n l j` using this table's quantum defects.
    pub fn level(&self, n: u32, l: u32, j: HalfInt) -> Result<RydbergLevel> {
        if n < self.min_n {
            return Err(Error::domain(format!("n={n} lies below the ground configuration n={}", self.min_n)));
        }
        let channel = Channel::new(l, j)?;
        let series = self.defect_series(channel)?;
        RydbergLevel::with_n_star(n, l, j, n as f64 - series.defect(n))
    }

    /// Level from a label such as `41D5/2`.
    pub fn level_by_label(&self, label: &str) -> Result<RydbergLevel> {
        let (n, ch) = parse_level_label(label)
            .ok_or_else(|| Error::domain(format!("cannot parse level label '{label}'")))?;
        self.level(n, ch.l, ch.j)
    }

    /// Binding energy `-Ry/(n*)^2` in GHz, relative to the ionization limit.
    pub fn level_energy(&self, level: &RydbergLevel) -> f64 {
        -self.rydberg_ghz / (level.n_star * level.n_star)
    }

    /// Rydberg-state hyperfine constant `A = A_scaled / (n*)^3` in MHz.
    pub fn rydberg_hfs_a(&self, level: &RydbergLevel) -> Result<f64> {
        let scaled = self.rydberg_hfs_scaled.get(&level.channel()).ok_or_else(|| {
            Error::MissingConstant { what: "Rydberg hyperfine constant", key: level.channel().to_string() }
        })?;
        Ok(scaled / level.n_star.powi(3))
    }

    /// Hyperfine shift of level `label` in state `F`, MHz.
    pub fn level_hyperfine_shift(&self, label: &str, f: HalfInt) -> Result<f64> {
        let lc = self.level_constants(label)?;
        hyperfine_shift(lc.hfs_a, lc.hfs_b, self.nuclear_spin, lc.channel.j, f)
    }

    /// Frequency spacing of neighbouring `m_F` sublevels of `label` in MHz/G
    /// (nuclear g-factor neglected).
    pub fn mf_spacing(&self, label: &str, f: HalfInt) -> Result<f64> {
        let lc = self.level_constants(label)?;
        let g_j = lc.g_j.ok_or(Error::MissingConstant { what: "g_J", key: label.to_string() })?;
        let (ff, jj, ii) = (
            spin_product(f),
            spin_product(lc.channel.j),
            spin_product(self.nuclear_spin),
        );
        if ff == 0.0 {
            return Ok(0.0);
        }
        let g_f = g_j * (ff + jj - ii) / (2.0 * ff);
        Ok((g_f * BOHR_MAGNETON_MHZ_PER_G).abs())
    }
}

/// `x (x + 1)`
fn spin_product(x: HalfInt) -> f64 {
    let v = x.value();
    v * (v + 1.0)
}

/// Hyperfine energy shift (magnetic dipole + electric quadrupole) in MHz.
///
/// With `K = F(F+1) - I(I+1) - J(J+1)` the shift is
/// `A K/2 + B [3K(K+1)/2 - 2I(I+1)J(J+1)] / [4I(2I-1)J(2J-1)]`.
/// The quadrupole term is dropped when `I` or `J` is below 1.
pub fn hyperfine_shift(a: f64, b: f64, i: HalfInt, j: HalfInt, f: HalfInt) -> Result<f64> {
    let lower = (i.twice() - j.twice()).abs();
    let upper = i.twice() + j.twice();
    if f.twice() < lower || f.twice() > upper || (f.twice() - lower) % 2 != 0 {
        return Err(Error::domain(format!("F={f} is not reachable from I={i}, J={j}")));
    }
    let (ii, jj) = (spin_product(i), spin_product(j));
    let k = spin_product(f) - ii - jj;
    let mut shift = 0.5 * a * k;
    if b != 0.0 && i.twice() >= 2 && j.twice() >= 2 {
        let iv = i.value();
        let jv = j.value();
        shift += b * (1.5 * k * (k + 1.0) - 2.0 * ii * jj)
            / (4.0 * iv * (2.0 * iv - 1.0) * jv * (2.0 * jv - 1.0));
    }
    Ok(shift)
}

/// Inhomogeneous Zeeman width of a line across a cloud in a field gradient.
///
/// `spacing` is the shift between neighbouring m_F sublevels (MHz/G),
/// `gradient` in G/cm, `diameter` in um, and `mf_span` the number of
/// sublevel spacings covered (4 for m_F = -2..2).
pub fn zeeman_width(spacing: f64, gradient: f64, diameter_um: f64, mf_span: u32) -> f64 {
    spacing * gradient * (diameter_um / UM_PER_CM) * mf_span as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn hydrogen_limit() {
        let atom = AtomData::rb87().zero_defects();
        let lvl = atom.level(2, 0, h(1)).unwrap();
        assert_eq!(lvl.n_star, 2.0);
        assert_eq!(atom.level_energy(&lvl), -atom.rydberg_ghz / 4.0);
    }

    #[test]
    fn energy_approaches_limit_from_below() {
        let atom = AtomData::rb87();
        let mut prev = f64::NEG_INFINITY;
        for n in [10u32, 40, 100, 1000, 100_000] {
            let e = atom.level_energy(&atom.level(n, 2, h(5)).unwrap());
            assert!(e < 0.0);
            assert!(e > prev);
            prev = e;
        }
        assert!(prev > -1e-3);
    }

    #[test]
    fn d_state_sits_between_manifolds() {
        // 41D has n* ~ 39.65, so it lies below the n=40 hydrogenic manifold
        // and above n=39.
        let atom = AtomData::rb87();
        let e41d = atom.level_energy(&atom.level(41, 2, h(5)).unwrap());
        let e40g = atom.level_energy(&atom.level(40, 4, h(9)).unwrap());
        let e39g = atom.level_energy(&atom.level(39, 4, h(9)).unwrap());
        assert!(e39g < e41d && e41d < e40g);
    }

    #[test]
    fn level_validation() {
        let atom = AtomData::rb87();
        assert!(atom.level(4, 0, h(1)).is_err());
        assert!(atom.level(40, 40, h(81)).is_err());
        assert!(atom.level(40, 2, h(1)).is_err());
        let lvl = atom.level_by_label("41D3/2").unwrap();
        assert!((lvl.n_star - (41.0 - 1.34809171 + 0.60286 / (41.0 - 1.34809171f64).powi(2))).abs() < 1e-12);
    }

    #[test]
    fn adjacent_spacing_scales_as_inverse_cube() {
        let atom = AtomData::rb87();
        for n in 30..60 {
            let a = atom.level(n, 0, h(1)).unwrap();
            let b = atom.level(n + 1, 0, h(1)).unwrap();
            let gap = atom.level_energy(&b) - atom.level_energy(&a);
            let ns = 0.5 * (a.n_star + b.n_star);
            let expect = 2.0 * atom.rydberg_ghz / ns.powi(3);
            assert!((gap / expect - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn hyperfine_zero_constants() {
        for f in [0, 2, 4, 6] {
            assert_eq!(hyperfine_shift(0.0, 0.0, h(3), h(3), h(f)).unwrap(), 0.0);
        }
    }

    #[test]
    fn hyperfine_invalid_f() {
        assert!(hyperfine_shift(1.0, 0.0, h(3), h(1), h(6)).is_err());
        assert!(hyperfine_shift(1.0, 0.0, h(3), h(1), h(3)).is_err());
    }

    #[test]
    fn ground_state_splitting() {
        let atom = AtomData::rb87();
        let s = atom.level_hyperfine_shift("5S1/2", h(4)).unwrap()
            - atom.level_hyperfine_shift("5S1/2", h(2)).unwrap();
        // A (I + 1/2)
        let a = atom.level_constants("5S1/2").unwrap().hfs_a;
        assert!((s - 2.0 * a).abs() < 1e-9);
        assert!((s - 6835.0).abs() < 1.0);
    }

    #[test]
    fn excited_state_interval() {
        let atom = AtomData::rb87();
        let d = atom.level_hyperfine_shift("5P3/2", h(6)).unwrap()
            - atom.level_hyperfine_shift("5P3/2", h(2)).unwrap();
        assert!((d - 423.0).abs() < 2.0, "{d}");
    }

    #[test]
    fn dipole_trace_vanishes() {
        for ti in 1..=9 {
            for tj in 1..=9 {
                let (i, j) = (h(ti), h(tj));
                let lo = (ti - tj).abs();
                let trace: f64 = (lo..=ti + tj)
                    .step_by(2)
                    .map(|tf| (tf + 1) as f64 * hyperfine_shift(1.0, 0.0, i, j, h(tf)).unwrap())
                    .sum();
                assert!(trace.abs() < 1e-9, "I={i} J={j}: {trace}");
            }
        }
    }

    #[test]
    fn zeeman_width_arithmetic() {
        assert!((zeeman_width(0.7, 16.0, 500.0, 4) - 2.24).abs() < 1e-12);
        assert_eq!(zeeman_width(0.7, 0.0, 500.0, 4), 0.0);
        let w1 = zeeman_width(0.7, 16.0, 500.0, 4);
        let w2 = zeeman_width(0.7, 16.0, 1000.0, 4);
        assert!((w2 - 2.0 * w1).abs() < 1e-12);
    }

    #[test]
    fn ground_state_mf_spacing() {
        let atom = AtomData::rb87();
        let s = atom.mf_spacing("5S1/2", h(4)).unwrap();
        assert!((s - 0.70).abs() < 0.005, "{s}");
    }
}
