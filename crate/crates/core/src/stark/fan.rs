use serde::{Deserialize, Serialize};

use super::basis::BasisSpec;
use super::hamiltonian::{eigh, StarkOperator};
use crate::error::{Error, Result};
use crate::radial::RadialCache;
use crate::structure::AtomData;

/// Highest orbital momentum with a quantum defect in the shipped data.
const CORE_PENETRATING_L: u32 = 3;

/// Linear Stark slopes of the high-l manifold of one `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldFan {
    pub n: u32,
    pub probe_field: f64,
    /// Ascending, MHz per V/cm.
    pub slopes: Vec<f64>,
}

impl ManifoldFan {
    /// Largest gap between neighbouring slopes, MHz per V/cm.
    pub fn max_gap(&self) -> f64 {
        self.slopes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Spread between outermost slopes, MHz per V/cm.
    pub fn width(&self) -> f64 {
        match (self.slopes.first(), self.slopes.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Diagonalize at `probe_field` (V/cm) and read off the slope of every
/// eigenstate that lives mostly in the `l > 3` manifold of `n`.
pub fn manifold_fan(
    atom: &AtomData,
    cache: &RadialCache,
    spec: &BasisSpec,
    n: u32,
    probe_field: f64,
) -> Result<ManifoldFan> {
    if !(probe_field > 0.0) {
        return Err(Error::domain("manifold probe field must be positive"));
    }
    let op = StarkOperator::new(atom, cache, spec)?;
    let members: Vec<usize> = op
        .basis
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.level.n == n && s.level.l > CORE_PENETRATING_L)
        .map(|(i, _)| i)
        .collect();
    if members.is_empty() {
        return Err(Error::domain(format!("n={n} has no high-l states in the basis")));
    }
    let e0 = op.basis.energies[members[0]];
    let (values, vectors) = eigh(&op.hamiltonian(probe_field, e0))?;
    let mut slopes: Vec<f64> = (0..op.len())
        .filter(|&c| members.iter().map(|&r| vectors[(r, c)].powi(2)).sum::<f64>() > 0.5)
        .map(|c| values[c] * 1e3 / probe_field)
        .collect();
    slopes.sort_by(f64::total_cmp);
    Ok(ManifoldFan { n, probe_field, slopes })
}

/// Largest field (V/cm) at which no two neighbouring manifold components are
/// further apart than `resolution_mhz`.
pub fn residual_field_bound(fan: &ManifoldFan, resolution_mhz: f64) -> Result<f64> {
    if !(resolution_mhz > 0.0) {
        return Err(Error::domain(format!("resolution floor {resolution_mhz} MHz must be positive")));
    }
    let gap = fan.max_gap();
    if gap <= 0.0 {
        return Err(Error::domain("manifold fan has no resolvable splitting"));
    }
    Ok(resolution_mhz / gap)
}
