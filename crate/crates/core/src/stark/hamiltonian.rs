use faer::{Mat, Side};
use rayon::prelude::*;

use super::basis::{Basis, BasisSpec, BasisState};
use crate::angular::{wigner_3j, wigner_6j, HalfInt};
use crate::error::{Error, Result};
use crate::radial::RadialCache;
use crate::structure::{AtomData, RydbergLevel};
use crate::units::{v_per_cm_to_au, HARTREE_GHZ};

fn parity(twice_exponent: i32) -> f64 {
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Angular part of `<l j m| r_q / r |l' j' m'>` for a spin-1/2 electron,
/// i.e. the dipole matrix element divided by the radial integral.
pub fn angular_dipole(
    l: u32,
    j: HalfInt,
    m: HalfInt,
    l2: u32,
    j2: HalfInt,
    m2: HalfInt,
    q: i32,
) -> Result<f64> {
    if m.twice() != m2.twice() + 2 * q || l.abs_diff(l2) != 1 {
        return Ok(0.0);
    }
    let (ll, ll2) = (HalfInt::integer(l as i32), HalfInt::integer(l2 as i32));
    let one = HalfInt::ONE;
    let half = HalfInt::HALF;
    // <l||C1||l'>
    let c_red = parity(ll.twice())
        * (((2 * l + 1) * (2 * l2 + 1)) as f64).sqrt()
        * wigner_3j(ll, one, ll2, HalfInt::ZERO, HalfInt::ZERO, HalfInt::ZERO)?;
    if c_red == 0.0 {
        return Ok(0.0);
    }
    // <l s j||C1||l' s j'>
    let j_red = parity(ll.twice() + half.twice() + j2.twice() + 2)
        * ((j.multiplicity() * j2.multiplicity()) as f64).sqrt()
        * wigner_6j(ll, j, half, j2, ll2, one)?
        * c_red;
    let w = wigner_3j(j, one, j2, -m, HalfInt::integer(q), m2)?;
    Ok(parity(j.twice() - m.twice()) * w * j_red)
}

/// `<a| r_q |b>` in atomic units.
pub fn dipole_element(
    cache: &RadialCache,
    a: &RydbergLevel,
    ma: HalfInt,
    b: &RydbergLevel,
    mb: HalfInt,
    q: i32,
) -> Result<f64> {
    let ang = angular_dipole(a.l, a.j, ma, b.l, b.j, mb, q)?;
    if ang == 0.0 {
        return Ok(0.0);
    }
    Ok(ang * cache.dipole(a, b)?)
}

/// Field-free energies plus the `z` operator of one `m_j` block. `H(F)` is
/// assembled from these without recomputing any matrix element.
#[derive(Debug, Clone)]
pub struct StarkOperator {
    pub basis: Basis,
    /// `<i| z |j>` in atomic units.
    pub z: Mat<f64>,
}

impl StarkOperator {
    pub fn new(atom: &AtomData, cache: &RadialCache, spec: &BasisSpec) -> Result<Self> {
        let basis = Basis::build(atom, spec)?;
        Self::from_basis(basis, cache)
    }

    pub fn from_basis(basis: Basis, cache: &RadialCache) -> Result<Self> {
        let n = basis.len();
        let states = &basis.states;
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = Vec::new();
                for k in i + 1..n {
                    let (a, b) = (&states[i], &states[k]);
                    if a.level.l.abs_diff(b.level.l) != 1 {
                        continue;
                    }
                    let v = dipole_element(cache, &a.level, a.m, &b.level, b.m, 0)?;
                    if v != 0.0 {
                        row.push((k, v));
                    }
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let mut z = Mat::<f64>::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row {
                z[(i, k)] = v;
                z[(k, i)] = v;
            }
        }
        Ok(StarkOperator { basis, z })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `H = diag(E_i - reference) + F z` in GHz for a field in V/cm.
    pub fn hamiltonian(&self, field: f64, reference_ghz: f64) -> Mat<f64> {
        let scale = v_per_cm_to_au(field) * HARTREE_GHZ;
        let n = self.len();
        Mat::from_fn(n, n, |i, k| {
            let off = scale * self.z[(i, k)];
            if i == k {
                self.basis.energies[i] - reference_ghz + off
            } else {
                off
            }
        })
    }

    /// Dipole couplings `<i| r_q |lower, m_lower>` from a low-lying level to
    /// every basis state, in atomic units.
    pub fn couplings_from(
        &self,
        cache: &RadialCache,
        lower: &RydbergLevel,
        m_lower: HalfInt,
        q: i32,
    ) -> Result<Vec<f64>> {
        self.basis
            .states
            .iter()
            .map(|s: &BasisState| {
                if m_lower.twice().abs() > lower.j.twice() || s.level.l.abs_diff(lower.l) != 1 {
                    return Ok(0.0);
                }
                dipole_element(cache, &s.level, s.m, lower, m_lower, q)
            })
            .collect()
    }
}

/// Stark Hamiltonian of one block in GHz, energies relative to the
/// ionization limit.
pub fn build_hamiltonian(
    atom: &AtomData,
    cache: &RadialCache,
    spec: &BasisSpec,
    field: f64,
) -> Result<Mat<f64>> {
    Ok(StarkOperator::new(atom, cache, spec)?.hamiltonian(field, 0.0))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric matrix.
pub fn eigh(h: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::domain(format!("eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}
