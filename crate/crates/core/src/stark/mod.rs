//! Stark effect in the `|n l j m_j>` basis: Hamiltonian blocks, field scans
//! with adiabatic tracking, hyperfine-resolved line sets and the manifold fan.

mod basis;
mod fan;
mod hamiltonian;
mod hyperfine;
mod map;

pub use basis::{Basis, BasisSpec, BasisState};
pub use fan::{manifold_fan, residual_field_bound, ManifoldFan};
pub use hamiltonian::{angular_dipole, build_hamiltonian, dipole_element, eigh, StarkOperator};
pub use hyperfine::{hyperfine_stark_lines, HyperfineLine, HyperfineLineSet, HyperfineRequest};
pub use map::{stark_map, MapRequest, StarkMap, TRACK_THRESHOLD};
