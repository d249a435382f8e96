//! Physical constants and unit conversions used at module boundaries.

/// Hartree energy expressed as a frequency in GHz.
pub const HARTREE_GHZ: f64 = 6_579_683.920_502;
/// Atomic unit of electric field in V/cm.
pub const AU_FIELD_V_PER_CM: f64 = 5.142_206_747_63e9;
/// Speed of light in cm/s, used for cm^-1 -> Hz.
pub const SPEED_OF_LIGHT_CM_PER_S: f64 = 2.997_924_58e10;
/// Bohr magneton in MHz/G.
pub const BOHR_MAGNETON_MHZ_PER_G: f64 = 1.399_624_493_61;

pub const UM_PER_CM: f64 = 1.0e4;

pub fn v_per_cm_to_au(field: f64) -> f64 {
    field / AU_FIELD_V_PER_CM
}

pub fn au_to_v_per_cm(field: f64) -> f64 {
    field * AU_FIELD_V_PER_CM
}

pub fn hartree_to_ghz(energy: f64) -> f64 {
    energy * HARTREE_GHZ
}

pub fn inverse_cm_to_ghz(wavenumber: f64) -> f64 {
    wavenumber * SPEED_OF_LIGHT_CM_PER_S * 1e-9
}
