//! Moving the excitation beam through an electric-field gradient, and the
//! bias field that reproduces a measured shift ratio.

use rydspec::radial::RadialCache;
use rydspec::spectra::{fit_operating_field, gradient_addressing_scan, CloudGeometry};
use rydspec::stark::{stark_map, BasisSpec, MapRequest};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let geom = CloudGeometry::default();
    let fields: Vec<f64> = (0..=60).map(|i| 0.1 * i as f64).collect();
    let basis = BasisSpec { delta_n: 1, ..BasisSpec::new(41) };
    let map = stark_map(&atom, &RadialCache::default(), &MapRequest::new(basis, fields))?;
    let fit = fit_operating_field(&map, &geom, ("41D5/2", "41D3/2"), 98.0 / 75.0, geom.diameter_um)?;
    println!(
        "E0 = {:.3} V/cm: 41D5/2 moves {:+.2} MHz, 41D3/2 {:+.2} MHz across the cloud (ratio {:+.3})",
        fit.e0, fit.shift_a, fit.shift_b, fit.ratio
    );
    let offsets = [-250.0, -125.0, 0.0, 125.0, 250.0];
    for trace in gradient_addressing_scan(&map, &geom, fit.e0, &offsets, &[1.0])? {
        println!("{}", trace.target);
        for p in &trace.points {
            println!(
                "  {:+6.0} um  {:.3} V/cm  {:+8.2} MHz  width {:.2} MHz",
                p.offset_um, p.field, p.center_mhz, p.width_mhz
            );
        }
    }
    Ok(())
}
