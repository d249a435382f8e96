//! Broadened 41D spectrum at a fixed field with Zeeman and laser widths.

use rydspec::angular::HalfInt;
use rydspec::radial::RadialCache;
use rydspec::spectra::{ground_zeeman_width, stark_spectrum, CloudGeometry, FrequencyGrid};
use rydspec::stark::{stark_map, BasisSpec, MapRequest};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let geom = CloudGeometry::default();
    let fields = vec![1.95, 2.0, 2.05];
    let basis = BasisSpec { delta_n: 1, ..BasisSpec::new(41) };
    let map = stark_map(&atom, &RadialCache::default(), &MapRequest::new(basis, fields))?;
    let zeeman = ground_zeeman_width(&atom, &geom, HalfInt::integer(2))?;
    println!("ground-state Zeeman width {zeeman:.2} MHz");
    let grid = FrequencyGrid::new(-250.0, 50.0, 0.2).points();
    let s = stark_spectrum(&map, 1, &geom, &[zeeman], &[1.0], &grid, 1e-4)?;
    for line in &s.lines {
        println!("{:>8}: {:+8.2} MHz, strength {:.3e}", line.label, line.center, line.strength);
    }
    println!("peaks at {:?} MHz", s.peaks(1e-3).iter().map(|p| (p * 10.0).round() / 10.0).collect::<Vec<_>>());
    Ok(())
}
