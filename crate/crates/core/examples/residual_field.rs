//! Upper bound on a stray field from an unresolved high-l manifold.

use rydspec::radial::RadialCache;
use rydspec::stark::{manifold_fan, residual_field_bound, BasisSpec};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let spec = BasisSpec { delta_n: 2, ..BasisSpec::new(40) };
    let fan = manifold_fan(&atom, &RadialCache::default(), &spec, 40, 0.01)?;
    println!(
        "n = 40 manifold: {} components, slopes {:.1}..{:.1} MHz/(V/cm), widest gap {:.2}",
        fan.slopes.len(),
        fan.slopes[0],
        fan.slopes[fan.slopes.len() - 1],
        fan.max_gap()
    );
    for resolution in [1.0, 2.2, 5.0] {
        println!("resolution {resolution} MHz: E < {:.4} V/cm", residual_field_bound(&fan, resolution)?);
    }
    Ok(())
}
