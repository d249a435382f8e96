//! Adiabatic Stark map around n = 40 and the character of the 41D tracks.

use rydspec::radial::RadialCache;
use rydspec::stark::{stark_map, BasisSpec, MapRequest};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let fields: Vec<f64> = (0..=10).map(|i| i as f64).collect();
    let basis = BasisSpec { delta_n: 1, ..BasisSpec::new(40) };
    let map = stark_map(&atom, &cache, &MapRequest::new(basis, fields))?;
    println!("{} tracks; trace drift {:.1e} GHz", map.track_count(), map.trace(10) - map.trace(0));
    for label in ["41D3/2", "41D5/2"] {
        let t = map.target_index(label)?;
        let energies = map.target_energies(t);
        for (i, field) in map.fields.iter().enumerate().step_by(2) {
            let k = map.dominant_track(t, i);
            println!(
                "{label} {field:>4} V/cm: {:+9.1} MHz, character {:.3}",
                energies[i] * 1e3,
                map.characters[i][k][t]
            );
        }
    }
    std::fs::write("stark_map.csv", map.to_csv()).map_err(|e| rydspec::Error::io("stark_map.csv", e))?;
    Ok(())
}
