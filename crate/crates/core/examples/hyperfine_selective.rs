//! Blue spectrum with the ground hyperfine states excited through different
//! intermediate levels.

use rydspec::radial::RadialCache;
use rydspec::spectra::{hyperfine_selective_spectrum, FrequencyGrid, HfSelectRequest};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    for f1_fraction in [0.0, 0.5, 0.9] {
        let req = HfSelectRequest::new(f1_fraction, FrequencyGrid::new(-800.0, 400.0, 0.5));
        let s = hyperfine_selective_spectrum(&atom, &cache, &req)?;
        println!("F=1 fraction {f1_fraction}");
        for line in s.lines.iter().filter(|l| l.strength > 0.0) {
            println!("  {:<16} {:+8.2} MHz  {:.3e}", line.label, line.center, line.strength);
        }
    }
    Ok(())
}
