//! Hyperfine-resolved 41D lines as the Stark shift overtakes the hyperfine
//! splitting.

use rydspec::radial::RadialCache;
use rydspec::stark::{hyperfine_stark_lines, BasisSpec, HyperfineRequest};
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let req = HyperfineRequest::new(BasisSpec { delta_n: 2, l_max: Some(8), ..BasisSpec::new(41) });
    let fields = [1e-3, 0.05, 0.2, 1.0];
    for set in hyperfine_stark_lines(&atom, &RadialCache::default(), &req, &fields)? {
        println!("{} V/cm", set.field);
        for label in ["41D5/2", "41D3/2"] {
            let f: Vec<String> = set.components(label, 1e-3).iter().map(|f| f.to_string()).collect();
            println!("  {label}: F = {}", f.join(", "));
        }
        for line in set.lines.iter().filter(|l| l.strength > 1e-3 * set.lines[0].strength.max(1e-300)).take(6) {
            println!(
                "  {:+8.2} MHz  {} F={} m_F={}  strength {:.3e}",
                line.energy_mhz, line.level, line.f, line.m_f, line.strength
            );
        }
    }
    Ok(())
}
