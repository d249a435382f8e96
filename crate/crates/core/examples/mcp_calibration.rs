//! MCP detection efficiency from MOT depletion under photo-ionization.

use rydspec::sequence::mcp_calibration;

fn main() -> rydspec::Result<()> {
    let c = mcp_calibration(2e7, 0.8, 3e6, 1.2e5)?;
    println!("unperturbed {:.3e} atoms, steady state {:.3e}", c.unperturbed, c.steady_state);
    println!("{:.2} atoms per signal unit", c.atoms_per_signal);
    println!("95% settled after {:.2} s", c.settle_time(0.95)?);
    for t in [0.0, 0.5, 1.0, 2.0] {
        println!("  t = {t} s: {:.3e} atoms", c.atoms_at(t));
    }
    if let Err(e) = mcp_calibration(2e7, 0.8, 3e7, 1.2e5) {
        println!("ionizing faster than loading: {e}");
    }
    Ok(())
}
