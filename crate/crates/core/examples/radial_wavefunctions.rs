//! Numerov radial wavefunctions and dipole matrix elements.

use rydspec::angular::HalfInt;
use rydspec::radial::{radial_dipole, solve_radial, RadialCache, RadialGrid, DEFAULT_STEP};
use rydspec::structure::{AtomData, RydbergLevel};

fn main() -> rydspec::Result<()> {
    let s1 = RydbergLevel::hydrogenic(1, 0, HalfInt::HALF)?;
    let p2 = RydbergLevel::hydrogenic(2, 1, HalfInt::from_twice(3))?;
    let sol = solve_radial(&s1, &RadialGrid::for_level(&s1, DEFAULT_STEP))?;
    println!("hydrogen 1s: <r> = {:.6} a0, norm residual {:.1e}", sol.expectation_r(1), sol.norm_residual);
    println!("hydrogen <1s|r|2p> = {:.6} a0", radial_dipole(&s1, &p2)?.abs());

    let atom = AtomData::rb87();
    let d = atom.level(41, 2, HalfInt::from_twice(5))?;
    let sol = solve_radial(&d, &RadialGrid::for_level(&d, DEFAULT_STEP))?;
    println!("41D5/2: n* = {:.5}, {} nodes, <r> = {:.1} a0", d.n_star, sol.node_count(), sol.expectation_r(1));
    let cache = RadialCache::default();
    for (n, l, twice_j) in [(42, 1, 3), (40, 3, 7), (39, 3, 5)] {
        let other = atom.level(n, l, HalfInt::from_twice(twice_j))?;
        println!("<41D5/2|r|{}> = {:+.2} a0", other.label(), cache.dipole(&d, &other)?);
    }
    Ok(())
}
