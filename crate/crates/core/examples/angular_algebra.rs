//! Wigner 3j/6j symbols and Clebsch-Gordan coefficients on half-integers.

use rydspec::angular::{clebsch_gordan, wigner_3j, wigner_6j, HalfInt};

fn main() -> rydspec::Result<()> {
    let h = HalfInt::from_twice;
    // <j1 m1; j2 m2 | J M> for coupling l = 2 with s = 1/2
    for twice_m in [5, 3, 1] {
        let c = clebsch_gordan(h(4), h(twice_m - 1), h(1), h(1), h(5), h(twice_m))?;
        println!("<2 {}; 1/2 1/2 | 5/2 {}> = {c:+.6}", h(twice_m - 1), h(twice_m));
    }
    println!("(1 1 2; 0 0 0) = {:+.6}", wigner_3j(h(2), h(2), h(4), h(0), h(0), h(0))?);
    println!("{{3/2 3/2 1; 3 2 3/2}} = {:+.6}", wigner_6j(h(3), h(3), h(2), h(6), h(4), h(3))?);
    Ok(())
}
