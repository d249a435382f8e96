//! Autler-Townes splitting of the intermediate level versus red intensity.

use rydspec::dressed::{autler_townes_spectrum, dressed_lines, rabi_frequency, saturation_sweep, LaserDrive};
use rydspec::spectra::FrequencyGrid;
use rydspec::structure::AtomData;

fn main() -> rydspec::Result<()> {
    let atom = AtomData::rb87();
    let drive = LaserDrive::d2(&atom, 151.0)?;
    let omega = rabi_frequency(&drive)?;
    println!("s = 151: Omega = {omega:.2} MHz");
    let detuned = dressed_lines(omega, 8.0)?;
    println!(
        "detuned by 8 MHz: lines at {:+.2} / {:+.2} MHz, weights {:.2} / {:.2}",
        detuned.centers[0], detuned.centers[1], detuned.amplitudes[0], detuned.amplitudes[1]
    );
    let grid = FrequencyGrid::new(-40.0, 40.0, 0.1).points();
    let s = autler_townes_spectrum(&drive, &grid, 1.0, &[2.24])?;
    println!("peaks at {:?} MHz", s.peaks(1e-3));
    for p in saturation_sweep(&drive, &[1.0, 2.0, 10.0, 50.0, 151.0, 400.0], &grid, 1.0, &[6.0])? {
        println!("s = {:>5}: splitting {:6.2} MHz, resolved {}", p.saturation, p.splitting, p.resolved());
    }
    Ok(())
}
