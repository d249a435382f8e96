//! Field-ionization ramp and the MCP arrival trace of one excitation cycle.

use rydspec::sequence::{
    detection_trace, ionization_threshold, Background, Detector, FieldRamp, Populations, RydbergPopulation,
};

fn main() -> rydspec::Result<()> {
    let ramp = FieldRamp::default();
    for n_star in [35.0, 39.65, 45.0] {
        let threshold = ionization_threshold(n_star)?;
        let t = ramp.crossing_time(threshold).map_or("never".into(), |t| format!("{t:.1} us"));
        println!("n* = {n_star}: threshold {threshold:.1} V/cm, reached at {t}");
    }
    let pops = Populations {
        prompt_ions: 30.0,
        rydberg: vec![RydbergPopulation { label: "41D5/2".into(), n_star: 39.65, count: 1000.0 }],
        background: Some(Background { start: -100.0, stop: 0.0, count: 40.0 }),
    };
    let tl = detection_trace(&pops, &ramp, &Detector::default(), None)?;
    for f in tl.annotate() {
        println!("({}) {}: {:.1} us, {} counts", f.tag, f.description, f.first, f.count);
    }
    let seeded = Detector { monte_carlo: Some(5000), ..Detector::default() };
    let mc = detection_trace(&pops, &ramp, &seeded, Some(1))?;
    println!("integral: analytic {:.2}, Monte Carlo {:.2}", tl.integral(), mc.integral());
    Ok(())
}
