//! Driving the command-line pipeline from a TOML configuration in code.

use rydspec::cli::{run, Command, RunConfig};

fn main() -> rydspec::Result<()> {
    let config = RunConfig::from_toml(
        r#"
        output_dir = "rydspec-out"
        seed = 3

        [autler]
        sweep_s = [2.0, 20.0, 151.0]

        [sequence.detector]
        monte_carlo = 2000
        "#,
    )?;
    for command in [Command::ValidateData, Command::Autler { sweep_s: None }, Command::Sequence { annotate: true }] {
        let report = run(&command, &config, None)?;
        for line in &report.summary {
            println!("{line}");
        }
        for file in &report.files {
            println!("  wrote {}", file.display());
        }
    }
    Ok(())
}
