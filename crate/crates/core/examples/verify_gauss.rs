//! Runs the `verify` pipeline on the built-in Gauss configuration and
//! prints the summary.

use transfer_spectra::report::{cmd_verify, ExitStatus, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::default();
    config.numerics.size = 40;
    let report = cmd_verify(&config)?;
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    if report.status != ExitStatus::Success {
        return Err("bound violated".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
