//! Eigenvalues of the Gauss operator across truncation sizes.

use transfer_spectra::bounds::BoundParams;
use transfer_spectra::galerkin::AssemblyOptions;
use transfer_spectra::operator::BranchFamily;
use transfer_spectra::spectrum::convergence_study;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let family = BranchFamily::gauss();
    let p = BoundParams::new(1, 2.0 / 3.0, std::f64::consts::PI.powi(2) / 2.0)?;
    let sizes = [10, 20, 40];
    let table = convergence_study(&family, &p, &sizes, &AssemblyOptions::new(sizes[0]))?;
    for row in table.rows.iter().take(12) {
        let deltas: Vec<String> = row
            .deltas
            .iter()
            .map(|d| d.map_or("-".into(), |d| format!("{d:.1e}")))
            .collect();
        let last = row.values.last().copied().flatten().unwrap_or_default();
        println!("{:>3} {:+.12e}  {}  {}", row.n, last.re, deltas.join(" "), row.stable);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
