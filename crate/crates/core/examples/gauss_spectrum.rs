//! Leading eigenvalues of the Gauss map transfer operator, with a residual
//! check against its invariant density `1 / (1 + z)`.

use num_complex::Complex64;
use transfer_spectra::bounds::BoundParams;
use transfer_spectra::galerkin::{assemble, AssemblyOptions};
use transfer_spectra::operator::BranchFamily;
use transfer_spectra::spectrum::eigenvalues;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let family = BranchFamily::gauss();
    let p = BoundParams::new(1, 2.0 / 3.0, std::f64::consts::PI.powi(2) / 2.0)?;
    let matrix = assemble(&family, &p, &AssemblyOptions::new(60))?;
    let report = eigenvalues(&matrix)?;

    for (n, l) in report.eigenvalues.iter().take(10).enumerate() {
        println!("lambda_{:<2} = {:+.15}", n + 1, l.re);
    }
    println!("significant: {}", report.significant_count());

    // in normalized coordinates 1/(1+z) = 1/(2 + 3u/2) = sum_j (1/2) (-3u/4)^j
    let v: Vec<Complex64> = (0..matrix.size())
        .map(|j| Complex64::new(0.5 * (-0.75f64).powi(j as i32), 0.0))
        .collect();
    let v = nalgebra::DVector::from_vec(v);
    let residual = (&matrix.entries * &v - &v).norm() / v.norm();
    println!("|| M v - v || / || v || = {residual:.3e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
