//! Weyl's inequality `prod |lambda_k| <= prod s_k` on a seeded random matrix
//! and on the Gauss operator truncation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transfer_spectra::bounds::BoundParams;
use transfer_spectra::galerkin::{assemble, AssemblyOptions};
use transfer_spectra::operator::BranchFamily;
use transfer_spectra::spectrum::{eigenvalues, spectrum_of, weyl_check};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random = DMatrix::from_fn(12, 12, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let report = spectrum_of(&random)?;
    println!("random 12x12");
    for row in weyl_check(&report, 12)? {
        println!("{:>3} {:>10.4} <= {:>10.4}  {}", row.n, row.lhs, row.rhs, row.pass);
    }

    let p = BoundParams::new(1, 2.0 / 3.0, std::f64::consts::PI.powi(2) / 2.0)?;
    let gauss = eigenvalues(&assemble(&BranchFamily::gauss(), &p, &AssemblyOptions::new(40))?)?;
    let rows = weyl_check(&gauss, gauss.significant_count())?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    println!("gauss: {} indices checked, {failures} failures", rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
