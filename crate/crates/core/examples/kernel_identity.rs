//! Partial sums of `sum |p_n(z)|^2` over the monomial basis approach the
//! reproducing kernel `(1 - |z|^2)^{-d}` on the diagonal.

use num_complex::Complex64;
use transfer_spectra::hardy_basis::{kernel_partial_sum, reproducing_kernel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.25)];
    let exact = reproducing_kernel(&z, &z)?.re;
    println!("K(z, z) = {exact:.15}");
    for degree in [0u32, 2, 5, 10, 20, 40] {
        let partial = kernel_partial_sum(&z, degree);
        println!("degree <= {degree:>2}: {partial:.15}  gap {:.2e}", exact - partial);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
