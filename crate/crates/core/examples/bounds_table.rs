//! Eigenvalue bounds for the Gauss map operator and for a three-dimensional
//! operator with `r = 0.4`, `W = 2`.

use transfer_spectra::bounds::{
    best_bound, eigenvalue_bound_d1, eigenvalue_bound_explicit, eigenvalue_bound_geommean,
    BoundParams,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gauss = BoundParams::new(1, 2.0 / 3.0, std::f64::consts::PI.powi(2) / 2.0)?;
    println!("gauss map, d = 1");
    println!("{:>4} {:>14} {:>14} {:>14}", "n", "d1", "explicit", "geommean");
    for n in [1u64, 2, 3, 5, 10, 20, 50] {
        println!(
            "{n:>4} {:>14.6e} {:>14.6e} {:>14.6e}",
            eigenvalue_bound_d1(n, gauss.r, gauss.w)?,
            eigenvalue_bound_explicit(n, &gauss),
            eigenvalue_bound_geommean(n, &gauss)?,
        );
    }

    let p = BoundParams::new(3, 0.4, 2.0)?;
    println!("\nd = 3, r = 0.4, W = 2");
    for n in [1u64, 10, 100, 1000, 10_000] {
        let best = best_bound(n, &p)?;
        println!("{n:>6} {:>14.6e} ({:?})", best.value, best.source);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
