//! An operator read from a JSON configuration: two affine branches
//! `L f(z) = f(z/3)/2 + f((z+1)/3)/2` on the unit disc. It maps polynomials of
//! degree `k` to polynomials of degree `k`, so its eigenvalues are `3^{-k}`.

use transfer_spectra::report::{cmd_spectrum, RunConfig};

const CONFIG: &str = r#"{
  "version": 1,
  "operator": {
    "kind": "branches",
    "branches": [
      {"type": "affine", "weight": [0.5, 0.0], "matrix": [[[0.3333333333333333, 0.0]]], "offset": [[0.0, 0.0]]},
      {"type": "expr",
       "weight": {"real": 0.5},
       "map": [{"div": [{"add": [{"var": 0}, {"real": 1.0}]}, {"real": 3.0}]}],
       "weight_sup": 0.5}
    ]
  },
  "geometry": {"center": [[0.0, 0.0]], "radius": 1.0},
  "numerics": {"size": 12, "sizes": [6, 12]},
  "n_max": 12
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::from_json(CONFIG)?;
    let resolved = config.resolve_params()?;
    println!(
        "r = {:.6} ({}), W = {:.6} ({})",
        resolved.params.r, resolved.r_source, resolved.params.w, resolved.w_source
    );
    let report = cmd_spectrum(&config)?;
    for row in 0..6 {
        let re = report.table.get(row, "re").and_then(|c| c.as_f64()).unwrap_or(f64::NAN);
        println!("lambda_{} = {re:.15}  (3^-{row} = {:.15})", row + 1, 3f64.powi(-(row as i32)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
