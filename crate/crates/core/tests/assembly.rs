use num_complex::Complex64;

use transfer_spectra::bounds::BoundParams;
use transfer_spectra::galerkin::{assemble, AssemblyOptions};
use transfer_spectra::hardy_basis::BallGeometry;
use transfer_spectra::operator::{apply_operator_with, estimate_r, estimate_w, BranchFamily, TailMode};
use transfer_spectra::spectrum::{convergence_study, eigenvalues};

fn gauss() -> (BranchFamily, BoundParams) {
    let p = BoundParams::new(1, 2.0 / 3.0, std::f64::consts::PI.powi(2) / 2.0).unwrap();
    (BranchFamily::gauss(), p)
}

#[test]
fn entries_stable_under_denser_sampling() {
    let (family, p) = gauss();
    let coarse = assemble(&family, &p, &AssemblyOptions::new(8).samples(64).branch_cut(10_000)).unwrap();
    let fine = assemble(&family, &p, &AssemblyOptions::new(8).samples(256).branch_cut(40_000)).unwrap();
    let worst = (&coarse.entries - &fine.entries).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn coarse_sampling_error_is_aliasing() {
    // direct Taylor coefficients of L u^7 on a wide circle
    let (family, p) = gauss();
    let p7 = |w: &[Complex64]| ((w[0] - 1.0) / 1.5).powu(7);
    let (radius, m) = (0.95f64, 2048usize);
    let values: Vec<Complex64> = (0..m)
        .map(|i| {
            let u = Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / m as f64);
            apply_operator_with(&family, &p7, &[1.0 + 1.5 * u], 10_000, 1e3, TailMode::Quadrature)
                .unwrap()
                .value
        })
        .collect();
    let coefficient = |j: usize| {
        let sum: Complex64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * ((i * j) % m) as f64 / m as f64))
            .sum();
        sum / m as f64 / radius.powi(j as i32)
    };
    let rho = (1.0 + p.r) / 2.0;
    let alias: Complex64 = (1..4).map(|l| coefficient(64 * l) * rho.powi(64 * l as i32)).sum();

    let coarse = assemble(&family, &p, &AssemblyOptions::new(8).samples(64)).unwrap();
    let fine = assemble(&family, &p, &AssemblyOptions::new(8).samples(256)).unwrap();
    let gap = coarse.entries[(0, 7)] - fine.entries[(0, 7)];
    assert!((gap - alias).norm() <= 1e-12, "{gap} vs {alias}");
    assert!(gap.norm() > 1e-8);
}

#[test]
fn independent_of_sampling_radius() {
    let (family, p) = gauss();
    let r = p.r;
    let a = assemble(&family, &p, &AssemblyOptions::new(24).rho((1.0 + r) / 2.0)).unwrap();
    let b = assemble(&family, &p, &AssemblyOptions::new(24).rho((1.0 + 3.0 * r) / 4.0)).unwrap();
    for k in 0..24 {
        let budget = a.meta.column_errors[k].total() + b.meta.column_errors[k].total();
        for j in 0..24 {
            let gap = (a.entries[(j, k)] - b.entries[(j, k)]).norm();
            assert!(gap <= budget, "({j}, {k}): {gap:e} > {budget:e}");
        }
    }
}

#[test]
fn columns_decay_like_r_to_the_k() {
    let (family, p) = gauss();
    let m = assemble(&family, &p, &AssemblyOptions::new(40)).unwrap();
    for (k, norm) in m.column_norms().iter().enumerate() {
        let e = m.meta.column_errors[k];
        let bound = p.w * p.r.powi(k as i32) * (1.0 + 1e-6) + e.tail + e.aliasing;
        assert!(*norm <= bound, "column {k}: {norm} > {bound}");
    }
}

#[test]
fn similarity_invariance() {
    let (family, p) = gauss();
    let reference = eigenvalues(&assemble(&family, &p, &AssemblyOptions::new(60)).unwrap()).unwrap();
    let shifted = BranchFamily::continued_fraction(
        2.0,
        BallGeometry::new(vec![Complex64::new(1.1, 0.0)], 1.4).unwrap(),
    )
    .unwrap();
    let q = BoundParams::new(
        1,
        estimate_r(&shifted, 512, 10_000).unwrap().value,
        estimate_w(&shifted, 512, 10_000).unwrap().value,
    )
    .unwrap();
    let other = eigenvalues(&assemble(&shifted, &q, &AssemblyOptions::new(60)).unwrap()).unwrap();
    for k in 0..5 {
        let gap = (reference.eigenvalues[k] - other.eigenvalues[k]).norm();
        assert!(gap <= 1e-8, "lambda_{}: {gap:e}", k + 1);
    }
}

#[test]
fn leading_pair_converges_between_30_and_60() {
    let (family, p) = gauss();
    let t = convergence_study(&family, &p, &[30, 60], &AssemblyOptions::new(30)).unwrap();
    for row in &t.rows[..2] {
        let delta = row.deltas[0].unwrap();
        assert!(delta < 1e-10, "lambda_{}: {delta:e}", row.n);
    }
}

#[test]
fn first_six_stable_between_10_and_20() {
    let (family, p) = gauss();
    let t = convergence_study(&family, &p, &[10, 20], &AssemblyOptions::new(10)).unwrap();
    for row in t.rows.iter().take(6) {
        assert!(row.stable, "lambda_{}: {:e}", row.n, row.deltas[0].unwrap());
    }
}

#[test]
fn small_sizes_converge_geometrically() {
    let (family, p) = gauss();
    let t = convergence_study(&family, &p, &[10, 20, 40], &AssemblyOptions::new(10)).unwrap();
    for row in t.rows.iter().take(6) {
        let (a, b) = (row.deltas[0].unwrap(), row.deltas[1].unwrap());
        assert!(b < 0.05 * a, "lambda_{}: {a:e} then {b:e}", row.n);
    }
}
