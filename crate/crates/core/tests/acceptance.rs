//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transfer_spectra::bounds::{
    chain_bound, eigenvalue_bound_explicit, proof_chain_sequence, simplified_approx_bound,
    tail_sum, BoundKind, BoundParams, BoundSequence,
};
use transfer_spectra::galerkin::{assemble, AssemblyOptions};
use transfer_spectra::hardy_basis::{
    dim_poly, enumerate_multiindices, eval_basis, reproducing_kernel, BallGeometry,
};
use transfer_spectra::operator::{
    estimate_r, estimate_w, estimate_w_sampled, Branch, BranchFamily, Certificate, MapFn, ScalarFn,
};
use transfer_spectra::report::config::ParamsOverride;
use transfer_spectra::report::{cmd_bounds, cmd_spectrum, cmd_verify, ExitStatus, RunConfig};
use transfer_spectra::spectrum::{convergence_study, eigenvalues, spectrum_of, weyl_check};

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const GAUSS_W: f64 = PI * PI / 2.0;
const GAUSS_R: f64 = 2.0 / 3.0;
const GAUSS_LAMBDA_2: f64 = -0.3036630029;

fn gauss_params() -> BoundParams {
    BoundParams::new(1, GAUSS_R, GAUSS_W).expect("valid")
}

fn gauss_constants() -> Check {
    let start = Instant::now();
    let family = BranchFamily::gauss();
    let w = estimate_w(&family, 256, 10_000).map_err(err)?;
    ensure(w.certificate == Certificate::ClosedForm, || "W not from closed form".into())?;
    ensure((w.value - GAUSS_W).abs() <= 1e-10, || format!("closed-form W = {}", w.value))?;
    let sampled = estimate_w_sampled(&family, 10_000, 100_000).map_err(err)?;
    ensure((sampled.value - GAUSS_W).abs() <= 1e-3, || {
        format!("sampled W = {}", sampled.value)
    })?;
    let r = estimate_r(&family, 256, 10_000).map_err(err)?;
    ensure((r.value - GAUSS_R).abs() <= 1e-9, || format!("r = {}", r.value))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 5.0, || format!("took {elapsed:.2}s"))?;
    Ok(format!(
        "W = {:.12}, sampled |W - pi^2/2| = {:.1e}, r = {}, {elapsed:.2}s",
        w.value,
        (sampled.value - GAUSS_W).abs(),
        r.value
    ))
}

fn example_bound_display() -> Check {
    let config = RunConfig {
        params: ParamsOverride {
            d: Some(1),
            r: Some(GAUSS_R),
            w: Some(GAUSS_W),
        },
        n_max: 52,
        ..RunConfig::default()
    };
    let report = cmd_bounds(&config).map_err(err)?;
    let d1 = |n: usize| report.table.get(n - 1, "explicit_d1").and_then(|c| c.as_f64()).unwrap();
    let exact = 3.0 * PI * PI / (2.0 * 5f64.sqrt());
    ensure((d1(1) - exact).abs() <= 1e-12 * exact, || format!("bound(1) = {}", d1(1)))?;
    let mut worst = 0.0f64;
    for n in 1..=50 {
        worst = worst.max((d1(n + 2) / d1(n) - GAUSS_R).abs() / GAUSS_R);
    }
    ensure(worst <= 1e-12, || format!("ratio error {worst:.2e}"))?;
    Ok(format!("bound(1) = {:.15}, worst ratio error {worst:.1e}", d1(1)))
}

fn gauss_spectrum() -> Check {
    let config = RunConfig::default();
    let start = Instant::now();
    let report = cmd_spectrum(&config).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 60.0, || format!("spectrum took {elapsed:.1}s"))?;
    let value = |row: usize| {
        let get = |col| report.table.get(row, col).and_then(|c| c.as_f64()).unwrap();
        c(get("re"), get("im"))
    };
    let (l1, l2) = (value(0), value(1));
    ensure((l1 - 1.0).norm() <= 1e-9, || format!("lambda_1 = {l1}"))?;
    ensure((l2 - GAUSS_LAMBDA_2).norm() <= 1e-7, || format!("lambda_2 = {l2}"))?;

    // 1/(1+z) in normalized coordinates: coefficients (1/2)(-3/4)^j
    let p = config.resolve_params().map_err(err)?.params;
    let family = config.family().map_err(err)?;
    let matrix = assemble(&family, &p, &config.numerics.assembly_options()).map_err(err)?;
    let v = DVector::from_fn(matrix.size(), |j, _| c(0.5 * (-0.75f64).powi(j as i32), 0.0));
    let residual = (&matrix.entries * &v - &v).norm() / v.norm();
    ensure(residual <= 1e-9, || format!("eigenfunction residual {residual:.2e}"))?;

    let sizes = [30, 60, 120];
    let study = convergence_study(&family, &p, &sizes, &AssemblyOptions::new(sizes[0]))
        .map_err(err)?;
    let row = &study.rows[1];
    for (size, v) in sizes.iter().zip(&row.values) {
        let v = v.ok_or("missing lambda_2")?;
        ensure((v - GAUSS_LAMBDA_2).norm() <= 1e-7, || format!("lambda_2 at N = {size}: {v}"))?;
    }
    let spread = row.deltas.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    ensure(spread <= 1e-7, || format!("lambda_2 deltas {:?}", row.deltas))?;
    Ok(format!(
        "|lambda_1 - 1| = {:.1e}, lambda_2 = {:.12}, residual {residual:.1e}, 30/60/120 spread {spread:.1e}, {elapsed:.2}s",
        (l1 - 1.0).norm(),
        l2.re
    ))
}

fn bound_compliance() -> Check {
    let report = cmd_verify(&RunConfig::default()).map_err(err)?;
    let result = &report.summary["result"];
    let checked = result["checked"].as_u64().unwrap_or(0);
    let failed = result["failed"].as_array().map_or(0, Vec::len);
    ensure(report.status == ExitStatus::Success && failed == 0, || {
        format!("violations at {}", result["failed"])
    })?;
    ensure(checked >= 1, || "nothing checked".into())?;
    Ok(format!(
        "{checked} indices checked, 0 violations, {} below the significance floor",
        result["skipped_insignificant"]
    ))
}

fn chain_dominance() -> Check {
    let start = Instant::now();
    let n_max = 1000u64;
    let mut comparisons = 0usize;
    for d in 1..=5u32 {
        let chains = proof_chain_sequence(d, n_max).map_err(err)?;
        for r in (1..=9).map(|i| f64::from(i) / 10.0) {
            for w in [0.5, 1.0, 10.0] {
                let p = BoundParams::new(d, r, w).map_err(err)?;
                let geommean = BoundSequence::generate(BoundKind::GeommeanWeyl, p, n_max)
                    .map_err(err)?;
                for n in 1..=n_max {
                    let g = geommean.values[n as usize - 1];
                    let chain = chain_bound(&chains[n as usize - 1], &p);
                    let explicit = eigenvalue_bound_explicit(n, &p);
                    ensure(g <= chain * (1.0 + 1e-10), || {
                        format!("geommean {g} > chain {chain} at d={d} r={r} W={w} n={n}")
                    })?;
                    ensure(chain <= explicit * (1.0 + 1e-10), || {
                        format!("chain {chain} > explicit {explicit} at d={d} r={r} W={w} n={n}")
                    })?;
                    comparisons += 2;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 30.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!("{comparisons} comparisons, 0 counterexamples, {elapsed:.2}s"))
}

fn proof_inequalities() -> Check {
    let limit = 10_000u64;
    for d in 1..=5u32 {
        let df = f64::from(d);
        for l in 2..=limit {
            let (alpha, _) = simplified_approx_bound(l, d).map_err(err)?;
            let rhs = df * ((l - 1) as f64).powf(1.0 - 1.0 / df);
            ensure(alpha as f64 <= rhs, || format!("alpha~_{l} = {alpha} > {rhs} (d={d})"))?;
        }
        let factorial: f64 = (1..=d).map(f64::from).product();
        for (i, chain) in proof_chain_sequence(d, limit).map_err(err)?.iter().enumerate() {
            let n = (i + 1) as f64;
            let alpha_rhs = df.sqrt() * n.powf((df - 1.0) / (2.0 * df));
            ensure(chain.alpha <= alpha_rhs, || {
                format!("alpha_{n} = {} > {alpha_rhs} (d={d})", chain.alpha)
            })?;
            let beta_rhs = -df + factorial.powf(1.0 / df) * (df / (df + 1.0)) * n.powf(1.0 / df);
            ensure(chain.beta > beta_rhs, || {
                format!("beta_{n} = {} <= {beta_rhs} (d={d})", chain.beta)
            })?;
        }
    }
    Ok(format!("d <= 5, n, l <= {limit}: all three inequalities hold"))
}

fn tail_closed_form() -> Check {
    let mut worst = 0.0f64;
    for d in 1..=5u32 {
        for i in 1..=19 {
            let r = f64::from(i) * 0.05;
            let exact = (1.0 - r * r).powi(-(d as i32));
            let value = tail_sum(d, 0, r).map_err(err)?;
            let rel = (value - exact).abs() / exact;
            ensure(rel <= 1e-10, || format!("d={d} r={r}: {value} vs {exact}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn kernel_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_final = 0.0f64;
    for d in 1..=3usize {
        let max_degree: u32 = if d == 3 { 30 } else { 40 };
        let indices = enumerate_multiindices(d, max_degree);
        for _ in 0..20 {
            let mut z: Vec<Complex64> =
                (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let target = rng.gen_range(0.0..0.6);
            z.iter_mut().for_each(|v| *v *= target / norm);
            let s = target * target;
            let kernel = reproducing_kernel(&z, &z).map_err(err)?.re;
            ensure((kernel - (1.0 - s).powi(-(d as i32))).abs() <= 1e-13 * kernel, || {
                format!("kernel {kernel} at |z|^2 = {s}")
            })?;
            let mut partial = 0.0;
            let mut next = 0usize;
            for k in 0..=max_degree {
                while next < indices.len() && indices[next].degree() == u64::from(k) {
                    partial += eval_basis(&indices[next], &z).norm_sqr();
                    next += 1;
                }
                let h = dim_poly(d as u32 - 1, i64::from(k) + 1).map_err(err)? as f64;
                let bound = h * s.powi(k as i32 + 1) / (1.0 - s).powi(d as i32);
                let gap = kernel - partial;
                ensure(gap >= -1e-13 * kernel && gap <= bound + 1e-13 * kernel, || {
                    format!("d={d} K={k}: gap {gap:e} outside [0, {bound:e}]")
                })?;
                if k == max_degree {
                    worst_final = worst_final.max(gap.abs() / kernel);
                }
            }
        }
    }
    Ok(format!("60 points, final relative gap <= {worst_final:.1e}"))
}

fn weyl_inequality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..100 {
        let n = rng.gen_range(5..=50);
        let m = DMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let report = spectrum_of(&m).map_err(err)?;
        if let Some(row) = weyl_check(&report, n).map_err(err)?.iter().find(|r| !r.pass) {
            return Err(format!("random matrix {trial} (N = {n}) fails at n = {}", row.n));
        }
    }
    let gauss = eigenvalues(
        &assemble(&BranchFamily::gauss(), &gauss_params(), &AssemblyOptions::new(40)).map_err(err)?,
    )
    .map_err(err)?;
    let significant = gauss.significant_count();
    if let Some(row) = weyl_check(&gauss, significant).map_err(err)?.iter().find(|r| !r.pass) {
        return Err(format!("gauss matrix fails at n = {}", row.n));
    }
    Ok(format!("100 random matrices, gauss N = 40 over its {significant} significant indices"))
}

fn assembly_exactness() -> Check {
    let size = 16;
    let q = c(0.3, 0.4);
    let composition = BranchFamily::new(
        "composition",
        BallGeometry::unit(1),
        vec![Branch::affine_1d(c(1.0, 0.0), q, c(0.0, 0.0))],
        None,
    )
    .map_err(err)?;
    let p = BoundParams::new(1, q.norm(), 1.0).map_err(err)?;
    let m = assemble(&composition, &p, &AssemblyOptions::new(size)).map_err(err)?;
    let mut worst = 0.0f64;
    for j in 0..size {
        for k in 0..size {
            let exact = if j == k { q.powi(k as i32) } else { c(0.0, 0.0) };
            worst = worst.max((m.entries[(j, k)] - exact).norm());
        }
    }
    let spectrum = eigenvalues(&m).map_err(err)?;
    let mut expected: Vec<Complex64> = (0..size).map(|k| q.powi(k as i32)).collect();
    transfer_spectra::spectrum::order_eigenvalues(&mut expected);
    for (a, b) in spectrum.eigenvalues.iter().zip(&expected) {
        worst = worst.max((a - b).norm());
    }

    let shift = BranchFamily::new(
        "shift",
        BallGeometry::unit(1),
        vec![Branch::new(
            ScalarFn::Expr(transfer_spectra::operator::Expr::var(0)),
            MapFn::Affine {
                matrix: vec![vec![c(0.5, 0.0)]],
                offset: vec![c(0.0, 0.0)],
            },
        )],
        None,
    )
    .map_err(err)?;
    let p = BoundParams::new(1, 0.5, 1.0).map_err(err)?;
    let m = assemble(&shift, &p, &AssemblyOptions::new(size)).map_err(err)?;
    for j in 0..size {
        for k in 0..size {
            let exact = if j == k + 1 { 0.5f64.powi(k as i32) } else { 0.0 };
            worst = worst.max((m.entries[(j, k)] - exact).norm());
        }
    }
    for l in eigenvalues(&m).map_err(err)?.eigenvalues {
        worst = worst.max(l.norm());
    }
    ensure(worst <= 1e-12, || format!("worst deviation {worst:.2e}"))?;
    Ok(format!("entries and eigenvalues within {worst:.1e}"))
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("gauss constants W and r", gauss_constants),
        ("gauss bound display", example_bound_display),
        ("gauss spectrum", gauss_spectrum),
        ("bound compliance", bound_compliance),
        ("chain dominance", chain_dominance),
        ("proof inequalities", proof_inequalities),
        ("tail sum closed form", tail_closed_form),
        ("kernel identity", kernel_identity),
        ("weyl inequality", weyl_inequality),
        ("assembly exactness", assembly_exactness),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failures, checks.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
