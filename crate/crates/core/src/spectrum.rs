//! Eigenvalues of truncated operators, ordered by decreasing modulus, with
//! singular values, a finite-dimensional Weyl inequality check and
//! convergence across truncation sizes.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{invalid, Error, Result};
use crate::galerkin::{assemble, AssemblyOptions, GalerkinMatrix};
use crate::operator::BranchFamily;

/// Deltas at or below this are counted as converged.
pub const STABILITY_TOLERANCE: f64 = 1e-8;
/// Slack in log space for the Weyl comparison.
pub const WEYL_TOLERANCE: f64 = 1e-9;

const SCHUR_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by modulus, descending; near-equal moduli by ascending argument.
    pub eigenvalues: Vec<Complex64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `|lambda_n(N) - lambda_n(N')|` against a larger truncation, when known.
    pub convergence: Option<Vec<f64>>,
    /// Eigenvalues with smaller modulus are treated as numerical noise.
    pub significance_floor: f64,
}

impl SpectrumReport {
    /// `n` is one-based.
    pub fn is_significant(&self, n: usize) -> bool {
        n >= 1 && self.eigenvalues.get(n - 1).is_some_and(|l| l.norm() >= self.significance_floor)
    }

    /// Length of the leading run of significant eigenvalues.
    pub fn significant_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .take_while(|l| l.norm() >= self.significance_floor)
            .count()
    }

    /// Whether eigenvalue `n` (one-based) is within tolerance of the larger
    /// truncation. Without convergence data nothing counts as stable.
    pub fn is_stable(&self, n: usize) -> bool {
        self.convergence
            .as_ref()
            .and_then(|d| d.get(n.wrapping_sub(1)))
            .is_some_and(|&d| d <= STABILITY_TOLERANCE)
    }

    /// Attaches deltas against the spectrum of a larger truncation.
    pub fn with_reference(mut self, reference: &SpectrumReport) -> Self {
        let deltas = self
            .eigenvalues
            .iter()
            .zip(&reference.eigenvalues)
            .map(|(a, b)| (a - b).norm())
            .collect();
        self.convergence = Some(deltas);
        self
    }
}

/// Sorts by modulus descending. Runs of moduli equal to within `1e-12`
/// relative (conjugate pairs, rotations) are ordered by ascending argument
/// in `(-pi, pi]`; the sort is stable so exact ties keep input order.
pub fn order_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let scale = values.first().map_or(0.0, |v| v.norm());
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len()
            && (values[end - 1].norm() - values[end].norm()).abs() <= 1e-12 * scale
        {
            end += 1;
        }
        values[start..end].sort_by(|a, b| argument(*a).total_cmp(&argument(*b)));
        start = end;
    }
}

fn argument(z: Complex64) -> f64 {
    // atan2 yields [-pi, pi]; fold -pi onto pi
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Eigenvalues and singular values of a Galerkin matrix. Entries no larger
/// than their roundoff estimate are indistinguishable from zero and are
/// flushed before factorization.
pub fn eigenvalues(matrix: &GalerkinMatrix) -> Result<SpectrumReport> {
    let mut entries = matrix.entries.clone();
    let n = matrix.size();
    let rho = matrix.meta.rho;
    for (k, mut column) in entries.column_iter_mut().enumerate() {
        // the recorded estimate carries the last row's rho^{-(N-1)}
        let worst = matrix.meta.column_errors.get(k).map_or(0.0, |e| e.roundoff);
        for (j, v) in column.iter_mut().enumerate() {
            if v.norm() <= worst * rho.powi((n - 1 - j) as i32) {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    spectrum_of(&entries)
}

fn triangular_diagonal(matrix: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = matrix.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let upper = (0..n).all(|j| (j + 1..n).all(|i| matrix[(i, j)] == zero));
    let lower = (0..n).all(|j| (0..j).all(|i| matrix[(i, j)] == zero));
    (upper || lower).then(|| matrix.diagonal().iter().copied().collect())
}

/// Eigenvalues and singular values of any square complex matrix.
pub fn spectrum_of(matrix: &DMatrix<Complex64>) -> Result<SpectrumReport> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(invalid("matrix", "must be square"));
    }
    if matrix.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(invalid("matrix", "entries must be finite"));
    }
    if n == 0 {
        return Ok(SpectrumReport {
            eigenvalues: Vec::new(),
            singular_values: Vec::new(),
            convergence: None,
            significance_floor: 1e-12,
        });
    }
    let mut eigenvalues = match triangular_diagonal(matrix) {
        Some(diagonal) => diagonal,
        None => Schur::try_new(matrix.clone(), f64::EPSILON, SCHUR_MAX_ITERATIONS)
            .and_then(|schur| schur.eigenvalues())
            .ok_or(Error::EigenSolver { size: n })?
            .iter()
            .copied()
            .collect(),
    };
    order_eigenvalues(&mut eigenvalues);

    let mut singular_values: Vec<f64> = matrix.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    let max_column = matrix.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(SpectrumReport {
        eigenvalues,
        singular_values,
        convergence: None,
        significance_floor: (f64::EPSILON * n as f64 * max_column).max(1e-12),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub n: usize,
    /// `sum_{k <= n} ln |lambda_k|`
    pub lhs: f64,
    /// `sum_{k <= n} ln s_k`
    pub rhs: f64,
    pub pass: bool,
}

/// `prod_{k <= n} |lambda_k| <= prod_{k <= n} s_k` for `n = 1..=n_max`, in
/// log space. For a matrix the singular values are its approximation
/// numbers, so this is Weyl's inequality in finite dimension.
pub fn weyl_check(report: &SpectrumReport, n_max: usize) -> Result<Vec<WeylRow>> {
    if n_max > report.eigenvalues.len() {
        return Err(invalid(
            "n_max",
            format!("only {} eigenvalues available, asked for {n_max}", report.eigenvalues.len()),
        ));
    }
    let (mut lhs, mut rhs) = (0.0f64, 0.0f64);
    Ok((0..n_max)
        .map(|k| {
            lhs += report.eigenvalues[k].norm().ln();
            rhs += report.singular_values[k].ln();
            WeylRow {
                n: k + 1,
                lhs,
                rhs,
                pass: !(lhs > rhs + WEYL_TOLERANCE),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// One-based eigenvalue index.
    pub n: usize,
    /// `lambda_n` at each size, absent where `n` exceeds that size.
    pub values: Vec<Option<Complex64>>,
    /// `|lambda_n(size_i) - lambda_n(size_{i+1})|` for consecutive sizes.
    pub deltas: Vec<Option<f64>>,
    /// Last available delta is within [`STABILITY_TOLERANCE`].
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub sizes: Vec<usize>,
    pub branch_cuts: Vec<usize>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn stable_indices(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.stable).map(|r| r.n).collect()
    }
}

/// Assembles at each size (ascending) and compares spectra index by index.
/// Sample counts follow the default `max(8N, 256)` unless `base` fixes one, in
/// which case it and the branch cut scale with `N / sizes[0]`.
pub fn convergence_study(
    family: &BranchFamily,
    params: &BoundParams,
    sizes: &[usize],
    base: &AssemblyOptions,
) -> Result<ConvergenceTable> {
    let spectra = convergence_spectra(family, params, sizes, base)?;
    Ok(convergence_table(sizes, &spectra.0, spectra.1))
}

fn convergence_spectra(
    family: &BranchFamily,
    params: &BoundParams,
    sizes: &[usize],
    base: &AssemblyOptions,
) -> Result<(Vec<SpectrumReport>, Vec<usize>)> {
    if sizes.len() < 2 {
        return Err(invalid("sizes", "need at least two truncation sizes"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("sizes", "must be strictly ascending"));
    }
    let first = sizes[0];
    let mut reports = Vec::with_capacity(sizes.len());
    let mut cuts = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let scale = |x: usize| (x as f64 * size as f64 / first as f64).round() as usize;
        let mut opts = *base;
        opts.size = size;
        opts.samples = base.samples.map(scale);
        opts.branch_cut = scale(base.branch_cut);
        let matrix = assemble(family, params, &opts)?;
        cuts.push(matrix.meta.branch_cut);
        reports.push(eigenvalues(&matrix)?);
    }
    Ok((reports, cuts))
}

/// Builds the comparison table from spectra already computed.
pub fn convergence_table(
    sizes: &[usize],
    spectra: &[SpectrumReport],
    branch_cuts: Vec<usize>,
) -> ConvergenceTable {
    let largest = spectra.iter().map(|s| s.eigenvalues.len()).max().unwrap_or(0);
    let rows = (0..largest)
        .map(|i| {
            let values: Vec<Option<Complex64>> =
                spectra.iter().map(|s| s.eigenvalues.get(i).copied()).collect();
            let deltas: Vec<Option<f64>> = values
                .windows(2)
                .map(|w| match (w[0], w[1]) {
                    (Some(a), Some(b)) => Some((a - b).norm()),
                    _ => None,
                })
                .collect();
            let stable = deltas
                .iter()
                .rev()
                .find_map(|d| *d)
                .is_some_and(|d| d <= STABILITY_TOLERANCE);
            ConvergenceRow {
                n: i + 1,
                values,
                deltas,
                stable,
            }
        })
        .collect();
    ConvergenceTable {
        sizes: sizes.to_vec(),
        branch_cuts,
        rows,
    }
}

/// Spectrum at `size` with deltas against a truncation of twice the size.
pub fn spectrum_with_doubling(
    family: &BranchFamily,
    params: &BoundParams,
    options: &AssemblyOptions,
) -> Result<(SpectrumReport, GalerkinMatrix)> {
    let matrix = assemble(family, params, options)?;
    let report = eigenvalues(&matrix)?;
    let mut bigger = *options;
    bigger.size = 2 * options.size;
    bigger.samples = options.samples.map(|m| 2 * m);
    let reference = eigenvalues(&assemble(family, params, &bigger)?)?;
    Ok((report.with_reference(&reference), matrix))
}
