//! Galerkin matrix of a one-dimensional transfer operator in the orthonormal
//! monomial basis `p_k(u) = u^k` of `H^2` of the unit disc (normalized
//! coordinates `u = (z - c) / R`).
//!
//! Column `k` holds the Taylor coefficients of `g_k = L p_k`, which on the unit
//! circle are exactly the inner products `<L p_k, p_j>`. They are extracted by
//! a discrete Fourier sum over `M` samples on the circle `|u| = rho`:
//!
//! ```text
//! entry(j, k) = rho^{-j} / M * sum_m g_k(rho e^{2 pi i m / M}) e^{-2 pi i j m / M}
//! ```
//!
//! Since `|phi(T_i(z))| <= r` on the ball, `|g_k| <= W r^k` on the whole unit
//! disc, which bounds every Taylor coefficient of `g_k` and hence the aliasing
//! error.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{invalid, Error, Result};
use crate::operator::{BranchFamily, TailMode};

/// Default branch cut for infinite families.
pub const DEFAULT_BRANCH_CUT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub size: usize,
    /// Sample count `M`; defaults to `max(8 N, 256)`.
    pub samples: Option<usize>,
    /// Sampling radius; defaults to `(1 + r) / 2`.
    pub rho: Option<f64>,
    pub branch_cut: usize,
    pub tail_mode: TailMode,
}

impl AssemblyOptions {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            samples: None,
            rho: None,
            branch_cut: DEFAULT_BRANCH_CUT,
            tail_mode: TailMode::Quadrature,
        }
    }

    pub fn samples(mut self, m: usize) -> Self {
        self.samples = Some(m);
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn branch_cut(mut self, cut: usize) -> Self {
        self.branch_cut = cut;
        self
    }

    pub fn tail_mode(mut self, mode: TailMode) -> Self {
        self.tail_mode = mode;
        self
    }

    pub fn resolved_samples(&self) -> usize {
        self.samples.unwrap_or_else(|| (8 * self.size).max(256))
    }

    pub fn resolved_rho(&self, r: f64) -> f64 {
        self.rho.unwrap_or(0.5 * (1.0 + r))
    }
}

/// Error budget for one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnError {
    /// Aliasing bound `W r^k rho^M / (1 - rho^M)`.
    pub aliasing: f64,
    /// Omitted-branch error: `tau(N_b) r^k (1 + rho^M / (1 - rho^M))` when
    /// truncating, otherwise the sampled quadrature correction scaled by
    /// `rho^{-(N-1)}`.
    pub tail: f64,
    pub tail_certified: bool,
    /// Rounding estimate for the branch sum, amplified by `rho^{-(N-1)}`.
    pub roundoff: f64,
}

impl ColumnError {
    pub fn total(&self) -> f64 {
        self.aliasing + self.tail + self.roundoff
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinMeta {
    pub size: usize,
    pub rho: f64,
    pub samples: usize,
    pub branch_cut: usize,
    pub tail_mode: TailMode,
    pub r: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub column_errors: Vec<ColumnError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinMatrix {
    pub entries: DMatrix<Complex64>,
    pub meta: GalerkinMeta,
}

impl GalerkinMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.entries.column_iter().map(|c| c.norm()).collect()
    }

    /// `j,k,re,im` rows, column-major.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "j,k,re,im")?;
        for k in 0..self.size() {
            for j in 0..self.size() {
                let v = self.entries[(j, k)];
                writeln!(out, "{j},{k},{:e},{:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<[f64; 4]> = (0..self.size())
            .flat_map(|k| {
                (0..self.size()).map(move |j| (j, k))
            })
            .map(|(j, k)| {
                let v = self.entries[(j, k)];
                [j as f64, k as f64, v.re, v.im]
            })
            .collect();
        serde_json::json!({ "meta": self.meta, "entries": entries })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let meta: GalerkinMeta = serde_json::from_value(value["meta"].clone())?;
        let rows: Vec<[f64; 4]> = serde_json::from_value(value["entries"].clone())?;
        let n = meta.size;
        let mut entries = DMatrix::zeros(n, n);
        for [j, k, re, im] in rows {
            let (j, k) = (j as usize, k as usize);
            if j >= n || k >= n {
                return Err(invalid("entries", format!("index ({j}, {k}) outside a {n}x{n} matrix")));
            }
            entries[(j, k)] = Complex64::new(re, im);
        }
        Ok(Self { entries, meta })
    }
}

/// Builds the `N x N` Galerkin matrix of a one-dimensional family.
///
/// `params` supplies the `r` and `W` used for the default radius and the
/// error budget; they should be certified values where available.
pub fn assemble(
    family: &BranchFamily,
    params: &BoundParams,
    options: &AssemblyOptions,
) -> Result<GalerkinMatrix> {
    if family.dim() != 1 {
        return Err(invalid("dimension", "matrix assembly is implemented for d = 1 only"));
    }
    params.validate()?;
    let n = options.size;
    if n < 2 {
        return Err(invalid("size", format!("need N >= 2, got {n}")));
    }
    let m = options.resolved_samples();
    if m < 4 * n {
        return Err(invalid("samples", format!("need M >= 4N = {}, got {m}", 4 * n)));
    }
    let r = params.r;
    let rho = options.resolved_rho(r);
    if !(rho > r && rho < 1.0) {
        return Err(invalid("rho", format!("sampling radius must lie in (r, 1) = ({r}, 1), got {rho}")));
    }
    if options.branch_cut == 0 {
        return Err(invalid("branch_cut", "must be at least 1"));
    }

    let geometry = family.geometry();
    let center = geometry.center()[0];
    let radius = geometry.radius();
    let quadrature = options.tail_mode == TailMode::Quadrature && family.has_tail_quadrature();

    let columns: Vec<(Vec<Complex64>, Vec<f64>)> = (0..m)
        .into_par_iter()
        .map(|sample| {
            let u = Complex64::from_polar(rho, 2.0 * PI * sample as f64 / m as f64);
            let z = center + u * radius;
            sample_column(family, z, center, radius, n, options.branch_cut, quadrature)
                .map_err(|(column, e)| Error::Assembly {
                    column,
                    sample,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    // entry(j, k) = rho^{-j} / M sum_m g_k(m) w^{jm}, summed in sample order
    let twiddles: Vec<Complex64> = (0..m)
        .map(|q| Complex64::from_polar(1.0, -2.0 * PI * q as f64 / m as f64))
        .collect();
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let scale = rho.powi(-(j as i32)) / m as f64;
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (sample, (g, _)) in columns.iter().enumerate() {
                acc += g[k] * twiddles[(j * sample) % m];
            }
            entries[(j, k)] = acc * scale;
        }
    }

    let cut = family.effective_cut(options.branch_cut);
    let alias_factor = rho.powi(m as i32) / (1.0 - rho.powi(m as i32));
    let amplification = rho.powi(-(n as i32 - 1));
    let tau = family.tail_weight_bound(options.branch_cut)?;
    let column_errors = (0..n)
        .map(|k| {
            let envelope = params.w * r.powi(k as i32);
            let tail = if quadrature {
                columns.iter().map(|(_, res)| res[k]).fold(0.0, f64::max) * amplification
            } else {
                tau * r.powi(k as i32) * (1.0 + alias_factor)
            };
            ColumnError {
                aliasing: envelope * alias_factor,
                tail,
                tail_certified: !quadrature,
                roundoff: f64::EPSILON
                    * ((cut as f64).sqrt() + (m as f64).log2() + 4.0)
                    * envelope
                    * amplification,
            }
        })
        .collect();

    Ok(GalerkinMatrix {
        entries,
        meta: GalerkinMeta {
            size: n,
            rho,
            samples: m,
            branch_cut: cut,
            tail_mode: if quadrature { TailMode::Quadrature } else { TailMode::Truncate },
            r,
            w: params.w,
            column_errors,
        },
    })
}

/// `(g_0(z), ..., g_{N-1}(z))` and the per-column tail residual at one
/// physical point. Errors carry the column they were detected in.
fn sample_column(
    family: &BranchFamily,
    z: Complex64,
    center: Complex64,
    radius: f64,
    n: usize,
    branch_cut: usize,
    quadrature: bool,
) -> std::result::Result<(Vec<Complex64>, Vec<f64>), (usize, Error)> {
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    let point = [z];
    let mut image = [Complex64::new(0.0, 0.0)];
    family
        .for_each_branch(branch_cut, |i, b| {
            let w = b.weight.eval(&point);
            b.map.eval_into(&point, &mut image);
            let v = (image[0] - center) / radius;
            if !(w.re.is_finite() && w.im.is_finite() && v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { branch: i });
            }
            let mut p = w;
            for gk in g.iter_mut() {
                *gk += p;
                p *= v;
            }
            Ok(())
        })
        .map_err(|e| (0, e))?;

    let mut residual = vec![0.0; n];
    if quadrature {
        if let Some(rule) = family.tail_rule(branch_cut, z) {
            let split = rule.nodes.len() - rule.correction_nodes;
            let mut correction = vec![Complex64::new(0.0, 0.0); n];
            for (q, (t, weight)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let v = (t - center) / radius;
                let target = if q < split { &mut g } else { &mut correction };
                let mut p = *weight;
                for gk in target.iter_mut() {
                    *gk += p;
                    p *= v;
                }
            }
            for (k, (gk, ck)) in g.iter_mut().zip(&correction).enumerate() {
                *gk += ck;
                residual[k] = ck.norm();
            }
        }
    }
    if let Some(k) = g.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err((k, Error::NonFinite { branch: family.effective_cut(branch_cut) }));
    }
    Ok((g, residual))
}
