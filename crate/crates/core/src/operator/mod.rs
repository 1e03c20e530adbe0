//! Transfer operator data `L f = sum_i w_i * (f o T_i)` on a ball `B`, and
//! estimation of the constants `W` and `r` that drive the eigenvalue bounds.
//!
//! `W = sup_B sum_i |w_i|` and `r` is the smallest ratio such that every
//! `T_i(B)` lies in the concentric ball of radius `r * R`. Both are suprema of
//! moduli of holomorphic functions (or finite sums of them), so they are
//! attained on the boundary sphere and boundary sampling estimates them from
//! below up to sampling density. Built-in families register closed forms.

mod expr;
mod tail;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use expr::Expr;
pub use tail::{BranchTail, TailRule};

use crate::error::{invalid, Error, Result};
use crate::hardy_basis::BallGeometry;


/// Scalar weight `w: B -> C`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Constant(Complex64),
    /// `(shift + z_0)^{-exponent}` on the principal branch.
    ShiftPower { shift: f64, exponent: f64 },
    Expr(Expr),
}

impl ScalarFn {
    #[inline]
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            ScalarFn::Constant(c) => *c,
            ScalarFn::ShiftPower { shift, exponent } => shift_power(z[0] + shift, *exponent),
            ScalarFn::Expr(e) => e.eval(z),
        }
    }

    /// `|w(z)|`, with a real-arithmetic path for shifted powers.
    #[inline]
    pub fn modulus(&self, z: &[Complex64]) -> f64 {
        match self {
            ScalarFn::ShiftPower { shift, exponent } => {
                let x = z[0].re + shift;
                let sq = x * x + z[0].im * z[0].im;
                if *exponent == 2.0 {
                    sq.recip()
                } else {
                    sq.powf(-0.5 * exponent)
                }
            }
            other => other.eval(z).norm(),
        }
    }
}

#[inline]
fn shift_power(base: Complex64, exponent: f64) -> Complex64 {
    if exponent.fract() == 0.0 && exponent.abs() < 64.0 {
        base.powi(-(exponent as i32))
    } else {
        base.powf(-exponent)
    }
}

/// Branch map `T: B -> C^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFn {
    /// `T(z) = A z + b`.
    Affine {
        matrix: Vec<Vec<Complex64>>,
        offset: Vec<Complex64>,
    },
    /// `T(z) = 1 / (shift + z_0)`.
    Mobius { shift: f64 },
    Expr(Vec<Expr>),
}

impl MapFn {
    pub fn output_dim(&self) -> usize {
        match self {
            MapFn::Affine { offset, .. } => offset.len(),
            MapFn::Mobius { .. } => 1,
            MapFn::Expr(es) => es.len(),
        }
    }

    #[inline]
    pub fn eval_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        match self {
            MapFn::Affine { matrix, offset } => {
                for ((o, row), b) in out.iter_mut().zip(matrix).zip(offset) {
                    *o = row.iter().zip(z).map(|(a, zi)| a * zi).sum::<Complex64>() + b;
                }
            }
            MapFn::Mobius { shift } => out[0] = (z[0] + shift).inv(),
            MapFn::Expr(es) => {
                for (o, e) in out.iter_mut().zip(es) {
                    *o = e.eval(z);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: ScalarFn,
    pub map: MapFn,
    /// Certified `sup_B |w|`, when known.
    pub weight_sup: Option<f64>,
}

impl Branch {
    pub fn new(weight: ScalarFn, map: MapFn) -> Self {
        Self {
            weight,
            map,
            weight_sup: None,
        }
    }

    pub fn with_weight_sup(mut self, sup: f64) -> Self {
        self.weight_sup = Some(sup);
        self
    }

    /// Constant weight, affine map in one variable: `w = weight`, `T(z) = a z + b`.
    pub fn affine_1d(weight: Complex64, a: Complex64, b: Complex64) -> Self {
        Self::new(
            ScalarFn::Constant(weight),
            MapFn::Affine {
                matrix: vec![vec![a]],
                offset: vec![b],
            },
        )
        .with_weight_sup(weight.norm())
    }
}

/// Closed-form values registered for a built-in family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    #[serde(rename = "W", alias = "w")]
    pub w: Option<f64>,
    pub r: Option<f64>,
}

/// Operator data `{(w_i, T_i)}`: finitely many explicit branches followed
/// by an optional infinite tail. Branch `i` (zero-based) is the `i`-th finite
/// branch, then the tail branches in order.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFamily {
    name: String,
    geometry: BallGeometry,
    finite: Vec<Branch>,
    tail: Option<BranchTail>,
    closed_forms: ClosedForms,
}

impl BranchFamily {
    pub fn new(
        name: impl Into<String>,
        geometry: BallGeometry,
        finite: Vec<Branch>,
        tail: Option<BranchTail>,
    ) -> Result<Self> {
        let d = geometry.dim();
        if finite.is_empty() && tail.is_none() {
            return Err(invalid("branches", "a family needs at least one branch"));
        }
        for b in &finite {
            if b.map.output_dim() != d {
                return Err(invalid(
                    "map",
                    format!("branch map has {} outputs for a {d}-dimensional ball", b.map.output_dim()),
                ));
            }
            if let MapFn::Affine { matrix, .. } = &b.map {
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                    return Err(invalid("matrix", format!("affine maps need a {d}x{d} matrix")));
                }
            }
        }
        if let Some(t) = &tail {
            t.validate(&geometry)?;
        }
        Ok(Self {
            name: name.into(),
            geometry,
            finite,
            tail,
            closed_forms: ClosedForms::default(),
        })
    }

    /// Perron-Frobenius operator of the Gauss map,
    /// `L f(z) = sum_{n >= 1} (n + z)^{-2} f(1 / (n + z))`, on the disc of
    /// radius 3/2 about 1, with `W = pi^2 / 2` and `r = 2/3`.
    pub fn gauss() -> Self {
        let geometry = BallGeometry::new(vec![Complex64::new(1.0, 0.0)], 1.5).expect("valid");
        let mut family = Self::continued_fraction(2.0, geometry).expect("valid");
        family.name = "gauss".into();
        family.closed_forms = ClosedForms {
            w: Some(PI * PI / 2.0),
            r: Some(2.0 / 3.0),
        };
        family
    }

    /// `w_n(z) = (n + z)^{-s}`, `T_n(z) = 1 / (n + z)`, `n >= 1`.
    pub fn continued_fraction(exponent: f64, geometry: BallGeometry) -> Result<Self> {
        Self::new(
            "continued_fraction",
            geometry,
            Vec::new(),
            Some(BranchTail::ContinuedFraction { first: 1, exponent }),
        )
    }

    pub fn with_closed_forms(mut self, forms: ClosedForms) -> Self {
        self.closed_forms = forms;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn geometry(&self) -> &BallGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn finite_branches(&self) -> &[Branch] {
        &self.finite
    }

    pub fn tail(&self) -> Option<&BranchTail> {
        self.tail.as_ref()
    }

    pub fn closed_forms(&self) -> ClosedForms {
        self.closed_forms
    }

    pub fn is_infinite(&self) -> bool {
        self.tail.is_some()
    }

    /// Number of branches actually evaluated for a requested cut: every
    /// finite branch is always included.
    pub fn effective_cut(&self, branch_cut: usize) -> usize {
        if self.tail.is_some() {
            branch_cut.max(self.finite.len())
        } else {
            self.finite.len()
        }
    }

    fn tail_skip(&self, branch_cut: usize) -> u64 {
        (self.effective_cut(branch_cut) - self.finite.len()) as u64
    }

    /// `tau(N_b) >= sum_{i > N_b} sup_B |w_i|`; zero for finite families.
    pub fn tail_weight_bound(&self, branch_cut: usize) -> Result<f64> {
        match &self.tail {
            None => Ok(0.0),
            Some(t) => {
                let tau = t.weight_bound(&self.geometry, self.tail_skip(branch_cut));
                if tau.is_finite() {
                    Ok(tau)
                } else {
                    Err(Error::MissingTailBound)
                }
            }
        }
    }

    /// Visits branches `0..effective_cut(branch_cut)` in order.
    pub fn for_each_branch<E>(
        &self,
        branch_cut: usize,
        mut visit: impl FnMut(usize, &Branch) -> std::result::Result<(), E>,
    ) -> std::result::Result<(), E> {
        for (i, b) in self.finite.iter().enumerate() {
            visit(i, b)?;
        }
        if let Some(t) = &self.tail {
            let base = self.finite.len();
            for j in 0..self.tail_skip(branch_cut) {
                visit(base + j as usize, &t.branch(&self.geometry, j))?;
            }
        }
        Ok(())
    }

    /// Quadrature rule for the branches beyond the cut, when the tail has one.
    pub fn tail_rule(&self, branch_cut: usize, z: Complex64) -> Option<TailRule> {
        let t = self.tail.as_ref()?;
        t.rule(self.tail_skip(branch_cut), z)
    }

    pub fn has_tail_quadrature(&self) -> bool {
        self.tail.as_ref().is_some_and(BranchTail::has_quadrature)
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Certificate {
    ClosedForm,
    Sampled {
        samples: usize,
        branch_cut: usize,
        tail_bound: f64,
        /// `sum_i sup_B |w_i|` when every branch carries a certified sup;
        /// always an upper bound for `W`.
        sup_sum_bound: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub value: f64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    /// Branch attaining the maximum; `None` when it came from a tail bound
    /// or a closed form.
    pub worst_branch: Option<usize>,
    pub certificate: Certificate,
}

/// `M` points on the unit sphere of `C^d` (normalized coordinates):
/// equispaced on the circle for `d = 1`, seeded pseudo-random otherwise.
pub fn boundary_samples(d: usize, m: usize) -> Vec<Vec<Complex64>> {
    if d == 1 {
        return (0..m)
            .map(|j| vec![Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)])
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + d as u64);
    (0..m)
        .map(|_| {
            let mut v: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
                .collect();
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|c| *c /= norm);
            v
        })
        .collect()
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

fn check_sampling(samples: usize, branch_cut: usize) -> Result<()> {
    if samples < 64 {
        return Err(invalid("boundary_samples", format!("need at least 64, got {samples}")));
    }
    if branch_cut == 0 {
        return Err(invalid("branch_cut", "must be at least 1"));
    }
    Ok(())
}

/// `W`, from the registered closed form when there is one, otherwise by
/// boundary sampling.
pub fn estimate_w(family: &BranchFamily, samples: usize, branch_cut: usize) -> Result<WeightEstimate> {
    check_sampling(samples, branch_cut)?;
    if let Some(w) = family.closed_forms.w {
        return Ok(WeightEstimate {
            value: w,
            certificate: Certificate::ClosedForm,
        });
    }
    estimate_w_sampled(family, samples, branch_cut)
}

/// `max_m sum_{i <= N_b} |w_i(z_m)| + tau(N_b)` over boundary samples `z_m`.
pub fn estimate_w_sampled(
    family: &BranchFamily,
    samples: usize,
    branch_cut: usize,
) -> Result<WeightEstimate> {
    check_sampling(samples, branch_cut)?;
    let geometry = family.geometry();
    let tau = family.tail_weight_bound(branch_cut)?;
    let skip = family.tail_skip(branch_cut);
    let base = family.finite.len();
    let totals = boundary_samples(family.dim(), samples)
        .par_iter()
        .map(|u| {
            let z = geometry.denormalize(u);
            let mut total = 0.0;
            for (i, b) in family.finite.iter().enumerate() {
                let m = b.weight.modulus(&z);
                if !m.is_finite() {
                    return Err(Error::NonFinite { branch: i });
                }
                total += m;
            }
            if let Some(t) = &family.tail {
                total += t
                    .weight_modulus_sum(z[0], skip)
                    .ok_or(Error::NonFinite { branch: base })?;
            }
            Ok(total)
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = totals.into_iter().fold(0.0, f64::max);
    let mut sup_sum = Some(0.0);
    family.for_each_branch(branch_cut, |_, b| {
        sup_sum = sup_sum.zip(b.weight_sup).map(|(a, s)| a + s);
        Ok::<_, Error>(())
    })?;
    Ok(WeightEstimate {
        value: best + tau,
        certificate: Certificate::Sampled {
            samples,
            branch_cut: family.effective_cut(branch_cut),
            tail_bound: tau,
            sup_sum_bound: sup_sum.map(|s| s + tau),
        },
    })
}

/// Contraction ratio `r`, from the registered closed form when there is
/// one, otherwise by boundary sampling.
pub fn estimate_r(family: &BranchFamily, samples: usize, branch_cut: usize) -> Result<RatioEstimate> {
    check_sampling(samples, branch_cut)?;
    if let Some(r) = family.closed_forms.r {
        return Ok(RatioEstimate {
            value: r,
            worst_branch: None,
            certificate: Certificate::ClosedForm,
        });
    }
    estimate_r_sampled(family, samples, branch_cut)
}

/// `max |phi(T_i(z_m))|` over boundary samples and branches up to the cut,
/// combined with the tail's declared map bound. Values at or above one are
/// a violated hypothesis and reported as an error.
pub fn estimate_r_sampled(
    family: &BranchFamily,
    samples: usize,
    branch_cut: usize,
) -> Result<RatioEstimate> {
    check_sampling(samples, branch_cut)?;
    let geometry = family.geometry();
    let d = family.dim();
    let skip = family.tail_skip(branch_cut);
    let base = family.finite.len();
    // per sample: largest image radius and the first branch attaining it
    let per_sample = boundary_samples(d, samples)
        .par_iter()
        .map(|u| {
            let z = geometry.denormalize(u);
            let mut image = vec![Complex64::new(0.0, 0.0); d];
            let (mut best, mut branch) = (0.0f64, None);
            for (i, b) in family.finite.iter().enumerate() {
                b.map.eval_into(&z, &mut image);
                let radius = geometry.normalized_norm(&image);
                if !radius.is_finite() {
                    return Err(Error::NonFinite { branch: i });
                }
                if radius > best {
                    (best, branch) = (radius, Some(i));
                }
            }
            if let Some(t) = &family.tail {
                let (radius, j) = t
                    .map_radius_max(geometry, z[0], skip)
                    .ok_or(Error::NonFinite { branch: base })?;
                if radius > best {
                    (best, branch) = (radius, Some(base + j as usize));
                }
            }
            Ok((best, branch))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut best, mut worst_branch, mut worst_sample) = (0.0f64, None, 0usize);
    for (m, (radius, branch)) in per_sample.into_iter().enumerate() {
        if radius > best {
            (best, worst_branch, worst_sample) = (radius, branch, m);
        }
    }
    if let Some(t) = family.tail() {
        let skip = (family.effective_cut(branch_cut) - family.finite_branches().len()) as u64;
        let bound = t.map_bound(geometry, skip);
        if bound >= best {
            best = bound;
            worst_branch = None;
        }
    }
    if best >= 1.0 {
        return Err(Error::ContractionViolated {
            branch: worst_branch.unwrap_or(family.effective_cut(branch_cut)),
            sample: worst_sample,
            radius: best,
        });
    }
    Ok(RatioEstimate {
        value: best,
        worst_branch,
        certificate: Certificate::Sampled {
            samples,
            branch_cut: family.effective_cut(branch_cut),
            tail_bound: family.tail_weight_bound(branch_cut)?,
            sup_sum_bound: None,
        },
    })
}

/// Treatment of the branches beyond the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// Drop them; the error is bounded by `tau(N_b) * sup |f|`.
    #[default]
    Truncate,
    /// Add a quadrature estimate of their sum when the tail supports it;
    /// the reported error is then an estimate rather than a bound.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: Complex64,
    pub tail_error: f64,
    /// Whether `tail_error` is a rigorous bound.
    pub certified: bool,
}

/// `(L f)(z)` truncated after `N_b` branches, with the certified bound
/// `tau(N_b) * f_sup` on what was dropped. `f` takes physical coordinates
/// and must be defined on the image ball; `f_sup` bounds it there.
pub fn apply_operator(
    family: &BranchFamily,
    f: &dyn Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    branch_cut: usize,
    f_sup: f64,
) -> Result<OperatorValue> {
    apply_operator_with(family, f, z, branch_cut, f_sup, TailMode::Truncate)
}

pub fn apply_operator_with(
    family: &BranchFamily,
    f: &dyn Fn(&[Complex64]) -> Complex64,
    z: &[Complex64],
    branch_cut: usize,
    f_sup: f64,
    mode: TailMode,
) -> Result<OperatorValue> {
    if z.len() != family.dim() {
        return Err(invalid("z", format!("expected a point in C^{}", family.dim())));
    }
    let mut image = vec![Complex64::new(0.0, 0.0); family.dim()];
    let mut value = Complex64::new(0.0, 0.0);
    family.for_each_branch(branch_cut, |i, b| {
        b.map.eval_into(z, &mut image);
        let term = b.weight.eval(z) * f(&image);
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::NonFinite { branch: i });
        }
        value += term;
        Ok(())
    })?;
    let rule = match mode {
        TailMode::Quadrature if family.dim() == 1 => family.tail_rule(branch_cut, z[0]),
        _ => None,
    };
    match rule {
        Some(rule) => {
            let (tail, residual) = rule.apply(|t| f(&[t]));
            if !(tail.re.is_finite() && tail.im.is_finite()) {
                return Err(Error::NonFinite {
                    branch: family.effective_cut(branch_cut),
                });
            }
            Ok(OperatorValue {
                value: value + tail,
                tail_error: residual,
                certified: false,
            })
        }
        None => Ok(OperatorValue {
            value,
            tail_error: family.tail_weight_bound(branch_cut)? * f_sup,
            certified: true,
        }),
    }
}
