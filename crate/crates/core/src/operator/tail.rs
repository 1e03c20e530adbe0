//! Infinite branch tails.
//!
//! The only infinite family in the catalogue is the continued-fraction type
//! `w_n(z) = (n + z)^{-s}`, `T_n(z) = 1 / (n + z)`, `n >= first`, which for
//! `s = 2` is the Gauss map transfer operator.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::{Branch, MapFn, ScalarFn};
use crate::error::{invalid, Result};
use crate::hardy_basis::BallGeometry;

const QUADRATURE_ORDER: usize = 24;
const DIFFERENCE_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub enum BranchTail {
    ContinuedFraction { first: u64, exponent: f64 },
}

/// Linear functional approximating the omitted tail: the tail sum of
/// `w_n f(T_n)` is `sum_q weights[q] * f(nodes[q])`. The last two nodes carry
/// the first Euler-Maclaurin midpoint correction, whose modulus doubles as
/// the residual estimate.
#[derive(Debug, Clone)]
pub struct TailRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub correction_nodes: usize,
}

impl BranchTail {
    pub(crate) fn validate(&self, geometry: &BallGeometry) -> Result<()> {
        match *self {
            BranchTail::ContinuedFraction { first, exponent } => {
                if geometry.dim() != 1 {
                    return Err(invalid("geometry", "continued-fraction branches need d = 1"));
                }
                if !(exponent > 1.0 && exponent.is_finite()) {
                    return Err(invalid(
                        "exponent",
                        format!("weights (n+z)^-s are summable only for s > 1, got {exponent}"),
                    ));
                }
                if first == 0 {
                    return Err(invalid("first", "branch shifts start at 1"));
                }
                let gap = first as f64 + geometry.center()[0].re - geometry.radius();
                if gap <= 0.0 {
                    return Err(invalid(
                        "geometry",
                        format!("the ball meets the pole of branch n = {first}"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The `j`-th tail branch (zero-based).
    pub fn branch(&self, geometry: &BallGeometry, j: u64) -> Branch {
        match *self {
            BranchTail::ContinuedFraction { first, exponent } => {
                let n = (first + j) as f64;
                let gap = n + geometry.center()[0].re - geometry.radius();
                Branch {
                    weight: ScalarFn::ShiftPower { shift: n, exponent },
                    map: MapFn::Mobius { shift: n },
                    weight_sup: Some(real_power(gap, -exponent)),
                }
            }
        }
    }

    /// `tau(skip) >= sum_{j >= skip} sup_B |w_j|`.
    pub fn weight_bound(&self, geometry: &BallGeometry, skip: u64) -> f64 {
        match *self {
            BranchTail::ContinuedFraction { first, exponent } => {
                // sup_B |n + z|^{-s} = (n + Re c - R)^{-s} =: g(n), decreasing in n
                let offset = geometry.center()[0].re - geometry.radius();
                let m = (first + skip) as f64;
                let gap = m + offset;
                let head = real_power(gap, -exponent);
                if gap > 1.0 {
                    // sum_{n >= m} g(n) <= int_{m-1}^inf g
                    (gap - 1.0).powf(1.0 - exponent) / (exponent - 1.0)
                } else {
                    // g(m) + int_m^inf g
                    head + gap.powf(1.0 - exponent) / (exponent - 1.0)
                }
            }
        }
    }

    /// Upper bound on `sup_{j >= skip} sup_B |phi(T_j(z))|` in normalized
    /// coordinates.
    pub fn map_bound(&self, geometry: &BallGeometry, skip: u64) -> f64 {
        match *self {
            BranchTail::ContinuedFraction { first, .. } => {
                let c = geometry.center()[0];
                let radius = geometry.radius();
                let t_max = 1.0 / ((first + skip) as f64 + c.re - radius);
                if c.im.abs() <= 1e-15 * (1.0 + c.re.abs()) {
                    // T_n(B) is a disc with real diameter inside (0, t_max]
                    (c.re.abs()).max((t_max - c.re).abs()) / radius
                } else {
                    (c.norm() + t_max) / radius
                }
            }
        }
    }

    /// `sum_{j < count} |w_j(z)|`, summed in index order. `None` when a term
    /// is not finite.
    pub fn weight_modulus_sum(&self, z: Complex64, count: u64) -> Option<f64> {
        let BranchTail::ContinuedFraction { first, exponent } = *self;
        let y2 = z.im * z.im;
        let mut total = 0.0;
        if exponent == 2.0 {
            for j in 0..count {
                let a = (first + j) as f64 + z.re;
                total += (a * a + y2).recip();
            }
        } else {
            for j in 0..count {
                let a = (first + j) as f64 + z.re;
                total += real_power(a * a + y2, -0.5 * exponent);
            }
        }
        total.is_finite().then_some(total)
    }

    /// `max_{j < count} |phi(T_j(z))|` and the first index attaining it.
    /// `None` when an image is not finite.
    pub fn map_radius_max(&self, geometry: &BallGeometry, z: Complex64, count: u64) -> Option<(f64, u64)> {
        let BranchTail::ContinuedFraction { first, .. } = *self;
        let c = geometry.center()[0];
        let (mut best, mut arg) = (-1.0f64, 0u64);
        for j in 0..count {
            // |1/(n+z) - c|^2 = |1 - c (n+z)|^2 / |n+z|^2
            let a = (first + j) as f64 + z.re;
            let b = z.im;
            let re = 1.0 - c.re * a + c.im * b;
            let im = -(c.re * b + c.im * a);
            let q = (re * re + im * im) / (a * a + b * b);
            if !q.is_finite() {
                return None;
            }
            if q > best {
                best = q;
                arg = j;
            }
        }
        Some((best.max(0.0).sqrt() / geometry.radius(), arg))
    }

    /// Whether [`BranchTail::rule`] is available for this tail.
    pub fn has_quadrature(&self) -> bool {
        match *self {
            BranchTail::ContinuedFraction { exponent, .. } => exponent.fract() == 0.0,
        }
    }

    /// Quadrature rule for `sum_{j >= skip} w_j(z) f(T_j(z))`.
    ///
    /// With `m` the first omitted shift and `G(x) = (x + z)^{-s} f(1/(x + z))`,
    /// the sum is `int_{m - 1/2}^inf G + G'(m - 1/2) / 24` up to higher
    /// Euler-Maclaurin terms. Substituting `t = 1/(x + z)` turns the integral
    /// into `int_0^{t0} t^{s-2} f(t) dt`, evaluated by Gauss-Legendre on the
    /// segment; the derivative is a central difference.
    pub fn rule(&self, skip: u64, z: Complex64) -> Option<TailRule> {
        if !self.has_quadrature() {
            return None;
        }
        let BranchTail::ContinuedFraction { first, exponent } = *self;
        let s = exponent as i32;
        let a = (first + skip) as f64 - 0.5;
        let t0 = (a + z).inv();
        let (xs, ws) = gauss_legendre();
        let mut nodes = Vec::with_capacity(QUADRATURE_ORDER + 2);
        let mut weights = Vec::with_capacity(QUADRATURE_ORDER + 2);
        for (x, w) in xs.iter().zip(ws) {
            let t = t0 * (0.5 * (1.0 + x));
            nodes.push(t);
            weights.push(t0 * (0.5 * w) * t.powi(s - 2));
        }
        let h = DIFFERENCE_STEP;
        for (x, sign) in [(a + h, 1.0), (a - h, -1.0)] {
            let u = (x + z).inv();
            nodes.push(u);
            weights.push(u.powi(s) * (sign / (48.0 * h)));
        }
        Some(TailRule {
            nodes,
            weights,
            correction_nodes: 2,
        })
    }
}

impl TailRule {
    pub fn apply(&self, mut f: impl FnMut(Complex64) -> Complex64) -> (Complex64, f64) {
        let split = self.nodes.len() - self.correction_nodes;
        let mut integral = Complex64::new(0.0, 0.0);
        let mut correction = Complex64::new(0.0, 0.0);
        for (q, (t, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let term = w * f(*t);
            if q < split {
                integral += term;
            } else {
                correction += term;
            }
        }
        (integral + correction, correction.norm())
    }
}

fn real_power(x: f64, s: f64) -> f64 {
    if s.fract() == 0.0 && s.abs() < 64.0 {
        x.powi(s as i32)
    } else {
        x.powf(s)
    }
}

/// Nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(QUADRATURE_ORDER))
}

fn legendre_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}
