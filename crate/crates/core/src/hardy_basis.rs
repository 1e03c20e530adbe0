//! Monomial orthonormal basis of the Hardy space on the unit ball of `C^d`
//! and its reproducing kernel.
//!
//! With the boundary measure normalised to total mass one, the functions
//! `p_n(z) = K_n z^n` indexed by multi-indices `n` form an orthonormal basis,
//! where `K_n^2 = (|n| + d - 1)! / ((d - 1)! n!)`. The number of multi-indices
//! of degree at most `k` is `h_d(k) = binom(k + d, d)`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{invalid, Error, Result};

/// Exponent tuple `(n_1, ..., n_d)` with its cached total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    degree: u64,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(invalid("exponents", "a multi-index needs at least one entry"));
        }
        let degree = exponents.iter().map(|&e| u64::from(e)).sum();
        Ok(Self { exponents, degree })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            exponents: vec![0; dim.max(1)],
            degree: 0,
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }
}

/// A Euclidean ball in `C^d`. Basis and kernel computations happen in the
/// normalized coordinates `u = (z - center) / radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGeometry {
    center: Vec<Complex64>,
    radius: f64,
}

impl BallGeometry {
    pub fn new(center: Vec<Complex64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("center", "dimension must be at least 1"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        if center.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("center", "coordinates must be finite"));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            center: vec![Complex64::new(0.0, 0.0); dim.max(1)],
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[Complex64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn normalize_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        for ((o, zi), ci) in out.iter_mut().zip(z).zip(&self.center) {
            *o = (zi - ci) / self.radius;
        }
    }

    pub fn normalize(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
        self.normalize_into(z, &mut out);
        out
    }

    pub fn denormalize_into(&self, u: &[Complex64], out: &mut [Complex64]) {
        for ((o, ui), ci) in out.iter_mut().zip(u).zip(&self.center) {
            *o = ci + ui * self.radius;
        }
    }

    pub fn denormalize(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        self.denormalize_into(u, &mut out);
        out
    }

    /// Normalized Euclidean radius of a physical point, `|z - center| / R`.
    pub fn normalized_norm(&self, z: &[Complex64]) -> f64 {
        z.iter()
            .zip(&self.center)
            .map(|(zi, ci)| (zi - ci).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / self.radius
    }
}

/// `h_d(k) = binom(k + d, d)`, with `h_d(-1) = 0`. `d = 0` is accepted and
/// gives `h_0(k) = 1`, which is what `h_{d-1}` needs when `d = 1`.
pub fn dim_poly(d: u32, k: i64) -> Result<u128> {
    if k == -1 {
        return Ok(0);
    }
    if k < -1 {
        return Err(invalid("k", format!("must be >= -1, got {k}")));
    }
    let k = k as u128;
    let mut acc: u128 = 1;
    for i in 1..=u128::from(d) {
        // acc = binom(k + i - 1, i - 1) on entry; exact division afterwards
        acc = acc
            .checked_mul(k + i)
            .ok_or_else(|| Error::Overflow {
                what: format!("h_{d}({k})"),
            })?
            / i;
    }
    Ok(acc)
}

fn dim_poly_saturating(d: u32, k: u64) -> u128 {
    dim_poly(d, k as i64).unwrap_or(u128::MAX)
}

/// The unique `k >= 0` with `h_d(k - 1) < n <= h_d(k)`: the degree of the
/// `n`-th basis element in graded order.
pub fn degree_bracket(d: u32, n: u64) -> Result<u64> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("n", "index must be at least 1"));
    }
    if d == 1 {
        return Ok(n - 1);
    }
    // h_d(n - 1) >= n, so the answer lies in [0, n - 1].
    let target = u128::from(n);
    let (mut lo, mut hi) = (0u64, n - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if dim_poly_saturating(d, mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Walks `l = 1, 2, ...` and yields `degree_bracket(d, l)` incrementally.
#[derive(Debug, Clone)]
pub struct BracketWalk {
    d: u32,
    l: u64,
    k: u64,
    upper: u128,
}

impl BracketWalk {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        Ok(Self {
            d,
            l: 0,
            k: 0,
            upper: 1,
        })
    }
}

impl Iterator for BracketWalk {
    /// `(l, k)` with `h_d(k - 1) < l <= h_d(k)`.
    type Item = (u64, u64);

    fn next(&mut self) -> Option<Self::Item> {
        self.l = self.l.checked_add(1)?;
        while u128::from(self.l) > self.upper {
            self.k += 1;
            self.upper = dim_poly_saturating(self.d, self.k);
        }
        Some((self.l, self.k))
    }
}

/// All multi-indices of degree at most `max_degree`, by degree and then
/// lexicographically descending in the leading exponents, so that
/// `(1, 0)` precedes `(0, 1)`. This is the basis order used for indexing.
pub fn enumerate_multiindices(d: usize, max_degree: u32) -> Vec<MultiIndex> {
    let d = d.max(1);
    let mut out = Vec::new();
    let mut scratch = vec![0u32; d];
    for degree in 0..=max_degree {
        fill_degree(&mut scratch, 0, degree, &mut out);
    }
    out
}

fn fill_degree(scratch: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex {
            exponents: scratch.to_vec(),
            degree: scratch.iter().map(|&e| u64::from(e)).sum(),
        });
        return;
    }
    for e in (0..=remaining).rev() {
        scratch[pos] = e;
        fill_degree(scratch, pos + 1, remaining - e, out);
    }
}

fn factorial_ratio(top: u64, bottom: u64) -> BigUint {
    // top! / bottom! for bottom <= top
    let mut acc = BigUint::one();
    for i in (bottom + 1)..=top {
        acc *= i;
    }
    acc
}

/// `K_n^2 = (|n| + d - 1)! / ((d - 1)! n!)` as an exact integer.
pub fn basis_norm_const_squared(index: &MultiIndex) -> BigUint {
    let d = index.dim() as u64;
    // binom(|n| + d - 1, d - 1) * multinomial(|n|; n_1..n_d)
    let mut acc = factorial_ratio(index.degree + d - 1, index.degree);
    for i in 1..d {
        acc /= i;
    }
    let mut partial = 0u64;
    for &e in &index.exponents {
        let e = u64::from(e);
        partial += e;
        // multiply by binom(partial, e)
        let mut b = factorial_ratio(partial, partial - e);
        for i in 1..=e {
            b /= i;
        }
        acc *= b;
    }
    acc
}

/// Normalising constant `K_n` so that `K_n z^n` has unit Hardy norm.
///
/// Evaluated from the exact integer `K_n^2`, which keeps full double
/// precision at any degree where the result is representable.
pub fn basis_norm_const(index: &MultiIndex) -> f64 {
    if index.dim() == 1 {
        return 1.0;
    }
    sqrt_big(&basis_norm_const_squared(index))
}

fn sqrt_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 960 {
        return x.to_f64().unwrap_or(f64::INFINITY).sqrt();
    }
    let mut shift = bits - 128;
    if shift % 2 == 1 {
        shift += 1;
    }
    let mantissa = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    mantissa.sqrt() * 2f64.powi((shift / 2) as i32)
}

/// `p_n(z) = K_n z^n` in normalized coordinates.
pub fn eval_basis(index: &MultiIndex, z: &[Complex64]) -> Complex64 {
    let monomial: Complex64 = index
        .exponents
        .iter()
        .zip(z)
        .map(|(&e, zi)| zi.powu(e))
        .product();
    monomial * basis_norm_const(index)
}

/// `(1 - <z, zeta>)^{-d}` with the inner product conjugate-linear in `zeta`.
pub fn reproducing_kernel(z: &[Complex64], zeta: &[Complex64]) -> Result<Complex64> {
    if z.len() != zeta.len() || z.is_empty() {
        return Err(invalid("zeta", "points must share a positive dimension"));
    }
    for p in [z, zeta] {
        let norm = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm < 1.0) {
            return Err(Error::OutsideUnitBall { norm });
        }
    }
    let inner: Complex64 = z.iter().zip(zeta).map(|(a, b)| a * b.conj()).sum();
    Ok((Complex64::new(1.0, 0.0) - inner).powi(-(z.len() as i32)))
}

/// Partial kernel diagonal `sum_{|n| <= max_degree} |p_n(z)|^2`.
pub fn kernel_partial_sum(z: &[Complex64], max_degree: u32) -> f64 {
    enumerate_multiindices(z.len(), max_degree)
        .iter()
        .map(|idx| eval_basis(idx, z).norm_sqr())
        .sum()
}
