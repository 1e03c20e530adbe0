//! Explicit upper bounds for eigenvalues of transfer operators on `H^2(B)`.
//!
//! Everything here is parameterised by the dimension `d`, the contraction
//! ratio `r` of the branch images, and the weight sup-sum `W`. The chain of
//! bounds runs
//!
//! ```text
//! a_n(J)^2 <= sum_{l >= k} h_{d-1}(l) r^{2l}            (approximation numbers)
//! |lambda_n| <= W (prod_{k <= n} a_k(J))^{1/n}           (Weyl, geometric mean)
//!            <= W alpha_n r^{beta_n} / (1 - r^2)^{d/2}   (proof chain)
//!            <= W sqrt(d) n^{(d-1)/(2d)} r^{(d/(d+1)) (d!)^{1/d} n^{1/d} - d} / (1 - r^2)^{d/2}
//! ```
//!
//! and in one dimension the last step sharpens to `W r^{(n-1)/2} / sqrt(1 - r^2)`.
//! Products and powers are accumulated in log space throughout; `r^{beta_n}`
//! underflows in double precision long before the indices of interest run out.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hardy_basis::{degree_bracket, dim_poly, BracketWalk};

/// Multiplicative slack applied to tail sums so that rounding can only
/// push them up.
const TAIL_SLACK: f64 = 1e-12;

/// The triple `(d, r, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: u32,
    pub r: f64,
    #[serde(rename = "W", alias = "w")]
    pub w: f64,
}

impl BoundParams {
    pub fn new(d: u32, r: f64, w: f64) -> Result<Self> {
        let p = Self { d, r, w };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        check_ratio(self.r)?;
        if !(self.w.is_finite() && self.w > 0.0) {
            return Err(invalid("W", format!("must be positive and finite, got {}", self.w)));
        }
        Ok(())
    }
}

fn check_ratio(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    ExplicitGeneral,
    ExplicitD1,
    GeommeanWeyl,
    ApproxNumber,
}

/// Bound values for `n = 1..=N`, with `values[n - 1]` the bound at `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSequence {
    pub params: BoundParams,
    pub kind: BoundKind,
    pub values: Vec<f64>,
}

impl BoundSequence {
    pub fn generate(kind: BoundKind, params: BoundParams, n_max: u64) -> Result<Self> {
        params.validate()?;
        let values = match kind {
            BoundKind::ExplicitGeneral => (1..=n_max)
                .map(|n| eigenvalue_bound_explicit(n, &params))
                .collect(),
            BoundKind::ExplicitD1 => {
                if params.d != 1 {
                    return Err(invalid("d", "the one-dimensional bound needs d = 1"));
                }
                (1..=n_max)
                    .map(|n| eigenvalue_bound_d1(n, params.r, params.w))
                    .collect::<Result<_>>()?
            }
            BoundKind::GeommeanWeyl => geommean_sequence(&params, n_max)?,
            BoundKind::ApproxNumber => approx_number_sequence(params.d, params.r, n_max)?
                .into_iter()
                .map(f64::exp)
                .collect(),
        };
        Ok(Self {
            params,
            kind,
            values,
        })
    }

    pub fn get(&self, n: u64) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i as usize)).copied()
    }
}

/// Natural log of `sum_{l >= k} h_{d-1}(l) r^{2l}`, never an underestimate.
///
/// Terms are summed until they drop below `1e-17` of the running sum while
/// shrinking; what remains is covered by the majorant
/// `h_{d-1}(L) r^{2L} / (1 - r^2)^d` and the result carries a small upward
/// slack for rounding.
pub fn ln_tail_sum(d: u32, k: u64, r: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    check_ratio(r)?;
    let x = r * r;
    let first = dim_poly(d - 1, k as i64)? as f64;
    let ln_first = first.ln() + k as f64 * x.ln();

    // relative terms t_j = h_{d-1}(k + j) x^j / h_{d-1}(k)
    let mut sum = 0.0f64;
    let mut term = 1.0f64;
    let mut j: u64 = 0;
    loop {
        sum += term;
        let l = (k + j) as f64;
        let ratio = x * (l + f64::from(d)) / (l + 1.0);
        term *= ratio;
        j += 1;
        if ratio < 1.0 && term <= 1e-17 * sum {
            break;
        }
    }
    let majorant = term / (1.0 - x).powi(d as i32);
    let rounding = TAIL_SLACK + 4.0 * (j as f64 + f64::from(d)) * f64::EPSILON;
    Ok(ln_first + (sum + majorant).ln() + rounding.ln_1p())
}

/// `sum_{l >= k} h_{d-1}(l) r^{2l}`, a certified over-estimate of the tail
/// of the kernel diagonal on the ball of radius `r`.
pub fn tail_sum(d: u32, k: u64, r: f64) -> Result<f64> {
    Ok(ln_tail_sum(d, k, r)?.exp())
}

/// Upper bound on the `n`-th approximation number of the embedding
/// `H^2(B_1) -> H^inf(B_r)`.
pub fn approx_number_bound(n: u64, d: u32, r: f64) -> Result<f64> {
    Ok((0.5 * ln_tail_sum(d, degree_bracket(d, n)?, r)?).exp())
}

/// `(alpha~_n, beta~_n) = (h_{d-1}(k), k)` for the degree bracket `k` of `n`.
/// Then `a_n(J)^2 <= alpha~_n r^{2 beta~_n} / (1 - r^2)^d`.
pub fn simplified_approx_bound(n: u64, d: u32) -> Result<(u128, u64)> {
    let k = degree_bracket(d, n)?;
    Ok((dim_poly(d - 1, k as i64)?, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofChain {
    /// `prod_{l <= n} alpha~_l^{1/(2n)}`
    pub alpha: f64,
    /// `(1/n) sum_{l <= n} beta~_l`
    pub beta: f64,
}

/// `alpha_n` and `beta_n` for a single `n`.
pub fn proof_chain_quantities(n: u64, d: u32) -> Result<ProofChain> {
    if n == 0 {
        return Err(invalid("n", "index must be at least 1"));
    }
    let mut chains = proof_chain_sequence(d, n)?;
    Ok(chains.pop().expect("n >= 1"))
}

/// `alpha_l, beta_l` for every `l = 1..=n_max` in one pass.
pub fn proof_chain_sequence(d: u32, n_max: u64) -> Result<Vec<ProofChain>> {
    let mut out = Vec::with_capacity(n_max as usize);
    let mut ln_alpha_sum = 0.0f64;
    let mut beta_sum: u128 = 0;
    let mut cache: Option<(u64, f64)> = None;
    for (l, k) in BracketWalk::new(d)?.take(n_max as usize) {
        let ln_alpha = match cache {
            Some((ck, v)) if ck == k => v,
            _ => {
                let v = (dim_poly(d - 1, k as i64)? as f64).ln();
                cache = Some((k, v));
                v
            }
        };
        ln_alpha_sum += ln_alpha;
        beta_sum += u128::from(k);
        out.push(ProofChain {
            alpha: (ln_alpha_sum / (2.0 * l as f64)).exp(),
            beta: beta_sum as f64 / l as f64,
        });
    }
    Ok(out)
}

/// `W alpha_n r^{beta_n} / (1 - r^2)^{d/2}`, the intermediate bound between
/// the geometric-mean bound and the explicit display.
pub fn chain_bound(chain: &ProofChain, p: &BoundParams) -> f64 {
    let d = f64::from(p.d);
    (p.w.ln() + chain.alpha.ln() + chain.beta * p.r.ln() - 0.5 * d * (1.0 - p.r * p.r).ln()).exp()
}

/// `ln` of the approximation-number bounds for `n = 1..=n_max`.
fn approx_number_sequence(d: u32, r: f64, n_max: u64) -> Result<Vec<f64>> {
    check_ratio(r)?;
    let mut tails: HashMap<u64, f64> = HashMap::new();
    let mut out = Vec::with_capacity(n_max as usize);
    for (_, k) in BracketWalk::new(d)?.take(n_max as usize) {
        let ln_a = match tails.get(&k) {
            Some(v) => *v,
            None => {
                let v = 0.5 * ln_tail_sum(d, k, r)?;
                tails.insert(k, v);
                v
            }
        };
        out.push(ln_a);
    }
    Ok(out)
}

fn geommean_sequence(p: &BoundParams, n_max: u64) -> Result<Vec<f64>> {
    let ln_a = approx_number_sequence(p.d, p.r, n_max)?;
    let ln_w = p.w.ln();
    let mut acc = 0.0;
    Ok(ln_a
        .iter()
        .enumerate()
        .map(|(i, v)| {
            acc += v;
            (ln_w + acc / (i + 1) as f64).exp()
        })
        .collect())
}

/// `W (prod_{k <= n} a_k bound)^{1/n}`.
pub fn eigenvalue_bound_geommean(n: u64, p: &BoundParams) -> Result<f64> {
    p.validate()?;
    if n == 0 {
        return Err(invalid("n", "index must be at least 1"));
    }
    Ok(*geommean_sequence(p, n)?.last().expect("n >= 1"))
}

/// The closed-form bound valid in every dimension.
pub fn eigenvalue_bound_explicit(n: u64, p: &BoundParams) -> f64 {
    let d = f64::from(p.d);
    let n = n as f64;
    let ln_d_factorial: f64 = (1..=p.d).map(|i| f64::from(i).ln()).sum();
    let exponent = d / (d + 1.0) * (ln_d_factorial / d).exp() * n.powf(1.0 / d);
    let ln_value = p.w.ln() + 0.5 * d.ln() - d * p.r.ln() - 0.5 * d * (1.0 - p.r * p.r).ln()
        + (d - 1.0) / (2.0 * d) * n.ln()
        + exponent * p.r.ln();
    ln_value.exp()
}

/// `W r^{(n-1)/2} / sqrt(1 - r^2)`, the sharper one-dimensional bound.
pub fn eigenvalue_bound_d1(n: u64, r: f64, w: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "index must be at least 1"));
    }
    BoundParams::new(1, r, w)?;
    let ln_value = w.ln() - 0.5 * (1.0 - r * r).ln() + 0.5 * (n - 1) as f64 * r.ln();
    Ok(ln_value.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Explicit,
    ExplicitD1,
    Geommean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestBound {
    pub value: f64,
    pub source: BoundSource,
}

/// The smallest of the available bounds at `n`, tagged with which one won.
/// For small `n` the explicit prefactor can exceed the geometric-mean bound
/// (and even the trivial bound `W`), so callers get both and a flag.
pub fn best_bound(n: u64, p: &BoundParams) -> Result<BestBound> {
    let mut best = BestBound {
        value: eigenvalue_bound_explicit(n, p),
        source: BoundSource::Explicit,
    };
    if p.d == 1 {
        let v = eigenvalue_bound_d1(n, p.r, p.w)?;
        if v < best.value {
            best = BestBound {
                value: v,
                source: BoundSource::ExplicitD1,
            };
        }
    }
    let g = eigenvalue_bound_geommean(n, p)?;
    if g < best.value {
        best = BestBound {
            value: g,
            source: BoundSource::Geommean,
        };
    }
    Ok(best)
}
