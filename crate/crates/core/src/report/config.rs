//! Run configuration: a versioned JSON document validated before any work.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::galerkin::{AssemblyOptions, DEFAULT_BRANCH_CUT};
use crate::hardy_basis::BallGeometry;
use crate::operator::{
    estimate_r, estimate_w, Branch, BranchFamily, ClosedForms, Expr, MapFn, ScalarFn, TailMode,
};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub operator: OperatorSpec,
    /// Defaults to the operator's natural ball.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    /// Certified values that replace estimation.
    #[serde(default, skip_serializing_if = "ParamsOverride::is_empty")]
    pub params: ParamsOverride,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    50
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            operator: OperatorSpec::default(),
            geometry: None,
            params: ParamsOverride::default(),
            numerics: Numerics::default(),
            output: OutputSpec::default(),
            n_max: default_n_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Gauss {},
    /// `w_n = (n + z)^{-s}`, `T_n = 1 / (n + z)`.
    ContinuedFraction { exponent: f64 },
    Branches { branches: Vec<BranchSpec> },
}

impl Default for OperatorSpec {
    fn default() -> Self {
        OperatorSpec::Gauss {}
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BranchSpec {
    /// Constant weight and `T(z) = A z + b`.
    Affine {
        weight: Complex64,
        matrix: Vec<Vec<Complex64>>,
        offset: Vec<Complex64>,
    },
    /// Weight and map components as expressions in `z_0..z_{d-1}`.
    Expr {
        weight: Expr,
        map: Vec<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight_sup: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub center: Vec<Complex64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, rename = "W", alias = "w", skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

impl ParamsOverride {
    pub fn is_empty(&self) -> bool {
        self.d.is_none() && self.r.is_none() && self.w.is_none()
    }

    /// Parses `r=0.5,W=2,d=1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("params: expected key=value, got `{item}`")))?;
            let bad = |e: &dyn std::fmt::Display| Error::Config(format!("params: `{key}`: {e}"));
            match key.trim() {
                "d" => out.d = Some(value.trim().parse().map_err(|e| bad(&e))?),
                "r" => out.r = Some(value.trim().parse().map_err(|e| bad(&e))?),
                "W" | "w" => out.w = Some(value.trim().parse().map_err(|e| bad(&e))?),
                other => return Err(Error::Config(format!("params: unknown key `{other}`"))),
            }
        }
        Ok(out)
    }

    /// Later values win.
    pub fn merged(self, over: ParamsOverride) -> Self {
        Self {
            d: over.d.or(self.d),
            r: over.r.or(self.r),
            w: over.w.or(self.w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub size: usize,
    pub samples: Option<usize>,
    pub rho: Option<f64>,
    pub branch_cut: usize,
    pub sizes: Vec<usize>,
    pub tail_mode: TailMode,
    /// Boundary samples for estimating `W` and `r` without closed forms.
    pub estimate_samples: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            size: 60,
            samples: None,
            rho: None,
            branch_cut: DEFAULT_BRANCH_CUT,
            sizes: vec![30, 60, 120],
            tail_mode: TailMode::Quadrature,
            estimate_samples: 1024,
        }
    }
}

impl Numerics {
    pub fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions {
            size: self.size,
            samples: self.samples,
            rho: self.rho,
            branch_cut: self.branch_cut,
            tail_mode: self.tail_mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Where `spectrum` writes the Galerkin matrix, if anywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_path: Option<PathBuf>,
}

/// `(d, r, W)` with where each came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub params: BoundParams,
    pub r_source: &'static str,
    pub w_source: &'static str,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, reason: String| Err(Error::Config(format!("{field}: {reason}")));
        if self.version != CONFIG_VERSION {
            return fail("version", format!("expected {CONFIG_VERSION}, got {}", self.version));
        }
        let n = &self.numerics;
        if n.size < 2 {
            return fail("numerics.size", format!("must be at least 2, got {}", n.size));
        }
        if n.branch_cut == 0 {
            return fail("numerics.branch_cut", "must be at least 1".into());
        }
        if let Some(m) = n.samples {
            if m < 4 * n.size {
                return fail("numerics.samples", format!("need at least 4 N = {}, got {m}", 4 * n.size));
            }
        }
        if let Some(rho) = n.rho {
            if !(rho > 0.0 && rho < 1.0) {
                return fail("numerics.rho", format!("must lie in (0, 1), got {rho}"));
            }
        }
        if n.sizes.len() < 2 || n.sizes.windows(2).any(|w| w[0] >= w[1]) || n.sizes[0] < 2 {
            return fail("numerics.sizes", "need at least two ascending sizes, each >= 2".into());
        }
        if n.estimate_samples < 64 {
            return fail("numerics.estimate_samples", "must be at least 64".into());
        }
        if let Some(d) = self.params.d {
            if d == 0 {
                return fail("params.d", "must be at least 1".into());
            }
        }
        if let Some(r) = self.params.r {
            if !(r > 0.0 && r < 1.0) {
                return fail("params.r", format!("must lie in (0, 1), got {r}"));
            }
        }
        if let Some(w) = self.params.w {
            if !(w > 0.0 && w.is_finite()) {
                return fail("params.W", format!("must be positive, got {w}"));
            }
        }
        if let OperatorSpec::Branches { branches } = &self.operator {
            if branches.is_empty() {
                return fail("operator.branches", "at least one branch required".into());
            }
        }
        Ok(())
    }

    fn geometry(&self) -> Result<BallGeometry> {
        match (&self.geometry, &self.operator) {
            (Some(g), _) => BallGeometry::new(g.center.clone(), g.radius),
            (None, OperatorSpec::Gauss {} | OperatorSpec::ContinuedFraction { .. }) => {
                Ok(BranchFamily::gauss().geometry().clone())
            }
            (None, OperatorSpec::Branches { branches }) => {
                let d = match &branches[0] {
                    BranchSpec::Affine { offset, .. } => offset.len(),
                    BranchSpec::Expr { map, .. } => map.len(),
                };
                Ok(BallGeometry::unit(d.max(1)))
            }
        }
    }

    /// Builds the operator; overridden `r` and `W` become closed forms.
    pub fn family(&self) -> Result<BranchFamily> {
        let geometry = self.geometry()?;
        let family = match &self.operator {
            OperatorSpec::Gauss {} if self.geometry.is_none() => BranchFamily::gauss(),
            OperatorSpec::Gauss {} => BranchFamily::continued_fraction(2.0, geometry)?,
            OperatorSpec::ContinuedFraction { exponent } => {
                BranchFamily::continued_fraction(*exponent, geometry)?
            }
            OperatorSpec::Branches { branches } => {
                let built = branches.iter().map(BranchSpec::build).collect();
                BranchFamily::new("branches", geometry, built, None)?
            }
        };
        let forms = family.closed_forms();
        Ok(family.with_closed_forms(ClosedForms {
            w: self.params.w.or(forms.w),
            r: self.params.r.or(forms.r),
        }))
    }

    /// `(d, r, W)` from overrides, then closed forms, then sampling.
    pub fn resolve_params(&self) -> Result<ResolvedParams> {
        let p = self.params;
        if let (Some(r), Some(w)) = (p.r, p.w) {
            let d = p.d.unwrap_or(self.geometry()?.dim() as u32);
            return Ok(ResolvedParams {
                params: BoundParams::new(d, r, w)?,
                r_source: "override",
                w_source: "override",
            });
        }
        let family = self.family()?;
        let original = match (&self.operator, &self.geometry) {
            (OperatorSpec::Gauss {}, None) => BranchFamily::gauss().closed_forms(),
            _ => ClosedForms::default(),
        };
        let samples = self.numerics.estimate_samples;
        let cut = self.numerics.branch_cut;
        let r = estimate_r(&family, samples, cut)?.value;
        let w = estimate_w(&family, samples, cut)?.value;
        let source = |over: Option<f64>, closed: Option<f64>| match (over, closed) {
            (Some(_), _) => "override",
            (None, Some(_)) => "closed_form",
            (None, None) => "estimate",
        };
        Ok(ResolvedParams {
            params: BoundParams::new(p.d.unwrap_or(family.dim() as u32), r, w)?,
            r_source: source(p.r, original.r),
            w_source: source(p.w, original.w),
        })
    }
}

impl BranchSpec {
    fn build(&self) -> Branch {
        match self {
            BranchSpec::Affine {
                weight,
                matrix,
                offset,
            } => Branch::new(
                ScalarFn::Constant(*weight),
                MapFn::Affine {
                    matrix: matrix.clone(),
                    offset: offset.clone(),
                },
            )
            .with_weight_sup(weight.norm()),
            BranchSpec::Expr {
                weight,
                map,
                weight_sup,
            } => {
                let b = Branch::new(ScalarFn::Expr(weight.clone()), MapFn::Expr(map.clone()));
                match weight_sup {
                    Some(s) => b.with_weight_sup(*s),
                    None => b,
                }
            }
        }
    }
}
