//! Scenario-driven command-line front end.
//!
//! Scenarios are JSON documents with structured expression objects (no
//! embedded expression grammar). Each subcommand reads the section of the
//! scenario named after it, runs the computation, and emits a JSON report
//! plus CSV tables. Exit codes: 0 when every asserted check passes, 2 when
//! an asserted check fails, 1 on input errors (malformed file, unresolved
//! name, unwritable path).
//!
//! All floating point output is serialized with 17 significant digits so
//! that re-parsing a report reproduces the in-memory values exactly, and so
//! that a fixed seed yields byte-identical files.

use crate::analysis::expr::{HoloFunction, SelfMap};
use crate::analysis::measure::QuadMeasure;
use crate::analysis::norm::{luxemburg_norm, modular};
use crate::carleson::{
    carleson_constant, diff_diagnostics, run_property_check, vanishing_profile,
    wco_symbol_sup, CheckConfig, OperatorSpec, CHECK_NAMES,
};
use crate::error::{Error, Result};
use crate::exponent::{ExponentExpr, ExponentField};
use crate::geometry::{make_lattice, Lattice, Point};
use crate::kernels::bergman_project_fn;
use crate::operators::{DiffSpec, ToeplitzSpec, WcoSpec};
use num_complex::Complex;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;

type C64 = Complex<f64>;

// ---------------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------------

fn default_seed() -> u64 {
    7
}
fn default_rho_max() -> f64 {
    1.0 - 1e-4
}
fn default_radial() -> usize {
    240
}
fn default_angular() -> usize {
    256
}
fn default_rel_tol() -> f64 {
    1e-6
}
fn default_cap_tol() -> f64 {
    0.2
}
fn default_grid_points() -> usize {
    100
}
fn default_grid_radius() -> f64 {
    0.8
}
fn default_audit_samples() -> usize {
    20_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    #[serde(default = "default_radial")]
    pub radial: usize,
    #[serde(default = "default_angular")]
    pub angular: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            radial: default_radial(),
            angular: default_angular(),
        }
    }
}

/// A complete scenario document. Subcommand payloads are optional sections;
/// running a subcommand whose section is absent is an input error.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dimension: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub exponent: Option<ExponentDesc>,
    #[serde(default)]
    pub functions: BTreeMap<String, ExprDesc>,
    #[serde(default)]
    pub self_maps: BTreeMap<String, SelfMapDesc>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureDesc>,
    #[serde(default)]
    pub lattice: Option<LatticeDesc>,
    #[serde(default)]
    pub norm: Option<NormTask>,
    #[serde(default)]
    pub carleson: Option<CarlesonTask>,
    #[serde(default)]
    pub toeplitz: Option<ToeplitzTask>,
    #[serde(default)]
    pub wco: Option<WcoTask>,
    #[serde(default)]
    pub diff: Option<DiffTask>,
    #[serde(default)]
    pub verify: Option<VerifyTask>,
}

/// Structured expression objects for holomorphic functions.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprDesc {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// coeff * z_var^power.
    Monomial {
        var: usize,
        power: u32,
        coeff: [f64; 2],
    },
    /// One-variable polynomial sum_k coeffs[k] z^k (dimension 1 only).
    Polynomial { coeffs: Vec<[f64; 2]> },
    /// (1 - <z, a>)^-power.
    KernelPower { a: Vec<[f64; 2]>, power: f64 },
    /// (1 - |z|^2)^beta (non-holomorphic factor).
    BoundaryFactor { beta: f64 },
    Sum { terms: Vec<ExprDesc> },
    Product { factors: Vec<ExprDesc> },
    Scale {
        coeff: [f64; 2],
        inner: Box<ExprDesc>,
    },
    Conj { inner: Box<ExprDesc> },
    Compose {
        inner: Box<ExprDesc>,
        map: String,
    },
    /// Reference to a named entry of the scenario's `functions` table.
    Ref { name: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelfMapDesc {
    Identity,
    /// z -> c z with |c| < 1.
    Scalar { coeff: [f64; 2] },
    Components { components: Vec<ExprDesc> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentDesc {
    Constant { value: f64 },
    /// The built-in (n+3) + Re(z_1 + ... + z_n).
    AffineExample,
    /// constant + Re<z, coeffs>.
    ReLinear {
        constant: f64,
        coeffs: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureDesc {
    /// Normalized volume; resolution defaults come from the scenario.
    Lebesgue {
        #[serde(default)]
        radial: Option<usize>,
        #[serde(default)]
        angular: Option<usize>,
        #[serde(default)]
        rho_max: Option<f64>,
    },
    /// (1 - |w|^2)^t times a base measure.
    BoundaryPower {
        t: f64,
        #[serde(default)]
        base: Option<Box<MeasureDesc>>,
    },
    /// |g(w)| times a base measure for a named function g.
    ModulusDensity {
        function: String,
        #[serde(default)]
        base: Option<Box<MeasureDesc>>,
    },
    PointMasses { masses: Vec<PointMassDesc> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMassDesc {
    pub point: Vec<[f64; 2]>,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDesc {
    pub r: f64,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default = "default_audit_samples")]
    pub audit_samples: usize,
    /// Assert min pairwise Bergman distance >= r/2 and full coverage.
    #[serde(default)]
    pub assert_contract: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormTask {
    pub function: String,
    #[serde(default)]
    pub measure: Option<String>,
    #[serde(default)]
    pub expect_norm: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlesonTask {
    pub measure: String,
    #[serde(default)]
    pub beta: f64,
    /// "sup" (boundedness) or "vanishing" (compactness).
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub assert_compact: Option<bool>,
    #[serde(default)]
    pub assert_divergent: Option<bool>,
    #[serde(default)]
    pub expect_constant: Option<f64>,
    #[serde(default = "default_cap_tol")]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzTask {
    #[serde(default)]
    pub measure: Option<String>,
    #[serde(default)]
    pub beta: f64,
    pub functions: Vec<String>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_grid_radius")]
    pub grid_radius: f64,
    #[serde(default)]
    pub assert_max_error: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WcoTask {
    pub weight: String,
    pub map: String,
    #[serde(default)]
    pub assert_divergence: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WcoRef {
    pub weight: String,
    pub map: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffTask {
    pub first: WcoRef,
    pub second: WcoRef,
    #[serde(default)]
    pub include_plus: bool,
    #[serde(default)]
    pub assert_zero: Option<bool>,
    #[serde(default)]
    pub assert_bounded_consistent: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTask {
    /// Named checks to run; empty means the full suite.
    #[serde(default)]
    pub checks: Vec<CheckItem>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckItem {
    pub name: String,
    #[serde(default)]
    pub samples: Option<usize>,
}

/// Command-line overrides applied on top of the scenario document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rho_max: Option<f64>,
    pub resolution: Option<(usize, usize)>,
}

// ---------------------------------------------------------------------------
// Resolution of descriptors to library objects
// ---------------------------------------------------------------------------

const MAX_REF_DEPTH: usize = 32;

struct Builder<'a> {
    scenario: &'a Scenario,
    seed: u64,
    rho_max: f64,
    radial: usize,
    angular: usize,
}

impl<'a> Builder<'a> {
    fn new(scenario: &'a Scenario, ov: &Overrides) -> Self {
        let (radial, angular) = ov
            .resolution
            .unwrap_or((scenario.resolution.radial, scenario.resolution.angular));
        Self {
            scenario,
            seed: ov.seed.unwrap_or(scenario.seed),
            rho_max: ov.rho_max.unwrap_or(scenario.rho_max),
            radial,
            angular,
        }
    }

    fn dim(&self) -> usize {
        self.scenario.dimension
    }

    fn exponent(&self) -> Result<ExponentField<f64>> {
        match &self.scenario.exponent {
            None => ExponentField::affine_example(self.dim()),
            Some(ExponentDesc::Constant { value }) => {
                ExponentField::constant(self.dim(), *value)
            }
            Some(ExponentDesc::AffineExample) => ExponentField::affine_example(self.dim()),
            Some(ExponentDesc::ReLinear { constant, coeffs }) => {
                let b: Vec<C64> = coeffs.iter().map(|c| Complex::new(c[0], c[1])).collect();
                ExponentField::new(
                    self.dim(),
                    ExponentExpr::Sum(
                        Box::new(ExponentExpr::Const(*constant)),
                        Box::new(ExponentExpr::ReLinear(b)),
                    ),
                )
            }
        }
    }

    fn point(&self, coords: &[[f64; 2]]) -> Result<Point<f64>> {
        Point::new(coords.iter().map(|c| Complex::new(c[0], c[1])).collect())
    }

    fn function(&self, desc: &ExprDesc, depth: usize) -> Result<HoloFunction<f64>> {
        if depth > MAX_REF_DEPTH {
            return Err(Error::Scenario(
                "expression reference depth exceeded (reference cycle?)".into(),
            ));
        }
        let n = self.dim();
        match desc {
            ExprDesc::Constant { re, im } => {
                Ok(HoloFunction::constant(n, Complex::new(*re, *im)))
            }
            ExprDesc::Monomial { var, power, coeff } => {
                HoloFunction::monomial(n, *var, *power, Complex::new(coeff[0], coeff[1]))
            }
            ExprDesc::Polynomial { coeffs } => {
                if n != 1 {
                    return Err(Error::Scenario(
                        "polynomial expressions require dimension 1".into(),
                    ));
                }
                let c: Vec<C64> = coeffs.iter().map(|c| Complex::new(c[0], c[1])).collect();
                HoloFunction::disk_polynomial(&c)
            }
            ExprDesc::KernelPower { a, power } => {
                let a = self.point(a)?;
                if a.dim() != n {
                    return Err(Error::DimensionMismatch {
                        left: a.dim(),
                        right: n,
                    });
                }
                Ok(HoloFunction::kernel_power(&a, *power))
            }
            ExprDesc::BoundaryFactor { beta } => HoloFunction::boundary_factor(n, *beta),
            ExprDesc::Sum { terms } => {
                let parts: Result<Vec<_>> =
                    terms.iter().map(|t| self.function(t, depth + 1)).collect();
                HoloFunction::sum(parts?)
            }
            ExprDesc::Product { factors } => {
                let parts: Result<Vec<_>> =
                    factors.iter().map(|t| self.function(t, depth + 1)).collect();
                HoloFunction::product(parts?)
            }
            ExprDesc::Scale { coeff, inner } => Ok(self
                .function(inner, depth + 1)?
                .scale(Complex::new(coeff[0], coeff[1]))),
            ExprDesc::Conj { inner } => Ok(self.function(inner, depth + 1)?.conj()),
            ExprDesc::Compose { inner, map } => {
                let m = self.self_map(map)?;
                self.function(inner, depth + 1)?.compose(&m)
            }
            ExprDesc::Ref { name } => {
                let inner = self
                    .scenario
                    .functions
                    .get(name)
                    .ok_or_else(|| Error::UnresolvedReference(format!("function `{name}`")))?;
                self.function(inner, depth + 1)
            }
        }
    }

    fn named_function(&self, name: &str) -> Result<HoloFunction<f64>> {
        let desc = self
            .scenario
            .functions
            .get(name)
            .ok_or_else(|| Error::UnresolvedReference(format!("function `{name}`")))?;
        self.function(desc, 0)
    }

    fn self_map(&self, name: &str) -> Result<SelfMap<f64>> {
        let desc = self
            .scenario
            .self_maps
            .get(name)
            .ok_or_else(|| Error::UnresolvedReference(format!("self_map `{name}`")))?;
        match desc {
            SelfMapDesc::Identity => Ok(SelfMap::identity(self.dim())),
            SelfMapDesc::Scalar { coeff } => {
                SelfMap::scalar_multiple(self.dim(), Complex::new(coeff[0], coeff[1]))
            }
            SelfMapDesc::Components { components } => {
                let parts: Result<Vec<_>> =
                    components.iter().map(|c| self.function(c, 0)).collect();
                SelfMap::new(parts?)
            }
        }
    }

    fn default_lebesgue(&self) -> Result<QuadMeasure<f64>> {
        QuadMeasure::lebesgue(self.dim(), self.radial, self.angular, self.rho_max)
    }

    fn measure_from_desc(&self, desc: &MeasureDesc, depth: usize) -> Result<QuadMeasure<f64>> {
        if depth > MAX_REF_DEPTH {
            return Err(Error::Scenario("measure nesting too deep".into()));
        }
        match desc {
            MeasureDesc::Lebesgue {
                radial,
                angular,
                rho_max,
            } => QuadMeasure::lebesgue(
                self.dim(),
                radial.unwrap_or(self.radial),
                angular.unwrap_or(self.angular),
                rho_max.unwrap_or(self.rho_max),
            ),
            MeasureDesc::BoundaryPower { t, base } => {
                let base = match base {
                    Some(b) => self.measure_from_desc(b, depth + 1)?,
                    None => self.default_lebesgue()?,
                };
                QuadMeasure::with_boundary_power(&base, *t, &format!("t={t}"))
            }
            MeasureDesc::ModulusDensity { function, base } => {
                let g = self.named_function(function)?;
                let base = match base {
                    Some(b) => self.measure_from_desc(b, depth + 1)?,
                    None => self.default_lebesgue()?,
                };
                QuadMeasure::with_modulus_density(&base, &g, function)
            }
            MeasureDesc::PointMasses { masses } => {
                let m: Result<Vec<(Point<f64>, f64)>> = masses
                    .iter()
                    .map(|pm| Ok((self.point(&pm.point)?, pm.weight)))
                    .collect();
                QuadMeasure::point_masses(self.dim(), m?)
            }
        }
    }

    fn named_measure(&self, name: &str) -> Result<QuadMeasure<f64>> {
        let desc = self
            .scenario
            .measures
            .get(name)
            .ok_or_else(|| Error::UnresolvedReference(format!("measure `{name}`")))?;
        self.measure_from_desc(desc, 0)
    }

    fn lattice(&self) -> Result<(LatticeDesc, Lattice<f64>)> {
        let desc = self
            .scenario
            .lattice
            .clone()
            .ok_or_else(|| Error::Scenario("scenario has no `lattice` section".into()))?;
        let rho = match self.rho_max_override() {
            Some(r) => r,
            None => desc.rho_max,
        };
        let lat = make_lattice(self.dim(), desc.r, rho)?;
        Ok((desc, lat))
    }

    fn rho_max_override(&self) -> Option<f64> {
        if (self.rho_max - self.scenario.rho_max).abs() > 0.0 {
            Some(self.rho_max)
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

/// Result of a scenario run: the JSON report, optional CSV tables, and the
/// list of failed assertions (empty means the run passes).
#[derive(Debug)]
pub struct RunOutput {
    pub report: Value,
    pub shells_csv: Option<String>,
    pub lattice_csv: Option<String>,
    pub failures: Vec<String>,
}

pub const COMMANDS: [&str; 7] =
    ["lattice", "norm", "carleson", "toeplitz", "wco", "diff", "verify"];

/// Run one subcommand against a parsed scenario.
pub fn run_task(kind: &str, scenario: &Scenario, ov: &Overrides) -> Result<RunOutput> {
    let b = Builder::new(scenario, ov);
    let mut out = match kind {
        "lattice" => run_lattice(&b),
        "norm" => run_norm(&b),
        "carleson" => run_carleson(&b),
        "toeplitz" => run_toeplitz(&b),
        "wco" => run_wco(&b),
        "diff" => run_diff(&b),
        "verify" => run_verify(&b),
        other => Err(Error::Scenario(format!(
            "unknown subcommand `{other}`; expected one of {COMMANDS:?}"
        ))),
    }?;
    if let Value::Object(map) = &mut out.report {
        map.insert("command".into(), json!(kind));
        map.insert("seed".into(), json!(b.seed));
        map.insert("dimension".into(), json!(b.dim()));
        map.insert("pass".into(), json!(out.failures.is_empty()));
        map.insert("failures".into(), json!(out.failures.clone()));
    }
    Ok(out)
}

fn run_lattice(b: &Builder) -> Result<RunOutput> {
    let (desc, lat) = b.lattice()?;
    let audit = lat.coverage_audit(desc.audit_samples, b.seed);
    let min_sep = lat.min_pairwise_bergman();
    let mut failures = Vec::new();
    if desc.assert_contract {
        if min_sep < lat.r() / 2.0 {
            failures.push(format!(
                "min pairwise Bergman distance {min_sep} below r/2 = {}",
                lat.r() / 2.0
            ));
        }
        if audit.uncovered > 0 {
            failures.push(format!("{} audit points uncovered", audit.uncovered));
        }
    }
    let mut csv = String::from("index,re,im\n");
    for (i, c) in lat.centers().iter().enumerate() {
        csv.push_str(&i.to_string());
        for z in c.coords() {
            csv.push(',');
            csv.push_str(&format_float(z.re));
            csv.push(',');
            csv.push_str(&format_float(z.im));
        }
        csv.push('\n');
    }
    let report = json!({
        "lattice": {
            "r": lat.r(),
            "rho_max": lat.coverage_radius(),
            "t_max": lat.t_max(),
            "centers": lat.centers().len(),
            "overlap_bound": lat.overlap_bound(),
            "min_pairwise_bergman": min_sep,
            "coverage_audit": {
                "checked": audit.checked,
                "uncovered": audit.uncovered,
            },
        }
    });
    Ok(RunOutput {
        report,
        shells_csv: None,
        lattice_csv: Some(csv),
        failures,
    })
}

fn run_norm(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .norm
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `norm` section".into()))?;
    let f = b.named_function(&task.function)?;
    let p = b.exponent()?;
    let mu = match &task.measure {
        Some(name) => b.named_measure(name)?,
        None => b.default_lebesgue()?,
    };
    let m = match modular(&f, &p, &mu) {
        crate::analysis::norm::Modular::Finite(v) => Some(v),
        crate::analysis::norm::Modular::Overflow { .. } => None,
    };
    let norm = luxemburg_norm(&f, &p, &mu)?;
    let mut failures = Vec::new();
    if let Some(expect) = task.expect_norm {
        let rel = (norm - expect).abs() / expect.abs().max(f64::MIN_POSITIVE);
        if !(rel <= task.rel_tol) {
            failures.push(format!(
                "norm {norm} differs from expected {expect} by relative {rel} > {}",
                task.rel_tol
            ));
        }
    }
    let report = json!({
        "norm": {
            "function": task.function,
            "modular": m,
            "luxemburg_norm": norm,
            "total_mass": mu.total_mass(),
            "exponent_range": [p.p_minus(), p.p_plus()],
        }
    });
    Ok(RunOutput {
        report,
        shells_csv: None,
        lattice_csv: None,
        failures,
    })
}

fn run_carleson(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .carleson
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `carleson` section".into()))?;
    let mu = b.named_measure(&task.measure)?;
    let (_, lat) = b.lattice()?;
    let mode = task.mode.as_deref().unwrap_or("sup");
    let rep = match mode {
        "sup" => carleson_constant(&mu, lat.r(), task.beta, &lat)?,
        "vanishing" => vanishing_profile(&mu, lat.r(), task.beta, &lat)?,
        other => {
            return Err(Error::Scenario(format!(
                "carleson mode must be `sup` or `vanishing`, got `{other}`"
            )))
        }
    };
    let mut failures = Vec::new();
    if let Some(expect) = task.assert_compact {
        if rep.compact_flag != expect {
            failures.push(format!(
                "compact_flag = {} but scenario asserts {expect}",
                rep.compact_flag
            ));
        }
    }
    if let Some(expect) = task.assert_divergent {
        if rep.divergence_flag != expect {
            failures.push(format!(
                "divergence_flag = {} but scenario asserts {expect}",
                rep.divergence_flag
            ));
        }
    }
    if let Some(expect) = task.expect_constant {
        let rel = (rep.constant - expect).abs() / expect.abs().max(f64::MIN_POSITIVE);
        if !(rel <= task.rel_tol) {
            failures.push(format!(
                "constant {} differs from expected {expect} by relative {rel} > {}",
                rep.constant, task.rel_tol
            ));
        }
    }
    let csv = shells_csv(&rep.shell_profile);
    let report = json!({ "carleson": serde_json::to_value(&rep)? });
    Ok(RunOutput {
        report,
        shells_csv: Some(csv),
        lattice_csv: None,
        failures,
    })
}

fn run_toeplitz(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .toeplitz
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `toeplitz` section".into()))?;
    let mu = match &task.measure {
        Some(name) => b.named_measure(name)?,
        None => b.default_lebesgue()?,
    };
    let spec = OperatorSpec::Toeplitz(ToeplitzSpec::new(mu.clone(), task.beta)?);
    let grid: Vec<Point<f64>> =
        QuadMeasure::<f64>::sample_points(b.dim(), task.grid_points, b.seed)
            .into_iter()
            .map(|z| {
                Point::from_coords_clamped(
                    z.coords().iter().map(|c| c * task.grid_radius).collect(),
                )
            })
            .collect();
    let mut per_function = Vec::new();
    let mut max_err = 0.0f64;
    for name in &task.functions {
        let f = b.named_function(name)?;
        let mut err = 0.0f64;
        for z in &grid {
            let tv = spec.apply(&f, z)?;
            err = err.max((tv - f.eval(z)).norm());
        }
        max_err = max_err.max(err);
        per_function.push(json!({ "function": name, "max_error": err }));
    }
    // Antiholomorphic rejection: the projection of conj(w_1) must vanish.
    let g = HoloFunction::monomial(b.dim(), 0, 1, Complex::new(1.0, 0.0))?.conj();
    let mut anti_err = 0.0f64;
    for z in &grid {
        anti_err = anti_err.max(bergman_project_fn(&g, &mu, z, false)?.norm());
    }
    let mut failures = Vec::new();
    if let Some(tol) = task.assert_max_error {
        if !(max_err <= tol) {
            failures.push(format!("max reproduction error {max_err} > {tol}"));
        }
        if !(anti_err <= tol) {
            failures.push(format!("antiholomorphic leak {anti_err} > {tol}"));
        }
    }
    let report = json!({
        "toeplitz": {
            "beta": task.beta,
            "grid_points": grid.len(),
            "grid_radius": task.grid_radius,
            "max_reproduction_error": max_err,
            "antiholomorphic_leak": anti_err,
            "per_function": per_function,
        }
    });
    Ok(RunOutput {
        report,
        shells_csv: None,
        lattice_csv: None,
        failures,
    })
}

fn run_wco(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .wco
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `wco` section".into()))?;
    let u = b.named_function(&task.weight)?;
    let phi = b.self_map(&task.map)?;
    let p = b.exponent()?;
    let rep = wco_symbol_sup(&u, &phi, &p)?;
    let mut failures = Vec::new();
    if let Some(expect) = task.assert_divergence {
        if rep.divergence_flag != expect {
            failures.push(format!(
                "divergence_flag = {} but scenario asserts {expect}",
                rep.divergence_flag
            ));
        }
    }
    let csv = shells_csv(&rep.shells);
    let report = json!({
        "wco": {
            "weight": task.weight,
            "map": task.map,
            "sup": rep.sup,
            "divergence_flag": rep.divergence_flag,
            "shells": serde_json::to_value(&rep.shells)?,
            "detail": serde_json::to_value(&rep.report)?,
        }
    });
    Ok(RunOutput {
        report,
        shells_csv: Some(csv),
        lattice_csv: None,
        failures,
    })
}

fn run_diff(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .diff
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `diff` section".into()))?;
    let p = b.exponent()?;
    let first = WcoSpec::new(b.named_function(&task.first.weight)?, b.self_map(&task.first.map)?)?;
    let second =
        WcoSpec::new(b.named_function(&task.second.weight)?, b.self_map(&task.second.map)?)?;
    let spec = DiffSpec::with_default_alpha(first, second, &p)?;
    let base = b.default_lebesgue()?;
    let (_, lat) = b.lattice()?;
    let d = diff_diagnostics(&spec, &p, &base, lat.r(), &lat, task.include_plus)?;
    let mut failures = Vec::new();
    if let Some(expect) = task.assert_zero {
        let all_zero = d.reports.iter().all(|(_, r)| r.constant == 0.0);
        if all_zero != expect {
            failures.push(format!(
                "all-zero pull-back constants = {all_zero} but scenario asserts {expect}"
            ));
        }
    }
    if let Some(expect) = task.assert_bounded_consistent {
        if d.bounded_consistent != expect {
            failures.push(format!(
                "bounded_consistent = {} but scenario asserts {expect}",
                d.bounded_consistent
            ));
        }
    }
    let mut reports = Vec::new();
    for (name, rep) in &d.reports {
        reports.push(json!({ "measure": name, "report": serde_json::to_value(rep)? }));
    }
    let report = json!({
        "diff": {
            "alpha": spec.alpha,
            "bounded_consistent": d.bounded_consistent,
            "reports": reports,
        }
    });
    Ok(RunOutput {
        report,
        shells_csv: None,
        lattice_csv: None,
        failures,
    })
}

fn run_verify(b: &Builder) -> Result<RunOutput> {
    let task = b
        .scenario
        .verify
        .clone()
        .ok_or_else(|| Error::Scenario("scenario has no `verify` section".into()))?;
    let items: Vec<CheckItem> = if task.checks.is_empty() {
        CHECK_NAMES
            .iter()
            .map(|n| CheckItem {
                name: n.to_string(),
                samples: None,
            })
            .collect()
    } else {
        task.checks.clone()
    };
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for item in &items {
        let cfg = CheckConfig {
            dim: b.dim(),
            samples: item.samples.or(task.samples).unwrap_or(CheckConfig::default().samples),
            seed: b.seed,
            radial: b.radial,
            angular: b.angular,
            rho_max: b.rho_max,
        };
        let rep = run_property_check(&item.name, &cfg)?;
        if !rep.pass {
            failures.push(format!(
                "check `{}` failed: observed {} vs asserted {:?}",
                rep.name, rep.observed_bound, rep.asserted_bound
            ));
        }
        reports.push(serde_json::to_value(&rep)?);
    }
    let report = json!({ "verify": { "checks": reports } });
    Ok(RunOutput {
        report,
        shells_csv: None,
        lattice_csv: None,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Serialization: 17-significant-digit floats, deterministic key order
// ---------------------------------------------------------------------------

/// Format a float with 17 significant digits; round-trips f64 exactly.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no literal for non-finite numbers; encode as a string.
        format!("\"{x}\"")
    }
}

fn write_value(v: &Value, out: &mut String, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    out.push_str(&format_float(f));
                } else {
                    out.push_str(&n.to_string());
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(item, out, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(item, out, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Render a report deterministically (sorted keys, fixed float format).
pub fn render_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(v, &mut s, 0);
    s.push('\n');
    s
}

/// CSV table for a shell profile; columns are fixed and documented:
/// shell_index, one_minus_a, max_ratio, flag.
pub fn shells_csv(shells: &[crate::report::ShellEntry]) -> String {
    let mut csv = String::from("shell_index,one_minus_a,max_ratio,flag\n");
    for e in shells {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            e.shell_index,
            format_float(e.one_minus_a),
            format_float(e.max_ratio),
            e.flag
        ));
    }
    csv
}

// ---------------------------------------------------------------------------
// Top-level driver
// ---------------------------------------------------------------------------

/// Load a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let scenario: Scenario = serde_json::from_str(&text)?;
    if scenario.dimension == 0 || scenario.dimension > 8 {
        return Err(Error::BadDimension {
            n: scenario.dimension,
        });
    }
    Ok(scenario)
}

/// Execute a subcommand end to end and return the process exit code:
/// 0 = all asserted checks pass, 1 = input error, 2 = check failure.
pub fn execute(kind: &str, scenario_path: &Path, out_dir: Option<&Path>, ov: &Overrides) -> i32 {
    let scenario = match load_scenario(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let output = match run_task(kind, &scenario, ov) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let rendered = render_json(&output.report);
    if let Some(dir) = out_dir {
        if let Err(e) = write_outputs(dir, &rendered, &output) {
            eprintln!("error: {e}");
            return 1;
        }
    } else {
        print!("{rendered}");
    }
    if output.failures.is_empty() {
        0
    } else {
        for f in &output.failures {
            eprintln!("check failed: {f}");
        }
        2
    }
}

fn write_outputs(dir: &Path, rendered: &str, output: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), rendered)?;
    if let Some(csv) = &output.shells_csv {
        std::fs::write(dir.join("shells.csv"), csv)?;
    }
    if let Some(csv) = &output.lattice_csv {
        std::fs::write(dir.join("lattice.csv"), csv)?;
    }
    Ok(())
}
