//! The check registry and the suite runner.
//!
//! Every check turns one inequality or identity into rows of `(lhs, rhs)`
//! pairs over the configured test fields. An inequality row fails only when
//! it is violated by more than `tol·|rhs| + 2·(quadrature error)`. Checks whose
//! constants are unknown are run as bounded-ratio properties: the maximum over
//! the family must be finite and move by less than the tolerance when the
//! time grid or the family is doubled.

mod calculus;
mod geometry;
mod semigroup;
mod sobolev;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::constants::ConstantsReport;
use crate::fields::{dunkl_gradient, eval_gradient, Extent, FieldRef, GaussianMixture, ScalarField};
use crate::kernels::{semigroup_sup, HeatKernel};
use crate::quadrature::{integrate, lp_norm, Domain, QuadConfig, Support};
use crate::rootsys::{RootSystem, RootSystemSummary};
use crate::{norm, Error, Estimate, Result, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    SkippedUnsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    /// `lhs ≤ rhs`.
    Le,
    /// `lhs = rhs` to a relative tolerance.
    Eq,
    /// `lhs = rhs` to an absolute tolerance.
    EqAbs,
    /// `rhs` (refined) within a relative tolerance of `lhs` (base).
    Stable,
    /// Recorded, not asserted.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
    Info,
}

/// Serializes non-finite reals as strings so reports stay valid JSON.
mod real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(|_| de::Error::custom(format!("`{t}` is not a real"))),
        }
    }
}

/// One comparison inside a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub field: String,
    pub relation: Relation,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub ratio: f64,
    #[serde(with = "real")]
    pub tolerance: f64,
    /// Combined quadrature error of both sides.
    #[serde(with = "real")]
    pub error: f64,
    pub status: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    fn build(field: impl Into<String>, relation: Relation, lhs: Estimate, rhs: Estimate, tolerance: f64) -> Self {
        let mut row = Row {
            field: field.into(),
            relation,
            lhs: lhs.value,
            rhs: rhs.value,
            ratio: crate::estimate::safe_ratio(lhs.value, rhs.value),
            tolerance,
            error: lhs.err + rhs.err,
            status: Outcome::Info,
            note: None,
        };
        if relation != Relation::Info {
            let finite = row.lhs.is_finite() && row.rhs.is_finite() && row.error.is_finite();
            row.status = if finite && row.utilisation() <= 1.0 { Outcome::Pass } else { Outcome::Fail };
        }
        row
    }

    pub fn le(field: impl Into<String>, lhs: Estimate, rhs: Estimate, tol: f64) -> Self {
        Self::build(field, Relation::Le, lhs, rhs, tol)
    }

    pub fn eq(field: impl Into<String>, lhs: Estimate, rhs: Estimate, tol: f64) -> Self {
        Self::build(field, Relation::Eq, lhs, rhs, tol)
    }

    pub fn eq_abs(field: impl Into<String>, lhs: Estimate, rhs: Estimate, tol: f64) -> Self {
        Self::build(field, Relation::EqAbs, lhs, rhs, tol)
    }

    pub fn stable(field: impl Into<String>, base: f64, refined: f64, tol: f64) -> Self {
        Self::build(field, Relation::Stable, Estimate::exact(base), Estimate::exact(refined), tol)
    }

    pub fn info(field: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::build(field, Relation::Info, Estimate::exact(lhs), Estimate::exact(rhs), 0.0)
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Deviation as a fraction of the allowed slack; `≤ 1` passes.
    pub fn utilisation(&self) -> f64 {
        let (excess, slack) = match self.relation {
            Relation::Le => (self.lhs - self.rhs, self.tolerance * self.rhs.abs() + 2.0 * self.error),
            Relation::Eq => (
                (self.lhs - self.rhs).abs(),
                self.tolerance * self.lhs.abs().max(self.rhs.abs()) + 2.0 * self.error,
            ),
            Relation::EqAbs => ((self.lhs - self.rhs).abs(), self.tolerance + 2.0 * self.error),
            Relation::Stable => ((self.rhs - self.lhs).abs(), self.tolerance * self.lhs.abs()),
            Relation::Info => return f64::NEG_INFINITY,
        };
        if excess.is_nan() || slack.is_nan() {
            f64::INFINITY
        } else if slack > 0.0 {
            excess / slack
        } else if excess > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    /// The statement under test, in words.
    pub statement: String,
    pub status: Status,
    /// Sides of the binding row: the one closest to (or furthest past) failure.
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub ratio: f64,
    #[serde(with = "real")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    pub rows: Vec<Row>,
}

impl CheckResult {
    fn empty(check: &dyn Check, status: Status, tolerance: f64, diagnostic: String) -> Self {
        Self {
            check_name: check.name().into(),
            statement: check.statement().into(),
            status,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            tolerance,
            witness: None,
            diagnostic: Some(diagnostic),
            rows: Vec::new(),
        }
    }

    fn from_rows(check: &dyn Check, tolerance: f64, rows: Vec<Row>) -> Self {
        let asserted: Vec<&Row> = rows.iter().filter(|r| r.status != Outcome::Info).collect();
        let Some(binding) = asserted.iter().copied().reduce(|a, b| {
            if b.utilisation() > a.utilisation() {
                b
            } else {
                a
            }
        }) else {
            let mut out = Self::empty(check, Status::Fail, tolerance, "no applicable test fields".into());
            out.rows = rows;
            return out;
        };
        let failed = asserted.iter().filter(|r| r.status == Outcome::Fail).count();
        Self {
            check_name: check.name().into(),
            statement: check.statement().into(),
            status: if failed == 0 { Status::Pass } else { Status::Fail },
            lhs: binding.lhs,
            rhs: binding.rhs,
            ratio: binding.ratio,
            tolerance: binding.tolerance,
            witness: Some(binding.field.clone()),
            diagnostic: (failed > 0).then(|| format!("{failed} of {} rows failed", asserted.len())),
            rows,
        }
    }

    /// The per-row table as CSV with columns `field,lhs,rhs,ratio,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,lhs,rhs,ratio,status\n");
        for r in &self.rows {
            let field = if r.field.contains([',', '"']) {
                format!("\"{}\"", r.field.replace('"', "\"\""))
            } else {
                r.field.clone()
            };
            let status = match r.status {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Info => "INFO",
            };
            out.push_str(&format!("{field},{:?},{:?},{:?},{status}\n", r.lhs, r.rhs, r.ratio));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub root_system: RootSystemSummary,
    pub constants: ConstantsReport,
    pub checks: Vec<CheckResult>,
    pub seed: u64,
    /// Seconds; only recorded on request so that reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `<CHECK_NAME>.csv` for every check into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for c in &self.checks {
            std::fs::write(dir.join(format!("{}.csv", c.check_name)), c.to_csv())?;
        }
        Ok(())
    }
}

/// One named inequality or identity.
pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;

    fn statement(&self) -> &'static str;

    fn default_tolerance(&self) -> f64;

    /// Whether the check evaluates the Dunkl kernel or heat semigroup.
    fn needs_kernel(&self) -> bool {
        false
    }

    /// Reason the check cannot run on this root system, if any.
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        (self.needs_kernel() && ctx.heat.is_none())
            .then(|| format!("{} has no closed-form Dunkl kernel", ctx.rs.label()))
    }

    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>>;
}

/// Ordered collection of checks; report order is registry order.
#[derive(Clone)]
pub struct Registry {
    checks: Vec<Arc<dyn Check>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry { checks: Vec::new() };
        for c in geometry::measure_checks() {
            r.register(c);
        }
        for c in calculus::checks() {
            r.register(c);
        }
        for c in sobolev::functional_checks() {
            r.register(c);
        }
        for c in semigroup::checks() {
            r.register(c);
        }
        for c in sobolev::embedding_checks() {
            r.register(c);
        }
        for c in geometry::checks() {
            r.register(c);
        }
        for c in sobolev::constant_checks() {
            r.register(c);
        }
        for c in semigroup::kernel_checks() {
            r.register(c);
        }
        r
    }
}

impl Registry {
    /// Adds a check, replacing any earlier one with the same name.
    pub fn register(&mut self, check: Arc<dyn Check>) {
        match self.checks.iter().position(|c| c.name() == check.name()) {
            Some(i) => self.checks[i] = check,
            None => self.checks.push(check),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Check>> {
        self.checks
            .iter()
            .find(|c| c.name().eq_ignore_ascii_case(name.trim()))
            .cloned()
            .ok_or_else(|| Error::UnknownCheck(name.into()))
    }

    /// Resolves a selection; `all` expands to every check in registry order.
    pub fn select(&self, names: &[String]) -> Result<Vec<Arc<dyn Check>>> {
        if names.iter().any(|n| n.trim().eq_ignore_ascii_case("all")) {
            return Ok(self.checks.clone());
        }
        let mut out: Vec<Arc<dyn Check>> = Vec::new();
        for n in names {
            let c = self.get(n)?;
            if !out.iter().any(|o| o.name() == c.name()) {
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn run(&self, check: &dyn Check, ctx: &Context) -> CheckResult {
        let tol = ctx.config.tolerance(check.name(), check.default_tolerance());
        if let Some(why) = check.unsupported(ctx) {
            return CheckResult::empty(check, Status::SkippedUnsupported, tol, why);
        }
        match check.run(ctx, tol) {
            Ok(rows) => CheckResult::from_rows(check, tol, rows),
            Err(e) => CheckResult::empty(check, Status::Fail, tol, e.to_string()),
        }
    }
}

/// Shared state for one suite run: the root system, the test family, the
/// constants, and memoised norms.
pub struct Context {
    pub rs: RootSystem,
    pub config: SuiteConfig,
    pub family: Vec<FieldRef>,
    pub constants: ConstantsReport,
    pub heat: Option<HeatKernel>,
    extra: OnceLock<Vec<FieldRef>>,
    memo: Mutex<BTreeMap<String, Estimate>>,
}

impl Context {
    pub fn new(rs: RootSystem, config: SuiteConfig) -> Result<Self> {
        config.validate()?;
        let family = config.build_family(&rs, config.mixtures)?;
        Ok(Self {
            constants: ConstantsReport::new(&rs, 2.0),
            heat: HeatKernel::new(&rs).ok(),
            family,
            config,
            rs,
            extra: OnceLock::new(),
            memo: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn d(&self) -> f64 {
        self.rs.effective_dimension()
    }

    pub fn quad(&self) -> QuadConfig {
        self.config.quad()
    }

    /// Seeded mixtures that double the family for stability checks.
    pub fn extra_family(&self) -> &[FieldRef] {
        self.extra.get_or_init(|| {
            let n = self.rs.dimension();
            let base = self.config.seed.wrapping_add(self.config.mixtures as u64);
            (0..self.family.len())
                .map(|i| Arc::new(GaussianMixture::random(n, base.wrapping_add(i as u64), 3)) as FieldRef)
                .collect()
        })
    }

    fn memo(&self, key: String, f: impl FnOnce() -> Result<Estimate>) -> Result<Estimate> {
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.memo.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// `‖f‖_{L^p(μ_k)}` over the whole space.
    pub fn lp(&self, f: &dyn ScalarField, p: f64) -> Result<Estimate> {
        self.memo(format!("lp|{}|{p}", f.name()), || lp_norm(&self.rs, f, p, &Domain::FullSpace, &self.quad()))
    }

    /// `‖∇_k f‖_{L^p(μ_k)}` over the whole space.
    pub fn dunkl_grad_lp(&self, f: &dyn ScalarField, p: f64) -> Result<Estimate> {
        self.memo(format!("dk|{}|{p}", f.name()), || {
            let g = |x: &[f64]| norm(&dunkl_gradient(&self.rs, f, x)).powf(p);
            Ok(self.dunkl_integral(f, &g, p)?.powf(1.0 / p))
        })
    }

    /// `∫ g dμ_k` for an integrand built from `f` and its reflections, such as
    /// `|∇_k f|^p` or `Γ(f)^{p/2}`. A compactly supported `f` contributes on
    /// every group image of its support, so the integral runs over the
    /// group-invariant box `[−R, R]^N` that covers them all.
    pub fn dunkl_integral(&self, f: &dyn ScalarField, g: &(dyn Fn(&[f64]) -> f64 + Sync), p: f64) -> Result<Estimate> {
        self.dunkl_integral_with(f, g, p, &self.quad())
    }

    /// [`Context::dunkl_integral`] at a given quadrature tolerance.
    pub fn dunkl_integral_with(
        &self,
        f: &dyn ScalarField,
        g: &(dyn Fn(&[f64]) -> f64 + Sync),
        p: f64,
        cfg: &QuadConfig,
    ) -> Result<Estimate> {
        let mut support = Support::of(f).derivative().power(p);
        self.require_integrable(f, &support.extent)?;
        if let Some(r) = support.extent.support_radius() {
            let n = self.rs.dimension();
            support.extent = Extent::Compact { lo: std::iter::repeat(-r).take(n).collect(), hi: std::iter::repeat(r).take(n).collect() };
        }
        Ok(integrate(&self.rs, g, &support, &Domain::FullSpace, cfg)?.estimate())
    }

    /// `‖∇f‖_{L^p(μ_k)}` over the whole space.
    pub fn grad_lp(&self, f: &dyn ScalarField, p: f64) -> Result<Estimate> {
        self.memo(format!("grad|{}|{p}", f.name()), || {
            let support = Support::of(f).derivative().power(p);
            self.require_integrable(f, &support.extent)?;
            let g = |x: &[f64]| norm(&eval_gradient(f, x)).powf(p);
            Ok(integrate(&self.rs, &g, &support, &Domain::FullSpace, &self.quad())?.estimate().powf(1.0 / p))
        })
    }

    fn require_integrable(&self, f: &dyn ScalarField, extent: &Extent) -> Result<()> {
        if extent.integrable(1.0, self.d()) {
            Ok(())
        } else {
            Err(Error::DivergentIntegral(format!("derivative of {} is not integrable", f.name())))
        }
    }

    /// Whether `f ∈ L^p` and `∇f ∈ L^{p_grad}` by the declared decay.
    pub fn admissible(&self, f: &dyn ScalarField, p: f64, p_grad: f64) -> bool {
        let e = f.extent();
        e.integrable(p, self.d()) && e.derivative().integrable(p_grad, self.d())
    }

    /// `sup_x |P_t f(x)|`, memoised.
    pub fn semigroup_sup(&self, f: &dyn ScalarField, t: f64) -> Result<f64> {
        let heat = self.heat.as_ref().ok_or_else(|| Error::UnsupportedRootSystem(self.rs.label()))?;
        let inner = QuadConfig::with_rel_tol(1e-8);
        self.memo(format!("sup|{}|{t:?}", f.name()), || Ok(Estimate::exact(semigroup_sup(heat, f, t, &inner)?)))
            .map(|e| e.value)
    }

    /// Seeded generator for the `index`-th draw of a named check.
    pub fn rng(&self, tag: &str, index: usize) -> ChaCha8Rng {
        // FNV-1a of the tag keeps streams independent across checks.
        let mut h: u64 = 0xcbf29ce484222325;
        for b in tag.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(self.config.seed ^ h ^ (index as u64).wrapping_mul(0x9E3779B97F4A7C15))
    }

    /// `count` seeded points where `f` is not negligible.
    pub fn sample_points(&self, f: &dyn ScalarField, count: usize, tag: &str, index: usize) -> Vec<Vector> {
        let n = self.rs.dimension();
        let (lo, hi): (Vector, Vector) = match f.extent() {
            Extent::Compact { lo, hi } => (lo, hi),
            Extent::Gaussian { shift, width } => {
                let r = shift + 3.0 * width;
                (std::iter::repeat(-r).take(n).collect(), std::iter::repeat(r).take(n).collect())
            }
            _ => {
                let r = 4.0 * f.scale().max(0.5);
                (std::iter::repeat(-r).take(n).collect(), std::iter::repeat(r).take(n).collect())
            }
        };
        let mut rng = self.rng(tag, index);
        (0..count)
            .map(|_| lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect())
            .collect()
    }
}

/// Runs one named check on `rs`.
pub fn run_check(name: &str, rs: &RootSystem, config: &SuiteConfig) -> Result<CheckResult> {
    let registry = Registry::default();
    let check = registry.get(name)?;
    let ctx = Context::new(rs.clone(), config.clone())?;
    Ok(registry.run(&*check, &ctx))
}

/// Runs the configured selection. Checks run in parallel; results keep
/// registry order, and every reduction inside a check is ordered, so the
/// report does not depend on the thread count.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    run_suite_with(config, &Registry::default(), false)
}

pub fn run_suite_with(config: &SuiteConfig, registry: &Registry, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let rs = config.root_system.resolve()?;
    let selected = registry.select(&config.checks)?;
    let ctx = Context::new(rs, config.clone())?;
    let checks: Vec<CheckResult> = selected.par_iter().map(|c| registry.run(&**c, &ctx)).collect();
    Ok(Report {
        root_system: ctx.rs.summary(),
        constants: ctx.constants.clone(),
        checks,
        seed: config.seed,
        wall_time: timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Largest finite entry, or `+∞` when any entry is not finite.
pub(crate) fn finite_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_finite() { m.max(v) } else { f64::INFINITY })
}

/// Stability rows for a ratio maximised over a family and a time grid.
pub(crate) fn stability_rows(label: &str, base: f64, refined_grid: Option<f64>, doubled_family: f64, tol: f64) -> Vec<Row> {
    let mut rows = vec![Row::info(format!("{label}: max over family"), base, base)];
    if let Some(r) = refined_grid {
        rows.push(Row::stable(format!("{label}: doubled t-grid"), base, r, tol));
    }
    rows.push(Row::stable(format!("{label}: doubled family"), base, doubled_family, tol));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_margins() {
        let ok = Row::le("f", Estimate::new(1.0 + 1e-9, 1e-9), Estimate::exact(1.0), 0.0);
        assert_eq!(ok.status, Outcome::Pass);
        let bad = Row::le("f", Estimate::exact(1.1), Estimate::exact(1.0), 1e-6);
        assert_eq!(bad.status, Outcome::Fail);
        assert_eq!(Row::eq("0", Estimate::exact(0.0), Estimate::exact(0.0), 1e-8).status, Outcome::Pass);
        assert_eq!(Row::le("nan", Estimate::exact(f64::NAN), Estimate::exact(1.0), 1.0).status, Outcome::Fail);
        assert_eq!(Row::stable("s", 1.0, 1.05, 0.1).status, Outcome::Pass);
        assert_eq!(Row::stable("s", 1.0, 1.2, 0.1).status, Outcome::Fail);
        assert_eq!(Row::info("i", 1.0, 2.0).status, Outcome::Info);
    }

    #[test]
    fn registry_lists_every_check_once() {
        let r = Registry::default();
        let names = r.names();
        for required in [
            "CDC_IDENTITY",
            "DIRICHLET_EQ",
            "GRAD_DOMINATION",
            "MOD_INEQ",
            "GAMMA_LOWER",
            "NASH",
            "SOBOLEV_P2",
            "PSEUDO_POINCARE",
            "GRAD_SEMIGROUP",
            "REVERSE_POINCARE",
            "ULTRACONTRACTIVE",
            "WEAK_BESOV",
            "BESOV_EMBED",
            "SOBOLEV_GENERAL_P",
            "GAGLIARDO_NIRENBERG",
            "ISOPERIMETRIC",
            "ISO_RATIO",
            "POLYA_SZEGO",
            "CHAMBER_SOBOLEV",
            "SHARPNESS_RADIAL",
            "CONSTANT_UPPER",
            "CONJECTURE_PROBE",
        ] {
            assert_eq!(names.iter().filter(|n| **n == required).count(), 1, "{required}");
        }
        assert!(matches!(r.get("NOPE"), Err(Error::UnknownCheck(_))));
        assert_eq!(r.select(&["iso_ratio".into(), "ISO_RATIO".into()]).unwrap().len(), 1);
        assert_eq!(r.select(&["all".into()]).unwrap().len(), names.len());
    }

    #[test]
    fn csv_quotes_commas() {
        let c = CheckResult {
            check_name: "X".into(),
            statement: String::new(),
            status: Status::Pass,
            lhs: 1.0,
            rhs: 2.0,
            ratio: 0.5,
            tolerance: 0.0,
            witness: None,
            diagnostic: None,
            rows: vec![Row::info("bump:1,2", 1.0, f64::INFINITY)],
        };
        assert_eq!(c.to_csv(), "field,lhs,rhs,ratio,status\n\"bump:1,2\",1.0,inf,0.0,INFO\n");
    }

    #[test]
    fn non_finite_values_round_trip() {
        let row = Row::info("f", f64::INFINITY, -1.5);
        let back: Row = serde_json::from_str(&serde_json::to_string(&row).unwrap()).unwrap();
        assert_eq!(back, row);
    }
}
