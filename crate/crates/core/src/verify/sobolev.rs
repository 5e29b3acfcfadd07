//! Nash, Sobolev, Besov and Gagliardo–Nirenberg inequalities, and the
//! sharp-constant probes.

use std::sync::Arc;

use rayon::prelude::*;

use super::{finite_max, stability_rows, Check, Context, Row};
use crate::constants::{minimize_nash_bound, nash_constant_numeric, sobolev_exponent};
use crate::fields::{Bump, FieldRef, GaussianMixture, GaussianTerm, ScalarField, Talenti};
use crate::quadrature::{log_grid, sup_abs, weak_lq_norm, Domain};
use crate::{Estimate, Result, Vector};

pub(super) fn functional_checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(Nash), Arc::new(SobolevP2)]
}

pub(super) fn embedding_checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(WeakBesov), Arc::new(BesovEmbed), Arc::new(SobolevGeneralP), Arc::new(GagliardoNirenberg)]
}

pub(super) fn constant_checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(SharpnessRadial), Arc::new(ConstantUpper), Arc::new(ConjectureProbe)]
}

/// Exponent pairs `(p, q)` of the improved Sobolev inequality.
const BESOV_PAIRS: [(f64, f64); 2] = [(1.0, 2.0), (2.0, 6.0)];

fn needs_d_above_two(ctx: &Context) -> Option<String> {
    (ctx.d() <= 2.0).then(|| format!("needs N + 2γ > 2, got {}", ctx.d()))
}

fn sobolev_q(ctx: &Context) -> f64 {
    sobolev_exponent(ctx.d(), 2.0)
}

/// `‖f‖_q / ‖∇_k f‖₂` at the Sobolev exponent, or `None` when a side diverges.
fn dunkl_quotient(ctx: &Context, f: &dyn ScalarField) -> Result<Option<(Estimate, Estimate)>> {
    let q = sobolev_q(ctx);
    if !ctx.admissible(f, q, 2.0) {
        return Ok(None);
    }
    Ok(Some((ctx.lp(f, q)?, ctx.dunkl_grad_lp(f, 2.0)?)))
}

/// `sup_{t ∈ grid} t^{−s/2} ‖P_t f‖_∞`.
fn besov(ctx: &Context, f: &dyn ScalarField, s: f64, grid: &[f64]) -> Result<f64> {
    let mut best = 0.0f64;
    for &t in grid {
        best = best.max(t.powf(-0.5 * s) * ctx.semigroup_sup(f, t)?);
    }
    Ok(best)
}

type RatioFn<'a> = dyn Fn(&FieldRef, &[f64]) -> Result<Option<f64>> + Sync + 'a;

/// Per-field ratios on the base grid, plus stability rows for a doubled
/// time grid (when `with_grid`) and a doubled family.
pub(super) fn property_rows(ctx: &Context, label: &str, ratio: &RatioFn, with_grid: bool, tol: f64) -> Result<Vec<Row>> {
    let base_grid = ctx.config.t_grid.values();
    let fine_grid = ctx.config.t_grid.refined().values();
    let eval = |fields: &[FieldRef], grid: &[f64]| -> Result<Vec<Option<f64>>> {
        fields.par_iter().map(|f| ratio(f, grid)).collect()
    };
    let base = eval(&ctx.family, &base_grid)?;
    let mut rows: Vec<Row> = ctx
        .family
        .iter()
        .zip(&base)
        .filter_map(|(f, r)| r.map(|r| Row::info(format!("{label}: {}", f.name()), r, r)))
        .collect();
    if rows.is_empty() {
        return Ok(rows);
    }
    let base_max = finite_max(base.iter().flatten().copied());
    let fine_max = if with_grid { Some(finite_max(eval(&ctx.family, &fine_grid)?.into_iter().flatten())) } else { None };
    let extra = eval(ctx.extra_family(), &base_grid)?;
    let doubled = finite_max(base.iter().chain(&extra).flatten().copied());
    rows.extend(stability_rows(label, base_max, fine_max, doubled, tol));
    Ok(rows)
}

struct Nash;

impl Check for Nash {
    fn name(&self) -> &'static str {
        "NASH"
    }
    fn statement(&self) -> &'static str {
        "‖f‖₂^{1+2/d} ≤ C‖∇_k f‖₂‖f‖₁^{2/d} with C = ((d+2)/d)^{(d+2)/2d}(p(B_1)/2M_k²)^{1/d}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let c = ctx.constants.nash_constant;
        let mut rows = Vec::new();
        for f in ctx.family.iter().filter(|f| ctx.admissible(f.as_ref(), 1.0, 2.0)) {
            let l1 = ctx.lp(f.as_ref(), 1.0)?;
            let l2 = ctx.lp(f.as_ref(), 2.0)?;
            let grad = ctx.dunkl_grad_lp(f.as_ref(), 2.0)?;
            let lhs = l2.powf(1.0 + 2.0 / d);
            let rhs = grad.mul(l1.powf(2.0 / d)).scale(c);
            rows.push(Row::le(f.name(), lhs, rhs, tol).note(format!("slack {:e}", rhs.value - lhs.value)));
            if f.name() == "gaussian" {
                let q = lhs.div(grad.mul(l1.powf(2.0 / d)));
                rows.push(Row::info("gaussian quotient", q.value, c));
            }
        }
        // The closed form must agree with a direct minimisation over R.
        let mut rng = ctx.rng(self.name(), 0);
        for i in 0..10 {
            use rand::Rng;
            let a = 10f64.powf(rng.gen_range(-2.0..2.0));
            let b = 10f64.powf(rng.gen_range(-2.0..2.0));
            let numeric = nash_constant_numeric(&ctx.rs, a, b);
            let (r, _) = minimize_nash_bound(a, b, d);
            rows.push(
                Row::eq(format!("minimisation #{i}"), Estimate::exact(numeric), Estimate::exact(c), 1e-10)
                    .note(format!("A={a}, B={b}, R*={r}")),
            );
        }
        Ok(rows)
    }
}

struct SobolevP2;

impl Check for SobolevP2 {
    fn name(&self) -> &'static str {
        "SOBOLEV_P2"
    }
    fn statement(&self) -> &'static str {
        "for N+2γ > 2, ‖f‖_q ≤ C‖∇_k f‖₂ with q = 2d/(d−2) and C the constant obtained from the Nash inequality"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        needs_d_above_two(ctx)
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let c = ctx.constants.sobolev_from_nash.unwrap_or(f64::NAN);
        let mut rows = Vec::new();
        for f in &ctx.family {
            if let Some((lq, grad)) = dunkl_quotient(ctx, f.as_ref())? {
                rows.push(Row::le(f.name(), lq, grad.scale(c), tol));
            }
        }
        let upper = ctx.constants.dunkl_upper.unwrap_or(f64::NAN);
        let talenti = Talenti::new(1.0, 1.0, 2.0, ctx.d())?;
        if let Some((lq, grad)) = dunkl_quotient(ctx, &talenti)? {
            rows.push(Row::le("extremal quotient vs C_CS", lq.div(grad), Estimate::exact(upper), tol));
        }
        Ok(rows)
    }
}

struct WeakBesov;

impl Check for WeakBesov {
    fn name(&self) -> &'static str {
        "WEAK_BESOV"
    }
    fn statement(&self) -> &'static str {
        "‖f‖_{q,w} = sup_t t μ_k(|f|>t)^{1/q} satisfies ‖f‖_{q,w} ≤ ‖f‖_q and ‖f‖_{q,w} ≤ C‖∇_k f‖_p^θ‖f‖_B^{1−θ}, θ = p/q, B = B^{θ/(θ−1)}_{∞,∞}"
    }
    fn default_tolerance(&self) -> f64 {
        0.1
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let weak = |f: &dyn ScalarField, q: f64| -> Result<f64> {
            let sup = sup_abs(&ctx.rs, f, &Domain::FullSpace)?;
            let lg = &ctx.config.level_grid;
            let levels = log_grid(lg.floor * sup, sup, lg.levels);
            weak_lq_norm(&ctx.rs, f, q, &levels, &Domain::FullSpace, &ctx.quad())
        };
        let mut rows = Vec::new();
        for &(p, q) in &BESOV_PAIRS {
            for f in ctx.family.iter().filter(|f| f.extent().integrable(q, ctx.d())) {
                let w = weak(f.as_ref(), q)?;
                rows.push(Row::le(format!("Chebyshev q={q}: {}", f.name()), Estimate::exact(w), ctx.lp(f.as_ref(), q)?, 1e-6));
            }
            let theta = p / q;
            let s = p / (p - q);
            let ratio = |f: &FieldRef, grid: &[f64]| -> Result<Option<f64>> {
                if !ctx.admissible(f.as_ref(), q, p) {
                    return Ok(None);
                }
                let num = weak(f.as_ref(), q)?;
                let den = ctx.dunkl_grad_lp(f.as_ref(), p)?.value.powf(theta) * besov(ctx, f.as_ref(), s, grid)?.powf(1.0 - theta);
                Ok(Some(num / den))
            };
            rows.extend(property_rows(ctx, &format!("(p,q)=({p},{q})"), &ratio, true, tol)?);
        }
        Ok(rows)
    }
}

struct BesovEmbed;

impl Check for BesovEmbed {
    fn name(&self) -> &'static str {
        "BESOV_EMBED"
    }
    fn statement(&self) -> &'static str {
        "‖f‖_q ≤ C‖∇_k f‖_p^{p/q}‖f‖_B^{1−p/q} with B = B^{p/(p−q)}_{∞,∞}; bounded, refinement-stable ratio"
    }
    fn default_tolerance(&self) -> f64 {
        0.1
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for &(p, q) in &BESOV_PAIRS {
            let theta = p / q;
            let s = p / (p - q);
            let ratio = |f: &FieldRef, grid: &[f64]| -> Result<Option<f64>> {
                if !ctx.admissible(f.as_ref(), q, p) {
                    return Ok(None);
                }
                let num = ctx.lp(f.as_ref(), q)?.value;
                let den = ctx.dunkl_grad_lp(f.as_ref(), p)?.value.powf(theta) * besov(ctx, f.as_ref(), s, grid)?.powf(1.0 - theta);
                Ok(Some(num / den))
            };
            rows.extend(property_rows(ctx, &format!("(p,q)=({p},{q})"), &ratio, true, tol)?);
        }
        Ok(rows)
    }
}

struct SobolevGeneralP;

impl Check for SobolevGeneralP {
    fn name(&self) -> &'static str {
        "SOBOLEV_GENERAL_P"
    }
    fn statement(&self) -> &'static str {
        "‖f‖_q ≤ C‖∇_k f‖_p with q = pd/(d−p); asserted as a bounded ratio for p ∈ {1, 2}, recorded for 2 < p < d"
    }
    fn default_tolerance(&self) -> f64 {
        0.1
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        (ctx.d() <= 1.0).then(|| format!("needs N + 2γ > 1, got {}", ctx.d()))
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let ratio_at = |p: f64| {
            move |f: &FieldRef, _: &[f64]| -> Result<Option<f64>> {
                let q = sobolev_exponent(d, p);
                if !ctx.admissible(f.as_ref(), q, p) {
                    return Ok(None);
                }
                Ok(Some(ctx.lp(f.as_ref(), q)?.value / ctx.dunkl_grad_lp(f.as_ref(), p)?.value))
            }
        };
        let mut rows = Vec::new();
        for p in [1.0, 2.0].into_iter().filter(|p| *p < d) {
            rows.extend(property_rows(ctx, &format!("p={p}"), &ratio_at(p), false, tol)?);
        }
        if d > 2.0 {
            let p = 0.5 * (2.0 + d);
            let ratio = ratio_at(p);
            for f in &ctx.family {
                if let Some(r) = ratio(f, &[])? {
                    rows.push(Row::info(format!("p={p} (outside the proved range): {}", f.name()), r, r));
                }
            }
        }
        Ok(rows)
    }
}

struct GagliardoNirenberg;

impl Check for GagliardoNirenberg {
    fn name(&self) -> &'static str {
        "GAGLIARDO_NIRENBERG"
    }
    fn statement(&self) -> &'static str {
        "‖f‖_q ≤ C‖∇_k f‖_p^{p/q}‖f‖_r^{1−p/q} for p ≤ 2, r/(qd) = 1/p − 1/q; bounded, stable ratio"
    }
    fn default_tolerance(&self) -> f64 {
        0.1
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let mut rows = Vec::new();
        for (p, q) in [(1.0, 2.0), (2.0, 4.0)] {
            let r = q * d * (1.0 / p - 1.0 / q);
            if r < 1.0 {
                continue;
            }
            let theta = p / q;
            let ratio = |f: &FieldRef, _: &[f64]| -> Result<Option<f64>> {
                if !ctx.admissible(f.as_ref(), q, p) || !f.extent().integrable(r, d) {
                    return Ok(None);
                }
                let num = ctx.lp(f.as_ref(), q)?.value;
                let den = ctx.dunkl_grad_lp(f.as_ref(), p)?.value.powf(theta) * ctx.lp(f.as_ref(), r)?.value.powf(1.0 - theta);
                Ok(Some(num / den))
            };
            rows.extend(property_rows(ctx, &format!("(p,q,r)=({p},{q},{r})"), &ratio, false, tol)?);
        }
        Ok(rows)
    }
}

/// Radial fields: three Talenti extremals and three non-extremal profiles.
fn radial_fields(ctx: &Context) -> Result<(Vec<FieldRef>, Vec<FieldRef>)> {
    let d = ctx.d();
    let n = ctx.rs.dimension();
    let origin: Vector = std::iter::repeat(0.0).take(n).collect();
    let extremals: Vec<FieldRef> = [(1.0, 1.0), (1.0, 3.0), (2.0, 1.0)]
        .iter()
        .map(|&(a, b)| Talenti::new(a, b, 2.0, d).map(|t| Arc::new(t) as FieldRef))
        .collect::<Result<_>>()?;
    let others: Vec<FieldRef> = vec![
        Arc::new(GaussianMixture::standard(n)),
        Arc::new(GaussianMixture {
            label: "radial-mixture".into(),
            terms: vec![
                GaussianTerm { amplitude: 1.0, center: origin.clone(), width: 1.0 },
                GaussianTerm { amplitude: 0.5, center: origin.clone(), width: 0.3 },
            ],
        }),
        Arc::new(Bump { center: origin, radius: 1.0 }),
    ];
    Ok((extremals, others))
}

struct SharpnessRadial;

impl Check for SharpnessRadial {
    fn name(&self) -> &'static str {
        "SHARPNESS_RADIAL"
    }
    fn statement(&self) -> &'static str {
        "radial extremals (a + b|x|²)^{1−d/2} attain ‖f‖_q/‖∇_k f‖₂ = √(2/(d(d−2)))[Γ(d)/(M_k Γ(d/2))]^{1/d}; no radial field exceeds it"
    }
    fn default_tolerance(&self) -> f64 {
        1e-4
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        needs_d_above_two(ctx)
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let lower = Estimate::exact(ctx.constants.dunkl_lower.unwrap_or(f64::NAN));
        let (extremals, others) = radial_fields(ctx)?;
        let mut rows = Vec::new();
        for f in &extremals {
            if let Some((lq, grad)) = dunkl_quotient(ctx, f.as_ref())? {
                rows.push(Row::eq(f.name(), lq.div(grad), lower, tol));
            }
        }
        for f in &others {
            if let Some((lq, grad)) = dunkl_quotient(ctx, f.as_ref())? {
                rows.push(Row::le(f.name(), lq.div(grad), lower, tol));
            }
        }
        Ok(rows)
    }
}

struct ConstantUpper;

impl Check for ConstantUpper {
    fn name(&self) -> &'static str {
        "CONSTANT_UPPER"
    }
    fn statement(&self) -> &'static str {
        "‖f‖_q ≤ C_CS‖∇_k f‖₂ and ‖f‖_q ≤ C_CS‖∇f‖₂ with C_CS = √(2/(d(d−2)))[|G|Γ(d)/(M_k Γ(d/2))]^{1/d}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        needs_d_above_two(ctx)
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let c = ctx.constants.dunkl_upper.unwrap_or(f64::NAN);
        let mut rows = Vec::new();
        for f in &ctx.family {
            if let Some((lq, grad)) = dunkl_quotient(ctx, f.as_ref())? {
                rows.push(Row::le(format!("{} (Dunkl gradient)", f.name()), lq, grad.scale(c), tol));
                let classical = ctx.grad_lp(f.as_ref(), 2.0)?;
                rows.push(Row::le(format!("{} (classical gradient)", f.name()), lq, classical.scale(c), tol));
            }
        }
        Ok(rows)
    }
}

struct ConjectureProbe;

impl Check for ConjectureProbe {
    fn name(&self) -> &'static str {
        "CONJECTURE_PROBE"
    }
    fn statement(&self) -> &'static str {
        "seeded non-radial fields: max ‖f‖_q/‖∇_k f‖₂ ≤ C_CS; the radial supremum is recorded, not asserted"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        needs_d_above_two(ctx)
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let n = ctx.rs.dimension();
        let upper = Estimate::exact(ctx.constants.dunkl_upper.unwrap_or(f64::NAN));
        let lower = ctx.constants.dunkl_lower.unwrap_or(f64::NAN);
        let base = ctx.config.seed.wrapping_mul(1_000_003).wrapping_add(17);
        let quotients: Vec<(String, Estimate)> = (0..ctx.config.probe_fields)
            .into_par_iter()
            .map(|i| -> Result<(String, Estimate)> {
                let f = GaussianMixture::random(n, base.wrapping_add(i as u64), 2);
                let (lq, grad) = dunkl_quotient(ctx, &f)?.expect("Gaussian mixtures are admissible");
                Ok((f.name(), lq.div(grad)))
            })
            .collect::<Result<_>>()?;
        let mut rows: Vec<Row> = quotients.iter().map(|(name, q)| Row::le(name.clone(), *q, upper, tol)).collect();
        let best = quotients.iter().map(|(_, q)| q.value).fold(f64::NEG_INFINITY, f64::max);
        rows.push(Row::info("max quotient vs radial supremum", best, lower));
        Ok(rows)
    }
}
