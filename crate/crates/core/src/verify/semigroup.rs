//! Heat-semigroup inequalities and kernel identities. All of these need the
//! closed-form kernel, so they are skipped on non-product root systems.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::sobolev::property_rows;
use super::{Check, Context, Row};
use crate::fields::{dunkl_gradient, Constant, Extent, FieldRef, FnField, ScalarField};
use crate::kernels::{plancherel_pair, HeatKernel, Rank1Kernel, SemigroupField};
use crate::quadrature::{integrate, sup_abs, Domain, QuadConfig, Support};
use crate::{dot, norm, Estimate, Result, Vector};

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(PseudoPoincare), Arc::new(GradSemigroup), Arc::new(ReversePoincare), Arc::new(Ultracontractive)]
}

pub(super) fn kernel_checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(HeatKernelIdentities), Arc::new(Plancherel)]
}

/// Tolerance of the inner heat-kernel quadrature.
fn inner() -> QuadConfig {
    QuadConfig::with_rel_tol(1e-8)
}

fn heat(ctx: &Context) -> &HeatKernel {
    ctx.heat.as_ref().expect("kernel checks run only on product systems")
}

/// Extent covering every group image of a compact support.
fn symmetric_extent(e: Extent, n: usize) -> Extent {
    match e.support_radius() {
        Some(r) => Extent::Compact { lo: std::iter::repeat(-r).take(n).collect(), hi: std::iter::repeat(r).take(n).collect() },
        None => e,
    }
}

/// `|∇_k f|` as a field.
fn dunkl_gradient_modulus(ctx: &Context, f: &FieldRef) -> FieldRef {
    let rs = ctx.rs.clone();
    let g = f.clone();
    let extent = symmetric_extent(f.extent().derivative(), ctx.rs.dimension());
    Arc::new(FnField::new(&format!("|∇_k {}|", f.name()), extent, move |x| norm(&dunkl_gradient(&rs, g.as_ref(), x))).with_scale(f.scale()))
}

fn square(f: &FieldRef) -> FieldRef {
    let g = f.clone();
    Arc::new(FnField::new(&format!("({})^2", f.name()), f.extent().power(2.0), move |x| g.value(x).powi(2)).with_scale(f.scale()))
}

struct PseudoPoincare;

impl PseudoPoincare {
    /// `‖f − P_t f‖_p`, memoised per `(f, t, p)`.
    fn defect(ctx: &Context, f: &FieldRef, t: f64, p: f64) -> Result<f64> {
        let sg = SemigroupField::new(heat(ctx).clone(), f.clone(), t, inner())?;
        // `P_t f` varies on the scale `√t`; seeding the mesh at the field's own
        // scale across that whole extent wastes cells for large `t`.
        let support = Support { extent: sg.extent().union(&f.extent()).power(p), scale: f.scale().max(0.5 * t.sqrt()) };
        let g = |x: &[f64]| (f.value(x) - sg.value(x)).abs().powf(p);
        // The ratio only has to be stable to 10%, so a loose outer tolerance suffices.
        let cfg = QuadConfig::with_rel_tol(1e-4);
        Ok(integrate(&ctx.rs, &g, &support, &Domain::FullSpace, &cfg)?.value.powf(1.0 / p))
    }
}

impl Check for PseudoPoincare {
    fn name(&self) -> &'static str {
        "PSEUDO_POINCARE"
    }
    fn statement(&self) -> &'static str {
        "‖f − P_t f‖_p ≤ C√t‖∇_k f‖_p for 1 ≤ p ≤ 2; bounded ratio over the time grid, stable under refinement"
    }
    fn default_tolerance(&self) -> f64 {
        0.1
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for p in [1.0, 2.0] {
            let ratio = |f: &FieldRef, grid: &[f64]| -> Result<Option<f64>> {
                if !ctx.admissible(f.as_ref(), p, p) {
                    return Ok(None);
                }
                let grad = ctx.dunkl_grad_lp(f.as_ref(), p)?.value;
                let mut best = 0.0f64;
                for &t in grid {
                    let key = format!("pp|{}|{t:?}|{p}", f.name());
                    let defect = ctx.memo(key, || Self::defect(ctx, f, t, p).map(Estimate::exact))?.value;
                    best = best.max(defect / (t.sqrt() * grad));
                }
                Ok(Some(best))
            };
            rows.extend(property_rows(ctx, &format!("p={p}"), &ratio, true, tol)?);
        }
        Ok(rows)
    }
}

/// Seeded `(t, x)` pairs for the pointwise semigroup checks.
fn pointwise_samples(ctx: &Context, f: &FieldRef, tag: &str, index: usize) -> Vec<(f64, Vector)> {
    let pts = ctx.sample_points(f.as_ref(), 3, tag, index);
    [0.1, 1.0].iter().flat_map(|&t| pts.iter().map(move |x| (t, x.clone()))).collect()
}

struct GradSemigroup;

impl Check for GradSemigroup {
    fn name(&self) -> &'static str {
        "GRAD_SEMIGROUP"
    }
    fn statement(&self) -> &'static str {
        "|∇_k P_t f| ≤ √N P_t|∇_k f| pointwise, since ∇_k commutes with P_t and the heat kernel is positive"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let h = heat(ctx);
        let sqrt_n = (ctx.rs.dimension() as f64).sqrt();
        let rows: Vec<Vec<Row>> = ctx
            .family
            .par_iter()
            .enumerate()
            .filter(|(_, f)| ctx.admissible(f.as_ref(), 1.0, 1.0))
            .map(|(i, f)| -> Result<Vec<Row>> {
                let modulus = dunkl_gradient_modulus(ctx, f);
                let mut out = Vec::new();
                for (t, x) in pointwise_samples(ctx, f, self.name(), i) {
                    let sg = SemigroupField::new(h.clone(), f.clone(), t, inner())?;
                    let lhs = norm(&dunkl_gradient(&ctx.rs, &sg, &x));
                    let rhs = h.apply(modulus.as_ref(), t, &x, &inner())?.scale(sqrt_n);
                    let at: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
                    out.push(Row::le(format!("{} t={t} x=({})", f.name(), at.join(",")), Estimate::exact(lhs), rhs, tol));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

struct ReversePoincare;

impl Check for ReversePoincare {
    fn name(&self) -> &'static str {
        "REVERSE_POINCARE"
    }
    fn statement(&self) -> &'static str {
        "P_t(f²) − (P_t f)² ≥ (2C/N) t |∇_k P_t f|² with C the pointwise carré-du-champ constant"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let h = heat(ctx);
        let n = ctx.rs.dimension() as f64;
        let c = ctx.constants.gamma_bound_constant;
        let rows: Vec<Vec<Row>> = ctx
            .family
            .par_iter()
            .enumerate()
            .filter(|(_, f)| ctx.admissible(f.as_ref(), 2.0, 1.0))
            .map(|(i, f)| -> Result<Vec<Row>> {
                let sq = square(f);
                let mut out = Vec::new();
                for (t, x) in pointwise_samples(ctx, f, self.name(), i) {
                    let sg = SemigroupField::new(h.clone(), f.clone(), t, inner())?;
                    let pf = h.apply(f.as_ref(), t, &x, &inner())?;
                    let pf2 = h.apply(sq.as_ref(), t, &x, &inner())?;
                    let variance = Estimate::new(pf2.value - pf.value * pf.value, pf2.err + 2.0 * pf.value.abs() * pf.err);
                    let grad = dunkl_gradient(&ctx.rs, &sg, &x);
                    let energy = t * dot(&grad, &grad);
                    let at: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
                    let label = format!("{} t={t} x=({})", f.name(), at.join(","));
                    out.push(Row::le(label.clone(), Estimate::exact(2.0 * c / n * energy), variance, tol));
                    if n > 1.0 {
                        out.push(Row::info(format!("{label} with 2C/√N"), 2.0 * c / n.sqrt() * energy, variance.value));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

struct Ultracontractive;

impl Check for Ultracontractive {
    fn name(&self) -> &'static str {
        "ULTRACONTRACTIVE"
    }
    fn statement(&self) -> &'static str {
        "‖P_t f‖_∞ ≤ (2t)^{−d/2}M_k^{−1}‖f‖₁ and ‖P_t f‖_∞ ≤ ‖f‖_∞; for p = 2 the ratio t^{d/4}‖P_t f‖_∞/‖f‖₂ is bounded and stable"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let mk = ctx.constants.macdonald_mehta;
        let mut rows = Vec::new();
        for f in &ctx.family {
            let sup_f = if f.extent().integrable(1.0, d) || matches!(f.extent(), Extent::Algebraic { .. }) {
                Some(sup_abs(&ctx.rs, f.as_ref(), &Domain::FullSpace)?)
            } else {
                None
            };
            for t in [0.1, 1.0, 10.0] {
                let sup_pt = Estimate::exact(ctx.semigroup_sup(f.as_ref(), t)?);
                if f.extent().integrable(1.0, d) {
                    let l1 = ctx.lp(f.as_ref(), 1.0)?;
                    let bound = l1.scale((2.0 * t).powf(-0.5 * d) / mk);
                    rows.push(Row::le(format!("p=1 t={t}: {}", f.name()), sup_pt, bound, tol));
                }
                if let Some(s) = sup_f {
                    rows.push(Row::le(format!("p=∞ t={t}: {}", f.name()), sup_pt, Estimate::exact(s), tol));
                }
            }
        }
        let ratio = |f: &FieldRef, grid: &[f64]| -> Result<Option<f64>> {
            if !f.extent().integrable(2.0, d) {
                return Ok(None);
            }
            let l2 = ctx.lp(f.as_ref(), 2.0)?.value;
            let mut best = 0.0f64;
            for &t in grid {
                best = best.max(t.powf(0.25 * d) * ctx.semigroup_sup(f.as_ref(), t)? / l2);
            }
            Ok(Some(best))
        };
        rows.extend(property_rows(ctx, "p=2", &ratio, true, 0.1)?);
        Ok(rows)
    }
}

struct HeatKernelIdentities;

impl HeatKernelIdentities {
    /// `E_k′(z)` from the power series, independent of the evaluation route.
    fn series_derivative(e: &Rank1Kernel, z: f64) -> f64 {
        let mut sum = 0.0;
        let mut zm = 1.0;
        for m in 1..400 {
            let term = m as f64 * e.coefficient(m) * zm;
            sum += term;
            if m > 10 && term.abs() < 1e-17 * sum.abs() {
                break;
            }
            zm *= z;
        }
        sum
    }
}

impl Check for HeatKernelIdentities {
    fn name(&self) -> &'static str {
        "HEAT_KERNEL"
    }
    fn statement(&self) -> &'static str {
        "E_0 = exp; T E_k(·,y) = y E_k(·,y); ∫h_t(x,·)dμ_k = 1; P_t P_s = P_{t+s}; h_t(x,y) ≤ (2t)^{−γ−N/2}M_k^{−1}max_g e^{−|gx−y|²/4t}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-12
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let n = ctx.rs.dimension();
        let h = heat(ctx);
        let mut rows = Vec::new();

        let e0 = Rank1Kernel::new(0.0)?;
        let worst = (0..=40)
            .map(|i| -10.0 + 0.5 * i as f64)
            .map(|z| (z, e0.eval(z), z.exp()))
            .max_by(|a, b| ((a.1 - a.2).abs() / a.2).total_cmp(&((b.1 - b.2).abs() / b.2)))
            .unwrap();
        rows.push(Row::eq(format!("E_0 = exp (worst z={})", worst.0), Estimate::exact(worst.1), Estimate::exact(worst.2), tol));

        let ks = ctx.rs.product_multiplicities().unwrap_or_default();
        let mut rng = ctx.rng(self.name(), 0);
        for k in ks.iter().map(|k| k.to_bits()).collect::<std::collections::BTreeSet<u64>>().into_iter().map(f64::from_bits) {
            let e = Rank1Kernel::new(k)?;
            let mut worst = (0.0f64, 0.0, 0.0);
            for _ in 0..200 {
                let x: f64 = rng.gen_range(-2.5..2.5);
                let y: f64 = rng.gen_range(-2.0..2.0);
                let ex = e.eval(x * y);
                let t_e = y * Self::series_derivative(&e, x * y) + k * (ex - e.eval(-x * y)) / x;
                let res = (t_e - y * ex).abs() / (y.abs() * ex).max(1e-300);
                if res > worst.0 {
                    worst = (res, t_e, y * ex);
                }
            }
            rows.push(Row::eq(format!("eigen-relation k={k}"), Estimate::exact(worst.1), Estimate::exact(worst.2), 1e-8));
        }

        let one = Constant(1.0);
        for (i, t) in [0.1, 1.0, 5.0].into_iter().enumerate() {
            let mut r = ctx.rng("heat-mass", i);
            let x: Vector = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
            let mass = h.apply(&one, t, &x, &inner())?;
            rows.push(Row::eq(format!("mass t={t}"), mass, Estimate::exact(1.0), 1e-6));
        }

        for (i, (t, s)) in [(0.2f64, 0.3f64), (0.5, 1.0), (1.0, 0.25)].into_iter().enumerate() {
            let mut r = ctx.rng("semigroup-law", i);
            let x: Vector = (0..n).map(|_| r.gen_range(-1.5..1.5)).collect();
            let y: Vector = (0..n).map(|_| r.gen_range(-1.5..1.5)).collect();
            let (hh, yy) = (h.clone(), y.clone());
            let hs = FnField::new("h_s(·,y)", Extent::Gaussian { shift: norm(&y), width: (2.0 * s).sqrt() }, move |z| {
                hh.eval(s, z, &yy).unwrap_or(f64::NAN)
            })
            .with_scale(s.sqrt());
            let composed = h.apply(&hs, t, &x, &inner())?;
            rows.push(Row::eq(format!("P_{t}P_{s} = P_{}", t + s), composed, Estimate::exact(h.eval(t + s, &x, &y)?), 1e-4));
        }

        let mut r = ctx.rng("upper-bound", 0);
        let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
        for _ in 0..1000 {
            let t = 10f64.powf(r.gen_range(-1.3..0.7));
            let x: Vector = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
            let y: Vector = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
            let (v, b) = (h.eval(t, &x, &y)?, h.upper_bound(t, &x, &y)?);
            if v / b > worst.0 {
                worst = (v / b, v, b);
            }
        }
        rows.push(Row::le("upper bound (worst of 1000 triples)", Estimate::exact(worst.1), Estimate::exact(worst.2), tol));
        Ok(rows)
    }
}

struct Plancherel;

impl Check for Plancherel {
    fn name(&self) -> &'static str {
        "PLANCHEREL"
    }
    fn statement(&self) -> &'static str {
        "‖D_k f‖₂ = ‖f‖₂ for the Dunkl transform normalised by M_k^{−1}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-4
    }
    fn needs_kernel(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let cfg = QuadConfig::with_rel_tol(1e-6);
        ctx.family
            .par_iter()
            .filter(|f| matches!(f.extent(), Extent::Gaussian { .. }))
            .map(|f| {
                let (lhs, rhs) = plancherel_pair(&ctx.rs, f.as_ref(), &cfg)?;
                Ok(Row::eq(f.name(), lhs, rhs, tol))
            })
            .collect()
    }
}
