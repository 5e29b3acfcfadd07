//! Measure identities, isoperimetry and rearrangement on Weyl chambers.

use std::sync::Arc;

use rand::Rng;

use super::{Check, Context, Row};
use crate::constants::{macdonald_mehta, macdonald_mehta_product_formula, sobolev_exponent, sphere_constant, talenti_bound};
use crate::fields::{chamber_bumps, Constant, FieldRef, FnField, ScalarField, SmoothIndicator, Talenti};
use crate::quadrature::{integrate, lp_norm, perimeter, sphere_weight_integral, Domain, Support};
use crate::rearrange::{chamber_sphere_measure, decreasing_rearrangement, gradient_energy, set_rearrangement};
use crate::{Error, Estimate, Result};

pub(super) fn measure_checks() -> Vec<Arc<dyn Check>> {
    vec![Arc::new(MeasureIdentities)]
}

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        Arc::new(Isoperimetric),
        Arc::new(IsoRatio),
        Arc::new(PolyaSzego),
        Arc::new(Rearrangement),
        Arc::new(ChamberSobolev),
    ]
}

/// `μ_k(Ω)`.
fn mass(ctx: &Context, domain: &Domain) -> Result<Estimate> {
    let one = Constant(1.0);
    Ok(integrate(&ctx.rs, &|_| 1.0, &Support::of(&one), domain, &ctx.quad())?.estimate())
}

/// Index of the chamber containing `x`.
fn chamber_of(ctx: &Context, x: &[f64]) -> Result<usize> {
    let sign = ctx.rs.chamber_sign(x)?;
    ctx.rs.chambers().iter().position(|c| *c == sign).ok_or(Error::OnWall)
}

/// Test fields supported in the fundamental chamber, with its index: the two
/// chamber bumps, their sum, and in rank one a smoothed indicator of `(1, 2)`.
fn chamber_fields(ctx: &Context) -> Result<(usize, Vec<FieldRef>)> {
    let bumps = chamber_bumps(&ctx.rs);
    let center = match bumps[0].extent() {
        crate::fields::Extent::Compact { lo, hi } => lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>(),
        _ => unreachable!("bumps are compact"),
    };
    let chamber = chamber_of(ctx, &center)?;
    let (a, b) = (bumps[0].clone(), bumps[1].clone());
    let extent = a.extent().union(&b.extent());
    let scale = a.scale().min(b.scale());
    let pair: FieldRef = Arc::new(
        FnField::new("bump-pair", extent, move |x| a.value(x) + 0.5 * b.value(x)).with_scale(scale),
    );
    let mut fields = bumps;
    fields.push(pair);
    if ctx.rs.dimension() == 1 && chamber_of(ctx, &[1.5])? == chamber {
        fields.push(Arc::new(SmoothIndicator { lo: 1.0, hi: 2.0, eps: 0.02 }));
    }
    Ok((chamber, fields))
}

struct MeasureIdentities;

impl Check for MeasureIdentities {
    fn name(&self) -> &'static str {
        "MEASURE_IDENTITIES"
    }
    fn statement(&self) -> &'static str {
        "∫e^{−|x|²/2}dμ_k = M_k; ∫_{S^{N−1}} w_k dσ = p(B_1) = 2^{1−d/2}M_k/Γ(d/2); μ_k(B_R) = p(B_1)R^d/d"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let rs = &ctx.rs;
        let d = ctx.d();
        let n = rs.dimension();
        let gauss = crate::fields::GaussianMixture::standard(n);
        let mk = integrate(rs, &|x| gauss.value(x), &Support::of(&gauss), &Domain::FullSpace, &ctx.quad())?.estimate();
        let mut rows = vec![
            Row::eq("M_k: quadrature vs closed form", mk, Estimate::exact(macdonald_mehta(rs)), tol),
            Row::info("M_k: quadrature vs product expression", mk.value, macdonald_mehta_product_formula(rs)),
        ];
        let p1 = sphere_constant(rs);
        rows.push(Row::eq("p(B_1): surface quadrature vs closed form", sphere_weight_integral(rs, &ctx.quad())?, Estimate::exact(p1), tol));
        for r in [0.5, 1.0, 2.0] {
            let m = mass(ctx, &Domain::Ball { radius: r })?;
            rows.push(Row::eq(format!("μ_k(B_{r})"), m, Estimate::exact(p1 * r.powf(d) / d), tol));
        }
        Ok(rows)
    }
}

struct IsoRatio;

impl Check for IsoRatio {
    fn name(&self) -> &'static str {
        "ISO_RATIO"
    }
    fn statement(&self) -> &'static str {
        "p(B_1 ∩ ε)/μ_k(B_1 ∩ ε) = N + 2γ on every chamber ε"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = Estimate::exact(ctx.d());
        (0..ctx.rs.chambers().len())
            .map(|c| {
                let ball = Domain::ChamberBall { chamber: c, radius: 1.0 };
                let ratio = perimeter(&ctx.rs, &ball, &ctx.quad())?.div(mass(ctx, &ball)?);
                Ok(Row::eq(format!("chamber {}", ctx.rs.chambers()[c].label()), ratio, d, tol))
            })
            .collect()
    }
}

struct Isoperimetric;

impl Check for Isoperimetric {
    fn name(&self) -> &'static str {
        "ISOPERIMETRIC"
    }
    fn statement(&self) -> &'static str {
        "μ_k(Ω)^{1−1/d} ≤ C p(Ω) with C = μ_k(B_1 ∩ ε)^{1−1/d}/p(B_1 ∩ ε), equality on chamber balls"
    }
    fn default_tolerance(&self) -> f64 {
        1e-6
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        (ctx.rs.dimension() > 2).then(|| "box perimeters are implemented for N ≤ 2".into())
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let n = ctx.rs.dimension();
        let pe = chamber_sphere_measure(&ctx.rs);
        let c = (pe / d).powf(1.0 - 1.0 / d) / pe;
        let side = |m: Estimate, p: Estimate| (m.powf(1.0 - 1.0 / d), p.scale(c));
        let mut rows = Vec::new();
        let mut rng = ctx.rng(self.name(), 0);
        for i in 0..ctx.config.iso_boxes {
            let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..1.5)).collect();
            let hi: Vec<f64> = lo.iter().map(|a| a + rng.gen_range(0.2..2.0)).collect();
            let dom = Domain::Box { lo: lo.clone(), hi: hi.clone() };
            let (lhs, rhs) = side(mass(ctx, &dom)?, perimeter(&ctx.rs, &dom, &ctx.quad())?);
            rows.push(Row::le(format!("box #{i} {lo:.3?}..{hi:.3?}"), lhs, rhs, tol));
        }
        for chamber in 0..ctx.rs.chambers().len() {
            for radius in [0.5, 2.0] {
                let dom = Domain::ChamberBall { chamber, radius };
                let (lhs, rhs) = side(mass(ctx, &dom)?, perimeter(&ctx.rs, &dom, &ctx.quad())?);
                rows.push(Row::eq(format!("chamber ball {} r={radius}", ctx.rs.chambers()[chamber].label()), lhs, rhs, tol));
            }
        }
        Ok(rows)
    }
}

struct PolyaSzego;

impl Check for PolyaSzego {
    fn name(&self) -> &'static str {
        "POLYA_SZEGO"
    }
    fn statement(&self) -> &'static str {
        "∫_ε |∇f*|^p dμ_k ≤ ∫_ε |∇f|^p dμ_k for the symmetric decreasing rearrangement f* on a chamber"
    }
    fn default_tolerance(&self) -> f64 {
        1e-4
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let (chamber, fields) = chamber_fields(ctx)?;
        let domain = Domain::Chamber { chamber };
        let mut rows = Vec::new();
        for f in &fields {
            let star = decreasing_rearrangement(&ctx.rs, f.as_ref(), chamber, &ctx.config.rearrange())?;
            for p in [1.5, 2.0, 3.0] {
                let lhs = star.gradient_energy(p, &ctx.quad())?;
                let rhs = gradient_energy(&ctx.rs, f.as_ref(), p, &domain, &ctx.quad())?;
                rows.push(Row::le(format!("{} p={p}", f.name()), lhs, rhs, tol));
            }
        }
        Ok(rows)
    }
}

struct Rearrangement;

impl Check for Rearrangement {
    fn name(&self) -> &'static str {
        "REARRANGEMENT"
    }
    fn statement(&self) -> &'static str {
        "‖f*‖_p = ‖f‖_{L^p(ε)} on a chamber; a set of mass m rearranges to the chamber ball of radius (d m/p(B_1 ∩ ε))^{1/d}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-4
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let (chamber, fields) = chamber_fields(ctx)?;
        let domain = Domain::Chamber { chamber };
        let mut rows = Vec::new();
        for f in &fields {
            let star = decreasing_rearrangement(&ctx.rs, f.as_ref(), chamber, &ctx.config.rearrange())?;
            for p in [1.0, 2.0, 6.0] {
                let lhs = star.lp_norm(p, &ctx.quad())?;
                let rhs = lp_norm(&ctx.rs, f.as_ref(), p, &domain, &ctx.quad())?;
                rows.push(Row::eq(format!("{} p={p}", f.name()), lhs, rhs, tol));
            }
            if f.name().starts_with("indicator:") {
                let m = mass(ctx, &Domain::Box { lo: vec![1.0], hi: vec![2.0] })?;
                let expected = set_rearrangement(&ctx.rs, chamber, m.value)?;
                rows.push(Row::eq_abs(
                    "indicator of (1,2): radius of {f* > 1/2}",
                    Estimate::exact(star.level_radius(0.5)),
                    Estimate::exact(expected),
                    1e-3,
                ));
            }
        }
        Ok(rows)
    }
}

struct ChamberSobolev;

impl Check for ChamberSobolev {
    fn name(&self) -> &'static str {
        "CHAMBER_SOBOLEV"
    }
    fn statement(&self) -> &'static str {
        "on a chamber, ‖f‖_{L^q(ε)} ≤ C‖∇f‖_{L^2(ε)} with C = p(B_1 ∩ ε)^{1/q−1/2}·J_max, attained by (1+|x|²)^{1−d/2}"
    }
    fn default_tolerance(&self) -> f64 {
        1e-4
    }
    fn unsupported(&self, ctx: &Context) -> Option<String> {
        (ctx.d() <= 2.0).then(|| format!("needs N + 2γ > 2, got {}", ctx.d()))
    }
    fn run(&self, ctx: &Context, tol: f64) -> Result<Vec<Row>> {
        let d = ctx.d();
        let q = sobolev_exponent(d, 2.0);
        let expected = chamber_sphere_measure(&ctx.rs).powf(1.0 / q - 0.5) * talenti_bound(d, 2.0)?;
        let (chamber, mut fields) = chamber_fields(ctx)?;
        let domain = Domain::Chamber { chamber };
        let quotient = |f: &dyn ScalarField| -> Result<Estimate> {
            let lq = lp_norm(&ctx.rs, f, q, &domain, &ctx.quad())?;
            Ok(lq.div(gradient_energy(&ctx.rs, f, 2.0, &domain, &ctx.quad())?.powf(0.5)))
        };
        let extremal = Talenti::new(1.0, 1.0, 2.0, d)?;
        let mut rows = vec![Row::eq("extremal", quotient(&extremal)?, Estimate::exact(expected), tol)];
        if let Some(cw) = ctx.constants.weyl_constant.filter(|_| !ctx.rs.is_classical()) {
            rows.push(Row::eq("closed form C_W", Estimate::exact(cw), Estimate::exact(expected), 1e-12));
        }
        fields.retain(|f| !f.name().starts_with("indicator:"));
        for f in &fields {
            rows.push(Row::le(f.name(), quotient(f.as_ref())?, Estimate::exact(expected), tol));
        }
        Ok(rows)
    }
}
