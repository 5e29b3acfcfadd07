//! Symmetric decreasing rearrangement with respect to `μ_k` on a Weyl chamber.
//!
//! The rearrangement `f*` is recovered from the distribution function
//! `m(t) = μ_k({x ∈ ε : |f(x)| > t})`: each level `t` is sent to the radius of
//! the chamber ball of mass `m(t)`, and the decreasing relation `r ↦ t` is
//! interpolated monotonically.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{sphere_constant, RadialProfile};
use crate::fields::{eval_gradient, Extent, ScalarField};
use crate::quadrature::{integrate, integrate_line, interpolated_level_masses, level_masses, log_grid, node_cloud, sup_abs, Domain, QuadConfig, Support};
use crate::rootsys::RootSystem;
use crate::special::Pchip;
use crate::{norm, Error, Estimate, Result};

/// `p(B_1 ∩ ε)`: the weighted area of the unit sphere inside one chamber.
/// This is a geometric quantity, so the actual group order is used even when
/// `k ≡ 0`.
pub fn chamber_sphere_measure(rs: &RootSystem) -> f64 {
    sphere_constant(rs) / rs.group().order() as f64
}

/// `μ_k(B_r ∩ ε) = p(B_1 ∩ ε) r^d / d`.
pub fn chamber_ball_mass(rs: &RootSystem, radius: f64) -> f64 {
    let d = rs.effective_dimension();
    chamber_sphere_measure(rs) * radius.powf(d) / d
}

fn check_chamber(rs: &RootSystem, chamber: usize) -> Result<()> {
    if chamber < rs.chambers().len() {
        Ok(())
    } else {
        Err(Error::Validation(format!("chamber index {chamber} out of range")))
    }
}

/// Radius of the chamber ball with the given `μ_k` mass:
/// `r = (d·mass/p(B_1 ∩ ε))^{1/d}`.
pub fn set_rearrangement(rs: &RootSystem, chamber: usize, mass: f64) -> Result<f64> {
    check_chamber(rs, chamber)?;
    if mass < 0.0 || mass.is_nan() {
        return Err(Error::NegativeMass(mass));
    }
    let d = rs.effective_dimension();
    Ok((d * mass / chamber_sphere_measure(rs)).powf(1.0 / d))
}

/// Level-set masses `μ_k(|f| > t)` on a chamber, levels increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    pub levels: Vec<f64>,
    pub masses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangeConfig {
    /// Number of logarithmically spaced levels; a further quarter as many
    /// cluster below `sup |f|`.
    pub levels: usize,
    /// Lowest level as a fraction of `sup |f|`.
    pub floor: f64,
    /// Per-axis subdivision of the quadrature mesh used for level masses;
    /// `None` picks 16, 6 or 3 for one, two or more dimensions.
    pub subdivide: Option<usize>,
    pub quad: QuadConfig,
}

impl Default for RearrangeConfig {
    fn default() -> Self {
        Self { levels: 200, floor: 1e-4, subdivide: None, quad: QuadConfig::with_rel_tol(1e-8) }
    }
}

/// The rearrangement `f*` of a field on one chamber.
#[derive(Clone, Debug)]
pub struct Rearrangement {
    pub chamber: usize,
    pub effective_dimension: f64,
    /// `p(B_1 ∩ ε)`.
    pub sphere_measure: f64,
    pub sup: f64,
    pub distribution: DistributionFunction,
    /// Radius of `{|f| > t}*` for each level.
    pub radii: Vec<f64>,
    interp: Arc<Pchip>,
}

impl Rearrangement {
    pub fn value(&self, r: f64) -> f64 {
        if r > self.support_radius() {
            0.0
        } else {
            self.interp.eval(r).0
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        if r > self.support_radius() {
            0.0
        } else {
            self.interp.eval(r).1
        }
    }

    /// Radius beyond which `f*` vanishes.
    pub fn support_radius(&self) -> f64 {
        *self.interp.knots().last().expect("at least two knots")
    }

    pub fn profile(&self) -> RadialProfile {
        let (a, b) = (self.clone(), self.clone());
        RadialProfile {
            evaluator: Arc::new(move |r| a.value(r)),
            derivative: Arc::new(move |r| b.slope(r)),
            description: format!("rearrangement on chamber {}", self.chamber),
        }
    }

    fn radial_integral(&self, g: impl Fn(f64) -> f64 + Sync, cfg: &QuadConfig) -> Result<Estimate> {
        let d = self.effective_dimension;
        let r_max = self.support_radius();
        let scale = r_max / 40.0;
        let res = integrate_line(&|r| g(r) * r.powf(d - 1.0), 0.0, r_max, scale, cfg)?;
        Ok(res.estimate().scale(self.sphere_measure))
    }

    /// `‖f*‖_p` over the chamber.
    pub fn lp_norm(&self, p: f64, cfg: &QuadConfig) -> Result<Estimate> {
        Ok(self.radial_integral(|r| self.value(r).abs().powf(p), cfg)?.powf(1.0 / p))
    }

    /// `∫ |∇f*|^p dμ_k` over the chamber.
    pub fn gradient_energy(&self, p: f64, cfg: &QuadConfig) -> Result<Estimate> {
        self.radial_integral(|r| self.slope(r).abs().powf(p), cfg)
    }

    /// Radius at which `f*` drops to `t`.
    pub fn level_radius(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.support_radius());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.value(mid) > t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Symmetric decreasing rearrangement of `|f|` restricted to `chamber`.
pub fn decreasing_rearrangement(
    rs: &RootSystem,
    field: &dyn ScalarField,
    chamber: usize,
    cfg: &RearrangeConfig,
) -> Result<Rearrangement> {
    check_chamber(rs, chamber)?;
    if matches!(field.extent(), Extent::Unbounded) {
        return Err(Error::UnboundedField(field.name()));
    }
    if cfg.levels < 2 || !(cfg.floor > 0.0 && cfg.floor < 1.0) {
        return Err(Error::Validation("level grid needs at least two levels and 0 < floor < 1".into()));
    }
    let domain = Domain::Chamber { chamber };
    let sup = sup_abs(rs, field, &domain)?;
    if !sup.is_finite() {
        return Err(Error::UnboundedField(field.name()));
    }
    let subdivide = cfg.subdivide.unwrap_or(match rs.dimension() {
        1 => 16,
        2 => 6,
        _ => 3,
    });
    let cloud = node_cloud(rs, field, &domain, &cfg.quad, subdivide)?;
    let sup = cloud.iter().map(|n| n.value.abs()).fold(sup, f64::max);
    if sup == 0.0 {
        return Err(Error::Validation(format!("field {} vanishes on the chamber", field.name())));
    }
    // Log-spaced levels resolve the tail; the flat top, which carries a large
    // share of the mass in high effective dimension, gets its own cluster.
    let mut levels = log_grid(sup * cfg.floor, sup, cfg.levels);
    levels.extend(log_grid(1e-8, 0.05, cfg.levels / 4 + 2).iter().map(|s| sup * (1.0 - s)));
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let masses = interpolated_level_masses(&cloud, &levels);
    let radii = masses
        .iter()
        .map(|&m| set_rearrangement(rs, chamber, m))
        .collect::<Result<Vec<_>>>()?;

    // Knots (r, t) with r increasing; the top of the range is pinned at r = 0.
    let mut rs_k = vec![0.0];
    let mut ts_k = vec![sup];
    for (&t, &r) in levels.iter().zip(&radii).rev() {
        if r > *rs_k.last().unwrap() * (1.0 + 1e-12) + 1e-300 {
            rs_k.push(r);
            ts_k.push(t);
        }
    }
    let total = set_rearrangement(rs, chamber, level_masses(&cloud, &[0.0])[0])?;
    if total > *rs_k.last().unwrap() * (1.0 + 1e-12) {
        rs_k.push(total);
        ts_k.push(0.0);
    }
    if rs_k.len() < 2 {
        return Err(Error::Validation(format!("field {} has no resolvable level sets", field.name())));
    }
    Ok(Rearrangement {
        chamber,
        effective_dimension: rs.effective_dimension(),
        sphere_measure: chamber_sphere_measure(rs),
        sup,
        distribution: DistributionFunction { levels, masses },
        radii,
        interp: Arc::new(Pchip::new(rs_k, ts_k)),
    })
}

/// `∫_Ω |∇f|^p dμ_k` with the classical gradient.
pub fn gradient_energy(
    rs: &RootSystem,
    field: &dyn ScalarField,
    p: f64,
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let support = Support::of(field).derivative().power(p);
    let g = |x: &[f64]| norm(&eval_gradient(field, x)).powf(p);
    Ok(integrate(rs, &g, &support, domain, cfg)?.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{chamber_bumps, GaussianMixture, SmoothIndicator};
    use crate::quadrature::lp_norm;
    use crate::rootsys::Multiplicities;
    use proptest::prelude::*;

    fn a1(k: f64) -> RootSystem {
        RootSystem::a1_product(1, Multiplicities::Uniform(k)).unwrap()
    }

    #[test]
    fn set_radius_values() {
        let rs = a1(1.0);
        let r = set_rearrangement(&rs, 0, 14.0 / 3.0).unwrap();
        assert!((r - 7f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(set_rearrangement(&rs, 0, 0.0).unwrap(), 0.0);
        assert!(matches!(set_rearrangement(&rs, 0, -1.0), Err(Error::NegativeMass(_))));
        assert!(set_rearrangement(&rs, 5, 1.0).is_err());
    }

    #[test]
    fn chamber_ball_mass_matches_quadrature() {
        let rs = RootSystem::a2(0.5).unwrap();
        let one = crate::fields::Constant(1.0);
        let cfg = QuadConfig::with_rel_tol(1e-10);
        let m = integrate(&rs, &|x| one.value(x) * 1.0, &Support::of(&one), &Domain::ChamberBall { chamber: 2, radius: 1.3 }, &cfg)
            .unwrap();
        assert!((m.value / chamber_ball_mass(&rs, 1.3) - 1.0).abs() < 1e-8);
        assert!((set_rearrangement(&rs, 2, m.value).unwrap() - 1.3).abs() < 1e-8);
    }

    #[test]
    fn indicator_rearranges_to_ball() {
        let rs = a1(1.0);
        let f = SmoothIndicator { lo: 1.0, hi: 2.0, eps: 0.01 };
        let re = decreasing_rearrangement(&rs, &f, 0, &RearrangeConfig::default()).unwrap();
        assert!((re.level_radius(0.5) - 7f64.powf(1.0 / 3.0)).abs() < 1e-3);
        assert!((re.value(0.5) - 1.0).abs() < 1e-3);
        assert!(re.value(2.5) < 1e-3);
    }

    #[test]
    fn norms_are_preserved() {
        let rs = a1(1.0);
        let cfg = QuadConfig::with_rel_tol(1e-9);
        for f in chamber_bumps(&rs) {
            let re = decreasing_rearrangement(&rs, f.as_ref(), 0, &RearrangeConfig::default()).unwrap();
            for p in [1.0, 2.0, 6.0] {
                let a = lp_norm(&rs, f.as_ref(), p, &Domain::Chamber { chamber: 0 }, &cfg).unwrap().value;
                let b = re.lp_norm(p, &cfg).unwrap().value;
                assert!((a - b).abs() < 1e-4 * a, "{} p={p}: {a} vs {b}", f.name());
            }
            for p in [1.5, 2.0, 3.0] {
                let g = gradient_energy(&rs, f.as_ref(), p, &Domain::Chamber { chamber: 0 }, &cfg).unwrap().value;
                let gs = re.gradient_energy(p, &cfg).unwrap().value;
                assert!(gs <= g * (1.0 + 1e-4), "{} p={p}: {gs} vs {g}", f.name());
            }
        }
    }

    #[test]
    fn radial_decreasing_field_is_fixed() {
        let rs = a1(1.0);
        let g = GaussianMixture::standard(1);
        let cfg = RearrangeConfig { floor: 1e-8, ..RearrangeConfig::default() };
        let re = decreasing_rearrangement(&rs, &g, 1, &cfg).unwrap();
        for r in [0.0, 0.3, 1.0, 2.0, 3.0] {
            assert!((re.value(r) - (-0.5 * r * r).exp()).abs() < 2e-3, "r={r}");
        }
    }

    #[test]
    fn rejects_unbounded_fields() {
        let rs = a1(1.0);
        let f = crate::fields::FnField::new("x", Extent::Unbounded, |x| x[0]);
        assert!(matches!(decreasing_rearrangement(&rs, &f, 0, &RearrangeConfig::default()), Err(Error::UnboundedField(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn set_rearrangement_inverts_ball_mass(k in 0.0f64..3.0, r in 0.01f64..5.0) {
            let rs = RootSystem::a1_product(2, Multiplicities::Uniform(k)).unwrap();
            let back = set_rearrangement(&rs, 1, chamber_ball_mass(&rs, r)).unwrap();
            prop_assert!((back - r).abs() < 1e-12 * r);
        }
    }
}
