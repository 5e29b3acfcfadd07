//! Closed forms of the named constants and the radial extremal machinery.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate_line, QuadConfig};
use crate::rootsys::RootSystem;
use crate::special::{beta, ln_gamma};
use crate::{Error, Estimate, Result};

/// The product expression `(2π)^{N/2} Π_{α∈R₊} Γ(2k_α+1)/Γ(k_α+1)`.
/// It equals the Macdonald–Mehta integral for `Z_2^N` but not for
/// irreducible systems of rank two (it gives `16π` for `A2`, `k = 1`, where
/// the integral is `24π`).
pub fn macdonald_mehta_product_formula(rs: &RootSystem) -> f64 {
    let n = rs.dimension() as f64;
    let log: f64 = rs.multiplicities().iter().map(|&k| ln_gamma(2.0 * k + 1.0) - ln_gamma(k + 1.0)).sum();
    (0.5 * n * (2.0 * PI).ln() + log).exp()
}

/// Macdonald–Mehta integral `M_k = ∫ e^{−|x|²/2} dμ_k`.
///
/// Closed forms: the product expression for `Z_2^N`; for rank two, polar
/// coordinates give `2^γ Γ(γ+1) ∫_0^{2π} Π_α |⟨α, θ⟩|^{2k_α} dθ` with the
/// angular factor `2^{k(2−m)}·2B(k+½, ½)` (one orbit, `m` odd) or
/// `2^{(k_a+k_b)(2−m/2)}·2B(k_a+½, k_b+½)` (two alternating orbits). Other
/// systems of rank ≥ 3 fall back to the product expression.
pub fn macdonald_mehta(rs: &RootSystem) -> f64 {
    if rs.is_product() || rs.dimension() != 2 {
        return macdonald_mehta_product_formula(rs);
    }
    let mut by_angle: Vec<(f64, f64)> = rs
        .roots()
        .iter()
        .enumerate()
        .map(|(i, a)| (a[1].atan2(a[0]).rem_euclid(PI), rs.k(i)))
        .collect();
    by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = by_angle.len();
    let gamma = rs.gamma();
    let log_angular = if m % 2 == 1 {
        let k = by_angle[0].1;
        k * (2.0 - m as f64) * 2f64.ln() + 2f64.ln() + beta(k + 0.5, 0.5).ln()
    } else {
        let (ka, kb) = (by_angle[0].1, by_angle[1].1);
        (ka + kb) * (2.0 - 0.5 * m as f64) * 2f64.ln() + 2f64.ln() + beta(ka + 0.5, kb + 0.5).ln()
    };
    (gamma * 2f64.ln() + ln_gamma(gamma + 1.0) + log_angular).exp()
}

/// `p(B_1) = ∫_{S^{N−1}} w_k dσ = M_k / (2^{d/2−1} Γ(d/2))`.
pub fn sphere_constant(rs: &RootSystem) -> f64 {
    let d = rs.effective_dimension();
    macdonald_mehta(rs) / ((0.5 * d - 1.0) * 2f64.ln() + ln_gamma(0.5 * d)).exp()
}

/// `p(B_1^ε) = p(B_1)/|G|`, with `|G| = 1` when every multiplicity vanishes.
pub fn chamber_sphere_constant(rs: &RootSystem) -> f64 {
    sphere_constant(rs) / rs.effective_group_order()
}

/// Conjugate exponent `p′ = p/(p−1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Sobolev exponent `q = pd/(d−p)`.
pub fn sobolev_exponent(d: f64, p: f64) -> f64 {
    p * d / (d - p)
}

fn check_range(d: f64, p: f64) -> Result<()> {
    if p > 1.0 && p < d {
        Ok(())
    } else {
        Err(Error::ParameterRange(format!("need 1 < p < d, got p = {p}, d = {d}")))
    }
}

/// A radial profile `g(r)` with its derivative.
#[derive(Clone)]
pub struct RadialProfile {
    pub evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub description: String,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("description", &self.description).finish()
    }
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        (self.evaluator)(r)
    }

    pub fn slope(&self, r: f64) -> f64 {
        (self.derivative)(r)
    }

    /// `r ↦ g(λr)`.
    pub fn dilate(&self, lambda: f64) -> Self {
        let (e, d) = (self.evaluator.clone(), self.derivative.clone());
        Self {
            evaluator: Arc::new(move |r| e(lambda * r)),
            derivative: Arc::new(move |r| lambda * d(lambda * r)),
            description: format!("{}(λ={lambda})", self.description),
        }
    }

    /// `r ↦ c·g(r)`.
    pub fn scale(&self, c: f64) -> Self {
        let (e, d) = (self.evaluator.clone(), self.derivative.clone());
        Self {
            evaluator: Arc::new(move |r| c * e(r)),
            derivative: Arc::new(move |r| c * d(r)),
            description: format!("{}·{c}", self.description),
        }
    }
}

/// `φ(r) = (a + b r^{p′})^{1−d/p}`.
pub fn extremal_profile(d: f64, p: f64, a: f64, b: f64) -> Result<RadialProfile> {
    check_range(d, p)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::ParameterRange(format!("need a, b > 0, got a = {a}, b = {b}")));
    }
    let pp = conjugate(p);
    let e = 1.0 - d / p;
    Ok(RadialProfile {
        evaluator: Arc::new(move |r| (a + b * r.powf(pp)).powf(e)),
        derivative: Arc::new(move |r| {
            if r == 0.0 {
                0.0
            } else {
                e * (a + b * r.powf(pp)).powf(e - 1.0) * b * pp * r.powf(pp - 1.0)
            }
        }),
        description: format!("({a}+{b}r^{pp})^{e}"),
    })
}

/// `J(g) = (∫ g^q r^{d−1} dr)^{1/q} / (∫ |g′|^p r^{d−1} dr)^{1/p}`, `q = pd/(d−p)`.
pub fn talenti_functional(profile: &RadialProfile, d: f64, p: f64, cfg: &QuadConfig) -> Result<Estimate> {
    check_range(d, p)?;
    let q = sobolev_exponent(d, p);
    let num = integrate_line(&|r| profile.value(r).abs().powf(q) * r.powf(d - 1.0), 0.0, f64::INFINITY, 1.0, cfg)?;
    let den = integrate_line(&|r| profile.slope(r).abs().powf(p) * r.powf(d - 1.0), 0.0, f64::INFINITY, 1.0, cfg)?;
    for (what, v) in [("∫g^q", &num), ("∫|g′|^p", &den)] {
        if !v.value.is_finite() || v.value <= 0.0 {
            return Err(Error::DivergentIntegral(format!("{what} = {}", v.value)));
        }
    }
    Ok(num.estimate().powf(1.0 / q).div(den.estimate().powf(1.0 / p)))
}

/// Maximum of the Talenti functional:
/// `d^{−1/p} ((p−1)/(d−p))^{1/p′} [B(d/p, d/p′)/p′]^{−1/d}`.
pub fn talenti_bound(d: f64, p: f64) -> Result<f64> {
    check_range(d, p)?;
    let pp = conjugate(p);
    Ok(d.powf(-1.0 / p) * ((p - 1.0) / (d - p)).powf(1.0 / pp) * (beta(d / p, d / pp) / pp).powf(-1.0 / d))
}

/// Sharp chamber Sobolev constant
/// `C_W = d^{−1/p}((p−1)/(d−p))^{1/p′}
///  [2^{d/2−1} p′ |G| Γ(d) Γ(d/2) / (M_k Γ(d/p) Γ(d/p′))]^{1/d}`.
pub fn weyl_constant(rs: &RootSystem, p: f64) -> Result<f64> {
    let d = rs.effective_dimension();
    check_range(d, p)?;
    let pp = conjugate(p);
    let log_bracket = (0.5 * d - 1.0) * 2f64.ln() + pp.ln() + rs.effective_group_order().ln() - macdonald_mehta(rs).ln()
        + ln_gamma(d)
        + ln_gamma(0.5 * d)
        - ln_gamma(d / p)
        - ln_gamma(d / pp);
    Ok(d.powf(-1.0 / p) * ((p - 1.0) / (d - p)).powf(1.0 / pp) * (log_bracket / d).exp())
}

/// The same constant assembled from the polar reduction:
/// `p(B_1^ε)^{1/q−1/p} · talenti_bound(d, p)`.
pub fn weyl_constant_via_sphere(rs: &RootSystem, p: f64) -> Result<f64> {
    let d = rs.effective_dimension();
    let q = sobolev_exponent(d, p);
    Ok(chamber_sphere_constant(rs).powf(1.0 / q - 1.0 / p) * talenti_bound(d, p)?)
}

/// Bracket for the sharp Dunkl–Sobolev constant at `p = 2`:
/// `√(2/(d(d−2))) [c Γ(d)/(M_k Γ(d/2))]^{1/d}` with `c = 1` (lower) and `c = |G|` (upper).
pub fn dunkl_constant_bounds(rs: &RootSystem) -> Result<(f64, f64)> {
    let d = rs.effective_dimension();
    if !(d > 2.0) {
        return Err(Error::ParameterRange(format!("need N + 2γ > 2, got {d}")));
    }
    let pre = (2.0 / (d * (d - 2.0))).sqrt();
    let log = ln_gamma(d) - macdonald_mehta(rs).ln() - ln_gamma(0.5 * d);
    let lower = pre * (log / d).exp();
    let upper = pre * ((log + rs.effective_group_order().ln()) / d).exp();
    Ok((lower, upper))
}

/// Nash constant: `‖f‖₂^{1+2/d} ≤ C ‖∇_k f‖₂ ‖f‖₁^{2/d}` with
/// `C = ((d+2)/d)^{(d+2)/(2d)} (p(B_1)/(2M_k²))^{1/d}`, the optimum over `R` of
/// `‖f‖₂² ≤ A/R² + B R^d`, `A = ‖∇_k f‖₂²`, `B = p(B_1)‖f‖₁²/(M_k² d)`.
pub fn nash_constant(rs: &RootSystem) -> f64 {
    let d = rs.effective_dimension();
    let mk = macdonald_mehta(rs);
    ((d + 2.0) / d).powf((d + 2.0) / (2.0 * d)) * (sphere_constant(rs) / (2.0 * mk * mk)).powf(1.0 / d)
}

/// Minimises `A/R² + B R^d` over `R > 0` by golden-section search on `ln R`.
pub fn minimize_nash_bound(a: f64, b: f64, d: f64) -> (f64, f64) {
    let phi = |lr: f64| {
        let r = lr.exp();
        a / (r * r) + b * r.powf(d)
    };
    let guess = (2.0 * a / (d * b)).ln() / (d + 2.0);
    let (mut lo, mut hi) = (guess - 20.0, guess + 20.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = phi(x2);
        }
    }
    let lr = 0.5 * (lo + hi);
    (lr.exp(), phi(lr))
}

/// Nash constant recovered from a numeric minimisation for given `(A, B)`.
pub fn nash_constant_numeric(rs: &RootSystem, a: f64, b: f64) -> f64 {
    let d = rs.effective_dimension();
    let mk = macdonald_mehta(rs);
    let (_, min) = minimize_nash_bound(a, b, d);
    let l1_sq = b * mk * mk * d / sphere_constant(rs);
    min.powf((d + 2.0) / (2.0 * d)) / (a.sqrt() * l1_sq.powf(1.0 / d))
}

/// Sobolev constant at `p = 2` obtained from the Nash inequality:
/// `2^{1/(2p−1)} (2^q − 1)^{1/q} C_nash` with `p = d/(d+2)`, `q = 2d/(d−2)`.
pub fn sobolev_from_nash(rs: &RootSystem, nash_c: f64) -> Result<f64> {
    let d = rs.effective_dimension();
    if !(d > 2.0) {
        return Err(Error::ParameterRange(format!("need N + 2γ > 2, got {d}")));
    }
    let p = d / (d + 2.0);
    let q = 2.0 * d / (d - 2.0);
    Ok(2f64.powf(1.0 / (2.0 * p - 1.0)) * (2f64.powf(q) - 1.0).powf(1.0 / q) * nash_c)
}

/// Constant `C` in `Γ(f) ≥ C |∇_k f|²`:
/// `C = (C̃/√|R₊|)/(1 + C̃/√|R₊|)`, `C̃ = min_α 1/(2k_α)`; `C = 1` when `k ≡ 0`.
pub fn gamma_bound_constant(rs: &RootSystem) -> f64 {
    let kmax = rs.multiplicities().iter().copied().fold(0.0, f64::max);
    if kmax == 0.0 {
        return 1.0;
    }
    let c = 1.0 / (2.0 * kmax) / (rs.roots().len() as f64).sqrt();
    c / (1.0 + c)
}

/// [`gamma_bound_constant`] with `1/|R₊|` in place of `1/√|R₊|`, the factor
/// Cauchy–Schwarz gives for `(Σ_α α_i k_α q_α)² ≤ |R₊| Σ_α α_i² k_α² q_α²`.
/// The two agree for `A1` products, where each coordinate meets one root.
pub fn gamma_bound_constant_root_count(rs: &RootSystem) -> f64 {
    let kmax = rs.multiplicities().iter().copied().fold(0.0, f64::max);
    if kmax == 0.0 {
        return 1.0;
    }
    let c = 1.0 / (2.0 * kmax) / rs.roots().len() as f64;
    c / (1.0 + c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub p: f64,
    pub gamma: f64,
    pub effective_dimension: f64,
    pub group_order: f64,
    pub macdonald_mehta: f64,
    pub sphere_constant: f64,
    pub chamber_sphere_constant: f64,
    pub nash_constant: f64,
    pub sobolev_from_nash: Option<f64>,
    pub talenti_bound: Option<f64>,
    pub weyl_constant: Option<f64>,
    pub classical_constant: Option<f64>,
    pub dunkl_lower: Option<f64>,
    pub dunkl_upper: Option<f64>,
    pub gamma_bound_constant: f64,
}

impl ConstantsReport {
    /// Every constant for `rs` at exponent `p`; entries undefined for the
    /// given `(d, p)` are `None`.
    pub fn new(rs: &RootSystem, p: f64) -> Self {
        let d = rs.effective_dimension();
        let nash = nash_constant(rs);
        let bounds = dunkl_constant_bounds(rs).ok();
        Self {
            p,
            gamma: rs.gamma(),
            effective_dimension: d,
            group_order: rs.effective_group_order(),
            macdonald_mehta: macdonald_mehta(rs),
            sphere_constant: sphere_constant(rs),
            chamber_sphere_constant: chamber_sphere_constant(rs),
            nash_constant: nash,
            sobolev_from_nash: sobolev_from_nash(rs, nash).ok(),
            talenti_bound: talenti_bound(d, p).ok(),
            weyl_constant: weyl_constant(rs, p).ok(),
            classical_constant: bounds.map(|b| b.1),
            dunkl_lower: bounds.map(|b| b.0),
            dunkl_upper: bounds.map(|b| b.1),
            gamma_bound_constant: gamma_bound_constant(rs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Multiplicities;
    use proptest::prelude::*;

    fn a1(k: f64) -> RootSystem {
        RootSystem::a1_product(1, Multiplicities::Uniform(k)).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn macdonald_mehta_values() {
        assert!(close(macdonald_mehta(&a1(1.0)), 5.01325654926200100, 1e-14));
        assert!(close(macdonald_mehta(&a1(0.5)), 2.8284271247461901, 1e-14));
        assert!(close(macdonald_mehta(&a1(2.0)), 30.079539295572006, 1e-14));
        let a1x2 = RootSystem::a1_product(2, Multiplicities::Uniform(1.0)).unwrap();
        assert!(close(macdonald_mehta(&a1x2), 8.0 * PI, 1e-14));
        assert!(close(macdonald_mehta(&RootSystem::a2(1.0).unwrap()), 24.0 * PI, 1e-14));
        assert!(close(macdonald_mehta(&RootSystem::b2(1.0, 0.5).unwrap()), 64.0, 1e-14));
        assert!(close(macdonald_mehta(&RootSystem::b2(1.0, 1.0).unwrap()), 96.0 * PI, 1e-14));
        assert!(close(macdonald_mehta(&RootSystem::a2(0.5).unwrap()), 10.634723105433097618, 1e-14));
        assert!(close(macdonald_mehta_product_formula(&RootSystem::a2(1.0).unwrap()), 16.0 * PI, 1e-14));
        assert!(close(macdonald_mehta_product_formula(&RootSystem::b2(1.0, 0.5).unwrap()), 32.0, 1e-14));
        let flat = RootSystem::a1_product(3, Multiplicities::Uniform(0.0)).unwrap();
        assert!(close(macdonald_mehta(&flat), (2.0 * PI).powf(1.5), 1e-14));
    }

    #[test]
    fn sphere_values() {
        assert!(close(sphere_constant(&a1(1.0)), 4.0, 1e-14));
        assert!(close(chamber_sphere_constant(&a1(1.0)), 2.0, 1e-14));
        let flat = RootSystem::a1_product(2, Multiplicities::Uniform(0.0)).unwrap();
        assert!(close(sphere_constant(&flat), 2.0 * PI, 1e-14));
    }

    #[test]
    fn sobolev_bracket_for_a1() {
        let rs = a1(1.0);
        let (lo, hi) = dunkl_constant_bounds(&rs).unwrap();
        assert!(close(lo, 0.62576232495158904, 1e-13));
        assert!(close(hi, 0.78841112543766285, 1e-13));
        assert!(close(hi / lo, 2f64.powf(1.0 / 3.0), 1e-14));
        let w = weyl_constant(&rs, 2.0).unwrap();
        assert!(close(w, hi, 1e-12));
        assert!(close(weyl_constant_via_sphere(&rs, 2.0).unwrap(), w, 1e-12));
        let flat = RootSystem::a1_product(3, Multiplicities::Uniform(0.0)).unwrap();
        let (lo, hi) = dunkl_constant_bounds(&flat).unwrap();
        assert_eq!(lo, hi);
        assert!(dunkl_constant_bounds(&RootSystem::a2(0.0).unwrap()).is_err());
    }

    #[test]
    fn flat_case_is_the_classical_sobolev_constant() {
        // 1/√(πd(d−2)) (Γ(d)/Γ(d/2))^{1/d} for d = 3.
        let flat = RootSystem::a1_product(3, Multiplicities::Uniform(0.0)).unwrap();
        let classical = 1.0 / (3.0 * PI).sqrt() * (crate::special::gamma(3.0) / crate::special::gamma(1.5)).powf(1.0 / 3.0);
        assert!(close(weyl_constant(&flat, 2.0).unwrap(), classical, 1e-12));
    }

    #[test]
    fn talenti_bound_and_extremal() {
        assert!(close(talenti_bound(3.0, 2.0).unwrap(), 0.99333577291021873, 1e-14));
        assert!(talenti_bound(2.0, 2.0).is_err());
        let cfg = QuadConfig::with_rel_tol(1e-12);
        let phi = extremal_profile(3.0, 2.0, 1.0, 1.0).unwrap();
        assert!(close(phi.value(2.0), 5f64.powf(-0.5), 1e-15));
        assert_eq!(phi.value(0.0), 1.0);
        let j = talenti_functional(&phi, 3.0, 2.0, &cfg).unwrap();
        assert!(close(j.value, 0.99333577291021873, 1e-8));
        let j2 = talenti_functional(&phi.dilate(2.7).scale(4.0), 3.0, 2.0, &cfg).unwrap();
        assert!(close(j2.value, j.value, 1e-8));
        for (d, p) in [(4.0, 1.5), (5.0, 3.0), (3.5, 2.0)] {
            let phi = extremal_profile(d, p, 0.5, 2.0).unwrap();
            let j = talenti_functional(&phi, d, p, &cfg).unwrap();
            assert!(close(j.value, talenti_bound(d, p).unwrap(), 1e-7), "d={d} p={p}");
        }
    }

    #[test]
    fn nash_values() {
        let rs = a1(1.0);
        let c = nash_constant(&rs);
        assert!(close(c, 0.65837096548628793, 1e-14));
        assert!(close(sobolev_from_nash(&rs, c).unwrap(), 42.025292020924872, 1e-13));
        assert!(close(sobolev_from_nash(&rs, c).unwrap() / c, 32.0 * 63f64.powf(1.0 / 6.0), 1e-14));
        assert!(sobolev_from_nash(&RootSystem::a1_product(2, Multiplicities::Uniform(0.0)).unwrap(), c).is_err());
    }

    #[test]
    fn nash_minimisation_matches_closed_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for rs in [a1(1.0), RootSystem::a2(0.5).unwrap(), a1(0.0)] {
            let c = nash_constant(&rs);
            for _ in 0..10 {
                let a = 10f64.powf(rng.gen_range(-2.0..2.0));
                let b = 10f64.powf(rng.gen_range(-2.0..2.0));
                let num = nash_constant_numeric(&rs, a, b);
                assert!(close(num, c, 1e-10), "{num} vs {c}");
            }
        }
    }

    #[test]
    fn gamma_bound_values() {
        assert!(close(gamma_bound_constant(&a1(1.0)), 1.0 / 3.0, 1e-15));
        assert_eq!(gamma_bound_constant(&a1(0.0)), 1.0);
        let a1x2 = RootSystem::a1_product(2, Multiplicities::Uniform(1.0)).unwrap();
        assert!(close(gamma_bound_constant(&a1x2), 0.2612038749637414, 1e-14));
        assert_eq!(gamma_bound_constant_root_count(&a1(1.0)), gamma_bound_constant(&a1(1.0)));
        let i2 = RootSystem::dihedral(5, Multiplicities::Uniform(1.0)).unwrap();
        assert!(close(gamma_bound_constant_root_count(&i2), 1.0 / 11.0, 1e-15));
    }

    #[test]
    fn gamma_bound_fails_on_i2_5_for_linear_fields() {
        // For f = x₁ on I2(m), Σ_α αα^T = m·I gives Γ = 1 + mk and
        // |∇_k f|² = (1 + mk)², so inf Γ/|∇_k f|² ≤ 1/(1 + mk).
        let i2 = RootSystem::dihedral(5, Multiplicities::Uniform(1.0)).unwrap();
        let f = crate::fields::FnField::new("x1", crate::fields::Extent::Unbounded, |x| x[0]);
        let x = [0.3, -0.7];
        let g = crate::fields::carre_du_champ(&i2, &f, &x);
        let dk = crate::fields::dunkl_gradient(&i2, &f, &x);
        let ratio = g / crate::dot(&dk, &dk);
        assert!(close(ratio, 1.0 / 6.0, 1e-9), "{ratio}");
        assert!(gamma_bound_constant(&i2) > ratio);
        assert!(gamma_bound_constant_root_count(&i2) <= ratio);
    }

    #[test]
    fn report_is_complete_for_a1() {
        let r = ConstantsReport::new(&a1(1.0), 2.0);
        assert_eq!(r.effective_dimension, 3.0);
        assert_eq!(r.dunkl_upper, r.classical_constant);
        assert!(r.dunkl_lower.unwrap() <= r.dunkl_upper.unwrap());
        let flat = ConstantsReport::new(&RootSystem::a1_product(2, Multiplicities::Uniform(0.0)).unwrap(), 2.0);
        assert!(flat.weyl_constant.is_none() && flat.sobolev_from_nash.is_none());
    }

    proptest! {
        #[test]
        fn bracket_ratio_is_group_order_root(k in 0.05f64..3.0) {
            let rs = RootSystem::a2(k).unwrap();
            let (lo, hi) = dunkl_constant_bounds(&rs).unwrap();
            let expect = 6f64.powf(1.0 / rs.effective_dimension());
            prop_assert!((hi / lo - expect).abs() < 1e-12 * expect);
        }

        #[test]
        fn two_routes_to_the_weyl_constant(k in 0.0f64..3.0, p in 1.1f64..2.9) {
            let rs = RootSystem::a1_product(2, Multiplicities::Uniform(k)).unwrap();
            prop_assume!(p < rs.effective_dimension());
            let a = weyl_constant(&rs, p).unwrap();
            let b = weyl_constant_via_sphere(&rs, p).unwrap();
            prop_assert!((a - b).abs() < 1e-11 * a);
        }

        #[test]
        fn doubling_the_sphere_constant_scales_nash(k in 0.1f64..2.0) {
            // Nash constant ∝ p(B_1)^{1/d} at fixed M_k and d.
            let rs = RootSystem::a1_product(1, Multiplicities::Uniform(k)).unwrap();
            let d = rs.effective_dimension();
            let mk = macdonald_mehta(&rs);
            let direct = |pb: f64| ((d + 2.0) / d).powf((d + 2.0) / (2.0 * d)) * (pb / (2.0 * mk * mk)).powf(1.0 / d);
            let pb = sphere_constant(&rs);
            prop_assert!((direct(pb) - nash_constant(&rs)).abs() < 1e-13);
            prop_assert!((direct(2.0 * pb) / direct(pb) - 2f64.powf(1.0 / d)).abs() < 1e-13);
        }
    }
}
