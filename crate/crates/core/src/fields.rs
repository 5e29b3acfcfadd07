//! Scalar test fields and the pointwise Dunkl calculus: `T_i`, `∇_k`, `Δ_k`,
//! the difference parts `D_i`, and the carré-du-champ `Γ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::rootsys::RootSystem;
use crate::special::gauss_legendre;
use crate::{dot, norm, Error, Result, Vector};

/// Decay or support information used to truncate integration domains.
#[derive(Clone, Debug, PartialEq)]
pub enum Extent {
    /// Identically zero outside the box `[lo, hi]`.
    Compact { lo: Vector, hi: Vector },
    /// `|f(x)| ≤ C exp(−(|x| − shift)² / (2 width²))` once `|x| ≥ shift`.
    Gaussian { shift: f64, width: f64 },
    /// `|f(x)|` decays like `|x|^{−rate}`.
    Algebraic { rate: f64 },
    Unbounded,
}

impl Extent {
    /// Extent of `|f|^p` (or of a product of `p` factors with this extent).
    pub fn power(&self, p: f64) -> Extent {
        match self {
            Extent::Gaussian { shift, width } => Extent::Gaussian { shift: *shift, width: width / p.sqrt() },
            Extent::Algebraic { rate } => Extent::Algebraic { rate: rate * p },
            other => other.clone(),
        }
    }

    /// Extent after one differentiation.
    pub fn derivative(&self) -> Extent {
        match self {
            Extent::Algebraic { rate } => Extent::Algebraic { rate: rate + 1.0 },
            other => other.clone(),
        }
    }

    /// Radius of the smallest origin-centred ball containing the support.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Extent::Compact { lo, hi } => Some(
                lo.iter()
                    .zip(hi)
                    .map(|(a, b)| a.abs().max(b.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            _ => None,
        }
    }

    /// Whether `∫|f|^p dμ_k` over the whole space is finite for a weight of
    /// homogeneity `d − N`.
    pub fn integrable(&self, p: f64, d: f64) -> bool {
        match self {
            Extent::Compact { .. } | Extent::Gaussian { .. } => true,
            Extent::Algebraic { rate } => rate * p > d,
            Extent::Unbounded => false,
        }
    }

    /// Smallest extent covering both inputs, used for sums and products.
    pub fn union(&self, other: &Extent) -> Extent {
        use Extent::*;
        match (self, other) {
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            (Algebraic { rate: a }, Algebraic { rate: b }) => Algebraic { rate: a.min(*b) },
            (Algebraic { rate }, _) | (_, Algebraic { rate }) => Algebraic { rate: *rate },
            (Gaussian { shift: s1, width: w1 }, Gaussian { shift: s2, width: w2 }) => {
                Gaussian { shift: s1.max(*s2), width: w1.max(*w2) }
            }
            (Gaussian { shift, width }, Compact { lo, hi })
            | (Compact { lo, hi }, Gaussian { shift, width }) => {
                let r = Compact { lo: lo.clone(), hi: hi.clone() }.support_radius().unwrap_or(0.0);
                Gaussian { shift: shift.max(r), width: *width }
            }
            (Compact { lo: l1, hi: h1 }, Compact { lo: l2, hi: h2 }) => Compact {
                lo: l1.iter().zip(l2).map(|(a, b)| a.min(*b)).collect(),
                hi: h1.iter().zip(h2).map(|(a, b)| a.max(*b)).collect(),
            },
        }
    }
}

/// A real function on `ℝ^N` with optional analytic derivatives.
///
/// Hessians are returned row-major as `N·N` entries.
pub trait ScalarField: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<Vector> {
        None
    }

    fn hessian(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn extent(&self) -> Extent;

    /// Length scale of the smallest feature, used to pre-split cells.
    fn scale(&self) -> f64 {
        1.0
    }

    fn is_radial(&self) -> bool {
        false
    }
}

pub type FieldRef = Arc<dyn ScalarField>;

/// `∇f`: analytic when available, otherwise central differences with step
/// `ε^{1/3}(1+|x|)`.
pub fn eval_gradient(f: &dyn ScalarField, x: &[f64]) -> Vector {
    if let Some(g) = f.gradient(x) {
        return g;
    }
    let h = f64::EPSILON.cbrt() * (1.0 + norm(x));
    let mut y: Vector = x.into();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f.value(&y);
            y[i] = x[i] - h;
            let fm = f.value(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Hessian, row-major: analytic, else differences of the analytic gradient,
/// else second differences with step `ε^{1/4}(1+|x|)`.
pub fn eval_hessian(f: &dyn ScalarField, x: &[f64]) -> Vec<f64> {
    if let Some(h) = f.hessian(x) {
        return h;
    }
    let n = x.len();
    let mut out = vec![0.0; n * n];
    let mut y: Vector = x.into();
    if f.gradient(x).is_some() {
        let h = f64::EPSILON.cbrt() * (1.0 + norm(x));
        for j in 0..n {
            y[j] = x[j] + h;
            let gp = eval_gradient(f, &y);
            y[j] = x[j] - h;
            let gm = eval_gradient(f, &y);
            y[j] = x[j];
            for i in 0..n {
                out[i * n + j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (out[i * n + j] + out[j * n + i]);
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        return out;
    }
    let h = f64::EPSILON.powf(0.25) * (1.0 + norm(x));
    let f0 = f.value(x);
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                y[i] = x[i] + h;
                let fp = f.value(&y);
                y[i] = x[i] - h;
                let fm = f.value(&y);
                y[i] = x[i];
                (fp - 2.0 * f0 + fm) / (h * h)
            } else {
                let mut corner = |si: f64, sj: f64| {
                    y[i] = x[i] + si * h;
                    y[j] = x[j] + sj * h;
                    let v = f.value(&y);
                    y[i] = x[i];
                    y[j] = x[j];
                    v
                };
                (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                    / (4.0 * h * h)
            };
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

fn quad_form(h: &[f64], a: &[f64]) -> f64 {
    let n = a.len();
    (0..n).map(|i| a[i] * (0..n).map(|j| h[i * n + j] * a[j]).sum::<f64>()).sum()
}

/// Distance below which a point counts as lying on a wall.
fn wall_threshold(x: &[f64]) -> f64 {
    1e-8 * (1.0 + norm(x))
}

/// Below this distance difference quotients are evaluated as segment
/// integrals of derivatives, which avoids cancellation.
fn near_wall_threshold(x: &[f64]) -> f64 {
    1e-2 * (1.0 + norm(x))
}

const SEGMENT_NODES: usize = 16;

/// `(f(x) − f(σ_α x)) / ⟨α,x⟩` for the positive root with index `i`.
///
/// Writing `x = x̄ + (s/2)α` with `x̄` on the wall, the quotient equals
/// `½ ∫_{−1}^{1} ⟨∇f(x̄ + (sτ/2)α), α⟩ dτ`, which is what is evaluated near
/// the wall; on the wall it reduces to `⟨∇f(x̄), α⟩`.
pub fn difference_quotient(rs: &RootSystem, f: &dyn ScalarField, i: usize, x: &[f64]) -> f64 {
    let a = &rs.roots()[i];
    let s = dot(a, x);
    let bar: Vector = x.iter().zip(a.iter()).map(|(xi, ai)| xi - 0.5 * s * ai).collect();
    if s.abs() < wall_threshold(x) {
        return dot(&eval_gradient(f, &bar), a);
    }
    if s.abs() < near_wall_threshold(x) {
        let rule = gauss_legendre(SEGMENT_NODES);
        let mut y = bar.clone();
        let mut acc = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            for j in 0..x.len() {
                y[j] = bar[j] + 0.5 * s * t * a[j];
            }
            acc += w * dot(&eval_gradient(f, &y), a);
        }
        return 0.5 * acc;
    }
    (f.value(x) - f.value(&rs.reflect_root(i, x))) / s
}

/// `⟨∇f(x),α⟩/⟨α,x⟩ − (f(x) − f(σ_α x))/⟨α,x⟩²`, the bracket in `Δ_k`.
///
/// Near the wall this is `¼ ∫_{−1}^{1} αᵀH(x̄ + (sτ/2)α)α (1+τ) dτ`, with the
/// on-wall limit `½ αᵀH(x̄)α`.
fn laplacian_bracket(rs: &RootSystem, f: &dyn ScalarField, i: usize, x: &[f64]) -> f64 {
    let a = &rs.roots()[i];
    let s = dot(a, x);
    let bar: Vector = x.iter().zip(a.iter()).map(|(xi, ai)| xi - 0.5 * s * ai).collect();
    if s.abs() < wall_threshold(x) {
        return 0.5 * quad_form(&eval_hessian(f, &bar), a);
    }
    if s.abs() < near_wall_threshold(x) {
        let rule = gauss_legendre(SEGMENT_NODES);
        let mut y = bar.clone();
        let mut acc = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            for j in 0..x.len() {
                y[j] = bar[j] + 0.5 * s * t * a[j];
            }
            acc += w * quad_form(&eval_hessian(f, &y), a) * (1.0 + t);
        }
        return 0.25 * acc;
    }
    let g = eval_gradient(f, x);
    dot(&g, a) / s - (f.value(x) - f.value(&rs.reflect_root(i, x))) / (s * s)
}

/// `(D_1 f(x), …, D_N f(x))` with `D_i f = Σ k_α α_i (f(x) − f(σ_α x))/⟨α,x⟩`.
pub fn difference_parts(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> Vector {
    let mut out: Vector = std::iter::repeat(0.0).take(x.len()).collect();
    for (i, a) in rs.roots().iter().enumerate() {
        let k = rs.k(i);
        if k == 0.0 {
            continue;
        }
        let q = difference_quotient(rs, f, i, x);
        for j in 0..x.len() {
            out[j] += k * a[j] * q;
        }
    }
    out
}

/// `∇_k f(x) = (T_1 f(x), …, T_N f(x))`.
pub fn dunkl_gradient(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> Vector {
    let g = eval_gradient(f, x);
    let d = difference_parts(rs, f, x);
    g.iter().zip(&d).map(|(a, b)| a + b).collect()
}

/// `Δ_k f = Δf + 2 Σ k_α [⟨∇f,α⟩/⟨α,x⟩ − (f(x) − f(σ_α x))/⟨α,x⟩²]`.
pub fn dunkl_laplacian(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> f64 {
    let n = x.len();
    let h = eval_hessian(f, x);
    let mut lap: f64 = (0..n).map(|i| h[i * n + i]).sum();
    for i in 0..rs.roots().len() {
        let k = rs.k(i);
        if k != 0.0 {
            lap += 2.0 * k * laplacian_bracket(rs, f, i, x);
        }
    }
    lap
}

/// `Γ(f) = |∇f|² + Σ k_α ((f(x) − f(σ_α x))/⟨α,x⟩)²`.
pub fn carre_du_champ(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> f64 {
    let g = eval_gradient(f, x);
    let mut gamma = dot(&g, &g);
    for i in 0..rs.roots().len() {
        let k = rs.k(i);
        if k != 0.0 {
            let q = difference_quotient(rs, f, i, x);
            gamma += k * q * q;
        }
    }
    gamma
}

/// `Γ(f) = ½(Δ_k(f²) − 2fΔ_k f)`, evaluated independently of
/// [`carre_du_champ`]. Returns the value together with the magnitude of the
/// cancelling terms, which bounds its rounding error.
pub fn carre_du_champ_via_definition_with_scale(
    rs: &RootSystem,
    f: &dyn ScalarField,
    x: &[f64],
) -> (f64, f64) {
    let sq = Square(f);
    let a = dunkl_laplacian(rs, &sq, x);
    let b = 2.0 * f.value(x) * dunkl_laplacian(rs, f, x);
    (0.5 * (a - b), 0.5 * (a.abs() + b.abs()))
}

pub fn carre_du_champ_via_definition(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> f64 {
    carre_du_champ_via_definition_with_scale(rs, f, x).0
}

/// All pointwise Dunkl quantities at one point.
#[derive(Clone, Debug, Serialize)]
pub struct DunklPointValues {
    pub classical_gradient: Vector,
    pub difference_parts: Vector,
    pub dunkl_gradient: Vector,
    pub dunkl_laplacian: f64,
    pub gamma_value: f64,
}

pub fn point_values(rs: &RootSystem, f: &dyn ScalarField, x: &[f64]) -> DunklPointValues {
    let classical_gradient = eval_gradient(f, x);
    let difference_parts = difference_parts(rs, f, x);
    let dunkl_gradient = classical_gradient
        .iter()
        .zip(&difference_parts)
        .map(|(a, b)| a + b)
        .collect();
    DunklPointValues {
        classical_gradient,
        difference_parts,
        dunkl_gradient,
        dunkl_laplacian: dunkl_laplacian(rs, f, x),
        gamma_value: carre_du_champ(rs, f, x),
    }
}

// ---------------------------------------------------------------------------
// Field combinators

/// `f²` with derivatives from the product rule.
struct Square<'a>(&'a dyn ScalarField);

impl ScalarField for Square<'_> {
    fn name(&self) -> String {
        format!("({})^2", self.0.name())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x).powi(2)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let v = self.0.value(x);
        Some(eval_gradient(self.0, x).iter().map(|g| 2.0 * v * g).collect())
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let v = self.0.value(x);
        let g = eval_gradient(self.0, x);
        let h = eval_hessian(self.0, x);
        Some((0..n * n).map(|ij| 2.0 * (g[ij / n] * g[ij % n] + v * h[ij])).collect())
    }
    fn extent(&self) -> Extent {
        self.0.extent().power(2.0)
    }
    fn scale(&self) -> f64 {
        self.0.scale()
    }
}

/// `|f|`, differentiable wherever `f ≠ 0`.
pub struct Abs(pub FieldRef);

impl ScalarField for Abs {
    fn name(&self) -> String {
        format!("|{}|", self.0.name())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x).abs()
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let s = self.0.value(x).signum();
        Some(eval_gradient(self.0.as_ref(), x).iter().map(|g| s * g).collect())
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s = self.0.value(x).signum();
        Some(eval_hessian(self.0.as_ref(), x).iter().map(|h| s * h).collect())
    }
    fn extent(&self) -> Extent {
        self.0.extent()
    }
    fn scale(&self) -> f64 {
        self.0.scale()
    }
    fn is_radial(&self) -> bool {
        self.0.is_radial()
    }
}

/// `λ·f`.
pub struct Scaled(pub f64, pub FieldRef);

impl ScalarField for Scaled {
    fn name(&self) -> String {
        format!("{}*{}", self.0, self.1.name())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0 * self.1.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        self.1.gradient(x).map(|g| g.iter().map(|v| self.0 * v).collect())
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.1.hessian(x).map(|h| h.iter().map(|v| self.0 * v).collect())
    }
    fn extent(&self) -> Extent {
        self.1.extent()
    }
    fn scale(&self) -> f64 {
        self.1.scale()
    }
    fn is_radial(&self) -> bool {
        self.1.is_radial()
    }
}

/// `f ∘ g` for an orthogonal matrix `g` (row-major).
pub struct Rotated {
    pub matrix: Vec<f64>,
    pub inner: FieldRef,
}

impl Rotated {
    fn apply(&self, x: &[f64]) -> Vector {
        let n = x.len();
        (0..n).map(|i| (0..n).map(|j| self.matrix[i * n + j] * x[j]).sum()).collect()
    }
}

impl ScalarField for Rotated {
    fn name(&self) -> String {
        format!("{}∘g", self.inner.name())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&self.apply(x))
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let n = x.len();
        let g = self.inner.gradient(&self.apply(x))?;
        Some((0..n).map(|j| (0..n).map(|i| self.matrix[i * n + j] * g[i]).sum()).collect())
    }
    fn extent(&self) -> Extent {
        match self.inner.extent() {
            Extent::Compact { lo, hi } => {
                let r = Extent::Compact { lo, hi }.support_radius().unwrap_or(0.0);
                let n = self.matrix.len().isqrt();
                Extent::Compact {
                    lo: std::iter::repeat(-r).take(n).collect(),
                    hi: std::iter::repeat(r).take(n).collect(),
                }
            }
            e => e,
        }
    }
    fn scale(&self) -> f64 {
        self.inner.scale()
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vector + Send + Sync;
type HessFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Field built from closures.
pub struct FnField {
    pub name: String,
    pub value: Box<ValueFn>,
    pub gradient: Option<Box<GradFn>>,
    pub hessian: Option<Box<HessFn>>,
    pub extent: Extent,
    pub scale: f64,
}

impl FnField {
    pub fn new(name: &str, extent: Extent, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            value: Box::new(value),
            gradient: None,
            hessian: None,
            extent,
            scale: 1.0,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vector + Send + Sync + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Box::new(h));
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

impl ScalarField for FnField {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        self.gradient.as_ref().map(|g| g(x))
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.hessian.as_ref().map(|h| h(x))
    }
    fn extent(&self) -> Extent {
        self.extent.clone()
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}

// ---------------------------------------------------------------------------
// Built-in fields

/// `Σ a_i exp(−|x − c_i|²/(2 w_i²))`.
#[derive(Clone, Debug)]
pub struct GaussianMixture {
    pub label: String,
    pub terms: Vec<GaussianTerm>,
}

#[derive(Clone, Debug)]
pub struct GaussianTerm {
    pub amplitude: f64,
    pub center: Vector,
    pub width: f64,
}

impl GaussianMixture {
    pub fn standard(n: usize) -> Self {
        Self {
            label: "gaussian".into(),
            terms: vec![GaussianTerm {
                amplitude: 1.0,
                center: std::iter::repeat(0.0).take(n).collect(),
                width: 1.0,
            }],
        }
    }

    /// `count` terms with centres in `[−1.5, 1.5]^N`, widths in `[0.5, 1]`
    /// and amplitudes in `[−1, 1]`, drawn from ChaCha8 seeded by `seed`.
    pub fn random(n: usize, seed: u64, count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..count)
            .map(|_| {
                let center = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let width = rng.gen_range(0.5..1.0);
                let amplitude = rng.gen_range(-1.0..1.0);
                GaussianTerm { amplitude, center, width }
            })
            .collect();
        Self { label: format!("random-mixture:{seed},{count}"), terms }
    }
}

impl ScalarField for GaussianMixture {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let r2: f64 = x.iter().zip(&t.center).map(|(a, c)| (a - c).powi(2)).sum();
                t.amplitude * (-r2 / (2.0 * t.width * t.width)).exp()
            })
            .sum()
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let mut g: Vector = std::iter::repeat(0.0).take(x.len()).collect();
        for t in &self.terms {
            let w2 = t.width * t.width;
            let r2: f64 = x.iter().zip(&t.center).map(|(a, c)| (a - c).powi(2)).sum();
            let e = t.amplitude * (-r2 / (2.0 * w2)).exp();
            for j in 0..x.len() {
                g[j] -= e * (x[j] - t.center[j]) / w2;
            }
        }
        Some(g)
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for t in &self.terms {
            let w2 = t.width * t.width;
            let r2: f64 = x.iter().zip(&t.center).map(|(a, c)| (a - c).powi(2)).sum();
            let e = t.amplitude * (-r2 / (2.0 * w2)).exp();
            for i in 0..n {
                for j in 0..n {
                    let di = (x[i] - t.center[i]) / w2;
                    let dj = (x[j] - t.center[j]) / w2;
                    let delta = if i == j { 1.0 / w2 } else { 0.0 };
                    h[i * n + j] += e * (di * dj - delta);
                }
            }
        }
        Some(h)
    }
    fn extent(&self) -> Extent {
        let shift = self.terms.iter().map(|t| norm(&t.center)).fold(0.0, f64::max);
        let width = self.terms.iter().map(|t| t.width).fold(0.0, f64::max);
        Extent::Gaussian { shift, width }
    }
    fn scale(&self) -> f64 {
        self.terms.iter().map(|t| t.width).fold(f64::INFINITY, f64::min)
    }
    fn is_radial(&self) -> bool {
        self.terms.iter().all(|t| t.center.iter().all(|c| *c == 0.0))
    }
}

/// `x_1 exp(−|x|²/2)`: odd under the first coordinate reflection.
#[derive(Clone, Debug)]
pub struct PolyGaussian;

impl ScalarField for PolyGaussian {
    fn name(&self) -> String {
        "polynomial-times-gaussian".into()
    }
    fn value(&self, x: &[f64]) -> f64 {
        x[0] * (-0.5 * dot(x, x)).exp()
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let e = (-0.5 * dot(x, x)).exp();
        Some(
            (0..x.len())
                .map(|j| {
                    let d0 = if j == 0 { 1.0 } else { 0.0 };
                    e * (d0 - x[0] * x[j])
                })
                .collect(),
        )
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        // ∂_i∂_j (x_0 e) = e(−δ_{0i}x_j − δ_{0j}x_i − δ_{ij}x_0 + x_0 x_i x_j)
        let n = x.len();
        let e = (-0.5 * dot(x, x)).exp();
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Some(
            (0..n * n)
                .map(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    e * (-d(0, i) * x[j] - d(0, j) * x[i] - d(i, j) * x[0] + x[0] * x[i] * x[j])
                })
                .collect(),
        )
    }
    fn extent(&self) -> Extent {
        Extent::Gaussian { shift: 1.0, width: 1.0 }
    }
}

/// Radial profile `φ(r) = (a + b r^{p′})^{1 − d/p}`.
#[derive(Clone, Debug)]
pub struct Talenti {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub d: f64,
}

impl Talenti {
    pub fn new(a: f64, b: f64, p: f64, d: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && p > 1.0 && p < d) {
            return Err(Error::ParameterRange(format!(
                "talenti profile needs a, b > 0 and 1 < p < d (a={a}, b={b}, p={p}, d={d})"
            )));
        }
        Ok(Self { a, b, p, d })
    }

    fn conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    fn expo(&self) -> f64 {
        1.0 - self.d / self.p
    }

    /// `φ(r)`, `φ′(r)`, `φ″(r)`.
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let (q, e) = (self.conj(), self.expo());
        let u = self.a + self.b * r.powf(q);
        let phi = u.powf(e);
        if r == 0.0 {
            let second = if q == 2.0 {
                e * self.a.powf(e - 1.0) * 2.0 * self.b
            } else if q > 2.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            return (phi, 0.0, second);
        }
        let du = self.b * q * r.powf(q - 1.0);
        let ddu = self.b * q * (q - 1.0) * r.powf(q - 2.0);
        let d1 = e * u.powf(e - 1.0) * du;
        let d2 = e * (e - 1.0) * u.powf(e - 2.0) * du * du + e * u.powf(e - 1.0) * ddu;
        (phi, d1, d2)
    }
}

/// Gradient and Hessian of a radial function from its profile derivatives.
fn radial_derivatives(x: &[f64], d1: f64, d2: f64) -> (Vector, Vec<f64>) {
    let n = x.len();
    let r = norm(x);
    if r == 0.0 {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = d2;
        }
        return (std::iter::repeat(0.0).take(n).collect(), h);
    }
    let g = x.iter().map(|v| d1 * v / r).collect();
    let h = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let uu = x[i] * x[j] / (r * r);
            let id = if i == j { 1.0 } else { 0.0 };
            d2 * uu + d1 / r * (id - uu)
        })
        .collect();
    (g, h)
}

impl ScalarField for Talenti {
    fn name(&self) -> String {
        format!("talenti:{},{},{},{}", self.a, self.b, self.p, self.d)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.profile(norm(x)).0
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let (_, d1, d2) = self.profile(norm(x));
        Some(radial_derivatives(x, d1, d2).0)
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (_, d1, d2) = self.profile(norm(x));
        Some(radial_derivatives(x, d1, d2).1)
    }
    fn extent(&self) -> Extent {
        Extent::Algebraic { rate: (self.d / self.p - 1.0) * self.conj() }
    }
    fn scale(&self) -> f64 {
        (self.a / self.b).powf(1.0 / self.conj())
    }
    fn is_radial(&self) -> bool {
        true
    }
}

/// Smooth bump `exp(1 − 1/(1 − |x−c|²/r²))` supported in the ball `B_r(c)`.
#[derive(Clone, Debug)]
pub struct Bump {
    pub center: Vector,
    pub radius: f64,
}

impl Bump {
    fn parts(&self, x: &[f64]) -> Option<(f64, f64, f64, Vector)> {
        let r2 = self.radius * self.radius;
        let dx: Vector = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let s = dot(&dx, &dx) / r2;
        if s >= 1.0 {
            return None;
        }
        let u = 1.0 - s;
        let phi = (1.0 - 1.0 / u).exp();
        let d1 = -phi / (u * u);
        let d2 = phi * (1.0 / u.powi(4) - 2.0 / u.powi(3));
        Some((phi, d1, d2, dx))
    }
}

impl ScalarField for Bump {
    fn name(&self) -> String {
        let c: Vec<String> = self.center.iter().map(|v| format!("{v}")).collect();
        format!("bump:{},{}", c.join(","), self.radius)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.parts(x).map_or(0.0, |p| p.0)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        let r2 = self.radius * self.radius;
        Some(match self.parts(x) {
            None => std::iter::repeat(0.0).take(x.len()).collect(),
            Some((_, d1, _, dx)) => dx.iter().map(|v| d1 * 2.0 * v / r2).collect(),
        })
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let r2 = self.radius * self.radius;
        Some(match self.parts(x) {
            None => vec![0.0; n * n],
            Some((_, d1, d2, dx)) => (0..n * n)
                .map(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    let id = if i == j { 1.0 } else { 0.0 };
                    d2 * 4.0 * dx[i] * dx[j] / (r2 * r2) + d1 * 2.0 * id / r2
                })
                .collect(),
        })
    }
    fn extent(&self) -> Extent {
        Extent::Compact {
            lo: self.center.iter().map(|c| c - self.radius).collect(),
            hi: self.center.iter().map(|c| c + self.radius).collect(),
        }
    }
    fn scale(&self) -> f64 {
        self.radius
    }
    fn is_radial(&self) -> bool {
        self.center.iter().all(|c| *c == 0.0)
    }
}

/// One-dimensional smoothed indicator of `(lo, hi)`:
/// `σ((x − lo)/ε) σ((hi − x)/ε)` with the logistic `σ`, cut to zero once
/// more than `40ε` outside the interval.
#[derive(Clone, Debug)]
pub struct SmoothIndicator {
    pub lo: f64,
    pub hi: f64,
    pub eps: f64,
}

fn logistic(t: f64) -> (f64, f64, f64) {
    let s = 1.0 / (1.0 + (-t).exp());
    let d1 = s * (1.0 - s);
    let d2 = d1 * (1.0 - 2.0 * s);
    (s, d1, d2)
}

impl SmoothIndicator {
    fn parts(&self, x: f64) -> (f64, f64, f64) {
        if x < self.lo - 40.0 * self.eps || x > self.hi + 40.0 * self.eps {
            return (0.0, 0.0, 0.0);
        }
        let (a, da, dda) = logistic((x - self.lo) / self.eps);
        let (b, db, ddb) = logistic((self.hi - x) / self.eps);
        let e = self.eps;
        let v = a * b;
        let d1 = (da * b - a * db) / e;
        let d2 = (dda * b - 2.0 * da * db + a * ddb) / (e * e);
        (v, d1, d2)
    }
}

impl ScalarField for SmoothIndicator {
    fn name(&self) -> String {
        format!("indicator:{},{},{}", self.lo, self.hi, self.eps)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.parts(x[0]).0
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        Some(smallvec::smallvec![self.parts(x[0]).1])
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![self.parts(x[0]).2])
    }
    fn extent(&self) -> Extent {
        Extent::Compact {
            lo: smallvec::smallvec![self.lo - 40.0 * self.eps],
            hi: smallvec::smallvec![self.hi + 40.0 * self.eps],
        }
    }
    fn scale(&self) -> f64 {
        self.eps
    }
}

#[derive(Clone, Debug)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn name(&self) -> String {
        format!("constant:{}", self.0)
    }
    fn value(&self, _x: &[f64]) -> f64 {
        self.0
    }
    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        Some(std::iter::repeat(0.0).take(x.len()).collect())
    }
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len() * x.len()])
    }
    fn extent(&self) -> Extent {
        Extent::Unbounded
    }
    fn is_radial(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Catalog

/// Builds a field from numeric arguments for a given root system.
pub trait FieldFactory: Send + Sync {
    fn name(&self) -> &'static str;
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }
    fn usage(&self) -> &'static str;
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef>;
}

fn arity(name: &str, args: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "field `{name}` takes {allowed:?} arguments, got {}",
            args.len()
        )))
    }
}

struct GaussianFactory;
impl FieldFactory for GaussianFactory {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn usage(&self) -> &'static str {
        "gaussian[:width]: exp(−|x|²/(2·width²)), width defaults to 1"
    }
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[0, 1])?;
        let mut g = GaussianMixture::standard(rs.dimension());
        if let Some(&w) = args.first() {
            if !(w > 0.0) {
                return Err(Error::ParameterRange(format!("gaussian width {w}")));
            }
            g.terms[0].width = w;
            g.label = format!("gaussian:{w}");
        }
        Ok(Arc::new(g))
    }
}

struct PolyGaussianFactory;
impl FieldFactory for PolyGaussianFactory {
    fn name(&self) -> &'static str {
        "polynomial-times-gaussian"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["odd-gaussian"]
    }
    fn usage(&self) -> &'static str {
        "polynomial-times-gaussian: x₁·exp(−|x|²/2)"
    }
    fn build(&self, _rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[0])?;
        Ok(Arc::new(PolyGaussian))
    }
}

struct TalentiFactory;
impl FieldFactory for TalentiFactory {
    fn name(&self) -> &'static str {
        "talenti"
    }
    fn usage(&self) -> &'static str {
        "talenti:a,b,p[,d]: (a + b|x|^{p′})^{1−d/p}, d defaults to N+2γ"
    }
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[0, 3, 4])?;
        let (a, b, p) = if args.is_empty() { (1.0, 1.0, 2.0) } else { (args[0], args[1], args[2]) };
        let d = args.get(3).copied().unwrap_or_else(|| rs.effective_dimension());
        Ok(Arc::new(Talenti::new(a, b, p, d)?))
    }
}

struct BumpFactory;
impl FieldFactory for BumpFactory {
    fn name(&self) -> &'static str {
        "bump"
    }
    fn usage(&self) -> &'static str {
        "bump:c₁,…,c_N,r: smooth bump supported in the ball B_r(c)"
    }
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        let n = rs.dimension();
        arity(self.name(), args, &[n + 1])?;
        let radius = args[n];
        if !(radius > 0.0) {
            return Err(Error::ParameterRange(format!("bump radius {radius}")));
        }
        Ok(Arc::new(Bump { center: args[..n].into(), radius }))
    }
}

struct MixtureFactory;
impl FieldFactory for MixtureFactory {
    fn name(&self) -> &'static str {
        "random-mixture"
    }
    fn usage(&self) -> &'static str {
        "random-mixture:seed[,count]: seeded sum of Gaussians, count defaults to 3"
    }
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[1, 2])?;
        let count = args.get(1).copied().unwrap_or(3.0);
        if args[0] < 0.0 || args[0].fract() != 0.0 || count < 1.0 || count.fract() != 0.0 {
            return Err(Error::ParameterRange("seed and count must be nonnegative integers".into()));
        }
        Ok(Arc::new(GaussianMixture::random(rs.dimension(), args[0] as u64, count as usize)))
    }
}

struct IndicatorFactory;
impl FieldFactory for IndicatorFactory {
    fn name(&self) -> &'static str {
        "indicator"
    }
    fn usage(&self) -> &'static str {
        "indicator:lo,hi[,eps]: logistic-smoothed indicator of (lo, hi), N = 1 only"
    }
    fn build(&self, rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[2, 3])?;
        if rs.dimension() != 1 {
            return Err(Error::Validation("indicator fields are one-dimensional".into()));
        }
        let eps = args.get(2).copied().unwrap_or(0.01);
        if !(args[0] < args[1] && eps > 0.0) {
            return Err(Error::ParameterRange("indicator needs lo < hi and eps > 0".into()));
        }
        Ok(Arc::new(SmoothIndicator { lo: args[0], hi: args[1], eps }))
    }
}

struct ConstantFactory;
impl FieldFactory for ConstantFactory {
    fn name(&self) -> &'static str {
        "constant"
    }
    fn usage(&self) -> &'static str {
        "constant[:c]: the constant c (default 1); bounded domains only"
    }
    fn build(&self, _rs: &RootSystem, args: &[f64]) -> Result<FieldRef> {
        arity(self.name(), args, &[0, 1])?;
        Ok(Arc::new(Constant(args.first().copied().unwrap_or(1.0))))
    }
}

/// Name-addressable registry of field factories.
pub struct FieldCatalog {
    factories: BTreeMap<&'static str, Arc<dyn FieldFactory>>,
    aliases: BTreeMap<&'static str, &'static str>,
}

impl Default for FieldCatalog {
    fn default() -> Self {
        let mut c = Self { factories: BTreeMap::new(), aliases: BTreeMap::new() };
        c.register(Arc::new(GaussianFactory));
        c.register(Arc::new(PolyGaussianFactory));
        c.register(Arc::new(TalentiFactory));
        c.register(Arc::new(BumpFactory));
        c.register(Arc::new(MixtureFactory));
        c.register(Arc::new(IndicatorFactory));
        c.register(Arc::new(ConstantFactory));
        c
    }
}

impl FieldCatalog {
    pub fn register(&mut self, factory: Arc<dyn FieldFactory>) {
        for alias in factory.aliases() {
            self.aliases.insert(alias, factory.name());
        }
        self.factories.insert(factory.name(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn usage(&self) -> Vec<&'static str> {
        self.factories.values().map(|f| f.usage()).collect()
    }

    /// Parses `name`, `name:a,b,c` or `name(a,b,c)`.
    pub fn parse(&self, spec: &str, rs: &RootSystem) -> Result<FieldRef> {
        let spec = spec.trim();
        let (name, args) = match spec.find([':', '(']) {
            Some(i) => (&spec[..i], spec[i + 1..].trim_end_matches(')')),
            None => (spec, ""),
        };
        let name = self.aliases.get(name).copied().unwrap_or(name);
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownField(name.to_string()))?;
        let args = args
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| Error::Validation(format!("bad number `{s}` in `{spec}`"))))
            .collect::<Result<Vec<_>>>()?;
        factory.build(rs, &args)
    }
}

/// Direction `ρ/|ρ|` with `ρ = ½ Σ_{α>0} α`, interior to the fundamental chamber.
pub fn chamber_axis(rs: &RootSystem) -> Vector {
    let mut rho: Vector = std::iter::repeat(0.0).take(rs.dimension()).collect();
    for a in rs.roots() {
        for (r, v) in rho.iter_mut().zip(a.iter()) {
            *r += v;
        }
    }
    let n = norm(&rho);
    rho.iter().map(|v| v / n).collect()
}

/// Distance from `x` to the nearest reflection hyperplane.
pub fn wall_distance(rs: &RootSystem, x: &[f64]) -> f64 {
    rs.roots()
        .iter()
        .map(|a| dot(a, x).abs() / norm(a))
        .fold(f64::INFINITY, f64::min)
}

/// Two bumps supported inside the fundamental chamber.
pub fn chamber_bumps(rs: &RootSystem) -> Vec<FieldRef> {
    let axis = chamber_axis(rs);
    [(1.5f64, 0.4f64), (0.8, 0.3)]
        .iter()
        .map(|&(t, rmax)| {
            let center: Vector = axis.iter().map(|v| v * t).collect();
            let radius = rmax.min(0.9 * wall_distance(rs, &center));
            Arc::new(Bump { center, radius }) as FieldRef
        })
        .collect()
}

/// The standard test family: Gaussian, odd Gaussian, Talenti extremal (when
/// `N+2γ > 2`), two chamber bumps and `mixtures` seeded Gaussian mixtures.
pub fn default_family(rs: &RootSystem, seed: u64, mixtures: usize) -> Vec<FieldRef> {
    let n = rs.dimension();
    let d = rs.effective_dimension();
    let mut out: Vec<FieldRef> = vec![Arc::new(GaussianMixture::standard(n)), Arc::new(PolyGaussian)];
    if d > 2.0 {
        out.push(Arc::new(Talenti::new(1.0, 1.0, 2.0, d).expect("valid profile")));
    }
    out.extend(chamber_bumps(rs));
    for i in 0..mixtures {
        out.push(Arc::new(GaussianMixture::random(n, seed.wrapping_add(i as u64), 3)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Multiplicities;
    use proptest::prelude::*;

    fn a1(k: f64) -> RootSystem {
        RootSystem::a1_product(1, Multiplicities::Uniform(k)).unwrap()
    }

    fn fd_only(f: FieldRef) -> FnField {
        let g = f.clone();
        FnField::new("fd", f.extent(), move |x| g.value(x))
    }

    #[test]
    fn gradients_by_differences() {
        let sq = FnField::new("x^2", Extent::Unbounded, |x| x[0] * x[0]);
        assert!((eval_gradient(&sq, &[1.0])[0] - 2.0).abs() < 1e-8);
        let g = fd_only(Arc::new(GaussianMixture::standard(2)));
        assert!(norm(&eval_gradient(&g, &[0.0, 0.0])) < 1e-10);
        let s = FnField::new("sin", Extent::Unbounded, |x| x[0].sin());
        let gs = eval_gradient(&s, &[0.0, 0.0]);
        assert!((gs[0] - 1.0).abs() < 1e-9 && gs[1].abs() < 1e-12);
    }

    #[test]
    fn linear_field_on_a1() {
        let rs = a1(1.0);
        let f = FnField::new("x", Extent::Unbounded, |x| x[0])
            .with_gradient(|_| smallvec::smallvec![1.0])
            .with_hessian(|_| vec![0.0]);
        assert!((dunkl_gradient(&rs, &f, &[2.0])[0] - 3.0).abs() < 1e-14);
        assert!(dunkl_laplacian(&rs, &f, &[2.0]).abs() < 1e-14);
    }

    #[test]
    fn odd_gaussian_closed_forms() {
        let rs = a1(1.0);
        let f = PolyGaussian;
        for x in [-2.0, -0.3, 0.0, 1e-9, 0.004, 1.0, 2.5] {
            let e = (-x * x / 2.0f64).exp();
            let t = dunkl_gradient(&rs, &f, &[x])[0];
            assert!((t - (3.0 - x * x) * e).abs() < 1e-13, "x={x}");
            let g = carre_du_champ(&rs, &f, &[x]);
            assert!((g - ((1.0 - x * x).powi(2) + 2.0) * e * e).abs() < 1e-13);
        }
        assert!((carre_du_champ(&rs, &f, &[1.0]) - 0.735_758_882_342_884_6).abs() < 1e-14);
    }

    #[test]
    fn gaussian_laplacian_closed_form() {
        let rs = a1(1.0);
        let f = GaussianMixture::standard(1);
        for x in [-1.7, 0.0, 1e-10, 3e-3, 0.5, 2.0] {
            let e = (-x * x / 2.0f64).exp();
            let l = dunkl_laplacian(&rs, &f, &[x]);
            assert!((l - (x * x - 3.0) * e).abs() < 1e-12, "x={x}: {l}");
        }
        let flat = RootSystem::a1_product(2, Multiplicities::Uniform(0.0)).unwrap();
        let r2 = FnField::new("r2", Extent::Unbounded, |x| dot(x, x));
        assert!((dunkl_laplacian(&flat, &r2, &[0.3, -0.2]) - 4.0).abs() < 1e-5);
    }

    #[test]
    fn constant_field_has_zero_gamma() {
        let rs = RootSystem::a2(1.0).unwrap();
        let c = Constant(3.0);
        assert_eq!(carre_du_champ(&rs, &c, &[0.2, 0.7]), 0.0);
        assert_eq!(carre_du_champ_via_definition(&rs, &c, &[0.2, 0.7]), 0.0);
    }

    #[test]
    fn radial_fields_have_no_difference_part() {
        let rs = RootSystem::b2(1.0, 0.5).unwrap();
        let f = Talenti::new(1.0, 1.0, 2.0, 5.0).unwrap();
        let x = [0.4, -1.3];
        assert!(norm(&difference_parts(&rs, &f, &x)) < 1e-14);
        let g = eval_gradient(&f, &x);
        assert!((carre_du_champ(&rs, &f, &x) - dot(&g, &g)).abs() < 1e-15);
    }

    #[test]
    fn catalog_parses_all_builtins() {
        let rs = a1(1.0);
        let cat = FieldCatalog::default();
        for spec in [
            "gaussian",
            "odd-gaussian",
            "talenti:1,1,2",
            "bump:1.5,0.4",
            "random-mixture:42,3",
            "indicator:1,2,0.01",
            "constant:2",
            "bump(1.5, 0.4)",
        ] {
            cat.parse(spec, &rs).unwrap();
        }
        assert!(matches!(cat.parse("nope", &rs), Err(Error::UnknownField(_))));
        assert!(cat.parse("bump:1,2,3", &rs).is_err());
    }

    #[test]
    fn default_family_layout() {
        let rs = a1(1.0);
        let fam = default_family(&rs, 42, 3);
        assert_eq!(fam.len(), 8);
        let flat = RootSystem::a1_product(2, Multiplicities::Uniform(0.0)).unwrap();
        assert_eq!(default_family(&flat, 42, 3).len(), 7);
        for b in chamber_bumps(&RootSystem::a2(1.0).unwrap()) {
            if let Extent::Compact { lo, hi } = b.extent() {
                let c: Vector = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let r = 0.5 * (hi[0] - lo[0]);
                assert!(wall_distance(&RootSystem::a2(1.0).unwrap(), &c) > r);
            }
        }
    }

    fn arb_system() -> impl Strategy<Value = RootSystem> {
        (0usize..4, 0.0f64..2.0, 0.0f64..2.0).prop_map(|(w, k1, k2)| match w {
            0 => RootSystem::a1_product(1, Multiplicities::Uniform(k1)).unwrap(),
            1 => RootSystem::a1_product(2, Multiplicities::PerOrbit(vec![k1, k2])).unwrap(),
            2 => RootSystem::a2(k1).unwrap(),
            _ => RootSystem::b2(k1, k2).unwrap(),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gamma_identity_and_bounds(
            rs in arb_system(),
            seed in 0u64..1000,
            x in proptest::collection::vec(-2.0f64..2.0, 2),
        ) {
            let x = &x[..rs.dimension()];
            let f: FieldRef = Arc::new(GaussianMixture::random(rs.dimension(), seed, 3));
            let g = carre_du_champ(&rs, f.as_ref(), x);
            let (h, scale) = carre_du_champ_via_definition_with_scale(&rs, f.as_ref(), x);
            prop_assert!((g - h).abs() <= 1e-8 * g.abs().max(1e-4 * scale));
            let grad = eval_gradient(f.as_ref(), x);
            prop_assert!(g >= dot(&grad, &grad) - 1e-15);
            let abs = Abs(f.clone());
            let mut generic = f.value(x) != 0.0;
            for i in 0..rs.roots().len() {
                generic &= f.value(&rs.reflect_root(i, x)) != 0.0;
            }
            if generic {
                prop_assert!(carre_du_champ(&rs, &abs, x) <= g * (1.0 + 1e-12) + 1e-300);
            }
        }

        #[test]
        fn classical_limit(seed in 0u64..1000, x in proptest::collection::vec(-2.0f64..2.0, 2)) {
            let rs = RootSystem::b2(0.0, 0.0).unwrap();
            let f = GaussianMixture::random(2, seed, 2);
            let g = eval_gradient(&f, &x);
            prop_assert!(norm(&difference_parts(&rs, &f, &x)) == 0.0);
            let h = f.hessian(&x).unwrap();
            prop_assert!((dunkl_laplacian(&rs, &f, &x) - (h[0] + h[3])).abs() < 1e-14);
            let fd = fd_only(Arc::new(f.clone()));
            let gd = eval_gradient(&fd, &x);
            prop_assert!((gd[0] - g[0]).abs() < 1e-6 && (gd[1] - g[1]).abs() < 1e-6);
        }

        #[test]
        fn analytic_gradients_match_differences(
            x in proptest::collection::vec(-1.8f64..1.8, 2),
            which in 0usize..4,
        ) {
            let f: FieldRef = match which {
                0 => Arc::new(PolyGaussian),
                1 => Arc::new(Talenti::new(1.0, 1.0, 2.0, 4.0).unwrap()),
                2 => Arc::new(Bump { center: smallvec::smallvec![0.2, 0.1], radius: 1.5 }),
                _ => Arc::new(GaussianMixture::random(2, 9, 3)),
            };
            let fd = fd_only(f.clone());
            let (a, b) = (eval_gradient(f.as_ref(), &x), eval_gradient(&fd, &x));
            prop_assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
            let (ha, hb) = (f.hessian(&x).unwrap(), eval_hessian(&fd, &x));
            for (p, q) in ha.iter().zip(&hb) {
                prop_assert!((p - q).abs() < 1e-3);
            }
        }
    }
}
