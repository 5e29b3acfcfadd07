//! Dunkl kernel, heat kernel, heat semigroup, Dunkl transform and the
//! heat-semigroup Besov norm for product systems `Z_2^N`, where every kernel
//! factorises into rank-one kernels `E_k(x_j y_j)`.
//!
//! The rank-one kernel is `E_k(z) = Σ c_m z^m` with `c_0 = 1`,
//! `c_m = c_{m−1}/d_m`, `d_m = m + 2k` for odd `m` and `m` for even `m`.
//! For evaluation the equivalent Kummer form
//! `E_k(z) = e^{−z} ₁F₁(k+1; 2k+1; 2z) = e^{z} ₁F₁(k; 2k+1; −2z)` is used with
//! the positive-term branch, so that the scaled kernel `S(z) = e^{−|z|}E_k(z)`
//! is computed without cancellation; for `2|z| > 50` the large-argument
//! expansion of `₁F₁` takes over. Imaginary arguments use the integral
//! representation `E_k(iz) = ∫ e^{izt} dν_k(t)` against the Jacobi-type
//! probability measure `dν_k ∝ (1−t)^{k−1}(1+t)^k dt` on `[−1, 1]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::constants::macdonald_mehta;
use crate::fields::{Extent, FieldRef, ScalarField};
use crate::quadrature::{
    gaussian_cutoff, integrate, log_grid, refine_max, Domain, IntegralResult, QuadConfig, Support,
};
use crate::rootsys::RootSystem;
use crate::special::{gauss_jacobi_normalized, ln_gamma, GaussRule};
use crate::{Error, Estimate, Result, Vector};

/// Largest `|x·y|` accepted by [`rank1_kernel_eval`].
pub const SERIES_CAP: f64 = 50.0;
/// Largest `|z|` accepted for imaginary arguments.
pub const IMAGINARY_CAP: f64 = 400.0;
const MAX_TERMS: usize = 500;
const JACOBI_SIZES: [usize; 6] = [32, 64, 96, 128, 192, 256];

#[derive(Debug)]
pub struct Rank1Kernel {
    k: f64,
    coefficients: Vec<f64>,
    jacobi: [OnceLock<GaussRule>; JACOBI_SIZES.len()],
}

impl Rank1Kernel {
    pub fn new(k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::NegativeMultiplicity(k));
        }
        let mut coefficients = Vec::with_capacity(MAX_TERMS);
        coefficients.push(1.0);
        for m in 1..MAX_TERMS {
            let d = if m % 2 == 1 { m as f64 + 2.0 * k } else { m as f64 };
            let c = coefficients[m - 1] / d;
            coefficients.push(c);
        }
        Ok(Self { k, coefficients, jacobi: Default::default() })
    }

    /// Process-wide instance for multiplicity `k`.
    pub fn shared(k: f64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Rank1Kernel>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(kern) = cache.lock().unwrap().get(&k.to_bits()) {
            return Ok(kern.clone());
        }
        let kern = Arc::new(Self::new(k)?);
        Ok(cache.lock().unwrap().entry(k.to_bits()).or_insert(kern).clone())
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn coefficient(&self, m: usize) -> f64 {
        self.coefficients[m]
    }

    /// Truncated power series `Σ c_m z^m`, stopped once a term falls below
    /// `1e-15` of the partial sum.
    pub fn series(&self, z: f64) -> f64 {
        let mut sum = 0.0;
        let mut zm = 1.0;
        for (m, c) in self.coefficients.iter().enumerate() {
            let term = c * zm;
            sum += term;
            if m as f64 > z.abs() && term.abs() < 1e-15 * sum.abs() {
                break;
            }
            zm *= z;
        }
        sum
    }

    /// Power series at a complex argument.
    pub fn series_complex(&self, z: Complex64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zm = Complex64::new(1.0, 0.0);
        for (m, c) in self.coefficients.iter().enumerate() {
            let term = zm * *c;
            sum += term;
            if m as f64 > z.norm() && term.norm() < 1e-16 * sum.norm().max(1e-300) {
                break;
            }
            zm *= z;
        }
        sum
    }

    /// `S(z) = e^{−|z|} E_k(z)`, which lies in `(0, 1]`.
    pub fn scaled(&self, z: f64) -> f64 {
        let k = self.k;
        if k == 0.0 {
            return if z >= 0.0 { 1.0 } else { (2.0 * z).exp() };
        }
        let x = 2.0 * z.abs();
        let a = if z > 0.0 { k + 1.0 } else { k };
        let b = 2.0 * k + 1.0;
        if x <= 50.0 {
            // e^{−x} ₁F₁(a; b; x), positive terms.
            let mut term = 1.0;
            let mut sum = 1.0;
            let mut n = 0.0;
            loop {
                term *= (a + n) / (b + n) * x / (n + 1.0);
                sum += term;
                n += 1.0;
                if n > x && term < 1e-17 * sum {
                    break;
                }
            }
            (-x).exp() * sum
        } else {
            // Γ(b)/Γ(a) x^{a−b} Σ (b−a)_n (1−a)_n / n! x^{−n}
            let lead = (ln_gamma(b) - ln_gamma(a) + (a - b) * x.ln()).exp();
            let mut term = 1.0;
            let mut sum: f64 = 1.0;
            let mut n = 0.0;
            while n < 200.0 {
                let next = term * (b - a + n) * (1.0 - a + n) / ((n + 1.0) * x);
                if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
                    sum += next;
                    break;
                }
                term = next;
                sum += term;
                n += 1.0;
            }
            lead * sum
        }
    }

    /// `E_k(z)` for real `z`.
    pub fn eval(&self, z: f64) -> f64 {
        z.abs().exp() * self.scaled(z)
    }

    /// `E_k′(z)/E_k(z) = 1 − k(E_k(z) − E_k(−z))/(z E_k(z))`.
    pub fn log_derivative(&self, z: f64) -> f64 {
        if self.k == 0.0 {
            return 1.0;
        }
        if z.abs() < 0.5 {
            let mut odd = 0.0;
            let mut zm = 1.0;
            for m in (1..60).step_by(2) {
                odd += self.coefficients[m] * zm;
                zm *= z * z;
            }
            1.0 - 2.0 * self.k * odd / self.series(z)
        } else {
            1.0 - self.k * (1.0 - self.scaled(-z) / self.scaled(z)) / z
        }
    }

    fn jacobi_rule(&self, z: f64) -> &GaussRule {
        let need = ((z.abs() + 40.0) / 2.0).ceil() as usize;
        let slot = JACOBI_SIZES.iter().position(|&n| n >= need).unwrap_or(JACOBI_SIZES.len() - 1);
        self.jacobi[slot].get_or_init(|| gauss_jacobi_normalized(JACOBI_SIZES[slot], self.k - 1.0, self.k))
    }

    /// `E_k(iz)` for real `z`.
    pub fn eval_imag(&self, z: f64) -> Result<Complex64> {
        if z.abs() > IMAGINARY_CAP {
            return Err(Error::ArgumentTooLarge(z.abs()));
        }
        if self.k == 0.0 {
            return Ok(Complex64::new(z.cos(), z.sin()));
        }
        if z.abs() <= 4.0 {
            return Ok(self.series_complex(Complex64::new(0.0, z)));
        }
        let rule = self.jacobi_rule(z);
        let (mut re, mut im) = (0.0, 0.0);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let (s, c) = (z * t).sin_cos();
            re += w * c;
            im += w * s;
        }
        Ok(Complex64::new(re, im))
    }
}

/// `E_k(x, y)` in rank one, for `|x·y| ≤ 50`.
pub fn rank1_kernel_eval(k: f64, x: f64, y: f64) -> Result<f64> {
    let z = x * y;
    if z.abs() > SERIES_CAP {
        return Err(Error::ArgumentTooLarge(z.abs()));
    }
    Ok(Rank1Kernel::shared(k)?.eval(z))
}

fn product_factors(rs: &RootSystem) -> Result<Vec<Arc<Rank1Kernel>>> {
    let ks = rs.product_multiplicities().ok_or_else(|| {
        Error::UnsupportedRootSystem(format!("{} has no product kernel", rs.label()))
    })?;
    ks.into_iter().map(Rank1Kernel::shared).collect()
}

/// `E_k(x, y) = Π_j E_{k_j}(x_j y_j)`.
pub fn product_kernel_eval(rs: &RootSystem, x: &[f64], y: &[f64]) -> Result<f64> {
    let factors = product_factors(rs)?;
    Ok(factors.iter().zip(x.iter().zip(y)).map(|(e, (a, b))| e.eval(a * b)).product())
}

/// `E_k(−iξ, x) = Π_j E_{k_j}(−iξ_j x_j)`.
pub fn product_kernel_eval_imag(rs: &RootSystem, xi: &[f64], x: &[f64]) -> Result<Complex64> {
    let factors = product_factors(rs)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for (e, (a, b)) in factors.iter().zip(xi.iter().zip(x)) {
        acc *= e.eval_imag(-a * b)?;
    }
    Ok(acc)
}

/// Dunkl heat kernel of a product system.
#[derive(Clone, Debug)]
pub struct HeatKernel {
    rs: RootSystem,
    factors: Vec<Arc<Rank1Kernel>>,
    mk: f64,
    d: f64,
}

impl HeatKernel {
    pub fn new(rs: &RootSystem) -> Result<Self> {
        let factors = product_factors(rs)?;
        Ok(Self { rs: rs.clone(), factors, mk: macdonald_mehta(rs), d: rs.effective_dimension() })
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    /// `h_t(x, y) = M_k^{−1}(2t)^{−d/2} e^{−(|x|²+|y|²)/4t} E_k(x/√(2t), y/√(2t))`,
    /// evaluated as `M_k^{−1}(2t)^{−d/2} e^{−Σ(|x_j|−|y_j|)²/4t} Π S(x_j y_j/2t)`.
    pub fn eval(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(self.eval_unchecked(t, x, y))
    }

    fn eval_unchecked(&self, t: f64, x: &[f64], y: &[f64]) -> f64 {
        let mut expo = 0.0;
        let mut prod = 1.0;
        for (e, (a, b)) in self.factors.iter().zip(x.iter().zip(y)) {
            let gap = a.abs() - b.abs();
            expo += gap * gap;
            prod *= e.scaled(a * b / (2.0 * t));
        }
        (2.0 * t).powf(-0.5 * self.d) / self.mk * (-expo / (4.0 * t)).exp() * prod
    }

    /// `∇_x h_t(x, y)`.
    fn gradient_x(&self, t: f64, x: &[f64], y: &[f64]) -> Vector {
        let h = self.eval_unchecked(t, x, y);
        self.factors
            .iter()
            .zip(x.iter().zip(y))
            .map(|(e, (a, b))| h * (-a / (2.0 * t) + b / (2.0 * t) * e.log_derivative(a * b / (2.0 * t))))
            .collect()
    }

    /// `(2t)^{−γ−N/2} M_k^{−1} max_g e^{−|gx−y|²/4t}`.
    pub fn upper_bound(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let best = self
            .rs
            .group()
            .elements()
            .iter()
            .enumerate()
            .map(|(g, _)| {
                let gx = self.rs.group().apply(g, x);
                let d2: f64 = gx.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (4.0 * t)).exp()
            })
            .fold(0.0, f64::max);
        Ok((2.0 * t).powf(-0.5 * self.d) / self.mk * best)
    }

    /// Boxes outside which `h_t(x, ·)` is below `e^{−L}` of its peak, clipped
    /// to the support of the integrand.
    fn windows(&self, t: f64, x: &[f64], support: &Extent, tol: f64) -> Vec<Domain> {
        let n = x.len();
        let w = 2.0 * (t * (1.0 / tol).ln().max(10.0)).sqrt();
        let clip: Vec<(f64, f64)> = match support {
            Extent::Compact { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (*a, *b)).collect(),
            Extent::Gaussian { shift, width } => {
                let r = gaussian_cutoff(*shift, *width, self.d, tol);
                vec![(-r, r); n]
            }
            _ => vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        };
        let per_axis: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|j| {
                let c = x[j].abs();
                let raw = if c > w { vec![(-c - w, -c + w), (c - w, c + w)] } else { vec![(-c - w, c + w)] };
                raw.into_iter()
                    .map(|(a, b)| (a.max(clip[j].0), b.min(clip[j].1)))
                    .filter(|(a, b)| a < b)
                    .collect()
            })
            .collect();
        let mut boxes: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new())];
        for axis in per_axis {
            boxes = boxes
                .into_iter()
                .flat_map(|(lo, hi)| {
                    axis.iter().map(move |(a, b)| {
                        let mut l = lo.clone();
                        let mut h = hi.clone();
                        l.push(*a);
                        h.push(*b);
                        (l, h)
                    })
                })
                .collect();
        }
        boxes.into_iter().map(|(lo, hi)| Domain::Box { lo, hi }).collect()
    }

    fn integrate_against(
        &self,
        t: f64,
        x: &[f64],
        field: &dyn ScalarField,
        g: &(dyn Fn(&[f64]) -> f64 + Sync),
        cfg: &QuadConfig,
    ) -> Result<Estimate> {
        let support = Support { extent: field.extent(), scale: field.scale().min(t.sqrt()).max(1e-3) };
        let mut total = Estimate::exact(0.0);
        for dom in self.windows(t, x, &support.extent, cfg.rel_tol * 1e-3) {
            let r: IntegralResult = integrate(&self.rs, g, &support, &dom, cfg)?;
            total = Estimate::new(total.value + r.value, total.err + r.error_estimate);
        }
        Ok(total)
    }

    /// `P_t f(x) = ∫ h_t(x, y) f(y) dμ_k(y)`; `P_0 f = f`.
    pub fn apply(&self, field: &dyn ScalarField, t: f64, x: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(Estimate::exact(field.value(x)));
        }
        let g = |y: &[f64]| {
            let v = field.value(y);
            if v == 0.0 {
                0.0
            } else {
                v * self.eval_unchecked(t, x, y)
            }
        };
        self.integrate_against(t, x, field, &g, cfg)
    }

    /// `∂_i P_t f(x)` by differentiating the kernel under the integral.
    pub fn apply_gradient(&self, field: &dyn ScalarField, t: f64, x: &[f64], cfg: &QuadConfig) -> Result<Vector> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        (0..x.len())
            .map(|i| {
                let g = |y: &[f64]| {
                    let v = field.value(y);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * self.gradient_x(t, x, y)[i]
                    }
                };
                self.integrate_against(t, x, field, &g, cfg).map(|e| e.value)
            })
            .collect()
    }
}

/// `h_t(x, y)` for a product system.
pub fn heat_kernel(rs: &RootSystem, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    HeatKernel::new(rs)?.eval(t, x, y)
}

/// `P_t f(x)`.
pub fn heat_apply(rs: &RootSystem, field: &dyn ScalarField, t: f64, x: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    HeatKernel::new(rs)?.apply(field, t, x, cfg)
}

/// `P_t f` as a field: values and gradients by quadrature against the kernel.
pub struct SemigroupField {
    heat: HeatKernel,
    field: FieldRef,
    t: f64,
    cfg: QuadConfig,
}

impl SemigroupField {
    pub fn new(heat: HeatKernel, field: FieldRef, t: f64, cfg: QuadConfig) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(Self { heat, field, t, cfg })
    }
}

impl ScalarField for SemigroupField {
    fn name(&self) -> String {
        format!("P_{}({})", self.t, self.field.name())
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.heat.apply(&*self.field, self.t, x, &self.cfg).map_or(f64::NAN, |e| e.value)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vector> {
        self.heat.apply_gradient(&*self.field, self.t, x, &self.cfg).ok()
    }

    fn extent(&self) -> Extent {
        let spread = (2.0 * self.t).sqrt();
        match self.field.extent() {
            Extent::Compact { lo, hi } => {
                let r = lo.iter().chain(hi.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
                Extent::Gaussian { shift: r, width: spread }
            }
            Extent::Gaussian { shift, width } => Extent::Gaussian { shift, width: (width * width + spread * spread).sqrt() },
            other => other,
        }
    }

    fn scale(&self) -> f64 {
        (self.field.scale().powi(2) + 2.0 * self.t).sqrt()
    }
}

/// Sampled `sup_x |P_t f(x)|`: a grid over the effective support of `f`,
/// polished by local search from the two best samples.
pub fn semigroup_sup(heat: &HeatKernel, field: &dyn ScalarField, t: f64, cfg: &QuadConfig) -> Result<f64> {
    let n = heat.rs.dimension();
    let reach = match field.extent() {
        Extent::Compact { lo, hi } => lo.iter().chain(hi.iter()).fold(0.0f64, |m, v| m.max(v.abs())),
        Extent::Gaussian { shift, width } => shift + 3.0 * width,
        _ => 4.0 * field.scale(),
    };
    let per_axis = match n {
        1 => 41,
        2 => 13,
        _ => 5,
    };
    let coords: Vec<f64> = (0..per_axis).map(|i| -reach + 2.0 * reach * i as f64 / (per_axis - 1) as f64).collect();
    let mut points: Vec<Vector> = vec![Vector::new()];
    for _ in 0..n {
        points = points.into_iter().flat_map(|p| coords.iter().map(move |c| { let mut q = p.clone(); q.push(*c); q })).collect();
    }
    let mut samples: Vec<(f64, Vector)> = points
        .into_iter()
        .map(|x| heat.apply(field, t, &x, cfg).map(|e| (e.value.abs(), x)))
        .collect::<Result<_>>()?;
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let g = |x: &[f64]| heat.apply(field, t, x, cfg).map_or(f64::NEG_INFINITY, |e| e.value.abs());
    let step = 2.0 * reach / (per_axis - 1) as f64;
    let mut best = samples[0].0;
    for (_, x) in samples.iter().take(2) {
        best = best.max(refine_max(&g, x, step, &|_| true).1);
    }
    Ok(best)
}

/// `D_k f(ξ) = M_k^{−1} ∫ f(x) E_k(−iξ, x) dμ_k(x)`.
pub fn dunkl_transform(rs: &RootSystem, field: &dyn ScalarField, xi: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    let factors = product_factors(rs)?;
    let mk = macdonald_mehta(rs);
    let kernel = |x: &[f64]| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (e, (a, b)) in factors.iter().zip(xi.iter().zip(x)) {
            acc *= e.eval_imag(-a * b).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        }
        acc
    };
    let support = Support::of(field);
    let re = integrate(rs, &|x| field.value(x) * kernel(x).re, &support, &Domain::FullSpace, cfg)?;
    let im = integrate(rs, &|x| field.value(x) * kernel(x).im, &support, &Domain::FullSpace, cfg)?;
    Ok(Complex64::new(re.value, im.value) / mk)
}

/// `(‖D_k f‖₂, ‖f‖₂)` for a field with Gaussian decay. The transform of such
/// a field decays like a Gaussian of width `1/scale`.
pub fn plancherel_pair(rs: &RootSystem, field: &dyn ScalarField, cfg: &QuadConfig) -> Result<(Estimate, Estimate)> {
    let Extent::Gaussian { width, .. } = field.extent() else {
        return Err(Error::UnsupportedShape(format!("Plancherel check needs Gaussian decay, {} has none", field.name())));
    };
    let inner = QuadConfig { rel_tol: cfg.rel_tol * 1e-2, ..cfg.clone() };
    let dual = Support { extent: Extent::Gaussian { shift: 0.0, width: 1.0 / width.min(field.scale()) }, scale: 1.0 / field.scale() };
    let g = |xi: &[f64]| dunkl_transform(rs, field, xi, &inner).map_or(f64::NAN, |c| c.norm_sqr());
    let lhs = integrate(rs, &g, &dual, &Domain::FullSpace, cfg)?.estimate().powf(0.5);
    let rhs = crate::quadrature::lp_norm(rs, field, 2.0, &Domain::FullSpace, &inner)?;
    Ok((lhs, rhs))
}

/// The default logarithmic time grid `10^{−3} … 10^{3}`.
pub fn default_t_grid(points: usize) -> Vec<f64> {
    log_grid(1e-3, 1e3, points)
}

/// `sup_{t ∈ grid} t^{−s/2} ‖P_t f‖_∞` for `s < 0`.
pub fn besov_norm(rs: &RootSystem, field: &dyn ScalarField, s: f64, t_grid: &[f64], cfg: &QuadConfig) -> Result<f64> {
    if !(s < 0.0) {
        return Err(Error::NonNegativeS(s));
    }
    if t_grid.is_empty() {
        return Err(Error::Validation("time grid is empty".into()));
    }
    let heat = HeatKernel::new(rs)?;
    let mut best = 0.0f64;
    for &t in t_grid {
        let sup = semigroup_sup(&heat, field, t, cfg)?;
        best = best.max(t.powf(-0.5 * s) * sup);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Constant, GaussianMixture};
    use crate::rootsys::Multiplicities;
    use std::f64::consts::PI;

    fn a1(k: f64) -> RootSystem {
        RootSystem::a1_product(1, Multiplicities::Uniform(k)).unwrap()
    }

    #[test]
    fn coefficients_follow_the_recurrence() {
        let e = Rank1Kernel::new(1.0).unwrap();
        assert!((e.coefficient(1) - 1.0 / 3.0).abs() < 1e-16);
        assert!((e.coefficient(2) - 1.0 / 6.0).abs() < 1e-16);
        assert!((e.coefficient(3) - 1.0 / 30.0).abs() < 1e-16);
        let e0 = Rank1Kernel::new(0.0).unwrap();
        assert!((e0.coefficient(5) - 1.0 / 120.0).abs() < 1e-18);
    }

    #[test]
    fn exponential_limit() {
        assert!((rank1_kernel_eval(0.0, 1.0, 2.0).unwrap() - 2f64.exp()).abs() < 1e-12 * 2f64.exp());
        assert_eq!(rank1_kernel_eval(1.0, 0.0, 3.0).unwrap(), 1.0);
        assert!(matches!(rank1_kernel_eval(1.0, 10.0, 6.0), Err(Error::ArgumentTooLarge(_))));
    }

    #[test]
    fn kummer_route_matches_series() {
        for k in [0.5, 1.0, 2.3] {
            let e = Rank1Kernel::new(k).unwrap();
            for z in [0.1, 1.0, 5.0, 12.0, -0.3, -2.0] {
                let s = e.series(z);
                assert!((e.eval(z) - s).abs() < 1e-12 * s.abs(), "k={k} z={z}");
            }
        }
    }

    #[test]
    fn real_arguments_match_reference_values() {
        // Reference values computed independently at 30 digits.
        let e = Rank1Kernel::new(1.3).unwrap();
        for (z, v) in [(-3.0, 1.1285110450666911), (-1.0, 0.84181752073362604), (2.5, 3.3172042481754921)] {
            assert!((e.eval(z) - v).abs() < 1e-13 * v, "z={z}");
        }
        let cases: [(f64, [f64; 4]); 3] = [
            (0.5, [0.14506227708088485, 0.0012296158835897392, 0.10279117936263856, 0.00043191898458112283]),
            (1.0, [0.032777777777777778, 0.00055555555555555556, 0.016527777777777778, 0.00013888888888888889]),
            (1.3, [0.015111243811668693, 0.00033289125830338251, 0.0062252136136019630, 6.8003164575423249e-5]),
        ];
        for (k, vals) in cases {
            let e = Rank1Kernel::new(k).unwrap();
            for (z, v) in [30.0, -30.0, 60.0, -60.0].into_iter().zip(vals) {
                assert!((e.scaled(z) - v).abs() < 1e-12 * v, "k={k} z={z}: {} vs {v}", e.scaled(z));
            }
        }
    }

    #[test]
    fn imaginary_arguments_match_reference_values() {
        let cases = [
            (0.5, 0.7, 0.88120088860740530, 0.32899574154005893),
            (0.5, 5.0, -0.17759677131433830, -0.32757913759146522),
            (0.5, 40.0, 0.0073668905842372896, 0.12603831803758500),
            (1.0, 0.7, 0.92031098176813009, 0.22209827783377377),
            (1.0, 5.0, -0.19178485493262769, -0.095089408079170792),
            (1.0, 40.0, 0.018627829011983720, 0.017139147266606139),
        ];
        for (k, z, re, im) in cases {
            let v = Rank1Kernel::new(k).unwrap().eval_imag(z).unwrap();
            assert!((v.re - re).abs() < 1e-12 && (v.im - im).abs() < 1e-12, "k={k} z={z}: {v}");
        }
    }

    #[test]
    fn eigen_relation_of_the_series() {
        // T (E(·y))(x) = y E(xy) with T = d/dx + k(f(x) − f(−x))/x.
        for k in [0.5, 1.0, 2.0] {
            let e = Rank1Kernel::new(k).unwrap();
            for (x, y) in [(0.7f64, 1.3f64), (2.0, -3.0), (-1.5, 4.0), (3.0, 3.3)] {
                let mut deriv = 0.0;
                let mut odd = 0.0;
                for m in 1..MAX_TERMS {
                    let c = e.coefficient(m) * y.powi(m as i32);
                    deriv += c * m as f64 * x.powi(m as i32 - 1);
                    if m % 2 == 1 {
                        odd += 2.0 * c * x.powi(m as i32 - 1);
                    }
                }
                let lhs = deriv + k * odd;
                let rhs = y * e.series(x * y);
                assert!((lhs - rhs).abs() < 1e-8 * rhs.abs(), "k={k} x={x} y={y}");
            }
        }
    }

    #[test]
    fn log_derivative_is_consistent() {
        let e = Rank1Kernel::new(1.3).unwrap();
        for z in [-20.0f64, -2.0, -0.4, 0.0, 0.3, 1.0, 7.0, 40.0] {
            let h = 1e-5 * (1.0 + z.abs());
            let fd = (e.eval(z + h).ln() - e.eval(z - h).ln()) / (2.0 * h);
            assert!((e.log_derivative(z) - fd).abs() < 1e-7 * (1.0 + fd.abs()), "z={z}");
        }
    }

    #[test]
    fn heat_kernel_at_origin() {
        let rs = a1(1.0);
        for t in [0.1, 1.0, 3.0] {
            let h = heat_kernel(&rs, t, &[0.0], &[0.0]).unwrap();
            let expect = 1.0 / (2.0 * (2.0 * PI).sqrt() * (2.0 * t).powf(1.5));
            assert!((h - expect).abs() < 1e-14 * expect);
        }
        assert!(matches!(heat_kernel(&rs, 0.0, &[0.0], &[0.0]), Err(Error::NonPositiveTime(_))));
    }

    #[test]
    fn heat_kernel_has_unit_mass() {
        let rs = a1(1.0);
        let heat = HeatKernel::new(&rs).unwrap();
        let one = Constant(1.0);
        for t in [0.1, 1.0] {
            for x in [0.0, 1.0] {
                let m = heat.apply(&one, t, &[x], &QuadConfig::default()).unwrap();
                assert!((m.value - 1.0).abs() < 1e-9, "t={t} x={x}: {m:?}");
            }
        }
    }

    #[test]
    fn transform_of_gaussian_at_zero() {
        let rs = a1(1.0);
        let g = GaussianMixture::standard(1);
        let v = dunkl_transform(&rs, &g, &[0.0], &QuadConfig::default()).unwrap();
        assert!((v.re - 1.0).abs() < 1e-10 && v.im.abs() < 1e-14);
    }

    #[test]
    fn non_product_systems_are_rejected() {
        let rs = RootSystem::a2(1.0).unwrap();
        assert!(matches!(HeatKernel::new(&rs), Err(Error::UnsupportedRootSystem(_))));
    }
}
