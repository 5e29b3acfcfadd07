//! Adaptive cubature against `dμ_k = w_k(x) dx`.
//!
//! Domains are cut along every reflection hyperplane so each cell lies in a
//! single closed Weyl chamber, where `w_k` is smooth. Cells are tensor
//! Gauss–Legendre rules on a parameter box mapped through a chart (ray,
//! polar sector, Duffy triangle, Cartesian box, boundary pieces). The error of
//! a cell is the difference between its own rule and the sum of its children;
//! the cells carrying the largest share of the error are split until the
//! total error meets the tolerance. Cells are processed in parallel but kept
//! in a fixed order and summed pairwise, so results do not depend on the
//! number of threads.
//!
//! Supported shapes: every domain for `N ≤ 2`; for `N ≥ 3` only boxes and
//! unbounded domains of product (`Z_2^N`) systems, whose chambers are orthants.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fields::{Extent, ScalarField};
use crate::rootsys::RootSystem;
use crate::special::{gauss_legendre, ln_gamma, pairwise_sum};
use crate::{dot, norm, Error, Estimate, Result, Vector};

/// Integration region; chambers are indices into [`RootSystem::chambers`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    FullSpace,
    Ball { radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    ChamberBall { chamber: usize, radius: f64 },
    Chamber { chamber: usize },
}

impl Domain {
    fn validate(&self, rs: &RootSystem) -> Result<()> {
        let n = rs.dimension();
        let chamber_ok = |c: usize| {
            if c < rs.chambers().len() {
                Ok(())
            } else {
                Err(Error::Validation(format!("chamber index {c} out of range")))
            }
        };
        match self {
            Domain::FullSpace => Ok(()),
            Domain::Ball { radius } | Domain::ChamberBall { radius, .. } if !(*radius > 0.0) => {
                Err(Error::Validation(format!("ball radius must be positive, got {radius}")))
            }
            Domain::ChamberBall { chamber, .. } | Domain::Chamber { chamber } => chamber_ok(*chamber),
            Domain::Ball { .. } => Ok(()),
            Domain::Box { lo, hi } => {
                if lo.len() != n || hi.len() != n || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    Err(Error::Validation("box needs lo < hi componentwise in the ambient dimension".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, max_cells: 40_000 }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cells_used: usize,
}

impl IntegralResult {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error_estimate)
    }
}

/// Per-cell contribution, for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    pub chart: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub value: f64,
    pub error: f64,
}

/// Decay information and feature scale of an integrand.
#[derive(Clone, Debug)]
pub struct Support {
    pub extent: Extent,
    pub scale: f64,
}

impl Support {
    pub fn of(field: &dyn ScalarField) -> Self {
        Self { extent: field.extent(), scale: field.scale() }
    }

    pub fn power(&self, p: f64) -> Self {
        Self { extent: self.extent.power(p), scale: self.scale }
    }

    pub fn derivative(&self) -> Self {
        Self { extent: self.extent.derivative(), scale: self.scale }
    }
}

// ---------------------------------------------------------------------------
// Charts

#[derive(Clone, Debug)]
enum Chart {
    /// `x = offset + sign·r(u)`, `r(u) = u` or `u/(1−u)` when compactified.
    Ray { sign: f64, offset: f64, compact: bool },
    /// `(u, θ) ↦ r(u)(cos θ, sin θ)`.
    Polar { compact: bool },
    /// `θ ↦ R(cos θ, sin θ)`.
    Arc { radius: f64 },
    /// `u ↦ a + u(b − a)`.
    Segment { a: Vector, b: Vector },
    /// Duffy map of the triangle `abc`: `a + u(b−a) + uv(c−b)`.
    Triangle { a: [f64; 2], b: [f64; 2], c: [f64; 2] },
    /// Identity, or per-axis `x_i = s_i u_i/(1−u_i)` on an orthant.
    Cartesian { signs: Option<Vector> },
    /// Box face `x_axis = value`, parametrised by the other coordinates.
    Face { axis: usize, value: f64 },
}

fn compact_r(u: f64) -> (f64, f64) {
    let v = 1.0 - u;
    (u / v, 1.0 / (v * v))
}

impl Chart {
    fn map(&self, u: &[f64], x: &mut Vector) -> f64 {
        match self {
            Chart::Ray { sign, offset, compact } => {
                let (r, j) = if *compact { compact_r(u[0]) } else { (u[0], 1.0) };
                x[0] = offset + sign * r;
                j
            }
            Chart::Polar { compact } => {
                let (r, j) = if *compact { compact_r(u[0]) } else { (u[0], 1.0) };
                let (s, c) = u[1].sin_cos();
                x[0] = r * c;
                x[1] = r * s;
                r * j
            }
            Chart::Arc { radius } => {
                let (s, c) = u[0].sin_cos();
                x[0] = radius * c;
                x[1] = radius * s;
                *radius
            }
            Chart::Segment { a, b } => {
                for i in 0..a.len() {
                    x[i] = a[i] + u[0] * (b[i] - a[i]);
                }
                norm(&a.iter().zip(b).map(|(p, q)| q - p).collect::<Vector>())
            }
            Chart::Triangle { a, b, c } => {
                let (s, t) = (u[0], u[1]);
                for i in 0..2 {
                    x[i] = a[i] + s * (b[i] - a[i]) + s * t * (c[i] - b[i]);
                }
                let det = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                s * det.abs()
            }
            Chart::Cartesian { signs: None } => {
                x.copy_from_slice(u);
                1.0
            }
            Chart::Cartesian { signs: Some(s) } => {
                let mut j = 1.0;
                for i in 0..u.len() {
                    let (r, d) = compact_r(u[i]);
                    x[i] = s[i] * r;
                    j *= d;
                }
                j
            }
            Chart::Face { axis, value } => {
                let mut k = 0;
                for (i, xi) in x.iter_mut().enumerate() {
                    if i == *axis {
                        *xi = *value;
                    } else {
                        *xi = u[k];
                        k += 1;
                    }
                }
                1.0
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Chart::Ray { sign, compact, .. } => format!("ray({sign:+},{})", if *compact { "compact" } else { "linear" }),
            Chart::Polar { compact } => format!("polar({})", if *compact { "compact" } else { "linear" }),
            Chart::Arc { radius } => format!("arc(r={radius})"),
            Chart::Segment { .. } => "segment".into(),
            Chart::Triangle { .. } => "triangle".into(),
            Chart::Cartesian { signs: None } => "box".into(),
            Chart::Cartesian { signs: Some(_) } => "box(compact)".into(),
            Chart::Face { axis, value } => format!("face(x{axis}={value})"),
        }
    }

    /// Rough physical length of each parameter axis, used to pre-split.
    fn lengths(&self, lo: &[f64], hi: &[f64]) -> Vector {
        match self {
            Chart::Polar { compact: false } => smallvec::smallvec![hi[0] - lo[0], hi[0] * (hi[1] - lo[1])],
            Chart::Polar { compact: true } => smallvec::smallvec![f64::INFINITY, f64::INFINITY],
            Chart::Ray { compact: true, .. } | Chart::Cartesian { signs: Some(_) } => {
                lo.iter().map(|_| f64::INFINITY).collect()
            }
            Chart::Arc { radius } => smallvec::smallvec![radius * (hi[0] - lo[0])],
            Chart::Segment { a, b } => {
                let l = norm(&a.iter().zip(b).map(|(p, q)| q - p).collect::<Vector>());
                smallvec::smallvec![l * (hi[0] - lo[0])]
            }
            Chart::Triangle { a, b, c } => {
                let d = [a, b, c]
                    .iter()
                    .flat_map(|p| [a, b, c].map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()))
                    .fold(0.0, f64::max);
                smallvec::smallvec![d, d]
            }
            _ => lo.iter().zip(hi).map(|(a, b)| b - a).collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct Region {
    chart: Arc<Chart>,
    lo: Vector,
    hi: Vector,
}

// ---------------------------------------------------------------------------
// Engine

fn rule_order(m: usize) -> usize {
    match m {
        1 | 2 => 20,
        3 => 10,
        _ => 6,
    }
}

#[derive(Clone, Debug)]
struct Cell {
    region: usize,
    lo: Vector,
    hi: Vector,
    value: f64,
    abs: f64,
    err: f64,
    children: Vec<(f64, f64)>,
}

type Integrand<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

struct Engine<'a> {
    regions: Vec<Region>,
    dim: usize,
    f: Integrand<'a>,
}

impl Engine<'_> {
    /// Tensor Gauss–Legendre sum over a parameter box: `(∫ g, ∫ |g|)`.
    fn rule(&self, chart: &Chart, lo: &[f64], hi: &[f64]) -> (f64, f64) {
        let m = lo.len();
        let order = rule_order(m);
        let gl = gauss_legendre(order);
        let half: Vector = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mid: Vector = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let vol: f64 = half.iter().product();
        let mut idx = vec![0usize; m];
        let mut u: Vector = mid.clone();
        let mut x: Vector = std::iter::repeat(0.0).take(self.dim).collect();
        let total = order.pow(m as u32);
        let mut vals = Vec::with_capacity(total);
        let mut abs = 0.0;
        for _ in 0..total {
            let mut w = vol;
            for a in 0..m {
                u[a] = mid[a] + half[a] * gl.nodes[idx[a]];
                w *= gl.weights[idx[a]];
            }
            let jac = chart.map(&u, &mut x);
            let v = if jac == 0.0 || w == 0.0 { 0.0 } else { (self.f)(&x) * jac * w };
            let v = if v.is_finite() { v } else { f64::NAN };
            abs += v.abs();
            vals.push(v);
            for a in 0..m {
                idx[a] += 1;
                if idx[a] < order {
                    break;
                }
                idx[a] = 0;
            }
        }
        (pairwise_sum(&vals), abs)
    }

    fn child_boxes(lo: &[f64], hi: &[f64]) -> Vec<(Vector, Vector)> {
        let m = lo.len();
        (0..1usize << m)
            .map(|mask| {
                let mut a = Vector::new();
                let mut b = Vector::new();
                for i in 0..m {
                    let mid = 0.5 * (lo[i] + hi[i]);
                    if mask >> i & 1 == 0 {
                        a.push(lo[i]);
                        b.push(mid);
                    } else {
                        a.push(mid);
                        b.push(hi[i]);
                    }
                }
                (a, b)
            })
            .collect()
    }

    fn evaluate(&self, region: usize, lo: Vector, hi: Vector, parent: Option<(f64, f64)>) -> Cell {
        let chart = &self.regions[region].chart;
        let parent = parent.unwrap_or_else(|| self.rule(chart, &lo, &hi));
        let children: Vec<(f64, f64)> = Self::child_boxes(&lo, &hi)
            .iter()
            .map(|(a, b)| self.rule(chart, a, b))
            .collect();
        let vals: Vec<f64> = children.iter().map(|c| c.0).collect();
        let value = pairwise_sum(&vals);
        let abs = children.iter().map(|c| c.1).sum();
        let err = (value - parent.0).abs();
        Cell { region, lo, hi, value, abs, err, children }
    }

    fn split(&self, cell: &Cell) -> Vec<Cell> {
        Self::child_boxes(&cell.lo, &cell.hi)
            .into_iter()
            .zip(&cell.children)
            .map(|((a, b), &p)| self.evaluate(cell.region, a, b, Some(p)))
            .collect()
    }

    fn initial_cells(&self, scale: f64) -> Vec<Cell> {
        let mut boxes = Vec::new();
        let budget = 4096usize;
        for (ri, r) in self.regions.iter().enumerate() {
            let m = r.lo.len();
            let lens = r.chart.lengths(&r.lo, &r.hi);
            let per_axis_cap = (budget as f64).powf(1.0 / m as f64).floor().max(1.0) as usize;
            let counts: Vec<usize> = lens
                .iter()
                .map(|l| {
                    if l.is_finite() {
                        ((l / (2.0 * scale)).ceil() as usize).clamp(1, per_axis_cap.min(256))
                    } else {
                        4.min(per_axis_cap)
                    }
                })
                .collect();
            let total: usize = counts.iter().product();
            let mut idx = vec![0usize; m];
            for _ in 0..total {
                let lo: Vector = (0..m)
                    .map(|a| r.lo[a] + (r.hi[a] - r.lo[a]) * idx[a] as f64 / counts[a] as f64)
                    .collect();
                let hi: Vector = (0..m)
                    .map(|a| r.lo[a] + (r.hi[a] - r.lo[a]) * (idx[a] + 1) as f64 / counts[a] as f64)
                    .collect();
                boxes.push((ri, lo, hi));
                for a in 0..m {
                    idx[a] += 1;
                    if idx[a] < counts[a] {
                        break;
                    }
                    idx[a] = 0;
                }
            }
        }
        boxes
            .into_par_iter()
            .map(|(ri, lo, hi)| self.evaluate(ri, lo, hi, None))
            .collect()
    }

    fn run(&self, scale: f64, cfg: &QuadConfig) -> Result<(IntegralResult, Vec<Cell>)> {
        let mut cells = self.initial_cells(scale);
        loop {
            let vals: Vec<f64> = cells.iter().map(|c| c.value).collect();
            let errs: Vec<f64> = cells.iter().map(|c| c.err).collect();
            let total = pairwise_sum(&vals);
            let err = pairwise_sum(&errs);
            let mass: f64 = pairwise_sum(&cells.iter().map(|c| c.abs).collect::<Vec<_>>());
            if !total.is_finite() || !err.is_finite() {
                return Err(Error::DivergentIntegral("non-finite integrand values".into()));
            }
            let target = (cfg.rel_tol * total.abs()).max(1e-2 * cfg.rel_tol * mass).max(cfg.abs_tol);
            if err <= target {
                let res = IntegralResult { value: total, error_estimate: err, cells_used: cells.len() };
                return Ok((res, cells));
            }
            let growth = 1usize << cells[0].lo.len();
            if cells.len() + growth > cfg.max_cells {
                return Err(Error::NoConvergence { cells: cells.len(), value: total, error: err });
            }
            let mut order: Vec<usize> = (0..cells.len()).collect();
            order.sort_by(|&a, &b| cells[b].err.total_cmp(&cells[a].err).then(a.cmp(&b)));
            let mut chosen = vec![false; cells.len()];
            let mut acc = 0.0;
            let mut budget = (cfg.max_cells - cells.len()) / (growth - 1).max(1);
            for &i in &order {
                if acc >= 0.5 * err || budget == 0 {
                    break;
                }
                chosen[i] = true;
                acc += cells[i].err;
                budget -= 1;
            }
            let pieces: Vec<Vec<Cell>> = cells
                .par_iter()
                .zip(chosen.par_iter())
                .map(|(c, &split)| if split { self.split(c) } else { vec![c.clone()] })
                .collect();
            cells = pieces.into_iter().flatten().collect();
        }
    }
}

fn run_regions(
    regions: Vec<Region>,
    dim: usize,
    f: Integrand<'_>,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<(IntegralResult, Vec<CellRecord>, Vec<(Arc<Chart>, Vector, Vector)>)> {
    if regions.is_empty() {
        return Ok((IntegralResult { value: 0.0, error_estimate: 0.0, cells_used: 0 }, Vec::new(), Vec::new()));
    }
    let engine = Engine { regions, dim, f };
    let (res, cells) = engine.run(scale.max(1e-6), cfg)?;
    let records = cells
        .iter()
        .map(|c| CellRecord {
            chart: engine.regions[c.region].chart.label(),
            lo: c.lo.to_vec(),
            hi: c.hi.to_vec(),
            value: c.value,
            error: c.err,
        })
        .collect();
    let boxes = cells
        .iter()
        .map(|c| (engine.regions[c.region].chart.clone(), c.lo.clone(), c.hi.clone()))
        .collect();
    Ok((res, records, boxes))
}

// ---------------------------------------------------------------------------
// Geometry

/// Open angular sector between consecutive wall rays in the plane.
#[derive(Clone, Debug)]
pub struct Sector {
    pub theta0: f64,
    pub theta1: f64,
    pub chamber: usize,
}

/// Sectors of the plane cut out by the walls of a rank-two system,
/// counter-clockwise from the first wall ray at or after angle 0.
pub fn sectors(rs: &RootSystem) -> Vec<Sector> {
    let mut rays: Vec<f64> = Vec::new();
    for a in rs.roots() {
        let phi = (a[1].atan2(a[0]) + 0.5 * PI).rem_euclid(2.0 * PI);
        rays.push(phi);
        rays.push((phi + PI).rem_euclid(2.0 * PI));
    }
    rays.sort_by(f64::total_cmp);
    rays.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    (0..rays.len())
        .map(|i| {
            let theta0 = rays[i];
            let theta1 = if i + 1 < rays.len() { rays[i + 1] } else { rays[0] + 2.0 * PI };
            let mid = 0.5 * (theta0 + theta1);
            let sign = rs.chamber_sign(&[mid.cos(), mid.sin()]).expect("sector midpoint is off the walls");
            let chamber = rs.chambers().iter().position(|c| *c == sign).expect("chamber list is complete");
            Sector { theta0, theta1, chamber }
        })
        .collect()
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Sutherland–Hodgman clip of a convex polygon by `{x : cross(d, x)·side ≥ 0}`.
fn clip(poly: &[[f64; 2]], d: [f64; 2], side: f64) -> Vec<[f64; 2]> {
    let inside = |p: [f64; 2]| cross(d, p) * side >= 0.0;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (ip, iq) = (inside(p), inside(q));
        if ip {
            out.push(p);
        }
        if ip != iq {
            let cp = cross(d, p);
            let cq = cross(d, q);
            let t = cp / (cp - cq);
            let mut r = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            // land exactly on the wall line
            let dn = d[0] * d[0] + d[1] * d[1];
            let along = (r[0] * d[0] + r[1] * d[1]) / dn;
            r = [along * d[0], along * d[1]];
            out.push(r);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    0.5 * (0..poly.len())
        .map(|i| cross(poly[i], poly[(i + 1) % poly.len()]))
        .sum::<f64>()
        .abs()
}

fn box_sector_triangles(lo: &[f64], hi: &[f64], s: &Sector) -> Vec<Region> {
    let mut poly = vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
    let d0 = [s.theta0.cos(), s.theta0.sin()];
    let d1 = [s.theta1.cos(), s.theta1.sin()];
    poly = clip(&poly, d0, 1.0);
    if poly.len() >= 3 {
        poly = clip(&poly, d1, -1.0);
    }
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut clean: Vec<[f64; 2]> = Vec::new();
    for p in poly {
        if clean.last().is_none_or(|q: &[f64; 2]| (p[0] - q[0]).abs() + (p[1] - q[1]).abs() > 1e-13 * scale) {
            clean.push(p);
        }
    }
    while clean.len() > 1 {
        let (f, l) = (clean[0], clean[clean.len() - 1]);
        if (f[0] - l[0]).abs() + (f[1] - l[1]).abs() <= 1e-13 * scale {
            clean.pop();
        } else {
            break;
        }
    }
    if clean.len() < 3 || polygon_area(&clean) <= 1e-14 * scale * scale {
        return Vec::new();
    }
    let start = (0..clean.len())
        .min_by(|&i, &j| (clean[i][0].hypot(clean[i][1])).total_cmp(&clean[j][0].hypot(clean[j][1])))
        .unwrap();
    clean.rotate_left(start);
    (1..clean.len() - 1)
        .filter_map(|i| {
            let (a, b, c) = (clean[0], clean[i], clean[i + 1]);
            let area = 0.5 * cross([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]).abs();
            (area > 1e-14 * scale * scale).then(|| Region {
                chart: Arc::new(Chart::Triangle { a, b, c }),
                lo: smallvec::smallvec![0.0, 0.0],
                hi: smallvec::smallvec![1.0, 1.0],
            })
        })
        .collect()
}

/// Orthant boxes of `[lo, hi]` for a product system.
fn orthant_boxes(lo: &[f64], hi: &[f64]) -> Vec<Region> {
    let n = lo.len();
    let mut out = Vec::new();
    for mask in 0..1usize << n {
        let mut a = Vector::new();
        let mut b = Vector::new();
        let mut ok = true;
        for i in 0..n {
            let (l, h) = if mask >> i & 1 == 0 { (lo[i].max(0.0), hi[i]) } else { (lo[i], hi[i].min(0.0)) };
            if l >= h {
                ok = false;
                break;
            }
            a.push(l);
            b.push(h);
        }
        if ok {
            out.push(Region { chart: Arc::new(Chart::Cartesian { signs: None }), lo: a, hi: b });
        }
    }
    out
}

/// Radius beyond which a Gaussian-decaying integrand is negligible at relative
/// level `tol`, accounting for polynomial growth of the weight.
pub fn gaussian_cutoff(shift: f64, width: f64, d: f64, tol: f64) -> f64 {
    let base = 2.0 * (1.0 / tol.max(1e-300)).ln();
    let mut t = base.sqrt();
    for _ in 0..20 {
        let r = (shift + width * t).max(1.0) / width.min(1.0);
        t = (base + 2.0 * d * r.ln().max(0.0)).sqrt();
    }
    shift + width * (t + 1.0)
}

/// Reduces `domain` to chamber-aligned regions for an integrand with the
/// given support.
fn regions_for(rs: &RootSystem, domain: &Domain, support: &Support, tol: f64) -> Result<Vec<Region>> {
    domain.validate(rs)?;
    let n = rs.dimension();
    let d = rs.effective_dimension();
    let chamber_filter = match domain {
        Domain::ChamberBall { chamber, .. } | Domain::Chamber { chamber } => Some(*chamber),
        _ => None,
    };
    let in_chamber = |x: &[f64]| match chamber_filter {
        Some(c) => rs.chambers()[c].contains(rs, x),
        None => true,
    };

    // Bounded regions: a box, or a (chamber) ball of given radius.
    let compact_box = match &support.extent {
        Extent::Compact { lo, hi } => Some((lo.clone(), hi.clone())),
        _ => None,
    };
    enum Shape {
        Box(Vector, Vector),
        Ball(f64),
        Infinite,
    }
    let mut shape = match domain {
        Domain::Box { lo, hi } => Shape::Box(lo.iter().copied().collect(), hi.iter().copied().collect()),
        Domain::Ball { radius } | Domain::ChamberBall { radius, .. } => Shape::Ball(*radius),
        Domain::FullSpace | Domain::Chamber { .. } => Shape::Infinite,
    };
    if let Some((slo, shi)) = &compact_box {
        shape = match shape {
            Shape::Box(lo, hi) => {
                let a: Vector = lo.iter().zip(slo).map(|(p, q)| p.max(*q)).collect();
                let b: Vector = hi.iter().zip(shi).map(|(p, q)| p.min(*q)).collect();
                if a.iter().zip(&b).any(|(p, q)| p >= q) {
                    return Ok(Vec::new());
                }
                Shape::Box(a, b)
            }
            Shape::Infinite => Shape::Box(slo.clone(), shi.clone()),
            Shape::Ball(r) => {
                let far = slo
                    .iter()
                    .zip(shi)
                    .map(|(a, b)| a.abs().max(b.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if far <= r {
                    Shape::Box(slo.clone(), shi.clone())
                } else {
                    Shape::Ball(r)
                }
            }
        };
    }
    let mut compactified = false;
    if let Shape::Infinite = shape {
        match &support.extent {
            Extent::Gaussian { shift, width } => {
                let r = gaussian_cutoff(*shift, *width, d, tol);
                shape = if n >= 3 || rs.is_product() && n == 2 {
                    Shape::Box(std::iter::repeat(-r).take(n).collect(), std::iter::repeat(r).take(n).collect())
                } else {
                    Shape::Ball(r)
                };
            }
            Extent::Algebraic { .. } => compactified = true,
            Extent::Unbounded => return Err(Error::UnboundedDomain),
            Extent::Compact { .. } => unreachable!(),
        }
    }

    let mut regions = Vec::new();
    match n {
        1 => {
            let (a, b) = match &shape {
                Shape::Box(lo, hi) => (lo[0], hi[0]),
                Shape::Ball(r) => (-r, *r),
                Shape::Infinite => (f64::NEG_INFINITY, f64::INFINITY),
            };
            for sign in [1.0, -1.0] {
                if !in_chamber(&[sign]) {
                    continue;
                }
                let (lo, hi) = if sign > 0.0 { (a.max(0.0), b) } else { ((-b).max(0.0), -a) };
                if lo >= hi {
                    continue;
                }
                if compactified {
                    regions.push(Region {
                        chart: Arc::new(Chart::Ray { sign, offset: 0.0, compact: true }),
                        lo: smallvec::smallvec![0.0],
                        hi: smallvec::smallvec![1.0],
                    });
                } else {
                    regions.push(Region {
                        chart: Arc::new(Chart::Ray { sign, offset: 0.0, compact: false }),
                        lo: smallvec::smallvec![lo],
                        hi: smallvec::smallvec![hi],
                    });
                }
            }
        }
        2 => {
            let secs = sectors(rs);
            for s in &secs {
                if let Some(c) = chamber_filter {
                    if s.chamber != c {
                        continue;
                    }
                }
                match &shape {
                    Shape::Box(lo, hi) => {
                        if rs.is_product() {
                            let mid = 0.5 * (s.theta0 + s.theta1);
                            let (sx, sy) = (mid.cos().signum(), mid.sin().signum());
                            let qa: Vector = smallvec::smallvec![
                                if sx > 0.0 { lo[0].max(0.0) } else { lo[0] },
                                if sy > 0.0 { lo[1].max(0.0) } else { lo[1] }
                            ];
                            let qb: Vector = smallvec::smallvec![
                                if sx > 0.0 { hi[0] } else { hi[0].min(0.0) },
                                if sy > 0.0 { hi[1] } else { hi[1].min(0.0) }
                            ];
                            if qa[0] < qb[0] && qa[1] < qb[1] {
                                regions.push(Region { chart: Arc::new(Chart::Cartesian { signs: None }), lo: qa, hi: qb });
                            }
                        } else {
                            regions.extend(box_sector_triangles(lo, hi, s));
                        }
                    }
                    Shape::Ball(r) => regions.push(Region {
                        chart: Arc::new(Chart::Polar { compact: false }),
                        lo: smallvec::smallvec![0.0, s.theta0],
                        hi: smallvec::smallvec![*r, s.theta1],
                    }),
                    Shape::Infinite => regions.push(Region {
                        chart: Arc::new(Chart::Polar { compact: true }),
                        lo: smallvec::smallvec![0.0, s.theta0],
                        hi: smallvec::smallvec![1.0, s.theta1],
                    }),
                }
            }
        }
        _ => {
            if !rs.is_product() {
                return Err(Error::UnsupportedShape(format!(
                    "integration in dimension {n} is only available for product systems"
                )));
            }
            match &shape {
                Shape::Box(lo, hi) => regions.extend(orthant_boxes(lo, hi)),
                Shape::Ball(_) => {
                    return Err(Error::UnsupportedShape(format!("balls in dimension {n}")));
                }
                Shape::Infinite => {
                    for mask in 0..1usize << n {
                        let signs: Vector = (0..n).map(|i| if mask >> i & 1 == 0 { 1.0 } else { -1.0 }).collect();
                        regions.push(Region {
                            chart: Arc::new(Chart::Cartesian { signs: Some(signs) }),
                            lo: std::iter::repeat(0.0).take(n).collect(),
                            hi: std::iter::repeat(1.0).take(n).collect(),
                        });
                    }
                }
            }
            if let Some(c) = chamber_filter {
                regions.retain(|r| {
                    let mid: Vector = match &*r.chart {
                        Chart::Cartesian { signs: Some(s) } => s.clone(),
                        _ => r.lo.iter().zip(&r.hi).map(|(a, b)| 0.5 * (a + b)).collect(),
                    };
                    rs.chambers()[c].contains(rs, &mid)
                });
            }
        }
    }
    Ok(regions)
}

// ---------------------------------------------------------------------------
// Public integrals

/// `∫_Ω f dμ_k` for an arbitrary integrand with declared support.
pub fn integrate(
    rs: &RootSystem,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    support: &Support,
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    integrate_with_cells(rs, f, support, domain, cfg).map(|r| r.0)
}

pub fn integrate_with_cells(
    rs: &RootSystem,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    support: &Support,
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<(IntegralResult, Vec<CellRecord>)> {
    let regions = regions_for(rs, domain, support, cfg.rel_tol * 1e-2)?;
    let g = |x: &[f64]| {
        let w = rs.weight(x);
        if w == 0.0 {
            0.0
        } else {
            f(x) * w
        }
    };
    let (res, records, _) = run_regions(regions, rs.dimension(), &g, support.scale, cfg)?;
    Ok((res, records))
}

/// `∫_Ω f dμ_k` for a field, at relative tolerance `tol`.
pub fn integrate_weighted(rs: &RootSystem, field: &dyn ScalarField, domain: &Domain, tol: f64) -> Result<IntegralResult> {
    integrate(rs, &|x| field.value(x), &Support::of(field), domain, &QuadConfig::with_rel_tol(tol))
}

/// `‖f‖_{L^p(Ω, μ_k)}` for `1 ≤ p < ∞`; `p = ∞` is the sampled supremum.
pub fn lp_norm(rs: &RootSystem, field: &dyn ScalarField, p: f64, domain: &Domain, cfg: &QuadConfig) -> Result<Estimate> {
    if !(p >= 1.0) {
        return Err(Error::ParameterRange(format!("p must be at least 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(Estimate::exact(sup_abs(rs, field, domain)?));
    }
    let support = Support::of(field).power(p);
    if matches!(domain, Domain::FullSpace | Domain::Chamber { .. })
        && !support.extent.integrable(1.0, rs.effective_dimension())
    {
        return Err(Error::DivergentIntegral(format!("{} is not in L^{p}", field.name())));
    }
    let r = integrate(rs, &|x| field.value(x).abs().powf(p), &support, domain, cfg)?;
    Ok(r.estimate().powf(1.0 / p))
}

/// One quadrature node of a fine discretisation of `Ω`.
#[derive(Clone, Debug)]
pub struct Node {
    pub x: Vector,
    /// `μ_k` mass carried by the node.
    pub weight: f64,
    pub value: f64,
}

/// Quadrature nodes of a refined mesh of `Ω` with their `μ_k` weights and
/// field values. The mesh is the adaptive mesh for `∫|f| dμ_k`, each cell
/// further split `subdivide` times per axis.
pub fn node_cloud(
    rs: &RootSystem,
    field: &dyn ScalarField,
    domain: &Domain,
    cfg: &QuadConfig,
    subdivide: usize,
) -> Result<Vec<Node>> {
    node_cloud_for_power(rs, field, 1.0, domain, cfg, subdivide)
}

/// [`node_cloud`] on the adaptive mesh for `∫|f|^p dμ_k`, for fields that
/// are in `L^p` but not in `L^1`.
pub fn node_cloud_for_power(
    rs: &RootSystem,
    field: &dyn ScalarField,
    p: f64,
    domain: &Domain,
    cfg: &QuadConfig,
    subdivide: usize,
) -> Result<Vec<Node>> {
    let support = Support::of(field).power(p);
    let regions = regions_for(rs, domain, &support, cfg.rel_tol * 1e-2)?;
    let g = |x: &[f64]| field.value(x).abs().powf(p) * rs.weight(x);
    let (_, _, boxes) = run_regions(regions, rs.dimension(), &g, support.scale, cfg)?;
    let n = rs.dimension();
    let per_box: Vec<Vec<Node>> = boxes
        .par_iter()
        .map(|(chart, lo, hi)| {
            let m = lo.len();
            let order = rule_order(m);
            let gl = gauss_legendre(order);
            let mut out = Vec::new();
            let s = subdivide.max(1);
            let sub = s.pow(m as u32);
            for si in 0..sub {
                let mut rem = si;
                let mut a = Vector::new();
                let mut b = Vector::new();
                for ax in 0..m {
                    let j = rem % s;
                    rem /= s;
                    let w = (hi[ax] - lo[ax]) / s as f64;
                    a.push(lo[ax] + j as f64 * w);
                    b.push(lo[ax] + (j + 1) as f64 * w);
                }
                let total = order.pow(m as u32);
                for t in 0..total {
                    let mut rem = t;
                    let mut u = Vector::new();
                    let mut wt = 1.0;
                    for ax in 0..m {
                        let j = rem % order;
                        rem /= order;
                        let half = 0.5 * (b[ax] - a[ax]);
                        u.push(0.5 * (a[ax] + b[ax]) + half * gl.nodes[j]);
                        wt *= half * gl.weights[j];
                    }
                    let mut x: Vector = std::iter::repeat(0.0).take(n).collect();
                    let jac = chart.map(&u, &mut x);
                    let weight = wt * jac * rs.weight(&x);
                    if weight > 0.0 && weight.is_finite() {
                        let value = field.value(&x);
                        out.push(Node { x, weight, value });
                    }
                }
            }
            out
        })
        .collect();
    Ok(per_box.into_iter().flatten().collect())
}

/// Maximises `g` locally by a shrinking compass search from `x0`.
pub fn refine_max(g: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, inside: &dyn Fn(&[f64]) -> bool) -> (Vector, f64) {
    let mut x: Vector = x0.into();
    let mut best = g(&x);
    let mut h = step;
    while h > 1e-10 * (1.0 + norm(&x)) {
        let mut improved = false;
        for i in 0..x.len() {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += s * h;
                if !inside(&y) {
                    continue;
                }
                let v = g(&y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, best)
}

fn domain_contains(rs: &RootSystem, domain: &Domain, x: &[f64]) -> bool {
    match domain {
        Domain::FullSpace => true,
        Domain::Ball { radius } => norm(x) <= *radius,
        Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b),
        Domain::ChamberBall { chamber, radius } => norm(x) <= *radius && rs.chambers()[*chamber].contains(rs, x),
        Domain::Chamber { chamber } => rs.chambers()[*chamber].contains(rs, x),
    }
}

/// Nine points per axis on `[−reach, reach]^n`.
fn coarse_grid(n: usize, reach: f64) -> Vec<Vector> {
    let coords: Vec<f64> = (0..9).map(|i| -reach + reach * i as f64 / 4.0).collect();
    let mut points: Vec<Vector> = vec![Vector::new()];
    for _ in 0..n {
        points = points.into_iter().flat_map(|p| coords.iter().map(move |c| { let mut q = p.clone(); q.push(*c); q })).collect();
    }
    points
}

/// Sampled `sup_Ω |f|`: maximum over a fine node cloud, polished by local
/// search from the best few nodes.
pub fn sup_abs(rs: &RootSystem, field: &dyn ScalarField, domain: &Domain) -> Result<f64> {
    let cfg = QuadConfig { rel_tol: 1e-6, ..QuadConfig::default() };
    // Slowly decaying fields are meshed through a power that is integrable.
    let power = match field.extent() {
        Extent::Algebraic { rate } => (2.0 * rs.effective_dimension() / rate).max(1.0),
        _ => 1.0,
    };
    let mut cloud = match node_cloud_for_power(rs, field, power, domain, &cfg, 2) {
        Ok(c) => c,
        // The cloud comes from an integration pass; fields that are not
        // integrable fall back to a coarse grid around the origin.
        Err(Error::UnboundedDomain | Error::DivergentIntegral(_)) => coarse_grid(rs.dimension(), 4.0 * field.scale())
            .into_iter()
            .map(|x| {
                let value = field.value(&x);
                Node { x, weight: 0.0, value }
            })
            .collect(),
        Err(e) => return Err(e),
    };
    let origin: Vector = std::iter::repeat(0.0).take(rs.dimension()).collect();
    let value = field.value(&origin);
    cloud.push(Node { x: origin, weight: 0.0, value });
    cloud.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()));
    let g = |x: &[f64]| field.value(x).abs();
    let inside = |x: &[f64]| domain_contains(rs, domain, x);
    let step = 0.05 * field.scale();
    let mut best = 0.0f64;
    for node in cloud.iter().take(4) {
        if inside(&node.x) {
            best = best.max(refine_max(&g, &node.x, step, &inside).1);
        }
        best = best.max(node.value.abs());
    }
    Ok(best)
}

/// `μ_k({|f| > t})` at each level, from a node cloud.
pub fn level_masses(cloud: &[Node], levels: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<(f64, f64)> = cloud.iter().map(|n| (n.value.abs(), n.weight)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let weights: Vec<f64> = sorted.iter().map(|s| s.1).collect();
    levels
        .iter()
        .map(|&t| {
            let count = sorted.partition_point(|s| s.0 > t);
            pairwise_sum(&weights[..count])
        })
        .collect()
}

/// `μ_k({|f| > t})` from a node cloud, with each node's mass spread across
/// the gap to its neighbours in value: the cumulative mass is taken at the
/// midpoint of every step and interpolated linearly in `t`. This removes the
/// half-step bias of [`level_masses`].
pub fn interpolated_level_masses(cloud: &[Node], levels: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<(f64, f64)> = cloud.iter().map(|n| (n.value.abs(), n.weight)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    // Merge equal values, then place each group's cumulative mass at its midpoint.
    let mut values: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for (v, w) in sorted {
        if values.last() == Some(&v) {
            groups.last_mut().unwrap().push(w);
        } else {
            values.push(v);
            groups.push(vec![w]);
        }
    }
    let masses: Vec<f64> = groups.iter().map(|g| pairwise_sum(g)).collect();
    let mut mid = Vec::with_capacity(masses.len());
    let mut prefix = Vec::with_capacity(masses.len() + 1);
    prefix.push(0.0);
    for (i, m) in masses.iter().enumerate() {
        mid.push(prefix[i] + 0.5 * m);
        prefix.push(prefix[i] + m);
    }
    let total = *prefix.last().unwrap();
    levels
        .iter()
        .map(|&t| {
            // values are decreasing; i = number of groups strictly above t.
            let i = values.partition_point(|&v| v > t);
            if values.is_empty() || i == values.len() {
                total
            } else if values[i] == t {
                prefix[i]
            } else if i == 0 {
                // Above every node: ramp from 0 at the top value.
                0.0
            } else {
                let (v0, v1) = (values[i - 1], values[i]);
                let s = (v0 - t) / (v0 - v1);
                mid[i - 1] + s * (mid[i] - mid[i - 1])
            }
        })
        .collect()
}

/// `sup_t t^q μ_k(|f| > t)` over `levels`, returned as the `q`-th root.
/// Level-set masses are measured on a refined node cloud.
pub fn weak_lq_norm(
    rs: &RootSystem,
    field: &dyn ScalarField,
    q: f64,
    levels: &[f64],
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::ParameterRange(format!("q must be at least 1, got {q}")));
    }
    if levels.is_empty() {
        return Err(Error::Validation("level grid is empty".into()));
    }
    let cloud = node_cloud_for_power(rs, field, q, domain, cfg, 4)?;
    let masses = level_masses(&cloud, levels);
    let best = levels.iter().zip(&masses).map(|(t, m)| t.powf(q) * m).fold(0.0, f64::max);
    Ok(best.powf(1.0 / q))
}

/// `n` logarithmically spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `∫_a^b f(x) dx` with the same adaptive engine; `b` may be `+∞`.
pub fn integrate_line(f: &(dyn Fn(f64) -> f64 + Sync), a: f64, b: f64, scale: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    let region = if b.is_infinite() {
        Region {
            chart: Arc::new(Chart::Ray { sign: 1.0, offset: a, compact: true }),
            lo: smallvec::smallvec![0.0],
            hi: smallvec::smallvec![1.0],
        }
    } else {
        Region {
            chart: Arc::new(Chart::Cartesian { signs: None }),
            lo: smallvec::smallvec![a],
            hi: smallvec::smallvec![b],
        }
    };
    let g = |x: &[f64]| f(x[0]);
    run_regions(vec![region], 1, &g, scale, cfg).map(|r| r.0)
}

// ---------------------------------------------------------------------------
// Surface integrals

/// `p(B_1) = ∫_{S^{N−1}} w_k dσ`. For `N = 1` the sphere is `{±1}`; for
/// `N ≥ 3` product systems the value comes from the Gaussian moment
/// `∫ w_k e^{−|x|²/2} dx`, computed coordinate by coordinate, divided by the
/// radial factor `2^{d/2−1}Γ(d/2)`.
pub fn sphere_weight_integral(rs: &RootSystem, cfg: &QuadConfig) -> Result<Estimate> {
    let n = rs.dimension();
    match n {
        1 => Ok(Estimate::exact(rs.weight(&[1.0]) + rs.weight(&[-1.0]))),
        2 => {
            let regions = sectors(rs)
                .iter()
                .map(|s| Region {
                    chart: Arc::new(Chart::Arc { radius: 1.0 }),
                    lo: smallvec::smallvec![s.theta0],
                    hi: smallvec::smallvec![s.theta1],
                })
                .collect();
            let g = |x: &[f64]| rs.weight(x);
            Ok(run_regions(regions, 2, &g, 1.0, cfg)?.0.estimate())
        }
        _ => {
            let ks = rs.product_multiplicities().ok_or_else(|| {
                Error::UnsupportedShape(format!("sphere integral in dimension {n} needs a product system"))
            })?;
            let mut prod = Estimate::exact(1.0);
            for k in ks {
                let f = |x: f64| (2f64.sqrt() * x).abs().powf(2.0 * k) * (-0.5 * x * x).exp();
                let half = integrate_line(&f, 0.0, f64::INFINITY, 1.0, cfg)?;
                prod = prod.mul(half.estimate().scale(2.0));
            }
            let d = rs.effective_dimension();
            let radial = ((d / 2.0 - 1.0) * 2f64.ln() + ln_gamma(d / 2.0)).exp();
            Ok(prod.scale(1.0 / radial))
        }
    }
}

/// Weighted perimeter `p(Ω) = ∫_{∂Ω} w_k dσ` for balls, boxes and chamber
/// balls. For chamber balls only the spherical part is counted.
pub fn perimeter(rs: &RootSystem, domain: &Domain, cfg: &QuadConfig) -> Result<Estimate> {
    domain.validate(rs)?;
    let n = rs.dimension();
    let w = |x: &[f64]| rs.weight(x);
    match (n, domain) {
        (_, Domain::FullSpace | Domain::Chamber { .. }) => {
            Err(Error::UnsupportedShape("perimeter of an unbounded domain".into()))
        }
        (1, Domain::Ball { radius }) => Ok(Estimate::exact(w(&[*radius]) + w(&[-radius]))),
        (1, Domain::ChamberBall { chamber, radius }) => {
            let s = f64::from(rs.chambers()[*chamber].signs[0]) * rs.roots()[0][0].signum();
            Ok(Estimate::exact(w(&[s * radius])))
        }
        (1, Domain::Box { lo, hi }) => Ok(Estimate::exact(w(&[lo[0]]) + w(&[hi[0]]))),
        (2, Domain::Ball { radius }) | (2, Domain::ChamberBall { radius, .. }) => {
            let filter = match domain {
                Domain::ChamberBall { chamber, .. } => Some(*chamber),
                _ => None,
            };
            let regions = sectors(rs)
                .iter()
                .filter(|s| filter.is_none_or(|c| c == s.chamber))
                .map(|s| Region {
                    chart: Arc::new(Chart::Arc { radius: *radius }),
                    lo: smallvec::smallvec![s.theta0],
                    hi: smallvec::smallvec![s.theta1],
                })
                .collect();
            Ok(run_regions(regions, 2, &w, 1.0, cfg)?.0.estimate())
        }
        (2, Domain::Box { lo, hi }) => {
            let c = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
            let mut regions = Vec::new();
            for i in 0..4 {
                let a: Vector = c[i].iter().copied().collect();
                let b: Vector = c[(i + 1) % 4].iter().copied().collect();
                let mut cuts = vec![0.0, 1.0];
                for r in rs.roots() {
                    let (pa, pb) = (dot(r, &a), dot(r, &b));
                    if pa * pb < 0.0 {
                        cuts.push(pa / (pa - pb));
                    }
                }
                cuts.sort_by(f64::total_cmp);
                for win in cuts.windows(2) {
                    if win[1] > win[0] {
                        regions.push(Region {
                            chart: Arc::new(Chart::Segment { a: a.clone(), b: b.clone() }),
                            lo: smallvec::smallvec![win[0]],
                            hi: smallvec::smallvec![win[1]],
                        });
                    }
                }
            }
            let scale = (hi[0] - lo[0]).min(hi[1] - lo[1]);
            Ok(run_regions(regions, 2, &w, scale, cfg)?.0.estimate())
        }
        (_, Domain::Box { lo, hi }) => {
            if !rs.is_product() {
                return Err(Error::UnsupportedShape(format!("box perimeter in dimension {n} needs a product system")));
            }
            let mut regions = Vec::new();
            for axis in 0..n {
                for value in [lo[axis], hi[axis]] {
                    let flo: Vec<f64> = (0..n).filter(|&i| i != axis).map(|i| lo[i]).collect();
                    let fhi: Vec<f64> = (0..n).filter(|&i| i != axis).map(|i| hi[i]).collect();
                    for r in orthant_boxes(&flo, &fhi) {
                        regions.push(Region { chart: Arc::new(Chart::Face { axis, value }), lo: r.lo, hi: r.hi });
                    }
                }
            }
            let scale = lo.iter().zip(hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
            Ok(run_regions(regions, n, &w, scale, cfg)?.0.estimate())
        }
        _ => Err(Error::UnsupportedShape(format!("{domain:?} in dimension {n}"))),
    }
}
