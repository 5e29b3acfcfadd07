//! Root systems, their reflection groups, Weyl chambers and the Dunkl weight.
//!
//! Every positive root is stored with squared length 2, so the reflection in
//! `α` is `x − ⟨α,x⟩α` and the weight is `w_k(x) = Π |⟨α,x⟩|^{2k_α}`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{dot, norm, Error, Result, Vector};

/// Default cap on the number of group elements produced by closure.
pub const GROUP_CAP: usize = 1024;

const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    /// `Z_2^N`: one root per coordinate axis.
    A1Product,
    A2,
    B2,
    /// Dihedral group of order `2m` acting on the plane.
    #[serde(rename = "DIHEDRAL_M")]
    Dihedral,
    Custom,
}

/// Multiplicity input: a single value for all orbits or one value per orbit,
/// orbits numbered in order of first appearance among the positive roots.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplicities {
    Uniform(f64),
    PerOrbit(Vec<f64>),
}

/// JSON form of a root system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub family: Family,
    pub dimension: usize,
    /// Keys are orbit indices (`"0"`, `"1"`, ...) or `"all"`.
    #[serde(default)]
    pub multiplicities: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl RootSystemSpec {
    pub fn multiplicities(&self) -> Result<Multiplicities> {
        if let Some(k) = self.multiplicities.get("all") {
            if self.multiplicities.len() > 1 {
                return Err(Error::Validation(
                    "`all` cannot be combined with per-orbit multiplicities".into(),
                ));
            }
            return Ok(Multiplicities::Uniform(*k));
        }
        if self.multiplicities.is_empty() {
            return Ok(Multiplicities::Uniform(0.0));
        }
        let mut ks = vec![None; self.multiplicities.len()];
        for (key, k) in &self.multiplicities {
            let i: usize = key
                .parse()
                .map_err(|_| Error::Validation(format!("bad multiplicity key `{key}`")))?;
            let slot = ks
                .get_mut(i)
                .ok_or_else(|| Error::Validation(format!("orbit index {i} is not contiguous")))?;
            *slot = Some(*k);
        }
        Ok(Multiplicities::PerOrbit(ks.into_iter().map(|k| k.unwrap()).collect()))
    }
}

/// Finite reflection group as an ordered list of orthogonal matrices.
#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    elements: Vec<DMatrix<f64>>,
}

impl ReflectionGroup {
    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn apply(&self, g: usize, x: &[f64]) -> Vector {
        let m = &self.elements[g];
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
            .collect()
    }
}

/// Sign pattern `ε` of a Weyl chamber, one entry per positive root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChamberSign {
    pub signs: Vec<i8>,
}

impl ChamberSign {
    pub fn contains(&self, rs: &RootSystem, x: &[f64]) -> bool {
        rs.roots
            .iter()
            .zip(&self.signs)
            .all(|(a, &s)| dot(a, x) * f64::from(s) >= 0.0)
    }

    pub fn label(&self) -> String {
        self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    dimension: usize,
    roots: Vec<Vector>,
    orbit_of: Vec<usize>,
    orbit_k: Vec<f64>,
    dihedral_m: Option<usize>,
    group: ReflectionGroup,
    chambers: Vec<ChamberSign>,
}

/// Compact serializable description used in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSystemSummary {
    pub family: Family,
    pub dimension: usize,
    pub positive_roots: Vec<Vec<f64>>,
    pub multiplicities: Vec<f64>,
    pub gamma: f64,
    pub effective_dimension: f64,
    pub group_order: usize,
}

/// `σ_α x = x − 2⟨α,x⟩/⟨α,α⟩ α`.
pub fn reflect(root: &[f64], x: &[f64]) -> Result<Vector> {
    let aa = dot(root, root);
    if aa == 0.0 {
        return Err(Error::ZeroRoot);
    }
    let c = 2.0 * dot(root, x) / aa;
    Ok(x.iter().zip(root).map(|(xi, ai)| xi - c * ai).collect())
}

fn reflection_matrix(a: &[f64]) -> DMatrix<f64> {
    let n = a.len();
    let aa = dot(a, a);
    DMatrix::from_fn(n, n, |i, j| f64::from(u8::from(i == j)) - 2.0 * a[i] * a[j] / aa)
}

fn matrix_key(m: &DMatrix<f64>) -> Vec<i64> {
    m.iter().map(|v| (v * 1e7).round() as i64).collect()
}

/// Closure of the reflections in `roots` under matrix product.
pub fn generate_group(roots: &[Vector], dimension: usize, cap: usize) -> Result<ReflectionGroup> {
    let gens: Vec<DMatrix<f64>> = roots.iter().map(|a| reflection_matrix(a)).collect();
    let id = DMatrix::<f64>::identity(dimension, dimension);
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(matrix_key(&id), 0);
    let mut elements = vec![id];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in &gens {
            let next = g * &current;
            let key = matrix_key(&next);
            if seen.contains_key(&key) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::ClosureOverflow { cap });
            }
            seen.insert(key, elements.len());
            elements.push(next);
        }
    }
    elements.sort_by_cached_key(matrix_key);
    elements.reverse();
    Ok(ReflectionGroup { elements })
}

fn normalize(v: &[f64]) -> Result<Vector> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroRoot);
    }
    let s = 2f64.sqrt() / n;
    Ok(v.iter().map(|x| x * s).collect())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn parallel(a: &[f64], b: &[f64]) -> bool {
    let neg: Vector = b.iter().map(|x| -x).collect();
    close(a, b, CLOSURE_TOL) || close(a, &neg, CLOSURE_TOL)
}

/// A vector off every root hyperplane, used to pick positive systems and
/// sample chambers. Deterministic.
fn generic_vector(roots: &[Vector], dimension: usize) -> Vector {
    let mut shift = 0.0;
    loop {
        let v: Vector = (0..dimension)
            .map(|i| 1.0 / (i as f64 + 2f64.sqrt() + shift) + 0.1 * (i as f64 + 1.0).ln())
            .collect();
        if roots.iter().all(|a| dot(a, &v).abs() > 1e-6) {
            return v;
        }
        shift += 0.137;
    }
}

impl RootSystem {
    /// `Z_2^N` with one multiplicity per coordinate (or one shared value).
    pub fn a1_product(dimension: usize, k: Multiplicities) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        let roots = (0..dimension)
            .map(|i| (0..dimension).map(|j| if i == j { 2f64.sqrt() } else { 0.0 }).collect())
            .collect();
        Self::assemble(Family::A1Product, dimension, roots, k, None)
    }

    pub fn a2(k: f64) -> Result<Self> {
        let s = 3f64.sqrt() / 2.0;
        let roots = vec![vec![1.0, 0.0], vec![-0.5, s], vec![0.5, s]];
        Self::from_raw(Family::A2, 2, roots, Multiplicities::Uniform(k), None)
    }

    /// `B_2` with multiplicity `k_short` on `±e_i` and `k_long` on `±e_1 ± e_2`.
    pub fn b2(k_short: f64, k_long: f64) -> Result<Self> {
        let roots = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, -1.0]];
        Self::from_raw(Family::B2, 2, roots, Multiplicities::PerOrbit(vec![k_short, k_long]), None)
    }

    /// Dihedral system `I_2(m)`: roots at angles `jπ/m`, `j < m`.
    pub fn dihedral(m: usize, k: Multiplicities) -> Result<Self> {
        if m < 3 {
            return Err(Error::Validation(format!("dihedral order must be at least 3, got {m}")));
        }
        let roots = (0..m)
            .map(|j| {
                let t = j as f64 * PI / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Self::from_raw(Family::Dihedral, 2, roots, k, Some(m))
    }

    /// Arbitrary root list. Both `α` and `−α` may be given; a positive system
    /// is chosen by a generic vector and parallel duplicates are merged.
    pub fn custom(dimension: usize, roots: Vec<Vec<f64>>, k: Multiplicities) -> Result<Self> {
        Self::from_raw(Family::Custom, dimension, roots, k, None)
    }

    pub fn from_spec(spec: &RootSystemSpec) -> Result<Self> {
        let k = spec.multiplicities()?;
        match spec.family {
            Family::A1Product => Self::a1_product(spec.dimension, k),
            Family::A2 => Self::a2(uniform_or_single(&k)?),
            Family::B2 => match k {
                Multiplicities::Uniform(k) => Self::b2(k, k),
                Multiplicities::PerOrbit(v) if v.len() == 2 => Self::b2(v[0], v[1]),
                _ => Err(Error::Validation("B2 takes two orbit multiplicities".into())),
            },
            Family::Dihedral => {
                let m = spec
                    .m
                    .ok_or_else(|| Error::Validation("DIHEDRAL_M requires `m`".into()))?;
                Self::dihedral(m, k)
            }
            Family::Custom => {
                let roots = spec
                    .roots
                    .clone()
                    .ok_or_else(|| Error::Validation("CUSTOM requires explicit roots".into()))?;
                Self::custom(spec.dimension, roots, k)
            }
        }
    }

    pub fn to_spec(&self) -> RootSystemSpec {
        let multiplicities = self
            .orbit_k
            .iter()
            .enumerate()
            .map(|(i, k)| (i.to_string(), *k))
            .collect();
        let roots = (self.family == Family::Custom)
            .then(|| self.roots.iter().map(|r| r.to_vec()).collect());
        RootSystemSpec {
            family: self.family,
            dimension: self.dimension,
            multiplicities,
            roots,
            m: self.dihedral_m,
        }
    }

    fn from_raw(
        family: Family,
        dimension: usize,
        raw: Vec<Vec<f64>>,
        k: Multiplicities,
        dihedral_m: Option<usize>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        let mut roots: Vec<Vector> = Vec::new();
        for r in &raw {
            if r.len() != dimension {
                return Err(Error::Validation(format!(
                    "root {r:?} does not have dimension {dimension}"
                )));
            }
            let a = normalize(r)?;
            if !roots.iter().any(|b| parallel(&a, b)) {
                roots.push(a);
            }
        }
        if roots.is_empty() {
            return Err(Error::Validation("at least one root is required".into()));
        }
        let v = generic_vector(&roots, dimension);
        for a in roots.iter_mut() {
            if dot(a, &v) < 0.0 {
                a.iter_mut().for_each(|x| *x = -*x);
            }
        }
        for a in &roots {
            for b in &roots {
                let s = reflect(a, b)?;
                if !roots.iter().any(|c| parallel(&s, c)) {
                    return Err(Error::NonClosedSystem);
                }
            }
        }
        Self::assemble(family, dimension, roots, k, dihedral_m)
    }

    fn assemble(
        family: Family,
        dimension: usize,
        roots: Vec<Vector>,
        k: Multiplicities,
        dihedral_m: Option<usize>,
    ) -> Result<Self> {
        let group = generate_group(&roots, dimension, GROUP_CAP)?;
        let mut orbit_of = vec![usize::MAX; roots.len()];
        let mut n_orbits = 0;
        for i in 0..roots.len() {
            if orbit_of[i] != usize::MAX {
                continue;
            }
            orbit_of[i] = n_orbits;
            for g in 0..group.order() {
                let image = group.apply(g, &roots[i]);
                for j in i + 1..roots.len() {
                    if orbit_of[j] == usize::MAX && parallel(&image, &roots[j]) {
                        orbit_of[j] = n_orbits;
                    }
                }
            }
            n_orbits += 1;
        }
        let orbit_k = match k {
            Multiplicities::Uniform(k) => vec![k; n_orbits],
            Multiplicities::PerOrbit(v) if v.len() == 1 => vec![v[0]; n_orbits],
            Multiplicities::PerOrbit(v) if v.len() == n_orbits => v,
            Multiplicities::PerOrbit(v) => {
                return Err(Error::Validation(format!(
                    "{} multiplicities given for {n_orbits} root orbits",
                    v.len()
                )))
            }
        };
        if let Some(&bad) = orbit_k.iter().find(|k| !(**k >= 0.0) || !k.is_finite()) {
            return Err(Error::NegativeMultiplicity(bad));
        }
        let mut rs = Self {
            family,
            dimension,
            roots,
            orbit_of,
            orbit_k,
            dihedral_m,
            group,
            chambers: Vec::new(),
        };
        rs.chambers = rs.enumerate_chambers();
        Ok(rs)
    }

    fn enumerate_chambers(&self) -> Vec<ChamberSign> {
        let x0 = generic_vector(&self.roots, self.dimension);
        let mut out: Vec<ChamberSign> = (0..self.group.order())
            .map(|g| self.sign_pattern(&self.group.apply(g, &x0)))
            .collect();
        out.sort();
        out.dedup();
        out.reverse();
        out
    }

    fn sign_pattern(&self, x: &[f64]) -> ChamberSign {
        ChamberSign {
            signs: self
                .roots
                .iter()
                .map(|a| if dot(a, x) >= 0.0 { 1 } else { -1 })
                .collect(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn roots(&self) -> &[Vector] {
        &self.roots
    }

    pub fn dihedral_m(&self) -> Option<usize> {
        self.dihedral_m
    }

    /// Multiplicity attached to positive root `i`.
    pub fn k(&self, i: usize) -> f64 {
        self.orbit_k[self.orbit_of[i]]
    }

    pub fn multiplicities(&self) -> Vec<f64> {
        (0..self.roots.len()).map(|i| self.k(i)).collect()
    }

    pub fn orbit_multiplicities(&self) -> &[f64] {
        &self.orbit_k
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    pub fn gamma(&self) -> f64 {
        (0..self.roots.len()).map(|i| self.k(i)).sum()
    }

    /// `d = N + 2γ`.
    pub fn effective_dimension(&self) -> f64 {
        self.dimension as f64 + 2.0 * self.gamma()
    }

    pub fn is_classical(&self) -> bool {
        self.orbit_k.iter().all(|&k| k == 0.0)
    }

    pub fn group(&self) -> &ReflectionGroup {
        &self.group
    }

    /// `|G|` as it enters the constant formulas: 1 when `k ≡ 0`.
    pub fn effective_group_order(&self) -> f64 {
        if self.is_classical() {
            1.0
        } else {
            self.group.order() as f64
        }
    }

    /// Weyl chambers, the fundamental (all `+`) chamber first.
    pub fn chambers(&self) -> &[ChamberSign] {
        &self.chambers
    }

    pub fn chamber_sign(&self, x: &[f64]) -> Result<ChamberSign> {
        let scale = norm(x);
        if self.roots.iter().any(|a| dot(a, x).abs() < 1e-12 * scale) || scale == 0.0 {
            return Err(Error::OnWall);
        }
        Ok(self.sign_pattern(x))
    }

    /// `w_k(x) = Π |⟨α,x⟩|^{2k_α}`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.roots
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let k = self.k(i);
                if k == 0.0 {
                    1.0
                } else {
                    dot(a, x).abs().powf(2.0 * k)
                }
            })
            .product()
    }

    pub fn reflect_root(&self, i: usize, x: &[f64]) -> Vector {
        let a = &self.roots[i];
        let mut nonzero = a.iter().enumerate().filter(|(_, v)| **v != 0.0);
        if let (Some((j, _)), None) = (nonzero.next(), nonzero.next()) {
            let mut y: Vector = x.into();
            y[j] = -y[j];
            return y;
        }
        let c = dot(a, x);
        x.iter().zip(&self.roots[i]).map(|(xi, ai)| xi - c * ai).collect()
    }

    /// Per-coordinate multiplicities when every root is a coordinate axis
    /// (a `Z_2^N` system, whatever family tag it was built under).
    pub fn product_multiplicities(&self) -> Option<Vec<f64>> {
        if self.roots.len() != self.dimension {
            return None;
        }
        let mut ks = vec![f64::NAN; self.dimension];
        for (i, a) in self.roots.iter().enumerate() {
            let axis = a.iter().position(|v| v.abs() > 1e-12)?;
            if a.iter().filter(|v| v.abs() > 1e-12).count() != 1 || !ks[axis].is_nan() {
                return None;
            }
            ks[axis] = self.k(i);
        }
        Some(ks)
    }

    pub fn is_product(&self) -> bool {
        self.product_multiplicities().is_some()
    }

    pub fn summary(&self) -> RootSystemSummary {
        RootSystemSummary {
            family: self.family,
            dimension: self.dimension,
            positive_roots: self.roots.iter().map(|r| r.to_vec()).collect(),
            multiplicities: self.multiplicities(),
            gamma: self.gamma(),
            effective_dimension: self.effective_dimension(),
            group_order: self.group.order(),
        }
    }

    /// Short human-readable label such as `A1_PRODUCT(N=1; k=1)`.
    pub fn label(&self) -> String {
        let ks: Vec<String> = self.orbit_k.iter().map(|k| format!("{k}")).collect();
        let fam = serde_json::to_value(self.family)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        match self.dihedral_m {
            Some(m) => format!("{fam}(m={m}; k={})", ks.join(",")),
            None => format!("{fam}(N={}; k={})", self.dimension, ks.join(",")),
        }
    }
}

fn uniform_or_single(k: &Multiplicities) -> Result<f64> {
    match k {
        Multiplicities::Uniform(k) => Ok(*k),
        Multiplicities::PerOrbit(v) if v.len() == 1 => Ok(v[0]),
        Multiplicities::PerOrbit(_) => Err(Error::Validation("this family has a single root orbit".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn builtins() -> Vec<RootSystem> {
        vec![
            RootSystem::a1_product(1, Multiplicities::Uniform(1.0)).unwrap(),
            RootSystem::a1_product(2, Multiplicities::PerOrbit(vec![1.0, 0.5])).unwrap(),
            RootSystem::a1_product(3, Multiplicities::Uniform(0.5)).unwrap(),
            RootSystem::a2(1.0).unwrap(),
            RootSystem::b2(1.0, 0.5).unwrap(),
            RootSystem::dihedral(5, Multiplicities::Uniform(0.7)).unwrap(),
            RootSystem::dihedral(6, Multiplicities::PerOrbit(vec![0.3, 1.2])).unwrap(),
        ]
    }

    #[test]
    fn a1_single_root() {
        let rs = RootSystem::a1_product(1, Multiplicities::Uniform(1.0)).unwrap();
        assert_eq!(rs.roots().len(), 1);
        assert!((rs.roots()[0][0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(rs.gamma(), 1.0);
        assert_eq!(rs.effective_dimension(), 3.0);
        assert_eq!(rs.group().order(), 2);
        assert!((rs.weight(&[1.0]) - 2.0).abs() < 1e-14);
        assert_eq!(rs.reflect_root(0, &[0.7])[0], -0.7);
    }

    #[test]
    fn a2_and_b2_orders() {
        let a2 = RootSystem::a2(1.0).unwrap();
        assert_eq!(a2.roots().len(), 3);
        assert_eq!(a2.gamma(), 3.0);
        assert_eq!(a2.effective_dimension(), 8.0);
        assert_eq!(a2.group().order(), 6);
        assert_eq!(a2.orbit_multiplicities().len(), 1);

        let b2 = RootSystem::b2(1.0, 0.5).unwrap();
        assert_eq!(b2.roots().len(), 4);
        assert_eq!(b2.gamma(), 3.0);
        assert_eq!(b2.group().order(), 8);
        assert_eq!(b2.orbit_multiplicities(), &[1.0, 0.5]);
        assert_eq!(b2.k(0), 1.0);
        assert_eq!(b2.k(2), 0.5);
    }

    #[test]
    fn dihedral_orbits_follow_parity() {
        let odd = RootSystem::dihedral(5, Multiplicities::Uniform(1.0)).unwrap();
        assert_eq!(odd.orbit_multiplicities().len(), 1);
        assert_eq!(odd.group().order(), 10);
        let even = RootSystem::dihedral(6, Multiplicities::PerOrbit(vec![1.0, 2.0])).unwrap();
        assert_eq!(even.group().order(), 12);
        for i in 0..6 {
            assert_eq!(even.orbit_of(i), i % 2);
        }
    }

    #[test]
    fn custom_systems() {
        let rs = RootSystem::custom(
            2,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 3.0]],
            Multiplicities::Uniform(1.0),
        )
        .unwrap();
        assert_eq!(rs.roots().len(), 2);
        assert!(rs.is_product());
        let bad = RootSystem::custom(2, vec![vec![1.0, 0.0], vec![1.0, 1.0]], Multiplicities::Uniform(1.0));
        assert!(matches!(bad, Err(Error::NonClosedSystem)));
        let neg = RootSystem::a2(-1.0);
        assert!(matches!(neg, Err(Error::NegativeMultiplicity(_))));
    }

    #[test]
    fn reflect_basics() {
        let a = [1.0, 2.0];
        let r = reflect(&a, &a).unwrap();
        assert!(close(&r, &[-1.0, -2.0], 1e-15));
        let fixed = reflect(&a, &[2.0, -1.0]).unwrap();
        assert!(close(&fixed, &[2.0, -1.0], 1e-15));
        assert!(matches!(reflect(&[0.0, 0.0], &a), Err(Error::ZeroRoot)));
    }

    #[test]
    fn chamber_signs() {
        let a1 = RootSystem::a1_product(1, Multiplicities::Uniform(1.0)).unwrap();
        assert_eq!(a1.chamber_sign(&[1.0]).unwrap().signs, vec![1]);
        let a11 = RootSystem::a1_product(2, Multiplicities::Uniform(1.0)).unwrap();
        assert_eq!(a11.chamber_sign(&[1.0, -1.0]).unwrap().signs, vec![1, -1]);
        assert!(matches!(a11.chamber_sign(&[1.0, 0.0]), Err(Error::OnWall)));
    }

    #[test]
    fn group_is_closed_and_orthogonal() {
        for rs in builtins() {
            let g = rs.group().elements();
            let n = rs.dimension();
            assert!(g.iter().any(|m| (m - DMatrix::<f64>::identity(n, n)).amax() < 1e-12));
            for a in g {
                assert!((a.transpose() * a - DMatrix::<f64>::identity(n, n)).amax() < 1e-9);
                for b in g {
                    let p = a * b;
                    assert!(g.iter().any(|c| (c - &p).amax() < 1e-9));
                }
            }
        }
    }

    #[test]
    fn chamber_census_equals_group_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for rs in builtins() {
            assert_eq!(rs.chambers().len(), rs.group().order());
            assert!(rs.chambers()[0].signs.iter().all(|&s| s == 1));
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..rs.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if let Ok(c) = rs.chamber_sign(&x) {
                    seen.insert(c);
                }
            }
            assert_eq!(seen.len(), rs.group().order(), "{}", rs.label());
        }
    }

    #[test]
    fn weight_edge_cases() {
        let a2 = RootSystem::a2(1.0).unwrap();
        assert_eq!(a2.weight(&[0.0, 0.0]), 0.0);
        let flat = RootSystem::b2(0.0, 0.0).unwrap();
        assert_eq!(flat.weight(&[0.3, -2.0]), 1.0);
        assert_eq!(flat.effective_group_order(), 1.0);
    }

    #[test]
    fn spec_round_trip() {
        for rs in builtins() {
            let spec = rs.to_spec();
            let json = serde_json::to_string(&spec).unwrap();
            let back: RootSystemSpec = serde_json::from_str(&json).unwrap();
            let rebuilt = RootSystem::from_spec(&back).unwrap();
            assert_eq!(rebuilt.summary(), rs.summary());
        }
    }

    fn arb_system() -> impl Strategy<Value = RootSystem> {
        (0usize..5, 0.0f64..2.0, 0.0f64..2.0).prop_map(|(which, k1, k2)| match which {
            0 => RootSystem::a1_product(2, Multiplicities::PerOrbit(vec![k1, k2])).unwrap(),
            1 => RootSystem::a2(k1).unwrap(),
            2 => RootSystem::b2(k1, k2).unwrap(),
            3 => RootSystem::dihedral(5, Multiplicities::Uniform(k1)).unwrap(),
            _ => RootSystem::a1_product(3, Multiplicities::Uniform(k2)).unwrap(),
        })
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(
            a in proptest::collection::vec(-3.0f64..3.0, 3),
            x in proptest::collection::vec(-10.0f64..10.0, 3),
        ) {
            prop_assume!(norm(&a) > 1e-3);
            let back = reflect(&a, &reflect(&a, &x).unwrap()).unwrap();
            prop_assert!(close(&back, &x, 1e-12 * (1.0 + norm(&x))));
        }

        #[test]
        fn weight_is_invariant_and_homogeneous(
            rs in arb_system(),
            x in proptest::collection::vec(-2.0f64..2.0, 3),
            t in prop_oneof![Just(0.5), Just(2.0), Just(10.0)],
        ) {
            let x = &x[..rs.dimension()];
            let w = rs.weight(x);
            prop_assume!(w > 1e-200);
            for g in 0..rs.group().order() {
                let gx = rs.group().apply(g, x);
                prop_assert!((rs.weight(&gx) - w).abs() <= 1e-10 * w);
            }
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            let expect = t.powf(2.0 * rs.gamma());
            prop_assert!((rs.weight(&tx) / w / expect - 1.0).abs() < 1e-10);
        }
    }
}
