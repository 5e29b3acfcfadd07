//! Suite configuration and the inline root-system shorthand.
//!
//! Shorthands: `a1:k=1`, `a1xN:k=k1,...,kN` (or a single shared `k`),
//! `a2:k=...`, `b2:k=k_short,k_long`, `i2m:m=5,k=...` (two values for even `m`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fields::{default_family, FieldCatalog, FieldRef};
use crate::quadrature::{log_grid, QuadConfig};
use crate::rearrange::RearrangeConfig;
use crate::rootsys::{Multiplicities, RootSystem, RootSystemSpec};
use crate::{Error, Result};

/// Parses an inline shorthand such as `b2:k=1,0.5`.
pub fn parse_shorthand(s: &str) -> Result<RootSystem> {
    let bad = |why: &str| Error::Validation(format!("root-system shorthand `{s}`: {why}"));
    let (head, tail) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
    let head = head.to_ascii_lowercase();
    let mut params: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for token in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let value = match token.split_once('=') {
            Some((key, value)) => {
                let key = key.trim().to_ascii_lowercase();
                params.entry(key.clone()).or_default();
                current = Some(key);
                value
            }
            None => token,
        };
        let key = current.as_ref().ok_or_else(|| bad("values must follow `key=`"))?;
        let v: f64 = value.trim().parse().map_err(|_| bad(&format!("`{value}` is not a number")))?;
        params.get_mut(key).unwrap().push(v);
    }
    let ks = params.remove("k").unwrap_or_else(|| vec![0.0]);
    let m = params.remove("m");
    if let Some(key) = params.keys().next() {
        return Err(bad(&format!("unknown parameter `{key}`")));
    }
    let single = |ks: &[f64]| -> Result<f64> {
        match ks {
            [k] => Ok(*k),
            _ => Err(bad("expected a single multiplicity")),
        }
    };
    let spread = |ks: Vec<f64>| if ks.len() == 1 { Multiplicities::Uniform(ks[0]) } else { Multiplicities::PerOrbit(ks) };
    match head.as_str() {
        "a1" => RootSystem::a1_product(1, Multiplicities::Uniform(single(&ks)?)),
        "a2" => RootSystem::a2(single(&ks)?),
        "b2" => match ks.as_slice() {
            [k] => RootSystem::b2(*k, *k),
            [a, b] => RootSystem::b2(*a, *b),
            _ => Err(bad("B2 takes one or two multiplicities")),
        },
        "i2m" => {
            let m = match m.as_deref() {
                Some([m]) if *m >= 3.0 && m.fract() == 0.0 => *m as usize,
                _ => return Err(bad("`m` must be an integer ≥ 3")),
            };
            RootSystem::dihedral(m, spread(ks))
        }
        h => {
            let n: usize = h
                .strip_prefix("a1x")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| bad("unknown family (expected a1, a1xN, a2, b2 or i2m)"))?;
            if ks.len() != 1 && ks.len() != n {
                return Err(bad(&format!("expected 1 or {n} multiplicities")));
            }
            RootSystem::a1_product(n, spread(ks))
        }
    }
}

/// A root system given inline (shorthand or JSON spec) or by a JSON file path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSystemSource {
    Text(String),
    Spec(RootSystemSpec),
}

impl RootSystemSource {
    pub fn resolve(&self) -> Result<RootSystem> {
        match self {
            RootSystemSource::Spec(spec) => RootSystem::from_spec(spec),
            RootSystemSource::Text(text) => {
                let path = Path::new(text);
                if path.extension().is_some_and(|e| e == "json") || (path.is_file() && !text.contains(':')) {
                    let spec: RootSystemSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    RootSystem::from_spec(&spec)
                } else {
                    parse_shorthand(text)
                }
            }
        }
    }
}

/// Log-spaced time grid `[min, max]` with `points` nodes; refinement doubles
/// the density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { min: 1e-2, max: 1e2, points: 9 }
    }
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        log_grid(self.min, self.max, self.points)
    }

    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelGrid {
    pub levels: usize,
    /// Lowest level as a fraction of `sup |f|`.
    pub floor: f64,
}

impl Default for LevelGrid {
    fn default() -> Self {
        Self { levels: 200, floor: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub root_system: RootSystemSource,
    /// Check names, or `["all"]`.
    pub checks: Vec<String>,
    /// Field specs understood by [`FieldCatalog`]; `default` expands to the
    /// standard family.
    pub family: Vec<String>,
    /// Seeded Gaussian mixtures in the standard family.
    pub mixtures: usize,
    pub seed: u64,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    pub t_grid: TimeGrid,
    pub level_grid: LevelGrid,
    pub quad_rel_tol: f64,
    /// Random points per field for pointwise checks.
    pub sample_points: usize,
    /// Seeded non-radial fields for the radial-supremum probe.
    pub probe_fields: usize,
    /// Seeded boxes for the isoperimetric check.
    pub iso_boxes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            root_system: RootSystemSource::Text("a1:k=1".into()),
            checks: vec!["all".into()],
            family: vec!["default".into()],
            mixtures: 3,
            seed: 42,
            tolerances: BTreeMap::new(),
            tol_scale: 1.0,
            t_grid: TimeGrid::default(),
            level_grid: LevelGrid::default(),
            quad_rel_tol: 1e-8,
            sample_points: 100,
            probe_fields: 200,
            iso_boxes: 20,
            out: None,
            csv: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if self.family.is_empty() {
            return fail("field family is empty".into());
        }
        if self.checks.is_empty() {
            return fail("no checks selected".into());
        }
        if let Some((name, t)) = self.tolerances.iter().find(|(_, t)| !(**t > 0.0)) {
            return fail(format!("tolerance for {name} must be positive, got {t}"));
        }
        if !(self.tol_scale > 0.0) {
            return fail(format!("tol_scale must be positive, got {}", self.tol_scale));
        }
        let g = &self.t_grid;
        if !(g.min > 0.0 && g.max > g.min && g.points >= 2) {
            return fail("t_grid needs 0 < min < max and at least two points".into());
        }
        if self.level_grid.levels < 2 || !(self.level_grid.floor > 0.0 && self.level_grid.floor < 1.0) {
            return fail("level_grid needs at least two levels and 0 < floor < 1".into());
        }
        if !(self.quad_rel_tol > 0.0) {
            return fail("quad_rel_tol must be positive".into());
        }
        if self.sample_points == 0 || self.probe_fields == 0 || self.iso_boxes == 0 {
            return fail("sample counts must be positive".into());
        }
        Ok(())
    }

    /// Tolerance for `check`, after overrides and scaling.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default) * self.tol_scale
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig::with_rel_tol(self.quad_rel_tol)
    }

    pub fn rearrange(&self) -> RearrangeConfig {
        RearrangeConfig { levels: self.level_grid.levels, floor: self.level_grid.floor, ..RearrangeConfig::default() }
    }

    /// The configured family, with `default` expanded using `mixtures` seeded mixtures.
    pub fn build_family(&self, rs: &RootSystem, mixtures: usize) -> Result<Vec<FieldRef>> {
        let catalog = FieldCatalog::default();
        let mut out = Vec::new();
        for spec in &self.family {
            if spec.trim() == "default" {
                out.extend(default_family(rs, self.seed, mixtures));
            } else {
                out.push(catalog.parse(spec, rs)?);
            }
        }
        if out.is_empty() {
            return Err(Error::Validation("field family is empty".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    #[test]
    fn shorthands() {
        let rs = parse_shorthand("a1:k=1").unwrap();
        assert_eq!((rs.dimension(), rs.gamma()), (1, 1.0));
        let rs = parse_shorthand("a1x3:k=1,0.5,0").unwrap();
        assert_eq!((rs.dimension(), rs.gamma()), (3, 1.5));
        assert_eq!(parse_shorthand("a1x2:k=2").unwrap().gamma(), 4.0);
        assert_eq!(parse_shorthand("a2:k=1").unwrap().effective_dimension(), 8.0);
        let b2 = parse_shorthand("b2:k=1,0.5").unwrap();
        assert_eq!((b2.family(), b2.gamma()), (Family::B2, 3.0));
        let i5 = parse_shorthand("i2m:m=5,k=0.5").unwrap();
        assert_eq!((i5.roots().len(), i5.gamma()), (5, 2.5));
        assert_eq!(parse_shorthand("i2m:m=6,k=1,0").unwrap().gamma(), 3.0);
        for bad in ["a3:k=1", "a1:k=1,2", "a1x2:k=1,2,3", "i2m:k=1", "a2:q=1", "b2:k=x", "a1:1"] {
            assert!(parse_shorthand(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = SuiteConfig::from_json(r#"{"root_system": "a2:k=1", "seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.checks, vec!["all".to_string()]);
        let back = SuiteConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let spec = r#"{"root_system": {"family": "B2", "dimension": 2, "multiplicities": {"0": 1, "1": 0.5}}}"#;
        assert_eq!(SuiteConfig::from_json(spec).unwrap().root_system.resolve().unwrap().gamma(), 3.0);
        assert!(SuiteConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = SuiteConfig { family: vec![], ..SuiteConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
        cfg.family = vec!["default".into()];
        cfg.tolerances.insert("NASH".into(), 0.0);
        assert!(cfg.validate().is_err());
        cfg.tolerances.insert("NASH".into(), 1e-3);
        cfg.tol_scale = 2.0;
        assert_eq!(cfg.tolerance("NASH", 1.0), 2e-3);
        assert_eq!(cfg.tolerance("OTHER", 1.0), 2.0);
        cfg.t_grid.points = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn family_expansion() {
        let rs = parse_shorthand("a1:k=1").unwrap();
        let cfg = SuiteConfig { family: vec!["default".into(), "bump:1.5,0.2".into()], ..SuiteConfig::default() };
        assert_eq!(cfg.build_family(&rs, 3).unwrap().len(), 9);
        let bad = SuiteConfig { family: vec!["nope".into()], ..SuiteConfig::default() };
        assert!(matches!(bad.build_family(&rs, 3), Err(Error::UnknownField(_))));
        assert_eq!(TimeGrid::default().refined().values().len(), 17);
    }
}
