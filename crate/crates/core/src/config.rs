//! Run configuration shared by every CLI pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classical::UnitSystem;
use crate::error::{Error, Result};
use crate::spectral::Universality;

/// One JSON document; unspecified fields take the defaults below.
///
/// | field | default | meaning |
/// |---|---|---|
/// | `l_max` | 4 | largest angular degree in modes, decompositions and Fock modes |
/// | `n_max` | 3 | occupation cap per boson mode |
/// | `charge_bound` | 4 | charge window `[-M, M]` |
/// | `e` | 1 | elementary charge |
/// | `z` | 1 | ladder commutator `[c, c†] = z` |
/// | `c` | 1 | charge lattice factor, spectrum `c e ℤ` |
/// | `nu` | 0 | principal-series parameter |
/// | `psi_max` | 3 | ψ range `[-ψ_max, ψ_max]` |
/// | `psi_nodes` | 601 | ψ samples |
/// | `sphere_degree` | 24 | band limit of the Gauss–Legendre sphere grid |
/// | `unit_system` | gaussian | `gaussian` or `heaviside` |
/// | `output_dir` | `out` | where reports are written |
/// | `species` | `[1]` | species charges in units of `e` |
/// | `rapidity` | 1 | boost used by the boosted pipelines |
/// | `q` | 1 | source charge |
/// | `blob_radius` | 0.1 | extent of the retarded-integral source |
/// | `blob_cells` | 12 | cells per axis of the source grid |
/// | `universality` | strict | `strict` (equal magnitudes) or `lenient` (integer multiples) |
/// | `seed` | 0 | RNG seed |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub l_max: usize,
    pub n_max: usize,
    pub charge_bound: usize,
    pub e: f64,
    pub z: f64,
    pub c: f64,
    pub nu: f64,
    pub psi_max: f64,
    pub psi_nodes: usize,
    pub sphere_degree: usize,
    pub unit_system: UnitSystem,
    pub output_dir: PathBuf,
    pub species: Vec<f64>,
    pub rapidity: f64,
    pub q: f64,
    pub blob_radius: f64,
    pub blob_cells: usize,
    pub universality: Universality,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            l_max: 4,
            n_max: 3,
            charge_bound: 4,
            e: 1.0,
            z: 1.0,
            c: 1.0,
            nu: 0.0,
            psi_max: crate::desitter::DEFAULT_PSI_MAX,
            psi_nodes: crate::desitter::DEFAULT_PSI_NODES,
            sphere_degree: 24,
            unit_system: UnitSystem::Gaussian,
            output_dir: PathBuf::from("out"),
            species: vec![1.0],
            rapidity: 1.0,
            q: 1.0,
            blob_radius: 0.1,
            blob_cells: 12,
            universality: Universality::Strict,
            seed: 0,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Applies `key=value`; the value is parsed as JSON, or taken as a string.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (key, raw) = kv.split_once('=').ok_or_else(|| bad(format!("override `{kv}` is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self)?;
        let obj = doc.as_object_mut().expect("config serialises to an object");
        if !obj.contains_key(key) {
            return Err(bad(format!("unknown config key `{key}`")));
        }
        obj.insert(key.to_string(), value);
        *self = serde_json::from_value(doc).map_err(|e| bad(format!("override `{kv}`: {e}")))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_max < 1 {
            return Err(bad("l_max must be at least 1"));
        }
        if self.n_max < 1 || self.charge_bound < 1 {
            return Err(bad("n_max and charge_bound must be at least 1"));
        }
        for (name, v) in [("e", self.e), ("z", self.z), ("psi_max", self.psi_max), ("q", self.q.abs()), ("blob_radius", self.blob_radius)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("{name} must be positive and finite")));
            }
        }
        if !(self.c >= 1.0 && self.c.is_finite()) {
            return Err(bad("c must satisfy c ≥ 1"));
        }
        if !self.nu.is_finite() || !self.rapidity.is_finite() {
            return Err(bad("nu and rapidity must be finite"));
        }
        if self.psi_nodes < 3 || self.psi_nodes.is_multiple_of(2) {
            return Err(bad("psi_nodes must be odd and at least 3"));
        }
        if self.sphere_degree < self.l_max {
            return Err(bad("sphere_degree must be at least l_max"));
        }
        if self.blob_cells < 2 {
            return Err(bad("blob_cells must be at least 2"));
        }
        if self.species.is_empty() || self.species.iter().any(|s| *s == 0.0 || !s.is_finite()) {
            return Err(bad("species must be a non-empty list of non-zero charges"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        c.apply_override("l_max=2").unwrap();
        c.apply_override("species=[1,0.5]").unwrap();
        c.apply_override("unit_system=heaviside").unwrap();
        c.apply_override("output_dir=/tmp/x").unwrap();
        assert_eq!(c.l_max, 2);
        assert_eq!(c.species, vec![1.0, 0.5]);
        assert_eq!(c.unit_system, UnitSystem::Heaviside);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x"));
        assert!(c.apply_override("nope=1").is_err());
        assert!(c.apply_override("l_max=-1").is_err());
    }

    #[test]
    fn invalid_values() {
        assert!(RunConfig { l_max: 0, ..Default::default() }.validate().is_err());
        assert!(RunConfig { c: 0.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn partial_document_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"l_max": 3}"#).unwrap();
        assert_eq!(c.l_max, 3);
        assert_eq!(c.psi_nodes, 601);
        assert!(serde_json::from_str::<RunConfig>(r#"{"lmax": 3}"#).is_err());
    }
}
