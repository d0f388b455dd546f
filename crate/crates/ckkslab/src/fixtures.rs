//! Shipped presets and published reference values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bootstrap::{BootConfig, SineSpec};
use crate::ckks::ParamSpec;
use crate::cost::{BootPlan, ExternalRow, HardwareModel, LrWorkload, Model, OpId, OptimizationSet};

pub const PRESETS_TOML: &str = include_str!("../data/presets.toml");
pub const TARGETS_TOML: &str = include_str!("../data/targets.toml");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerProductShape {
    pub limbs: usize,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyEvalShape {
    pub degree: usize,
    pub baby: usize,
    pub limbs: usize,
}

/// Operation shapes evaluated for the application and bootstrapping rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostWorkload {
    pub level: usize,
    pub hrotate: usize,
    pub inner_product: InnerProductShape,
    pub poly_eval: PolyEvalShape,
    pub lr: LrWorkload,
    pub bootstrap: BootPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostPreset {
    pub description: String,
    pub log_n: u32,
    pub max_level: usize,
    pub dnum: usize,
    pub fft_iters: usize,
    pub flags: OptimizationSet,
    pub hardware: HardwareModel,
    pub workload: CostWorkload,
}

impl CostPreset {
    pub fn model(&self) -> Model {
        self.model_with(self.flags)
    }

    pub fn model_with(&self, flags: OptimizationSet) -> Model {
        Model::new(self.log_n, self.max_level, self.dnum, flags)
    }

    /// The operation a published row name refers to under this workload.
    pub fn op(&self, name: &str) -> Option<OpId> {
        let w = &self.workload;
        Some(match name {
            "HRotate" => OpId::HRotate { rotations: w.hrotate },
            "InnerProduct" => OpId::InnerProduct { limbs: w.inner_product.limbs, terms: w.inner_product.terms },
            "PolyEval" => {
                OpId::PolyEval { degree: w.poly_eval.degree, baby: w.poly_eval.baby, limbs: w.poly_eval.limbs }
            }
            "LrIteration" => OpId::LrIteration(w.lr),
            "Bootstrap" => OpId::Bootstrap(w.bootstrap.clone()),
            other => other.parse().ok()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkksPreset {
    pub description: String,
    #[serde(flatten)]
    pub spec: ParamSpec,
    #[serde(default)]
    pub sine: Option<SineSpec>,
}

impl CkksPreset {
    pub fn boot_config(&self) -> Option<BootConfig> {
        self.sine.clone().map(|sine| BootConfig { radices: self.spec.radices.clone(), sine, baby: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presets {
    pub cost: BTreeMap<String, CostPreset>,
    pub ckks: BTreeMap<String, CkksPreset>,
}

impl Presets {
    pub fn load() -> Result<Self, FixtureError> {
        Self::parse(PRESETS_TOML)
    }

    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        Ok(toml::from_str(text)?)
    }

    pub fn cost(&self, name: &str) -> Result<&CostPreset, FixtureError> {
        self.cost.get(name).ok_or_else(|| FixtureError::UnknownPreset(name.to_string()))
    }

    pub fn ckks(&self, name: &str) -> Result<&CkksPreset, FixtureError> {
        self.ckks.get(name).ok_or_else(|| FixtureError::UnknownPreset(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRowTarget {
    pub table: String,
    pub name: String,
    pub gop: f64,
    pub gmults: f64,
    pub gb: f64,
    pub reads_gb: f64,
    pub writes_gb: f64,
    pub key_gb: f64,
    pub ai: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedRowTarget {
    pub name: String,
    pub gop: f64,
    pub gb: f64,
    pub ai: f64,
    pub gated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementTarget {
    pub intensity: f64,
    pub dram: f64,
    pub min_intensity: f64,
    pub min_dram: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTarget {
    #[serde(flatten)]
    pub row: ExternalRow,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTargets {
    pub bandwidth: f64,
    pub rows: Vec<ComparisonTarget>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTarget {
    pub max_level: usize,
    pub dnum: usize,
    pub fft_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DramTargets {
    pub tolerance: f64,
    pub baseline_limb_ms: f64,
    pub baseline_slot_ms: f64,
    pub optimized_limb_ms: f64,
    pub optimized_slot_ms: f64,
    pub improvement_min: f64,
    pub improvement_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub tolerance: f64,
    pub cost_rows: Vec<CostRowTarget>,
    pub optimized_rows: Vec<OptimizedRowTarget>,
    pub improvement: ImprovementTarget,
    pub comparison: ComparisonTargets,
    pub search: SearchTarget,
    pub dram: DramTargets,
}

impl Targets {
    pub fn load() -> Result<Self, FixtureError> {
        Ok(toml::from_str(TARGETS_TOML)?)
    }

    /// Table names in file order.
    pub fn tables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.cost_rows {
            if !out.contains(&r.table) {
                out.push(r.table.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_parse() {
        let p = Presets::load().unwrap();
        let base = p.cost("baseline").unwrap();
        assert_eq!((base.log_n, base.max_level, base.dnum, base.fft_iters), (17, 35, 3, 3));
        assert_eq!(base.flags, OptimizationSet::empty());
        let best = p.cost("best-case").unwrap();
        assert_eq!((best.max_level, best.dnum, best.fft_iters), (40, 2, 6));
        assert_eq!(best.flags, OptimizationSet::all());
        assert!(p.ckks("toy-boot").unwrap().boot_config().is_some());
        assert!(p.ckks("toy").unwrap().boot_config().is_none());
        assert!(p.cost("nope").is_err());

        let t = Targets::load().unwrap();
        assert_eq!(t.tables(), vec!["auxiliary", "api", "applications", "bootstrapping"]);
        for r in t.cost_rows.iter().filter(|r| r.table != "bootstrapping") {
            assert!(base.op(&r.name).is_some(), "{}", r.name);
        }
    }
}
