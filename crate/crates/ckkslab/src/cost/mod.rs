//! Analytical model of modular-operation counts and DRAM traffic, arithmetic
//! intensity, bootstrapping throughput and the parameter search.

pub mod boot;
pub mod hardware;
pub mod model;
pub mod opts;
pub mod schedule;
pub mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use boot::{AutoPlan, BootCost, BootPlan, ExplicitPlan};
pub use hardware::{external_comparison, throughput, CacheTier, ExternalRow, HardwareModel, ThroughputResult};
pub use model::{Counts, LrWorkload, Model};
pub use opts::{Flag, OptimizationSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("unknown operation '{0}'")]
    UnknownOp(String),
    #[error("unknown optimization flag '{0}'")]
    UnknownFlag(String),
    #[error("{flag} requires {needs}")]
    FlagDependency { flag: Flag, needs: Flag },
    #[error("{flag} needs a larger cache than the {tier:?} tier")]
    CacheTooSmall { flag: Flag, tier: CacheTier },
    #[error("bandwidth must be positive, got {0}")]
    BadBandwidth(f64),
    #[error("schedule leaves {level_out} levels")]
    Infeasible { level_out: i64 },
    #[error("level {level} is outside 1..={max}")]
    BadLevel { level: usize, max: usize },
    #[error("the search space is empty")]
    EmptySpace,
}

/// Absolute operation and byte totals of one modeled operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub name: String,
    pub total_ops: f64,
    pub total_mults: f64,
    pub dram_limb_reads: f64,
    pub dram_limb_writes: f64,
    pub dram_key_reads: f64,
    pub breakdown: Vec<(String, Counts)>,
}

impl CostReport {
    pub fn from_counts(name: &str, c: Counts, log_n: u32) -> Self {
        let n = (1u64 << log_n) as f64;
        let bytes = n * hardware::WORD_BYTES as f64;
        Self {
            name: name.to_string(),
            total_ops: c.op_count() * n,
            total_mults: c.m * n,
            dram_limb_reads: c.r * bytes,
            dram_limb_writes: c.w * bytes,
            dram_key_reads: c.k * bytes,
            breakdown: Vec::new(),
        }
    }

    pub fn with_breakdown(mut self, parts: Vec<(String, Counts)>) -> Self {
        self.breakdown = parts;
        self
    }

    pub fn total_dram(&self) -> f64 {
        self.dram_limb_reads + self.dram_limb_writes + self.dram_key_reads
    }

    /// Operations per byte of DRAM traffic; zero when nothing moves.
    pub fn arithmetic_intensity(&self) -> f64 {
        let d = self.total_dram();
        if d == 0.0 {
            0.0
        } else {
            self.total_ops / d
        }
    }

    pub fn gop(&self) -> f64 {
        self.total_ops / 1e9
    }

    pub fn gb(&self) -> f64 {
        self.total_dram() / 1e9
    }
}

/// The operations the model can account for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpId {
    ModUp,
    ModDown,
    Decomp,
    KskInnerProd,
    Automorph,
    PtAdd,
    Add,
    PtMult,
    Mult,
    Rotate,
    Conjugate,
    HRotate { rotations: usize },
    InnerProduct { limbs: usize, terms: usize },
    PolyEval { degree: usize, baby: usize, limbs: usize },
    LrIteration(LrWorkload),
    Bootstrap(BootPlan),
}

impl OpId {
    pub fn label(&self) -> &'static str {
        match self {
            OpId::ModUp => "ModUp",
            OpId::ModDown => "ModDown",
            OpId::Decomp => "Decomp",
            OpId::KskInnerProd => "KSKInnerProd",
            OpId::Automorph => "Automorph",
            OpId::PtAdd => "PtAdd",
            OpId::Add => "Add",
            OpId::PtMult => "PtMult",
            OpId::Mult => "Mult",
            OpId::Rotate => "Rotate",
            OpId::Conjugate => "Conjugate",
            OpId::HRotate { .. } => "HRotate",
            OpId::InnerProduct { .. } => "InnerProduct",
            OpId::PolyEval { .. } => "PolyEval",
            OpId::LrIteration(_) => "LrIteration",
            OpId::Bootstrap(_) => "Bootstrap",
        }
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parses the argument-free operation names.
impl FromStr for OpId {
    type Err = CostError;
    fn from_str(s: &str) -> Result<Self, CostError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "modup" => OpId::ModUp,
            "moddown" => OpId::ModDown,
            "decomp" => OpId::Decomp,
            "kskinnerprod" | "ksk" => OpId::KskInnerProd,
            "automorph" => OpId::Automorph,
            "ptadd" => OpId::PtAdd,
            "add" => OpId::Add,
            "ptmult" => OpId::PtMult,
            "mult" => OpId::Mult,
            "rotate" => OpId::Rotate,
            "conjugate" => OpId::Conjugate,
            _ => return Err(CostError::UnknownOp(s.to_string())),
        })
    }
}

/// Accounts for `op` on a ciphertext at `level` (key switches then work on
/// `level + 1` limbs).
pub fn cost_of(op: &OpId, model: &Model, level: usize) -> Result<CostReport, CostError> {
    if level == 0 || level > model.max_level {
        return Err(CostError::BadLevel { level, max: model.max_level });
    }
    let c = level + 1;
    let cc = model.cc(c);
    let rr = model.raised(c);
    let name = op.label();
    let counts = match op {
        OpId::ModUp => model.mod_up(model.alpha, rr - model.alpha),
        OpId::ModDown => model.mod_down(rr, model.alpha),
        OpId::Decomp => model.decomp(cc),
        OpId::KskInnerProd => model.ksk(c, rr, false),
        OpId::Automorph => model.automorph(2 * cc),
        OpId::PtAdd => model.pt_add(cc),
        OpId::Add => model.add(cc),
        OpId::PtMult => model.pt_mult(cc),
        OpId::Mult => model.mult(c),
        OpId::Rotate | OpId::Conjugate => model.rotate(c),
        OpId::HRotate { rotations } => model.hrotate(c, *rotations),
        OpId::InnerProduct { limbs, terms } => model.inner_product(*limbs, *terms),
        OpId::PolyEval { degree, baby, limbs } => model.poly_eval(*degree, *baby, *limbs, 0).0,
        OpId::LrIteration(w) => model.lr_iteration(w),
        OpId::Bootstrap(plan) => {
            let b = model.bootstrap(plan)?;
            let parts = vec![
                ("ModUp".to_string(), b.raise),
                ("CoeffToSlot".to_string(), b.coeff_to_slot),
                ("PolyEval".to_string(), b.sine),
                ("SlotToCoeff".to_string(), b.slot_to_coeff),
            ];
            return Ok(CostReport::from_counts(name, b.total(), model.log_n).with_breakdown(parts));
        }
    };
    Ok(CostReport::from_counts(name, counts, model.log_n))
}

/// Cost of a bootstrap with per-phase reports.
pub fn cost_of_bootstrap(model: &Model, plan: &BootPlan) -> Result<(CostReport, BootCost), CostError> {
    let b = model.bootstrap(plan)?;
    let parts = vec![
        ("ModUp".to_string(), b.raise),
        ("CoeffToSlot".to_string(), b.coeff_to_slot),
        ("PolyEval".to_string(), b.sine),
        ("SlotToCoeff".to_string(), b.slot_to_coeff),
    ];
    Ok((CostReport::from_counts("Bootstrap", b.total(), model.log_n).with_breakdown(parts), b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_op_is_rejected() {
        assert!(matches!("frobnicate".parse::<OpId>(), Err(CostError::UnknownOp(_))));
        assert_eq!("Mult".parse::<OpId>().unwrap(), OpId::Mult);
    }

    #[test]
    fn report_identities() {
        let m = Model::new(17, 35, 3, OptimizationSet::empty());
        let r = cost_of(&OpId::Mult, &m, 35).unwrap();
        let ai = r.arithmetic_intensity();
        assert!((ai * r.total_dram() - r.total_ops).abs() <= 1e-9 * r.total_ops);
        assert!(cost_of(&OpId::Mult, &m, 36).is_err());
    }
}
