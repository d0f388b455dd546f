use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::boot::{AutoPlan, BootPlan};
use super::hardware::throughput;
use super::model::Model;
use super::opts::OptimizationSet;
use super::schedule::radices;
use super::{CostError, CostReport};

/// The discrete bootstrapping parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub log_n: u32,
    pub log_slots: u32,
    pub dnum: RangeInclusive<usize>,
    pub max_level: RangeInclusive<usize>,
    pub fft_iters: RangeInclusive<usize>,
    /// Upper bound on L + 1 + alpha, the raised modulus in limbs, standing in
    /// for the security constraint.
    pub limb_budget: usize,
    pub precision_bits: f64,
    pub bandwidth: f64,
}

impl SearchSpace {
    pub fn standard() -> Self {
        Self {
            log_n: 17,
            log_slots: 16,
            dnum: 1..=6,
            max_level: 20..=60,
            fft_iters: 2..=8,
            limb_budget: 62,
            precision_bits: 19.0,
            bandwidth: 900e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchEntry {
    pub max_level: usize,
    pub dnum: usize,
    pub fft_iters: usize,
    pub radices: Vec<usize>,
    pub level_out: i64,
    pub baby_steps: Vec<usize>,
    pub gop: f64,
    pub dram_gb: f64,
    pub intensity: f64,
    pub throughput: f64,
}

fn evaluate(space: &SearchSpace, opts: OptimizationSet, l: usize, dnum: usize, it: usize) -> Option<SearchEntry> {
    let alpha = (l + 1).div_ceil(dnum);
    if l + 1 + alpha > space.limb_budget {
        return None;
    }
    let model = Model::new(space.log_n, l, dnum, opts);
    let b = model.bootstrap(&BootPlan::Auto(AutoPlan::new(it, space.log_slots))).ok()?;
    let report = CostReport::from_counts("Bootstrap", b.total(), space.log_n);
    let slots = (1u64 << space.log_slots) as f64;
    let t = throughput(slots, b.level_out as f64, space.precision_bits, report.total_dram(), space.bandwidth).ok()?;
    Some(SearchEntry {
        max_level: l,
        dnum,
        fft_iters: it,
        radices: radices(space.log_slots, it),
        level_out: b.level_out,
        baby_steps: b.baby_steps,
        gop: report.gop(),
        dram_gb: report.gb(),
        intensity: report.arithmetic_intensity(),
        throughput: t.throughput,
    })
}

/// Exhaustive search ranked by throughput, ties broken by smaller L, smaller
/// dnum and then the radix list.
pub fn param_search(space: &SearchSpace, opts: OptimizationSet) -> Result<Vec<SearchEntry>, CostError> {
    let mut out = Vec::new();
    for dnum in space.dnum.clone() {
        for l in space.max_level.clone() {
            for it in space.fft_iters.clone() {
                if let Some(e) = evaluate(space, opts, l, dnum, it) {
                    out.push(e);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(CostError::EmptySpace);
    }
    out.sort_by(|a, b| {
        b.throughput
            .total_cmp(&a.throughput)
            .then(a.max_level.cmp(&b.max_level))
            .then(a.dnum.cmp(&b.dnum))
            .then(a.radices.cmp(&b.radices))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_space() {
        let mut s = SearchSpace::standard();
        s.dnum = 2..=2;
        s.max_level = 40..=40;
        s.fft_iters = 6..=6;
        let r = param_search(&s, OptimizationSet::all()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].max_level, r[0].dnum, r[0].fft_iters), (40, 2, 6));
    }

    #[test]
    fn empty_space_is_an_error() {
        let mut s = SearchSpace::standard();
        s.limb_budget = 3;
        assert_eq!(param_search(&s, OptimizationSet::all()), Err(CostError::EmptySpace));
    }
}
