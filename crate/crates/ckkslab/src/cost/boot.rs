//! Bootstrapping workloads for the cost model.

use serde::{Deserialize, Serialize};

use super::model::{Counts, Model};
use super::schedule::{bsgs_schedule, radices};
use super::CostError;

/// A fully specified bootstrapping schedule: radices of the DFT stages, the
/// baby-step count chosen for each stage and the limb counts the phases start
/// from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitPlan {
    pub radices: Vec<usize>,
    pub cts_baby: Vec<usize>,
    pub cts_extra_reads: usize,
    pub sine_baby: usize,
    pub sine_limbs: usize,
    pub squarings: usize,
    pub stc_limbs: usize,
    pub stc_baby: Vec<usize>,
    pub stc_extra_reads: usize,
}

/// A bootstrapping schedule derived from the parameters: radices from the
/// stage count and the traffic-optimal baby-step count per stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoPlan {
    pub fft_iters: usize,
    pub sine_baby: usize,
    pub squarings: usize,
    pub extra_reads: usize,
    pub log_slots: u32,
}

impl AutoPlan {
    pub fn new(fft_iters: usize, log_slots: u32) -> Self {
        Self { fft_iters, sine_baby: 4, squarings: 2, extra_reads: 1, log_slots }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BootPlan {
    Explicit(ExplicitPlan),
    Auto(AutoPlan),
}

pub const SINE_DEGREE: usize = 63;

#[derive(Debug, Clone, PartialEq)]
pub struct BootCost {
    pub raise: Counts,
    pub coeff_to_slot: Counts,
    pub sine: Counts,
    pub slot_to_coeff: Counts,
    /// Limbs left after bootstrapping, in the same convention as the
    /// published level counts.
    pub level_out: i64,
    pub baby_steps: Vec<usize>,
}

impl BootCost {
    pub fn total(&self) -> Counts {
        self.raise + self.coeff_to_slot + self.sine + self.slot_to_coeff
    }
}

impl Model {
    pub fn bootstrap(&self, plan: &BootPlan) -> Result<BootCost, CostError> {
        match plan {
            BootPlan::Explicit(p) => Ok(self.bootstrap_explicit(p)),
            BootPlan::Auto(p) => self.bootstrap_auto(p),
        }
    }

    fn bootstrap_explicit(&self, p: &ExplicitPlan) -> BootCost {
        let top = self.max_level + 1;
        let raise = Counts::io(0.0, 2.0 * top as f64);
        let mut cts = Counts::ZERO;
        for (i, (&r, &b)) in p.radices.iter().zip(&p.cts_baby).enumerate() {
            cts += self.pt_mat_vec(top - i, 2 * r - 1, b, p.cts_extra_reads);
        }
        let (sine, _) = self.poly_eval(SINE_DEGREE, p.sine_baby, p.sine_limbs, p.squarings);
        let mut stc = Counts::ZERO;
        for (i, (&r, &b)) in p.radices.iter().zip(&p.stc_baby).enumerate() {
            stc += self.pt_mat_vec(p.stc_limbs - i, 2 * r - 1, b, p.stc_extra_reads);
        }
        let mut baby = p.cts_baby.clone();
        baby.extend(&p.stc_baby);
        BootCost {
            raise,
            coeff_to_slot: cts,
            sine,
            slot_to_coeff: stc,
            level_out: p.stc_limbs as i64 - p.radices.len() as i64 - 1,
            baby_steps: baby,
        }
    }

    fn bootstrap_auto(&self, p: &AutoPlan) -> Result<BootCost, CostError> {
        let rads = radices(p.log_slots, p.fft_iters);
        let top = self.max_level + 1;
        let (_, probe) = bsgs_schedule(SINE_DEGREE, p.sine_baby, 1 << 20);
        let sine_depth = (1 << 20) - probe as usize + p.squarings;
        let out = top as i64 - 2 * rads.len() as i64 - sine_depth as i64 - 1;
        if out < 1 {
            return Err(CostError::Infeasible { level_out: out });
        }
        let raise = Counts::io(0.0, 2.0 * top as f64);
        let mut c = top;
        let mut baby = Vec::new();
        let stage = |c: &mut usize, baby: &mut Vec<usize>| {
            let mut acc = Counts::ZERO;
            for &r in &rads {
                let (x, b) = self.best_pt_mat_vec(*c, 2 * r - 1, p.extra_reads);
                acc += x;
                baby.push(b);
                *c -= 1;
            }
            acc
        };
        let cts = stage(&mut c, &mut baby);
        let (sine, after) = self.poly_eval(SINE_DEGREE, p.sine_baby, c, p.squarings);
        c = after;
        let stc = stage(&mut c, &mut baby);
        debug_assert_eq!(c as i64 - 1, out);
        Ok(BootCost { raise, coeff_to_slot: cts, sine, slot_to_coeff: stc, level_out: out, baby_steps: baby })
    }
}
