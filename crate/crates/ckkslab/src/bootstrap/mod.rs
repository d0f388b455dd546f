//! Bootstrapping: modulus raise, CoeffToSlot, sine-based modular reduction
//! and SlotToCoeff.

pub mod dft;
pub mod matvec;
pub mod poly;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use dft::{DftPlan, DftStage, Direction};
pub use matvec::{pt_mat_vec, BsgsLayout};
pub use poly::{eval_chebyshev, SinePoly, SineSpec};

use crate::ckks::{Ciphertext, CkksError, CkksParams, Encoder, Evaluator, KeyRequest};
use crate::rns::RnsPoly;

/// Declarative bootstrapping configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootConfig {
    /// Radices of the transform stages, first applied first.
    pub radices: Vec<usize>,
    pub sine: SineSpec,
    /// Baby steps per stage; the square root of the diagonal span when unset.
    #[serde(default)]
    pub baby: Option<usize>,
}

/// A matrix stage together with its rotation layout.
#[derive(Debug, Clone)]
pub struct PlannedStage {
    pub stage: DftStage,
    pub layout: BsgsLayout,
}

fn plan_stages(plan: DftPlan, baby: Option<usize>) -> Vec<PlannedStage> {
    let slots = plan.slots;
    plan.stages
        .into_iter()
        .map(|stage| {
            let layout = BsgsLayout::new(slots, stage.step, &stage.shifts(), baby);
            PlannedStage { stage, layout }
        })
        .collect()
}

/// Precomputed transforms and the sine approximation for one parameter set.
#[derive(Debug, Clone)]
pub struct Bootstrapper {
    pub config: BootConfig,
    pub coeff_to_slot: Vec<PlannedStage>,
    pub slot_to_coeff: Vec<PlannedStage>,
    pub sine: SinePoly,
    encoder: Encoder,
}

impl Bootstrapper {
    pub fn new(params: &CkksParams, config: BootConfig) -> Result<Self, CkksError> {
        let encoder = Encoder::new(params);
        let n = params.slots();
        if config.radices.iter().product::<usize>() != n
            || config.radices.iter().any(|r| !r.is_power_of_two() || *r < 2)
        {
            return Err(CkksError::BadParams("radices must be powers of two multiplying to the slot count".into()));
        }
        let q0 = params.q(0) as f64;
        let k = config.sine.range;
        // CoeffToSlot yields (t_lo + i t_hi) / (2 q0 K) from a raised
        // ciphertext read at scale delta; the 1/n completes the inverse
        // transform.
        let c_in = Complex64::new(params.delta() / (2.0 * q0 * k * n as f64), 0.0);
        // SlotToCoeff maps 2 pi m / q0 back to m / delta.
        let c_out = Complex64::new(q0 / (2.0 * PI * params.delta()), 0.0);
        let cts = DftPlan::new(&encoder, Direction::CoeffToSlot, &config.radices, c_in);
        let stc = DftPlan::new(&encoder, Direction::SlotToCoeff, &config.radices, c_out);
        let b = Self {
            coeff_to_slot: plan_stages(cts, config.baby),
            slot_to_coeff: plan_stages(stc, config.baby),
            sine: SinePoly::new(config.sine.clone()),
            config,
            encoder,
        };
        if b.level_out(params) < 1 {
            return Err(CkksError::BadParams(format!("bootstrapping needs {} levels", b.depth() + 1)));
        }
        Ok(b)
    }

    pub fn depth(&self) -> usize {
        self.coeff_to_slot.len() + self.sine.depth() + self.slot_to_coeff.len()
    }

    /// Level of the bootstrapped ciphertext.
    pub fn level_out(&self, params: &CkksParams) -> i64 {
        params.max_level() as i64 - self.depth() as i64
    }

    /// Left-rotation amounts that need switching keys.
    pub fn rotations(&self) -> Vec<usize> {
        let mut r: Vec<usize> =
            self.coeff_to_slot.iter().chain(&self.slot_to_coeff).flat_map(|s| s.layout.rotations()).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Keys needed for bootstrapping, merged into `base`.
    pub fn key_request(&self, base: &KeyRequest) -> KeyRequest {
        let mut req = base.clone();
        req.relin = true;
        req.conjugate = true;
        req.rotations.extend(self.rotations().into_iter().map(|s| -(s as i64)));
        req.rotations.sort_unstable();
        req.rotations.dedup();
        req
    }

    /// Reinterprets a level-0 ciphertext modulo the full chain; the plaintext
    /// becomes t = m + q0 I for a small integer polynomial I.
    pub fn raise(&self, params: &CkksParams, ct: &Ciphertext) -> Ciphertext {
        let m0 = *params.chain().modulus(0);
        let basis = params.level_basis(params.max_level());
        let lift = |p: &RnsPoly| {
            let c = p.truncate(1).to_coeff();
            let centered: Vec<i128> = c.limb(0).iter().map(|&x| m0.center(x) as i128).collect();
            RnsPoly::from_signed(&basis, &centered).to_eval()
        };
        Ciphertext { a: lift(&ct.a), b: lift(&ct.b), scale: params.delta() }
    }

    pub fn coeff_to_slot(&self, ev: &Evaluator, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.apply_stages(ev, ct, &self.coeff_to_slot)
    }

    pub fn slot_to_coeff(&self, ev: &Evaluator, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.apply_stages(ev, ct, &self.slot_to_coeff)
    }

    fn apply_stages(&self, ev: &Evaluator, ct: &Ciphertext, stages: &[PlannedStage]) -> Result<Ciphertext, CkksError> {
        stages.iter().try_fold(ct.clone(), |x, s| pt_mat_vec(ev, &self.encoder, &x, &s.stage.diagonals, &s.layout))
    }

    /// Replaces each coefficient t = m + q0 I by approximately 2 pi m / q0,
    /// in the bit-reversed slot layout produced by CoeffToSlot.
    pub fn eval_mod(&self, ev: &Evaluator, y: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let yc = ev.conjugate(y)?;
        let re = ev.add(y, &yc)?;
        let im = ev.mul_i(&ev.sub(&yc, y)?);
        let re = self.sine.eval(ev, &re)?;
        let im = self.sine.eval(ev, &im)?;
        ev.add(&re, &ev.mul_i(&im))
    }

    /// Refreshes `ct` to a higher level while keeping its slot values.
    pub fn bootstrap(&self, ev: &Evaluator, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let low = ev.level_down(ct, 0)?;
        let raised = self.raise(ev.params, &low);
        let y = self.coeff_to_slot(ev, &raised)?;
        let v = self.eval_mod(ev, &y)?;
        let mut out = self.slot_to_coeff(ev, &v)?;
        out.scale *= ct.scale / ev.params.delta();
        Ok(out)
    }
}
