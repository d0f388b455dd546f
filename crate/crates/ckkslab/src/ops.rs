//! Per-kernel modular-operation charges shared by the functional kernels and
//! the analytical cost model.
//!
//! Every charge is expressed per slot position (one coefficient index across
//! the limbs involved), so a kernel on a ring of degree N costs `N` times the
//! charge. The functional code records the charge of each kernel it actually
//! runs; the cost model sums the same charges symbolically.
//!
//! | kernel | mults | adds |
//! |---|---|---|
//! | NTT or iNTT, k limbs | k log2(N)/2 | k log2(N) |
//! | basis conversion, s to t limbs | s + t(s+2) | t s |
//! | ModDown tail, K limbs | K | K |
//! | Rescale, c limbs to c-1 | log2(N)/2 + (c-1)(log2(N)/2 + 3) | log2(N) + (c-1)(log2(N) + 1) |
//! | Decomp, k limbs | 2k | 0 |
//! | key inner product, beta digits on R limbs | 2 beta R | 2 (beta-1) R |
//! | tensor, k limbs | 4k | k |
//! | PModUp, k limbs | k | 0 |
//! | PRNG expansion, w words per slot | 0 | prng_ops * w |

use std::cell::Cell;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Charge {
    pub mults: f64,
    pub adds: f64,
}

impl Charge {
    pub const ZERO: Charge = Charge { mults: 0.0, adds: 0.0 };

    pub fn new(mults: f64, adds: f64) -> Self {
        Self { mults, adds }
    }

    pub fn total(&self) -> f64 {
        self.mults + self.adds
    }

    pub fn ntt(limbs: usize, log_n: u32) -> Self {
        let k = limbs as f64;
        Self::new(k * log_n as f64 / 2.0, k * log_n as f64)
    }

    pub fn conv(s: usize, t: usize) -> Self {
        let (s, t) = (s as f64, t as f64);
        Self::new(s + t * (s + 2.0), t * s)
    }

    pub fn moddown_tail(k: usize) -> Self {
        Self::new(k as f64, k as f64)
    }

    pub fn rescale(c: usize, log_n: u32) -> Self {
        let h = log_n as f64 / 2.0;
        let l = log_n as f64;
        let t = c as f64 - 1.0;
        Self::new(h + t * (h + 3.0), l + t * (l + 1.0))
    }

    pub fn decomp(limbs: usize) -> Self {
        Self::new(2.0 * limbs as f64, 0.0)
    }

    pub fn ksk_inner(beta: usize, r: usize) -> Self {
        let (b, r) = (beta as f64, r as f64);
        Self::new(2.0 * b * r, 2.0 * (b - 1.0) * r)
    }

    pub fn tensor(limbs: usize) -> Self {
        Self::new(4.0 * limbs as f64, limbs as f64)
    }

    pub fn pmodup(limbs: usize) -> Self {
        Self::new(limbs as f64, 0.0)
    }

    pub fn prng(words: f64, ops_per_word: f64) -> Self {
        Self::new(0.0, ops_per_word * words)
    }

    pub fn adds(limb_slots: usize) -> Self {
        Self::new(0.0, limb_slots as f64)
    }

    pub fn mults(limb_slots: usize) -> Self {
        Self::new(limb_slots as f64, 0.0)
    }
}

impl std::ops::Add for Charge {
    type Output = Charge;
    fn add(self, o: Charge) -> Charge {
        Charge::new(self.mults + o.mults, self.adds + o.adds)
    }
}

impl std::ops::AddAssign for Charge {
    fn add_assign(&mut self, o: Charge) {
        *self = *self + o;
    }
}

impl std::ops::Mul<f64> for Charge {
    type Output = Charge;
    fn mul(self, f: f64) -> Charge {
        Charge::new(self.mults * f, self.adds * f)
    }
}

/// Operations charged per expanded pseudorandom key word.
pub const PRNG_OPS_PER_WORD: f64 = 5.5;

thread_local! {
    static COUNTER: Cell<Charge> = const { Cell::new(Charge::ZERO) };
}

/// Records a kernel charge for a ring of degree `n`.
pub fn record(c: Charge, n: usize) {
    COUNTER.with(|k| k.set(k.get() + c * n as f64));
}

/// Returns the absolute counts accumulated on this thread and resets them.
pub fn take() -> Charge {
    COUNTER.with(|k| k.replace(Charge::ZERO))
}

pub fn peek() -> Charge {
    COUNTER.with(|k| k.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_accumulates_and_resets() {
        take();
        record(Charge::ntt(2, 4), 16);
        record(Charge::adds(3), 16);
        let c = take();
        assert_eq!(c.mults, 2.0 * 2.0 * 16.0);
        assert_eq!(c.adds, (8.0 + 3.0) * 16.0);
        assert_eq!(take(), Charge::ZERO);
    }

    #[test]
    fn rescale_charge_matches_composition() {
        let direct = Charge::rescale(5, 12);
        let composed = Charge::ntt(1, 12) + (Charge::ntt(1, 12) + Charge::new(3.0, 1.0)) * 4.0;
        assert_eq!(direct, composed);
    }
}
