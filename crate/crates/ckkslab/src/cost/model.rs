//! Symbolic accounting of modular operations and DRAM limb traffic.
//!
//! All quantities are kept per slot position: `m` and `a` count modular
//! multiplications and additions per coefficient index, `r`, `w` and `k` count
//! limbs read, limbs written and key limbs read. A limb of a ring of degree N
//! holds N words, so a count scales by N for operations and by 8N for bytes.
//!
//! Two limb counts appear throughout. `c` is the number of limbs a key switch
//! works on and `cc = c - e` is the number of limbs a ciphertext at the same
//! level occupies in memory. The published tables are matched with `e = 1`;
//! the functional kernels, which keep the key-switch and ciphertext limbs
//! identical, are matched with `e = 0`.

use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Serialize};

use super::opts::{Flag, OptimizationSet};
use super::schedule::bsgs_schedule;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub m: f64,
    pub a: f64,
    pub r: f64,
    pub w: f64,
    pub k: f64,
}

impl Counts {
    pub const ZERO: Counts = Counts { m: 0.0, a: 0.0, r: 0.0, w: 0.0, k: 0.0 };

    pub fn ops(m: f64, a: f64) -> Self {
        Self { m, a, ..Self::ZERO }
    }

    pub fn io(r: f64, w: f64) -> Self {
        Self { r, w, ..Self::ZERO }
    }

    pub fn new(m: f64, a: f64, r: f64, w: f64, k: f64) -> Self {
        Self { m, a, r, w, k }
    }

    pub fn op_count(&self) -> f64 {
        self.m + self.a
    }

    pub fn dram_limbs(&self) -> f64 {
        self.r + self.w + self.k
    }
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts::new(self.m + o.m, self.a + o.a, self.r + o.r, self.w + o.w, self.k + o.k)
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl Mul<f64> for Counts {
    type Output = Counts;
    fn mul(self, f: f64) -> Counts {
        Counts::new(self.m * f, self.a * f, self.r * f, self.w * f, self.k * f)
    }
}

impl Mul<Counts> for f64 {
    type Output = Counts;
    fn mul(self, c: Counts) -> Counts {
        c * self
    }
}

/// Default PRNG expansion cost, modular additions per generated key word.
pub const DEFAULT_PRNG_OPS: f64 = 5.5;

/// The analytical model for one parameter set and optimization set.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub log_n: u32,
    pub max_level: usize,
    pub dnum: usize,
    pub alpha: usize,
    /// Limbs a key switch carries beyond the ciphertext's own (`c - cc`).
    pub extra_limbs: usize,
    pub prng_ops: f64,
    pub flags: OptimizationSet,
}

fn cdiv(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

impl Model {
    pub fn new(log_n: u32, max_level: usize, dnum: usize, flags: OptimizationSet) -> Self {
        assert!(dnum >= 1);
        Self {
            log_n,
            max_level,
            dnum,
            alpha: cdiv(max_level + 1, dnum),
            extra_limbs: 1,
            prng_ops: DEFAULT_PRNG_OPS,
            flags,
        }
    }

    pub fn with_extra_limbs(mut self, e: usize) -> Self {
        self.extra_limbs = e;
        self
    }

    pub fn degree(&self) -> f64 {
        (1u64 << self.log_n) as f64
    }

    fn on(&self, f: Flag) -> bool {
        self.flags.contains(f)
    }

    fn h(&self) -> f64 {
        self.log_n as f64 / 2.0
    }

    fn lg(&self) -> f64 {
        self.log_n as f64
    }

    pub fn beta(&self, c: usize) -> usize {
        cdiv(c, self.alpha)
    }

    /// Ciphertext limbs for a key-switch limb count.
    pub fn cc(&self, c: usize) -> usize {
        c - self.extra_limbs
    }

    pub fn raised(&self, c: usize) -> usize {
        c + self.alpha
    }

    pub fn ntt_ops(&self, k: usize) -> Counts {
        let k = k as f64;
        Counts::ops(k * self.h(), k * self.lg())
    }

    pub fn conv_ops(&self, s: usize, t: usize) -> Counts {
        let (s, t) = (s as f64, t as f64);
        Counts::ops(s + t * (s + 2.0), t * s)
    }

    /// Extends `sz` limbs by `t` new limbs.
    pub fn mod_up(&self, sz: usize, t: usize) -> Counts {
        let x = self.ntt_ops(sz) + self.conv_ops(sz, t) + self.ntt_ops(t);
        let (s, t) = (sz as f64, t as f64);
        // Alpha-limb caching keeps the intermediate iNTT output and the
        // conversion products on chip.
        if self.on(Flag::AlphaCaching) {
            return x + Counts::io(s, t);
        }
        // O(1)-limb fusion streams each limb once through the fused kernels.
        if self.on(Flag::FusionO1) {
            return x + Counts::io(2.0 * s, s + t);
        }
        x + Counts::io(2.0 * s + t, s + 2.0 * t)
    }

    /// Divides an `rr`-limb polynomial by the product of its last `d` limbs.
    pub fn mod_down(&self, rr: usize, d: usize) -> Counts {
        let kk = rr - d;
        let x = self.ntt_ops(d) + self.conv_ops(d, kk) + self.ntt_ops(kk) + Counts::ops(kk as f64, kk as f64);
        let (d, kk) = (d as f64, kk as f64);
        // With re-ordering the dropped limbs are produced first and consumed
        // in cache, so only the surviving limbs travel.
        if self.on(Flag::LimbReordering) {
            return x + Counts::io(kk, kk);
        }
        if self.on(Flag::AlphaCaching) {
            return x + Counts::io(d + kk, kk);
        }
        if self.on(Flag::FusionO1) {
            return x + Counts::io(2.0 * d + kk, d + kk);
        }
        x + Counts::io(2.0 * d + 2.0 * kk, d + 2.0 * kk)
    }

    pub fn rescale(&self, c: usize) -> Counts {
        let t = c as f64 - 1.0;
        Counts::new(self.h() + t * (self.h() + 3.0), self.lg() + t * (self.lg() + 1.0), c as f64, t, 0.0)
    }

    pub fn decomp(&self, c: usize) -> Counts {
        let x = Counts::ops(2.0 * c as f64, 0.0);
        if self.on(Flag::FusionO1) {
            x
        } else {
            x + Counts::io(c as f64, c as f64)
        }
    }

    pub fn p_mod_up(&self, c: usize) -> Counts {
        Counts::ops(c as f64, 0.0)
    }

    /// Key material for one key switch on `rr` raised limbs.
    pub fn keys(&self, rr: usize) -> Counts {
        let full = 2.0 * self.dnum as f64 * rr as f64;
        if self.on(Flag::KeyCompression) {
            Counts::new(0.0, self.prng_ops * full / 2.0, 0.0, 0.0, full / 2.0)
        } else {
            Counts::new(0.0, 0.0, 0.0, 0.0, full)
        }
    }

    pub fn ksk(&self, c: usize, rr: usize, cached: bool) -> Counts {
        let b = self.beta(c) as f64;
        let r = rr as f64;
        let x = Counts::ops(2.0 * b * r, 2.0 * (b - 1.0) * r) + self.keys(rr);
        if cached {
            x
        } else {
            x + Counts::io(b * r, 0.0)
        }
    }

    pub fn mod_up_all(&self, c: usize) -> Counts {
        let rr = self.raised(c);
        (0..self.beta(c)).fold(Counts::ZERO, |acc, j| {
            let sz = self.alpha.min(c - j * self.alpha);
            acc + self.mod_up(sz, rr - sz)
        })
    }

    /// The ModDown pair closing a key switch, optionally with the rescale.
    pub fn ks_down(&self, c: usize, rescale: bool) -> Counts {
        let rr = self.raised(c);
        let cc = self.cc(c);
        if rescale && self.on(Flag::MergedModdownRescale) {
            return 2.0 * self.mod_down(rr, self.alpha + 1) + 2.0 * self.p_mod_up(cc);
        }
        let x = 2.0 * self.mod_down(rr, self.alpha);
        if rescale {
            x + 2.0 * self.rescale(cc)
        } else {
            x
        }
    }

    pub fn automorph(&self, k: usize) -> Counts {
        if self.on(Flag::FusionO1) {
            Counts::ZERO
        } else {
            Counts::io(k as f64, k as f64)
        }
    }

    pub fn add(&self, c: usize) -> Counts {
        let c = c as f64;
        Counts::new(0.0, 2.0 * c, 4.0 * c, 2.0 * c, 0.0)
    }

    pub fn pt_add(&self, c: usize) -> Counts {
        let c = c as f64;
        Counts::new(0.0, c, 2.0 * c, c, 0.0)
    }

    pub fn tensor(&self, cc: usize) -> Counts {
        let c = cc as f64;
        let w = if self.on(Flag::FusionO1) { 2.0 * c } else { 3.0 * c };
        Counts::new(4.0 * c, c, 4.0 * c, w, 0.0)
    }

    pub fn pt_mult(&self, c: usize) -> Counts {
        let cf = c as f64;
        Counts::new(2.0 * cf, 0.0, 3.0 * cf, 2.0 * cf, 0.0) + 2.0 * self.rescale(c)
    }

    pub fn mult(&self, c: usize) -> Counts {
        let cc = self.cc(c);
        let fin = if self.on(Flag::AccumulatorCaching) { Counts::ZERO } else { self.add(cc) };
        self.tensor(cc)
            + self.decomp(cc)
            + self.mod_up_all(c)
            + self.ksk(c, self.raised(c), false)
            + self.ks_down(c, true)
            + fin
    }

    fn rotate_tail(&self, cc: usize) -> Counts {
        let f = cc as f64;
        if self.on(Flag::AccumulatorCaching) {
            Counts::ops(0.0, f)
        } else {
            Counts::new(0.0, f, 2.0 * f, f, 0.0)
        }
    }

    pub fn rotate(&self, c: usize) -> Counts {
        let cc = self.cc(c);
        self.automorph(2 * cc)
            + self.decomp(cc)
            + self.mod_up_all(c)
            + self.ksk(c, self.raised(c), false)
            + self.ks_down(c, false)
            + self.rotate_tail(cc)
    }

    pub fn hrotate(&self, c: usize, r: usize) -> Counts {
        let cc = self.cc(c);
        let rr = self.raised(c);
        let cached = self.on(Flag::BetaCaching);
        let mut x = self.decomp(cc) + self.mod_up_all(c);
        // Beta-limb caching: the hoisted digits are read once for the batch.
        if cached {
            x += Counts::io((self.beta(c) * rr) as f64, 0.0);
        }
        x + r as f64 * (self.ksk(c, rr, cached) + self.ks_down(c, false) + self.rotate_tail(cc))
    }

    /// One plaintext matrix-vector product with `d` diagonals and `b` baby
    /// steps; `dr` extra limb reads per diagonal for the plaintext operand.
    pub fn pt_mat_vec(&self, c: usize, d: usize, b: usize, dr: usize) -> Counts {
        let cc = self.cc(c);
        let ccf = cc as f64;
        let g = cdiv(d, b);
        let rr = self.raised(c);
        let rf = rr as f64;
        if b >= d && self.on(Flag::HoistedModdownMatvec) {
            let cached = self.on(Flag::BetaCaching);
            let mut x = self.decomp(cc) + self.mod_up_all(c);
            if cached {
                x += Counts::io((self.beta(c) * rr) as f64, 0.0);
            }
            x += (d - 1) as f64 * self.ksk(c, rr, cached);
            x += d as f64 * Counts::new(2.0 * rf, 3.0 * rf, ccf, 0.0, 0.0) + Counts::io(ccf, 2.0 * rf);
            return x + self.ks_down(c, true);
        }
        let mut x = self.hrotate(c, b - 1);
        x += d as f64 * Counts::new(2.0 * ccf, 2.0 * ccf, (2 + dr) as f64 * ccf, 0.0, 0.0);
        x += g as f64 * Counts::io(0.0, 2.0 * ccf);
        x += (g - 1) as f64 * (self.rotate(c) + self.add(cc));
        x + 2.0 * self.rescale(cc)
    }

    /// Baby-step count minimizing DRAM traffic, ties to the larger count.
    pub fn best_pt_mat_vec(&self, c: usize, d: usize, dr: usize) -> (Counts, usize) {
        let mut best: Option<(Counts, usize)> = None;
        for b in 1..=d {
            let x = self.pt_mat_vec(c, d, b, dr);
            let better = match &best {
                None => true,
                Some((y, _)) => x.dram_limbs() <= y.dram_limbs(),
            };
            if better {
                best = Some((x, b));
            }
        }
        best.expect("at least one diagonal")
    }

    /// Baby-step giant-step evaluation of a degree-`deg` polynomial with `k`
    /// baby steps starting from `c0` limbs, followed by `r_da` squarings.
    /// Returns the counts and the limb count of the result.
    pub fn poly_eval(&self, deg: usize, k: usize, c0: usize, r_da: usize) -> (Counts, usize) {
        let (mults, out) = bsgs_schedule(deg, k, c0 as i64);
        let mut x = Counts::ZERO;
        for c in mults {
            x += self.mult(c as usize);
        }
        let nleaf = cdiv(deg + 1, k) as f64;
        let cc = c0 - 1;
        let ccf = cc as f64;
        let kf = k as f64;
        if self.on(Flag::AccumulatorCaching) {
            x += nleaf * kf * Counts::ops(2.0 * ccf, 2.0 * ccf)
                + Counts::io(2.0 * ccf * kf, 0.0)
                + nleaf * (Counts::io(0.0, 2.0 * ccf) + 2.0 * self.rescale(cc));
        } else {
            x += nleaf
                * (kf * Counts::new(2.0 * ccf, 2.0 * ccf, 2.0 * ccf, 0.0, 0.0)
                    + Counts::io(0.0, 2.0 * ccf)
                    + 2.0 * self.rescale(cc));
        }
        let mut c = out as usize;
        for _ in 0..r_da {
            x += self.mult(c) + self.add(c - 2);
            c -= 1;
        }
        (x, c)
    }

    /// Sum of `k` ciphertext products closed by a single key-switch ModDown.
    pub fn inner_product(&self, c: usize, k: usize) -> Counts {
        let cc = self.cc(c);
        let ccf = cc as f64;
        let rr = self.raised(c);
        let kf = k as f64;
        let base = self.tensor(cc) + self.decomp(cc) + self.mod_up_all(c);
        let ks = self.ksk(c, rr, false);
        if self.on(Flag::MergedModdownRescale) {
            let p = Counts::new(base.m + ks.m, base.a + ks.a, 4.0 * ccf, 2.0 * ccf, ks.k);
            return kf * p + kf * Counts::ops(0.0, 2.0 * ccf) + self.ks_down(c, true);
        }
        kf * (base + ks) + kf * self.add(cc) + self.ks_down(c, true)
    }

    /// One logistic-regression iteration: `nf` forward and `nb` backward
    /// inner products, the sigmoid, the learning-rate product and the update.
    pub fn lr_iteration(&self, w: &LrWorkload) -> Counts {
        let c = w.limbs;
        let (pe, _) = self.poly_eval(3, w.sigmoid_baby, c - 1, 0);
        w.forward as f64 * self.inner_product(c, w.terms)
            + w.backward as f64 * self.inner_product(c - w.drop, w.terms)
            + pe
            + self.pt_mult(c - w.drop - 2)
            + self.add(c - w.drop - 3)
    }
}

/// Shape of one logistic-regression training iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrWorkload {
    pub limbs: usize,
    pub terms: usize,
    pub forward: usize,
    pub backward: usize,
    pub drop: usize,
    pub sigmoid_baby: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Model {
        Model::new(17, 35, 3, OptimizationSet::empty())
    }

    #[test]
    fn alpha_and_beta() {
        let m = base();
        assert_eq!(m.alpha, 12);
        assert_eq!(m.beta(36), 3);
        assert_eq!(m.beta(13), 2);
    }

    #[test]
    fn automorph_has_no_ops() {
        let x = base().automorph(70);
        assert_eq!(x.op_count(), 0.0);
        assert_eq!(x.dram_limbs(), 140.0);
    }

    #[test]
    fn best_matvec_prefers_fewer_bytes() {
        let m = base();
        let (x, b) = m.best_pt_mat_vec(36, 63, 0);
        for bb in 1..=63 {
            assert!(m.pt_mat_vec(36, 63, bb, 0).dram_limbs() >= x.dram_limbs());
        }
        assert!(b >= 1);
    }

    #[test]
    fn compression_halves_key_reads() {
        let plain = base().mult(36);
        let comp = Model::new(17, 35, 3, OptimizationSet::from_flags(&[Flag::KeyCompression])).mult(36);
        assert_eq!(comp.k * 2.0, plain.k);
        assert!(comp.a > plain.a);
    }
}
