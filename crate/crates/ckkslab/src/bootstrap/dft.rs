//! Factored slot transforms as sparse diagonal matrices.
//!
//! A stage is a map from left-rotation amount s to a diagonal d_s, acting as
//! out[k] = sum_s d_s[k] * v[k + s] with indices modulo the slot count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ckks::Encoder;

pub type Diagonals = BTreeMap<usize, Vec<Complex64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The encoding transform without its final bit reversal.
    CoeffToSlot,
    /// The decoding transform without its leading bit reversal.
    SlotToCoeff,
}

/// One matrix-vector product of a factored transform.
#[derive(Debug, Clone)]
pub struct DftStage {
    pub radix: usize,
    /// All rotation amounts are multiples of this step.
    pub step: usize,
    pub diagonals: Diagonals,
}

impl DftStage {
    pub fn shifts(&self) -> Vec<usize> {
        self.diagonals.keys().copied().collect()
    }

    pub fn apply_plain(&self, v: &[Complex64]) -> Vec<Complex64> {
        apply(&self.diagonals, v)
    }
}

#[derive(Debug, Clone)]
pub struct DftPlan {
    pub direction: Direction,
    pub slots: usize,
    pub stages: Vec<DftStage>,
}

impl DftPlan {
    /// Groups the butterfly stages by `radices` (first entry applied first)
    /// and spreads `constant` evenly over the groups.
    pub fn new(encoder: &Encoder, direction: Direction, radices: &[usize], constant: Complex64) -> Self {
        let n = encoder.slots();
        assert_eq!(radices.iter().product::<usize>(), n, "radices must multiply to the slot count");
        assert!(radices.iter().all(|r| r.is_power_of_two() && *r >= 2));
        let mut lenhs: Vec<usize> = (0..n.trailing_zeros()).map(|i| 1usize << i).collect();
        if direction == Direction::CoeffToSlot {
            lenhs.reverse();
        }
        let per_stage = constant.powf(1.0 / radices.len() as f64);
        let mut stages = Vec::with_capacity(radices.len());
        let mut it = lenhs.into_iter();
        for &r in radices {
            let group: Vec<usize> = it.by_ref().take(r.trailing_zeros() as usize).collect();
            let mut acc = identity(n);
            for &lenh in &group {
                let s = butterfly(encoder, direction, lenh);
                acc = compose(&s, &acc, n);
            }
            for d in acc.values_mut() {
                d.iter_mut().for_each(|x| *x *= per_stage);
            }
            acc.retain(|_, d| d.iter().any(|x| x.norm() > 0.0));
            let step = *group.iter().min().expect("nonempty group");
            stages.push(DftStage { radix: r, step, diagonals: acc });
        }
        Self { direction, slots: n, stages }
    }

    pub fn apply_plain(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.stages.iter().fold(v.to_vec(), |x, s| s.apply_plain(&x))
    }
}

fn identity(n: usize) -> Diagonals {
    BTreeMap::from([(0, vec![Complex64::new(1.0, 0.0); n])])
}

/// Diagonals of one butterfly stage of half-length `lenh`.
pub fn butterfly(encoder: &Encoder, direction: Direction, lenh: usize) -> Diagonals {
    let n = encoder.slots();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut d0 = vec![zero; n];
    let mut up = vec![zero; n];
    let mut down = vec![zero; n];
    for i in (0..n).step_by(2 * lenh) {
        for j in 0..lenh {
            let (lo, hi) = (i + j, i + j + lenh);
            match direction {
                Direction::SlotToCoeff => {
                    let w = encoder.twiddle(lenh, j, false);
                    d0[lo] = one;
                    up[lo] = w;
                    down[hi] = one;
                    d0[hi] = -w;
                }
                Direction::CoeffToSlot => {
                    let w = encoder.twiddle(lenh, j, true);
                    d0[lo] = one;
                    up[lo] = one;
                    d0[hi] = -w;
                    down[hi] = w;
                }
            }
        }
    }
    let mut m = BTreeMap::new();
    m.insert(0, d0);
    add_into(&mut m, lenh % n, &up);
    add_into(&mut m, (n - lenh) % n, &down);
    m
}

fn add_into(m: &mut Diagonals, shift: usize, d: &[Complex64]) {
    let e = m.entry(shift).or_insert_with(|| vec![Complex64::new(0.0, 0.0); d.len()]);
    for (x, y) in e.iter_mut().zip(d) {
        *x += y;
    }
}

/// The diagonals of `later` applied after `earlier`.
pub fn compose(later: &Diagonals, earlier: &Diagonals, n: usize) -> Diagonals {
    let mut out = Diagonals::new();
    for (&t, bt) in later {
        for (&s, a_s) in earlier {
            let e = out.entry((s + t) % n).or_insert_with(|| vec![Complex64::new(0.0, 0.0); n]);
            for k in 0..n {
                e[k] += bt[k] * a_s[(k + t) % n];
            }
        }
    }
    out
}

pub fn apply(d: &Diagonals, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&s, ds) in d {
        for k in 0..n {
            out[k] += ds[k] * v[(k + s) % n];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::bit_reverse;

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect()
    }

    #[test]
    fn stages_reproduce_the_embedding() {
        for (log_n, radices) in [(6usize, vec![32usize]), (6, vec![4, 8]), (6, vec![2, 2, 8])] {
            let e = Encoder::with_degree(1 << log_n);
            let n = e.slots();
            let v = sample(n);
            let mut want = v.clone();
            e.fft_special_inv(&mut want);
            let plan = DftPlan::new(&e, Direction::CoeffToSlot, &radices, Complex64::new(1.0 / n as f64, 0.0));
            let got = plan.apply_plain(&v);
            for k in 0..n {
                let w = want[bit_reverse(k, n.trailing_zeros())];
                assert!((got[k] - w).norm() < 2f64.powi(-40), "{radices:?} slot {k}");
            }
            let back = DftPlan::new(&e, Direction::SlotToCoeff, &radices, Complex64::new(1.0, 0.0)).apply_plain(&got);
            for k in 0..n {
                assert!((back[k] - v[k]).norm() < 2f64.powi(-40));
            }
        }
    }

    #[test]
    fn diagonal_counts() {
        let e = Encoder::with_degree(1 << 12);
        let cts = DftPlan::new(&e, Direction::CoeffToSlot, &[32, 64], Complex64::new(1.0, 0.0));
        assert_eq!(cts.stages[0].diagonals.len(), 32);
        assert_eq!(cts.stages[1].diagonals.len(), 127);
        let stc = DftPlan::new(&e, Direction::SlotToCoeff, &[32, 64], Complex64::new(1.0, 0.0));
        assert_eq!(stc.stages[0].diagonals.len(), 63);
        assert_eq!(stc.stages[1].diagonals.len(), 64);
    }
}
