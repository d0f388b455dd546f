//! Logistic regression training on encrypted data.
//!
//! The update is w <- w + (lr / n) sum_i g(z_i . w) z_i with z_i = y_i x_i
//! and g the cubic fit of t -> logistic(-t), i.e. gradient ascent on the
//! log-likelihood.
//!
//! Packing: with d and n rounded up to powers of two, slot i d + j holds
//! z_ij and the d n block is replicated across all slots. The weight
//! ciphertext uses the same layout with slot i d + j holding w_j, so one
//! slot-wise product followed by log d rotations yields every z_i . w at the
//! block starts, and log n rotations by multiples of d sum the per-sample
//! gradients back into the weight layout.

use num_complex::Complex64;
use rand::Rng;

use super::sigmoid::Cubic;
use super::AppError;
use crate::bootstrap::Bootstrapper;
use crate::ckks::{encrypt_values, Ciphertext, CkksError, CkksParams, Encoder, Evaluator, KeyRequest, SecretKey};

/// Multiplicative depth of one iteration: the product with z, the cubic and
/// the product with (lr / n) z.
pub const ITERATION_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LrLayout {
    pub slots: usize,
    pub features: usize,
    pub samples: usize,
    /// Features rounded up to a power of two.
    pub dim: usize,
    /// Samples rounded up to a power of two.
    pub rows: usize,
}

impl LrLayout {
    pub fn new(slots: usize, features: usize, samples: usize) -> Result<Self, AppError> {
        let dim = features.max(1).next_power_of_two();
        let rows = samples.max(1).next_power_of_two();
        if features == 0 || samples == 0 || dim * rows > slots {
            return Err(AppError::Shape(format!("{samples} x {features} does not fit {slots} slots")));
        }
        Ok(Self { slots, features, samples, dim, rows })
    }

    fn replicate(&self, block: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        (0..self.slots)
            .map(|s| {
                let k = s % (self.dim * self.rows);
                let (i, j) = (k / self.dim, k % self.dim);
                if i < self.samples && j < self.features {
                    block(i, j)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn pack_rows(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        self.replicate(|i, j| rows[i][j])
    }

    pub fn pack_weights(&self, w: &[f64]) -> Vec<f64> {
        self.replicate(|_, j| w[j])
    }

    /// Weights read from the first block.
    pub fn unpack_weights(&self, slots: &[Complex64]) -> Vec<f64> {
        slots[..self.features].iter().map(|z| z.re).collect()
    }

    /// 1 at the first slot of every sample row.
    pub fn row_mask(&self) -> Vec<f64> {
        self.replicate(|_, j| if j == 0 { 1.0 } else { 0.0 })
    }

    fn feature_shifts(&self) -> impl Iterator<Item = i64> {
        let d = self.dim;
        (0..d.trailing_zeros()).map(|k| 1i64 << k)
    }

    fn sample_shifts(&self) -> impl Iterator<Item = i64> {
        let (d, n) = (self.dim as i64, self.rows);
        (0..n.trailing_zeros()).map(move |k| d << k)
    }

    /// Right-rotation amounts that need keys.
    pub fn rotations(&self) -> Vec<i64> {
        let mut r: Vec<i64> =
            self.feature_shifts().flat_map(|s| [s, -s]).chain(self.sample_shifts().map(|s| -s)).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn key_request(&self, base: &KeyRequest) -> KeyRequest {
        let mut req = base.clone();
        req.relin = true;
        req.rotations.extend(self.rotations());
        req.rotations.sort_unstable();
        req.rotations.dedup();
        req
    }
}

#[derive(Debug, Clone)]
pub struct LrState {
    pub w: Ciphertext,
    /// The packed z_i = y_i x_i.
    pub z: Ciphertext,
    pub lr: f64,
    pub n_samples: usize,
    pub d: usize,
    pub iteration: usize,
    /// Iterations that fit between two bootstraps.
    pub bootstrap_period: usize,
    pub bootstraps: usize,
}

/// Plaintext-side constants and the encrypted iteration.
#[derive(Debug, Clone)]
pub struct LrTrainer {
    pub layout: LrLayout,
    /// The cubic applied to z . w.
    pub sigmoid: Cubic,
    encoder: Encoder,
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

impl LrTrainer {
    pub fn new(params: &CkksParams, layout: LrLayout, fit: Cubic) -> Self {
        Self { layout, sigmoid: fit.reflected(), encoder: Encoder::new(params) }
    }

    pub fn depth(&self) -> usize {
        ITERATION_DEPTH
    }

    /// Encrypts z at the top level and the initial weights at `w_level`.
    #[allow(clippy::too_many_arguments)]
    pub fn init(
        &self,
        params: &CkksParams,
        sk: &SecretKey,
        z_rows: &[Vec<f64>],
        w0: &[f64],
        w_level: usize,
        lr: f64,
        boot: Option<&Bootstrapper>,
        rng: &mut impl Rng,
    ) -> Result<LrState, AppError> {
        if z_rows.len() != self.layout.samples || z_rows.iter().any(|r| r.len() != self.layout.features) {
            return Err(AppError::Shape("training rows do not match the layout".into()));
        }
        if w0.len() != self.layout.features {
            return Err(AppError::Shape(format!("{} weights for {} features", w0.len(), self.layout.features)));
        }
        let z = encrypt_values(params, sk, &real(&self.layout.pack_rows(z_rows)), params.max_level(), rng)?;
        let w = encrypt_values(params, sk, &real(&self.layout.pack_weights(w0)), w_level, rng)?;
        let period = match boot {
            Some(b) => (b.level_out(params).max(0) as usize) / ITERATION_DEPTH,
            None => w_level / ITERATION_DEPTH,
        };
        Ok(LrState {
            w,
            z,
            lr,
            n_samples: self.layout.samples,
            d: self.layout.features,
            iteration: 0,
            bootstrap_period: period,
            bootstraps: 0,
        })
    }

    fn rotate_sum(ev: &Evaluator, ct: &Ciphertext, shifts: impl Iterator<Item = i64>) -> Result<Ciphertext, CkksError> {
        shifts.into_iter().try_fold(ct.clone(), |acc, s| ev.add(&acc, &ev.rotate(&acc, s)?))
    }

    /// c0 + c1 t + c3 t^3 at the row starts and 0 elsewhere, two levels
    /// below `t`.
    fn masked_sigmoid(&self, ev: &Evaluator, t: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let p = ev.params;
        let a = t.level();
        let mask = self.layout.row_mask();
        let scaled = |c: f64| mask.iter().map(|m| m * c).collect::<Vec<_>>();
        let qa = p.q(a) as f64;
        let m3 = self.encoder.encode_real(p, &scaled(self.sigmoid.c3), a, qa)?;
        let m1 = self.encoder.encode_real(p, &scaled(self.sigmoid.c1), a, qa)?;
        let t2 = ev.square(t)?;
        let u3 = ev.pt_mult(t, &m3)?;
        let u1 = ev.pt_mult(t, &m1)?;
        let v3 = ev.mult(&u3, &t2)?;
        let u1 = ev.adjust(&u1, v3.level(), v3.scale)?;
        let m0 = self.encoder.encode_real(p, &scaled(self.sigmoid.c0), v3.level(), v3.scale)?;
        ev.pt_add(&ev.add(&v3, &u1)?, &m0)
    }

    /// One update of the encrypted weights.
    pub fn iteration(&self, ev: &Evaluator, state: &LrState) -> Result<LrState, AppError> {
        let l = state.w.level();
        if l < ITERATION_DEPTH {
            return Err(AppError::BootstrapRequired { level: l, depth: ITERATION_DEPTH });
        }
        let z = ev.level_down(&state.z, l)?;
        let prod = ev.mult(&z, &state.w)?;
        let t = Self::rotate_sum(ev, &prod, self.layout.feature_shifts().map(|s| -s))?;
        let sig = self.masked_sigmoid(ev, &t)?;
        let spread = Self::rotate_sum(ev, &sig, self.layout.feature_shifts())?;
        let step = state.lr / state.n_samples as f64;
        let zs = ev.mul_const(&ev.level_down(&state.z, spread.level() + 1)?, step)?;
        let per_sample = ev.mult(&spread, &zs)?;
        let grad = Self::rotate_sum(ev, &per_sample, self.layout.sample_shifts().map(|s| -s))?;
        let w = ev.add(&ev.adjust(&state.w, grad.level(), grad.scale)?, &grad)?;
        Ok(LrState { w, iteration: state.iteration + 1, ..state.clone() })
    }

    /// Runs `iterations` updates, bootstrapping the weights whenever the
    /// remaining level is below one iteration's depth. `observe` sees the
    /// state after every iteration.
    pub fn train(
        &self,
        ev: &Evaluator,
        boot: Option<&Bootstrapper>,
        mut state: LrState,
        iterations: usize,
        mut observe: impl FnMut(&LrState),
    ) -> Result<LrState, AppError> {
        for _ in 0..iterations {
            if state.w.level() < ITERATION_DEPTH {
                let b = boot.ok_or(AppError::BootstrapRequired { level: state.w.level(), depth: ITERATION_DEPTH })?;
                state.w = b.bootstrap(ev, &state.w)?;
                state.bootstraps += 1;
            }
            state = self.iteration(ev, &state)?;
            observe(&state);
        }
        Ok(state)
    }
}

/// Double-precision reference: the weights after each of `iterations`
/// updates, starting from `w0`.
pub fn plain_train(z_rows: &[Vec<f64>], w0: &[f64], lr: f64, iterations: usize, fit: Cubic) -> Vec<Vec<f64>> {
    let g = fit.reflected();
    let n = z_rows.len() as f64;
    let mut w = w0.to_vec();
    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let mut grad = vec![0.0; w.len()];
        for z in z_rows {
            let t: f64 = z.iter().zip(&w).map(|(a, b)| a * b).sum();
            let s = g.eval(t);
            for (gj, zj) in grad.iter_mut().zip(z) {
                *gj += s * zj;
            }
        }
        for (wj, gj) in w.iter_mut().zip(&grad) {
            *wj += lr / n * gj;
        }
        out.push(w.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_packing() {
        let l = LrLayout::new(64, 3, 5).unwrap();
        assert_eq!((l.dim, l.rows), (4, 8));
        let rows: Vec<Vec<f64>> = (0..5).map(|i| (0..3).map(|j| (10 * i + j) as f64).collect()).collect();
        let p = l.pack_rows(&rows);
        assert_eq!(p[4 * 2 + 1], 21.0);
        assert_eq!(p[3], 0.0);
        assert_eq!(p[32 + 4 + 2], 12.0);
        assert_eq!(l.rotations(), vec![-16, -8, -4, -2, -1, 1, 2]);
        assert!(LrLayout::new(16, 4, 8).is_err());
    }

    #[test]
    fn plain_trainer_improves_loss() {
        let d = super::super::gaussian_blobs(8, 4, 1.0, 0.4, 3);
        let z = d.signed_rows();
        let hist = plain_train(&z, &[0.0; 4], 1.0, 10, Cubic::default());
        let mut prev = d.loss(&[0.0; 4]);
        for w in &hist {
            let l = d.loss(w);
            assert!(l < prev);
            prev = l;
        }
    }
}
