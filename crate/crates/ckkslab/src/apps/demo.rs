//! End-to-end encrypted training on a small dataset, with the plaintext
//! trainer run alongside for comparison.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::{gaussian_blobs, plain_train, AppError, Cubic, Dataset, LrLayout, LrTrainer};
use crate::bootstrap::{BootConfig, Bootstrapper};
use crate::ckks::{decrypt_values, keygen, CkksParams, Evaluator, KeyRequest};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoConfig {
    pub samples: usize,
    pub features: usize,
    pub separation: f64,
    pub stddev: f64,
    pub lr: f64,
    pub iterations: usize,
    /// Seeds the key, the encryption noise and the synthetic data.
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self { samples: 8, features: 4, separation: 1.0, stddev: 0.4, lr: 1.0, iterations: 6, seed: 21 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoIteration {
    pub iteration: usize,
    pub bootstraps: usize,
    pub level: usize,
    pub loss: f64,
    pub plain_loss: f64,
    pub accuracy: f64,
    pub max_weight_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub iterations: Vec<DemoIteration>,
    pub weights: Vec<f64>,
    pub plain_weights: Vec<f64>,
    pub bootstraps: usize,
}

impl DemoReport {
    pub fn max_weight_error(&self) -> f64 {
        self.iterations.iter().map(|r| r.max_weight_error).fold(0.0, f64::max)
    }
}

/// Trains on `data` (or synthetic blobs) from zero weights encrypted at
/// level 0, so the first iteration starts with a bootstrap.
pub fn run_demo(
    params: &CkksParams,
    boot: BootConfig,
    cfg: &DemoConfig,
    data: Option<Dataset>,
) -> Result<DemoReport, AppError> {
    let data = data.unwrap_or_else(|| gaussian_blobs(cfg.samples, cfg.features, cfg.separation, cfg.stddev, cfg.seed));
    let z = data.signed_rows();
    let layout = LrLayout::new(params.slots(), data.dim(), data.samples())?;
    let trainer = LrTrainer::new(params, layout, Cubic::default());
    let boot = Bootstrapper::new(params, boot)?;
    let req = boot.key_request(&trainer.layout.key_request(&KeyRequest { compressed: true, ..Default::default() }));
    let (sk, keys) = keygen(params, cfg.seed, &req);
    let ev = Evaluator::new(params, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let w0 = vec![0.0; data.dim()];
    let state = trainer.init(params, &sk, &z, &w0, 0, cfg.lr, Some(&boot), &mut rng)?;
    let plain = plain_train(&z, &w0, cfg.lr, cfg.iterations, Cubic::default());

    let mut rows = Vec::with_capacity(cfg.iterations);
    let mut weights = w0.clone();
    let out = trainer.train(&ev, Some(&boot), state, cfg.iterations, |s| {
        let w = trainer.layout.unpack_weights(&decrypt_values(params, &sk, &s.w));
        let p = &plain[s.iteration - 1];
        rows.push(DemoIteration {
            iteration: s.iteration,
            bootstraps: s.bootstraps,
            level: s.w.level(),
            loss: data.loss(&w),
            plain_loss: data.loss(p),
            accuracy: data.accuracy(&w),
            max_weight_error: w.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        });
        weights = w;
    })?;
    Ok(DemoReport {
        iterations: rows,
        weights,
        plain_weights: plain.last().cloned().unwrap_or(w0),
        bootstraps: out.bootstraps,
    })
}
