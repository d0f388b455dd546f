//! Application building blocks: encrypted inner products and logistic
//! regression training.

pub mod data;
pub mod demo;
pub mod lr;
pub mod sigmoid;

use thiserror::Error;

pub use data::{gaussian_blobs, Dataset};
pub use demo::{run_demo, DemoConfig, DemoIteration, DemoReport};
pub use lr::{plain_train, LrLayout, LrState, LrTrainer};
pub use sigmoid::Cubic;

use crate::ckks::{Ciphertext, CkksError, Evaluator, KeyTag};
use crate::rns::{self, RnsPoly};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Ckks(#[from] CkksError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("level {level} is below the iteration depth {depth}; bootstrap required")]
    BootstrapRequired { level: usize, depth: usize },
    #[error("data: {0}")]
    Data(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// sum_k xs[k] * ys[k] slot-wise, consuming one level.
///
/// The relinearization products of every term are summed on the raised
/// basis, and the tensor parts are folded in as P d, so the whole sum ends
/// with one ModDown that also divides by the top prime.
pub fn inner_product(ev: &Evaluator, xs: &[Ciphertext], ys: &[Ciphertext]) -> Result<Ciphertext, AppError> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(AppError::Shape(format!("{} vs {} ciphertexts", xs.len(), ys.len())));
    }
    let level = xs[0].level();
    let scale = xs[0].scale * ys[0].scale;
    let mut acc: Option<(RnsPoly, RnsPoly, RnsPoly, RnsPoly)> = None;
    for (x, y) in xs.iter().zip(ys) {
        if x.level() != level || y.level() != level {
            return Err(CkksError::LevelMismatch(x.level().max(y.level()), level).into());
        }
        let s = x.scale * y.scale;
        if (s - scale).abs() > 1e-9 * scale {
            return Err(CkksError::ScaleMismatch(s, scale).into());
        }
        let (d0, d1, d2) = ev.tensor(x, y)?;
        let digits = ev.raise_digits(&d2)?;
        let (ra, rb) = ev.key_product(&digits, level, KeyTag::Relin)?;
        match &mut acc {
            None => acc = Some((ra, rb, d1, d0)),
            Some((aa, ab, s1, s0)) => {
                aa.add_assign(&ra).map_err(CkksError::from)?;
                ab.add_assign(&rb).map_err(CkksError::from)?;
                s1.add_assign(&d1).map_err(CkksError::from)?;
                s0.add_assign(&d0).map_err(CkksError::from)?;
            }
        }
    }
    let (mut ra, mut rb, d1, d0) = acc.expect("nonempty");
    ev.merge_down(&mut ra, &d1)?;
    ev.merge_down(&mut rb, &d0)?;
    let drop = ev.params.alpha() + 1;
    Ok(Ciphertext {
        a: rns::mod_down(&ra, drop).map_err(CkksError::from)?,
        b: rns::mod_down(&rb, drop).map_err(CkksError::from)?,
        scale: scale / ev.params.q(level) as f64,
    })
}
