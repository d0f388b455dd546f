//! Functional CKKS: encoding, keys, encryption and the homomorphic API.

pub mod encoder;
pub mod eval;
pub mod keys;
pub mod params;
pub mod serial;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub use encoder::Encoder;
pub use eval::Evaluator;
pub use keys::{keygen, CompressedSwitchingKey, KeyMaterial, KeyRequest, KeySet, KeyTag, SecretKey, SwitchingKey};
pub use params::{CkksParams, ParamSpec};

use crate::rns::{RnsError, RnsPoly};
use crate::zq::ZqError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CkksError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("level {level} exceeds the maximum {max}")]
    BadLevel { level: usize, max: usize },
    #[error("expected {want} slots, got {got}")]
    SlotCount { got: usize, want: usize },
    #[error("encoded coefficients overflow the modulus")]
    EncodingOverflow,
    #[error("operands are at levels {0} and {1}")]
    LevelMismatch(usize, usize),
    #[error("operand scales {0} and {1} differ")]
    ScaleMismatch(f64, f64),
    #[error("no switching key for {0:?}")]
    MissingKey(KeyTag),
    #[error("no level left to consume")]
    LevelExhausted,
    #[error("seed does not reproduce the random rows")]
    SeedMismatch,
    #[error("malformed container: {0}")]
    Format(String),
    #[error(transparent)]
    Rns(#[from] RnsError),
    #[error(transparent)]
    Zq(#[from] ZqError),
}

/// An encoded message on the first level + 1 chain primes.
#[derive(Debug, Clone, PartialEq)]
pub struct Plaintext {
    pub poly: RnsPoly,
    pub scale: f64,
}

impl Plaintext {
    pub fn level(&self) -> usize {
        self.poly.limb_count() - 1
    }
}

/// A pair (a, b) decrypting to b + a s, held in evaluation form.
#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    pub a: RnsPoly,
    pub b: RnsPoly,
    pub scale: f64,
}

impl Ciphertext {
    pub fn level(&self) -> usize {
        self.a.limb_count() - 1
    }

    /// Size in machine words.
    pub fn words(&self) -> usize {
        2 * self.a.degree() * self.a.limb_count()
    }
}

/// Symmetric encryption of `pt` under `sk`.
pub fn encrypt(params: &CkksParams, sk: &SecretKey, pt: &Plaintext, rng: &mut impl Rng) -> Ciphertext {
    let basis = pt.poly.basis().clone();
    let n = params.degree();
    let a = keys::sample_uniform(&basis, n, rng);
    let e = keys::sample_error(&basis, n, rng);
    let s = sk.at_level(pt.level());
    let b = e.sub(&a.mul(&s).expect("same basis")).expect("same basis").add(&pt.poly).expect("same basis");
    Ciphertext { a, b, scale: pt.scale }
}

pub fn decrypt(sk: &SecretKey, ct: &Ciphertext) -> Plaintext {
    let s = sk.at_level(ct.level());
    let poly = ct.b.add(&ct.a.mul(&s).expect("same basis")).expect("same basis");
    Plaintext { poly, scale: ct.scale }
}

/// Encodes and encrypts a complex slot vector at `level` with scale delta.
pub fn encrypt_values(
    params: &CkksParams,
    sk: &SecretKey,
    values: &[Complex64],
    level: usize,
    rng: &mut impl Rng,
) -> Result<Ciphertext, CkksError> {
    let pt = Encoder::new(params).encode(params, values, level, params.delta())?;
    Ok(encrypt(params, sk, &pt, rng))
}

pub fn decrypt_values(params: &CkksParams, sk: &SecretKey, ct: &Ciphertext) -> Vec<Complex64> {
    Encoder::new(params).decode(&decrypt(sk, ct))
}

/// Largest absolute slot difference.
pub fn max_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
