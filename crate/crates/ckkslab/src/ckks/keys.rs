//! Secret keys, switching keys and their seed-compressed form.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::{CkksError, CkksParams};
use crate::ops::{self, Charge, PRNG_OPS_PER_WORD};
use crate::rns::{Rep, RnsBasis, RnsPoly};
use crate::zq::{conjugation_element, galois_element};

pub const ERROR_STDDEV: f64 = 3.2;

/// Dense uniform ternary secret.
#[derive(Debug, Clone)]
pub struct SecretKey {
    coeffs: Vec<i8>,
    /// s on the full basis, evaluation form.
    s: RnsPoly,
}

impl SecretKey {
    pub fn generate(params: &CkksParams, rng: &mut impl Rng) -> Self {
        let coeffs: Vec<i8> = (0..params.degree()).map(|_| rng.gen_range(-1i8..=1)).collect();
        Self::from_coeffs(params, coeffs)
    }

    pub fn from_coeffs(params: &CkksParams, coeffs: Vec<i8>) -> Self {
        let wide: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
        let s = RnsPoly::from_signed(params.full(), &wide).to_eval();
        Self { coeffs, s }
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn hamming_weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn full(&self) -> &RnsPoly {
        &self.s
    }

    /// s restricted to the limbs at `positions` of the full basis.
    pub fn select(&self, positions: &[usize]) -> RnsPoly {
        self.s.select_limbs(positions)
    }

    pub fn at_level(&self, level: usize) -> RnsPoly {
        self.s.sub_poly(0..level + 1)
    }
}

/// Which source key a switching key converts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyTag {
    /// s^2 to s.
    Relin,
    /// psi_g(s) to s for the Galois element g.
    Galois(usize),
}

impl KeyTag {
    pub fn code(self) -> u64 {
        match self {
            KeyTag::Relin => 0,
            KeyTag::Galois(g) => g as u64,
        }
    }
}

/// dnum pairs (a_j, b_j) on the full basis in evaluation form with
/// b_j = -a_j s + e_j + P T_j s', where T_j is 1 modulo the primes of digit j
/// and 0 modulo the other chain primes.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingKey {
    pub tag: KeyTag,
    pub a: Vec<RnsPoly>,
    pub b: Vec<RnsPoly>,
}

/// A switching key whose uniformly random rows are regenerated from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSwitchingKey {
    pub tag: KeyTag,
    pub seed: [u8; 32],
    pub b: Vec<RnsPoly>,
}

/// Uniform polynomial of digit `digit` on the full-basis limbs `positions`.
///
/// Stream contract: limb i of digit j is drawn from ChaCha20 keyed by `seed`
/// with stream id (j << 32) | i, taking little-endian u64 words masked to the
/// bit length of q_i and rejecting values >= q_i. Values are the evaluation
/// form residues in natural order.
pub fn expand_uniform(params: &CkksParams, seed: &[u8; 32], digit: usize, positions: &[usize]) -> RnsPoly {
    let n = params.degree();
    let full = params.full();
    let mut data = Vec::with_capacity(positions.len() * n);
    for &i in positions {
        let q = full.modulus(i).value();
        let mask = q.next_power_of_two() - 1;
        let mut rng = ChaCha20Rng::from_seed(*seed);
        rng.set_stream(((digit as u64) << 32) | i as u64);
        let mut produced = 0;
        while produced < n {
            let x = rng.next_u64() & mask;
            if x < q {
                data.push(x);
                produced += 1;
            }
        }
    }
    RnsPoly::from_limbs(&sub_basis(full, positions), n, Rep::Eval, data)
}

pub fn sub_basis(full: &RnsBasis, positions: &[usize]) -> RnsBasis {
    full.select(positions)
}

fn gaussian_poly(basis: &RnsBasis, n: usize, rng: &mut impl Rng) -> RnsPoly {
    let normal = Normal::new(0.0, ERROR_STDDEV).expect("valid deviation");
    let e: Vec<i128> = (0..n).map(|_| normal.sample(rng).round() as i128).collect();
    RnsPoly::from_signed(basis, &e).to_eval()
}

pub fn sample_error(basis: &RnsBasis, n: usize, rng: &mut impl Rng) -> RnsPoly {
    gaussian_poly(basis, n, rng)
}

pub fn sample_uniform(basis: &RnsBasis, n: usize, rng: &mut impl Rng) -> RnsPoly {
    let mut data = Vec::with_capacity(basis.len() * n);
    for i in 0..basis.len() {
        let q = basis.modulus(i).value();
        data.extend((0..n).map(|_| rng.gen_range(0..q)));
    }
    RnsPoly::from_limbs(basis, n, Rep::Eval, data)
}

/// Generates the compressed key switching `s_prime` (full basis, evaluation
/// form) to `sk`.
pub fn gen_switching_key(
    params: &CkksParams,
    sk: &SecretKey,
    s_prime: &RnsPoly,
    tag: KeyTag,
    rng: &mut impl Rng,
) -> CompressedSwitchingKey {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let full = params.full();
    let all: Vec<usize> = (0..full.len()).collect();
    let n = params.degree();
    let chain_len = params.max_level() + 1;
    let alpha = params.alpha();
    let mut b = Vec::with_capacity(params.dnum());
    for j in 0..params.dnum() {
        let a = expand_uniform(params, &seed, j, &all);
        let e = gaussian_poly(full, n, rng);
        let mut bj = e.sub(&a.mul(sk.full()).expect("same basis")).expect("same basis");
        for i in (j * alpha)..((j + 1) * alpha).min(chain_len) {
            let m = *full.modulus(i);
            let mut p_mod = 1u64;
            for r in params.raise().primes() {
                p_mod = m.mul(p_mod, m.reduce(r.modulus.value()));
            }
            let sp = s_prime.limb(i).to_vec();
            for (x, s) in bj.limb_mut(i).iter_mut().zip(sp) {
                *x = m.add(*x, m.mul(p_mod, s));
            }
        }
        b.push(bj);
    }
    CompressedSwitchingKey { tag, seed, b }
}

impl CompressedSwitchingKey {
    pub fn expand(&self, params: &CkksParams) -> SwitchingKey {
        let all: Vec<usize> = (0..params.full().len()).collect();
        let a = (0..self.b.len()).map(|j| expand_uniform(params, &self.seed, j, &all)).collect();
        SwitchingKey { tag: self.tag, a, b: self.b.clone() }
    }
}

impl SwitchingKey {
    /// Drops the random rows, keeping the seed they were generated from.
    pub fn compress(&self, params: &CkksParams, seed: [u8; 32]) -> Result<CompressedSwitchingKey, CkksError> {
        let c = CompressedSwitchingKey { tag: self.tag, seed, b: self.b.clone() };
        if c.expand(params).a != self.a {
            return Err(CkksError::SeedMismatch);
        }
        Ok(c)
    }
}

/// A stored switching key, full or compressed.
#[derive(Debug, Clone)]
pub enum KeyMaterial {
    Full(SwitchingKey),
    Compressed(CompressedSwitchingKey),
}

impl KeyMaterial {
    pub fn tag(&self) -> KeyTag {
        match self {
            KeyMaterial::Full(k) => k.tag,
            KeyMaterial::Compressed(k) => k.tag,
        }
    }

    /// The first `beta` digit pairs restricted to the raised basis of
    /// `level`. Compressed keys regenerate their random rows here and charge
    /// the PRNG work.
    pub fn digits(&self, params: &CkksParams, level: usize, beta: usize) -> Vec<(RnsPoly, RnsPoly)> {
        let pos = params.raised_positions(level);
        match self {
            KeyMaterial::Full(k) => (0..beta).map(|j| (k.a[j].select_limbs(&pos), k.b[j].select_limbs(&pos))).collect(),
            KeyMaterial::Compressed(k) => {
                ops::record(Charge::prng((beta * pos.len()) as f64, PRNG_OPS_PER_WORD), params.degree());
                (0..beta).map(|j| (expand_uniform(params, &k.seed, j, &pos), k.b[j].select_limbs(&pos))).collect()
            }
        }
    }
}

/// Evaluation keys indexed by tag.
#[derive(Debug, Clone, Default)]
pub struct KeySet {
    keys: BTreeMap<KeyTag, KeyMaterial>,
}

impl KeySet {
    pub fn insert(&mut self, k: KeyMaterial) {
        self.keys.insert(k.tag(), k);
    }

    pub fn get(&self, tag: KeyTag) -> Result<&KeyMaterial, CkksError> {
        self.keys.get(&tag).ok_or(CkksError::MissingKey(tag))
    }

    pub fn contains(&self, tag: KeyTag) -> bool {
        self.keys.contains_key(&tag)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &KeyMaterial> {
        self.keys.values()
    }

    /// Replaces every compressed key by its expansion.
    pub fn expanded(&self, params: &CkksParams) -> KeySet {
        let keys = self
            .keys
            .iter()
            .map(|(t, k)| {
                let full = match k {
                    KeyMaterial::Full(k) => k.clone(),
                    KeyMaterial::Compressed(c) => c.expand(params),
                };
                (*t, KeyMaterial::Full(full))
            })
            .collect();
        KeySet { keys }
    }
}

/// Rotation amounts are right shifts: slot i of the result holds slot i - k.
pub fn rotation_galois(params: &CkksParams, k: i64) -> usize {
    let slots = params.slots() as i64;
    let left = (-k).rem_euclid(slots) as usize;
    galois_element(left, params.degree())
}

/// Which keys to generate.
#[derive(Debug, Clone, Default)]
pub struct KeyRequest {
    pub relin: bool,
    pub conjugate: bool,
    pub rotations: Vec<i64>,
    pub compressed: bool,
}

/// Secret key plus the requested evaluation keys, deterministically from
/// `seed`.
pub fn keygen(params: &CkksParams, seed: u64, req: &KeyRequest) -> (SecretKey, KeySet) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let sk = SecretKey::generate(params, &mut rng);
    let keys = gen_keys(params, &sk, req, &mut rng);
    (sk, keys)
}

pub fn gen_keys(params: &CkksParams, sk: &SecretKey, req: &KeyRequest, rng: &mut impl Rng) -> KeySet {
    let mut set = KeySet::default();
    let store = |set: &mut KeySet, k: CompressedSwitchingKey| {
        set.insert(if req.compressed { KeyMaterial::Compressed(k) } else { KeyMaterial::Full(k.expand(params)) });
    };
    if req.relin {
        let s2 = sk.full().mul(sk.full()).expect("same basis");
        let k = gen_switching_key(params, sk, &s2, KeyTag::Relin, rng);
        store(&mut set, k);
    }
    let mut galois: Vec<usize> = req.rotations.iter().map(|&k| rotation_galois(params, k)).collect();
    if req.conjugate {
        galois.push(conjugation_element(params.degree()));
    }
    galois.sort_unstable();
    galois.dedup();
    for g in galois {
        if g == 1 || set.contains(KeyTag::Galois(g)) {
            continue;
        }
        let sp = sk.full().automorph_galois(g);
        let k = gen_switching_key(params, sk, &sp, KeyTag::Galois(g), rng);
        store(&mut set, k);
    }
    set
}
