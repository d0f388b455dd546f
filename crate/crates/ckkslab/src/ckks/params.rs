use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CkksError;
use crate::rns::{Prime, RnsBasis};
use crate::zq::{gen_ntt_prime, gen_ntt_primes};

/// Declarative description of a functional parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub log_n: u32,
    pub max_level: usize,
    pub dnum: usize,
    pub q0_bits: u32,
    pub scale_bits: u32,
    pub p_bits: u32,
    #[serde(default)]
    pub radices: Vec<usize>,
}

/// An instantiated parameter set: the modulus chain q_0..q_L, the raising
/// primes whose product is P, and their NTT tables.
#[derive(Debug, Clone)]
pub struct CkksParams {
    spec: ParamSpec,
    degree: usize,
    alpha: usize,
    delta: f64,
    chain: RnsBasis,
    raise: RnsBasis,
    full: RnsBasis,
    hash: [u8; 32],
}

impl CkksParams {
    pub fn new(spec: ParamSpec) -> Result<Self, CkksError> {
        if spec.dnum == 0 || spec.dnum > spec.max_level + 1 {
            return Err(CkksError::BadParams(format!("dnum {} outside 1..={}", spec.dnum, spec.max_level + 1)));
        }
        if !(2..=17).contains(&spec.log_n) {
            return Err(CkksError::BadParams(format!("log_n {} outside 2..=17", spec.log_n)));
        }
        let n = 1usize << spec.log_n;
        if !spec.radices.is_empty() && spec.radices.iter().product::<usize>() != n / 2 {
            return Err(CkksError::BadParams("radices must multiply to the slot count".into()));
        }
        let alpha = (spec.max_level + 1).div_ceil(spec.dnum);
        let q0 = gen_ntt_prime(spec.q0_bits, n, &[])?;
        let mut used = vec![q0.value()];
        let scale_primes = gen_ntt_primes(spec.scale_bits + 1, n, spec.max_level, &used)?;
        used.extend(scale_primes.iter().map(|m| m.value()));
        let raise_primes = gen_ntt_primes(spec.p_bits, n, alpha, &used)?;
        let mk = |m| Prime::new(m, n);
        let mut chain_primes: Vec<Arc<Prime>> = vec![mk(q0)?];
        for m in scale_primes {
            chain_primes.push(mk(m)?);
        }
        let raise_primes = raise_primes.into_iter().map(mk).collect::<Result<Vec<_>, _>>()?;
        let chain = RnsBasis::new(chain_primes, 0);
        let raise = RnsBasis::new(raise_primes, alpha);
        let full = chain.concat(&raise);
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&spec).expect("spec serializes"));
        for q in full.values() {
            h.update(q.to_le_bytes());
        }
        Ok(Self {
            degree: n,
            alpha,
            delta: 2f64.powi(spec.scale_bits as i32),
            chain,
            raise,
            full,
            hash: h.finalize().into(),
            spec,
        })
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn log_n(&self) -> u32 {
        self.spec.log_n
    }

    pub fn slots(&self) -> usize {
        self.degree / 2
    }

    pub fn max_level(&self) -> usize {
        self.spec.max_level
    }

    pub fn dnum(&self) -> usize {
        self.spec.dnum
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Digits a ciphertext at `level` decomposes into.
    pub fn beta(&self, level: usize) -> usize {
        (level + 1).div_ceil(self.alpha)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn chain(&self) -> &RnsBasis {
        &self.chain
    }

    pub fn raise(&self) -> &RnsBasis {
        &self.raise
    }

    /// Chain followed by the raising primes.
    pub fn full(&self) -> &RnsBasis {
        &self.full
    }

    pub fn hash(&self) -> [u8; 32] {
        self.hash
    }

    pub fn q(&self, level: usize) -> u64 {
        self.chain.modulus(level).value()
    }

    pub fn level_basis(&self, level: usize) -> RnsBasis {
        self.chain.slice(0..level + 1)
    }

    /// q_0..q_level followed by the raising primes.
    pub fn raised_basis(&self, level: usize) -> RnsBasis {
        self.level_basis(level).concat(&self.raise)
    }

    /// Positions in the full basis of the raised basis at `level`.
    pub fn raised_positions(&self, level: usize) -> Vec<usize> {
        let l1 = self.max_level() + 1;
        (0..level + 1).chain(l1..l1 + self.alpha).collect()
    }

    pub fn check_level(&self, level: usize) -> Result<(), CkksError> {
        if level > self.max_level() {
            return Err(CkksError::BadLevel { level, max: self.max_level() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ParamSpec {
        ParamSpec { log_n: 5, max_level: 4, dnum: 2, q0_bits: 40, scale_bits: 30, p_bits: 40, radices: vec![4, 4] }
    }

    #[test]
    fn chain_layout() {
        let p = CkksParams::new(spec()).unwrap();
        assert_eq!(p.alpha(), 3);
        assert_eq!(p.chain().len(), 5);
        assert_eq!(p.raise().len(), 3);
        assert_eq!(p.full().raise_count(), 3);
        assert_eq!(p.beta(4), 2);
        assert_eq!(p.beta(2), 1);
        for i in 1..=4 {
            let q = p.q(i) as f64;
            assert!((q / p.delta() - 1.0).abs() < 2f64.powi(-10));
        }
        assert_eq!(p.raised_positions(1), vec![0, 1, 5, 6, 7]);
        assert_eq!(
            p.raised_basis(1).values(),
            p.full()
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| [0, 1, 5, 6, 7].contains(i))
                .map(|(_, v)| *v)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec();
        s.radices = vec![4, 2];
        assert!(CkksParams::new(s).is_err());
        let mut s = spec();
        s.dnum = 0;
        assert!(CkksParams::new(s).is_err());
    }

    #[test]
    fn deterministic_hash() {
        assert_eq!(CkksParams::new(spec()).unwrap().hash(), CkksParams::new(spec()).unwrap().hash());
    }
}
