//! The homomorphic API over a parameter set and a key set.

use crate::ops::{self, Charge};
use crate::rns::{self, RnsError, RnsPoly};
use crate::zq::{conjugation_element, LazyAccumulator};

use super::keys::{rotation_galois, KeyTag};
use super::{Ciphertext, CkksError, CkksParams, KeySet, Plaintext};

/// Relative scale difference tolerated when adding operands.
pub const SCALE_TOLERANCE: f64 = 1e-9;

fn scales_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= SCALE_TOLERANCE * a.abs().max(b.abs())
}

/// Pointwise inner products (sum_j x_j a_j, sum_j x_j b_j) with one modular
/// reduction per output coefficient.
pub fn ksk_inner_prod(digits: &[RnsPoly], key: &[(RnsPoly, RnsPoly)]) -> Result<(RnsPoly, RnsPoly), RnsError> {
    assert!(!digits.is_empty() && digits.len() <= key.len());
    let basis = digits[0].basis().clone();
    let n = digits[0].degree();
    for (d, (a, b)) in digits.iter().zip(key) {
        if d.basis() != &basis || a.basis() != &basis || b.basis() != &basis {
            return Err(RnsError::BasisMismatch);
        }
    }
    ops::record(Charge::ksk_inner(digits.len(), basis.len()), n);
    let mut out_a = RnsPoly::zero(&basis, n, digits[0].rep());
    let mut out_b = out_a.clone();
    for i in 0..basis.len() {
        let m = *basis.modulus(i);
        let bound = (m.value() as u128 - 1).pow(2);
        for t in 0..n {
            let mut acc_a = LazyAccumulator::new(m, bound)?;
            let mut acc_b = LazyAccumulator::new(m, bound)?;
            for (d, (ka, kb)) in digits.iter().zip(key) {
                let x = d.limb(i)[t] as u128;
                acc_a.push(x * ka.limb(i)[t] as u128);
                acc_b.push(x * kb.limb(i)[t] as u128);
            }
            out_a.limb_mut(i)[t] = acc_a.finish();
            out_b.limb_mut(i)[t] = acc_b.finish();
        }
    }
    Ok((out_a, out_b))
}

/// Applies the homomorphic operations with a fixed key set.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub params: &'a CkksParams,
    pub keys: &'a KeySet,
}

impl<'a> Evaluator<'a> {
    pub fn new(params: &'a CkksParams, keys: &'a KeySet) -> Self {
        Self { params, keys }
    }

    fn same_level(&self, x: &Ciphertext, y: usize) -> Result<(), CkksError> {
        if x.level() != y {
            return Err(CkksError::LevelMismatch(x.level(), y));
        }
        Ok(())
    }

    pub fn pt_add(&self, ct: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext, CkksError> {
        self.same_level(ct, pt.level())?;
        if !scales_match(ct.scale, pt.scale) {
            return Err(CkksError::ScaleMismatch(ct.scale, pt.scale));
        }
        Ok(Ciphertext { a: ct.a.clone(), b: ct.b.add(&pt.poly)?, scale: ct.scale })
    }

    pub fn add(&self, x: &Ciphertext, y: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.same_level(x, y.level())?;
        if !scales_match(x.scale, y.scale) {
            return Err(CkksError::ScaleMismatch(x.scale, y.scale));
        }
        Ok(Ciphertext { a: x.a.add(&y.a)?, b: x.b.add(&y.b)?, scale: x.scale })
    }

    pub fn sub(&self, x: &Ciphertext, y: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &Ciphertext) -> Ciphertext {
        Ciphertext { a: x.a.neg(), b: x.b.neg(), scale: x.scale }
    }

    /// Adds the real constant c to every slot.
    pub fn add_const(&self, ct: &Ciphertext, c: f64) -> Ciphertext {
        let k = (c * ct.scale).round() as i128;
        Ciphertext { a: ct.a.clone(), b: ct.b.add_scalar(k), scale: ct.scale }
    }

    /// Multiplies by the integer k without consuming a level.
    pub fn mul_int(&self, ct: &Ciphertext, k: i128) -> Ciphertext {
        Ciphertext { a: ct.a.mul_scalar(k), b: ct.b.mul_scalar(k), scale: ct.scale }
    }

    /// Multiplies every slot by the real constant c, consuming one level and
    /// keeping the scale.
    pub fn mul_const(&self, ct: &Ciphertext, c: f64) -> Result<Ciphertext, CkksError> {
        let l = ct.level();
        if l == 0 {
            return Err(CkksError::LevelExhausted);
        }
        let q = self.params.q(l) as f64;
        let k = (c * q).round() as i128;
        let raised = Ciphertext { scale: ct.scale * q, ..self.mul_int(ct, k) };
        self.rescale(&raised)
    }

    /// Multiplies every slot by i.
    pub fn mul_i(&self, ct: &Ciphertext) -> Ciphertext {
        self.mul_monomial(ct, self.params.degree() / 2)
    }

    pub fn mul_monomial(&self, ct: &Ciphertext, k: usize) -> Ciphertext {
        Ciphertext { a: ct.a.mul_monomial(k), b: ct.b.mul_monomial(k), scale: ct.scale }
    }

    /// Pointwise product with a plaintext followed by a rescale.
    pub fn pt_mult(&self, ct: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext, CkksError> {
        self.same_level(ct, pt.level())?;
        if ct.level() == 0 {
            return Err(CkksError::LevelExhausted);
        }
        let raw = Ciphertext { a: ct.a.mul(&pt.poly)?, b: ct.b.mul(&pt.poly)?, scale: ct.scale * pt.scale };
        self.rescale(&raw)
    }

    /// Divides by the top prime of the current chain.
    pub fn rescale(&self, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let l = ct.level();
        if l == 0 {
            return Err(CkksError::LevelExhausted);
        }
        Ok(Ciphertext { a: rns::rescale(&ct.a)?, b: rns::rescale(&ct.b)?, scale: ct.scale / self.params.q(l) as f64 })
    }

    /// Drops limbs down to `level` without touching the scale.
    pub fn level_down(&self, ct: &Ciphertext, level: usize) -> Result<Ciphertext, CkksError> {
        if level > ct.level() {
            return Err(CkksError::LevelMismatch(ct.level(), level));
        }
        Ok(Ciphertext { a: ct.a.truncate(level + 1), b: ct.b.truncate(level + 1), scale: ct.scale })
    }

    /// Brings `ct` to `level` with scale `scale` by dropping limbs and one
    /// integer multiply-and-rescale.
    pub fn adjust(&self, ct: &Ciphertext, level: usize, scale: f64) -> Result<Ciphertext, CkksError> {
        if level == ct.level() && scales_match(ct.scale, scale) {
            return Ok(ct.clone());
        }
        if level >= ct.level() {
            return Err(CkksError::LevelMismatch(ct.level(), level));
        }
        let top = self.level_down(ct, level + 1)?;
        let q = self.params.q(level + 1) as f64;
        let k = (scale * q / ct.scale).round();
        if k < 1.0 {
            return Err(CkksError::ScaleMismatch(ct.scale, scale));
        }
        let raised = Ciphertext { scale: ct.scale * k, ..self.mul_int(&top, k as i128) };
        let mut out = self.rescale(&raised)?;
        if scales_match(out.scale, scale) {
            out.scale = scale;
        }
        Ok(out)
    }

    pub fn tensor(&self, x: &Ciphertext, y: &Ciphertext) -> Result<(RnsPoly, RnsPoly, RnsPoly), CkksError> {
        self.same_level(x, y.level())?;
        if x.level() == 0 {
            return Err(CkksError::LevelExhausted);
        }
        let d0 = x.b.mul(&y.b)?;
        let d1 = x.a.mul(&y.b)?.add(&y.a.mul(&x.b)?)?;
        let d2 = x.a.mul(&y.a)?;
        Ok((d0, d1, d2))
    }

    /// Decomposes a chain polynomial and extends every digit to the raised
    /// basis of its level.
    pub fn raise_digits(&self, p: &RnsPoly) -> Result<Vec<RnsPoly>, CkksError> {
        let level = p.limb_count() - 1;
        let target = self.params.raised_basis(level);
        rns::decomp(p, self.params.alpha()).iter().map(|d| Ok(rns::mod_up_into(&d.poly, &target)?)).collect()
    }

    /// Inner product of raised digits with the key for `tag`, left on the
    /// raised basis.
    pub fn key_product(&self, digits: &[RnsPoly], level: usize, tag: KeyTag) -> Result<(RnsPoly, RnsPoly), CkksError> {
        let key = self.keys.get(tag)?.digits(self.params, level, digits.len());
        Ok(ksk_inner_prod(digits, &key)?)
    }

    /// Switches `p` (a chain polynomial at its level) from the key's source
    /// to s, returning the pair (a', b') on the chain.
    pub fn key_switch(&self, p: &RnsPoly, tag: KeyTag) -> Result<(RnsPoly, RnsPoly), CkksError> {
        let level = p.limb_count() - 1;
        let digits = self.raise_digits(p)?;
        let (ra, rb) = self.key_product(&digits, level, tag)?;
        let alpha = self.params.alpha();
        Ok((rns::mod_down(&ra, alpha)?, rns::mod_down(&rb, alpha)?))
    }

    /// Relinearized product followed by a rescale.
    pub fn mult(&self, x: &Ciphertext, y: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let (d0, d1, d2) = self.tensor(x, y)?;
        let (ka, kb) = self.key_switch(&d2, KeyTag::Relin)?;
        let raw = Ciphertext { a: d1.add(&ka)?, b: d0.add(&kb)?, scale: x.scale * y.scale };
        self.rescale(&raw)
    }

    /// Product with the key-switch ModDown and the rescale merged into one
    /// division by P q_l.
    pub fn new_mult(&self, x: &Ciphertext, y: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let level = x.level();
        let (d0, d1, d2) = self.tensor(x, y)?;
        let digits = self.raise_digits(&d2)?;
        let (mut ra, mut rb) = self.key_product(&digits, level, KeyTag::Relin)?;
        self.merge_down(&mut ra, &d1)?;
        self.merge_down(&mut rb, &d0)?;
        let drop = self.params.alpha() + 1;
        Ok(Ciphertext {
            a: rns::mod_down(&ra, drop)?,
            b: rns::mod_down(&rb, drop)?,
            scale: x.scale * y.scale / self.params.q(level) as f64,
        })
    }

    /// acc += P p on the chain limbs of a raised accumulator.
    pub fn merge_down(&self, acc: &mut RnsPoly, p: &RnsPoly) -> Result<(), CkksError> {
        let lifted = rns::p_mod_up(p, self.params.raise())?;
        acc.add_assign_prefix(&lifted.sub_poly(0..p.limb_count()))?;
        Ok(())
    }

    pub fn square(&self, x: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.mult(x, x)
    }

    /// Applies X -> X^g and switches back to s.
    pub fn apply_galois(&self, ct: &Ciphertext, g: usize) -> Result<Ciphertext, CkksError> {
        if g == 1 {
            return Ok(ct.clone());
        }
        let a = ct.a.automorph_galois(g);
        let b = ct.b.automorph_galois(g);
        let (ka, kb) = self.key_switch(&a, KeyTag::Galois(g))?;
        Ok(Ciphertext { a: ka, b: b.add(&kb)?, scale: ct.scale })
    }

    /// Right rotation: slot i of the result holds slot i - k of the input.
    pub fn rotate(&self, ct: &Ciphertext, k: i64) -> Result<Ciphertext, CkksError> {
        self.apply_galois(ct, rotation_galois(self.params, k))
    }

    /// Left rotation: slot i of the result holds slot i + k of the input.
    pub fn rotate_left(&self, ct: &Ciphertext, k: i64) -> Result<Ciphertext, CkksError> {
        self.rotate(ct, -k)
    }

    pub fn conjugate(&self, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        self.apply_galois(ct, conjugation_element(self.params.degree()))
    }

    /// Right rotations by every k in `ks`, sharing one decomposition and
    /// ModUp of a.
    pub fn hrotate(&self, ct: &Ciphertext, ks: &[i64]) -> Result<Vec<Ciphertext>, CkksError> {
        let gs: Vec<usize> = ks.iter().map(|&k| rotation_galois(self.params, k)).collect();
        self.hrotate_galois(ct, &gs)
    }

    pub fn hrotate_galois(&self, ct: &Ciphertext, gs: &[usize]) -> Result<Vec<Ciphertext>, CkksError> {
        if gs.iter().all(|&g| g == 1) {
            return Ok(vec![ct.clone(); gs.len()]);
        }
        let level = ct.level();
        let alpha = self.params.alpha();
        let digits = self.raise_digits(&ct.a)?;
        gs.iter()
            .map(|&g| {
                if g == 1 {
                    return Ok(ct.clone());
                }
                let rotated: Vec<RnsPoly> = digits.iter().map(|d| d.automorph_galois(g)).collect();
                let (ra, rb) = self.key_product(&rotated, level, KeyTag::Galois(g))?;
                let b = ct.b.automorph_galois(g);
                Ok(Ciphertext {
                    a: rns::mod_down(&ra, alpha)?,
                    b: b.add(&rns::mod_down(&rb, alpha)?)?,
                    scale: ct.scale,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rns::{Prime, Rep, RnsBasis};
    use crate::zq::gen_ntt_primes;

    #[test]
    fn unit_key_returns_digit() {
        let n = 16;
        let ms = gen_ntt_primes(40, n, 2, &[]).unwrap();
        let basis = RnsBasis::new(ms.into_iter().map(|m| Prime::new(m, n).unwrap()).collect(), 0);
        let coeffs: Vec<i128> = (0..n as i128).map(|i| i * 7 - 40).collect();
        let d = RnsPoly::from_signed(&basis, &coeffs).to_eval();
        let ones = RnsPoly::from_limbs(&basis, n, Rep::Eval, vec![1; 2 * n]);
        let (a, b) = ksk_inner_prod(std::slice::from_ref(&d), &[(ones.clone(), ones)]).unwrap();
        assert_eq!(a, d);
        assert_eq!(b, d);
    }
}
