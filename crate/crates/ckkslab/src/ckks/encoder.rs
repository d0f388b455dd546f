//! Canonical-embedding encoding of complex slot vectors.
//!
//! Slot j holds the evaluation of the message polynomial at zeta^(5^j) with
//! zeta = exp(i pi / N). Coefficient i carries the real part of the inverse
//! transform and coefficient i + N/2 the imaginary part, both scaled by the
//! encoding scale.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::{CkksError, CkksParams, Plaintext};
use crate::rns::{RnsBasis, RnsPoly};
use crate::zq::bit_reverse;

#[derive(Debug, Clone)]
pub struct Encoder {
    slots: usize,
    two_n: usize,
    rot_group: Vec<usize>,
    ksi: Vec<Complex64>,
}

impl Encoder {
    pub fn new(params: &CkksParams) -> Self {
        Self::with_degree(params.degree())
    }

    pub fn with_degree(n: usize) -> Self {
        let slots = n / 2;
        let two_n = 2 * n;
        let mut rot_group = Vec::with_capacity(slots);
        let mut g = 1usize;
        for _ in 0..slots {
            rot_group.push(g);
            g = g * 5 % two_n;
        }
        let ksi = (0..=two_n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / two_n as f64)).collect();
        Self { slots, two_n, rot_group, ksi }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    fn bit_reverse_in_place(&self, v: &mut [Complex64]) {
        let log = v.len().trailing_zeros();
        for i in 0..v.len() {
            let j = bit_reverse(i, log);
            if i < j {
                v.swap(i, j);
            }
        }
    }

    /// Twiddle factor of butterfly j in the stage of half-length `lenh`.
    pub fn twiddle(&self, lenh: usize, j: usize, inverse: bool) -> Complex64 {
        let lenq = 8 * lenh;
        let gap = self.two_n / lenq;
        let r = self.rot_group[j] % lenq;
        if inverse {
            self.ksi[(lenq - r) * gap]
        } else {
            self.ksi[r * gap]
        }
    }

    /// Butterfly stages of the slot transform, without the leading bit
    /// reversal. Stage `lenh` pairs index j with j + lenh inside blocks of
    /// 2 lenh.
    pub fn forward_stage(&self, v: &mut [Complex64], lenh: usize) {
        let len = 2 * lenh;
        let lenq = 4 * len;
        let gap = self.two_n / lenq;
        for i in (0..v.len()).step_by(len) {
            for j in 0..lenh {
                let w = self.ksi[(self.rot_group[j] % lenq) * gap];
                let u = v[i + j];
                let t = v[i + j + lenh] * w;
                v[i + j] = u + t;
                v[i + j + lenh] = u - t;
            }
        }
    }

    /// Inverse butterfly stage, unnormalized.
    pub fn inverse_stage(&self, v: &mut [Complex64], lenh: usize) {
        let len = 2 * lenh;
        let lenq = 4 * len;
        let gap = self.two_n / lenq;
        for i in (0..v.len()).step_by(len) {
            for j in 0..lenh {
                let w = self.ksi[(lenq - self.rot_group[j] % lenq) * gap];
                let u = v[i + j] + v[i + j + lenh];
                let t = (v[i + j] - v[i + j + lenh]) * w;
                v[i + j] = u;
                v[i + j + lenh] = t;
            }
        }
    }

    /// Slot values of the packed coefficient vector (the decoding transform).
    pub fn fft_special(&self, v: &mut [Complex64]) {
        self.bit_reverse_in_place(v);
        let mut lenh = 1;
        while lenh < v.len() {
            self.forward_stage(v, lenh);
            lenh *= 2;
        }
    }

    /// Packed coefficient vector of the slot values (the encoding transform).
    pub fn fft_special_inv(&self, v: &mut [Complex64]) {
        let mut lenh = v.len() / 2;
        while lenh >= 1 {
            self.inverse_stage(v, lenh);
            lenh /= 2;
        }
        self.bit_reverse_in_place(v);
        let inv = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x *= inv);
    }

    /// Integer coefficients of `values` scaled by `scale`.
    pub fn encode_coeffs(&self, values: &[Complex64], scale: f64) -> Result<Vec<i128>, CkksError> {
        if values.len() != self.slots {
            return Err(CkksError::SlotCount { got: values.len(), want: self.slots });
        }
        let mut v = values.to_vec();
        self.fft_special_inv(&mut v);
        let mut out = vec![0i128; 2 * self.slots];
        let limit = 2f64.powi(120);
        for (i, z) in v.iter().enumerate() {
            let (re, im) = ((z.re * scale).round(), (z.im * scale).round());
            if !(re.abs() < limit && im.abs() < limit) {
                return Err(CkksError::EncodingOverflow);
            }
            out[i] = re as i128;
            out[i + self.slots] = im as i128;
        }
        Ok(out)
    }

    /// Encodes on an arbitrary basis, returning evaluation form.
    pub fn encode_on(&self, values: &[Complex64], scale: f64, basis: &RnsBasis) -> Result<RnsPoly, CkksError> {
        let coeffs = self.encode_coeffs(values, scale)?;
        let bits: f64 = basis.values().iter().map(|&q| (q as f64).log2()).sum();
        let max = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as f64;
        if max > 0.0 && max.log2() + 1.0 >= bits {
            return Err(CkksError::EncodingOverflow);
        }
        Ok(RnsPoly::from_signed(basis, &coeffs).to_eval())
    }

    pub fn encode(
        &self,
        params: &CkksParams,
        values: &[Complex64],
        level: usize,
        scale: f64,
    ) -> Result<Plaintext, CkksError> {
        params.check_level(level)?;
        let poly = self.encode_on(values, scale, &params.level_basis(level))?;
        Ok(Plaintext { poly, scale })
    }

    pub fn encode_real(
        &self,
        params: &CkksParams,
        values: &[f64],
        level: usize,
        scale: f64,
    ) -> Result<Plaintext, CkksError> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.encode(params, &v, level, scale)
    }

    /// Slot values of integer coefficients at `scale`.
    pub fn decode_coeffs(&self, coeffs: &[f64], scale: f64) -> Vec<Complex64> {
        let n = self.slots;
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(coeffs[i] / scale, coeffs[i + n] / scale)).collect();
        self.fft_special(&mut v);
        v
    }

    pub fn decode(&self, pt: &Plaintext) -> Vec<Complex64> {
        let coeffs = centered_coeffs(&pt.poly);
        self.decode_coeffs(&coeffs, pt.scale)
    }
}

/// Centered CRT lift of every coefficient, as f64.
pub fn centered_coeffs(p: &RnsPoly) -> Vec<f64> {
    let c = p.clone().to_coeff();
    let basis = c.basis();
    let k = basis.len();
    let n = c.degree();
    if k == 1 {
        let m = basis.modulus(0);
        return c.limb(0).iter().map(|&x| m.center(x) as f64).collect();
    }
    let q: BigUint = basis.values().iter().map(|&x| BigUint::from(x)).product();
    let half = &q >> 1;
    let mut terms = Vec::with_capacity(k);
    for i in 0..k {
        let m = basis.modulus(i);
        let qi = m.value();
        let qhat = &q / BigUint::from(qi);
        let qhat_mod = (&qhat % BigUint::from(qi)).to_u64().expect("residue fits");
        terms.push((qhat, m.inv(qhat_mod)));
    }
    let qi = BigInt::from(q.clone());
    (0..n)
        .map(|t| {
            let mut acc = BigUint::zero();
            for (i, (qhat, inv)) in terms.iter().enumerate() {
                let m = basis.modulus(i);
                let y = m.mul(c.limb(i)[t], *inv);
                acc += qhat * y;
            }
            acc %= &q;
            let v = if acc > half { BigInt::from(acc) - &qi } else { BigInt::from(acc) };
            v.to_f64().unwrap_or(f64::NAN)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_roundtrip() {
        let e = Encoder::with_degree(32);
        let orig: Vec<Complex64> =
            (0..16).map(|i| Complex64::new(i as f64 * 0.1 - 0.7, (i * i) as f64 * 0.01)).collect();
        let mut v = orig.clone();
        e.fft_special_inv(&mut v);
        e.fft_special(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_vector_is_constant_polynomial() {
        let e = Encoder::with_degree(16);
        let c = e.encode_coeffs(&[Complex64::new(0.5, 0.0); 8], 1024.0).unwrap();
        assert_eq!(c[0], 512);
        assert!(c[1..].iter().all(|&x| x == 0));
        assert!(e.encode_coeffs(&[Complex64::new(0.0, 0.0); 8], 1024.0).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn slot_count_is_checked() {
        let e = Encoder::with_degree(16);
        assert!(e.encode_coeffs(&[Complex64::new(1.0, 0.0); 3], 2.0).is_err());
    }
}
