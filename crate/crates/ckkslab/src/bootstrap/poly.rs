//! Chebyshev polynomial evaluation and the modular-reduction approximation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ckks::{Ciphertext, CkksError, Evaluator};

/// Chebyshev coefficients c_0..c_d of the interpolant of `f` on [-1, 1] at
/// the d + 1 Chebyshev nodes.
pub fn chebyshev_interpolate(f: impl Fn(f64) -> f64, degree: usize) -> Vec<f64> {
    let m = degree + 1;
    let nodes: Vec<f64> = (0..m).map(|k| (PI * (k as f64 + 0.5) / m as f64).cos()).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    (0..m)
        .map(|j| {
            let s: f64 = (0..m).map(|k| values[k] * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos()).sum();
            let c = 2.0 * s / m as f64;
            if j == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Clenshaw evaluation of sum c_k T_k(x).
pub fn chebyshev_eval(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Chebyshev coefficients of a power-basis polynomial.
pub fn power_to_chebyshev(power: &[f64]) -> Vec<f64> {
    let d = power.len().max(1) - 1;
    // x^k expanded in T_j, built by x * T_j = (T_{j+1} + T_{|j-1|}) / 2.
    let mut out = vec![0.0; d + 1];
    let mut xk = vec![0.0; d + 1];
    xk[0] = 1.0;
    for (k, &p) in power.iter().enumerate() {
        for j in 0..=d {
            out[j] += p * xk[j];
        }
        if k == d {
            break;
        }
        let mut next = vec![0.0; d + 1];
        for j in 0..=d {
            if xk[j] == 0.0 {
                continue;
            }
            if j < d {
                next[j + 1] += xk[j] / 2.0;
            }
            if j == 0 {
                next[1] += xk[0] / 2.0;
            } else {
                next[j - 1] += xk[j] / 2.0;
            }
        }
        xk = next;
    }
    out
}

/// Multiplicative depth of `eval_chebyshev` for a degree.
pub fn chebyshev_depth(degree: usize) -> usize {
    degree.next_power_of_two().trailing_zeros() as usize + 1
}

/// Evaluates sum c_k T_k(x) slot-wise for x in [-1, 1].
///
/// Every T_k is built by the product recurrences, then all are combined with
/// integer constants in a single level.
pub fn eval_chebyshev(ev: &Evaluator, ct: &Ciphertext, coeffs: &[f64]) -> Result<Ciphertext, CkksError> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Err(CkksError::BadParams("polynomial must have degree at least 1".into()));
    }
    if ct.level() < chebyshev_depth(d) {
        return Err(CkksError::LevelExhausted);
    }
    let mut t: Vec<Option<Ciphertext>> = vec![None; d + 1];
    t[1] = Some(ct.clone());
    for k in 2..=d {
        let tk = if k % 2 == 0 {
            let h = t[k / 2].as_ref().expect("computed");
            let sq = ev.square(h)?;
            ev.add_const(&ev.mul_int(&sq, 2), -1.0)
        } else {
            let (x, y) = (t[k / 2].as_ref().expect("computed"), t[k / 2 + 1].as_ref().expect("computed"));
            let lvl = x.level().min(y.level());
            let prod = ev.mult(&ev.level_down(x, lvl)?, &ev.level_down(y, lvl)?)?;
            let two = ev.mul_int(&prod, 2);
            let t1 = ev.adjust(ct, two.level(), two.scale)?;
            ev.sub(&two, &t1)?
        };
        t[k] = Some(tk);
    }
    let low = t.iter().flatten().map(|c| c.level()).min().expect("nonempty");
    let target = ct.scale;
    let q = ev.params.q(low) as f64;
    let mut acc: Option<Ciphertext> = None;
    for (k, tk) in t.iter().enumerate().skip(1) {
        let tk = tk.as_ref().expect("computed");
        if coeffs[k] == 0.0 {
            continue;
        }
        let down = ev.level_down(tk, low)?;
        let factor = (coeffs[k] * target * q / down.scale).round() as i128;
        let mut term = ev.mul_int(&down, factor);
        term.scale = target * q;
        acc = Some(match acc {
            None => term,
            Some(a) => ev.add(&a, &term)?,
        });
    }
    let acc = match acc {
        Some(a) => a,
        None => {
            let z = ev.level_down(ct, low)?;
            let mut zero = ev.mul_int(&z, 0);
            zero.scale = target * q;
            zero
        }
    };
    let mut out = ev.rescale(&acc)?;
    out.scale = target;
    Ok(ev.add_const(&out, coeffs[0]))
}

/// Approximation of x -> sin(2 pi K x) / (2 pi) on [-1, 1]: a Chebyshev
/// interpolant of cos(2 pi (K x - 1/4) / 2^r) followed by r double-angle
/// steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSpec {
    pub degree: usize,
    /// Bound K on |t / q_0| for the raised plaintext t.
    pub range: f64,
    pub double_angle: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinePoly {
    pub spec: SineSpec,
    pub coeffs: Vec<f64>,
    /// Largest deviation from sin(2 pi K x) over a dense sweep of [-1, 1].
    pub max_error: f64,
}

impl SinePoly {
    pub fn new(spec: SineSpec) -> Self {
        let (k, r) = (spec.range, spec.double_angle as i32);
        let coeffs = chebyshev_interpolate(|x| (2.0 * PI * (k * x - 0.25) / 2f64.powi(r)).cos(), spec.degree);
        let mut poly = Self { spec, coeffs, max_error: 0.0 };
        let samples = 20_000;
        poly.max_error = (0..=samples)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / samples as f64;
                (poly.eval_plain(x) - (2.0 * PI * k * x).sin()).abs()
            })
            .fold(0.0, f64::max);
        poly
    }

    /// Plaintext model of the homomorphic evaluation.
    pub fn eval_plain(&self, x: f64) -> f64 {
        let mut y = chebyshev_eval(&self.coeffs, x);
        for _ in 0..self.spec.double_angle {
            y = 2.0 * y * y - 1.0;
        }
        y
    }

    pub fn depth(&self) -> usize {
        chebyshev_depth(self.spec.degree) + self.spec.double_angle
    }

    /// Evaluates sin(2 pi K x) slot-wise on a ciphertext with real slots.
    pub fn eval(&self, ev: &Evaluator, ct: &Ciphertext) -> Result<Ciphertext, CkksError> {
        let mut y = eval_chebyshev(ev, ct, &self.coeffs)?;
        for _ in 0..self.spec.double_angle {
            let sq = ev.square(&y)?;
            y = ev.add_const(&ev.mul_int(&sq, 2), -1.0);
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_polynomials() {
        let c = chebyshev_interpolate(|x| 4.0 * x * x * x - 3.0 * x, 5);
        for (k, &v) in c.iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "c_{k} = {v}");
        }
        let p = [0.5, -1.0, 0.25, 2.0];
        let cheb = power_to_chebyshev(&p);
        for i in 0..=10 {
            let x = -1.0 + 0.2 * i as f64;
            let direct = p[0] + p[1] * x + p[2] * x * x + p[3] * x * x * x;
            assert!((chebyshev_eval(&cheb, x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn toy_sine_accuracy() {
        let s = SinePoly::new(SineSpec { degree: 31, range: 96.0, double_angle: 6 });
        assert!(s.max_error < 1e-6, "max error {}", s.max_error);
        assert_eq!(s.depth(), 12);
    }

    #[test]
    fn depths() {
        assert_eq!(chebyshev_depth(1), 1);
        assert_eq!(chebyshev_depth(3), 3);
        assert_eq!(chebyshev_depth(31), 6);
        assert_eq!(chebyshev_depth(63), 7);
    }
}
