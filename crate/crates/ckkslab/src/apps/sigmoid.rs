//! Least-squares cubic approximation of the logistic function.

use serde::Serialize;

/// c0 + c1 t + c3 t^3; the even cubic term vanishes by symmetry of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cubic {
    pub c0: f64,
    pub c1: f64,
    pub c3: f64,
}

pub const FIT_RANGE: f64 = 8.0;
const FIT_SAMPLES: usize = 4001;

pub fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

impl Cubic {
    /// Least-squares fit of the logistic function on [-range, range] over
    /// the basis {1, t, t^3}.
    pub fn fit(range: f64) -> Self {
        let basis = |t: f64| [1.0, t, t * t * t];
        let mut gram = [[0.0f64; 3]; 3];
        let mut rhs = [0.0f64; 3];
        for i in 0..FIT_SAMPLES {
            let t = -range + 2.0 * range * i as f64 / (FIT_SAMPLES - 1) as f64;
            let phi = basis(t);
            let y = logistic(t);
            for r in 0..3 {
                rhs[r] += phi[r] * y;
                for c in 0..3 {
                    gram[r][c] += phi[r] * phi[c];
                }
            }
        }
        let x = solve3(gram, rhs);
        Self { c0: x[0], c1: x[1], c3: x[2] }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t + self.c3 * t * t * t
    }

    /// The fit of t -> logistic(-t).
    pub fn reflected(&self) -> Self {
        Self { c0: self.c0, c1: -self.c1, c3: -self.c3 }
    }

    /// Largest deviation from the logistic function on the fit interval.
    pub fn max_error(&self, range: f64) -> f64 {
        (0..=1000)
            .map(|i| {
                let t = -range + 2.0 * range * i as f64 / 1000.0;
                (self.eval(t) - logistic(t)).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl Default for Cubic {
    fn default() -> Self {
        Self::fit(FIT_RANGE)
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("nonempty");
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            let pivot = a[col];
            for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_shape() {
        let c = Cubic::default();
        assert!((c.c0 - 0.5).abs() < 1e-9);
        assert!(c.c1 > 0.1 && c.c1 < 0.25, "{c:?}");
        assert!(c.c3 < 0.0);
        assert!(c.max_error(FIT_RANGE) < 0.15);
    }

    #[test]
    fn solve_recovers_exact_cubic() {
        // Fitting data that is itself in the span returns it exactly.
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let b = [0.0, 1.0, 2.0].map(|r: f64| (0..3).map(|c| a[r as usize][c] * x[c]).sum());
        let got = solve3(a, b);
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
    }
}
