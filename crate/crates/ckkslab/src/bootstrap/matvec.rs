//! Baby-step giant-step plaintext matrix-vector products with double hoisting.

use num_complex::Complex64;

use super::dft::Diagonals;
use crate::ckks::{Ciphertext, CkksError, Encoder, Evaluator, KeyTag};
use crate::rns::{self, RnsPoly};
use crate::zq::galois_element;

/// How the nonzero diagonals of one matrix are split into baby and giant
/// rotations. Diagonal index k (shift k * step) is reached as baby
/// k_lo + j plus giant J * baby.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsgsLayout {
    pub slots: usize,
    pub step: usize,
    pub k_lo: i64,
    pub baby: usize,
    pub giant: usize,
}

impl BsgsLayout {
    /// Covers the diagonals with the shortest circular window and `baby`
    /// baby steps (defaults to the square root of the window).
    pub fn new(slots: usize, step: usize, shifts: &[usize], baby: Option<usize>) -> Self {
        assert!(!shifts.is_empty());
        assert!(shifts.iter().all(|s| s % step == 0));
        let m = (slots / step) as i64;
        let mut idx: Vec<i64> = shifts.iter().map(|&s| (s / step) as i64).collect();
        idx.sort_unstable();
        idx.dedup();
        // The window starts right after the largest circular gap.
        let mut start = 0;
        let mut best_gap = -1;
        for i in 0..idx.len() {
            let next = if i + 1 < idx.len() { idx[i + 1] } else { idx[0] + m };
            let gap = next - idx[i];
            if gap > best_gap {
                best_gap = gap;
                start = (i + 1) % idx.len();
            }
        }
        let mut k_lo = idx[start];
        if k_lo > m / 2 {
            k_lo -= m;
        }
        let span = (m - best_gap + 1) as usize;
        let baby = baby.unwrap_or_else(|| (span as f64).sqrt().ceil() as usize).clamp(1, span);
        Self { slots, step, k_lo, baby, giant: span.div_ceil(baby) }
    }

    /// Baby index j and giant index J of a shift.
    pub fn locate(&self, shift: usize) -> (usize, usize) {
        let m = (self.slots / self.step) as i64;
        let k = (shift / self.step) as i64;
        let off = (k - self.k_lo).rem_euclid(m) as usize;
        (off % self.baby, off / self.baby)
    }

    fn left(&self, k: i64) -> usize {
        (k * self.step as i64).rem_euclid(self.slots as i64) as usize
    }

    pub fn baby_shift(&self, j: usize) -> usize {
        self.left(self.k_lo + j as i64)
    }

    pub fn giant_shift(&self, g: usize) -> usize {
        self.left((g * self.baby) as i64)
    }

    /// Left-rotation amounts that need keys.
    pub fn rotations(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.baby).map(|j| self.baby_shift(j)).collect();
        out.extend((1..self.giant).map(|g| self.giant_shift(g)));
        out.retain(|&s| s != 0);
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn rotate_right(v: &[Complex64], r: usize) -> Vec<Complex64> {
    let n = v.len();
    (0..n).map(|i| v[(i + n - r % n) % n]).collect()
}

/// Computes M ct for the matrix given by `diagonals`, consuming one level and
/// keeping the scale.
///
/// The rotations of ct are hoisted: one decomposition and ModUp of a, then
/// for each baby step an automorphism of the raised digits and an inner
/// product left on the raised basis with P psi(b) added. Diagonals are
/// encoded on the raised basis at scale q_l and accumulated there, so each
/// giant step ends with a single ModDown; with one giant step the ModDown
/// and the rescale merge into one division by P q_l.
pub fn pt_mat_vec(
    ev: &Evaluator,
    encoder: &Encoder,
    ct: &Ciphertext,
    diagonals: &Diagonals,
    layout: &BsgsLayout,
) -> Result<Ciphertext, CkksError> {
    let p = ev.params;
    let level = ct.level();
    if level == 0 {
        return Err(CkksError::LevelExhausted);
    }
    let n = p.degree();
    let raised_basis = p.raised_basis(level);
    let q = p.q(level) as f64;
    let alpha = p.alpha();

    let mut used = vec![false; layout.baby];
    for &s in diagonals.keys() {
        used[layout.locate(s).0] = true;
    }
    let digits = ev.raise_digits(&ct.a)?;
    let mut babies: Vec<Option<(RnsPoly, RnsPoly)>> = Vec::with_capacity(layout.baby);
    for (j, &u) in used.iter().enumerate() {
        if !u {
            babies.push(None);
            continue;
        }
        let shift = layout.baby_shift(j);
        let raised = if shift == 0 {
            (rns::p_mod_up(&ct.a, p.raise())?, rns::p_mod_up(&ct.b, p.raise())?)
        } else {
            let g = galois_element(shift, n);
            let rotated: Vec<RnsPoly> = digits.iter().map(|d| d.automorph_galois(g)).collect();
            let (ra, mut rb) = ev.key_product(&rotated, level, KeyTag::Galois(g))?;
            ev.merge_down(&mut rb, &ct.b.automorph_galois(g))?;
            (ra, rb)
        };
        babies.push(Some(raised));
    }

    let mut groups: Vec<Option<(RnsPoly, RnsPoly)>> = vec![None; layout.giant];
    for (&s, d) in diagonals {
        let (j, g) = locate_checked(layout, s);
        let (ba, bb) = babies[j].as_ref().expect("baby computed");
        let rotated = rotate_right(d, layout.giant_shift(g));
        let pt = encoder.encode_on(&rotated, q, &raised_basis)?;
        let (ta, tb) = (ba.mul(&pt)?, bb.mul(&pt)?);
        match &mut groups[g] {
            Some((aa, ab)) => {
                aa.add_assign(&ta)?;
                ab.add_assign(&tb)?;
            }
            slot => *slot = Some((ta, tb)),
        }
    }

    let live: Vec<(usize, (RnsPoly, RnsPoly))> =
        groups.into_iter().enumerate().filter_map(|(g, x)| x.map(|v| (g, v))).collect();
    if live.len() == 1 && live[0].0 == 0 {
        let (_, (aa, ab)) = &live[0];
        return Ok(Ciphertext { a: rns::mod_down(aa, alpha + 1)?, b: rns::mod_down(ab, alpha + 1)?, scale: ct.scale });
    }
    let mut sum: Option<Ciphertext> = None;
    for (g, (aa, ab)) in live {
        let part = Ciphertext { a: rns::mod_down(&aa, alpha)?, b: rns::mod_down(&ab, alpha)?, scale: ct.scale * q };
        let part = if g == 0 { part } else { ev.rotate_left(&part, layout.giant_shift(g) as i64)? };
        sum = Some(match sum {
            None => part,
            Some(acc) => ev.add(&acc, &part)?,
        });
    }
    let mut out = ev.rescale(&sum.expect("at least one diagonal"))?;
    out.scale = ct.scale;
    Ok(out)
}

fn locate_checked(layout: &BsgsLayout, s: usize) -> (usize, usize) {
    let (j, g) = layout.locate(s);
    assert!(g < layout.giant, "shift {s} outside the layout window");
    (j, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_covers_wrapped_shifts() {
        let n = 64;
        let shifts = [0usize, 1, 2, 62, 63];
        let l = BsgsLayout::new(n, 1, &shifts, None);
        assert_eq!(l.k_lo, -2);
        assert!(l.baby * l.giant >= 5);
        for &s in &shifts {
            let (j, g) = l.locate(s);
            assert!(g < l.giant);
            assert_eq!((l.baby_shift(j) + l.giant_shift(g)) % n, s);
        }
    }

    #[test]
    fn single_giant_layout() {
        let l = BsgsLayout::new(32, 2, &[0, 2, 4, 6], Some(4));
        assert_eq!(l.giant, 1);
        assert_eq!(l.rotations(), vec![2, 4, 6]);
    }
}
