//! Residue-number-system polynomials over Z_Q[X]/(X^N + 1) and the limb-level
//! subroutines: NTT, automorphisms, fast basis conversion, ModUp, ModDown,
//! Rescale and digit decomposition.

use std::sync::Arc;

use thiserror::Error;

use crate::ops::{self, Charge};
use crate::zq::{bit_reverse, lazy_capacity, Modulus, NttTable, ZqError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RnsError {
    #[error(transparent)]
    Zq(#[from] ZqError),
    #[error("bases differ")]
    BasisMismatch,
    #[error("operation needs the {0:?} representation")]
    WrongRep(Rep),
    #[error("extension primes overlap the source basis")]
    Overlap,
    #[error("target basis does not contain the source basis")]
    NotSuperset,
    #[error("cannot drop {drop} of {limbs} limbs")]
    BadDrop { drop: usize, limbs: usize },
    #[error("ring degree mismatch")]
    DegreeMismatch,
}

/// One NTT-enabled prime.
#[derive(Debug)]
pub struct Prime {
    pub modulus: Modulus,
    pub ntt: NttTable,
}

impl Prime {
    pub fn new(modulus: Modulus, n: usize) -> Result<Arc<Self>, ZqError> {
        Ok(Arc::new(Self { ntt: NttTable::new(modulus, n)?, modulus }))
    }
}

/// An ordered list of distinct primes. The last `raise_count` primes are the
/// raising primes whose product is P.
#[derive(Debug, Clone)]
pub struct RnsBasis {
    primes: Vec<Arc<Prime>>,
    raise_count: usize,
}

impl PartialEq for RnsBasis {
    fn eq(&self, o: &Self) -> bool {
        self.primes.len() == o.primes.len()
            && self.primes.iter().zip(&o.primes).all(|(a, b)| a.modulus.value() == b.modulus.value())
    }
}

impl RnsBasis {
    pub fn new(primes: Vec<Arc<Prime>>, raise_count: usize) -> Self {
        assert!(raise_count <= primes.len());
        for (i, a) in primes.iter().enumerate() {
            for b in &primes[..i] {
                assert_ne!(a.modulus.value(), b.modulus.value(), "primes must be distinct");
            }
        }
        Self { primes, raise_count }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn raise_count(&self) -> usize {
        self.raise_count
    }

    pub fn primes(&self) -> &[Arc<Prime>] {
        &self.primes
    }

    pub fn modulus(&self, i: usize) -> &Modulus {
        &self.primes[i].modulus
    }

    pub fn values(&self) -> Vec<u64> {
        self.primes.iter().map(|p| p.modulus.value()).collect()
    }

    pub fn contains(&self, q: u64) -> bool {
        self.primes.iter().any(|p| p.modulus.value() == q)
    }

    pub fn position(&self, q: u64) -> Option<usize> {
        self.primes.iter().position(|p| p.modulus.value() == q)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let raise = range.end.saturating_sub(self.len() - self.raise_count).min(range.len());
        Self { primes: self.primes[range].to_vec(), raise_count: raise }
    }

    pub fn concat(&self, other: &RnsBasis) -> Self {
        let mut primes = self.primes.clone();
        primes.extend(other.primes.iter().cloned());
        Self::new(primes, other.raise_count)
    }

    /// The primes at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> Self {
        let first_raise = self.len() - self.raise_count;
        let raise = positions.iter().filter(|&&i| i >= first_raise).count();
        Self { primes: positions.iter().map(|&i| self.primes[i].clone()).collect(), raise_count: raise }
    }

    pub fn is_disjoint(&self, other: &RnsBasis) -> bool {
        other.primes.iter().all(|p| !self.contains(p.modulus.value()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Coeff,
    Eval,
}

/// A polynomial held as one limb of N residues per basis prime, limb-major.
#[derive(Debug, Clone)]
pub struct RnsPoly {
    basis: RnsBasis,
    n: usize,
    rep: Rep,
    data: Vec<u64>,
}

impl PartialEq for RnsPoly {
    fn eq(&self, o: &Self) -> bool {
        self.basis == o.basis && self.rep == o.rep && self.data == o.data
    }
}

impl RnsPoly {
    pub fn zero(basis: &RnsBasis, n: usize, rep: Rep) -> Self {
        Self { basis: basis.clone(), n, rep, data: vec![0; basis.len() * n] }
    }

    pub fn from_limbs(basis: &RnsBasis, n: usize, rep: Rep, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), basis.len() * n);
        for (i, limb) in data.chunks(n).enumerate() {
            let q = basis.modulus(i).value();
            debug_assert!(limb.iter().all(|&x| x < q));
        }
        Self { basis: basis.clone(), n, rep, data }
    }

    /// Coefficient-form polynomial from signed integer coefficients.
    pub fn from_signed(basis: &RnsBasis, coeffs: &[i128]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(basis, n, Rep::Coeff);
        for i in 0..basis.len() {
            let m = *basis.modulus(i);
            for (dst, &c) in p.limb_mut(i).iter_mut().zip(coeffs) {
                *dst = m.reduce_i128(c);
            }
        }
        p
    }

    pub fn basis(&self) -> &RnsBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn limb_count(&self) -> usize {
        self.basis.len()
    }

    pub fn limb(&self, i: usize) -> &[u64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn limb_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    fn log_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    fn check_same(&self, o: &Self) -> Result<(), RnsError> {
        if self.n != o.n {
            return Err(RnsError::DegreeMismatch);
        }
        if self.basis != o.basis {
            return Err(RnsError::BasisMismatch);
        }
        if self.rep != o.rep {
            return Err(RnsError::WrongRep(self.rep));
        }
        Ok(())
    }

    pub fn ntt(mut self) -> Result<Self, RnsError> {
        if self.rep != Rep::Coeff {
            return Err(RnsError::WrongRep(Rep::Coeff));
        }
        ops::record(Charge::ntt(self.limb_count(), self.log_n()), self.n);
        for i in 0..self.limb_count() {
            let p = self.basis.primes[i].clone();
            p.ntt.forward(self.limb_mut(i));
        }
        self.rep = Rep::Eval;
        Ok(self)
    }

    pub fn intt(mut self) -> Result<Self, RnsError> {
        if self.rep != Rep::Eval {
            return Err(RnsError::WrongRep(Rep::Eval));
        }
        ops::record(Charge::ntt(self.limb_count(), self.log_n()), self.n);
        for i in 0..self.limb_count() {
            let p = self.basis.primes[i].clone();
            p.ntt.inverse(self.limb_mut(i));
        }
        self.rep = Rep::Coeff;
        Ok(self)
    }

    pub fn to_eval(self) -> Self {
        match self.rep {
            Rep::Eval => self,
            Rep::Coeff => self.ntt().expect("coefficient input"),
        }
    }

    pub fn to_coeff(self) -> Self {
        match self.rep {
            Rep::Coeff => self,
            Rep::Eval => self.intt().expect("evaluation input"),
        }
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&Modulus, u64, u64) -> u64) -> Result<Self, RnsError> {
        self.check_same(o)?;
        let mut out = self.clone();
        for i in 0..self.limb_count() {
            let m = *self.basis.modulus(i);
            for (x, &y) in out.limb_mut(i).iter_mut().zip(o.limb(i)) {
                *x = f(&m, *x, y);
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self, RnsError> {
        ops::record(Charge::adds(self.limb_count()), self.n);
        self.zip_with(o, |m, x, y| m.add(x, y))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, RnsError> {
        ops::record(Charge::adds(self.limb_count()), self.n);
        self.zip_with(o, |m, x, y| m.sub(x, y))
    }

    /// Pointwise product; both operands must be in evaluation form.
    pub fn mul(&self, o: &Self) -> Result<Self, RnsError> {
        if self.rep != Rep::Eval {
            return Err(RnsError::WrongRep(Rep::Eval));
        }
        ops::record(Charge::mults(self.limb_count()), self.n);
        self.zip_with(o, |m, x, y| m.mul(x, y))
    }

    pub fn add_assign(&mut self, o: &Self) -> Result<(), RnsError> {
        self.check_same(o)?;
        ops::record(Charge::adds(self.limb_count()), self.n);
        for i in 0..self.limb_count() {
            let m = *self.basis.modulus(i);
            let (n, src) = (self.n, &o.data[i * o.n..(i + 1) * o.n]);
            for (x, &y) in self.data[i * n..(i + 1) * n].iter_mut().zip(src) {
                *x = m.add(*x, y);
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.limb_count() {
            let m = *self.basis.modulus(i);
            for x in out.limb_mut(i) {
                *x = m.neg(*x);
            }
        }
        out
    }

    /// Multiplies limb i by `consts[i]` (already reduced mod q_i).
    pub fn mul_limb_consts(&self, consts: &[u64]) -> Self {
        assert_eq!(consts.len(), self.limb_count());
        ops::record(Charge::mults(self.limb_count()), self.n);
        let mut out = self.clone();
        for (i, &c) in consts.iter().enumerate() {
            let m = *self.basis.modulus(i);
            let s = m.shoup(c);
            for x in out.limb_mut(i) {
                *x = m.mul_shoup(*x, &s);
            }
        }
        out
    }

    /// Multiplies by a signed integer scalar.
    pub fn mul_scalar(&self, c: i128) -> Self {
        let consts: Vec<u64> = (0..self.limb_count()).map(|i| self.basis.modulus(i).reduce_i128(c)).collect();
        self.mul_limb_consts(&consts)
    }

    /// Adds a signed integer to every evaluation point (the constant term in
    /// coefficient form).
    pub fn add_scalar(&self, c: i128) -> Self {
        let mut out = self.clone();
        ops::record(Charge::adds(self.limb_count()), self.n);
        for i in 0..self.limb_count() {
            let m = *self.basis.modulus(i);
            let v = m.reduce_i128(c);
            match self.rep {
                Rep::Eval => out.limb_mut(i).iter_mut().for_each(|x| *x = m.add(*x, v)),
                Rep::Coeff => {
                    let x = &mut out.limb_mut(i)[0];
                    *x = m.add(*x, v);
                }
            }
        }
        out
    }

    /// Multiplies by the monomial X^k, 0 <= k < 2N.
    pub fn mul_monomial(&self, k: usize) -> Self {
        let n = self.n;
        let k = k % (2 * n);
        let was_eval = self.rep == Rep::Eval;
        let c = self.clone().to_coeff();
        let mut out = RnsPoly::zero(&self.basis, n, Rep::Coeff);
        for l in 0..c.limb_count() {
            let m = *c.basis.modulus(l);
            let src = c.limb(l).to_vec();
            let dst = out.limb_mut(l);
            for (i, &x) in src.iter().enumerate() {
                let j = i + k;
                let (j, flip) = if j >= 2 * n {
                    (j - 2 * n, false)
                } else if j >= n {
                    (j - n, true)
                } else {
                    (j, false)
                };
                dst[j] = if flip { m.neg(x) } else { x };
            }
        }
        if was_eval {
            out.to_eval()
        } else {
            out
        }
    }

    /// Applies X -> X^g for an odd Galois element g. Pure index permutation.
    pub fn automorph_galois(&self, g: usize) -> Self {
        let n = self.n;
        let two_n = 2 * n;
        assert!(g % 2 == 1 && g < two_n);
        let mut out = RnsPoly::zero(&self.basis, n, self.rep);
        match self.rep {
            Rep::Coeff => {
                for l in 0..self.limb_count() {
                    let m = *self.basis.modulus(l);
                    let (src, dst) = (self.limb(l).to_vec(), out.limb_mut(l));
                    for (i, &x) in src.iter().enumerate() {
                        let j = i * g % two_n;
                        if j < n {
                            dst[j] = x;
                        } else {
                            dst[j - n] = m.neg(x);
                        }
                    }
                }
            }
            Rep::Eval => {
                let perm = eval_permutation(n, g);
                for l in 0..self.limb_count() {
                    let src = self.limb(l).to_vec();
                    let dst = out.limb_mut(l);
                    for (j, &p) in perm.iter().enumerate() {
                        dst[j] = src[p];
                    }
                }
            }
        }
        out
    }

    /// Rotation automorphism psi_k: X -> X^(5^k mod 2N).
    pub fn automorph(&self, k: usize) -> Self {
        self.automorph_galois(crate::zq::galois_element(k, self.n))
    }

    /// Keeps the first `keep` limbs.
    pub fn truncate(&self, keep: usize) -> Self {
        assert!(keep <= self.limb_count());
        Self { basis: self.basis.slice(0..keep), n: self.n, rep: self.rep, data: self.data[..keep * self.n].to_vec() }
    }

    /// Limbs [range] as a polynomial on the corresponding sub-basis.
    pub fn sub_poly(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            basis: self.basis.slice(range.clone()),
            n: self.n,
            rep: self.rep,
            data: self.data[range.start * self.n..range.end * self.n].to_vec(),
        }
    }

    /// The limbs at `positions` as a polynomial on the selected sub-basis.
    pub fn select_limbs(&self, positions: &[usize]) -> Self {
        let mut data = Vec::with_capacity(positions.len() * self.n);
        for &i in positions {
            data.extend_from_slice(self.limb(i));
        }
        Self { basis: self.basis.select(positions), n: self.n, rep: self.rep, data }
    }

    /// Adds `o` into the first `o.limb_count()` limbs; the primes must agree.
    pub fn add_assign_prefix(&mut self, o: &Self) -> Result<(), RnsError> {
        let k = o.limb_count();
        if k > self.limb_count() || self.basis.slice(0..k) != o.basis {
            return Err(RnsError::BasisMismatch);
        }
        if self.rep != o.rep {
            return Err(RnsError::WrongRep(self.rep));
        }
        ops::record(Charge::adds(k), self.n);
        for i in 0..k {
            let m = *self.basis.modulus(i);
            let n = self.n;
            for (x, &y) in self.data[i * n..(i + 1) * n].iter_mut().zip(o.limb(i)) {
                *x = m.add(*x, y);
            }
        }
        Ok(())
    }

    pub fn into_data(self) -> Vec<u64> {
        self.data
    }
}

/// Evaluation-domain index map of X -> X^g for the bit-reversed NTT layout.
pub fn eval_permutation(n: usize, g: usize) -> Vec<usize> {
    let log_n = n.trailing_zeros();
    let two_n = 2 * n;
    (0..n)
        .map(|j| {
            let e = 2 * bit_reverse(j, log_n) + 1;
            let e2 = e * g % two_n;
            bit_reverse((e2 - 1) / 2, log_n)
        })
        .collect()
}

/// Precomputed constants for converting from basis S to basis T.
struct ConvPlan {
    qhat_inv: Vec<u64>,
    qhat_mod_t: Vec<Vec<u64>>,
    q_multiples: Vec<Vec<u64>>,
}

impl ConvPlan {
    fn new(src: &RnsBasis, dst: &RnsBasis) -> Self {
        let s = src.len();
        let mut qhat_inv = Vec::with_capacity(s);
        for i in 0..s {
            let mi = src.modulus(i);
            let mut prod = 1u64;
            for k in 0..s {
                if k != i {
                    prod = mi.mul(prod, mi.reduce(src.modulus(k).value()));
                }
            }
            qhat_inv.push(mi.inv(prod));
        }
        let mut qhat_mod_t = vec![vec![0u64; dst.len()]; s];
        let mut q_multiples = vec![vec![0u64; s + 1]; dst.len()];
        for j in 0..dst.len() {
            let mt = dst.modulus(j);
            let mut full = 1u64;
            for k in 0..s {
                full = mt.mul(full, mt.reduce(src.modulus(k).value()));
            }
            for (i, row) in qhat_mod_t.iter_mut().enumerate() {
                let mut prod = 1u64;
                for k in 0..s {
                    if k != i {
                        prod = mt.mul(prod, mt.reduce(src.modulus(k).value()));
                    }
                }
                row[j] = prod;
            }
            for c in 1..=s {
                q_multiples[j][c] = mt.add(q_multiples[j][c - 1], full);
            }
        }
        Self { qhat_inv, qhat_mod_t, q_multiples }
    }
}

/// Centered fast basis conversion: for each coefficient x in [0, Q_S), returns
/// x + u Q_S reduced into each target prime with |u| <= (|S| + 1) / 2.
pub fn basis_convert(p: &RnsPoly, target: &RnsBasis) -> Result<RnsPoly, RnsError> {
    if p.rep != Rep::Coeff {
        return Err(RnsError::WrongRep(Rep::Coeff));
    }
    let n = p.n;
    let s = p.limb_count();
    let t = target.len();
    ops::record(Charge::conv(s, t), n);
    let plan = ConvPlan::new(&p.basis, target);
    let mut y = vec![0u64; s * n];
    let mut negs = vec![0u8; n];
    for i in 0..s {
        let m = *p.basis.modulus(i);
        let c = m.shoup(plan.qhat_inv[i]);
        let half = m.value() / 2;
        for (k, (dst, &x)) in y[i * n..(i + 1) * n].iter_mut().zip(p.limb(i)).enumerate() {
            let v = m.mul_shoup(x, &c);
            *dst = v;
            if v > half {
                negs[k] += 1;
            }
        }
    }
    let max_src = (0..s).map(|i| p.basis.modulus(i).value()).max().unwrap_or(1) as u128;
    let mut out = RnsPoly::zero(target, n, Rep::Coeff);
    let mut acc = vec![0u128; n];
    for j in 0..t {
        let mt = *target.modulus(j);
        let bound = max_src * mt.value() as u128;
        let limit = lazy_capacity(&mt, bound)?;
        acc.iter_mut().for_each(|a| *a = 0);
        let mut used = 0u128;
        for i in 0..s {
            if used == limit {
                acc.iter_mut().for_each(|a| *a = mt.reduce_u128(*a) as u128);
                used = 1;
            }
            let c = plan.qhat_mod_t[i][j] as u128;
            for (a, &v) in acc.iter_mut().zip(&y[i * n..(i + 1) * n]) {
                *a += v as u128 * c;
            }
            used += 1;
        }
        let qm = &plan.q_multiples[j];
        for ((dst, &a), &neg) in out.limb_mut(j).iter_mut().zip(&acc).zip(&negs) {
            *dst = mt.sub(mt.reduce_u128(a), qm[neg as usize]);
        }
    }
    Ok(out)
}

/// Extends `p` to `target`, which must contain every prime of `p`. The result
/// is in evaluation form and ordered like `target`.
pub fn mod_up_into(p: &RnsPoly, target: &RnsBasis) -> Result<RnsPoly, RnsError> {
    let positions: Vec<usize> = p
        .basis
        .primes()
        .iter()
        .map(|q| target.position(q.modulus.value()).ok_or(RnsError::NotSuperset))
        .collect::<Result<_, _>>()?;
    let ext_idx: Vec<usize> = (0..target.len()).filter(|i| !positions.contains(i)).collect();
    let eval = p.clone().to_eval();
    let mut out = RnsPoly::zero(target, p.n, Rep::Eval);
    for (src, &dst) in positions.iter().enumerate() {
        out.limb_mut(dst).copy_from_slice(eval.limb(src));
    }
    if ext_idx.is_empty() {
        return Ok(out);
    }
    let ext = RnsBasis::new(ext_idx.iter().map(|&i| target.primes()[i].clone()).collect(), 0);
    let coeff = eval.intt()?;
    let conv = basis_convert(&coeff, &ext)?.ntt()?;
    for (k, &dst) in ext_idx.iter().enumerate() {
        out.limb_mut(dst).copy_from_slice(conv.limb(k));
    }
    Ok(out)
}

/// Extends `p` with the disjoint primes of `extension`, appended after p's limbs.
pub fn mod_up(p: &RnsPoly, extension: &RnsBasis) -> Result<RnsPoly, RnsError> {
    if !p.basis.is_disjoint(extension) {
        return Err(RnsError::Overlap);
    }
    mod_up_into(p, &p.basis.concat(extension))
}

/// Divides by the product P of the last `drop` primes with rounding and
/// returns the result on the remaining primes, in evaluation form.
pub fn mod_down(p: &RnsPoly, drop: usize) -> Result<RnsPoly, RnsError> {
    let limbs = p.limb_count();
    if drop == 0 || drop >= limbs {
        return Err(RnsError::BadDrop { drop, limbs });
    }
    let n = p.n;
    let keep = limbs - drop;
    let eval = p.clone().to_eval();
    let dropped = eval.sub_poly(keep..limbs).intt()?;
    let kept_basis = p.basis.slice(0..keep);
    let conv = basis_convert(&dropped, &kept_basis)?.ntt()?;
    ops::record(Charge::moddown_tail(keep), n);
    let mut out = RnsPoly::zero(&kept_basis, n, Rep::Eval);
    for i in 0..keep {
        let m = *kept_basis.modulus(i);
        let mut pp = 1u64;
        for j in keep..limbs {
            pp = m.mul(pp, m.reduce(p.basis.modulus(j).value()));
        }
        let c = m.shoup(m.inv(pp));
        let (x, y) = (eval.limb(i), conv.limb(i));
        for ((dst, &a), &b) in out.limb_mut(i).iter_mut().zip(x).zip(y) {
            *dst = m.mul_shoup(m.sub(a, b), &c);
        }
    }
    Ok(out)
}

/// Divides by the last prime with rounding (one-limb ModDown on the slot-wise
/// path), returning evaluation form.
pub fn rescale(p: &RnsPoly) -> Result<RnsPoly, RnsError> {
    let c = p.limb_count();
    if c < 2 {
        return Err(RnsError::BadDrop { drop: 1, limbs: c });
    }
    let n = p.n;
    let log_n = p.log_n();
    let eval = p.clone().to_eval();
    let last_prime = p.basis.primes()[c - 1].clone();
    let ql = last_prime.modulus;
    ops::record(Charge::ntt(1, log_n), n);
    let mut last = eval.limb(c - 1).to_vec();
    last_prime.ntt.inverse(&mut last);
    let half = ql.value() / 2;
    let keep = p.basis.slice(0..c - 1);
    let mut out = RnsPoly::zero(&keep, n, Rep::Eval);
    let mut tmp = vec![0u64; n];
    for i in 0..c - 1 {
        let prime = keep.primes()[i].clone();
        let m = prime.modulus;
        ops::record(Charge::ntt(1, log_n) + Charge::new(3.0, 1.0), n);
        let shift = m.value() - m.reduce(ql.value());
        for (d, &v) in tmp.iter_mut().zip(&last) {
            *d = if v > half { m.reduce_u128(v as u128 + shift as u128) } else { m.reduce(v) };
        }
        prime.ntt.forward(&mut tmp);
        let c_inv = m.shoup(m.inv(m.reduce(ql.value())));
        for ((dst, &a), &b) in out.limb_mut(i).iter_mut().zip(eval.limb(i)).zip(&tmp) {
            *dst = m.mul_shoup(m.sub(a, b), &c_inv);
        }
    }
    Ok(out)
}

/// Multiplies a chain polynomial by P and represents it on chain + raise
/// primes; the raise limbs are zero.
pub fn p_mod_up(p: &RnsPoly, raise: &RnsBasis) -> Result<RnsPoly, RnsError> {
    if !p.basis.is_disjoint(raise) {
        return Err(RnsError::Overlap);
    }
    let k = p.limb_count();
    ops::record(Charge::pmodup(k), p.n);
    let full = p.basis.concat(raise);
    let mut out = RnsPoly::zero(&full, p.n, p.rep);
    for i in 0..k {
        let m = *p.basis.modulus(i);
        let mut pm = 1u64;
        for r in raise.primes() {
            pm = m.mul(pm, m.reduce(r.modulus.value()));
        }
        let c = m.shoup(pm);
        for (dst, &x) in out.limb_mut(i).iter_mut().zip(p.limb(i)) {
            *dst = m.mul_shoup(x, &c);
        }
    }
    Ok(out)
}

/// One decomposition digit: a contiguous run of at most alpha limbs.
#[derive(Debug, Clone)]
pub struct Digit {
    pub index: usize,
    pub poly: RnsPoly,
}

/// Splits p into ceil(limbs / alpha) digits of contiguous limbs.
pub fn decomp(p: &RnsPoly, alpha: usize) -> Vec<Digit> {
    assert!(alpha > 0);
    let limbs = p.limb_count();
    ops::record(Charge::decomp(limbs), p.n);
    (0..limbs.div_ceil(alpha))
        .map(|j| Digit { index: j, poly: p.sub_poly(j * alpha..((j + 1) * alpha).min(limbs)) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::gen_ntt_primes;

    fn basis(n: usize, bits: u32, k: usize) -> RnsBasis {
        let ms = gen_ntt_primes(bits, n, k, &[]).unwrap();
        RnsBasis::new(ms.into_iter().map(|m| Prime::new(m, n).unwrap()).collect(), 0)
    }

    #[test]
    fn automorph_identity_and_composition() {
        let b = basis(16, 30, 2);
        let coeffs: Vec<i128> = (0..16).map(|i| i * 3 - 7).collect();
        let p = RnsPoly::from_signed(&b, &coeffs);
        assert_eq!(p.automorph(0), p);
        assert_eq!(p.automorph(1).automorph(1), p.automorph(2));
        let e = p.clone().ntt().unwrap();
        assert_eq!(e.automorph(3).intt().unwrap(), p.automorph(3));
    }

    #[test]
    fn decomp_partitions() {
        let b = basis(8, 30, 5);
        let p = RnsPoly::from_signed(&b, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let d = decomp(&p, 2);
        assert_eq!(d.len(), 3);
        let mut joined = Vec::new();
        for x in &d {
            joined.extend_from_slice(x.poly.data());
        }
        assert_eq!(joined, p.data());
        assert_eq!(decomp(&p, 5).len(), 1);
    }

    #[test]
    fn pmodup_then_moddown_is_exact() {
        let b = basis(16, 40, 4);
        let chain = b.slice(0..2);
        let raise = b.slice(2..4);
        let coeffs: Vec<i128> = (0..16).map(|i| (i * 12345 - 99999) as i128).collect();
        let p = RnsPoly::from_signed(&chain, &coeffs).ntt().unwrap();
        let up = p_mod_up(&p, &raise).unwrap();
        assert!(up.limb(2).iter().all(|&x| x == 0));
        assert_eq!(mod_down(&up, 2).unwrap(), p);
    }

    #[test]
    fn mod_up_empty_extension_and_overlap() {
        let b = basis(8, 30, 3);
        let p = RnsPoly::from_signed(&b.slice(0..2), &[1, -1, 2, -2, 3, -3, 4, -4]).ntt().unwrap();
        let empty = b.slice(3..3);
        assert_eq!(mod_up(&p, &empty).unwrap(), p);
        assert_eq!(mod_up(&p, &b.slice(1..3)).unwrap_err(), RnsError::Overlap);
    }

    #[test]
    fn mod_down_rejects_bad_drop() {
        let b = basis(8, 30, 2);
        let p = RnsPoly::zero(&b, 8, Rep::Eval);
        assert!(mod_down(&p, 2).is_err());
    }
}
