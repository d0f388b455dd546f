//! Word-sized modular arithmetic, NTT-friendly prime generation and the
//! negacyclic number-theoretic transform over a single prime.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZqError {
    #[error("prime bit width {0} outside the supported range 20..=62")]
    BadBits(u32),
    #[error("ring degree {0} is not a power of two")]
    BadDegree(usize),
    #[error("no prime q = 1 mod {two_n} exists in [2^{lo}, 2^{hi})")]
    Exhausted { two_n: u64, lo: u32, hi: u32 },
    #[error("modulus {q} has no primitive {two_n}-th root of unity")]
    NoRoot { q: u64, two_n: u64 },
    #[error("a lazy accumulator term bound {bound} leaves no headroom below q * 2^64 for q = {q}")]
    LazyOverflow { q: u64, bound: u128 },
}

/// A prime modulus below 2^62 with its Barrett constant floor(2^128 / q).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    ratio_lo: u64,
    ratio_hi: u64,
    two_nth_root: Option<u64>,
}

impl Modulus {
    pub fn new(q: u64) -> Self {
        assert!(q > 2 && q < (1 << 62), "modulus out of range");
        let ratio = u128::MAX / q as u128;
        Self { q, ratio_lo: ratio as u64, ratio_hi: (ratio >> 64) as u64, two_nth_root: None }
    }

    /// Attaches a primitive 2N-th root of unity, searching deterministically.
    pub fn with_ntt(q: u64, n: usize) -> Result<Self, ZqError> {
        let mut m = Self::new(q);
        m.two_nth_root = Some(find_two_nth_root(&m, n)?);
        Ok(m)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.q
    }

    pub fn two_nth_root(&self) -> Option<u64> {
        self.two_nth_root
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        debug_assert!(x < self.q && y < self.q);
        let s = x + y;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        debug_assert!(x < self.q && y < self.q);
        if x >= y {
            x - y
        } else {
            x + self.q - y
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        debug_assert!(x < self.q);
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    /// Barrett reduction of any value below q * 2^64.
    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        debug_assert!((x >> 64) < self.q as u128);
        let x0 = x as u64 as u128;
        let x1 = x >> 64;
        let r0 = self.ratio_lo as u128;
        let r1 = self.ratio_hi as u128;
        let mid = x1 * r0 + x0 * r1 + ((x0 * r0) >> 64);
        let est = x1 * r1 + (mid >> 64);
        let mut r = x.wrapping_sub(est.wrapping_mul(self.q as u128)) as u64;
        if r >= self.q {
            r -= self.q;
        }
        if r >= self.q {
            r -= self.q;
        }
        r
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        self.reduce_u128(x as u128)
    }

    /// Reduces a signed integer into [0, q).
    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        let q = self.q as i128;
        let mut r = x % q;
        if r < 0 {
            r += q;
        }
        r as u64
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        debug_assert!(x < self.q && y < self.q);
        self.reduce_u128(x as u128 * y as u128)
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base = self.reduce(base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: u64) -> u64 {
        let x = self.reduce(x);
        assert!(x != 0, "zero has no inverse");
        self.pow(x, self.q - 2)
    }

    pub fn shoup(&self, operand: u64) -> ShoupConst {
        ShoupConst::new(operand, self)
    }

    #[inline]
    pub fn mul_shoup(&self, y: u64, c: &ShoupConst) -> u64 {
        debug_assert!(y < self.q);
        let hi = ((y as u128 * c.precomp as u128) >> 64) as u64;
        let r = y.wrapping_mul(c.operand).wrapping_sub(hi.wrapping_mul(self.q));
        if r >= self.q {
            r - self.q
        } else {
            r
        }
    }

    /// Centered representative in (-q/2, q/2].
    #[inline]
    pub fn center(&self, x: u64) -> i64 {
        if x > self.q / 2 {
            x as i64 - self.q as i64
        } else {
            x as i64
        }
    }
}

/// A fixed multiplicand with its Shoup quotient floor(operand * 2^64 / q).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShoupConst {
    pub operand: u64,
    pub precomp: u64,
}

impl ShoupConst {
    pub fn new(operand: u64, m: &Modulus) -> Self {
        debug_assert!(operand < m.q);
        Self { operand, precomp: (((operand as u128) << 64) / m.q as u128) as u64 }
    }

    pub fn is_consistent(&self, m: &Modulus) -> bool {
        *self == Self::new(self.operand, m)
    }
}

/// Accumulates terms in 128 bits and reduces only when the next term could
/// push the sum past the Barrett input range.
#[derive(Debug, Clone)]
pub struct LazyAccumulator {
    m: Modulus,
    acc: u128,
    used: u128,
    capacity: u128,
}

impl LazyAccumulator {
    pub fn new(m: Modulus, term_bound: u128) -> Result<Self, ZqError> {
        Ok(Self { m, acc: 0, used: 0, capacity: lazy_capacity(&m, term_bound)? })
    }

    #[inline]
    pub fn push(&mut self, term: u128) {
        if self.used == self.capacity {
            self.acc = self.m.reduce_u128(self.acc) as u128;
            self.used = 1;
        }
        self.acc += term;
        self.used += 1;
    }

    pub fn finish(&self) -> u64 {
        self.m.reduce_u128(self.acc)
    }
}

/// How many terms below `term_bound` may be summed before a reduction is due.
pub fn lazy_capacity(m: &Modulus, term_bound: u128) -> Result<u128, ZqError> {
    let limit = ((m.q as u128) << 64) - 1;
    let capacity = limit / term_bound.max(m.q as u128);
    if capacity < 2 {
        return Err(ZqError::LazyOverflow { q: m.q, bound: term_bound });
    }
    Ok(capacity)
}

pub fn lazy_sum(xs: &[u64], m: &Modulus) -> u64 {
    let mut acc = LazyAccumulator::new(*m, m.q as u128).expect("residue bound always fits");
    for &x in xs {
        acc.push(x as u128);
    }
    acc.finish()
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn find_two_nth_root(m: &Modulus, n: usize) -> Result<u64, ZqError> {
    let q = m.q;
    let two_n = 2 * n as u64;
    if !(q - 1).is_multiple_of(two_n) {
        return Err(ZqError::NoRoot { q, two_n });
    }
    let cofactor = (q - 1) / two_n;
    for g in 2..q.min(1 << 20) {
        let x = m.pow(g, cofactor);
        if m.pow(x, n as u64) == q - 1 {
            return Ok(x);
        }
    }
    Err(ZqError::NoRoot { q, two_n })
}

/// Smallest prime in [2^(bits-1), 2^bits) with q = 1 mod 2N that is not excluded.
pub fn gen_ntt_prime(bits: u32, n: usize, exclude: &[u64]) -> Result<Modulus, ZqError> {
    if !(20..=62).contains(&bits) {
        return Err(ZqError::BadBits(bits));
    }
    if !n.is_power_of_two() {
        return Err(ZqError::BadDegree(n));
    }
    let two_n = 2 * n as u64;
    let lo = 1u64 << (bits - 1);
    let hi = if bits == 64 { u64::MAX } else { 1u64 << bits };
    let mut q = lo.div_ceil(two_n) * two_n + 1;
    while q < hi {
        if !exclude.contains(&q) && is_prime(q) {
            return Modulus::with_ntt(q, n);
        }
        q += two_n;
    }
    Err(ZqError::Exhausted { two_n, lo: bits - 1, hi: bits })
}

/// Successive NTT primes of the same width, each excluded from later searches.
pub fn gen_ntt_primes(bits: u32, n: usize, count: usize, exclude: &[u64]) -> Result<Vec<Modulus>, ZqError> {
    let mut taken = exclude.to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let m = gen_ntt_prime(bits, n, &taken)?;
        taken.push(m.value());
        out.push(m);
    }
    Ok(out)
}

pub fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Precomputed twiddles for the negacyclic NTT of length N over one prime.
///
/// The forward transform takes natural-order coefficients to bit-reversed
/// evaluations: output j holds a(psi^(2 brv(j) + 1)).
#[derive(Debug, Clone)]
pub struct NttTable {
    m: Modulus,
    n: usize,
    log_n: u32,
    fwd: Vec<ShoupConst>,
    inv: Vec<ShoupConst>,
    n_inv: ShoupConst,
}

impl NttTable {
    pub fn new(m: Modulus, n: usize) -> Result<Self, ZqError> {
        if !n.is_power_of_two() {
            return Err(ZqError::BadDegree(n));
        }
        let psi = match m.two_nth_root {
            Some(r) if m.pow(r, n as u64) == m.q - 1 => r,
            _ => find_two_nth_root(&m, n)?,
        };
        let log_n = n.trailing_zeros();
        let psi_inv = m.inv(psi);
        let mut fwd = Vec::with_capacity(n);
        let mut inv = Vec::with_capacity(n);
        for k in 0..n {
            let e = bit_reverse(k, log_n) as u64;
            fwd.push(m.shoup(m.pow(psi, e)));
            inv.push(m.shoup(m.pow(psi_inv, e)));
        }
        let n_inv = m.shoup(m.inv(n as u64));
        Ok(Self { m, n, log_n, fwd, inv, n_inv })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn log_degree(&self) -> u32 {
        self.log_n
    }

    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let m = &self.m;
        let mut t = self.n;
        let mut h = 1;
        while h < self.n {
            t >>= 1;
            for i in 0..h {
                let w = &self.fwd[h + i];
                let base = 2 * i * t;
                let (lo, hi) = a[base..base + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = m.mul_shoup(*y, w);
                    *x = m.add(u, v);
                    *y = m.sub(u, v);
                }
            }
            h <<= 1;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let m = &self.m;
        let mut t = 1;
        let mut h = self.n >> 1;
        while h >= 1 {
            for i in 0..h {
                let w = &self.inv[h + i];
                let base = 2 * i * t;
                let (lo, hi) = a[base..base + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = *y;
                    *x = m.add(u, v);
                    *y = m.mul_shoup(m.sub(u, v), w);
                }
            }
            t <<= 1;
            h >>= 1;
        }
        for x in a.iter_mut() {
            *x = m.mul_shoup(*x, &self.n_inv);
        }
    }
}

/// Galois element 5^k mod 2N realizing a slot rotation by k.
pub fn galois_element(k: usize, n: usize) -> usize {
    let two_n = 2 * n as u64;
    let slots = (n / 2) as u64;
    let mut e = 1u64;
    let mut b = 5u64;
    let mut k = (k as u64) % slots;
    while k > 0 {
        if k & 1 == 1 {
            e = e * b % two_n;
        }
        b = b * b % two_n;
        k >>= 1;
    }
    e as usize
}

/// Galois element of complex conjugation, X -> X^(2N-1).
pub fn conjugation_element(n: usize) -> usize {
    2 * n - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let m = Modulus::new(17);
        assert_eq!(m.add(0, 0), 0);
        assert_eq!(m.add(16, 5), 4);
        assert_eq!(m.mul(5, 7), 1);
        assert_eq!(m.mul(9, 1), 9);
        assert_eq!(m.sub(3, 5), 15);
        assert_eq!(m.inv(3), 6);
    }

    #[test]
    fn shoup_identity_and_zero() {
        let m = Modulus::new((1 << 61) - 1);
        let c = m.shoup(123456789);
        assert_eq!(m.mul_shoup(1, &c), 123456789);
        assert_eq!(m.mul_shoup(0, &c), 0);
        assert!(c.is_consistent(&m));
    }

    #[test]
    fn lazy_sum_edges() {
        let m = Modulus::new(97);
        assert_eq!(lazy_sum(&[], &m), 0);
        assert_eq!(lazy_sum(&[42], &m), 42);
    }

    #[test]
    fn lazy_accumulator_rejects_huge_terms() {
        let m = Modulus::new((1 << 61) - 1);
        assert!(LazyAccumulator::new(m, u128::MAX / 2).is_err());
    }

    #[test]
    fn prime_generation_small() {
        let p = gen_ntt_prime(20, 8, &[]).unwrap();
        assert_eq!(p.value() % 16, 1);
        assert!(p.value() >= 1 << 19 && p.value() < 1 << 20);
        let again = gen_ntt_prime(20, 8, &[]).unwrap();
        assert_eq!(p, again);
        let r = p.two_nth_root().unwrap();
        assert_eq!(p.pow(r, 16), 1);
        assert_eq!(p.pow(r, 8), p.value() - 1);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(gen_ntt_prime(10, 8, &[]), Err(ZqError::BadBits(10)));
        assert_eq!(gen_ntt_prime(30, 12, &[]), Err(ZqError::BadDegree(12)));
    }

    #[test]
    fn ntt_roundtrip_and_dc() {
        let n = 64;
        let m = gen_ntt_prime(40, n, &[]).unwrap();
        let t = NttTable::new(m, n).unwrap();
        let orig: Vec<u64> = (0..n as u64).map(|i| (i * 7919 + 3) % m.value()).collect();
        let mut a = orig.clone();
        t.forward(&mut a);
        t.inverse(&mut a);
        assert_eq!(a, orig);
        let mut c = vec![0u64; n];
        c[0] = 5;
        t.forward(&mut c);
        assert!(c.iter().all(|&v| v == 5));
    }

    #[test]
    fn galois_elements() {
        assert_eq!(galois_element(0, 16), 1);
        assert_eq!(galois_element(1, 16), 5);
        assert_eq!(galois_element(2, 16), 25);
        assert_eq!(conjugation_element(16), 31);
    }
}
