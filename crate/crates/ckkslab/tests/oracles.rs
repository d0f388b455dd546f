use ckkslab::rns::{Prime, Rep, RnsBasis, RnsPoly};
use ckkslab::selftest::{
    basis_conversion_worst, mod_down_worst, modular_arithmetic_mismatches, ntt_convolution_mismatches, MOD_DOWN_BOUND,
};
use ckkslab::zq::{gen_ntt_prime, gen_ntt_primes, Modulus, NttTable};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn modular_arithmetic_oracle() {
    assert_eq!(modular_arithmetic_mismatches(1_000_000, 1), 0);
}

#[test]
fn ntt_matches_schoolbook_convolution() {
    assert_eq!(ntt_convolution_mismatches(300, 2), 0);
}

#[test]
fn basis_conversion_against_crt() {
    let worst = basis_conversion_worst(200, 3).expect("conversion outside its bound");
    assert!(worst <= 2, "{worst}");
}

#[test]
fn mod_down_against_exact_division() {
    let worst = mod_down_worst(120, 4);
    assert!(worst <= MOD_DOWN_BOUND, "{worst}");
}

fn moduli() -> Vec<Modulus> {
    let mut out: Vec<Modulus> = [20u32, 40, 61].iter().map(|&b| gen_ntt_prime(b, 16, &[]).unwrap()).collect();
    out.push(Modulus::new((1 << 61) - 1));
    out.push(Modulus::new(3));
    out
}

fn basis(n: usize, count: usize) -> RnsBasis {
    let ms = gen_ntt_primes(40, n, count, &[]).unwrap();
    RnsBasis::new(ms.into_iter().map(|m| Prime::new(m, n).unwrap()).collect(), 0)
}

proptest! {
    #[test]
    fn modular_ring_laws(seed in any::<u64>(), idx in 0usize..5) {
        let m = moduli()[idx];
        let q = m.value();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (x, y, z) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
        prop_assert_eq!(m.mul(x, m.add(y, z)), m.add(m.mul(x, y), m.mul(x, z)));
        prop_assert_eq!(m.sub(m.add(x, y), y), x);
        prop_assert_eq!(m.add(x, m.neg(x)), 0);
        let c = m.center(x);
        prop_assert!(c.unsigned_abs() <= q / 2);
        prop_assert_eq!(m.reduce_i128(c as i128), x);
    }

    #[test]
    fn ntt_is_invertible(seed in any::<u64>(), log_n in 1u32..8) {
        let n = 1usize << log_n;
        let table = NttTable::new(gen_ntt_prime(40, n, &[]).unwrap(), n).unwrap();
        let q = table.modulus().value();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        let mut b = a.clone();
        table.forward(&mut b);
        table.inverse(&mut b);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rns_products_commute_with_representation(seed in any::<u64>(), limbs in 1usize..4) {
        let n = 16;
        let b = basis(n, limbs);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let coeffs = |rng: &mut ChaCha20Rng| -> Vec<i128> { (0..n).map(|_| rng.gen_range(-1000..1000)).collect() };
        let (x, y) = (coeffs(&mut rng), coeffs(&mut rng));
        let px = RnsPoly::from_signed(&b, &x);
        let py = RnsPoly::from_signed(&b, &y);
        let prod = px.clone().ntt().unwrap().mul(&py.clone().ntt().unwrap()).unwrap().intt().unwrap();
        let mut want = vec![0i128; n];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                let k = (i + j) % n;
                want[k] += if i + j < n { xi * yj } else { -xi * yj };
            }
        }
        prop_assert_eq!(prod, RnsPoly::from_signed(&b, &want));
        prop_assert_eq!(px.clone().ntt().unwrap().intt().unwrap(), px);
        prop_assert_eq!(py.rep(), Rep::Coeff);
    }
}
