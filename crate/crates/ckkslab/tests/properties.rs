use ckkslab::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Encoder, KeyRequest, ParamSpec};
use ckkslab::selftest::{functional, NEW_MULT_NOISE};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn functional_properties_at_both_degrees() {
    for log_n in [12, 13] {
        let r = functional(log_n, 100, 7 + log_n as u64).unwrap();
        eprintln!("{r:?}");
        assert!(r.roundtrip < 2f64.powi(-20));
        for e in [r.mult, r.rotate, r.hrotate, r.conjugate] {
            assert!(e < 2f64.powi(-12), "{r:?}");
        }
        assert!(r.new_mult_gap < NEW_MULT_NOISE, "{r:?}");
        assert!(r.hrotate_identical);
        assert!(r.compressed_identical);
        assert!(r.passed());
    }
}

fn params() -> CkksParams {
    CkksParams::new(ParamSpec {
        log_n: 12,
        max_level: 3,
        dnum: 2,
        q0_bits: 61,
        scale_bits: 50,
        p_bits: 61,
        radices: vec![],
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn encode_decode_roundtrip(seed in any::<u64>(), amp in 0.001f64..100.0, level in 0usize..=3) {
        let p = params();
        let enc = Encoder::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..p.slots())
            .map(|_| Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
            .collect();
        let pt = enc.encode(&p, &v, level, p.delta()).unwrap();
        prop_assert!(max_error(&enc.decode(&pt), &v) < 2f64.powi(-20) * amp.max(1.0));

        let (sk, _) = keygen(&p, seed, &KeyRequest::default());
        let ct = encrypt_values(&p, &sk, &v, level, &mut rng).unwrap();
        prop_assert!(max_error(&decrypt_values(&p, &sk, &ct), &v) < 2f64.powi(-20) * amp.max(1.0));
    }
}
