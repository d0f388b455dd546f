use ckkslab::ckks::eval::ksk_inner_prod;
use ckkslab::ckks::serial;
use ckkslab::ckks::{
    decrypt_values, encrypt_values, keygen, max_error, CkksError, CkksParams, Encoder, Evaluator, KeyMaterial,
    KeyRequest, KeyTag, ParamSpec,
};
use ckkslab::cost::{cost_of, Model, OpId, OptimizationSet};
use ckkslab::ops;
use ckkslab::rns;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn params() -> CkksParams {
    CkksParams::new(ParamSpec {
        log_n: 12,
        max_level: 5,
        dnum: 3,
        q0_bits: 61,
        scale_bits: 50,
        p_bits: 61,
        radices: vec![],
    })
    .unwrap()
}

fn random_values(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn all_keys(compressed: bool) -> KeyRequest {
    KeyRequest { relin: true, conjugate: true, rotations: vec![1, -1, 3, 5, 17], compressed }
}

const TOL: f64 = 1.0 / 4096.0;

#[test]
fn encrypt_decrypt_roundtrip() {
    let p = params();
    let (sk, _) = keygen(&p, 1, &KeyRequest::default());
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let v = random_values(p.slots(), &mut rng);
    for level in [0, 3, 5] {
        let ct = encrypt_values(&p, &sk, &v, level, &mut rng).unwrap();
        assert_eq!(ct.level(), level);
        assert_eq!(ct.words(), 2 * p.degree() * (level + 1));
        assert!(max_error(&decrypt_values(&p, &sk, &ct), &v) < 1e-9);
    }
}

#[test]
fn arithmetic_matches_plaintext() {
    let p = params();
    let (sk, keys) = keygen(&p, 3, &all_keys(false));
    let ev = Evaluator::new(&p, &keys);
    let enc = Encoder::new(&p);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let x = random_values(p.slots(), &mut rng);
    let y = random_values(p.slots(), &mut rng);
    let cx = encrypt_values(&p, &sk, &x, 5, &mut rng).unwrap();
    let cy = encrypt_values(&p, &sk, &y, 5, &mut rng).unwrap();

    let sum: Vec<_> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    let prod: Vec<_> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    assert!(max_error(&decrypt_values(&p, &sk, &ev.add(&cx, &cy).unwrap()), &sum) < TOL);

    let py = enc.encode(&p, &y, 5, p.delta()).unwrap();
    assert!(max_error(&decrypt_values(&p, &sk, &ev.pt_add(&cx, &py).unwrap()), &sum) < TOL);

    let pm = ev.pt_mult(&cx, &py).unwrap();
    assert_eq!(pm.level(), 4);
    assert!((pm.scale - p.delta()).abs() / p.delta() < 2f64.powi(-10));
    assert!(max_error(&decrypt_values(&p, &sk, &pm), &prod) < TOL);

    let m = ev.mult(&cx, &cy).unwrap();
    assert_eq!(m.level(), 4);
    assert!(max_error(&decrypt_values(&p, &sk, &m), &prod) < TOL);

    let nm = ev.new_mult(&cx, &cy).unwrap();
    assert_eq!(nm.level(), 4);
    let dm = decrypt_values(&p, &sk, &m);
    assert!(max_error(&decrypt_values(&p, &sk, &nm), &dm) < TOL);

    let c = ev.mul_const(&cx, -0.75).unwrap();
    let want: Vec<_> = x.iter().map(|a| a * -0.75).collect();
    assert!(max_error(&decrypt_values(&p, &sk, &c), &want) < TOL);
    assert_eq!(c.scale, cx.scale);

    let i = ev.mul_i(&cx);
    let want: Vec<_> = x.iter().map(|a| a * Complex64::i()).collect();
    assert!(max_error(&decrypt_values(&p, &sk, &i), &want) < TOL);

    let adj = ev.adjust(&cx, 2, p.delta() * 1.5).unwrap();
    assert_eq!(adj.level(), 2);
    assert_eq!(adj.scale, p.delta() * 1.5);
    assert!(max_error(&decrypt_values(&p, &sk, &adj), &x) < TOL);
}

#[test]
fn errors_are_reported() {
    let p = params();
    let (sk, keys) = keygen(&p, 5, &KeyRequest { relin: false, ..Default::default() });
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let v = random_values(p.slots(), &mut rng);
    let a = encrypt_values(&p, &sk, &v, 3, &mut rng).unwrap();
    let b = encrypt_values(&p, &sk, &v, 2, &mut rng).unwrap();
    assert!(matches!(ev.add(&a, &b), Err(CkksError::LevelMismatch(3, 2))));
    assert!(matches!(ev.mult(&a, &a), Err(CkksError::MissingKey(KeyTag::Relin))));
    assert!(matches!(ev.rotate(&a, 1), Err(CkksError::MissingKey(_))));
    let z = encrypt_values(&p, &sk, &v, 0, &mut rng).unwrap();
    assert!(matches!(ev.mul_const(&z, 2.0), Err(CkksError::LevelExhausted)));
    assert!(matches!(encrypt_values(&p, &sk, &v[..5], 1, &mut rng), Err(CkksError::SlotCount { .. })));
}

#[test]
fn rotations_and_conjugation() {
    let p = params();
    let (sk, keys) = keygen(&p, 7, &all_keys(false));
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let x = random_values(p.slots(), &mut rng);
    let n = p.slots();
    let cx = encrypt_values(&p, &sk, &x, 4, &mut rng).unwrap();
    for k in [1i64, -1, 3, 17] {
        let r = ev.rotate(&cx, k).unwrap();
        assert_eq!(r.level(), 4);
        let want: Vec<_> = (0..n).map(|i| x[(i as i64 - k).rem_euclid(n as i64) as usize]).collect();
        assert!(max_error(&decrypt_values(&p, &sk, &r), &want) < TOL, "k={k}");
    }
    let conj = ev.conjugate(&cx).unwrap();
    let want: Vec<_> = x.iter().map(|z| z.conj()).collect();
    assert!(max_error(&decrypt_values(&p, &sk, &conj), &want) < TOL);
    let back = ev.conjugate(&conj).unwrap();
    assert!(max_error(&decrypt_values(&p, &sk, &back), &x) < TOL);

    let ks = [1i64, 3, 5, 17];
    let hs = ev.hrotate(&cx, &ks).unwrap();
    for (h, &k) in hs.iter().zip(&ks) {
        assert_eq!(h, &ev.rotate(&cx, k).unwrap(), "hoisted rotation by {k} differs");
    }
}

#[test]
fn compressed_keys_are_output_invariant() {
    let p = params();
    let (sk, full) = keygen(&p, 9, &all_keys(false));
    let (sk2, comp) = keygen(&p, 9, &all_keys(true));
    assert_eq!(sk.coeffs(), sk2.coeffs());
    assert!(comp.iter().all(|k| matches!(k, KeyMaterial::Compressed(_))));
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let x = random_values(p.slots(), &mut rng);
    let cx = encrypt_values(&p, &sk, &x, 5, &mut rng).unwrap();
    let (e1, e2) = (Evaluator::new(&p, &full), Evaluator::new(&p, &comp));
    assert_eq!(e1.rotate(&cx, 3).unwrap(), e2.rotate(&cx, 3).unwrap());
    assert_eq!(e1.mult(&cx, &cx).unwrap(), e2.mult(&cx, &cx).unwrap());
    assert_eq!(e1.conjugate(&cx).unwrap(), e2.conjugate(&cx).unwrap());

    for k in comp.iter() {
        let KeyMaterial::Compressed(c) = k else { unreachable!() };
        let expanded = c.expand(&p);
        assert_eq!(expanded.compress(&p, c.seed).unwrap(), *c);
        let mut other = c.seed;
        other[0] ^= 1;
        assert!(expanded.compress(&p, other).is_err());
    }
}

#[test]
fn same_seed_same_keys() {
    let p = params();
    let (a, ka) = keygen(&p, 11, &all_keys(true));
    let (b, kb) = keygen(&p, 11, &all_keys(true));
    assert_eq!(a.coeffs(), b.coeffs());
    for (x, y) in ka.iter().zip(kb.iter()) {
        match (x, y) {
            (KeyMaterial::Compressed(x), KeyMaterial::Compressed(y)) => assert_eq!(x, y),
            _ => panic!("expected compressed keys"),
        }
    }
}

#[test]
fn p_mod_up_roundtrip() {
    let p = params();
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let basis = p.level_basis(3);
    let coeffs: Vec<i128> = (0..p.degree()).map(|_| rng.gen_range(-1i128 << 80..1i128 << 80)).collect();
    let x = rns::RnsPoly::from_signed(&basis, &coeffs).to_eval();
    let lifted = rns::p_mod_up(&x, p.raise()).unwrap();
    for i in 4..lifted.limb_count() {
        assert!(lifted.limb(i).iter().all(|&w| w == 0));
    }
    assert_eq!(rns::mod_down(&lifted, p.alpha()).unwrap(), x);
    let zero = rns::RnsPoly::zero(&basis, p.degree(), rns::Rep::Eval);
    assert!(rns::p_mod_up(&zero, p.raise()).unwrap().data().iter().all(|&w| w == 0));
}

#[test]
fn inner_product_matches_direct_sum() {
    let p = params();
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let basis = p.raised_basis(4);
    let n = p.degree();
    let rand_poly = |rng: &mut ChaCha20Rng| ckkslab::ckks::keys::sample_uniform(&basis, n, rng);
    let digits: Vec<_> = (0..2).map(|_| rand_poly(&mut rng)).collect();
    let key: Vec<_> = (0..3).map(|_| (rand_poly(&mut rng), rand_poly(&mut rng))).collect();
    let (a, b) = ksk_inner_prod(&digits, &key).unwrap();
    let mut wa = digits[0].mul(&key[0].0).unwrap();
    wa.add_assign(&digits[1].mul(&key[1].0).unwrap()).unwrap();
    let mut wb = digits[0].mul(&key[0].1).unwrap();
    wb.add_assign(&digits[1].mul(&key[1].1).unwrap()).unwrap();
    assert_eq!(a, wa);
    assert_eq!(b, wb);
}

#[test]
fn serialization_roundtrip() {
    let p = params();
    let (sk, keys) = keygen(&p, 14, &all_keys(true));
    let mut rng = ChaCha20Rng::seed_from_u64(15);
    let x = random_values(p.slots(), &mut rng);
    let ct = encrypt_values(&p, &sk, &x, 2, &mut rng).unwrap();
    let bytes = serial::ciphertext_to_bytes(&p, &ct);
    assert_eq!(&bytes[..4], b"CKLB");
    assert_eq!(serial::ciphertext_from_bytes(&p, &bytes).unwrap(), ct);
    let mut broken = bytes.clone();
    broken[10] ^= 0xff;
    assert!(serial::ciphertext_from_bytes(&p, &broken).is_err());
    assert!(serial::ciphertext_from_bytes(&p, &bytes[..bytes.len() - 1]).is_err());

    let pb = serial::params_to_bytes(&p);
    assert_eq!(serial::params_from_bytes(&pb).unwrap().hash(), p.hash());

    let KeyMaterial::Compressed(c) = keys.get(KeyTag::Relin).unwrap() else { panic!() };
    let cb = serial::compressed_key_to_bytes(&p, c);
    assert_eq!(&serial::compressed_key_from_bytes(&p, &cb).unwrap(), c);
    let full = c.expand(&p);
    let fb = serial::key_to_bytes(&p, &full);
    assert_eq!(serial::key_from_bytes(&p, &fb).unwrap(), full);
    assert!(cb.len() * 2 < fb.len() + 200);
}

/// Charges recorded by the functional pipeline equal the model's operation
/// counts when both count the same limbs.
mod op_counts {
    use super::*;

    fn model(p: &CkksParams, flags: OptimizationSet) -> Model {
        Model::new(p.log_n(), p.max_level(), p.dnum(), flags).with_extra_limbs(0)
    }

    fn check(label: &str, p: &CkksParams, flags: OptimizationSet, op: OpId, level: usize, run: impl FnOnce()) {
        let want = cost_of(&op, &model(p, flags), level).unwrap();
        ops::take();
        run();
        let got = ops::take();
        let rel = |a: f64, b: f64| (a - b).abs() / b.max(1.0);
        assert!(rel(got.mults, want.total_mults) < 1e-9, "{label}: mults {} vs {}", got.mults, want.total_mults);
        assert!(rel(got.total(), want.total_ops) < 1e-9, "{label}: ops {} vs {}", got.total(), want.total_ops);
    }

    #[test]
    fn api_and_subroutines() {
        let p = params();
        let (sk, keys) = keygen(&p, 16, &all_keys(false));
        let (_, ckeys) = keygen(&p, 16, &all_keys(true));
        let ev = Evaluator::new(&p, &keys);
        let cev = Evaluator::new(&p, &ckeys);
        let enc = Encoder::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let x = random_values(p.slots(), &mut rng);
        let none = OptimizationSet::empty();
        for level in [3usize, 5] {
            let ct = encrypt_values(&p, &sk, &x, level, &mut rng).unwrap();
            let pt = enc.encode(&p, &x, level, p.delta()).unwrap();
            check("PtAdd", &p, none, OpId::PtAdd, level, || drop(ev.pt_add(&ct, &pt)));
            check("Add", &p, none, OpId::Add, level, || drop(ev.add(&ct, &ct)));
            check("PtMult", &p, none, OpId::PtMult, level, || drop(ev.pt_mult(&ct, &pt)));
            check("Mult", &p, none, OpId::Mult, level, || drop(ev.mult(&ct, &ct).unwrap()));
            check("Rotate", &p, none, OpId::Rotate, level, || drop(ev.rotate(&ct, 3).unwrap()));
            check("Conjugate", &p, none, OpId::Conjugate, level, || drop(ev.conjugate(&ct).unwrap()));
            check("HRotate", &p, none, OpId::HRotate { rotations: 4 }, level, || {
                drop(ev.hrotate(&ct, &[1, 3, 5, 17]).unwrap())
            });
            let merged = OptimizationSet::from_flags(&[ckkslab::cost::Flag::MergedModdownRescale]);
            check("NewMult", &p, merged, OpId::Mult, level, || drop(ev.new_mult(&ct, &ct).unwrap()));

            let raised = p.raised_basis(level);
            let digit = ct.a.sub_poly(0..p.alpha());
            check("ModUp", &p, none, OpId::ModUp, level, || drop(rns::mod_up_into(&digit, &raised).unwrap()));
            let wide = rns::mod_up_into(&ct.a, &raised).unwrap();
            check("ModDown", &p, none, OpId::ModDown, level, || drop(rns::mod_down(&wide, p.alpha()).unwrap()));
            check("Decomp", &p, none, OpId::Decomp, level, || drop(rns::decomp(&ct.a, p.alpha())));
        }
        let top = p.max_level();
        let ct = encrypt_values(&p, &sk, &x, top, &mut rng).unwrap();
        let compressed = OptimizationSet::from_flags(&[ckkslab::cost::Flag::KeyCompression]);
        check("Rotate+compression", &p, compressed, OpId::Rotate, top, || drop(cev.rotate(&ct, 3).unwrap()));
        check("Mult+compression", &p, compressed, OpId::Mult, top, || drop(cev.mult(&ct, &ct).unwrap()));
    }
}
