use ckkslab::bootstrap::dft::{apply, Diagonals};
use ckkslab::bootstrap::poly::power_to_chebyshev;
use ckkslab::bootstrap::{
    eval_chebyshev, pt_mat_vec, BootConfig, Bootstrapper, BsgsLayout, DftPlan, Direction, SineSpec,
};
use ckkslab::ckks::{
    decrypt_values, encrypt_values, keygen, max_error, CkksParams, Encoder, Evaluator, KeyRequest, ParamSpec,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn params(max_level: usize) -> CkksParams {
    CkksParams::new(ParamSpec {
        log_n: 12,
        max_level,
        dnum: 3,
        q0_bits: 61,
        scale_bits: 50,
        p_bits: 61,
        radices: vec![32, 64],
    })
    .unwrap()
}

fn random_values(n: usize, amp: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))).collect()
}

fn rotations_for(layouts: &[&BsgsLayout]) -> Vec<i64> {
    let mut r: Vec<i64> = layouts.iter().flat_map(|l| l.rotations()).map(|s| -(s as i64)).collect();
    r.sort_unstable();
    r.dedup();
    r
}

#[test]
fn matvec_matches_plain_oracle() {
    let p = params(4);
    let n = p.slots();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut diags = Diagonals::new();
    for s in [0usize, 1, 2, 5, 9, n - 1, n - 3] {
        diags.insert(s, random_values(n, 1.0, &mut rng));
    }
    let enc = Encoder::new(&p);
    for baby in [None, Some(13)] {
        let layout = BsgsLayout::new(n, 1, &diags.keys().copied().collect::<Vec<_>>(), baby);
        let req = KeyRequest { rotations: rotations_for(&[&layout]), relin: true, ..Default::default() };
        let (sk, keys) = keygen(&p, 2, &req);
        let ev = Evaluator::new(&p, &keys);
        let x = random_values(n, 1.0, &mut rng);
        let ct = encrypt_values(&p, &sk, &x, 3, &mut rng).unwrap();
        let out = pt_mat_vec(&ev, &enc, &ct, &diags, &layout).unwrap();
        assert_eq!(out.level(), 2);
        assert_eq!(out.scale, ct.scale);
        let want = apply(&diags, &x);
        let got = decrypt_values(&p, &sk, &out);
        let norm = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_error(&got, &want) / norm < 2f64.powi(-10), "baby {baby:?}");
    }

    let id: Diagonals = [(0usize, vec![Complex64::new(1.0, 0.0); n])].into();
    let layout = BsgsLayout::new(n, 1, &[0], None);
    let (sk, keys) = keygen(&p, 3, &KeyRequest::default());
    let ev = Evaluator::new(&p, &keys);
    let x = random_values(n, 1.0, &mut rng);
    let ct = encrypt_values(&p, &sk, &x, 2, &mut rng).unwrap();
    let out = pt_mat_vec(&ev, &enc, &ct, &id, &layout).unwrap();
    assert!(max_error(&decrypt_values(&p, &sk, &out), &x) < 2f64.powi(-20));
}

#[test]
fn transform_pair_is_identity() {
    let p = params(5);
    let n = p.slots();
    let enc = Encoder::new(&p);
    let cts = DftPlan::new(&enc, Direction::CoeffToSlot, &[32, 64], Complex64::new(1.0 / n as f64, 0.0));
    let stc = DftPlan::new(&enc, Direction::SlotToCoeff, &[32, 64], Complex64::new(1.0, 0.0));
    let stages: Vec<_> = cts.stages.iter().chain(&stc.stages).collect();
    let layouts: Vec<BsgsLayout> = stages.iter().map(|s| BsgsLayout::new(n, s.step, &s.shifts(), None)).collect();
    let req = KeyRequest { rotations: rotations_for(&layouts.iter().collect::<Vec<_>>()), ..Default::default() };
    let (sk, keys) = keygen(&p, 4, &req);
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let x = random_values(n, 1.0, &mut rng);
    let mut ct = encrypt_values(&p, &sk, &x, 5, &mut rng).unwrap();
    for (s, l) in stages.iter().zip(&layouts) {
        ct = pt_mat_vec(&ev, &enc, &ct, &s.diagonals, l).unwrap();
    }
    assert_eq!(ct.level(), 1);
    assert!(max_error(&decrypt_values(&p, &sk, &ct), &x) < 2f64.powi(-12));
}

#[test]
fn chebyshev_evaluation() {
    let p = params(5);
    let n = p.slots();
    let (sk, keys) = keygen(&p, 6, &KeyRequest { relin: true, ..Default::default() });
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let z: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let ct = encrypt_values(&p, &sk, &z, 5, &mut rng).unwrap();

    let id = eval_chebyshev(&ev, &ct, &[0.0, 1.0]).unwrap();
    assert_eq!(id.level(), 4);
    assert!(max_error(&decrypt_values(&p, &sk, &id), &z) < 2f64.powi(-20));

    // Cubic sigmoid fit on [-4, 4], evaluated at x = 4u.
    let power = [0.5, 0.197, 0.0, -0.004];
    let scaled: Vec<f64> = power.iter().enumerate().map(|(k, c)| c * 4f64.powi(k as i32)).collect();
    let cheb = power_to_chebyshev(&scaled);
    let out = eval_chebyshev(&ev, &ct, &cheb).unwrap();
    assert_eq!(out.level(), 2);
    let want: Vec<Complex64> = xs
        .iter()
        .map(|&u| {
            let x = 4.0 * u;
            Complex64::new(power[0] + power[1] * x + power[3] * x * x * x, 0.0)
        })
        .collect();
    assert!(max_error(&decrypt_values(&p, &sk, &out), &want) < 2f64.powi(-10));
}

#[test]
fn toy_bootstrap_end_to_end() {
    let spec =
        ParamSpec { log_n: 12, max_level: 29, dnum: 2, q0_bits: 61, scale_bits: 50, p_bits: 61, radices: vec![32, 64] };
    let p = CkksParams::new(spec).unwrap();
    let config =
        BootConfig { radices: vec![32, 64], sine: SineSpec { degree: 31, range: 96.0, double_angle: 6 }, baby: None };
    let boot = Bootstrapper::new(&p, config).unwrap();
    assert_eq!(boot.level_out(&p), 13);
    let req = boot.key_request(&KeyRequest { compressed: true, ..Default::default() });
    let (sk, keys) = keygen(&p, 8, &req);
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let x = random_values(p.slots(), 1.0, &mut rng);
    let ct = encrypt_values(&p, &sk, &x, 0, &mut rng).unwrap();
    let out = boot.bootstrap(&ev, &ct).unwrap();
    assert!(out.level() > ct.level());
    assert_eq!(out.level() as i64, boot.level_out(&p));
    let err = max_error(&decrypt_values(&p, &sk, &out), &x);
    assert!(err < 2f64.powi(-8), "bootstrap error {err}");
}
