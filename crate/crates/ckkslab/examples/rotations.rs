//! Slot rotations, hoisted rotations and conjugation with compressed keys.

use ckkslab::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Evaluator, KeyRequest};
use ckkslab::fixtures::Presets;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = CkksParams::new(Presets::load()?.ckks("toy")?.spec.clone())?;
    let shifts = [1i64, 2, 4, -8];
    let req = KeyRequest { rotations: shifts.to_vec(), conjugate: true, compressed: true, ..Default::default() };
    let (sk, keys) = keygen(&p, 3, &req);
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let n = p.slots();
    let x: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let ct = encrypt_values(&p, &sk, &x, 3, &mut rng)?;

    let hoisted = ev.hrotate(&ct, &shifts)?;
    for (h, &k) in hoisted.iter().zip(&shifts) {
        let want: Vec<Complex64> = (0..n).map(|i| x[(i as i64 - k).rem_euclid(n as i64) as usize]).collect();
        let same = *h == ev.rotate(&ct, k)?;
        println!(
            "rotate by {k:3}: error {:.3e}, hoisted equals single: {same}",
            max_error(&decrypt_values(&p, &sk, h), &want)
        );
    }
    let conj: Vec<Complex64> = x.iter().map(|z| z.conj()).collect();
    println!("conjugate: error {:.3e}", max_error(&decrypt_values(&p, &sk, &ev.conjugate(&ct)?), &conj));
    Ok(())
}
