//! Encode, encrypt, compute and decrypt on a small context.

use ckkslab::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Evaluator, KeyRequest};
use ckkslab::fixtures::Presets;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = Presets::load()?.ckks("toy")?.clone();
    let p = CkksParams::new(preset.spec)?;
    println!("N = {}, slots = {}, levels = {}, dnum = {}", p.degree(), p.slots(), p.max_level(), p.dnum());

    let (sk, keys) = keygen(&p, 1, &KeyRequest { relin: true, ..Default::default() });
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let x: Vec<Complex64> = (0..p.slots()).map(|i| Complex64::new((i as f64 / 700.0).sin(), 0.25)).collect();
    let ct = encrypt_values(&p, &sk, &x, p.max_level(), &mut rng)?;
    println!("fresh ciphertext: level {}, {} words", ct.level(), ct.words());
    println!("decrypt error: {:.3e}", max_error(&decrypt_values(&p, &sk, &ct), &x));

    let sq = ev.mult(&ct, &ct)?;
    let want: Vec<Complex64> = x.iter().map(|v| v * v).collect();
    println!("x^2 at level {}: error {:.3e}", sq.level(), max_error(&decrypt_values(&p, &sk, &sq), &want));

    let lin = ev.add_const(&ev.mul_const(&ct, 3.0)?, -1.0);
    let want: Vec<Complex64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
    println!("3x - 1 at level {}: error {:.3e}", lin.level(), max_error(&decrypt_values(&p, &sk, &lin), &want));
    Ok(())
}
