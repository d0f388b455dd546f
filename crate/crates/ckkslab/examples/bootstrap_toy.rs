//! Bootstraps an exhausted ciphertext on the toy bootstrapping preset.

use std::time::Instant;

use ckkslab::bootstrap::Bootstrapper;
use ckkslab::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Evaluator, KeyRequest};
use ckkslab::fixtures::Presets;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = Presets::load()?.ckks("toy-boot")?.clone();
    let config = preset.boot_config().expect("toy-boot bootstraps");
    let p = CkksParams::new(preset.spec)?;
    let boot = Bootstrapper::new(&p, config)?;
    println!("depth {}, output level {}, {} rotation keys", boot.depth(), boot.level_out(&p), boot.rotations().len());

    let t = Instant::now();
    let (sk, keys) = keygen(&p, 8, &boot.key_request(&KeyRequest { compressed: true, ..Default::default() }));
    let ev = Evaluator::new(&p, &keys);
    println!("keygen {:.1} s", t.elapsed().as_secs_f64());

    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let x: Vec<Complex64> =
        (0..p.slots()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let ct = encrypt_values(&p, &sk, &x, 0, &mut rng)?;
    let t = Instant::now();
    let out = boot.bootstrap(&ev, &ct)?;
    let err = max_error(&decrypt_values(&p, &sk, &out), &x);
    println!(
        "level {} -> {} in {:.1} s, max error {err:.3e} (2^{:.1})",
        ct.level(),
        out.level(),
        t.elapsed().as_secs_f64(),
        err.log2()
    );
    Ok(())
}
