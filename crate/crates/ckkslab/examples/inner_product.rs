//! Slot-wise inner product of two ciphertext vectors with one shared ModDown.

use ckkslab::apps::inner_product;
use ckkslab::ckks::{decrypt_values, encrypt_values, keygen, max_error, CkksParams, Evaluator, KeyRequest};
use ckkslab::fixtures::Presets;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = CkksParams::new(Presets::load()?.ckks("toy")?.spec.clone())?;
    let (sk, keys) = keygen(&p, 5, &KeyRequest { relin: true, ..Default::default() });
    let ev = Evaluator::new(&p, &keys);
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let n = p.slots();
    let terms = 8;
    let vec = |rng: &mut ChaCha20Rng| -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect()
    };
    let xs: Vec<_> = (0..terms).map(|_| vec(&mut rng)).collect();
    let ys: Vec<_> = (0..terms).map(|_| vec(&mut rng)).collect();
    let cx = xs.iter().map(|v| encrypt_values(&p, &sk, v, 4, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let cy = ys.iter().map(|v| encrypt_values(&p, &sk, v, 4, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let out = inner_product(&ev, &cx, &cy)?;
    let want: Vec<Complex64> = (0..n).map(|s| (0..terms).map(|k| xs[k][s] * ys[k][s]).sum()).collect();
    println!(
        "{terms} products summed at level {}: error {:.3e}",
        out.level(),
        max_error(&decrypt_values(&p, &sk, &out), &want)
    );
    Ok(())
}
