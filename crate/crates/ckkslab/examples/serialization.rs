//! Byte encodings of parameters, ciphertexts and seeded switching keys.

use ckkslab::ckks::serial;
use ckkslab::ckks::{encrypt_values, keygen, CkksParams, KeyMaterial, KeyRequest, KeyTag};
use ckkslab::fixtures::Presets;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = CkksParams::new(Presets::load()?.ckks("toy")?.spec.clone())?;
    let (sk, keys) = keygen(&p, 1, &KeyRequest { relin: true, compressed: true, ..Default::default() });
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let ct = encrypt_values(&p, &sk, &vec![Complex64::new(0.5, 0.0); p.slots()], 3, &mut rng)?;

    let pb = serial::params_to_bytes(&p);
    let cb = serial::ciphertext_to_bytes(&p, &ct);
    assert_eq!(serial::ciphertext_from_bytes(&p, &cb)?, ct);
    println!("parameters {} bytes, level-3 ciphertext {} bytes", pb.len(), cb.len());

    if let KeyMaterial::Compressed(k) = keys.get(KeyTag::Relin)? {
        let compressed = serial::compressed_key_to_bytes(&p, k);
        let full = serial::key_to_bytes(&p, &k.expand(&p));
        println!("relinearization key: {} bytes seeded, {} bytes expanded", compressed.len(), full.len());
    }
    Ok(())
}
