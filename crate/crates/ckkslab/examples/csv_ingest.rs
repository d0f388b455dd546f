//! Reads a labelled CSV, then trains the plaintext model the encrypted
//! trainer follows.

use ckkslab::apps::{gaussian_blobs, plain_train, Cubic, Dataset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => gaussian_blobs(16, 3, 1.5, 0.5, 7).to_csv()?,
    };
    let data = Dataset::from_csv(text.as_bytes())?;
    println!("{} samples, {} features", data.samples(), data.dim());
    let fit = Cubic::default();
    println!("sigmoid fit {fit:?}, max error {:.4} on [-8, 8]", fit.max_error(8.0));
    let z = data.signed_rows();
    let history = plain_train(&z, &vec![0.0; data.dim()], 1.0, 10, fit);
    for (i, w) in history.iter().enumerate() {
        println!("iteration {:2}: loss {:.5}, accuracy {:.3}", i + 1, data.loss(w), data.accuracy(w));
    }
    Ok(())
}
