//! Encrypted logistic regression with bootstrapping, against the plaintext trainer.

use ckkslab::apps::{run_demo, DemoConfig};
use ckkslab::ckks::CkksParams;
use ckkslab::fixtures::Presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let preset = Presets::load()?.ckks("toy-boot")?.clone();
    let config = preset.boot_config().expect("toy-boot bootstraps");
    let p = CkksParams::new(preset.spec)?;
    let cfg = DemoConfig { iterations: 4, ..DemoConfig::default() };
    let report = run_demo(&p, config, &cfg, None)?;
    for r in &report.iterations {
        println!(
            "iteration {}  bootstraps {}  loss {:.5} (plaintext {:.5})  weight error {:.2e}",
            r.iteration, r.bootstraps, r.loss, r.plain_loss, r.max_weight_error
        );
    }
    println!("weights {:?}", report.weights);
    Ok(())
}
