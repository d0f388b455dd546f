//! Modeled operation costs against the published reference rows.

use ckkslab::fixtures::{Presets, Targets};
use ckkslab::report::{cost_deviations, cost_tables, optimized_rows};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let presets = Presets::load()?;
    let targets = Targets::load()?;
    let rows = cost_tables(presets.cost("baseline")?, &targets)?;
    let devs = cost_deviations(&rows, &targets);
    for (r, d) in rows.iter().zip(devs.chunks(3)) {
        println!(
            "{:13} {:13} {:9.4} GOP {:9.4} GB  AI {:.2}   deviation {:+.1}% / {:+.1}% / {:+.1}%",
            r.table,
            r.name,
            r.gop,
            r.gb,
            r.ai,
            100.0 * d[0].relative,
            100.0 * d[1].relative,
            100.0 * d[2].relative
        );
    }
    let (opt, _) = optimized_rows(presets.cost("best-case")?, &targets)?;
    println!();
    for r in &opt {
        println!("optimized {:13} {:9.4} GOP {:9.4} GB  AI {:.2}", r.name, r.gop, r.gb, r.ai);
    }
    Ok(())
}
