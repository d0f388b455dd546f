//! Limb-wise and slot-wise streams under two DDR4 address mappings.

use ckkslab::dram::{compare_mappings, DramSetup, Pattern};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = DramSetup::default_setup();
    println!(
        "peak {:.1} GB/s, {} slots x {} limbs",
        s.config.peak_bandwidth() / 1e9,
        s.workload.slots,
        s.workload.limbs
    );
    let traces = [Pattern::LimbWise, Pattern::SlotWise].map(|p| s.workload.trace(p, &s.config));
    let maps: Vec<_> = s.mappings.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let c = compare_mappings(&traces, &maps, &s.config)?;
    for e in &c.entries {
        println!("{:10} {:10} {:7.3} ms  {:7} row activations", e.mapping, e.pattern.label(), e.ms, e.activations);
    }
    if let Some(imp) = c.improvement("baseline", "optimized") {
        println!("total time improvement x{imp:.2}");
    }
    Ok(())
}
