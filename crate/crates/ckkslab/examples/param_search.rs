//! Exhaustive bootstrapping parameter search with and without optimizations.

use ckkslab::cost::search::{param_search, SearchSpace};
use ckkslab::cost::OptimizationSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SearchSpace::standard();
    for (label, opts) in [("no optimizations", OptimizationSet::empty()), ("all optimizations", OptimizationSet::all())]
    {
        let entries = param_search(&space, opts)?;
        println!("{label}: {} feasible points", entries.len());
        for e in entries.iter().take(3) {
            println!(
                "  L={} dnum={} fftIter={}  radices {:?}  level_out {}  {:.2} GB  AI {:.2}  throughput {:.1}",
                e.max_level, e.dnum, e.fft_iters, e.radices, e.level_out, e.dram_gb, e.intensity, e.throughput
            );
        }
    }
    Ok(())
}
