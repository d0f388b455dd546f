//! One PASS/FAIL line per reproduction criterion; exits nonzero on any
//! failure. Pass criterion numbers as arguments to run a subset.

use std::process::ExitCode;

use ckkslab::selftest::{run, CRITERIA};

fn main() -> ExitCode {
    let wanted: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (criterion, _, _) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&criterion) {
            continue;
        }
        let check = run(criterion);
        println!("{}", check.line());
        failed += usize::from(!check.passed);
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
