use ckkslab::cost::search::{param_search, SearchSpace};
use ckkslab::cost::{cost_of_bootstrap, throughput, Flag, OptimizationSet};
use ckkslab::fixtures::{Presets, Targets};
use ckkslab::report::{cost_deviations, cost_tables, optimized_rows, sweep, throughput_table};

#[test]
fn baseline_tables_within_tolerance() {
    let p = Presets::load().unwrap();
    let t = Targets::load().unwrap();
    let rows = cost_tables(p.cost("baseline").unwrap(), &t).unwrap();
    let devs = cost_deviations(&rows, &t);
    for d in &devs {
        eprintln!(
            "{:14} {:13} {:4} {:>10.4} {:>10.4} {:+.4}",
            d.table, d.name, d.column, d.model, d.published, d.relative
        );
    }
    let bad: Vec<_> = devs.iter().filter(|d| !d.within).collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn report_identities_hold_for_every_row() {
    let p = Presets::load().unwrap();
    let t = Targets::load().unwrap();
    for name in ["baseline", "best-case"] {
        for r in cost_tables(p.cost(name).unwrap(), &t).unwrap() {
            assert!((r.reads_gb + r.writes_gb + r.key_gb - r.gb).abs() <= 1e-9 * r.gb.max(1.0));
            // Intensity is reported as zero when nothing moves.
            if r.gb > 0.0 {
                assert!((r.ai * r.gb - r.gop).abs() <= 1e-9 * r.gop.max(1.0), "{r:?}");
            }
        }
    }
}

#[test]
fn optimized_endpoint() {
    let p = Presets::load().unwrap();
    let t = Targets::load().unwrap();
    let best = p.cost("best-case").unwrap();
    let (_, devs) = optimized_rows(best, &t).unwrap();
    assert_eq!(devs.len(), 6);
    assert!(devs.iter().all(|d| d.within), "{devs:#?}");

    let base = p.cost("baseline").unwrap();
    let (b, _) = cost_of_bootstrap(&base.model(), &base.workload.bootstrap).unwrap();
    let (o, _) = cost_of_bootstrap(&best.model(), &best.workload.bootstrap).unwrap();
    assert!(o.arithmetic_intensity() / b.arithmetic_intensity() >= t.improvement.min_intensity);
    assert!(b.total_dram() / o.total_dram() >= t.improvement.min_dram);
}

#[test]
fn sweep_is_monotone() {
    let p = Presets::load().unwrap();
    let steps = sweep(p.cost("best-case").unwrap()).unwrap();
    assert_eq!(steps.len(), Flag::ALL.len() + 1);
    for w in steps.windows(2) {
        assert!(w[1].gb <= w[0].gb + 1e-12, "{} -> {}", w[0].flag, w[1].flag);
    }
    assert!((steps.last().unwrap().ai / 1.75 - 1.0).abs() <= 0.05);
}

#[test]
fn throughput_rows() {
    let t = Targets::load().unwrap();
    for r in throughput_table(&t).unwrap() {
        assert!(r.relative.abs() <= 0.05, "{}: {}", r.name, r.throughput);
    }
    let a = throughput(65536.0, 19.0, 19.0, 45.33e9, 900e9).unwrap();
    let b = throughput(65536.0, 19.0, 19.0, 45.33e9, 1800e9).unwrap();
    assert!((b.throughput / a.throughput - 2.0).abs() < 1e-12);
    assert!(throughput(1.0, 1.0, 1.0, 0.0, 1e9).unwrap().throughput.is_infinite());
}

#[test]
fn search_finds_best_case() {
    let t = Targets::load().unwrap();
    let top = &param_search(&SearchSpace::standard(), OptimizationSet::all()).unwrap()[0];
    assert_eq!((top.max_level, top.dnum, top.fft_iters), (t.search.max_level, t.search.dnum, t.search.fft_iters));

    // At the baseline grid point, compressed keys make one giant step per
    // transform stage optimal; full keys pull the balance back to BSGS.
    let mut point = SearchSpace::standard();
    point.max_level = 35..=35;
    point.dnum = 3..=3;
    point.fft_iters = 3..=3;
    let giants = |opts: OptimizationSet| {
        let e = param_search(&point, opts).unwrap().remove(0);
        let radices: Vec<usize> = e.radices.iter().chain(&e.radices).copied().collect();
        radices.iter().zip(&e.baby_steps).map(|(r, b)| (2 * r - 1).div_ceil(*b)).collect::<Vec<_>>()
    };
    let with = giants(OptimizationSet::all());
    let without = giants(OptimizationSet::all().without(Flag::KeyCompression));
    assert!(
        with.iter().filter(|&&g| g == 1).count() > without.iter().filter(|&&g| g == 1).count(),
        "{with:?} {without:?}"
    );
    assert!(without.iter().all(|&g| g > 1), "{without:?}");
}

#[test]
fn flags_never_increase_traffic() {
    let p = Presets::load().unwrap();
    let best = p.cost("best-case").unwrap();
    let sets = OptimizationSet::all_valid();
    for &s in &sets {
        let (base, _) = cost_of_bootstrap(&best.model_with(s), &best.workload.bootstrap).unwrap();
        for f in Flag::ALL {
            let more = s.with(f);
            if s.contains(f) || more.validate().is_err() {
                continue;
            }
            let (r, _) = cost_of_bootstrap(&best.model_with(more), &best.workload.bootstrap).unwrap();
            assert!(r.total_dram() <= base.total_dram() * (1.0 + 1e-12), "{s} + {f}");
        }
    }
}
