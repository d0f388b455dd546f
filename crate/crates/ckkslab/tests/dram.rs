use std::collections::HashSet;

use ckkslab::dram::{compare_mappings, simulate, AccessTrace, AddressMapping, DramConfig, DramSetup, Pattern};
use proptest::prelude::*;

fn reduced(cfg: &DramConfig, columns: u32, groups: u32, banks: u32, rows: u32) -> DramConfig {
    DramConfig { columns, bank_groups: groups, banks_per_group: banks, rows, ..cfg.clone() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mappings_are_bijective(c in 3u32..6, g in 0u32..3, b in 0u32..3, extra_slot in 0u32..3, limb_bits in 0u32..4) {
        let base = DramSetup::default_setup().config;
        let slot_bits = c + g + b + extra_slot;
        let row_bits = extra_slot + g + b + limb_bits;
        let cfg = reduced(&base, 1 << c, 1 << g, 1 << b, 1 << row_bits);
        for m in [AddressMapping::baseline(&cfg, slot_bits, limb_bits), AddressMapping::optimized(&cfg, slot_bits, limb_bits)] {
            if m.validate(&cfg, slot_bits, limb_bits).is_err() {
                // The optimized layout needs enough limb bits to cover the banks.
                prop_assert!(limb_bits < g + b);
                continue;
            }
            let mut seen = HashSet::new();
            for slot in 0..1u32 << slot_bits {
                for limb in 0..1u32 << limb_bits {
                    let loc = m.decode(slot, limb);
                    prop_assert!(loc.column < cfg.columns && loc.bank_group < cfg.bank_groups);
                    prop_assert!(loc.bank < cfg.banks_per_group && loc.row < cfg.rows);
                    prop_assert!(seen.insert(loc));
                }
            }
            prop_assert_eq!(seen.len(), 1usize << (slot_bits + limb_bits));
        }
    }
}

#[test]
fn full_geometry_bijective() {
    let s = DramSetup::default_setup();
    for name in ["baseline", "optimized"] {
        let m = s.mapping(name).unwrap();
        let mut seen = HashSet::new();
        for limb in 0..64 {
            for slot in (0..1u32 << 17).step_by(97) {
                assert!(seen.insert(m.decode(slot, limb)));
            }
        }
    }
}

fn stream(s: &DramSetup, p: Pattern, limbs: u32) -> AccessTrace {
    AccessTrace::new(p, s.workload.slots, limbs, s.config.burst_words(), s.workload.block_bursts)
}

#[test]
fn conservation_and_lower_bound() {
    let s = DramSetup::default_setup();
    for name in ["baseline", "optimized"] {
        for p in [Pattern::LimbWise, Pattern::SlotWise] {
            let tr = stream(&s, p, 5);
            let r = simulate(&tr, s.mapping(name).unwrap(), &s.config).unwrap();
            assert_eq!(r.bytes, 5 * s.workload.slots as u64 * 8);
            assert!(r.total_time_seconds >= r.bytes as f64 / s.config.peak_bandwidth());
        }
    }
}

#[test]
fn limb_streaming_activations() {
    let s = DramSetup::default_setup();
    let limbs = 7;
    let r = simulate(&stream(&s, Pattern::LimbWise, limbs), s.mapping("baseline").unwrap(), &s.config).unwrap();
    let limb_bytes = s.workload.slots as u64 * 8;
    assert_eq!(r.row_activations, limbs as u64 * limb_bytes.div_ceil(s.config.row_bytes()));
}

#[test]
fn mapping_comparison() {
    let s = DramSetup::default_setup();
    let traces = [s.workload.trace(Pattern::LimbWise, &s.config), s.workload.trace(Pattern::SlotWise, &s.config)];
    let maps = [("baseline", s.mapping("baseline").unwrap()), ("optimized", s.mapping("optimized").unwrap())];
    let a = compare_mappings(&traces, &maps, &s.config).unwrap();
    assert_eq!(a, compare_mappings(&traces, &maps, &s.config).unwrap());
    assert!(a.slot_limb_ratio["baseline"] >= 3.0);
    assert!((a.slot_limb_ratio["optimized"] - 1.0).abs() <= 0.25);
    let imp = a.improvement("baseline", "optimized").unwrap();
    assert!((2.0..=2.8).contains(&imp), "{imp}");
    for (m, p, want) in [
        ("baseline", Pattern::LimbWise, 2.3),
        ("baseline", Pattern::SlotWise, 9.2),
        ("optimized", Pattern::LimbWise, 2.5),
        ("optimized", Pattern::SlotWise, 2.2),
    ] {
        let got = a.get(m, p).unwrap().ms;
        assert!((got / want - 1.0).abs() <= 0.2, "{m} {p:?}: {got}");
    }
}
