//! In-order DDR4 timing model for limb-wise and slot-wise streams under
//! different physical address mappings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DramError {
    #[error("request (slot {slot}, limb {limb}) is outside the mapped space")]
    OutOfRange { slot: u32, limb: u32 },
    #[error("bad bit range {0:?}")]
    BadRange(String),
    #[error("mapping: {0}")]
    Mapping(String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub t_rcd: u64,
    pub t_rp: u64,
    pub t_ras: u64,
    pub t_rtp: u64,
    pub t_ccd_s: u64,
    pub t_ccd_l: u64,
    pub t_rrd_s: u64,
    pub t_rrd_l: u64,
    pub t_faw: u64,
    pub cl: u64,
    pub t_burst: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DramConfig {
    /// Independent channels; traffic is assumed to split evenly, so this
    /// divides the simulated time.
    pub channels: u32,
    pub ranks: u32,
    pub bank_groups: u32,
    pub banks_per_group: u32,
    pub rows: u32,
    /// Words per row.
    pub columns: u32,
    pub word_bytes: u32,
    pub burst_bytes: u32,
    pub clock_hz: f64,
    pub timing: Timing,
}

impl DramConfig {
    pub fn peak_bandwidth(&self) -> f64 {
        self.channels as f64 * self.burst_bytes as f64 * self.clock_hz / self.timing.t_burst as f64
    }

    pub fn burst_words(&self) -> u32 {
        self.burst_bytes / self.word_bytes
    }

    pub fn row_bytes(&self) -> u64 {
        self.columns as u64 * self.word_bytes as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Slot,
    Limb,
}

/// A contiguous run of source bits [lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitRange {
    pub source: Source,
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for BitRange {
    type Err = DramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DramError::BadRange(s.to_string());
        let (src, range) = s.split_once(':').ok_or_else(bad)?;
        let source = match src.trim() {
            "slot" => Source::Slot,
            "limb" => Source::Limb,
            _ => return Err(bad()),
        };
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if hi <= lo || hi > 32 {
            return Err(bad());
        }
        Ok(Self { source, lo, hi })
    }
}

impl fmt::Display for BitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.source {
            Source::Slot => "slot",
            Source::Limb => "limb",
        };
        write!(f, "{s}:{}..{}", self.lo, self.hi)
    }
}

impl Serialize for BitRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit-field layout from (slot, limb) to DRAM coordinates. Each field is
/// the concatenation of its ranges, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressMapping {
    #[serde(default)]
    pub rank: Vec<BitRange>,
    pub bank_group: Vec<BitRange>,
    pub bank: Vec<BitRange>,
    pub row: Vec<BitRange>,
    pub column: Vec<BitRange>,
}

/// Bank, row and word column of one request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub rank: u32,
    pub bank_group: u32,
    pub bank: u32,
    pub row: u32,
    pub column: u32,
}

fn width(field: &[BitRange]) -> u32 {
    field.iter().map(|r| r.hi - r.lo).sum()
}

fn gather(field: &[BitRange], slot: u32, limb: u32) -> u32 {
    let mut out = 0u32;
    let mut shift = 0;
    for r in field {
        let v = match r.source {
            Source::Slot => slot,
            Source::Limb => limb,
        };
        let w = r.hi - r.lo;
        out |= ((v >> r.lo) & ((1u32 << w) - 1)) << shift;
        shift += w;
    }
    out
}

fn range(source: Source, lo: u32, hi: u32) -> Vec<BitRange> {
    if hi > lo {
        vec![BitRange { source, lo, hi }]
    } else {
        Vec::new()
    }
}

fn log2(x: u32) -> u32 {
    x.trailing_zeros()
}

impl AddressMapping {
    /// Slots fill a column, then the bank groups, banks and rows; limbs
    /// extend the row index.
    pub fn baseline(cfg: &DramConfig, slot_bits: u32, limb_bits: u32) -> Self {
        let (c, g, b) = (log2(cfg.columns), log2(cfg.bank_groups), log2(cfg.banks_per_group));
        let mut row = range(Source::Slot, c + g + b, slot_bits);
        row.extend(range(Source::Limb, 0, limb_bits));
        Self {
            rank: Vec::new(),
            column: range(Source::Slot, 0, c),
            bank_group: range(Source::Slot, c, c + g),
            bank: range(Source::Slot, c + g, c + g + b),
            row,
        }
    }

    /// Low limb bits select the bank group and bank, so consecutive limbs
    /// of one slot land in different banks; slots fill columns then rows.
    pub fn optimized(cfg: &DramConfig, slot_bits: u32, limb_bits: u32) -> Self {
        let (c, g, b) = (log2(cfg.columns), log2(cfg.bank_groups), log2(cfg.banks_per_group));
        let mut row = range(Source::Slot, c, slot_bits);
        row.extend(range(Source::Limb, g + b, limb_bits));
        Self {
            rank: Vec::new(),
            column: range(Source::Slot, 0, c),
            bank_group: range(Source::Limb, 0, g),
            bank: range(Source::Limb, g, g + b),
            row,
        }
    }

    fn fields(&self) -> [&[BitRange]; 5] {
        [&self.rank, &self.bank_group, &self.bank, &self.row, &self.column]
    }

    /// Checks that every source bit below the given widths is used exactly
    /// once and that each field fits the geometry.
    pub fn validate(&self, cfg: &DramConfig, slot_bits: u32, limb_bits: u32) -> Result<(), DramError> {
        let mut used = [vec![0u8; slot_bits as usize], vec![0u8; limb_bits as usize]];
        for r in self.fields().iter().flat_map(|f| f.iter()) {
            let (v, bits) = match r.source {
                Source::Slot => (&mut used[0], slot_bits),
                Source::Limb => (&mut used[1], limb_bits),
            };
            if r.hi > bits {
                return Err(DramError::Mapping(format!("{r} exceeds the {bits}-bit source")));
            }
            for i in r.lo..r.hi {
                v[i as usize] += 1;
            }
        }
        if used.iter().flatten().any(|&u| u != 1) {
            return Err(DramError::Mapping("every source bit must be mapped exactly once".into()));
        }
        let caps = [cfg.ranks, cfg.bank_groups, cfg.banks_per_group, cfg.rows, cfg.columns];
        for (f, cap) in self.fields().iter().zip(caps) {
            if 1u64 << width(f) > cap as u64 {
                return Err(DramError::Mapping(format!("field of {} bits exceeds {cap}", width(f))));
            }
        }
        Ok(())
    }

    pub fn decode(&self, slot: u32, limb: u32) -> Location {
        Location {
            rank: gather(&self.rank, slot, limb),
            bank_group: gather(&self.bank_group, slot, limb),
            bank: gather(&self.bank, slot, limb),
            row: gather(&self.row, slot, limb),
            column: gather(&self.column, slot, limb),
        }
    }

    fn source_bits(&self, source: Source) -> u32 {
        self.fields().iter().flat_map(|f| f.iter()).filter(|r| r.source == source).map(|r| r.hi).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    LimbWise,
    SlotWise,
}

impl Pattern {
    pub fn label(self) -> &'static str {
        match self {
            Pattern::LimbWise => "limb_wise",
            Pattern::SlotWise => "slot_wise",
        }
    }
}

/// Ordered burst requests, each naming its first slot and its limb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessTrace {
    pub pattern: Pattern,
    pub requests: Vec<(u32, u32)>,
}

impl AccessTrace {
    /// Reads `limbs` limbs of `slots` words in bursts of `burst_words`.
    /// Slot-wise order visits every limb for `block` consecutive bursts.
    pub fn new(pattern: Pattern, slots: u32, limbs: u32, burst_words: u32, block: u32) -> Self {
        let bursts = slots / burst_words;
        let mut requests = Vec::with_capacity((bursts * limbs) as usize);
        match pattern {
            Pattern::LimbWise => {
                for l in 0..limbs {
                    requests.extend((0..bursts).map(|b| (b * burst_words, l)));
                }
            }
            Pattern::SlotWise => {
                let block = block.max(1);
                for b0 in (0..bursts).step_by(block as usize) {
                    for l in 0..limbs {
                        requests.extend((b0..(b0 + block).min(bursts)).map(|b| (b * burst_words, l)));
                    }
                }
            }
        }
        Self { pattern, requests }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub cycles: u64,
    pub total_time_seconds: f64,
    pub bytes: u64,
    pub row_activations: u64,
    /// Column commands issued to the same bank group as the previous one.
    pub bank_group_conflicts: u64,
}

impl SimResult {
    pub fn ms(&self) -> f64 {
        self.total_time_seconds * 1e3
    }
}

#[derive(Debug, Clone, Copy)]
struct Bank {
    open: Option<u32>,
    act: i64,
    last_read: i64,
}

const NEVER: i64 = i64::MIN / 4;

/// Services the trace in order. A row miss precharges the open row (after
/// tRAS from its activation and tRTP from its last read), then activates
/// subject to tRP, tRRD_S/L and the four-activation window; column reads
/// follow tRCD and tCCD_S/L. Each request moves one burst.
pub fn simulate(trace: &AccessTrace, mapping: &AddressMapping, cfg: &DramConfig) -> Result<SimResult, DramError> {
    let t = &cfg.timing;
    let slot_bits = mapping.source_bits(Source::Slot);
    let limb_bits = mapping.source_bits(Source::Limb);
    let burst_words = cfg.burst_words();
    let banks_per_rank = (cfg.bank_groups * cfg.banks_per_group) as usize;
    let mut banks = vec![Bank { open: None, act: NEVER, last_read: NEVER }; cfg.ranks as usize * banks_per_rank];
    let (mut last_col, mut last_col_bg) = (NEVER, None);
    let (mut last_act, mut last_act_bg) = (NEVER, None);
    let mut window = [NEVER; 4];
    let (mut activations, mut conflicts, mut end) = (0u64, 0u64, 0i64);
    for &(slot, limb) in &trace.requests {
        if (slot_bits < 32 && slot >> slot_bits != 0)
            || (limb_bits < 32 && limb >> limb_bits != 0)
            || slot % burst_words != 0
        {
            return Err(DramError::OutOfRange { slot, limb });
        }
        let loc = mapping.decode(slot, limb);
        if loc.column + burst_words > cfg.columns {
            return Err(DramError::OutOfRange { slot, limb });
        }
        let bg = (loc.rank, loc.bank_group);
        let id = loc.rank as usize * banks_per_rank + (loc.bank_group * cfg.banks_per_group + loc.bank) as usize;
        let bank = &mut banks[id];
        if bank.open != Some(loc.row) {
            let pre = if bank.open.is_some() {
                (bank.act + t.t_ras as i64).max(bank.last_read + t.t_rtp as i64)
            } else {
                NEVER
            };
            let rrd = if last_act_bg == Some(bg) { t.t_rrd_l } else { t.t_rrd_s };
            let a = (pre + t.t_rp as i64).max(0).max(last_act + rrd as i64).max(window[0] + t.t_faw as i64);
            window.rotate_left(1);
            window[3] = a;
            bank.open = Some(loc.row);
            bank.act = a;
            last_act = a;
            last_act_bg = Some(bg);
            activations += 1;
        }
        let same_bg = last_col_bg == Some(bg);
        if same_bg {
            conflicts += 1;
        }
        let ccd = if same_bg { t.t_ccd_l } else { t.t_ccd_s };
        let c = (bank.act + t.t_rcd as i64).max(last_col + ccd as i64);
        bank.last_read = c;
        last_col = c;
        last_col_bg = Some(bg);
        end = c + (t.cl + t.t_burst) as i64;
    }
    let cycles = end.max(0) as u64;
    Ok(SimResult {
        cycles,
        total_time_seconds: cycles as f64 / cfg.clock_hz / cfg.channels as f64,
        bytes: trace.len() as u64 * cfg.burst_bytes as u64,
        row_activations: activations,
        bank_group_conflicts: conflicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub slots: u32,
    pub limbs: u32,
    pub block_bursts: u32,
}

impl Workload {
    pub fn trace(&self, pattern: Pattern, cfg: &DramConfig) -> AccessTrace {
        AccessTrace::new(pattern, self.slots, self.limbs, cfg.burst_words(), self.block_bursts)
    }

    pub fn slot_bits(&self) -> u32 {
        self.slots.next_power_of_two().trailing_zeros()
    }

    pub fn limb_bits(&self) -> u32 {
        self.limbs.next_power_of_two().trailing_zeros()
    }
}

/// The shipped configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DramSetup {
    pub config: DramConfig,
    pub workload: Workload,
    pub mappings: BTreeMap<String, AddressMapping>,
}

pub const DEFAULT_SETUP: &str = include_str!("../data/dram.toml");

impl DramSetup {
    pub fn from_toml(text: &str) -> Result<Self, DramError> {
        let s: Self = toml::from_str(text).map_err(|e| DramError::Config(e.to_string()))?;
        for (name, m) in &s.mappings {
            m.validate(&s.config, m.source_bits(Source::Slot).max(s.workload.slot_bits()), m.source_bits(Source::Limb))
                .map_err(|e| DramError::Config(format!("{name}: {e}")))?;
        }
        Ok(s)
    }

    pub fn default_setup() -> Self {
        Self::from_toml(DEFAULT_SETUP).expect("shipped config parses")
    }

    pub fn mapping(&self, name: &str) -> Result<&AddressMapping, DramError> {
        self.mappings.get(name).ok_or_else(|| DramError::Config(format!("no mapping named {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub mapping: String,
    pub pattern: Pattern,
    pub ms: f64,
    pub activations: u64,
    pub bank_group_conflicts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingComparison {
    pub entries: Vec<ComparisonEntry>,
    /// Slot-wise over limb-wise time per mapping.
    pub slot_limb_ratio: BTreeMap<String, f64>,
    /// Summed time per mapping.
    pub total_ms: BTreeMap<String, f64>,
}

impl MappingComparison {
    /// Total time of `a` over total time of `b`.
    pub fn improvement(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.total_ms.get(a)? / self.total_ms.get(b)?)
    }

    pub fn get(&self, mapping: &str, pattern: Pattern) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| e.mapping == mapping && e.pattern == pattern)
    }
}

/// Simulates every trace under every mapping.
pub fn compare_mappings(
    traces: &[AccessTrace],
    mappings: &[(&str, &AddressMapping)],
    cfg: &DramConfig,
) -> Result<MappingComparison, DramError> {
    let mut entries = Vec::new();
    let mut slot_limb_ratio = BTreeMap::new();
    let mut total_ms = BTreeMap::new();
    for &(name, m) in mappings {
        let mut by_pattern = BTreeMap::new();
        for tr in traces {
            let r = simulate(tr, m, cfg)?;
            *total_ms.entry(name.to_string()).or_insert(0.0) += r.ms();
            by_pattern.insert(tr.pattern, r.ms());
            entries.push(ComparisonEntry {
                mapping: name.to_string(),
                pattern: tr.pattern,
                ms: r.ms(),
                activations: r.row_activations,
                bank_group_conflicts: r.bank_group_conflicts,
            });
        }
        if let (Some(s), Some(l)) = (by_pattern.get(&Pattern::SlotWise), by_pattern.get(&Pattern::LimbWise)) {
            slot_limb_ratio.insert(name.to_string(), s / l);
        }
    }
    Ok(MappingComparison { entries, slot_limb_ratio, total_ms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_bandwidth() {
        let s = DramSetup::default_setup();
        assert!((s.config.peak_bandwidth() - 19.2e9).abs() < 1.0);
    }

    #[test]
    fn shipped_mappings_match_builders() {
        let s = DramSetup::default_setup();
        let (sb, lb) = (s.workload.slot_bits(), s.workload.limb_bits());
        assert_eq!((sb, lb), (17, 6));
        assert_eq!(s.mapping("baseline").unwrap(), &AddressMapping::baseline(&s.config, sb, lb));
        assert_eq!(s.mapping("optimized").unwrap(), &AddressMapping::optimized(&s.config, sb, lb));
    }

    #[test]
    fn bit_range_parsing() {
        let r: BitRange = "limb:2..4".parse().unwrap();
        assert_eq!(r, BitRange { source: Source::Limb, lo: 2, hi: 4 });
        assert_eq!(r.to_string(), "limb:2..4");
        for bad in ["limb:4..2", "x:0..1", "slot:0", "slot:0..40"] {
            assert!(bad.parse::<BitRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn single_burst_timing() {
        let s = DramSetup::default_setup();
        let tr = AccessTrace { pattern: Pattern::LimbWise, requests: vec![(0, 0)] };
        let r = simulate(&tr, s.mapping("baseline").unwrap(), &s.config).unwrap();
        let t = s.config.timing;
        assert_eq!(r.cycles, t.t_rcd + t.cl + t.t_burst);
        assert_eq!(r.row_activations, 1);
    }

    #[test]
    fn out_of_range() {
        let s = DramSetup::default_setup();
        let tr = AccessTrace { pattern: Pattern::LimbWise, requests: vec![(1 << 17, 0)] };
        assert!(matches!(simulate(&tr, s.mapping("baseline").unwrap(), &s.config), Err(DramError::OutOfRange { .. })));
        let tr = AccessTrace { pattern: Pattern::LimbWise, requests: vec![(3, 0)] };
        assert!(simulate(&tr, s.mapping("baseline").unwrap(), &s.config).is_err());
    }

    #[test]
    fn validation_rejects_reuse() {
        let s = DramSetup::default_setup();
        let mut m = AddressMapping::baseline(&s.config, 17, 6);
        m.bank = m.bank_group.clone();
        assert!(m.validate(&s.config, 17, 6).is_err());
    }
}
