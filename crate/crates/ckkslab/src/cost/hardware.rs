use serde::{Deserialize, Serialize};

use super::opts::{Flag, OptimizationSet};
use super::CostError;

pub const WORD_BYTES: u64 = 8;

/// On-chip capacity class that decides which caching rules apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheTier {
    None,
    O1Limb,
    BetaLimb,
    AlphaLimb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareModel {
    pub label: String,
    pub cache_bytes: u64,
    pub dram_bandwidth: f64,
}

impl HardwareModel {
    pub fn limb_bytes(log_n: u32) -> u64 {
        (1u64 << log_n) * WORD_BYTES
    }

    /// Tier thresholds: three limbs for fused streaming, 2 beta limbs for
    /// hoisted digits, 2 alpha limbs plus 3 MB of scratch for the conversion.
    pub fn tier(&self, log_n: u32, alpha: usize, beta: usize) -> CacheTier {
        let limb = Self::limb_bytes(log_n);
        let alpha_need = 2 * alpha as u64 * limb + 3 * (1 << 20);
        if self.cache_bytes >= alpha_need {
            CacheTier::AlphaLimb
        } else if self.cache_bytes >= 2 * beta as u64 * limb {
            CacheTier::BetaLimb
        } else if self.cache_bytes >= 3 * limb {
            CacheTier::O1Limb
        } else {
            CacheTier::None
        }
    }

    /// Rejects caching flags that the capacity cannot hold.
    pub fn admits(&self, opts: OptimizationSet, log_n: u32, alpha: usize, beta: usize) -> Result<(), CostError> {
        let tier = self.tier(log_n, alpha, beta);
        let need = [
            (Flag::FusionO1, CacheTier::O1Limb),
            (Flag::BetaCaching, CacheTier::BetaLimb),
            (Flag::AlphaCaching, CacheTier::AlphaLimb),
        ];
        for (flag, min) in need {
            if opts.contains(flag) && tier < min {
                return Err(CostError::CacheTooSmall { flag, tier });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputResult {
    pub n: f64,
    pub ell: f64,
    pub bp: f64,
    /// Bootstrap runtime in seconds, modeled as DRAM transfer time.
    pub brt: f64,
    /// Slot-level-bits per second, in millions. Infinite for zero transfer.
    pub throughput: f64,
}

/// Throughput n * ell * bp / brt with brt = bytes / bandwidth.
pub fn throughput(n: f64, ell: f64, bp: f64, dram_bytes: f64, bandwidth: f64) -> Result<ThroughputResult, CostError> {
    if bandwidth <= 0.0 {
        return Err(CostError::BadBandwidth(bandwidth));
    }
    let brt = dram_bytes / bandwidth;
    let throughput = if brt == 0.0 { f64::INFINITY } else { n * ell * bp / brt / 1e6 };
    Ok(ThroughputResult { n, ell, bp, brt, throughput })
}

/// One externally published bootstrapping implementation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalRow {
    pub name: String,
    pub n: f64,
    pub ell: f64,
    pub bp: f64,
    pub dram_gb: f64,
    #[serde(default)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub name: String,
    pub n: f64,
    pub ell: f64,
    pub bp: f64,
    pub dram_gb: f64,
    pub bandwidth: f64,
    pub brt_ms: f64,
    pub throughput: f64,
}

pub fn external_comparison(rows: &[ExternalRow], bandwidth: f64) -> Result<Vec<ComparisonRow>, CostError> {
    rows.iter()
        .map(|r| {
            let bw = r.bandwidth.unwrap_or(bandwidth);
            let t = throughput(r.n, r.ell, r.bp, r.dram_gb * 1e9, bw)?;
            Ok(ComparisonRow {
                name: r.name.clone(),
                n: r.n,
                ell: r.ell,
                bp: r.bp,
                dram_gb: r.dram_gb,
                bandwidth: bw,
                brt_ms: t.brt * 1e3,
                throughput: t.throughput,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiers_follow_capacity() {
        let mb = 1u64 << 20;
        let hw = |c| HardwareModel { label: String::new(), cache_bytes: c, dram_bandwidth: 1e9 };
        assert_eq!(hw(mb).tier(17, 12, 3), CacheTier::None);
        assert_eq!(hw(3 * mb).tier(17, 12, 3), CacheTier::O1Limb);
        assert_eq!(hw(6 * mb).tier(17, 12, 3), CacheTier::BetaLimb);
        assert_eq!(hw(27 * mb).tier(17, 12, 3), CacheTier::AlphaLimb);
        let err = hw(mb).admits(OptimizationSet::from_flags(&[Flag::FusionO1]), 17, 12, 3);
        assert!(err.is_err());
    }

    #[test]
    fn zero_transfer_is_unbounded() {
        assert!(throughput(1.0, 1.0, 1.0, 0.0, 1e9).unwrap().throughput.is_infinite());
        assert!(throughput(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }
}
