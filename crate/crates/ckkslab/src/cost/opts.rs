use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CostError;

/// Memory-hierarchy and algorithmic optimizations, in the cumulative order in
/// which they are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    FusionO1,
    AddressMapping,
    BetaCaching,
    AlphaCaching,
    AccumulatorCaching,
    LimbReordering,
    MergedModdownRescale,
    HoistedModdownMatvec,
    KeyCompression,
}

impl Flag {
    pub const ALL: [Flag; 9] = [
        Flag::FusionO1,
        Flag::AddressMapping,
        Flag::BetaCaching,
        Flag::AlphaCaching,
        Flag::AccumulatorCaching,
        Flag::LimbReordering,
        Flag::MergedModdownRescale,
        Flag::HoistedModdownMatvec,
        Flag::KeyCompression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::FusionO1 => "fusion_o1",
            Flag::AddressMapping => "address_mapping",
            Flag::BetaCaching => "beta_caching",
            Flag::AlphaCaching => "alpha_caching",
            Flag::AccumulatorCaching => "accumulator_caching",
            Flag::LimbReordering => "limb_reordering",
            Flag::MergedModdownRescale => "merged_moddown_rescale",
            Flag::HoistedModdownMatvec => "hoisted_moddown_matvec",
            Flag::KeyCompression => "key_compression",
        }
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }

    /// The flag that must already be on for this one to be meaningful.
    pub fn requires(self) -> Option<Flag> {
        match self {
            Flag::BetaCaching => Some(Flag::FusionO1),
            Flag::AlphaCaching => Some(Flag::BetaCaching),
            _ => None,
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flag {
    type Err = CostError;
    fn from_str(s: &str) -> Result<Self, CostError> {
        Flag::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| CostError::UnknownFlag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OptimizationSet(u16);

impl OptimizationSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn all() -> Self {
        Self::from_flags(&Flag::ALL)
    }

    pub fn from_flags(flags: &[Flag]) -> Self {
        Self(flags.iter().fold(0, |acc, f| acc | f.bit()))
    }

    /// The first `k` flags of the cumulative order.
    pub fn prefix(k: usize) -> Self {
        Self::from_flags(&Flag::ALL[..k.min(Flag::ALL.len())])
    }

    pub fn contains(self, f: Flag) -> bool {
        self.0 & f.bit() != 0
    }

    pub fn with(self, f: Flag) -> Self {
        Self(self.0 | f.bit())
    }

    pub fn without(self, f: Flag) -> Self {
        Self(self.0 & !f.bit())
    }

    pub fn flags(self) -> Vec<Flag> {
        Flag::ALL.into_iter().filter(|&f| self.contains(f)).collect()
    }

    pub fn validate(self) -> Result<Self, CostError> {
        for f in self.flags() {
            if let Some(dep) = f.requires() {
                if !self.contains(dep) {
                    return Err(CostError::FlagDependency { flag: f, needs: dep });
                }
            }
        }
        Ok(self)
    }

    /// Every valid subset, used by exhaustive property checks.
    pub fn all_valid() -> Vec<Self> {
        (0u16..1 << Flag::ALL.len()).map(Self).filter(|s| s.validate().is_ok()).collect()
    }
}

impl fmt::Display for OptimizationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.flags().into_iter().map(Flag::name).collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join("+"))
        }
    }
}

impl Serialize for OptimizationSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names: Vec<&str> = self.flags().into_iter().map(Flag::name).collect();
        names.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OptimizationSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        let mut set = OptimizationSet::empty();
        for n in names {
            if n == "all" {
                set = OptimizationSet::all();
                continue;
            }
            set = set.with(n.parse().map_err(serde::de::Error::custom)?);
        }
        set.validate().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dependency_rules() {
        assert!(OptimizationSet::from_flags(&[Flag::BetaCaching]).validate().is_err());
        assert!(OptimizationSet::from_flags(&[Flag::FusionO1, Flag::AlphaCaching]).validate().is_err());
        for k in 0..=9 {
            assert!(OptimizationSet::prefix(k).validate().is_ok());
        }
        assert_eq!(OptimizationSet::all_valid().len(), 64 * 4);
    }

    #[test]
    fn names_roundtrip() {
        for f in Flag::ALL {
            assert_eq!(f.name().parse::<Flag>().unwrap(), f);
        }
        assert!("turbo".parse::<Flag>().is_err());
    }
}
