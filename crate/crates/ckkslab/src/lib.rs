pub mod apps;
pub mod bootstrap;
pub mod ckks;
pub mod cost;
pub mod dram;
pub mod fixtures;
pub mod ops;
pub mod report;
pub mod rns;
pub mod selftest;
pub mod zq;
