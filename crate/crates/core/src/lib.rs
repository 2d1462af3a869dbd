//! Voting rules and certified worst-case distortion oracles.
//!
//! The crate is organised around a small ordinal/cardinal data model
//! ([`profile`], [`cardinal`], [`lottery`]), a dense simplex solver ([`lp`]),
//! the worst-case oracles built on top of it ([`oracles`]), the voting rules
//! themselves ([`rules`]), instance generators and file formats
//! ([`instances`]), and the sweep/table drivers used by the command line
//! ([`experiments`]).
//!
//! ```
//! use distortion_lab::profile::Profile;
//! use distortion_lab::rules::Rule;
//! use distortion_lab::oracles::{rule_distortion, OracleConfig, World};
//!
//! let p = Profile::from_rankings(3, vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
//! let report = rule_distortion(&Rule::PluralityVeto, &p.into(), World::Metric, &OracleConfig::default()).unwrap();
//! assert!(report.value.finite().unwrap() <= 3.0 + 1e-6);
//! ```

pub mod cardinal;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod instances;
pub mod lottery;
pub mod lp;
pub mod oracles;
pub mod profile;
pub mod rules;

pub use error::{Error, Result};

/// Numerical tolerance ladder shared by every module.
pub mod tol {
    /// Structural invariants: metric axioms, unit-sum rows, consistency.
    pub const STRUCTURAL: f64 = 1e-9;
    /// Lottery normalization.
    pub const LOTTERY: f64 = 1e-12;
    /// Comparisons between distortion ratios.
    pub const RATIO: f64 = 1e-6;
    /// Simplex pivot threshold.
    pub const PIVOT: f64 = 1e-10;
    /// Feasibility of an optimal LP assignment.
    pub const FEASIBILITY: f64 = 1e-7;
}

/// `H_k = 1 + 1/2 + ... + 1/k`.
pub fn harmonic_number(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}
