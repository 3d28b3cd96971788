//! Weighted-sum-rate precoder optimization for multi-antenna SWIPT broadcast
//! channels, comparing rate-splitting, MU-LP and SC-SIC.
//!
//! The pipeline runs from [`model`] and [`channel`] (scenarios), through
//! [`physics`] (rates and harvested energy), [`wmmse`] (equalizers and
//! weights), [`solver`] (the convex subproblem) and [`algorithms`]
//! (alternating optimization), to [`experiments`] (sweeps and output).
//!
//! ```
//! use ratesplit_swipt::algorithms::{ao_outer_loop, AlgorithmConfig};
//! use ratesplit_swipt::experiments::ScenarioFile;
//! use ratesplit_swipt::model::Strategy;
//!
//! let file = ScenarioFile::paper(1.0, 4.0 * std::f64::consts::PI / 9.0, 2.0 * std::f64::consts::PI / 9.0, 35.0);
//! let (scenario, _) = file.scenario().unwrap();
//! let config = AlgorithmConfig { num_random_starts: 0, ..Default::default() };
//! let point = ao_outer_loop(&scenario, Strategy::Mulp, &config).unwrap();
//! assert!(point.harvested_energy_total >= 35e-6 - 1e-9);
//! ```

pub mod algorithms;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod model;
pub mod physics;
pub mod solver;
pub mod wmmse;

pub use error::{Error, Result};

// The guide's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/system-model.md")]
    mod system_model {}
    #[doc = include_str!("../../../book/src/wmmse.md")]
    mod wmmse {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
