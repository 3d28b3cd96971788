//! Domain types shared by every stage of the optimization pipeline.
//!
//! Powers and energies are always in watts. Channels are stored raw (with
//! path loss, without noise normalization); [`Scenario::effective`] produces
//! the noise-normalized view used for SINR and rate evaluation.

use std::fmt;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;

/// Convert a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Scenario parameters for one multi-antenna SWIPT broadcast channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_tx_antennas: usize,
    pub num_irs: usize,
    pub num_ers: usize,
    /// Transmit power budget in watts.
    pub total_power: f64,
    /// Noise variance at each information receiver, in watts.
    pub noise_power_ir: f64,
    /// Energy-harvesting efficiency, between 0 and 1.
    #[serde(default = "default_efficiency")]
    pub harvest_efficiency: f64,
    /// Minimum total harvested power over all energy receivers, in watts.
    pub energy_threshold: f64,
    /// One positive weight per information receiver.
    pub rate_weights: Vec<f64>,
}

fn default_efficiency() -> f64 {
    1.0
}

/// Channel vectors from the transmitter to every receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    #[serde(with = "cvec_serde::many")]
    pub ir_channels: Vec<CVector>,
    #[serde(with = "cvec_serde::many")]
    pub er_channels: Vec<CVector>,
}

/// A single invariant violation found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    NonFinite(String),
    NonPositive(&'static str),
    OutOfRange(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected {expected}, found {found}"),
            Violation::NonFinite(what) => write!(f, "{what} has non-finite entries"),
            Violation::NonPositive(field) => write!(f, "{field} must be positive"),
            Violation::OutOfRange(field) => write!(f, "{field} out of range"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_dimension_mismatch(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::DimensionMismatch { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Check every invariant of `config` and `channels` and their mutual
/// consistency. An empty report means the pair may be used downstream.
pub fn validate_scenario(config: &SystemConfig, channels: &ChannelSet) -> ValidationReport {
    let mut violations = Vec::new();
    let positive = |v: f64| v.is_finite() && v > 0.0;

    if config.num_tx_antennas == 0 {
        violations.push(Violation::NonPositive("num_tx_antennas"));
    }
    if config.num_irs == 0 {
        violations.push(Violation::NonPositive("num_irs"));
    }
    if !positive(config.total_power) {
        violations.push(Violation::NonPositive("total_power"));
    }
    if !positive(config.noise_power_ir) {
        violations.push(Violation::NonPositive("noise_power_ir"));
    }
    if !(0.0..=1.0).contains(&config.harvest_efficiency) {
        violations.push(Violation::OutOfRange("harvest_efficiency"));
    }
    if !(config.energy_threshold.is_finite() && config.energy_threshold >= 0.0) {
        violations.push(Violation::OutOfRange("energy_threshold"));
    }
    if config.rate_weights.len() != config.num_irs {
        violations.push(Violation::DimensionMismatch {
            what: "rate_weights".into(),
            expected: config.num_irs,
            found: config.rate_weights.len(),
        });
    }
    if config.rate_weights.iter().any(|&u| !positive(u)) {
        violations.push(Violation::NonPositive("rate_weights"));
    }

    let groups = [
        ("ir_channels", &channels.ir_channels, config.num_irs),
        ("er_channels", &channels.er_channels, config.num_ers),
    ];
    for (name, vectors, count) in groups {
        if vectors.len() != count {
            violations.push(Violation::DimensionMismatch {
                what: name.to_string(),
                expected: count,
                found: vectors.len(),
            });
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != config.num_tx_antennas {
                violations.push(Violation::DimensionMismatch {
                    what: format!("{name}[{i}] length"),
                    expected: config.num_tx_antennas,
                    found: v.len(),
                });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                violations.push(Violation::NonFinite(format!("{name}[{i}]")));
            }
        }
    }
    ValidationReport { violations }
}

/// A validated configuration together with its channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SystemConfig,
    pub channels: ChannelSet,
}

impl Scenario {
    pub fn new(config: SystemConfig, channels: ChannelSet) -> Result<Self> {
        let report = validate_scenario(&config, &channels);
        if !report.is_ok() {
            return Err(Error::InvalidScenario(report));
        }
        Ok(Scenario { config, channels })
    }

    /// IR channels divided by the noise standard deviation, so that the noise
    /// terms in every SINR become 1; ER channels are left as they are.
    pub fn effective(&self) -> EffectiveChannels {
        let sigma = self.config.noise_power_ir.sqrt();
        EffectiveChannels {
            ir: self
                .channels
                .ir_channels
                .iter()
                .map(|h| h.unscale(sigma))
                .collect(),
            er: self.channels.er_channels.clone(),
            harvest_efficiency: self.config.harvest_efficiency,
        }
    }

    pub fn num_tx_antennas(&self) -> usize {
        self.config.num_tx_antennas
    }

    pub fn num_irs(&self) -> usize {
        self.config.num_irs
    }

    pub fn num_ers(&self) -> usize {
        self.config.num_ers
    }
}

/// Channels in the form consumed by the physical-layer formulas: IR channels
/// normalized to unit noise, ER channels in raw (watt) units.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub ir: Vec<CVector>,
    pub er: Vec<CVector>,
    pub harvest_efficiency: f64,
}

/// Common, private and energy precoders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderSet {
    #[serde(with = "cvec_serde::one")]
    pub common: CVector,
    #[serde(with = "cvec_serde::many")]
    pub private: Vec<CVector>,
    #[serde(with = "cvec_serde::many")]
    pub energy: Vec<CVector>,
}

impl PrecoderSet {
    pub fn zeros(num_tx_antennas: usize, num_irs: usize, num_ers: usize) -> Self {
        let z = || CVector::zeros(num_tx_antennas);
        PrecoderSet {
            common: z(),
            private: (0..num_irs).map(|_| z()).collect(),
            energy: (0..num_ers).map(|_| z()).collect(),
        }
    }

    /// All precoders in order: common, private, energy.
    pub fn iter(&self) -> impl Iterator<Item = &CVector> {
        std::iter::once(&self.common)
            .chain(self.private.iter())
            .chain(self.energy.iter())
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut CVector> {
        std::iter::once(&mut self.common)
            .chain(self.private.iter_mut())
            .chain(self.energy.iter_mut())
    }

    pub fn power_breakdown(&self) -> PowerBreakdown {
        PowerBreakdown {
            common: self.common.norm_squared(),
            private: self.private.iter().map(|p| p.norm_squared()).collect(),
            energy: self.energy.iter().map(|f| f.norm_squared()).sum(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for p in self.iter_mut() {
            *p *= C64::new(factor, 0.0);
        }
    }
}

/// tr(PPᴴ) + tr(FFᴴ): the sum of squared norms of every precoder.
pub fn total_transmit_power(precoders: &PrecoderSet) -> f64 {
    precoders.iter().map(|p| p.norm_squared()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub common: f64,
    pub private: Vec<f64>,
    /// Total over all energy precoders.
    pub energy: f64,
}

impl PowerBreakdown {
    pub fn total(&self) -> f64 {
        self.common + self.private.iter().sum::<f64>() + self.energy
    }
}

/// Portion of the common rate credited to each information receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonRateSplit {
    pub portions: Vec<f64>,
}

impl CommonRateSplit {
    pub fn zeros(num_irs: usize) -> Self {
        CommonRateSplit {
            portions: vec![0.0; num_irs],
        }
    }

    pub fn new(portions: Vec<f64>) -> Result<Self> {
        if portions.iter().any(|&c| !(c >= 0.0)) {
            return Err(Error::Config(
                "common-rate portions must be non-negative".into(),
            ));
        }
        Ok(CommonRateSplit { portions })
    }

    pub fn sum(&self) -> f64 {
        self.portions.iter().sum()
    }
}

/// Transmission strategy. SC-SIC is expressed inside the rate-splitting model:
/// IR `decoder` keeps its private stream and also decodes the other IR's
/// message, which is carried entirely by the common stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strategy {
    Rs,
    Mulp,
    Scsic { decoder: usize },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Rs => "RS",
            Strategy::Mulp => "MULP",
            Strategy::Scsic { .. } => "SCSIC",
        }
    }

    pub fn check(&self, num_irs: usize) -> Result<()> {
        match *self {
            Strategy::Scsic { decoder } if num_irs != 2 || decoder >= 2 => {
                Err(Error::UnsupportedStrategy {
                    strategy: self.to_string(),
                    num_irs,
                })
            }
            _ => Ok(()),
        }
    }

    pub fn uses_common_stream(&self) -> bool {
        !matches!(self, Strategy::Mulp)
    }

    /// Whether IR `k` has a private stream.
    pub fn private_active(&self, k: usize) -> bool {
        match *self {
            Strategy::Scsic { decoder } => k == decoder,
            _ => true,
        }
    }

    /// Whether IR `k` may receive a share of the common rate.
    pub fn common_share_free(&self, k: usize) -> bool {
        match *self {
            Strategy::Rs => true,
            Strategy::Mulp => false,
            Strategy::Scsic { decoder } => k != decoder,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Scsic { decoder } => write!(f, "SCSIC(decoder=IR-{})", decoder + 1),
            other => write!(f, "{}", other.name()),
        }
    }
}

/// Per outer iteration WMMSE traces of the inner loop, and the outer WSR trace.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceLedger {
    pub inner_traces: Vec<Vec<f64>>,
    pub outer_trace: Vec<f64>,
    pub wall_time: f64,
}

/// A converged operating point of one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub strategy: Strategy,
    pub wsr: f64,
    /// C_k + R_k per information receiver.
    pub per_ir_total_rates: Vec<f64>,
    pub common_rate_split: CommonRateSplit,
    pub private_rates: Vec<f64>,
    pub common_rate_bound: f64,
    pub harvested_energy_total: f64,
    pub power_breakdown: PowerBreakdown,
    pub iterations_outer: usize,
    pub converged: bool,
    pub start_index: usize,
    pub precoders: PrecoderSet,
    pub ledger: ConvergenceLedger,
}

/// Serde adapters storing complex vectors as arrays of `[re, im]` pairs.
pub mod cvec_serde {
    use super::{CVector, C64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn to_pairs(v: &CVector) -> Vec<[f64; 2]> {
        v.iter().map(|z| [z.re, z.im]).collect()
    }

    fn from_pairs(p: Vec<[f64; 2]>) -> CVector {
        CVector::from_iterator(p.len(), p.into_iter().map(|[re, im]| C64::new(re, im)))
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
            to_pairs(v).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
            Ok(from_pairs(Vec::deserialize(d)?))
        }
    }

    pub mod many {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(to_pairs).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVector>, D::Error> {
            let raw: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
            Ok(raw.into_iter().map(from_pairs).collect())
        }
    }
}
