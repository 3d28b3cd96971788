//! Scenario files: the JSON a user hands to the CLI.
//!
//! Powers are strings with an explicit unit (`"10dBm"`, `"0.01W"`, `"10mW"`,
//! `"35uW"`) or bare numbers in watts. The energy threshold is given in µW,
//! either as a bare number or a string with any of the power units. Angles
//! are radians or strings such as `"4pi/9"`.
//!
//! ```json
//! {
//!   "num_tx_antennas": 4,
//!   "total_power": "10dBm",
//!   "noise_power_ir": "-30dBm",
//!   "energy_threshold_uw": 35,
//!   "rate_weights": [1, 1],
//!   "channel": { "type": "paper", "gamma": 1, "theta": "4pi/9", "beta": "2pi/9" },
//!   "sweep": { "energy_grid_uw": [0, 10, 20, 30] }
//! }
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{build_paper_channels, build_random_channels, DeterministicChannelSpec};
use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, ChannelSet, Scenario, SystemConfig, C64};

/// A number, or a string carrying a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    /// Watts; bare numbers are taken in `default_unit` watts.
    pub fn watts(&self, default_unit: f64) -> Result<f64> {
        match self {
            Quantity::Number(v) => Ok(v * default_unit),
            Quantity::Text(s) => parse_power(s),
        }
    }
}

/// Parse `"<value><unit>"` with unit dBm, W, mW, uW/µW or nW into watts.
pub fn parse_power(text: &str) -> Result<f64> {
    let s = text.trim();
    let units: [(&str, f64); 6] = [
        ("mW", 1e-3),
        ("uW", 1e-6),
        ("µW", 1e-6),
        ("μW", 1e-6),
        ("nW", 1e-9),
        ("W", 1.0),
    ];
    let bad = || Error::Config(format!("cannot parse power '{text}'"));
    if let Some(v) = s.strip_suffix("dBm") {
        return v.trim().parse::<f64>().map(dbm_to_watts).map_err(|_| bad());
    }
    for (suffix, scale) in units {
        if let Some(v) = s.strip_suffix(suffix) {
            return v
                .trim()
                .parse::<f64>()
                .map(|x| x * scale)
                .map_err(|_| bad());
        }
    }
    Err(bad())
}

/// An angle in radians, or a string like `"pi/3"`, `"-2π/9"`, `"0.5"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(v) => Ok(*v),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse angle '{text}'"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('π', "pi");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let value = match num.split_once("pi") {
        Some((coef, rest)) if rest.is_empty() => {
            let c = match coef.trim_end_matches('*') {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        Some(_) => return Err(bad()),
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(value / den)
}

fn default_antennas() -> usize {
    4
}
fn default_efficiency() -> f64 {
    1.0
}
fn default_distance() -> f64 {
    10.0
}
fn default_exponent() -> f64 {
    1.5
}

/// Where the channel vectors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelBlock {
    /// Two IRs and one ER on the deterministic geometry. `beta` defaults to
    /// `theta / 2`.
    Paper {
        gamma: f64,
        theta: Angle,
        #[serde(default)]
        beta: Option<Angle>,
        #[serde(default = "default_distance", alias = "d_h")]
        ir_distance: f64,
        #[serde(default = "default_distance", alias = "d_g")]
        er_distance: f64,
        #[serde(default = "default_exponent")]
        path_loss_exponent_amplitude: f64,
    },
    /// I.i.d. CN(0, 1) channels.
    Random {
        num_irs: usize,
        num_ers: usize,
        seed: u64,
    },
    /// Channel vectors given as lists of `[re, im]` pairs.
    Explicit {
        ir: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        er: Vec<Vec<[f64; 2]>>,
    },
}

/// Resolved channel description, kept so point runs can rebuild the
/// deterministic geometry at other angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelSource {
    Paper(DeterministicChannelSpec),
    Random {
        num_irs: usize,
        num_ers: usize,
        seed: u64,
    },
    Explicit(ChannelSet),
}

impl ChannelBlock {
    pub fn resolve(&self) -> Result<ChannelSource> {
        Ok(match self {
            ChannelBlock::Paper {
                gamma,
                theta,
                beta,
                ir_distance,
                er_distance,
                path_loss_exponent_amplitude,
            } => {
                let theta = theta.radians()?;
                let beta = match beta {
                    Some(b) => b.radians()?,
                    None => theta / 2.0,
                };
                ChannelSource::Paper(DeterministicChannelSpec {
                    ir_distance: *ir_distance,
                    er_distance: *er_distance,
                    path_loss_exponent_amplitude: *path_loss_exponent_amplitude,
                    gamma: *gamma,
                    theta,
                    beta,
                })
            }
            ChannelBlock::Random {
                num_irs,
                num_ers,
                seed,
            } => ChannelSource::Random {
                num_irs: *num_irs,
                num_ers: *num_ers,
                seed: *seed,
            },
            ChannelBlock::Explicit { ir, er } => {
                let conv = |vs: &[Vec<[f64; 2]>]| {
                    vs.iter()
                        .map(|v| {
                            crate::model::CVector::from_iterator(
                                v.len(),
                                v.iter().map(|[re, im]| C64::new(*re, *im)),
                            )
                        })
                        .collect()
                };
                ChannelSource::Explicit(ChannelSet {
                    ir_channels: conv(ir),
                    er_channels: conv(er),
                })
            }
        })
    }
}

impl ChannelSource {
    pub fn build(&self, num_tx_antennas: usize) -> Result<ChannelSet> {
        match self {
            ChannelSource::Paper(spec) => build_paper_channels(spec, num_tx_antennas),
            ChannelSource::Random {
                num_irs,
                num_ers,
                seed,
            } => Ok(build_random_channels(
                num_tx_antennas,
                *num_irs,
                *num_ers,
                *seed,
            )),
            ChannelSource::Explicit(set) => Ok(set.clone()),
        }
    }
}

/// Optional grids and run settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    /// Energy thresholds of a tradeoff sweep, µW.
    #[serde(default)]
    pub energy_grid_uw: Option<Vec<f64>>,
    /// Values of `u_2` for a region sweep (`u_1 = 1`).
    #[serde(default)]
    pub weight_grid: Option<Vec<f64>>,
    /// IR-2 angles evaluated by a point run on the deterministic geometry.
    #[serde(default)]
    pub point_thetas: Option<Vec<Angle>>,
    /// Random starts per strategy in addition to the deterministic one.
    #[serde(default)]
    pub num_random_starts: Option<usize>,
    /// Base seed of the random starts.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_antennas")]
    pub num_tx_antennas: usize,
    pub total_power: Quantity,
    pub noise_power_ir: Quantity,
    #[serde(default = "default_efficiency")]
    pub harvest_efficiency: f64,
    pub energy_threshold_uw: Quantity,
    pub rate_weights: Vec<f64>,
    pub channel: ChannelBlock,
    #[serde(default)]
    pub sweep: SweepOptions,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Built-in deterministic scenario: `P_t` = 10 dBm, noise −30 dBm, four
    /// antennas, u = [1, 1].
    pub fn paper(gamma: f64, theta: f64, beta: f64, energy_threshold_uw: f64) -> Self {
        ScenarioFile {
            num_tx_antennas: 4,
            total_power: Quantity::Text("10dBm".into()),
            noise_power_ir: Quantity::Text("-30dBm".into()),
            harvest_efficiency: 1.0,
            energy_threshold_uw: Quantity::Number(energy_threshold_uw),
            rate_weights: vec![1.0, 1.0],
            channel: ChannelBlock::Paper {
                gamma,
                theta: Angle::Radians(theta),
                beta: Some(Angle::Radians(beta)),
                ir_distance: 10.0,
                er_distance: 10.0,
                path_loss_exponent_amplitude: 1.5,
            },
            sweep: SweepOptions::default(),
        }
    }

    /// Resolve units and build the validated scenario.
    pub fn scenario(&self) -> Result<(Scenario, ChannelSource)> {
        let source = self.channel.resolve()?;
        let channels = source.build(self.num_tx_antennas)?;
        let config = SystemConfig {
            num_tx_antennas: self.num_tx_antennas,
            num_irs: channels.ir_channels.len(),
            num_ers: channels.er_channels.len(),
            total_power: self.total_power.watts(1.0)?,
            noise_power_ir: self.noise_power_ir.watts(1.0)?,
            harvest_efficiency: self.harvest_efficiency,
            energy_threshold: self.energy_threshold_uw.watts(1e-6)?,
            rate_weights: self.rate_weights.clone(),
        };
        Ok((Scenario::new(config, channels)?, source))
    }
}
