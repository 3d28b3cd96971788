//! Closed-form physical-layer quantities.
//!
//! Every function here takes [`EffectiveChannels`]: IR channels already
//! divided by the noise standard deviation (unit-noise model), ER channels in
//! raw units so that harvested energy comes out in watts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CVector, CommonRateSplit, EffectiveChannels, PrecoderSet};

/// Slack allowed when checking a common-rate split against the common rate.
pub const COMMON_RATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub common_rates: Vec<f64>,
    pub private_rates: Vec<f64>,
    /// Minimum of `common_rates`: the rate every IR can decode.
    pub common_rate_bound: f64,
}

#[inline]
pub(crate) fn gain(h: &CVector, p: &CVector) -> f64 {
    h.dotc(p).norm_sqr()
}

/// Σ_j |h_kᴴ p_j|² + 1: private-stream interference plus noise, including
/// the desired private stream.
pub(crate) fn private_received_power(ch: &EffectiveChannels, p: &PrecoderSet, k: usize) -> f64 {
    let h = &ch.ir[k];
    p.private.iter().map(|pj| gain(h, pj)).sum::<f64>() + 1.0
}

/// SINR of the common stream at IR `k`. Energy signals are known to the IRs
/// and cancelled, so they never appear as interference.
pub fn sinr_common(ch: &EffectiveChannels, p: &PrecoderSet, k: usize) -> f64 {
    gain(&ch.ir[k], &p.common) / private_received_power(ch, p, k)
}

/// SINR of the private stream at IR `k` after the common stream is removed.
pub fn sinr_private(ch: &EffectiveChannels, p: &PrecoderSet, k: usize) -> f64 {
    let desired = gain(&ch.ir[k], &p.private[k]);
    desired / (private_received_power(ch, p, k) - desired)
}

pub fn achievable_rates(ch: &EffectiveChannels, p: &PrecoderSet) -> RateReport {
    let k_count = ch.ir.len();
    let common_rates: Vec<f64> = (0..k_count)
        .map(|k| sinr_common(ch, p, k).ln_1p() / std::f64::consts::LN_2)
        .collect();
    let private_rates = (0..k_count)
        .map(|k| sinr_private(ch, p, k).ln_1p() / std::f64::consts::LN_2)
        .collect();
    let common_rate_bound = common_rates.iter().copied().fold(f64::INFINITY, f64::min);
    RateReport {
        common_rates,
        private_rates,
        common_rate_bound: if k_count == 0 { 0.0 } else { common_rate_bound },
    }
}

/// Power harvested by ER `j`: ζ times the power received from every
/// precoder, information-bearing or not.
pub fn harvested_energy(ch: &EffectiveChannels, p: &PrecoderSet, j: usize) -> f64 {
    let g = &ch.er[j];
    ch.harvest_efficiency * p.iter().map(|v| gain(g, v)).sum::<f64>()
}

pub fn total_harvested_energy(ch: &EffectiveChannels, p: &PrecoderSet) -> f64 {
    (0..ch.er.len()).map(|j| harvested_energy(ch, p, j)).sum()
}

/// Σ_k u_k (C_k + R_k). Fails if the split asks for more common rate than
/// every IR can decode.
pub fn weighted_sum_rate(
    weights: &[f64],
    ch: &EffectiveChannels,
    p: &PrecoderSet,
    split: &CommonRateSplit,
) -> Result<f64> {
    let rates = achievable_rates(ch, p);
    let split_sum = split.sum();
    if split_sum > rates.common_rate_bound + COMMON_RATE_TOLERANCE {
        return Err(Error::CommonRateExceeded {
            split_sum,
            bound: rates.common_rate_bound,
        });
    }
    Ok(weights
        .iter()
        .zip(&split.portions)
        .zip(&rates.private_rates)
        .map(|((u, c), r)| u * (c + r))
        .sum())
}
