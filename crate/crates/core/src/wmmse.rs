//! Mean-square-error machinery behind the rate/WMMSE equivalence.
//!
//! For fixed precoders, each stream at each IR gets a scalar receive
//! equalizer `g` and an MSE weight `w`. At the MMSE equalizer and the weight
//! `w = 1/ε`, the augmented weighted MSE `wε − log₂w` equals `1 − R` for that
//! stream, which turns rate maximization into a problem that is convex in the
//! precoders once `(g, w)` are frozen.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EffectiveChannels, PrecoderSet, C64};
use crate::physics::{gain, private_received_power};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stream {
    Common,
    Private,
}

/// How the MSE weights are set from the MMSEs.
///
/// `Reciprocal` is `w = 1/ε`, under which `wε − log₂w = 1 − R` exactly at the
/// MMSE point. It is not the minimizer of `wε − log₂w` over `w`, so an outer
/// loop built on it need not increase the rate at every step. `Exact` uses the
/// minimizer `w = 1/(ε ln 2)`, where the minimum is `κ − R` with
/// `κ = 1/ln 2 + log₂ ln 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightRule {
    Reciprocal,
    #[default]
    Exact,
}

impl WeightRule {
    /// Factor `c` in `w = c/ε`.
    pub fn scale(self) -> f64 {
        match self {
            WeightRule::Reciprocal => 1.0,
            WeightRule::Exact => std::f64::consts::LOG2_E,
        }
    }

    /// `κ` with `wε − log₂w = κ − R` at the MMSE point.
    pub fn offset(self) -> f64 {
        match self {
            WeightRule::Reciprocal => 1.0,
            WeightRule::Exact => std::f64::consts::LOG2_E + std::f64::consts::LN_2.log2(),
        }
    }
}

/// Receive equalizers and MSE weights for every IR.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerState {
    pub common_equalizers: Vec<C64>,
    pub private_equalizers: Vec<C64>,
    pub common_weights: Vec<f64>,
    pub private_weights: Vec<f64>,
    pub rule: WeightRule,
}

impl EqualizerState {
    pub fn equalizer(&self, k: usize, stream: Stream) -> C64 {
        match stream {
            Stream::Common => self.common_equalizers[k],
            Stream::Private => self.private_equalizers[k],
        }
    }

    pub fn weight(&self, k: usize, stream: Stream) -> f64 {
        match stream {
            Stream::Common => self.common_weights[k],
            Stream::Private => self.private_weights[k],
        }
    }
}

/// Minimized MSE of every stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmseValues {
    pub common: Vec<f64>,
    pub private: Vec<f64>,
}

/// Received powers, MMSEs and augmented WMSEs (at the MMSE point) per IR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmseReport {
    /// `(T_{c,k}, T_k)` per IR.
    pub received_powers: Vec<(f64, f64)>,
    pub mmse_values: MmseValues,
    /// `(ξ_{c,k}, ξ_k)` per IR.
    pub augmented_wmse: Vec<(f64, f64)>,
}

/// `(T_{c,k}, T_k)`: total received power before and after removing the
/// common stream, with unit noise.
pub fn received_powers(ch: &EffectiveChannels, p: &PrecoderSet, k: usize) -> (f64, f64) {
    let t_private = private_received_power(ch, p, k);
    (t_private + gain(&ch.ir[k], &p.common), t_private)
}

fn stream_terms(ch: &EffectiveChannels, p: &PrecoderSet, k: usize, stream: Stream) -> (f64, C64) {
    let (t_common, t_private) = received_powers(ch, p, k);
    match stream {
        Stream::Common => (t_common, ch.ir[k].dotc(&p.common)),
        Stream::Private => (t_private, ch.ir[k].dotc(&p.private[k])),
    }
}

/// `|g|² T − 2 Re{g hᴴp} + 1` for the requested stream with equalizer `g`.
pub fn mse_with(ch: &EffectiveChannels, p: &PrecoderSet, k: usize, stream: Stream, g: C64) -> f64 {
    let (t, hp) = stream_terms(ch, p, k, stream);
    g.norm_sqr() * t - 2.0 * (g * hp).re + 1.0
}

pub fn mse(
    ch: &EffectiveChannels,
    p: &PrecoderSet,
    state: &EqualizerState,
    k: usize,
    stream: Stream,
) -> f64 {
    mse_with(ch, p, k, stream, state.equalizer(k, stream))
}

/// MMSE equalizers `g = (hᴴp)* / T`, returned as `(common, private)`.
pub fn mmse_equalizers(ch: &EffectiveChannels, p: &PrecoderSet) -> (Vec<C64>, Vec<C64>) {
    let per_stream = |stream| {
        (0..ch.ir.len())
            .map(|k| {
                let (t, hp) = stream_terms(ch, p, k, stream);
                hp.conj() / t
            })
            .collect()
    };
    (per_stream(Stream::Common), per_stream(Stream::Private))
}

/// Minimized MSEs `(T − |hᴴp|²)/T`. The numerator is accumulated directly as
/// interference plus noise, which keeps it at least 1.
pub fn mmse_values(ch: &EffectiveChannels, p: &PrecoderSet) -> MmseValues {
    let k_count = ch.ir.len();
    let mut common = Vec::with_capacity(k_count);
    let mut private = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let (t_common, t_private) = received_powers(ch, p, k);
        common.push(t_private / t_common);
        let leftover = t_private - gain(&ch.ir[k], &p.private[k]);
        private.push(leftover / t_private);
    }
    MmseValues { common, private }
}

/// Optimal MSE weights `w = 1/ε^MMSE`, returned as `(common, private)`.
pub fn optimal_weights(mmse: &MmseValues) -> (Vec<f64>, Vec<f64>) {
    let inv = |v: &[f64]| v.iter().map(|e| 1.0 / e).collect();
    (inv(&mmse.common), inv(&mmse.private))
}

/// Closed-form equalizer and weight update for the given precoders, with
/// `w = 1/ε`.
pub fn mmse_state(ch: &EffectiveChannels, p: &PrecoderSet) -> EqualizerState {
    mmse_state_with(ch, p, WeightRule::Reciprocal)
}

pub fn mmse_state_with(
    ch: &EffectiveChannels,
    p: &PrecoderSet,
    rule: WeightRule,
) -> EqualizerState {
    let (common_equalizers, private_equalizers) = mmse_equalizers(ch, p);
    let (mut common_weights, mut private_weights) = optimal_weights(&mmse_values(ch, p));
    let c = rule.scale();
    common_weights
        .iter_mut()
        .chain(private_weights.iter_mut())
        .for_each(|w| *w *= c);
    EqualizerState {
        common_equalizers,
        private_equalizers,
        common_weights,
        private_weights,
        rule,
    }
}

/// `w ε − log₂ w` for one stream under the equalizers and weights in `state`.
pub fn augmented_wmse(
    ch: &EffectiveChannels,
    p: &PrecoderSet,
    state: &EqualizerState,
    k: usize,
    stream: Stream,
) -> Result<f64> {
    let w = state.weight(k, stream);
    if !(w > 0.0) {
        return Err(Error::Numerical(format!(
            "MSE weight of IR-{} {:?} stream must be positive, got {w}",
            k + 1,
            stream
        )));
    }
    Ok(w * mse(ch, p, state, k, stream) - w.log2())
}

pub fn wmse_report(ch: &EffectiveChannels, p: &PrecoderSet) -> WmseReport {
    let mmse = mmse_values(ch, p);
    let received_powers = (0..ch.ir.len())
        .map(|k| received_powers(ch, p, k))
        .collect();
    // At w = 1/ε the augmented WMSE is 1 + log₂ ε.
    let augmented_wmse = mmse
        .common
        .iter()
        .zip(&mmse.private)
        .map(|(c, p)| (1.0 + c.log2(), 1.0 + p.log2()))
        .collect();
    WmseReport {
        received_powers,
        mmse_values: mmse,
        augmented_wmse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CVector;

    /// One antenna, one IR, h = 1, p_1 = 1, no common stream: T = 2.
    fn scalar_case() -> (EffectiveChannels, PrecoderSet) {
        let ch = EffectiveChannels {
            ir: vec![CVector::from_element(1, C64::new(1.0, 0.0))],
            er: vec![],
            harvest_efficiency: 1.0,
        };
        let mut p = PrecoderSet::zeros(1, 1, 0);
        p.private[0][0] = C64::new(1.0, 0.0);
        (ch, p)
    }

    #[test]
    fn zero_equalizer_has_unit_mse() {
        let (ch, p) = scalar_case();
        assert_eq!(
            mse_with(&ch, &p, 0, Stream::Private, C64::new(0.0, 0.0)),
            1.0
        );
    }

    #[test]
    fn scalar_mse_at_half() {
        let (ch, p) = scalar_case();
        let e = mse_with(&ch, &p, 0, Stream::Private, C64::new(0.5, 0.0));
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scalar_mmse_equalizer_and_value() {
        let (ch, p) = scalar_case();
        let (gc, gp) = mmse_equalizers(&ch, &p);
        assert_eq!(gc[0], C64::new(0.0, 0.0));
        assert!((gp[0] - C64::new(0.5, 0.0)).norm() < 1e-15);
        let m = mmse_values(&ch, &p);
        assert!((m.private[0] - 0.5).abs() < 1e-15);
        assert_eq!(m.common[0], 1.0);
        // γ = 1/ε − 1
        assert!((1.0 / m.private[0] - 1.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_invert_mmse() {
        let m = MmseValues {
            common: vec![1.0],
            private: vec![0.5],
        };
        assert_eq!(optimal_weights(&m), (vec![1.0], vec![2.0]));
    }

    #[test]
    fn augmented_wmse_examples() {
        let (ch, p) = scalar_case();
        let mut state = mmse_state(&ch, &p);
        let xi = augmented_wmse(&ch, &p, &state, 0, Stream::Private).unwrap();
        assert!(xi.abs() < 1e-15, "1 - R = 0 for R = 1, got {xi}");

        state.private_weights[0] = 1.0;
        let e = mse(&ch, &p, &state, 0, Stream::Private);
        let xi = augmented_wmse(&ch, &p, &state, 0, Stream::Private).unwrap();
        assert_eq!(xi, e);

        state.private_weights[0] = 0.0;
        assert!(augmented_wmse(&ch, &p, &state, 0, Stream::Private).is_err());
    }

    #[test]
    fn report_is_ordered() {
        let (ch, mut p) = scalar_case();
        p.common[0] = C64::new(0.3, 0.4);
        let r = wmse_report(&ch, &p);
        let (tc, tp) = r.received_powers[0];
        assert!(tc >= tp && tp >= 1.0);
        assert!(r.mmse_values.common[0] > 0.0 && r.mmse_values.common[0] <= 1.0);
    }

    #[test]
    fn exact_weights_minimize_augmented_wmse() {
        let (ch, p) = scalar_case();
        let state = mmse_state_with(&ch, &p, WeightRule::Exact);
        assert!((state.private_weights[0] - 2.0 / std::f64::consts::LN_2).abs() < 1e-12);
        let xi = augmented_wmse(&ch, &p, &state, 0, Stream::Private).unwrap();
        assert!((xi - (WeightRule::Exact.offset() - 1.0)).abs() < 1e-12);
        let e = mmse_values(&ch, &p).private[0];
        for w in [1.0, 2.0, 2.5, 3.0, 4.0] {
            assert!(w * e - f64::log2(w) >= xi - 1e-15);
        }
    }

    #[test]
    fn weight_rule_constants() {
        assert_eq!(WeightRule::Reciprocal.scale(), 1.0);
        assert_eq!(WeightRule::Reciprocal.offset(), 1.0);
        let k = WeightRule::Exact.offset();
        assert!((k - 0.913_928_667_944_065_7).abs() < 1e-12, "{k}");
    }
}
