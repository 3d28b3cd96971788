//! Channel construction: the deterministic two-IR / one-ER deployments with
//! path loss, and seeded i.i.d. Rayleigh channels for test ensembles.
//!
//! Phase convention: a channel written as `[1, e^{jθ}, …]ᴴ` is stored with
//! entries `e^{-jnθ}`, so the received signal is always `hᴴx` with the
//! stored vector.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CVector, ChannelSet, C64};

/// Geometry of the deterministic deployment: IR-1 at broadside, IR-2 at
/// phase progression `theta` with amplitude ratio `gamma`, and the ER at
/// phase progression `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterministicChannelSpec {
    pub ir_distance: f64,
    pub er_distance: f64,
    /// Amplitude path-loss exponent; channels scale as `d^-exponent`.
    #[serde(default = "default_exponent")]
    pub path_loss_exponent_amplitude: f64,
    pub gamma: f64,
    pub theta: f64,
    pub beta: f64,
}

fn default_exponent() -> f64 {
    1.5
}

impl DeterministicChannelSpec {
    /// 10 m distances and amplitude exponent 3/2.
    pub fn with_angles(gamma: f64, theta: f64, beta: f64) -> Self {
        DeterministicChannelSpec {
            ir_distance: 10.0,
            er_distance: 10.0,
            path_loss_exponent_amplitude: 1.5,
            gamma,
            theta,
            beta,
        }
    }

    /// The rate-energy and power-allocation deployment: γ = 1, θ = 4π/9, β = 2π/9.
    pub fn tradeoff_default() -> Self {
        Self::with_angles(1.0, 4.0 * PI / 9.0, 2.0 * PI / 9.0)
    }
}

/// Unit-modulus phase progression `e^{-j n angle}` for `n = 0..len`.
pub fn steering_vector(len: usize, angle: f64) -> CVector {
    CVector::from_fn(len, |n, _| C64::from_polar(1.0, -(n as f64) * angle))
}

/// Build `h_1 = d_h^-a [1,…,1]`, `h_2 = d_h^-a γ a(θ)`, `g_1 = d_g^-a a(β)`.
pub fn build_paper_channels(spec: &DeterministicChannelSpec, n_t: usize) -> Result<ChannelSet> {
    if !(spec.ir_distance > 0.0 && spec.er_distance > 0.0) {
        return Err(Error::Config("channel distances must be positive".into()));
    }
    if !(spec.gamma > 0.0) {
        return Err(Error::Config("gamma must be positive".into()));
    }
    if n_t == 0 {
        return Err(Error::Config("need at least one transmit antenna".into()));
    }
    let ir_loss = spec.ir_distance.powf(-spec.path_loss_exponent_amplitude);
    let er_loss = spec.er_distance.powf(-spec.path_loss_exponent_amplitude);
    let scaled = |v: CVector, s: f64| v * C64::new(s, 0.0);

    Ok(ChannelSet {
        ir_channels: vec![
            scaled(steering_vector(n_t, 0.0), ir_loss),
            scaled(steering_vector(n_t, spec.theta), ir_loss * spec.gamma),
        ],
        er_channels: vec![scaled(steering_vector(n_t, spec.beta), er_loss)],
    })
}

/// Draw one CN(0, 1) sample from two uniforms: `|z|² = -ln(1-u₁)` is
/// Exp(1) distributed and the phase is `2π u₂`.
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    C64::from_polar((-(1.0 - u1).ln()).sqrt(), 2.0 * PI * u2)
}

pub(crate) fn complex_gaussian_vector<R: Rng>(rng: &mut R, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| complex_gaussian(rng))
}

/// I.i.d. CN(0, 1) channels, reproducible per seed.
///
/// The stream is ChaCha20 seeded through `seed_from_u64`; uniforms are the
/// `rand` 0.8 53-bit `f64` mapping. IR channels are drawn first (receiver by
/// receiver, antenna by antenna), then ER channels, two uniforms per entry.
pub fn build_random_channels(n_t: usize, num_irs: usize, num_ers: usize, seed: u64) -> ChannelSet {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ir_channels = (0..num_irs)
        .map(|_| complex_gaussian_vector(&mut rng, n_t))
        .collect();
    let er_channels = (0..num_ers)
        .map(|_| complex_gaussian_vector(&mut rng, n_t))
        .collect();
    ChannelSet {
        ir_channels,
        er_channels,
    }
}
