#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ratesplit_swipt::algorithms::max_harvestable_energy;
use ratesplit_swipt::channel::build_random_channels;
use ratesplit_swipt::model::{CVector, PrecoderSet, Scenario, SystemConfig, C64};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn random_vector(rng: &mut ChaCha20Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_precoders(rng: &mut ChaCha20Rng, n_t: usize, k: usize, j: usize) -> PrecoderSet {
    let mut p = PrecoderSet::zeros(n_t, k, j);
    for v in p.iter_mut() {
        *v = random_vector(rng, n_t);
    }
    p
}

/// CN(0, 1) channels, `P_t = 1`, `σ² = 0.1`, ζ = 0.5, and an energy threshold
/// at `fraction` of the largest harvestable power.
pub fn random_scenario(seed: u64, n_t: usize, k: usize, j: usize, fraction: f64) -> Scenario {
    let config = SystemConfig {
        num_tx_antennas: n_t,
        num_irs: k,
        num_ers: j,
        total_power: 1.0,
        noise_power_ir: 0.1,
        harvest_efficiency: 0.5,
        energy_threshold: 0.0,
        rate_weights: (0..k).map(|i| 1.0 + 0.5 * i as f64).collect(),
    };
    let mut sc = Scenario::new(config, build_random_channels(n_t, k, j, seed)).unwrap();
    sc.config.energy_threshold = fraction * max_harvestable_energy(&sc);
    sc
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
