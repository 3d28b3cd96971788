//! Alternating optimization of precoders, equalizers and MSE weights.
//!
//! The outer loop refreshes the MMSE equalizers and weights in closed form;
//! the inner loop then repeatedly solves the convex subproblem with the
//! energy constraint re-linearized at the latest precoders. Both loops are
//! monotone: the inner loop never accepts a point that raises the WMMSE
//! objective, which in turn makes the weighted sum rate non-decreasing
//! across outer iterations.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::complex_gaussian_vector;
use crate::error::{Error, Result};
use crate::model::{
    total_transmit_power, CVector, CommonRateSplit, ConvergenceLedger, EffectiveChannels,
    PrecoderSet, RatePoint, Scenario, Strategy, C64,
};
use crate::physics::{achievable_rates, total_harvested_energy, RateReport};
use crate::solver::{assemble_from_state, InteriorPoint, QcqpBackend, SolverStatus, Tolerances};
use crate::wmmse::{augmented_wmse, mmse_state_with, EqualizerState, Stream, WeightRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    /// Stop the inner loop when the WMMSE objective moves less than this.
    pub inner_tolerance: f64,
    /// Stop the outer loop when the WSR moves less than this.
    pub outer_tolerance: f64,
    pub max_inner_iterations: usize,
    pub max_outer_iterations: usize,
    /// Random starts in addition to the deterministic one.
    pub num_random_starts: usize,
    /// Watts of slack allowed on the power and energy constraints at output.
    pub feasibility_tolerance: f64,
    pub seed: u64,
    pub solver: Tolerances,
    #[serde(default)]
    pub weight_rule: WeightRule,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            inner_tolerance: 1e-6,
            outer_tolerance: 1e-4,
            max_inner_iterations: 50,
            max_outer_iterations: 500,
            num_random_starts: 9,
            feasibility_tolerance: 1e-9,
            seed: 0,
            solver: Tolerances::default(),
            weight_rule: WeightRule::default(),
        }
    }
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_tolerance > 0.0
            && self.outer_tolerance > 0.0
            && self.feasibility_tolerance > 0.0)
        {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_inner_iterations == 0 || self.max_outer_iterations == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Fraction of the power budget given to (common, private, energy) precoders
/// at initialization.
const POWER_SPLIT: [f64; 3] = [0.4, 0.4, 0.2];

/// Thresholds within this relative distance of the largest harvestable power
/// count as infeasible.
const Q_MAX_RELATIVE_MARGIN: f64 = 1e-9;

/// Unit-norm dominant eigenvector and eigenvalue of `Σ v vᴴ`.
pub fn dominant_direction(vectors: &[CVector], n_t: usize) -> (CVector, f64) {
    let mut gram = DMatrix::<C64>::zeros(n_t, n_t);
    for v in vectors {
        gram += v * v.adjoint();
    }
    let eig = gram.symmetric_eigen();
    let (best, value) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc },
            );
    (eig.eigenvectors.column(best).into_owned(), value.max(0.0))
}

/// Largest total harvested power any precoder set within the budget can
/// deliver: `ζ P_t λ_max(Σ g_j g_jᴴ)`.
pub fn max_harvestable_energy(scenario: &Scenario) -> f64 {
    let (_, lambda) =
        dominant_direction(&scenario.channels.er_channels, scenario.num_tx_antennas());
    scenario.config.harvest_efficiency * scenario.config.total_power * lambda
}

fn unit(v: &CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        CVector::zeros(v.len())
    }
}

/// Zero the precoders a strategy does not use.
pub fn apply_pinning(p: &mut PrecoderSet, strategy: Strategy) {
    if !strategy.uses_common_stream() {
        p.common.fill(C64::new(0.0, 0.0));
    }
    for (k, v) in p.private.iter_mut().enumerate() {
        if !strategy.private_active(k) {
            v.fill(C64::new(0.0, 0.0));
        }
    }
}

/// Starting precoders for one start of the AO loop.
///
/// Start 0 is deterministic: matched beams to each IR and ER and the common
/// precoder along the dominant direction of the IR channels. Later starts use
/// CN(0, 1) directions drawn from ChaCha20 seeded with `seed + start_index`.
/// Power is split 0.4 : 0.4 : 0.2 between common, private and energy
/// precoders (private and energy shares split evenly), the unused parts of a
/// strategy are zeroed, and the result is rescaled to use exactly `P_t`.
pub fn initialize_precoders(
    scenario: &Scenario,
    strategy: Strategy,
    start_index: usize,
    seed: u64,
) -> Result<PrecoderSet> {
    strategy.check(scenario.num_irs())?;
    let n_t = scenario.num_tx_antennas();
    let (k_count, j_count) = (scenario.num_irs(), scenario.num_ers());
    let eff = scenario.effective();

    let mut p = if start_index == 0 {
        PrecoderSet {
            common: dominant_direction(&eff.ir, n_t).0,
            private: eff.ir.iter().map(unit).collect(),
            energy: eff.er.iter().map(unit).collect(),
        }
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(start_index as u64));
        let mut draw = || unit(&complex_gaussian_vector(&mut rng, n_t));
        PrecoderSet {
            common: draw(),
            private: (0..k_count).map(|_| draw()).collect(),
            energy: (0..j_count).map(|_| draw()).collect(),
        }
    };

    let total = scenario.config.total_power;
    let amp =
        |share: f64, count: usize| C64::new((share * total / count.max(1) as f64).sqrt(), 0.0);
    p.common *= amp(POWER_SPLIT[0], 1);
    for v in &mut p.private {
        *v *= amp(POWER_SPLIT[1], k_count);
    }
    for v in &mut p.energy {
        *v *= amp(POWER_SPLIT[2], j_count);
    }
    apply_pinning(&mut p, strategy);

    let used = total_transmit_power(&p);
    if used > 0.0 {
        p.scale((total / used).sqrt());
    }
    Ok(p)
}

/// Move `p` toward the energy-optimal beam until the harvested energy reaches
/// `target`.
///
/// Every active precoder `p_b` is blended as `(1−t) p_b + t c_b u`, where `u`
/// is the dominant ER direction and `c_b ∝ uᴴp_b` with `Σ|c_b|² = P_t`; at
/// `t = 1` all power is on `u` and the energy is maximal. The smallest `t`
/// that meets the target is found by bisection. The blend never leaves the
/// power ball.
pub fn restore_energy(
    scenario: &Scenario,
    channels: &EffectiveChannels,
    strategy: Strategy,
    p: &PrecoderSet,
    target: f64,
) -> Result<PrecoderSet> {
    if total_harvested_energy(channels, p) >= target {
        return Ok(p.clone());
    }
    let n_t = scenario.num_tx_antennas();
    let (u, _) = dominant_direction(&channels.er, n_t);
    let total = scenario.config.total_power;

    let mut coeffs: Vec<C64> = p.iter().map(|v| u.dotc(v)).collect();
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in &mut coeffs {
            *c *= total.sqrt() / norm;
        }
    } else {
        // Nothing points at the ERs yet: put the whole budget on one active
        // precoder, preferring energy, then common, then private streams.
        let active: Vec<bool> = std::iter::once(strategy.uses_common_stream())
            .chain((0..scenario.num_irs()).map(|k| strategy.private_active(k)))
            .chain((0..scenario.num_ers()).map(|_| true))
            .collect();
        let energy_slot = 1 + scenario.num_irs();
        let slot = if scenario.num_ers() > 0 {
            energy_slot
        } else {
            active.iter().position(|&a| a).unwrap_or(0)
        };
        coeffs[slot] = C64::new(total.sqrt(), 0.0);
    }

    let blend = |t: f64| {
        let mut q = p.clone();
        for (v, c) in q.iter_mut().zip(&coeffs) {
            *v = &*v * C64::new(1.0 - t, 0.0) + &u * (c * t);
        }
        apply_pinning(&mut q, strategy);
        q
    };
    let full = blend(1.0);
    if total_harvested_energy(channels, &full) < target {
        return Err(Error::Infeasible(format!(
            "harvested energy cannot reach {target:e} W (maximum {:e} W)",
            total_harvested_energy(channels, &full)
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if total_harvested_energy(channels, &blend(mid)) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(blend(hi))
}

/// `Σ_k u_k (X_k + ξ_k(P))` under the frozen equalizers and weights.
pub fn wmmse_objective(
    scenario: &Scenario,
    channels: &EffectiveChannels,
    state: &EqualizerState,
    p: &PrecoderSet,
    shares: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for (k, u) in scenario.config.rate_weights.iter().enumerate() {
        total += u * (shares[k] + augmented_wmse(channels, p, state, k, Stream::Private)?);
    }
    Ok(total)
}

/// Result of one run of the inner successive-convex-approximation loop.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome {
    pub precoders: PrecoderSet,
    /// Transformed WMSE variables `X_k` (zero where pinned).
    pub shares: Vec<f64>,
    /// WMMSE objective at the input point followed by every accepted step.
    pub trace: Vec<f64>,
    pub solves: usize,
}

/// Solve the convex subproblem repeatedly with `(g, w)` frozen, re-anchoring
/// the energy linearization at each new solution, until the WMMSE objective
/// changes by at most `inner_tolerance`. A solution that would increase the
/// objective (solver round-off) is discarded and the loop stops.
#[allow(clippy::too_many_arguments)]
pub fn sca_inner_loop(
    scenario: &Scenario,
    channels: &EffectiveChannels,
    strategy: Strategy,
    state: &EqualizerState,
    precoders_in: &PrecoderSet,
    shares_in: &[f64],
    config: &AlgorithmConfig,
    backend: &dyn QcqpBackend,
) -> Result<InnerOutcome> {
    let mut p = precoders_in.clone();
    let mut shares = shares_in.to_vec();
    let mut value = wmmse_objective(scenario, channels, state, &p, &shares)?;
    let mut trace = vec![value];
    let mut solves = 0;

    for iteration in 0..config.max_inner_iterations {
        let assembled = assemble_from_state(scenario, channels, strategy, state, &p)?;
        let start = assembled.layout.pack(&p, &shares);
        let result = backend.solve(&assembled.problem, &config.solver, Some(&start))?;
        solves += 1;
        match result.status {
            SolverStatus::Optimal => {}
            SolverStatus::Infeasible if iteration == 0 => {
                return Err(Error::Infeasible(
                    result
                        .message
                        .unwrap_or_else(|| "convex subproblem infeasible".into()),
                ));
            }
            status => {
                return Err(Error::Numerical(format!(
                    "subproblem ended with {status:?} at inner iteration {iteration}: {}",
                    result.message.unwrap_or_default()
                )));
            }
        }
        let (p_new, shares_new) = assembled.layout.unpack(&result.solution);
        let value_new = wmmse_objective(scenario, channels, state, &p_new, &shares_new)?;
        if value_new > value {
            break;
        }
        let change = value - value_new;
        p = p_new;
        shares = shares_new;
        value = value_new;
        trace.push(value);
        if change <= config.inner_tolerance {
            break;
        }
    }
    Ok(InnerOutcome {
        precoders: p,
        shares,
        trace,
        solves,
    })
}

/// Common-rate split from the solver's `−X`: clip at zero, keep only the
/// IRs the strategy lets share the common stream, then hand any unassigned
/// common rate to them in proportion to their weights.
pub fn recover_common_split(
    strategy: Strategy,
    weights: &[f64],
    rates: &RateReport,
    raw: &[f64],
) -> CommonRateSplit {
    let free: Vec<bool> = (0..weights.len())
        .map(|k| strategy.common_share_free(k))
        .collect();
    let mut portions: Vec<f64> = raw
        .iter()
        .zip(&free)
        .map(|(c, f)| if *f { c.max(0.0) } else { 0.0 })
        .collect();
    let bound = rates.common_rate_bound.max(0.0);
    let sum: f64 = portions.iter().sum();
    if sum > bound && sum > 0.0 {
        for c in &mut portions {
            *c *= bound / sum;
        }
    } else if sum < bound {
        let weight_sum: f64 = weights
            .iter()
            .zip(&free)
            .filter(|(_, f)| **f)
            .map(|(u, _)| u)
            .sum();
        if weight_sum > 0.0 {
            let surplus = bound - sum;
            for ((c, u), f) in portions.iter_mut().zip(weights).zip(&free) {
                if *f {
                    *c += surplus * u / weight_sum;
                }
            }
        }
    }
    CommonRateSplit { portions }
}

fn weighted_total(weights: &[f64], split: &CommonRateSplit, rates: &RateReport) -> f64 {
    weights
        .iter()
        .zip(&split.portions)
        .zip(&rates.private_rates)
        .map(|((u, c), r)| u * (c + r))
        .sum()
}

/// A starting point for the AO loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub precoders: PrecoderSet,
    /// Common-rate split to start from; recovered from the precoders if absent.
    pub split: Option<CommonRateSplit>,
}

impl From<&RatePoint> for Seed {
    fn from(point: &RatePoint) -> Self {
        Seed {
            precoders: point.precoders.clone(),
            split: Some(point.common_rate_split.clone()),
        }
    }
}

/// One run of the outer AO loop from a given seed.
pub fn ao_single_start(
    scenario: &Scenario,
    strategy: Strategy,
    config: &AlgorithmConfig,
    seed: &Seed,
    start_index: usize,
    backend: &dyn QcqpBackend,
) -> Result<RatePoint> {
    strategy.check(scenario.num_irs())?;
    let clock = Instant::now();
    let eff = scenario.effective();
    let weights = &scenario.config.rate_weights;
    let threshold = scenario.config.energy_threshold;

    let q_max = max_harvestable_energy(scenario);
    // At the maximum itself every precoder must point along the dominant ER
    // direction, which leaves no strictly feasible point for the subproblem.
    if threshold > 0.0 && threshold >= q_max * (1.0 - Q_MAX_RELATIVE_MARGIN) {
        return Err(Error::Infeasible(format!(
            "energy threshold {threshold:e} W is not below the maximum harvestable {q_max:e} W"
        )));
    }

    let mut p = seed.precoders.clone();
    apply_pinning(&mut p, strategy);
    let power = total_transmit_power(&p);
    if power > scenario.config.total_power {
        p.scale((scenario.config.total_power / power).sqrt());
    }
    // A seed that already clears the threshold is kept as is, so converged
    // solutions passed in as seeds start exactly where they ended.
    if threshold > 0.0 && scenario.num_ers() > 0 && total_harvested_energy(&eff, &p) <= threshold {
        let target = threshold + (1e-3 * threshold).min(0.5 * (q_max - threshold));
        p = restore_energy(scenario, &eff, strategy, &p, target)?;
    }

    let mut rates = achievable_rates(&eff, &p);
    let mut split = match &seed.split {
        Some(s) if s.sum() <= rates.common_rate_bound => {
            recover_common_split(strategy, weights, &rates, &s.portions)
        }
        _ => recover_common_split(strategy, weights, &rates, &vec![0.0; weights.len()]),
    };
    let mut wsr = weighted_total(weights, &split, &rates);
    let mut ledger = ConvergenceLedger {
        outer_trace: vec![wsr],
        ..Default::default()
    };
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_outer_iterations {
        iterations += 1;
        let state = mmse_state_with(&eff, &p, config.weight_rule);
        let shares: Vec<f64> = split.portions.iter().map(|c| -c).collect();
        let inner = sca_inner_loop(
            scenario, &eff, strategy, &state, &p, &shares, config, backend,
        )?;
        let rates_new = achievable_rates(&eff, &inner.precoders);
        let raw: Vec<f64> = inner.shares.iter().map(|x| -x).collect();
        let split_new = recover_common_split(strategy, weights, &rates_new, &raw);
        let wsr_new = weighted_total(weights, &split_new, &rates_new);
        // Only the exact weight rule guarantees ascent; a step that loses
        // rate ends the loop at the previous iterate.
        if wsr_new < wsr {
            converged = true;
            break;
        }
        p = inner.precoders;
        rates = rates_new;
        split = split_new;
        ledger.inner_traces.push(inner.trace);
        ledger.outer_trace.push(wsr_new);
        let change = wsr_new - wsr;
        wsr = wsr_new;
        if change <= config.outer_tolerance {
            converged = true;
            break;
        }
    }
    ledger.wall_time = clock.elapsed().as_secs_f64();

    let energy = total_harvested_energy(&eff, &p);
    let power = total_transmit_power(&p);
    if power > scenario.config.total_power + config.feasibility_tolerance
        || energy < threshold - config.feasibility_tolerance
    {
        return Err(Error::Numerical(format!(
            "output violates constraints: power {power:e} W, energy {energy:e} W"
        )));
    }

    Ok(RatePoint {
        strategy,
        wsr,
        per_ir_total_rates: split
            .portions
            .iter()
            .zip(&rates.private_rates)
            .map(|(c, r)| c + r)
            .collect(),
        common_rate_split: split,
        private_rates: rates.private_rates.clone(),
        common_rate_bound: if strategy.uses_common_stream() {
            rates.common_rate_bound
        } else {
            0.0
        },
        harvested_energy_total: energy,
        power_breakdown: p.power_breakdown(),
        iterations_outer: iterations,
        converged,
        start_index,
        precoders: p,
        ledger,
    })
}

/// Outcome of one start, kept for the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub start_index: usize,
    pub wsr: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStartOutcome {
    pub best: RatePoint,
    pub starts: Vec<StartRecord>,
}

/// Run the AO loop from every extra seed and from `1 + num_random_starts`
/// generated starts, and keep the highest WSR.
pub fn ao_multi_start(
    scenario: &Scenario,
    strategy: Strategy,
    config: &AlgorithmConfig,
    extra_seeds: &[Seed],
) -> Result<MultiStartOutcome> {
    config.validate()?;
    strategy.check(scenario.num_irs())?;
    let generated = 1 + config.num_random_starts;
    let mut seeds = Vec::with_capacity(generated + extra_seeds.len());
    for i in 0..generated {
        seeds.push((
            i,
            Seed {
                precoders: initialize_precoders(scenario, strategy, i, config.seed)?,
                split: None,
            },
        ));
    }
    for (i, s) in extra_seeds.iter().enumerate() {
        seeds.push((generated + i, s.clone()));
    }

    let backend = InteriorPoint::default();
    let results: Vec<(usize, Result<RatePoint>)> = seeds
        .par_iter()
        .map(|(i, seed)| {
            (
                *i,
                ao_single_start(scenario, strategy, config, seed, *i, &backend),
            )
        })
        .collect();

    let mut best: Option<RatePoint> = None;
    let mut starts = Vec::with_capacity(results.len());
    let mut infeasible = None;
    let mut failures = Vec::new();
    for (i, r) in results {
        match r {
            Ok(point) => {
                starts.push(StartRecord {
                    start_index: i,
                    wsr: Some(point.wsr),
                    error: None,
                });
                if best.as_ref().is_none_or(|b| point.wsr > b.wsr) {
                    best = Some(point);
                }
            }
            Err(e) => {
                starts.push(StartRecord {
                    start_index: i,
                    wsr: None,
                    error: Some(e.to_string()),
                });
                match e {
                    Error::Infeasible(msg) => infeasible = Some(msg),
                    other => failures.push(format!("start {i}: {other}")),
                }
            }
        }
    }
    match best {
        Some(best) => Ok(MultiStartOutcome { best, starts }),
        None => match infeasible {
            Some(msg) => Err(Error::Infeasible(msg)),
            None => Err(Error::Numerical(format!(
                "every start failed: {}",
                failures.join("; ")
            ))),
        },
    }
}

/// Best rate point of `strategy` over the default starts.
pub fn ao_outer_loop(
    scenario: &Scenario,
    strategy: Strategy,
    config: &AlgorithmConfig,
) -> Result<RatePoint> {
    Ok(ao_multi_start(scenario, strategy, config, &[])?.best)
}

/// Strategy families compared by the suite; SC-SIC stands for the better of
/// its two decoding orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Rs,
    Mulp,
    Scsic,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Rs, StrategyKind::Mulp, StrategyKind::Scsic];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Rs => "RS",
            StrategyKind::Mulp => "MULP",
            StrategyKind::Scsic => "SCSIC",
        }
    }
}

/// Per-strategy outcome of a suite run.
#[derive(Debug)]
pub struct SuiteEntry {
    pub kind: StrategyKind,
    pub outcome: Result<RatePoint>,
}

/// Previous solutions used to warm-start a suite run.
#[derive(Debug, Clone, Default)]
pub struct WarmStarts {
    pub rs: Vec<Seed>,
    pub mulp: Vec<Seed>,
    pub scsic: Vec<Seed>,
}

/// Run the requested strategies. MU-LP runs first, then SC-SIC (both
/// decoding orders, better kept, only for two IRs), then RS with extra starts
/// at the converged MU-LP and SC-SIC solutions, which are RS-feasible; this
/// makes RS at least as good as both by construction.
pub fn run_strategy_suite(
    scenario: &Scenario,
    config: &AlgorithmConfig,
    kinds: &[StrategyKind],
    warm: &WarmStarts,
) -> Vec<SuiteEntry> {
    let wants = |k| kinds.contains(&k);
    let mut entries = Vec::new();
    let mut rs_seeds = warm.rs.clone();

    if wants(StrategyKind::Mulp) {
        let outcome = ao_multi_start(scenario, Strategy::Mulp, config, &warm.mulp).map(|o| o.best);
        if let Ok(point) = &outcome {
            rs_seeds.push(Seed::from(point));
        }
        entries.push(SuiteEntry {
            kind: StrategyKind::Mulp,
            outcome,
        });
    }

    if wants(StrategyKind::Scsic) {
        let outcome = if scenario.num_irs() != 2 {
            Err(Error::UnsupportedStrategy {
                strategy: "SCSIC".into(),
                num_irs: scenario.num_irs(),
            })
        } else {
            best_scsic(scenario, config, &warm.scsic)
        };
        if let Ok(point) = &outcome {
            rs_seeds.push(Seed::from(point));
        }
        entries.push(SuiteEntry {
            kind: StrategyKind::Scsic,
            outcome,
        });
    }

    if wants(StrategyKind::Rs) {
        let outcome = ao_multi_start(scenario, Strategy::Rs, config, &rs_seeds).map(|o| o.best);
        entries.insert(
            0,
            SuiteEntry {
                kind: StrategyKind::Rs,
                outcome,
            },
        );
    }
    entries
}

/// Both decoding orders; the stronger IR decoding is tried first and the
/// better result wins. Warm-start seeds are reused for both orders.
fn best_scsic(scenario: &Scenario, config: &AlgorithmConfig, warm: &[Seed]) -> Result<RatePoint> {
    let strength: Vec<f64> = scenario
        .channels
        .ir_channels
        .iter()
        .map(|h| h.norm_squared())
        .collect();
    let strong = if strength[1] > strength[0] { 1 } else { 0 };
    let mut best: Option<RatePoint> = None;
    let mut last_err = None;
    for decoder in [strong, 1 - strong] {
        let strategy = Strategy::Scsic { decoder };
        let seeds: Vec<Seed> = warm
            .iter()
            .filter(|s| s.precoders.private[1 - decoder].norm_squared() == 0.0)
            .cloned()
            .collect();
        match ao_multi_start(scenario, strategy, config, &seeds) {
            Ok(o) => {
                if best.as_ref().is_none_or(|b| o.best.wsr > b.wsr) {
                    best = Some(o.best);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one order was attempted"))
}
