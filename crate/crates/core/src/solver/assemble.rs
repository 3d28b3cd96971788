//! Builds the convex subproblem solved at each successive-convex-approximation
//! step: the WMSE objective and common-rate constraints for frozen
//! equalizers and weights, the energy constraint linearized at the current
//! precoders, the power ball, and `X ≤ 0`.
//!
//! Each complex precoder `p = a + jb` becomes the real block `[a; b]`, scaled
//! by `1/√P_t` so the power constraint reads `‖z‖² ≤ 1`. With `c` complex,
//! `Re{cᴴp} = [Re c; Im c]ᵀ[a; b]` and `|cᴴp|² = (u₁ᵀz)² + (u₂ᵀz)²` with
//! `u₂ = [−Im c; Re c]`.

use nalgebra::DVector;

use super::{ConstraintKind, ConvexSubproblem, Quadratic};
use crate::error::{Error, Result};
use crate::model::{
    total_transmit_power, CVector, EffectiveChannels, PrecoderSet, Scenario, Strategy, C64,
};
use crate::wmmse::EqualizerState;

/// Relative slack on the power budget for an expansion point.
const ANCHOR_POWER_TOLERANCE: f64 = 1e-9;

/// First-order lower bound of `|gᴴp|²` around `anchor`:
/// `2 Re{anchorᴴ g gᴴ p} − |gᴴ anchor|²`. Tight at `p = anchor`.
pub fn taylor_lower_bound(g: &CVector, p: &CVector, anchor: &CVector) -> f64 {
    let ga = g.dotc(anchor);
    2.0 * (ga.conj() * g.dotc(p)).re - ga.norm_sqr()
}

/// Where each precoder and common-rate variable lives in the real decision
/// vector. Pinned precoders and pinned common-rate shares have no slot.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableLayout {
    pub num_tx_antennas: usize,
    pub common: Option<usize>,
    pub private: Vec<Option<usize>>,
    pub energy: Vec<usize>,
    /// Index of the transformed-WMSE variable `X_k` of each IR.
    pub shares: Vec<Option<usize>>,
    /// Precoder entries are `scale ·` the stored variables.
    pub scale: f64,
    pub num_vars: usize,
    pub num_precoder_vars: usize,
}

impl VariableLayout {
    pub fn new(scenario: &Scenario, strategy: Strategy) -> Self {
        let n_t = scenario.num_tx_antennas();
        let block = 2 * n_t;
        let mut next = 0;
        let mut take = |active: bool| {
            active.then(|| {
                let at = next;
                next += block;
                at
            })
        };
        let common = take(strategy.uses_common_stream());
        let private = (0..scenario.num_irs())
            .map(|k| take(strategy.private_active(k)))
            .collect();
        let energy = (0..scenario.num_ers()).filter_map(|_| take(true)).collect();
        let num_precoder_vars = next;
        let shares = (0..scenario.num_irs())
            .map(|k| {
                strategy.common_share_free(k).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        VariableLayout {
            num_tx_antennas: n_t,
            common,
            private,
            energy,
            shares,
            scale: scenario.config.total_power.sqrt(),
            num_vars: next,
            num_precoder_vars,
        }
    }

    /// Offsets of every active precoder block paired with its anchor vector.
    fn blocks<'a>(&self, p: &'a PrecoderSet) -> Vec<(usize, &'a CVector)> {
        let mut out = Vec::new();
        if let Some(at) = self.common {
            out.push((at, &p.common));
        }
        for (at, v) in self.private.iter().zip(&p.private) {
            if let Some(at) = at {
                out.push((*at, v));
            }
        }
        for (at, v) in self.energy.iter().zip(&p.energy) {
            out.push((*at, v));
        }
        out
    }

    /// Stack precoders and `X` into a decision vector. Entries for pinned
    /// slots are dropped.
    pub fn pack(&self, p: &PrecoderSet, shares: &[f64]) -> DVector<f64> {
        let n_t = self.num_tx_antennas;
        let mut z = DVector::zeros(self.num_vars);
        for (at, v) in self.blocks(p) {
            for i in 0..n_t {
                z[at + i] = v[i].re / self.scale;
                z[at + n_t + i] = v[i].im / self.scale;
            }
        }
        for (slot, x) in self.shares.iter().zip(shares) {
            if let Some(i) = slot {
                z[*i] = *x;
            }
        }
        z
    }

    /// Inverse of [`pack`](Self::pack); pinned precoders come back as zero
    /// and pinned shares as `0`.
    pub fn unpack(&self, z: &DVector<f64>) -> (PrecoderSet, Vec<f64>) {
        let n_t = self.num_tx_antennas;
        let read = |at: usize| {
            CVector::from_fn(n_t, |i, _| {
                C64::new(z[at + i], z[at + n_t + i]) * self.scale
            })
        };
        let zero = || CVector::zeros(n_t);
        let p = PrecoderSet {
            common: self.common.map_or_else(zero, read),
            private: self
                .private
                .iter()
                .map(|at| at.map_or_else(zero, read))
                .collect(),
            energy: self.energy.iter().map(|&at| read(at)).collect(),
        };
        let shares = self
            .shares
            .iter()
            .map(|s| s.map_or(0.0, |i| z[i]))
            .collect();
        (p, shares)
    }
}

/// Adds `coef · |cᴴp|²` for the precoder block at `at`.
fn add_gain(f: &mut Quadratic, at: usize, c: &CVector, coef: f64, scale: f64) {
    let n_t = c.len();
    let (u1, u2) = lifted(c, n_t);
    let q = f.quad_mut();
    let w = coef * scale * scale;
    let mut view = q.view_mut((at, at), (2 * n_t, 2 * n_t));
    view.ger(w, &u1, &u1, 1.0);
    view.ger(w, &u2, &u2, 1.0);
}

/// Adds `coef · Re{cᴴp}` for the precoder block at `at`.
fn add_real_inner(f: &mut Quadratic, at: usize, c: &CVector, coef: f64, scale: f64) {
    let n_t = c.len();
    let (u1, _) = lifted(c, n_t);
    let mut view = f.lin.rows_mut(at, 2 * n_t);
    view.axpy(coef * scale, &u1, 1.0);
}

fn lifted(c: &CVector, n_t: usize) -> (DVector<f64>, DVector<f64>) {
    let u1 = DVector::from_fn(
        2 * n_t,
        |i, _| if i < n_t { c[i].re } else { c[i - n_t].im },
    );
    let u2 = DVector::from_fn(
        2 * n_t,
        |i, _| if i < n_t { -c[i].im } else { c[i - n_t].re },
    );
    (u1, u2)
}

/// A subproblem together with the layout needed to read its solution.
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub problem: ConvexSubproblem,
    pub layout: VariableLayout,
}

/// Assemble the convex subproblem for frozen `(g, w)` in `state`, with the
/// energy constraint linearized at `anchor`.
pub fn assemble_from_state(
    scenario: &Scenario,
    channels: &EffectiveChannels,
    strategy: Strategy,
    state: &EqualizerState,
    anchor: &PrecoderSet,
) -> Result<AssembledProblem> {
    strategy.check(scenario.num_irs())?;
    let budget = scenario.config.total_power;
    let anchor_power = total_transmit_power(anchor);
    if anchor_power > budget * (1.0 + ANCHOR_POWER_TOLERANCE) {
        return Err(Error::ExpansionPointInfeasible {
            power: anchor_power,
            budget,
        });
    }

    let mut layout = VariableLayout::new(scenario, strategy);
    // With `ε_{c,k} = 1` the common stream carries nothing to IR-k, and its
    // decodability row reduces to `−Σ X ≤ 0`, which together with `X ≤ 0`
    // leaves no interior. The shares are then pinned to 0 and the rows
    // dropped; this is the fixed point reached from an MU-LP solution.
    let common_silent = state
        .common_weights
        .iter()
        .any(|w| *w <= state.rule.scale());
    if layout.common.is_some() && common_silent {
        layout.shares.iter_mut().for_each(|s| *s = None);
        layout.num_vars = layout.num_precoder_vars;
    }
    let n = layout.num_vars;
    let s = layout.scale;
    let weights = &scenario.config.rate_weights;
    let private_blocks: Vec<usize> = layout.private.iter().flatten().copied().collect();

    // Objective: Σ u_k (X_k + w_k ε_k − log₂ w_k).
    let mut objective = Quadratic::zero(n);
    for (k, h) in channels.ir.iter().enumerate() {
        let u = weights[k];
        let w = state.private_weights[k];
        let g = state.private_equalizers[k];
        for &at in &private_blocks {
            add_gain(&mut objective, at, h, u * w * g.norm_sqr(), s);
        }
        if let Some(at) = layout.private[k] {
            add_real_inner(&mut objective, at, &(h * g.conj()), -2.0 * u * w, s);
        }
        objective.constant += u * (w * (g.norm_sqr() + 1.0) - w.log2());
        if let Some(i) = layout.shares[k] {
            objective.lin[i] += u;
        }
    }
    let mut problem = ConvexSubproblem::new(objective);

    // Common stream decodable at every IR: ξ_{c,k}(P) − κ − Σ X ≤ 0.
    if let Some(at_common) = layout.common.filter(|_| !common_silent) {
        for (k, h) in channels.ir.iter().enumerate() {
            let w = state.common_weights[k];
            let g = state.common_equalizers[k];
            let mut f = Quadratic::zero(n);
            add_gain(&mut f, at_common, h, w * g.norm_sqr(), s);
            for &at in &private_blocks {
                add_gain(&mut f, at, h, w * g.norm_sqr(), s);
            }
            add_real_inner(&mut f, at_common, &(h * g.conj()), -2.0 * w, s);
            f.constant = w * (g.norm_sqr() + 1.0) - w.log2() - state.rule.offset();
            for i in layout.shares.iter().flatten() {
                f.lin[*i] -= 1.0;
            }
            problem.push(ConstraintKind::CommonRate { ir: k }, f);
        }
    }

    // Σ_j Σ_b ζ Φ(p_b, g_j) ≥ E^th, divided through by E^th.
    let threshold = scenario.config.energy_threshold;
    if threshold > 0.0 && !channels.er.is_empty() {
        let zeta = channels.harvest_efficiency;
        let mut f = Quadratic::zero(n);
        f.constant = 1.0;
        for g in &channels.er {
            for (at, p_anchor) in layout.blocks(anchor) {
                let ga = g.dotc(p_anchor);
                add_real_inner(&mut f, at, &(g * ga), -2.0 * zeta / threshold, s);
                f.constant += zeta * ga.norm_sqr() / threshold;
            }
        }
        problem.push(ConstraintKind::Energy, f);
    }

    // Σ ‖p‖² ≤ P_t, i.e. ‖z‖² − 1 ≤ 0 over the precoder variables.
    let mut power = Quadratic::zero(n);
    {
        let q = power.quad_mut();
        for i in 0..layout.num_precoder_vars {
            q[(i, i)] = 1.0;
        }
    }
    power.constant = -1.0;
    problem.push(ConstraintKind::Power, power);

    for i in layout.shares.iter().flatten() {
        let mut lin = DVector::zeros(n);
        lin[*i] = 1.0;
        problem.push(
            ConstraintKind::Sign { var: *i },
            Quadratic::affine(lin, 0.0),
        );
    }

    Ok(AssembledProblem { problem, layout })
}
