//! Sweeps over energy thresholds, rate weights and channel angles, with CSV
//! and JSON output.
//!
//! Sweep coordinates by kind:
//!
//! | kind       | coordinate              |
//! |------------|-------------------------|
//! | `tradeoff` | energy threshold in µW  |
//! | `region`   | weight `u_2` (`u_1 = 1`) |
//! | `point`    | IR-2 angle θ in radians |

pub mod config;
pub mod emit;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run_strategy_suite, AlgorithmConfig, Seed, StrategyKind, WarmStarts};
use crate::error::{Error, Result};
use crate::model::{RatePoint, Scenario, Strategy, SystemConfig};

pub use config::{ChannelSource, ScenarioFile};
pub use emit::{emit, read_json, write_csv, write_json, OutputFormat, CSV_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Tradeoff,
    Region,
    Point,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Tradeoff => "tradeoff",
            SweepKind::Region => "region",
            SweepKind::Point => "point",
        }
    }
}

/// Energy thresholds in µW used when a tradeoff sweep names none.
pub fn default_energy_grid_uw() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=6).map(|i| 5.0 * i as f64).collect();
    grid.extend([32.0, 34.0, 35.0, 36.0, 37.0, 38.0, 39.0, 39.5, 39.9, 41.0]);
    grid
}

/// `u_2 = 10^e` for `e ∈ {−3} ∪ {−1, −0.95, …, 1} ∪ {3}`: 43 points.
pub fn default_weight_grid() -> Vec<f64> {
    let mut grid = vec![1e-3];
    grid.extend((-20..=20).map(|i| 10f64.powf(0.05 * i as f64)));
    grid.push(1e3);
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Watts.
    pub energy_grid: Vec<f64>,
    pub weight_grid: Vec<f64>,
    /// IR-2 angles for point runs on the deterministic geometry.
    pub point_thetas: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    pub config: SystemConfig,
    pub channel: ChannelSource,
    pub algorithm: AlgorithmConfig,
}

impl SweepSpec {
    /// Build a spec from a scenario file, filling unset grids with defaults.
    /// Point runs on the deterministic geometry evaluate the configured θ and
    /// θ = 2π/9.
    pub fn from_file(
        kind: SweepKind,
        file: &ScenarioFile,
        strategies: Vec<StrategyKind>,
    ) -> Result<Self> {
        let (scenario, channel) = file.scenario()?;
        let opts = &file.sweep;
        let energy_grid = match &opts.energy_grid_uw {
            Some(g) => g.iter().map(|e| e / 1e6).collect(),
            None => default_energy_grid_uw().iter().map(|e| e / 1e6).collect(),
        };
        let point_thetas = match (&opts.point_thetas, &channel) {
            (Some(list), _) => list
                .iter()
                .map(|a| a.radians())
                .collect::<Result<Vec<_>>>()?,
            (None, ChannelSource::Paper(spec)) => {
                let mut v = vec![spec.theta];
                if (spec.theta - 2.0 * PI / 9.0).abs() > 1e-12 {
                    v.push(2.0 * PI / 9.0);
                }
                v
            }
            (None, _) => vec![],
        };
        let mut algorithm = AlgorithmConfig::default();
        if let Some(n) = opts.num_random_starts {
            algorithm.num_random_starts = n;
        }
        if let Some(s) = opts.seed {
            algorithm.seed = s;
        }
        let spec = SweepSpec {
            kind,
            energy_grid,
            weight_grid: opts.weight_grid.clone().unwrap_or_else(default_weight_grid),
            point_thetas,
            strategies,
            config: scenario.config,
            channel,
            algorithm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let sorted = |g: &[f64]| g.windows(2).all(|w| w[0] <= w[1]);
        match self.kind {
            SweepKind::Tradeoff => {
                if self.energy_grid.is_empty() || !sorted(&self.energy_grid) {
                    return Err(Error::Config(
                        "energy grid must be non-empty and ascending".into(),
                    ));
                }
            }
            SweepKind::Region => {
                if self.weight_grid.is_empty() || !sorted(&self.weight_grid) {
                    return Err(Error::Config(
                        "weight grid must be non-empty and ascending".into(),
                    ));
                }
                if self.config.num_irs != 2 {
                    return Err(Error::Config("region sweeps need exactly 2 IRs".into()));
                }
            }
            SweepKind::Point => {}
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies selected".into()));
        }
        self.algorithm.validate()
    }

    /// The scenario behind a row: `theta` replaces the IR-2 angle of a
    /// deterministic geometry and is ignored otherwise.
    pub fn scenario_with(&self, config: SystemConfig, theta: Option<f64>) -> Result<Scenario> {
        let channels = match (&self.channel, theta) {
            (ChannelSource::Paper(spec), Some(theta)) => {
                let mut spec = *spec;
                spec.theta = theta;
                crate::channel::build_paper_channels(&spec, config.num_tx_antennas)?
            }
            (source, _) => source.build(config.num_tx_antennas)?,
        };
        Scenario::new(config, channels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Infeasible,
    Unsupported,
    Failed,
}

impl RowStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Unsupported => "unsupported",
            RowStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coordinate: f64,
    pub strategy: StrategyKind,
    pub status: RowStatus,
    pub message: Option<String>,
    pub point: Option<RatePoint>,
}

impl SweepRow {
    fn from_outcome(coordinate: f64, strategy: StrategyKind, outcome: Result<RatePoint>) -> Self {
        let (status, message, point) = match outcome {
            Ok(p) => (RowStatus::Ok, None, Some(p)),
            Err(e) => {
                let status = match e {
                    Error::Infeasible(_) => RowStatus::Infeasible,
                    Error::UnsupportedStrategy { .. } => RowStatus::Unsupported,
                    _ => RowStatus::Failed,
                };
                (status, Some(e.to_string()), None)
            }
        };
        SweepRow {
            coordinate,
            strategy,
            status,
            message,
            point,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub config: SystemConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn any_infeasible(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Infeasible)
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Failed)
    }

    /// Successful points of one strategy, in row order.
    pub fn points(&self, strategy: StrategyKind) -> impl Iterator<Item = (f64, &RatePoint)> {
        self.rows
            .iter()
            .filter(move |r| r.strategy == strategy)
            .filter_map(|r| r.point.as_ref().map(|p| (r.coordinate, p)))
    }
}

fn suite_rows(
    scenario: &Scenario,
    spec: &SweepSpec,
    coordinate: f64,
    warm: &WarmStarts,
) -> Vec<SweepRow> {
    let mut entries = run_strategy_suite(scenario, &spec.algorithm, &spec.strategies, warm);
    entries.sort_by_key(|e| spec.strategies.iter().position(|k| *k == e.kind));
    entries
        .into_iter()
        .map(|e| SweepRow::from_outcome(coordinate, e.kind, e.outcome))
        .collect()
}

/// WSR against energy threshold. Each threshold is warm-started from the
/// solutions at the previous one in addition to the fresh starts.
pub fn run_tradeoff_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::Tradeoff {
        return Err(Error::Config("tradeoff sweep needs kind = tradeoff".into()));
    }
    spec.validate()?;
    let mut rows = Vec::new();
    let mut warm = WarmStarts::default();
    for &threshold in &spec.energy_grid {
        let config = SystemConfig {
            energy_threshold: threshold,
            ..spec.config.clone()
        };
        let scenario = spec.scenario_with(config, None)?;
        let point_rows = suite_rows(&scenario, spec, threshold * 1e6, &warm);
        warm = WarmStarts::default();
        for row in &point_rows {
            if let Some(p) = &row.point {
                let seeds = match row.strategy {
                    StrategyKind::Rs => &mut warm.rs,
                    StrategyKind::Mulp => &mut warm.mulp,
                    StrategyKind::Scsic => &mut warm.scsic,
                };
                seeds.push(Seed::from(p));
            }
        }
        rows.extend(point_rows);
    }
    Ok(SweepResult {
        kind: SweepKind::Tradeoff,
        config: spec.config.clone(),
        rows,
    })
}

/// Rate-region boundary: `u = [1, u_2]` for every `u_2` in the grid. Grid
/// points run in parallel.
pub fn run_region_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::Region {
        return Err(Error::Config("region sweep needs kind = region".into()));
    }
    spec.validate()?;
    let scenarios = spec
        .weight_grid
        .iter()
        .map(|&u2| {
            let config = SystemConfig {
                rate_weights: vec![1.0, u2],
                ..spec.config.clone()
            };
            spec.scenario_with(config, None).map(|s| (u2, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = scenarios
        .par_iter()
        .map(|(u2, scenario)| suite_rows(scenario, spec, *u2, &WarmStarts::default()))
        .collect::<Vec<_>>()
        .concat();
    Ok(SweepResult {
        kind: SweepKind::Region,
        config: spec.config.clone(),
        rows,
    })
}

/// Single operating point, evaluated at every angle in `point_thetas` (or
/// once, at coordinate 0, for non-deterministic channels).
pub fn run_point(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::Point {
        return Err(Error::Config("point run needs kind = point".into()));
    }
    spec.validate()?;
    let angles: Vec<Option<f64>> = if spec.point_thetas.is_empty() {
        vec![None]
    } else {
        spec.point_thetas.iter().map(|t| Some(*t)).collect()
    };
    let mut rows = Vec::new();
    for theta in angles {
        let scenario = spec.scenario_with(spec.config.clone(), theta)?;
        rows.extend(suite_rows(
            &scenario,
            spec,
            theta.unwrap_or(0.0),
            &WarmStarts::default(),
        ));
    }
    Ok(SweepResult {
        kind: SweepKind::Point,
        config: spec.config.clone(),
        rows,
    })
}

pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    match spec.kind {
        SweepKind::Tradeoff => run_tradeoff_sweep(spec),
        SweepKind::Region => run_region_sweep(spec),
        SweepKind::Point => run_point(spec),
    }
}

/// Per-strategy powers in the layout of a power-allocation table. MU-LP has
/// no common stream. For SC-SIC the common stream carries the message of the
/// IR that has no private stream, so its power is listed under that IR and
/// the common column is left empty.
pub fn table_powers(point: &RatePoint) -> (Option<f64>, Vec<f64>, f64) {
    let pb = &point.power_breakdown;
    match point.strategy {
        Strategy::Rs => (Some(pb.common), pb.private.clone(), pb.energy),
        Strategy::Mulp => (None, pb.private.clone(), pb.energy),
        Strategy::Scsic { decoder } => {
            let mut private = pb.private.clone();
            private[1 - decoder] = pb.common;
            (None, private, pb.energy)
        }
    }
}

/// Text table of WSR and power allocation for every successful row.
pub fn format_power_table(result: &SweepResult) -> String {
    let mut out = String::new();
    let num_irs = result.config.num_irs;
    let mut coords: Vec<f64> = result.rows.iter().map(|r| r.coordinate).collect();
    coords.dedup();
    for coord in coords {
        if result.kind == SweepKind::Point {
            let _ = writeln!(
                out,
                "theta = {:.4} rad ({:.2}·π/9)",
                coord,
                coord * 9.0 / PI
            );
        } else {
            let _ = writeln!(out, "{} = {coord}", result.kind.name());
        }
        let _ = write!(out, "{:<8} {:>10} {:>8}", "", "WSR", "P_c");
        for k in 0..num_irs {
            let _ = write!(out, " {:>8}", format!("P_{}", k + 1));
        }
        let _ = writeln!(out, " {:>8}", "P_ER");
        for row in result.rows.iter().filter(|r| r.coordinate == coord) {
            let name = row.strategy.name();
            match &row.point {
                Some(p) => {
                    let (common, private, energy) = table_powers(p);
                    let _ = write!(out, "{name:<8} {:>10.4} ", p.wsr);
                    let _ = write!(
                        out,
                        "{:>8}",
                        common.map_or("-".into(), |c| format!("{c:.4}"))
                    );
                    for v in private {
                        let _ = write!(out, " {v:>8.4}");
                    }
                    let _ = writeln!(out, " {energy:>8.4}");
                }
                None => {
                    let _ = writeln!(out, "{name:<8} {}", row.status.name());
                }
            }
        }
    }
    out
}

/// Grid positions where a strategy's converged `R_2` drops by more than
/// `tolerance` as `u_2` grows, a sign of a poor local optimum.
pub fn region_monotonicity_violations(
    result: &SweepResult,
    tolerance: f64,
) -> Vec<(StrategyKind, f64)> {
    let mut out = Vec::new();
    for kind in StrategyKind::ALL {
        let pts: Vec<(f64, f64)> = result
            .points(kind)
            .map(|(c, p)| (c, p.per_ir_total_rates.get(1).copied().unwrap_or(0.0)))
            .collect();
        for w in pts.windows(2) {
            if w[1].1 < w[0].1 - tolerance {
                out.push((kind, w[1].0));
            }
        }
    }
    out
}

/// Thresholds where a strategy's WSR rises by more than `tolerance` as the
/// energy threshold grows.
pub fn tradeoff_monotonicity_violations(
    result: &SweepResult,
    tolerance: f64,
) -> Vec<(StrategyKind, f64)> {
    let mut out = Vec::new();
    for kind in StrategyKind::ALL {
        let pts: Vec<(f64, f64)> = result.points(kind).map(|(c, p)| (c, p.wsr)).collect();
        for w in pts.windows(2) {
            if w[1].1 > w[0].1 + tolerance {
                out.push((kind, w[1].0));
            }
        }
    }
    out
}
