//! Convex quadratically constrained quadratic programs.
//!
//! A [`ConvexSubproblem`] is `minimize f₀(x) s.t. fᵢ(x) ≤ 0` where every `fᵢ`
//! is a convex quadratic `xᵀQx + lᵀx + c`. The reference backend is a
//! primal-dual interior-point method ([`InteriorPoint`]); anything that
//! implements [`QcqpBackend`] can stand in for it.

mod assemble;
mod dump;
mod ipm;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assemble::{assemble_from_state, taylor_lower_bound, AssembledProblem, VariableLayout};
pub use dump::write_dump;
pub use ipm::InteriorPoint;

/// `xᵀ Q x + lᵀ x + c` with `Q` symmetric. A missing `Q` means the function
/// is affine.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub quad: Option<DMatrix<f64>>,
    pub lin: DVector<f64>,
    pub constant: f64,
}

impl Quadratic {
    pub fn zero(n: usize) -> Self {
        Quadratic {
            quad: None,
            lin: DVector::zeros(n),
            constant: 0.0,
        }
    }

    pub fn affine(lin: DVector<f64>, constant: f64) -> Self {
        Quadratic {
            quad: None,
            lin,
            constant,
        }
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let quad = self.quad.as_ref().map_or(0.0, |q| x.dot(&(q * x)));
        quad + self.lin.dot(x) + self.constant
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.quad {
            Some(q) => q * x * 2.0 + &self.lin,
            None => self.lin.clone(),
        }
    }

    /// `H += scale · ∇²f`.
    pub fn add_hessian(&self, h: &mut DMatrix<f64>, scale: f64) {
        if let Some(q) = &self.quad {
            *h += q * (2.0 * scale);
        }
    }

    /// Mutable access to `Q`, creating it on first use.
    pub fn quad_mut(&mut self) -> &mut DMatrix<f64> {
        let n = self.lin.len();
        self.quad.get_or_insert_with(|| DMatrix::zeros(n, n))
    }

    /// Multiply the whole function by a positive constant.
    pub fn scaled(mut self, factor: f64) -> Self {
        if let Some(q) = self.quad.as_mut() {
            *q *= factor;
        }
        self.lin *= factor;
        self.constant *= factor;
        self
    }
}

/// What a constraint row represents; used for diagnostics and dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// Common-stream decodability at one IR.
    CommonRate {
        ir: usize,
    },
    /// Linearized harvested-energy requirement.
    Energy,
    /// Transmit power ball.
    Power,
    /// `x_var ≤ 0`.
    Sign {
        var: usize,
    },
    General,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::CommonRate { ir } => write!(f, "common_rate[{ir}]"),
            ConstraintKind::Energy => write!(f, "energy"),
            ConstraintKind::Power => write!(f, "power"),
            ConstraintKind::Sign { var } => write!(f, "sign[{var}]"),
            ConstraintKind::General => write!(f, "general"),
        }
    }
}

/// `f(x) ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub f: Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSubproblem {
    pub objective: Quadratic,
    pub constraints: Vec<Constraint>,
}

impl ConvexSubproblem {
    pub fn new(objective: Quadratic) -> Self {
        ConvexSubproblem {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.dim()
    }

    pub fn push(&mut self, kind: ConstraintKind, f: Quadratic) {
        self.constraints.push(Constraint { kind, f });
    }

    /// Largest constraint value at `x`; feasible iff `≤ 0`.
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.f.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Check dimensions, finiteness and convexity of every function.
    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        let named = std::iter::once(("objective".to_string(), &self.objective)).chain(
            self.constraints
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("constraint {i} ({})", c.kind), &c.f)),
        );
        for (name, f) in named {
            if f.dim() != n || f.quad.as_ref().is_some_and(|q| q.shape() != (n, n)) {
                return Err(SolverError::Dimension(name));
            }
            let finite = f.lin.iter().all(|v| v.is_finite())
                && f.constant.is_finite()
                && f.quad
                    .as_ref()
                    .is_none_or(|q| q.iter().all(|v| v.is_finite()));
            if !finite {
                return Err(SolverError::NonFinite(name));
            }
            if let Some(q) = &f.quad {
                check_psd(q).map_err(|detail| SolverError::NotConvex { name, detail })?;
            }
        }
        Ok(())
    }
}

/// Cholesky of `Q + δI` with a small relative shift; failure means `Q` has a
/// clearly negative eigenvalue.
fn check_psd(q: &DMatrix<f64>) -> Result<(), String> {
    let n = q.nrows();
    let asym = (q - q.transpose()).amax();
    let scale = q.amax().max(f64::MIN_POSITIVE);
    if asym > 1e-10 * scale {
        return Err(format!("matrix is not symmetric (max asymmetry {asym:e})"));
    }
    let shifted = q + DMatrix::identity(n, n) * (1e-10 * scale);
    if shifted.cholesky().is_none() {
        let min_eig = q.clone().symmetric_eigenvalues().min();
        return Err(format!("minimum eigenvalue {min_eig:e}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on the (relative) dual residual.
    pub feasibility: f64,
    /// Bound on the surrogate duality gap relative to `max(1, |f₀|)`.
    pub gap: f64,
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-8,
            gap: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `max(0, maxᵢ fᵢ(x))`.
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Evidence that no strictly feasible point exists: the optimal value of the
/// phase-I problem `min s s.t. fᵢ(x) ≤ s` and its multipliers, which sum to
/// one and weight the constraints into a combination that stays `≥ s*`
/// everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate {
    pub min_max_violation: f64,
    pub multipliers: DVector<f64>,
    pub kinds: Vec<ConstraintKind>,
}

impl fmt::Display for InfeasibilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "every point violates some constraint by at least {:.3e}; binding:",
            self.min_max_violation
        )?;
        for (kind, lambda) in self.kinds.iter().zip(self.multipliers.iter()) {
            if *lambda > 1e-6 {
                write!(f, " {kind} (λ={lambda:.3})")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub status: SolverStatus,
    pub solution: DVector<f64>,
    pub objective_value: f64,
    pub kkt_residuals: KktResiduals,
    pub multipliers: DVector<f64>,
    pub iterations: usize,
    pub certificate: Option<InfeasibilityCertificate>,
    pub message: Option<String>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("{name} is not convex: {detail}")]
    NotConvex { name: String, detail: String },
    #[error("{0} has inconsistent dimensions")]
    Dimension(String),
    #[error("{0} has non-finite coefficients")]
    NonFinite(String),
}

/// A convex QCQP solver.
pub trait QcqpBackend: Send + Sync {
    /// Solve `problem`. `start` is a hint; it need not be feasible.
    fn solve(
        &self,
        problem: &ConvexSubproblem,
        tolerances: &Tolerances,
        start: Option<&DVector<f64>>,
    ) -> Result<SolverResult, SolverError>;
}

/// Solve with the reference interior-point backend.
pub fn solve(
    problem: &ConvexSubproblem,
    tolerances: &Tolerances,
) -> Result<SolverResult, SolverError> {
    InteriorPoint::default().solve(problem, tolerances, None)
}
