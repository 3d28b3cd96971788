use nalgebra::{DMatrix, DVector};

use super::{
    ConstraintKind, ConvexSubproblem, InfeasibilityCertificate, KktResiduals, QcqpBackend,
    Quadratic, SolverError, SolverResult, SolverStatus, Tolerances,
};

/// Primal-dual interior-point method for smooth convex inequality
/// constraints, with a phase-I stage when the start is not strictly
/// feasible.
///
/// Each iteration takes a Newton step on the perturbed KKT conditions
/// `∇f₀ + Σλᵢ∇fᵢ = 0`, `−λᵢfᵢ = 1/t`, eliminating `Δλ` so that only an
/// `n × n` symmetric positive-definite system is factored. A backtracking
/// line search keeps `fᵢ < 0` and `λ > 0` and decreases the residual norm.
#[derive(Debug, Clone)]
pub struct InteriorPoint {
    /// Factor by which `t` exceeds `m / η̂` each iteration.
    pub mu: f64,
    /// Sufficient-decrease parameter of the residual line search.
    pub alpha: f64,
    /// Backtracking factor.
    pub beta: f64,
    /// A start with every `fᵢ ≤ −margin` skips phase I; phase I stops once it
    /// reaches this margin.
    pub interior_margin: f64,
}

impl Default for InteriorPoint {
    fn default() -> Self {
        InteriorPoint {
            mu: 10.0,
            alpha: 0.01,
            beta: 0.5,
            interior_margin: 1e-3,
        }
    }
}

/// Phase-I optimum above this value means there is no strictly feasible point.
const STRICT_FEASIBILITY_FLOOR: f64 = -1e-10;
const SHORT_STEP: f64 = 0.1;
const RECENTRE_SIGMA: f64 = 0.9;
/// Lower bound on the targeted gap per unit of relative dual residual.
const GAP_PER_DUAL_RESIDUAL: f64 = 0.1;

struct Run {
    x: DVector<f64>,
    lambda: DVector<f64>,
    status: SolverStatus,
    iterations: usize,
    residuals: KktResiduals,
    message: Option<String>,
}

impl QcqpBackend for InteriorPoint {
    fn solve(
        &self,
        problem: &ConvexSubproblem,
        tolerances: &Tolerances,
        start: Option<&DVector<f64>>,
    ) -> Result<SolverResult, SolverError> {
        problem.validate()?;
        let n = problem.num_vars();
        let x0 = match start {
            Some(x) if x.len() != n => return Err(SolverError::Dimension("start point".into())),
            Some(x) => x.clone(),
            None => DVector::zeros(n),
        };
        if problem.constraints.is_empty() {
            return Ok(self.unconstrained(problem, tolerances));
        }

        let mut phase_one_iterations = 0;
        let x_start = if problem.max_violation(&x0) <= -self.interior_margin {
            x0
        } else {
            match self.phase_one(problem, &x0, tolerances) {
                PhaseOne::Interior(x, iters) => {
                    phase_one_iterations = iters;
                    x
                }
                PhaseOne::Infeasible(certificate, x, iters) => {
                    return Ok(SolverResult {
                        status: SolverStatus::Infeasible,
                        objective_value: problem.objective.value(&x),
                        kkt_residuals: KktResiduals {
                            primal: certificate.min_max_violation.max(0.0),
                            ..Default::default()
                        },
                        solution: x,
                        multipliers: certificate.multipliers.clone(),
                        iterations: iters,
                        message: Some(certificate.to_string()),
                        certificate: Some(certificate),
                    })
                }
                PhaseOne::Failed(run) => {
                    return Ok(SolverResult {
                        status: run.status,
                        objective_value: f64::NAN,
                        solution: run.x.rows(0, n).into_owned(),
                        kkt_residuals: run.residuals,
                        multipliers: run.lambda,
                        iterations: run.iterations,
                        certificate: None,
                        message: Some(format!(
                            "phase I did not finish: {}",
                            run.message.unwrap_or_default()
                        )),
                    })
                }
            }
        };

        let run = self.primal_dual(problem, x_start, tolerances, None);
        Ok(SolverResult {
            status: run.status,
            objective_value: problem.objective.value(&run.x),
            solution: run.x,
            kkt_residuals: run.residuals,
            multipliers: run.lambda,
            iterations: run.iterations + phase_one_iterations,
            certificate: None,
            message: run.message,
        })
    }
}

enum PhaseOne {
    Interior(DVector<f64>, usize),
    Infeasible(InfeasibilityCertificate, DVector<f64>, usize),
    Failed(Run),
}

impl InteriorPoint {
    fn unconstrained(&self, problem: &ConvexSubproblem, tolerances: &Tolerances) -> SolverResult {
        let n = problem.num_vars();
        let mut h = DMatrix::zeros(n, n);
        problem.objective.add_hessian(&mut h, 1.0);
        let rhs = -&problem.objective.lin;
        let x = match h.clone().cholesky() {
            Some(chol) => chol.solve(&rhs),
            None => h
                .clone()
                .svd(true, true)
                .solve(&rhs, 1e-12 * h.amax().max(1.0))
                .unwrap_or_else(|_| DVector::zeros(n)),
        };
        let grad = problem.objective.gradient(&x);
        let dual = grad.amax() / (1.0 + problem.objective.lin.amax());
        let bounded = dual <= tolerances.feasibility;
        SolverResult {
            status: if bounded {
                SolverStatus::Optimal
            } else {
                SolverStatus::NumericalFailure
            },
            objective_value: problem.objective.value(&x),
            solution: x,
            kkt_residuals: KktResiduals {
                primal: 0.0,
                dual,
                gap: 0.0,
            },
            multipliers: DVector::zeros(0),
            iterations: 1,
            certificate: None,
            message: (!bounded).then(|| "objective is unbounded below".to_string()),
        }
    }

    /// `min s s.t. fᵢ(x) ≤ s, s ≥ −1`, stopped as soon as `s ≤ −margin`.
    fn phase_one(
        &self,
        problem: &ConvexSubproblem,
        x0: &DVector<f64>,
        tolerances: &Tolerances,
    ) -> PhaseOne {
        let n = problem.num_vars();
        let m = problem.constraints.len();
        let lift = |f: &Quadratic| {
            let mut lin = DVector::zeros(n + 1);
            lin.rows_mut(0, n).copy_from(&f.lin);
            lin[n] = -1.0;
            let quad = f.quad.as_ref().map(|q| {
                let mut big = DMatrix::zeros(n + 1, n + 1);
                big.view_mut((0, 0), (n, n)).copy_from(q);
                big
            });
            Quadratic {
                quad,
                lin,
                constant: f.constant,
            }
        };
        let mut objective = Quadratic::zero(n + 1);
        objective.lin[n] = 1.0;
        let mut phase = ConvexSubproblem::new(objective);
        for c in &problem.constraints {
            phase.push(c.kind, lift(&c.f));
        }
        let mut floor = DVector::zeros(n + 1);
        floor[n] = -1.0;
        phase.push(ConstraintKind::General, Quadratic::affine(floor, -1.0));

        let worst = problem.max_violation(x0);
        let mut y0 = DVector::zeros(n + 1);
        y0.rows_mut(0, n).copy_from(x0);
        y0[n] = (worst + 1.0).max(0.5);

        let margin = self.interior_margin;
        let stop = move |y: &DVector<f64>| y[n] <= -margin;
        let run = self.primal_dual(&phase, y0, tolerances, Some(&stop));
        let x = run.x.rows(0, n).into_owned();
        let s = problem.max_violation(&x);
        if s < STRICT_FEASIBILITY_FLOOR {
            return PhaseOne::Interior(x, run.iterations);
        }
        if run.status != SolverStatus::Optimal {
            return PhaseOne::Failed(run);
        }
        let certificate = InfeasibilityCertificate {
            min_max_violation: run.x[n],
            multipliers: run.lambda.rows(0, m).into_owned(),
            kinds: problem.constraints.iter().map(|c| c.kind).collect(),
        };
        PhaseOne::Infeasible(certificate, x, run.iterations)
    }

    fn primal_dual(
        &self,
        problem: &ConvexSubproblem,
        mut x: DVector<f64>,
        tol: &Tolerances,
        early_exit: Option<&dyn Fn(&DVector<f64>) -> bool>,
    ) -> Run {
        let n = problem.num_vars();
        let m = problem.constraints.len();
        let values = |x: &DVector<f64>| {
            DVector::from_iterator(m, problem.constraints.iter().map(|c| c.f.value(x)))
        };

        let mut f = values(&x);
        let mut lambda = f.map(|fi| 1.0 / -fi);
        let mut residuals = KktResiduals::default();
        let mut last_step = 1.0;

        for iteration in 0..tol.max_iterations {
            if early_exit.is_some_and(|stop| stop(&x)) {
                return Run {
                    x,
                    lambda,
                    status: SolverStatus::Optimal,
                    iterations: iteration,
                    residuals,
                    message: None,
                };
            }

            let grad0 = problem.objective.gradient(&x);
            let grads: Vec<DVector<f64>> = problem
                .constraints
                .iter()
                .map(|c| c.f.gradient(&x))
                .collect();
            let mut r_dual = grad0.clone();
            for (g, l) in grads.iter().zip(lambda.iter()) {
                r_dual.axpy(*l, g, 1.0);
            }
            let eta = -f.dot(&lambda);
            let objective = problem.objective.value(&x);
            residuals = KktResiduals {
                primal: f.max().max(0.0),
                dual: r_dual.amax() / (1.0 + grad0.amax()),
                gap: eta,
            };
            if residuals.dual <= tol.feasibility && eta <= tol.gap * objective.abs().max(1.0) {
                return Run {
                    x,
                    lambda,
                    status: SolverStatus::Optimal,
                    iterations: iteration,
                    residuals,
                    message: None,
                };
            }

            // After a short step the iterate has drifted off the central path
            // (typically onto a curved boundary); recentre before pushing on.
            // The gap is also kept in proportion to the dual residual, so the
            // iterate cannot stick to a curved boundary before it is dual
            // feasible.
            let target = if last_step < SHORT_STEP {
                RECENTRE_SIGMA * eta
            } else {
                eta / self.mu
            };
            let floor = GAP_PER_DUAL_RESIDUAL * residuals.dual * objective.abs().max(1.0);
            let t = m as f64 / target.max(floor);
            let mut h = DMatrix::zeros(n, n);
            problem.objective.add_hessian(&mut h, 1.0);
            let mut rhs = -&grad0;
            for (i, c) in problem.constraints.iter().enumerate() {
                let slack = -f[i];
                c.f.add_hessian(&mut h, lambda[i]);
                h.ger(lambda[i] / slack, &grads[i], &grads[i], 1.0);
                rhs.axpy(-1.0 / (t * slack), &grads[i], 1.0);
            }
            let Some(dx) = solve_spd(h, &rhs) else {
                return Run {
                    x,
                    lambda,
                    status: SolverStatus::NumericalFailure,
                    iterations: iteration,
                    residuals,
                    message: Some("Newton system could not be factored".into()),
                };
            };
            let dlambda = DVector::from_fn(m, |i, _| {
                let slack = -f[i];
                lambda[i] * grads[i].dot(&dx) / slack - lambda[i] + 1.0 / (t * slack)
            });

            let residual_norm = |r_dual: &DVector<f64>, f: &DVector<f64>, lambda: &DVector<f64>| {
                let cent: f64 = f
                    .iter()
                    .zip(lambda.iter())
                    .map(|(fi, li)| (-li * fi - 1.0 / t).powi(2))
                    .sum();
                (r_dual.norm_squared() + cent).sqrt()
            };
            let r0 = residual_norm(&r_dual, &f, &lambda);

            let mut step = dlambda
                .iter()
                .zip(lambda.iter())
                .filter(|(d, _)| **d < 0.0)
                .map(|(d, l)| -l / d)
                .fold(1.0f64, f64::min)
                * 0.99;

            let mut accepted = None;
            while step > 1e-14 {
                let x_try = &x + &dx * step;
                let f_try = values(&x_try);
                if f_try.iter().all(|v| *v < 0.0) {
                    let l_try = &lambda + &dlambda * step;
                    let mut r_try = problem.objective.gradient(&x_try);
                    for (c, l) in problem.constraints.iter().zip(l_try.iter()) {
                        r_try.axpy(*l, &c.f.gradient(&x_try), 1.0);
                    }
                    if residual_norm(&r_try, &f_try, &l_try) <= (1.0 - self.alpha * step) * r0 {
                        accepted = Some((x_try, f_try, l_try));
                        break;
                    }
                }
                step *= self.beta;
            }
            match accepted {
                Some((x_new, f_new, l_new)) => {
                    x = x_new;
                    f = f_new;
                    lambda = l_new;
                    last_step = step;
                }
                None => {
                    return Run {
                        x,
                        lambda,
                        status: SolverStatus::NumericalFailure,
                        iterations: iteration,
                        residuals,
                        message: Some("line search stalled".into()),
                    }
                }
            }
        }
        Run {
            x,
            lambda,
            status: SolverStatus::MaxIterations,
            iterations: tol.max_iterations,
            residuals,
            message: None,
        }
    }
}

/// Cholesky solve, retrying with a growing diagonal shift when the matrix is
/// only semidefinite in floating point.
fn solve_spd(h: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(chol) = h.clone().cholesky() {
        return Some(chol.solve(rhs));
    }
    let n = h.nrows();
    let scale = h.diagonal().amax().max(1.0);
    let mut shift = 1e-14 * scale;
    for _ in 0..12 {
        let shifted = &h + DMatrix::identity(n, n) * shift;
        if let Some(chol) = shifted.cholesky() {
            return Some(chol.solve(rhs));
        }
        shift *= 10.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_quadratic(n: usize, center: &DVector<f64>) -> Quadratic {
        // ‖x − a‖² = xᵀx − 2aᵀx + aᵀa
        Quadratic {
            quad: Some(DMatrix::identity(n, n)),
            lin: center * -2.0,
            constant: center.norm_squared(),
        }
    }

    fn solve_default(p: &ConvexSubproblem) -> SolverResult {
        InteriorPoint::default()
            .solve(p, &Tolerances::default(), None)
            .unwrap()
    }

    #[test]
    fn unconstrained_projection_is_identity() {
        let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let r = solve_default(&ConvexSubproblem::new(unit_quadratic(3, &a)));
        assert_eq!(r.status, SolverStatus::Optimal);
        assert!((r.solution - a).amax() < 1e-12);
    }

    #[test]
    fn unconstrained_linear_is_unbounded() {
        let p = ConvexSubproblem::new(Quadratic::affine(DVector::from_vec(vec![1.0]), 0.0));
        assert_eq!(solve_default(&p).status, SolverStatus::NumericalFailure);
    }

    #[test]
    fn halfline_minimum_at_boundary() {
        // min x² s.t. 1 − x ≤ 0
        let mut p = ConvexSubproblem::new(Quadratic {
            quad: Some(DMatrix::identity(1, 1)),
            lin: DVector::zeros(1),
            constant: 0.0,
        });
        p.push(
            ConstraintKind::General,
            Quadratic::affine(DVector::from_vec(vec![-1.0]), 1.0),
        );
        let r = solve_default(&p);
        assert_eq!(r.status, SolverStatus::Optimal);
        assert!((r.solution[0] - 1.0).abs() < 1e-7);
        assert!((r.objective_value - 1.0).abs() < 1e-7);
        assert!(r.kkt_residuals.gap <= 1e-8);
    }

    #[test]
    fn two_variable_halfspace() {
        // min x² + y² s.t. x + y ≥ 2
        let mut p = ConvexSubproblem::new(unit_quadratic(2, &DVector::zeros(2)));
        p.push(
            ConstraintKind::General,
            Quadratic::affine(DVector::from_vec(vec![-1.0, -1.0]), 2.0),
        );
        let r = solve_default(&p);
        assert_eq!(r.status, SolverStatus::Optimal);
        assert!((r.solution[0] - 1.0).abs() < 1e-7 && (r.solution[1] - 1.0).abs() < 1e-7);
        assert!((r.objective_value - 2.0).abs() < 1e-7);

        // Grid over the boundary x + y = 2 never beats the solver.
        let best = (0..=4000)
            .map(|i| {
                let x = -2.0 + 6.0 * i as f64 / 4000.0;
                x * x + (2.0 - x) * (2.0 - x)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(r.objective_value <= best + 1e-7);
    }

    #[test]
    fn infeasible_pair_of_halfspaces() {
        // x ≥ 1 and x ≤ 0
        let mut p = ConvexSubproblem::new(Quadratic::zero(1));
        p.push(
            ConstraintKind::General,
            Quadratic::affine(DVector::from_vec(vec![-1.0]), 1.0),
        );
        p.push(
            ConstraintKind::General,
            Quadratic::affine(DVector::from_vec(vec![1.0]), 0.0),
        );
        let r = solve_default(&p);
        assert_eq!(r.status, SolverStatus::Infeasible);
        let cert = r.certificate.unwrap();
        assert!((cert.min_max_violation - 0.5).abs() < 1e-6);
        assert!((cert.multipliers.sum() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ball_projection_from_outside() {
        let a = DVector::from_vec(vec![3.0, 4.0]);
        let mut p = ConvexSubproblem::new(unit_quadratic(2, &a));
        // ‖x‖² − 1 ≤ 0
        p.push(
            ConstraintKind::Power,
            Quadratic {
                quad: Some(DMatrix::identity(2, 2)),
                lin: DVector::zeros(2),
                constant: -1.0,
            },
        );
        let r = solve_default(&p);
        assert_eq!(r.status, SolverStatus::Optimal);
        assert!((r.solution - &a / 5.0).amax() < 1e-7);
        assert!((r.objective_value - 16.0).abs() < 1e-6);
    }

    #[test]
    fn non_psd_objective_is_rejected() {
        let p = ConvexSubproblem::new(Quadratic {
            quad: Some(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))),
            lin: DVector::zeros(2),
            constant: 0.0,
        });
        assert!(matches!(
            InteriorPoint::default().solve(&p, &Tolerances::default(), None),
            Err(SolverError::NotConvex { .. })
        ));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut p = ConvexSubproblem::new(unit_quadratic(2, &DVector::from_vec(vec![3.0, 0.0])));
        p.push(
            ConstraintKind::General,
            Quadratic::affine(DVector::from_vec(vec![1.0, 0.0]), -1.0),
        );
        let tol = Tolerances {
            max_iterations: 2,
            ..Default::default()
        };
        let r = InteriorPoint::default().solve(&p, &tol, None).unwrap();
        assert_eq!(r.status, SolverStatus::MaxIterations);
    }
}
