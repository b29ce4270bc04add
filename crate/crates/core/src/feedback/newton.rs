use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::FeedbackError;
use crate::linalg::reciprocal_condition;

/// Damped Newton settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonConfig {
    /// Convergence threshold on the residual ∞-norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step shrink factor of the backtracking line search.
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Sufficient-decrease constant of the Armijo condition.
    pub armijo: f64,
    /// Jacobians with a smaller reciprocal condition number are singular.
    pub singular_rcond: f64,
    /// Largest accepted change of `ψ` between consecutive solves, as
    /// `‖Δψ‖∞ / (1 + ‖ψ_previous‖∞)`.
    pub branch_jump: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tolerance: 1e-10,
            max_iterations: 50,
            backtrack_factor: 0.5,
            max_backtracks: 30,
            armijo: 1e-4,
            singular_rcond: 1e-12,
            branch_jump: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// Final residual ∞-norm.
    pub residual: f64,
}

/// Solves `r(x) = 0` from `x0`. `eval` returns the residual and, on request,
/// its Jacobian. A non-finite residual counts as a singular point, and so
/// does a root with a singular Jacobian. Once the tolerance is met, the
/// Jacobian of the regularity check buys one final correction step.
pub(crate) fn newton<E>(
    config: &NewtonConfig,
    x0: DVector<f64>,
    mut eval: E,
) -> Result<NewtonOutcome, FeedbackError>
where
    E: FnMut(&DVector<f64>, bool) -> Result<(DVector<f64>, Option<DMatrix<f64>>), FeedbackError>,
{
    let mut x = x0;
    let (mut r, _) = eval(&x, false)?;
    for iteration in 0..=config.max_iterations {
        let norm = r.amax();
        if !norm.is_finite() {
            return Err(FeedbackError::Singular {
                rcond: 0.0,
                iterations: iteration,
            });
        }
        if norm < config.tolerance {
            // the root must be a regular point for ψ to be a local inverse
            let (_, jac) = eval(&x, true)?;
            let jac = jac.expect("Jacobian requested");
            let rcond = reciprocal_condition(&jac);
            if rcond < config.singular_rcond {
                return Err(FeedbackError::Singular {
                    rcond,
                    iterations: iteration,
                });
            }
            // one more full step with that Jacobian, kept only if it helps
            if norm > 0.0 {
                if let Ok(step) = jac.svd(true, true).solve(&(-&r), 0.0) {
                    let trial = &x + step;
                    let (rt, _) = eval(&trial, false)?;
                    if rt.amax() < norm {
                        return Ok(NewtonOutcome {
                            x: trial,
                            iterations: iteration + 1,
                            residual: rt.amax(),
                        });
                    }
                }
            }
            return Ok(NewtonOutcome {
                x,
                iterations: iteration,
                residual: norm,
            });
        }
        if iteration == config.max_iterations {
            break;
        }
        let (_, jac) = eval(&x, true)?;
        let jac = jac.expect("Jacobian requested");
        let rcond = reciprocal_condition(&jac);
        if rcond < config.singular_rcond {
            return Err(FeedbackError::Singular {
                rcond,
                iterations: iteration,
            });
        }
        let step = jac
            .svd(true, true)
            .solve(&(-&r), 0.0)
            .map_err(|_| FeedbackError::Singular { rcond, iterations: iteration })?;
        let merit = r.norm_squared();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let trial = &x + &step * alpha;
            let (rt, _) = eval(&trial, false)?;
            let trial_merit = rt.norm_squared();
            if trial_merit.is_finite() && trial_merit <= (1.0 - 2.0 * config.armijo * alpha) * merit {
                accepted = Some((trial, rt));
                break;
            }
            alpha *= config.backtrack_factor;
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => {
                return Err(FeedbackError::Diverged {
                    residual: norm,
                    iterations: iteration + 1,
                })
            }
        }
    }
    Err(FeedbackError::Diverged {
        residual: r.amax(),
        iterations: config.max_iterations,
    })
}
