//! Quasi-static linearizing feedback `u = α(q, v, w, ẇ, …)`.
//!
//! With `κ` chosen, the jets `y_[κ, R−1]` are replaced by the new input
//! `w_[0, R−κ−1]`, the state equations `(q, v) = (F_q, F_v)` are solved for
//! the remaining jets `ψ = y_[0, κ−1]` by Newton's method, and the input
//! follows from `F_u`. The closed loop then obeys `y^j_[κʲ] = wʲ`.

mod newton;
mod synthesis;
mod wjets;

use thiserror::Error;

pub use newton::{NewtonConfig, NewtonOutcome};
pub use synthesis::{FeedbackOutput, PsiSolution, QuasiStaticFeedback};
pub use wjets::WJets;

use crate::flatmodel::ModelError;
use crate::multijet::{JetError, MultiIndex};
use crate::structure::StructureError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeedbackError {
    #[error("state Jacobian is singular (reciprocal condition {rcond:e}) after {iterations} iterations")]
    Singular { rcond: f64, iterations: usize },
    #[error("Newton iteration did not converge: residual {residual:e} after {iterations} iterations")]
    Diverged { residual: f64, iterations: usize },
    #[error("solution jumped by {jump:e} (relative) from the previous call (threshold {threshold:e})")]
    BranchJump { jump: f64, threshold: f64 },
    #[error("every channel needs kappa >= 1, got {0}")]
    EmptyChain(MultiIndex),
    #[error("w jets have shape {found}, expected R - kappa = {expected}")]
    WShape { expected: MultiIndex, found: MultiIndex },
    #[error("state has dimension {found}, expected {expected}")]
    StateDimension { expected: usize, found: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Jet(#[from] JetError),
}
