//! Flat mechanical models, their parameterizing maps, and equilibria.

mod crane;
mod param;
mod registry;
mod system;
mod vtol;

use thiserror::Error;

pub use crane::GantryCrane;
pub use param::{
    derive_input_map, derive_velocity_map, find_equilibrium, minimal_orders, ConfigurationMap,
    Equilibrium, InputMap, InputSolution, ParameterizingMap, VelocityMap, CONSISTENCY_TOL,
    EQUILIBRIUM_TOL, INPUT_RANK_TOL, ZERO_PARTIAL_TOL,
};
pub use registry::BuiltinModel;
pub use system::{FlatModel, FlatSystem, Parameter, ProbeBox};
pub use vtol::Vtol;

use crate::multijet::{JetError, MultiIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("a system with {dof} degrees of freedom is not minimally underactuated (needs n >= 2, m = n - 1)")]
    NotMinimallyUnderactuated { dof: usize },
    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("invalid value {1} for parameter {0:?}")]
    InvalidParameter(String, f64),
    #[error("outside the chart: {0}")]
    OutsideChart(String),
    #[error("input matrix is rank deficient (reciprocal condition {rcond:e})")]
    SingularInputMatrix { rcond: f64 },
    #[error("input equations are inconsistent (residual {residual:e}); check F_q against the dynamics")]
    InconsistentInput { residual: f64 },
    #[error("equilibrium acceleration residual {residual:e} is too large")]
    NotAtRest { residual: f64 },
    #[error("no probe jets given")]
    NoProbes,
    #[error("configuration map does not depend on flat output channel {0}")]
    UnusedChannel(usize),
    #[error("declared configuration arity {declared} does not match probed orders R = {probed} (expected R - 2)")]
    ArityMismatch {
        declared: MultiIndex,
        probed: MultiIndex,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
}
