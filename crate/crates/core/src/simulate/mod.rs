//! Rest-to-rest planning, closed-loop integration, and certification of the
//! integrator-chain behavior `y^j_[κʲ] = wʲ`.

mod certify;
mod controller;
mod integrate;
mod oracle;
mod reference;
mod scenario;
mod stencil;
mod trace;

use thiserror::Error;

pub use certify::{certify_io, stencil_stride, ChannelCertificate, IOCertificate, Tolerances};
pub use controller::{ConstantInput, ControlSample, Controller, LinearizingController};
pub use integrate::{rk4_increment, rk4_step, simulate_closed_loop};
pub use oracle::{chain_oracle, OracleOutput, ORACLE_SUBSTEPS};
pub use reference::{plan_rest_to_rest, ReferenceSignal, RestToRest};
pub use scenario::{order_check, run_rest_to_rest, OrderCheck, RestToRestScenario, ScenarioResult};
pub use stencil::{central_stencil, Stencil};
pub use trace::{Diagnostics, Trace};

use crate::feedback::FeedbackError;
use crate::multijet::JetError;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("feedback failed at t = {time}: {source}")]
    Feedback {
        time: f64,
        #[source]
        source: FeedbackError,
    },
    #[error(transparent)]
    Setup(#[from] FeedbackError),
    #[error("invalid time grid: {0}")]
    Grid(String),
    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("stabilizing gains: {0}")]
    Gains(String),
    #[error("trace has {samples} samples, the stencil needs more than {needed}")]
    TraceTooShort { samples: usize, needed: usize },
    #[error("no finite-difference stencil of order {order} for derivative {derivative}")]
    Stencil { derivative: usize, order: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Number of steps of size `dt` covering `[0, duration]`; `duration` must be
/// a multiple of `dt` up to rounding.
pub(crate) fn step_count(duration: f64, dt: f64) -> Result<usize, SimulateError> {
    if !(dt > 0.0 && dt.is_finite()) || !(duration >= 0.0 && duration.is_finite()) {
        return Err(SimulateError::Grid(format!("duration {duration}, step {dt}")));
    }
    let steps = (duration / dt).round();
    if ((steps * dt) - duration).abs() > 1e-9 * duration.max(1.0) {
        return Err(SimulateError::Grid(format!("duration {duration} is not a multiple of the step {dt}")));
    }
    Ok(steps as usize)
}
