//! Jacobian structure of the parameterization and the choice of chain lengths `κ`.
//!
//! In coordinates `q̄ = (y, gⁿ(q))` the parameterization is trivial except
//! for its last row, which makes the regularity of the square Jacobian
//! `∂(F_q, F_v)/∂y_[0, κ−1]` easy to read off. Regularity is decided
//! numerically on probe jets: rest jets `(y_s, 0, …, 0)` and random jets.

mod analysis;
mod jacobian;
mod kappa;
mod probes;
mod transform;
mod verify;

use thiserror::Error;

pub use analysis::Analysis;
pub use jacobian::{
    check_kappa, full_columns, full_jacobian, is_regular, kappa_columns, kappa_jacobian, MAX_STATE_ORDER,
    REGULARITY_RCOND,
};
pub(crate) use jacobian::stacked_jacobian;
pub use kappa::{enumerate_kappa, kappa_candidates, KappaMode, KappaReport};
pub use probes::{sample_generic, ProbeConfig, ProbeSet, DEFAULT_GENERIC_PROBES};
pub use transform::{transform_map, StateMaps, TransformedConfiguration, TransformedMap};
pub use verify::{verify_structure, StructureCheck, StructureReport, Violation};

use crate::flatmodel::ModelError;
use crate::multijet::{JetError, MultiIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("#kappa of {kappa} must equal 2n = {expected}")]
    KappaWeight { kappa: MultiIndex, expected: usize },
    #[error("kappa {kappa} exceeds R = {orders}")]
    KappaAboveOrders { kappa: MultiIndex, orders: MultiIndex },
    #[error("no channel has r = 4 in R = {0}; the configuration map is inconsistent")]
    NoFourthOrderChannel(MultiIndex),
    #[error("no probe jets given")]
    NoProbes,
    #[error("invalid probe region: {0}")]
    ProbeRegion(String),
    #[error("structure checks failed: {}", summarize(.0))]
    Violations(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("{:?}: {}", v.check, v.detail))
        .collect::<Vec<_>>()
        .join("; ")
}
