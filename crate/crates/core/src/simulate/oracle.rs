use serde::Serialize;

use super::integrate::CompensatedState;
use super::{rk4_increment, step_count, SimulateError};
use crate::multijet::{Jet, MultiIndex};

/// RK4 substeps per output step.
pub const ORACLE_SUBSTEPS: usize = 10;

/// Chain outputs `yʲ(t)` on the grid `0, dt, …, duration`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOutput {
    pub time: Vec<f64>,
    /// `y[j][i]` is channel `j` at `time[i]`.
    pub y: Vec<Vec<f64>>,
}

/// Integrates the decoupled chains `y^j_[κʲ] = wʲ(t)` from the jets
/// `y_[0, κ−1]` with RK4 on a step of `dt / 10`.
pub fn chain_oracle(
    kappa: &MultiIndex,
    initial: &Jet<f64>,
    w: impl Fn(f64) -> Vec<f64>,
    duration: f64,
    dt: f64,
) -> Result<OracleOutput, SimulateError> {
    let m = kappa.len();
    if initial.channels() != m {
        return Err(SimulateError::Dimension {
            what: "initial jets",
            expected: m,
            found: initial.channels(),
        });
    }
    if kappa.orders().contains(&0) {
        return Err(SimulateError::Dimension {
            what: "shortest chain length",
            expected: 1,
            found: 0,
        });
    }
    let steps = step_count(duration, dt)?;
    // stacked chain states, channel j at offsets[j]..offsets[j] + κʲ
    let mut offsets = Vec::with_capacity(m);
    let mut x = Vec::new();
    for j in 0..m {
        offsets.push(x.len());
        for k in 0..kappa.get(j) {
            x.push(initial.get(j, k)?);
        }
    }
    let rhs = |t: f64, x: &[f64]| -> Result<Vec<f64>, SimulateError> {
        let wt = w(t);
        let mut dx = vec![0.0; x.len()];
        for j in 0..m {
            let (o, len) = (offsets[j], kappa.get(j));
            dx[o..o + len - 1].copy_from_slice(&x[o + 1..o + len]);
            dx[o + len - 1] = wt[j];
        }
        Ok(dx)
    };
    let h = dt / ORACLE_SUBSTEPS as f64;
    let mut state = CompensatedState::new(x);
    let mut out = OracleOutput {
        time: Vec::with_capacity(steps + 1),
        y: vec![Vec::with_capacity(steps + 1); m],
    };
    for step in 0..=steps {
        out.time.push(step as f64 * dt);
        for j in 0..m {
            out.y[j].push(state.x[offsets[j]]);
        }
        if step == steps {
            break;
        }
        for sub in 0..ORACLE_SUBSTEPS {
            let t = (step * ORACLE_SUBSTEPS + sub) as f64 * h;
            let dx = rk4_increment(&rhs, t, &state.x, h)?;
            state.add(&dx);
        }
    }
    Ok(out)
}
