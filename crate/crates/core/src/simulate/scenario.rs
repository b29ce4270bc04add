use serde::{Deserialize, Serialize};

use super::controller::w_from_reference;
use super::{
    certify_io, chain_oracle, plan_rest_to_rest, simulate_closed_loop, IOCertificate, LinearizingController,
    OracleOutput, ReferenceSignal, SimulateError, Tolerances, Trace,
};
use crate::feedback::{NewtonConfig, QuasiStaticFeedback};
use crate::flatmodel::{FlatModel, ParameterizingMap};
use crate::multijet::{Jet, MultiIndex};

/// A rest-to-rest transition run under the linearizing feedback.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestToRestScenario {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Transition time `T`.
    pub duration: f64,
    pub dt: f64,
    /// Extra simulated time at rest after `T`.
    #[serde(default)]
    pub hold: f64,
    /// Initial configuration; defaults to the reference's initial state.
    #[serde(default)]
    pub q0: Option<Vec<f64>>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
    /// Added to the initial configuration.
    #[serde(default)]
    pub q_offset: Option<Vec<f64>>,
    /// Per-channel stabilizing gains; see [`LinearizingController::with_gains`].
    #[serde(default)]
    pub gains: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub newton: NewtonConfig,
}

impl RestToRestScenario {
    pub fn new(start: Vec<f64>, end: Vec<f64>, duration: f64, dt: f64) -> Self {
        RestToRestScenario {
            start,
            end,
            duration,
            dt,
            hold: 0.0,
            q0: None,
            v0: None,
            q_offset: None,
            gains: None,
            tolerances: Tolerances::default(),
            newton: NewtonConfig::default(),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.duration + self.hold
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub trace: Trace,
    /// Chain outputs seeded from `ψ` at the initial state; absent with stabilization.
    pub oracle: Option<OracleOutput>,
    pub certificate: IOCertificate,
    /// `ψ(q0, v0, w(0))`.
    pub initial_psi: Jet<f64>,
}

/// Plans the transition, closes the loop with `κ`, and certifies the result.
pub fn run_rest_to_rest<M: FlatModel>(
    map: &ParameterizingMap<M>,
    kappa: &MultiIndex,
    scenario: &RestToRestScenario,
) -> Result<ScenarioResult, SimulateError> {
    let reference = plan_rest_to_rest(&scenario.start, &scenario.end, scenario.duration)?;
    let mut feedback = QuasiStaticFeedback::new(map.clone(), kappa.clone())?.with_config(scenario.newton.clone());
    let start_jet = Jet::<f64>::zeros(map.orders().clone()).map(|var, _| reference.derivative(var.channel, var.order, 0.0));
    let (q_ref, v_ref) = map.state(&start_jet).map_err(|e| SimulateError::Feedback {
        time: 0.0,
        source: e.into(),
    })?;
    let mut q0 = scenario.q0.clone().unwrap_or(q_ref);
    let v0 = scenario.v0.clone().unwrap_or(v_ref);
    if let Some(offset) = &scenario.q_offset {
        if offset.len() != q0.len() {
            return Err(SimulateError::Dimension {
                what: "configuration offset",
                expected: q0.len(),
                found: offset.len(),
            });
        }
        q0.iter_mut().zip(offset).for_each(|(q, d)| *q += d);
    }
    let w0 = w_from_reference(&reference, kappa, feedback.w_shape(), 0.0);
    let initial_psi = feedback
        .solve_psi(&q0, &v0, &w0, None)
        .map_err(|source| SimulateError::Feedback { time: 0.0, source })?
        .psi;

    let mut controller = LinearizingController::new(feedback, reference.clone())?;
    if let Some(gains) = &scenario.gains {
        controller = controller.with_gains(gains.clone())?;
    }
    let total = scenario.total_time();
    let trace = simulate_closed_loop(map.model(), &mut controller, &q0, &v0, total, scenario.dt)?;
    let oracle = if controller.is_stabilized() {
        None
    } else {
        let w = |t: f64| -> Vec<f64> { (0..kappa.len()).map(|j| reference.derivative(j, kappa.get(j), t)).collect() };
        Some(chain_oracle(kappa, &initial_psi, w, total, scenario.dt)?)
    };
    let certificate = certify_io(&trace, kappa, oracle.as_ref(), &scenario.tolerances)?;
    Ok(ScenarioResult {
        trace,
        oracle,
        certificate,
        initial_psi,
    })
}

/// Chain deviations at `dt` and `dt / 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderCheck {
    pub dt: f64,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// Per channel `coarse / fine`.
    pub ratio: Vec<f64>,
    /// Every ratio is at least [`OrderCheck::REQUIRED_RATIO`].
    pub pass: bool,
}

impl OrderCheck {
    /// Halving the step of a fourth-order method should gain `2⁴`; `8` leaves margin.
    pub const REQUIRED_RATIO: f64 = 8.0;
}

/// Runs the scenario at `dt` and `dt / 2` and compares the chain deviations.
pub fn order_check<M: FlatModel>(
    map: &ParameterizingMap<M>,
    kappa: &MultiIndex,
    scenario: &RestToRestScenario,
) -> Result<OrderCheck, SimulateError> {
    let deviations = |dt: f64| -> Result<Vec<f64>, SimulateError> {
        let mut s = scenario.clone();
        s.dt = dt;
        s.gains = None;
        let result = run_rest_to_rest(map, kappa, &s)?;
        Ok(result
            .certificate
            .channels
            .iter()
            .map(|c| c.chain_deviation.unwrap_or(f64::INFINITY))
            .collect())
    };
    let coarse = deviations(scenario.dt)?;
    let fine = deviations(scenario.dt / 2.0)?;
    let ratio: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| c / f).collect();
    Ok(OrderCheck {
        dt: scenario.dt,
        pass: ratio.iter().all(|r| *r >= OrderCheck::REQUIRED_RATIO),
        coarse,
        fine,
        ratio,
    })
}
