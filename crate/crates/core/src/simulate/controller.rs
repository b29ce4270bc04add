use super::{ReferenceSignal, SimulateError};
use crate::feedback::{FeedbackError, QuasiStaticFeedback, WJets};
use crate::flatmodel::FlatModel;
use crate::multijet::{Jet, MultiIndex};

/// Input and applied `w_[0]` at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSample {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// A static state feedback `u(t, q, v)`.
pub trait Controller {
    fn control(&mut self, t: f64, q: &[f64], v: &[f64]) -> Result<ControlSample, FeedbackError>;
}

/// The linearizing feedback driven by a reference: `wʲ = y^j_d,[κʲ]`, with
/// `w` derivatives read from the reference analytically.
///
/// Optional gains add `Σᵢ aᵢʲ (y^j_d,[i] − ψ^j_[i])` to `wʲ` on channels with
/// `κʲ = rʲ`, where the feedback reads no derivative of `wʲ`.
#[derive(Clone, Debug)]
pub struct LinearizingController<M, R> {
    feedback: QuasiStaticFeedback<M>,
    reference: R,
    gains: Vec<Vec<f64>>,
}

impl<M: FlatModel, R: ReferenceSignal> LinearizingController<M, R> {
    pub fn new(feedback: QuasiStaticFeedback<M>, reference: R) -> Result<Self, SimulateError> {
        let m = feedback.kappa().len();
        if reference.channels() != m {
            return Err(SimulateError::Dimension {
                what: "reference channels",
                expected: m,
                found: reference.channels(),
            });
        }
        Ok(LinearizingController {
            feedback,
            reference,
            gains: vec![Vec::new(); m],
        })
    }

    /// One gain list per channel, `aʲ_0 … aʲ_{κʲ−1}`; empty lists leave the channel open-loop.
    pub fn with_gains(mut self, gains: Vec<Vec<f64>>) -> Result<Self, SimulateError> {
        let kappa = self.feedback.kappa();
        let w_shape = self.feedback.w_shape();
        if gains.len() != kappa.len() {
            return Err(SimulateError::Gains(format!("expected {} gain lists, got {}", kappa.len(), gains.len())));
        }
        for (j, g) in gains.iter().enumerate() {
            if g.is_empty() {
                continue;
            }
            if w_shape.get(j) != 0 {
                return Err(SimulateError::Gains(format!(
                    "channel {} has kappa < r; its w derivatives are fed forward and cannot be stabilized",
                    j + 1
                )));
            }
            if g.len() != kappa.get(j) {
                return Err(SimulateError::Gains(format!(
                    "channel {} needs {} gains, got {}",
                    j + 1,
                    kappa.get(j),
                    g.len()
                )));
            }
        }
        self.gains = gains;
        Ok(self)
    }

    pub fn feedback(&self) -> &QuasiStaticFeedback<M> {
        &self.feedback
    }

    pub fn feedback_mut(&mut self) -> &mut QuasiStaticFeedback<M> {
        &mut self.feedback
    }

    pub fn reference(&self) -> &R {
        &self.reference
    }

    pub fn is_stabilized(&self) -> bool {
        self.gains.iter().any(|g| !g.is_empty())
    }

    /// Feed-forward jets `wʲ_[i] = y^j_d,[κʲ+i](t)`.
    pub fn w_jets(&self, t: f64) -> WJets {
        w_from_reference(&self.reference, self.feedback.kappa(), self.feedback.w_shape(), t)
    }
}

pub(crate) fn w_from_reference<R: ReferenceSignal>(reference: &R, kappa: &MultiIndex, shape: &MultiIndex, t: f64) -> WJets {
    WJets::from_jet(
        Jet::<f64>::zeros(shape.clone()).map(|var, _| reference.derivative(var.channel, var.order + kappa.get(var.channel), t)),
    )
}

impl<M: FlatModel, R: ReferenceSignal> Controller for LinearizingController<M, R> {
    fn control(&mut self, t: f64, q: &[f64], v: &[f64]) -> Result<ControlSample, FeedbackError> {
        let mut w = self.w_jets(t);
        let sol = self.feedback.solve_psi(q, v, &w, None)?;
        for (j, gains) in self.gains.iter().enumerate() {
            if gains.is_empty() {
                continue;
            }
            let correction: f64 = gains
                .iter()
                .enumerate()
                .map(|(i, a)| a * (self.reference.derivative(j, i, t) - sol.psi[(j, i)]))
                .sum();
            let w0 = w[(j, 0)];
            w.set(j, 0, w0 + correction)?;
        }
        let input = self.feedback.input(&sol.psi, &w)?;
        Ok(ControlSample {
            u: input.u,
            w: w.values(),
            iterations: sol.iterations,
            residual: sol.residual,
        })
    }
}

/// Open-loop constant input; reports the reference's `y_d,[κ]` as `w` so a
/// certificate can be computed against it.
#[derive(Clone, Debug)]
pub struct ConstantInput<R> {
    pub u: Vec<f64>,
    pub reference: R,
    pub kappa: MultiIndex,
}

impl<R: ReferenceSignal> Controller for ConstantInput<R> {
    fn control(&mut self, t: f64, _q: &[f64], _v: &[f64]) -> Result<ControlSample, FeedbackError> {
        Ok(ControlSample {
            u: self.u.clone(),
            w: (0..self.kappa.len())
                .map(|j| self.reference.derivative(j, self.kappa.get(j), t))
                .collect(),
            iterations: 0,
            residual: 0.0,
        })
    }
}
