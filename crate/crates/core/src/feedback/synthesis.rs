use nalgebra::{DMatrix, DVector};

use super::newton::newton;
use super::{FeedbackError, NewtonConfig, WJets};
use crate::flatmodel::{FlatModel, InputSolution, ParameterizingMap};
use crate::structure::{check_kappa, kappa_columns, stacked_jacobian};
use crate::multijet::{Jet, JetMap, JetVar, MultiIndex};

/// Solved jets `ψ = y_[0, κ−1]` with solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiSolution {
    pub psi: Jet<f64>,
    pub iterations: usize,
    /// Residual ∞-norm of the state equations.
    pub residual: f64,
}

/// One evaluation of the feedback law.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackOutput {
    pub u: Vec<f64>,
    pub psi: Jet<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Consistency residual of the input equations.
    pub input_residual: f64,
}

/// The feedback `u = F_u(ψ(q, v, w), w)` for one choice of `κ`.
///
/// Holds the last solution as a warm start, so an instance follows one
/// solution branch; clone it to snapshot that state.
#[derive(Clone, Debug)]
pub struct QuasiStaticFeedback<M> {
    kappa: MultiIndex,
    w_shape: MultiIndex,
    columns: Vec<JetVar>,
    map: ParameterizingMap<M>,
    config: NewtonConfig,
    warm_start: Option<Jet<f64>>,
}

impl<M: FlatModel> QuasiStaticFeedback<M> {
    pub fn new(map: ParameterizingMap<M>, kappa: MultiIndex) -> Result<Self, FeedbackError> {
        check_kappa(&kappa, map.orders(), map.model().dof())?;
        if kappa.orders().contains(&0) {
            return Err(FeedbackError::EmptyChain(kappa));
        }
        let w_shape = map.orders().checked_sub(&kappa)?;
        Ok(QuasiStaticFeedback {
            columns: kappa_columns(&kappa),
            kappa,
            w_shape,
            map,
            config: NewtonConfig::default(),
            warm_start: None,
        })
    }

    pub fn with_config(mut self, config: NewtonConfig) -> Self {
        self.config = config;
        self
    }

    pub fn kappa(&self) -> &MultiIndex {
        &self.kappa
    }

    /// `R − κ`, the shape of the [`WJets`] this feedback reads.
    pub fn w_shape(&self) -> &MultiIndex {
        &self.w_shape
    }

    /// `κ − 1`, the shape of `ψ`.
    pub fn psi_shape(&self) -> MultiIndex {
        self.kappa.shifted_down(1).expect("kappa >= 1")
    }

    pub fn map(&self) -> &ParameterizingMap<M> {
        &self.map
    }

    pub fn config(&self) -> &NewtonConfig {
        &self.config
    }

    pub fn warm_start(&self) -> Option<&Jet<f64>> {
        self.warm_start.as_ref()
    }

    /// Forgets the warm start; the next solve starts from [`Self::initial_guess`].
    pub fn reset(&mut self) {
        self.warm_start = None;
    }

    /// `(φ(q), 0, …, 0)`.
    pub fn initial_guess(&self, q: &[f64]) -> Jet<f64> {
        let y = self.map.model().flat_output(q);
        Jet::<f64>::zeros(self.psi_shape()).map(|var, _| if var.order == 0 { y[var.channel] } else { 0.0 })
    }

    /// Joins `ψ` with the substituted `y_[κ, R] = w_[0, R−κ]` into a jet of shape `R`.
    pub fn join(&self, psi: &Jet<f64>, w: &WJets) -> Result<Jet<f64>, FeedbackError> {
        self.check_w(w)?;
        let mut jet = Jet::zeros(self.map.orders().clone());
        for j in 0..self.kappa.len() {
            let kj = self.kappa.get(j);
            for k in 0..=self.map.orders().get(j) {
                let value = if k < kj { psi.get(j, k)? } else { w.get(j, k - kj)? };
                jet.set(j, k, value)?;
            }
        }
        Ok(jet)
    }

    /// `(F_q, F_v)(ψ ‖ w) − (q, v)`.
    pub fn residual(&self, psi: &Jet<f64>, q: &[f64], v: &[f64], w: &WJets) -> Result<Vec<f64>, FeedbackError> {
        self.check_state(q, v)?;
        let jet = self.join(psi, w)?;
        Ok(self.state_defect(&jet, q, v)?.iter().copied().collect())
    }

    /// Jacobian of [`Self::residual`] with respect to `ψ`, columns in
    /// derivative-order-major order.
    pub fn residual_jacobian(&self, psi: &Jet<f64>, w: &WJets) -> Result<DMatrix<f64>, FeedbackError> {
        let jet = self.join(psi, w)?;
        Ok(stacked_jacobian(&self.map, &jet, &self.columns)?)
    }

    /// Solves the state equations for `ψ`, starting from `guess`, the warm
    /// start, or [`Self::initial_guess`], in that order of preference.
    pub fn solve_psi(
        &mut self,
        q: &[f64],
        v: &[f64],
        w: &WJets,
        guess: Option<&Jet<f64>>,
    ) -> Result<PsiSolution, FeedbackError> {
        self.check_state(q, v)?;
        self.check_w(w)?;
        let start = match (guess, &self.warm_start) {
            (Some(g), _) => g.clone(),
            (None, Some(ws)) => ws.clone(),
            (None, None) => self.initial_guess(q),
        };
        let x0 = DVector::from_iterator(self.columns.len(), self.columns.iter().map(|c| start[(c.channel, c.order)]));
        let mut jet = self.join(&start, w)?;
        let outcome = newton(&self.config, x0, |x, want_jac| {
            for (c, &value) in self.columns.iter().zip(x.iter()) {
                jet.set(c.channel, c.order, value)?;
            }
            let r = self.state_defect(&jet, q, v)?;
            let jac = if want_jac {
                Some(stacked_jacobian(&self.map, &jet, &self.columns)?)
            } else {
                None
            };
            Ok((r, jac))
        })?;
        let mut psi = Jet::zeros(self.psi_shape());
        for (c, &value) in self.columns.iter().zip(outcome.x.iter()) {
            psi.set(c.channel, c.order, value)?;
        }
        if let Some(previous) = &self.warm_start {
            let scale = 1.0 + previous.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max);
            let jump = psi.max_abs_diff(previous) / scale;
            if jump > self.config.branch_jump {
                return Err(FeedbackError::BranchJump {
                    jump,
                    threshold: self.config.branch_jump,
                });
            }
        }
        self.warm_start = Some(psi.clone());
        Ok(PsiSolution {
            psi,
            iterations: outcome.iterations,
            residual: outcome.residual,
        })
    }

    /// `F_u(ψ ‖ w)`.
    pub fn input(&self, psi: &Jet<f64>, w: &WJets) -> Result<InputSolution, FeedbackError> {
        let jet = self.join(psi, w)?;
        Ok(self.map.input().solve(&jet)?)
    }

    /// The linearizing input at the state `(q, v)`.
    pub fn feedback_u(&mut self, q: &[f64], v: &[f64], w: &WJets) -> Result<FeedbackOutput, FeedbackError> {
        let sol = self.solve_psi(q, v, w, None)?;
        let input = self.input(&sol.psi, w)?;
        Ok(FeedbackOutput {
            u: input.u,
            psi: sol.psi,
            iterations: sol.iterations,
            residual: sol.residual,
            input_residual: input.residual,
        })
    }

    fn state_defect(&self, jet: &Jet<f64>, q: &[f64], v: &[f64]) -> Result<DVector<f64>, FeedbackError> {
        let fq = self.map.configuration().eval(jet)?;
        let fv = self.map.velocity().eval(jet)?;
        let target = q.iter().chain(v);
        Ok(DVector::from_iterator(
            fq.len() + fv.len(),
            fq.iter().chain(&fv).zip(target).map(|(a, b)| a - b),
        ))
    }

    fn check_state(&self, q: &[f64], v: &[f64]) -> Result<(), FeedbackError> {
        let n = self.map.model().dof();
        for found in [q.len(), v.len()] {
            if found != n {
                return Err(FeedbackError::StateDimension { expected: n, found });
            }
        }
        Ok(())
    }

    fn check_w(&self, w: &WJets) -> Result<(), FeedbackError> {
        if w.shape() != &self.w_shape {
            return Err(FeedbackError::WShape {
                expected: self.w_shape.clone(),
                found: w.shape().clone(),
            });
        }
        Ok(())
    }
}
