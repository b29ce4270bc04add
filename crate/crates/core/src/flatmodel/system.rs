use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::linalg::reciprocal_condition;
use crate::multijet::{Dual, Jet, MultiIndex, Scalar};

/// A named physical constant of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

impl Parameter {
    pub fn new(name: &str, value: f64, unit: &str) -> Self {
        Parameter {
            name: name.to_string(),
            value,
            unit: unit.to_string(),
        }
    }
}

/// Sampling region for generic probe jets.
///
/// Order-0 values of channel `j` are drawn from `position[j]`; every higher
/// order `k` from `[-derivative_half_width[k-1], derivative_half_width[k-1]]`
/// (the last width is reused for orders beyond the list).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeBox {
    pub position: Vec<[f64; 2]>,
    pub derivative_half_width: Vec<f64>,
}

impl ProbeBox {
    fn half_width(&self, order: usize) -> f64 {
        let widths = &self.derivative_half_width;
        widths
            .get(order - 1)
            .or(widths.last())
            .copied()
            .unwrap_or(0.0)
    }

    /// Draws one jet of the given shape uniformly from the box.
    pub fn sample(&self, shape: &MultiIndex, rng: &mut impl Rng) -> Jet<f64> {
        let zero: Jet<f64> = Jet::zeros(shape.clone());
        zero.map(|var, _| {
            if var.order == 0 {
                let [lo, hi] = self.position[var.channel];
                if hi > lo {
                    rng.gen_range(lo..hi)
                } else {
                    lo
                }
            } else {
                let w = self.half_width(var.order);
                if w > 0.0 {
                    rng.gen_range(-w..w)
                } else {
                    0.0
                }
            }
        })
    }
}

/// A mechanical control system in classical state form `q̇ = v`,
/// `v̇ = a(q, v) + b(q)·u` with `n` degrees of freedom, `n − 1` inputs and a
/// flat output depending on the configuration only.
///
/// The configuration parameterization `q = F_q(y, ẏ, ÿ)` is supplied in
/// closed form by the model; velocities and inputs are derived from it.
/// All maps are generic over [`Scalar`] so they can be differentiated exactly.
pub trait FlatModel: Clone + Send + Sync {
    fn name(&self) -> &'static str;

    /// Degrees of freedom `n`.
    fn dof(&self) -> usize;

    fn parameters(&self) -> Vec<Parameter>;

    fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ModelError>;

    /// Input-free part `a(q, v)` of the accelerations.
    fn drift<S: Scalar>(&self, q: &[S], v: &[S]) -> Vec<S>;

    /// `n × m` input matrix `b(q)`, row-major.
    fn input_matrix<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>>;

    /// Accelerations `v̇ = a(q, v) + b(q)·u`.
    fn dynamics<S: Scalar>(&self, q: &[S], v: &[S], u: &[S]) -> Vec<S> {
        let b = self.input_matrix(q);
        self.drift(q, v)
            .into_iter()
            .zip(b)
            .map(|(a, row)| row.into_iter().zip(u).fold(a, |acc, (bij, &uj)| acc + bij * uj))
            .collect()
    }

    /// Flat output `y = φ(q)`.
    fn flat_output<S: Scalar>(&self, q: &[S]) -> Vec<S>;

    /// Last transformed coordinate `q̄ⁿ = gⁿ(q)` completing `φ` to a chart.
    fn completion<S: Scalar>(&self, q: &[S]) -> S;

    /// Highest jet order read by [`FlatModel::configuration`], per channel.
    fn configuration_arity(&self) -> MultiIndex;

    /// `q = F_q(y_[0, R−2])`.
    fn configuration<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S>;

    /// Rejects jets outside the region where `F_q` is valid.
    fn check_jet(&self, _jet: &Jet<f64>) -> Result<(), ModelError> {
        Ok(())
    }

    /// A rest value `y_s` of the flat output.
    fn nominal_equilibrium(&self) -> Vec<f64>;

    /// Default region for generic probes.
    fn probe_box(&self) -> ProbeBox;
}

/// A validated [`FlatModel`]: minimally underactuated with consistent dimensions.
#[derive(Clone, Debug)]
pub struct FlatSystem<M> {
    model: M,
}

impl<M: FlatModel> FlatSystem<M> {
    pub fn new(model: M) -> Result<Self, ModelError> {
        let n = model.dof();
        if n < 2 {
            return Err(ModelError::NotMinimallyUnderactuated { dof: n });
        }
        let m = n - 1;
        let arity = model.configuration_arity();
        if arity.len() != m {
            return Err(ModelError::Dimension {
                what: "configuration arity channels",
                expected: m,
                found: arity.len(),
            });
        }
        let y_s = model.nominal_equilibrium();
        if y_s.len() != m {
            return Err(ModelError::Dimension {
                what: "nominal equilibrium",
                expected: m,
                found: y_s.len(),
            });
        }
        let jet = Jet::equilibrium(&y_s, arity)?;
        model.check_jet(&jet)?;
        let q = model.configuration(&jet);
        let checks = [
            ("configuration", n, q.len()),
            ("flat output", m, model.flat_output(&q).len()),
            ("drift", n, model.drift(&q, &vec![0.0; n]).len()),
            ("input matrix rows", n, model.input_matrix(&q).len()),
        ];
        for (what, expected, found) in checks {
            if expected != found {
                return Err(ModelError::Dimension { what, expected, found });
            }
        }
        if let Some(row) = model.input_matrix(&q).iter().find(|row| row.len() != m) {
            return Err(ModelError::Dimension {
                what: "input matrix columns",
                expected: m,
                found: row.len(),
            });
        }
        Ok(FlatSystem { model })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn dof(&self) -> usize {
        self.model.dof()
    }

    pub fn inputs(&self) -> usize {
        self.model.dof() - 1
    }

    /// Jacobian of `q ↦ (φ(q), gⁿ(q))`; the chart requires it to be nonsingular.
    pub fn chart_jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let n = self.dof();
        let mut jac = DMatrix::zeros(n, n);
        for col in 0..n {
            let qd: Vec<Dual<f64>> = q
                .iter()
                .enumerate()
                .map(|(i, &x)| if i == col { Dual::variable(x) } else { Dual::constant(x) })
                .collect();
            let mut row_values = self.model.flat_output(&qd);
            row_values.push(self.model.completion(&qd));
            for (row, d) in row_values.iter().enumerate() {
                jac[(row, col)] = d.eps;
            }
        }
        jac
    }

    /// Reciprocal condition number of [`FlatSystem::chart_jacobian`].
    pub fn chart_regularity(&self, q: &[f64]) -> f64 {
        reciprocal_condition(&self.chart_jacobian(q))
    }
}
