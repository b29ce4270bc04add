use super::{FlatModel, ModelError, Parameter, ProbeBox};
use crate::multijet::{Jet, MultiIndex, Scalar};

/// Planar vertical take-off and landing aircraft with normalized gravity.
///
/// `q = (x, z, θ)`, `u = (u¹, u²)`:
///
/// ```text
/// v̇x = ε cos θ · u² − sin θ · u¹
/// v̇z = cos θ · u¹ + ε sin θ · u² − 1
/// ω̇  = u²
/// ```
///
/// Flat output `y = (x − ε sin θ, z + ε cos θ)`; the chart requires a
/// nonzero net thrust, `(ÿ¹)² + (ÿ² + 1)² > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vtol {
    /// Coupling between rolling moment and lateral force.
    pub epsilon: f64,
}

impl Default for Vtol {
    fn default() -> Self {
        Vtol { epsilon: 0.3 }
    }
}

const MIN_THRUST: f64 = 1e-9;

impl FlatModel for Vtol {
    fn name(&self) -> &'static str {
        "vtol"
    }

    fn dof(&self) -> usize {
        3
    }

    fn parameters(&self) -> Vec<Parameter> {
        vec![Parameter::new("epsilon", self.epsilon, "1")]
    }

    fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        match name {
            "epsilon" if value.is_finite() => self.epsilon = value,
            "epsilon" => return Err(ModelError::InvalidParameter(name.into(), value)),
            _ => return Err(ModelError::UnknownParameter(name.into())),
        }
        Ok(())
    }

    fn drift<S: Scalar>(&self, _q: &[S], _v: &[S]) -> Vec<S> {
        vec![S::zero(), S::from_f64(-1.0), S::zero()]
    }

    fn input_matrix<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
        let (s, c) = (q[2].sin(), q[2].cos());
        vec![
            vec![-s, c * self.epsilon],
            vec![c, s * self.epsilon],
            vec![S::zero(), S::one()],
        ]
    }

    fn flat_output<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        vec![
            q[0] - q[2].sin() * self.epsilon,
            q[1] + q[2].cos() * self.epsilon,
        ]
    }

    fn completion<S: Scalar>(&self, q: &[S]) -> S {
        q[2]
    }

    fn configuration_arity(&self) -> MultiIndex {
        MultiIndex::from([2, 2])
    }

    fn configuration<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        let theta = (-jet[(0, 2)]).atan2(jet[(1, 2)] + 1.0);
        vec![
            jet[(0, 0)] + theta.sin() * self.epsilon,
            jet[(1, 0)] - theta.cos() * self.epsilon,
            theta,
        ]
    }

    fn check_jet(&self, jet: &Jet<f64>) -> Result<(), ModelError> {
        let a = jet.get(0, 2)?;
        let b = jet.get(1, 2)? + 1.0;
        if a.hypot(b) > MIN_THRUST {
            Ok(())
        } else {
            Err(ModelError::OutsideChart("net thrust vanishes".into()))
        }
    }

    fn nominal_equilibrium(&self) -> Vec<f64> {
        vec![0.0, self.epsilon]
    }

    fn probe_box(&self) -> ProbeBox {
        ProbeBox {
            position: vec![[-5.0, 5.0], [-5.0, 5.0]],
            derivative_half_width: vec![1.0, 0.5, 1.0, 1.0],
        }
    }
}
