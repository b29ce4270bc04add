use super::{FlatModel, ModelError, Parameter, ProbeBox};
use crate::multijet::{Jet, MultiIndex, Scalar};

/// Two-dimensional gantry crane with a point load.
///
/// `q = (s, l, φ)`: trolley position, cable length, cable angle from the
/// downward vertical. `u¹` pushes the trolley, `u²` acts along the cable
/// (positive pays it out). The `z` axis points down, so the load sits at
/// `(s + l sin φ, l cos φ)`, which is also the flat output.
///
/// The load only feels gravity and cable tension, so
/// `tan φ = −ÿ¹ / (g − ÿ²)` and the whole configuration follows from the
/// load position and acceleration. The chart is `l > 0`, `g − ÿ² > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GantryCrane {
    pub trolley_mass: f64,
    /// Winch inertia reflected to the cable, as an equivalent mass.
    pub winch_mass: f64,
    pub load_mass: f64,
    pub gravity: f64,
}

impl Default for GantryCrane {
    fn default() -> Self {
        GantryCrane {
            trolley_mass: 5.0,
            winch_mass: 1.0,
            load_mass: 2.0,
            gravity: 9.81,
        }
    }
}

const MIN_MARGIN: f64 = 1e-9;

impl GantryCrane {
    /// `[[a11, a12], [a12, a22]]⁻¹` of the trolley/cable mass matrix block.
    fn actuated_inverse<S: Scalar>(&self, phi: S) -> [[S; 2]; 2] {
        let s = phi.sin();
        let m = self.load_mass;
        let a11 = s * s * m + self.trolley_mass;
        let a12 = s * m;
        let a22 = S::from_f64(self.winch_mass + m);
        let det = a11 * a22 - a12 * a12;
        [[a22 / det, -a12 / det], [-a12 / det, a11 / det]]
    }

    /// Kinetic plus potential energy, used to check the equations of motion.
    pub fn energy(&self, q: &[f64], v: &[f64]) -> f64 {
        let (l, phi) = (q[1], q[2]);
        let (ds, dl, dphi) = (v[0], v[1], v[2]);
        let px = ds + dl * phi.sin() + l * dphi * phi.cos();
        let pz = dl * phi.cos() - l * dphi * phi.sin();
        0.5 * self.trolley_mass * ds * ds
            + 0.5 * self.winch_mass * dl * dl
            + 0.5 * self.load_mass * (px * px + pz * pz)
            - self.load_mass * self.gravity * l * phi.cos()
    }
}

impl FlatModel for GantryCrane {
    fn name(&self) -> &'static str {
        "gantry-crane"
    }

    fn dof(&self) -> usize {
        3
    }

    fn parameters(&self) -> Vec<Parameter> {
        vec![
            Parameter::new("trolley_mass", self.trolley_mass, "kg"),
            Parameter::new("winch_mass", self.winch_mass, "kg"),
            Parameter::new("load_mass", self.load_mass, "kg"),
            Parameter::new("gravity", self.gravity, "m/s^2"),
        ]
    }

    fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        let slot = match name {
            "trolley_mass" => &mut self.trolley_mass,
            "winch_mass" => &mut self.winch_mass,
            "load_mass" => &mut self.load_mass,
            "gravity" => &mut self.gravity,
            _ => return Err(ModelError::UnknownParameter(name.into())),
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(ModelError::InvalidParameter(name.into(), value));
        }
        *slot = value;
        Ok(())
    }

    fn drift<S: Scalar>(&self, q: &[S], v: &[S]) -> Vec<S> {
        let (l, phi) = (q[1], q[2]);
        let (dl, omega) = (v[1], v[2]);
        let (s, c) = (phi.sin(), phi.cos());
        let m = self.load_mass;
        let g = self.gravity;
        let h0 = s * (c * g + l * omega * omega) * m;
        let h1 = c * (m * g) + l * omega * omega * m;
        let inv = self.actuated_inverse(phi);
        let dds = inv[0][0] * h0 + inv[0][1] * h1;
        let ddl = inv[1][0] * h0 + inv[1][1] * h1;
        let ddphi = (-(s * g) - dds * c - dl * omega * 2.0) / l;
        vec![dds, ddl, ddphi]
    }

    fn input_matrix<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
        let (l, phi) = (q[1], q[2]);
        let inv = self.actuated_inverse(phi);
        let k = -phi.cos() / l;
        vec![
            vec![inv[0][0], inv[0][1]],
            vec![inv[1][0], inv[1][1]],
            vec![k * inv[0][0], k * inv[0][1]],
        ]
    }

    fn flat_output<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        vec![q[0] + q[1] * q[2].sin(), q[1] * q[2].cos()]
    }

    fn completion<S: Scalar>(&self, q: &[S]) -> S {
        q[2]
    }

    fn configuration_arity(&self) -> MultiIndex {
        MultiIndex::from([2, 2])
    }

    fn configuration<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        let (x, z) = (jet[(0, 0)], jet[(1, 0)]);
        let ddx = jet[(0, 2)];
        let den = -jet[(1, 2)] + self.gravity;
        let tension = (ddx * ddx + den * den).sqrt();
        vec![x + z * ddx / den, z * tension / den, (-ddx).atan2(den)]
    }

    fn check_jet(&self, jet: &Jet<f64>) -> Result<(), ModelError> {
        if jet.get(1, 0)? <= 0.0 {
            return Err(ModelError::OutsideChart("cable length must be positive".into()));
        }
        if self.gravity - jet.get(1, 2)? <= MIN_MARGIN {
            return Err(ModelError::OutsideChart("cable would go slack".into()));
        }
        Ok(())
    }

    fn nominal_equilibrium(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }

    fn probe_box(&self) -> ProbeBox {
        ProbeBox {
            position: vec![[-2.0, 2.0], [0.5, 2.0]],
            derivative_half_width: vec![1.0, 2.0, 2.0, 2.0],
        }
    }
}
