use nalgebra::DMatrix;
use serde::Serialize;

use super::{FlatModel, FlatSystem, ModelError};
use crate::linalg::{least_squares_generic, max_abs, reciprocal_condition};
use crate::multijet::{jet_partials, prolong, Jet, JetMap, MultiIndex, Prolonged, Scalar};

/// Partials with magnitude below this on every probe count as identically zero.
pub const ZERO_PARTIAL_TOL: f64 = 1e-9;
/// Largest accepted residual of the overdetermined input equations.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Largest accepted acceleration at a computed equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;
/// Input matrices with `σ_min/σ_max` below this are treated as rank deficient.
pub const INPUT_RANK_TOL: f64 = 1e-12;

/// `q = F_q(y_[0, R−2])`, the model's closed-form configuration map.
#[derive(Clone, Debug)]
pub struct ConfigurationMap<M> {
    model: M,
}

impl<M: FlatModel> ConfigurationMap<M> {
    pub fn new(model: M) -> Self {
        ConfigurationMap { model }
    }
}

impl<M: FlatModel> JetMap for ConfigurationMap<M> {
    fn dim(&self) -> usize {
        self.model.dof()
    }
    fn arity(&self) -> MultiIndex {
        self.model.configuration_arity()
    }
    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        self.model.configuration(jet)
    }
}

/// `v = F_v = D F_q`.
pub type VelocityMap<M> = Prolonged<ConfigurationMap<M>>;

/// `v = F_v(y_[0, R−1])` obtained by prolonging `F_q`.
pub fn derive_velocity_map<M: FlatModel>(sys: &FlatSystem<M>) -> VelocityMap<M> {
    prolong(ConfigurationMap::new(sys.model().clone()))
}

/// `u = F_u(y_[0, R])`: substitute `q = F_q`, `v = F_v`, `v̇ = D F_v` into the
/// dynamics and solve `b(q)·u = v̇ − a(q, v)` in the least-squares sense.
#[derive(Clone, Debug)]
pub struct InputMap<M> {
    model: M,
    acceleration: Prolonged<VelocityMap<M>>,
}

/// Checked evaluation of [`InputMap`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputSolution {
    pub u: Vec<f64>,
    /// ∞-norm of `b·u − (v̇ − a)` over all `n` equations.
    pub residual: f64,
}

impl<M: FlatModel> InputMap<M> {
    pub fn new(model: M) -> Self {
        let acceleration = prolong(prolong(ConfigurationMap::new(model.clone())));
        InputMap { model, acceleration }
    }

    /// Evaluates `F_u` at `jet`, rejecting singular input matrices and
    /// inconsistent equations (a wrong `F_q` or a wrong model).
    pub fn solve(&self, jet: &Jet<f64>) -> Result<InputSolution, ModelError> {
        let view = jet.restrict(&self.arity())?;
        let q = self.model.configuration(&view);
        let v = self.acceleration.inner().eval_unchecked(&view);
        let acc = self.acceleration.eval_unchecked(&view);
        let b = self.model.input_matrix(&q);
        let a = self.model.drift(&q, &v);
        let bm = DMatrix::from_fn(b.len(), b[0].len(), |i, j| b[i][j]);
        let rcond = reciprocal_condition(&bm);
        if rcond < INPUT_RANK_TOL {
            return Err(ModelError::SingularInputMatrix { rcond });
        }
        let rhs: Vec<f64> = acc.iter().zip(&a).map(|(x, y)| x - y).collect();
        let singular = ModelError::SingularInputMatrix { rcond };
        let mut u = least_squares_generic(&b, &rhs).ok_or(singular.clone())?;
        // one round of iterative refinement against the rounding of the normal equations
        let defect_of = |u: &[f64]| -> Vec<f64> {
            b.iter()
                .zip(&rhs)
                .map(|(row, r)| row.iter().zip(u).fold(-r, |acc, (bij, uj)| bij.mul_add(*uj, acc)))
                .collect()
        };
        let correction = least_squares_generic(&b, &defect_of(&u)).ok_or(singular)?;
        u.iter_mut().zip(&correction).for_each(|(x, d)| *x -= d);
        let defect = defect_of(&u);
        let residual = max_abs(&defect);
        if !(residual <= CONSISTENCY_TOL) {
            return Err(ModelError::InconsistentInput { residual });
        }
        Ok(InputSolution { u, residual })
    }
}

impl<M: FlatModel> JetMap for InputMap<M> {
    fn dim(&self) -> usize {
        self.model.dof() - 1
    }

    fn arity(&self) -> MultiIndex {
        self.acceleration.arity()
    }

    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        let q = self.model.configuration(jet);
        let v = self.acceleration.inner().eval_unchecked(jet);
        let acc = self.acceleration.eval_unchecked(jet);
        let b = self.model.input_matrix(&q);
        let rhs: Vec<S> = acc
            .into_iter()
            .zip(self.model.drift(&q, &v))
            .map(|(x, y)| x - y)
            .collect();
        least_squares_generic(&b, &rhs)
            .unwrap_or_else(|| vec![S::from_f64(f64::NAN); self.dim()])
    }
}

/// `F_u` from the model; fails for models that are not minimally underactuated.
pub fn derive_input_map<M: FlatModel>(sys: &FlatSystem<M>) -> InputMap<M> {
    InputMap::new(sys.model().clone())
}

/// The parameterizing map `(F_q, F_v, F_u)` with its minimal orders `R`.
#[derive(Clone, Debug)]
pub struct ParameterizingMap<M> {
    configuration: ConfigurationMap<M>,
    velocity: VelocityMap<M>,
    input: InputMap<M>,
    orders: MultiIndex,
}

impl<M: FlatModel> ParameterizingMap<M> {
    /// Derives `F_v` and `F_u` and determines `R` by probing `F_q`.
    ///
    /// The model's declared arity must equal `R − 2` exactly.
    pub fn derive(sys: &FlatSystem<M>, probes: &[Jet<f64>]) -> Result<Self, ModelError> {
        let orders = minimal_orders(sys, probes)?;
        let declared = sys.model().configuration_arity();
        if orders.shifted_down(2).as_ref() != Some(&declared) {
            return Err(ModelError::ArityMismatch {
                declared,
                probed: orders,
            });
        }
        Ok(ParameterizingMap {
            configuration: ConfigurationMap::new(sys.model().clone()),
            velocity: derive_velocity_map(sys),
            input: derive_input_map(sys),
            orders,
        })
    }

    pub fn configuration(&self) -> &ConfigurationMap<M> {
        &self.configuration
    }

    pub fn velocity(&self) -> &VelocityMap<M> {
        &self.velocity
    }

    pub fn input(&self) -> &InputMap<M> {
        &self.input
    }

    /// Minimal multi-index `R`.
    pub fn orders(&self) -> &MultiIndex {
        &self.orders
    }

    pub fn model(&self) -> &M {
        &self.configuration.model
    }

    /// `(F_q, F_v)` at `jet`.
    pub fn state(&self, jet: &Jet<f64>) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        Ok((self.configuration.eval(jet)?, self.velocity.eval(jet)?))
    }
}

/// `R` by probing: `rʲ = 2 + ` the highest order `k` such that some
/// `∂F_qⁱ/∂y^j_[k]` exceeds [`ZERO_PARTIAL_TOL`] at some probe.
///
/// This is a numerical stand-in for symbolic dependence: a partial that
/// happens to vanish on every probe is reported as identically zero.
pub fn minimal_orders<M: FlatModel>(
    sys: &FlatSystem<M>,
    probes: &[Jet<f64>],
) -> Result<MultiIndex, ModelError> {
    if probes.is_empty() {
        return Err(ModelError::NoProbes);
    }
    let fq = ConfigurationMap::new(sys.model().clone());
    let m = sys.inputs();
    let mut highest: Vec<Option<usize>> = vec![None; m];
    for probe in probes {
        for grad in jet_partials(&fq, probe)? {
            for (var, value) in grad.iter() {
                if value.abs() > ZERO_PARTIAL_TOL {
                    let slot = &mut highest[var.channel];
                    *slot = Some(slot.map_or(var.order, |k| k.max(var.order)));
                }
            }
        }
    }
    highest
        .into_iter()
        .enumerate()
        .map(|(j, k)| k.map(|k| k + 2).ok_or(ModelError::UnusedChannel(j)))
        .collect::<Result<Vec<_>, _>>()
        .map(MultiIndex::new)
}

/// A rest point `(y_s, q_s, u_s)` with `v = 0` and zero acceleration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub y_s: Vec<f64>,
    pub q_s: Vec<f64>,
    pub u_s: Vec<f64>,
}

/// Evaluates `F_q` and `F_u` on the constant jet `(y_s, 0, …, 0)`.
pub fn find_equilibrium<M: FlatModel>(
    sys: &FlatSystem<M>,
    map: &ParameterizingMap<M>,
    y_s: &[f64],
) -> Result<Equilibrium, ModelError> {
    let jet = Jet::equilibrium(y_s, map.input().arity())?;
    sys.model().check_jet(&jet)?;
    let q_s = map.configuration().eval(&jet)?;
    let u_s = map.input().solve(&jet)?.u;
    let n = sys.dof();
    let acc = sys.model().dynamics(&q_s, &vec![0.0; n], &u_s);
    let residual = max_abs(&acc);
    if !(residual <= EQUILIBRIUM_TOL) {
        return Err(ModelError::NotAtRest { residual });
    }
    Ok(Equilibrium {
        y_s: y_s.to_vec(),
        q_s,
        u_s,
    })
}
