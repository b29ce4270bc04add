use crate::flatmodel::{ConfigurationMap, FlatModel, FlatSystem, ParameterizingMap, VelocityMap};
use crate::multijet::{prolong, Jet, JetMap, MultiIndex, Prolonged, Scalar};

/// A pair of jet maps parameterizing a classical state `(q, v)`.
///
/// Implemented both for the original coordinates and for the transformed
/// coordinates `(q̄, v̄)`, so the Jacobian routines work on either.
pub trait StateMaps {
    type Configuration: JetMap;
    type Velocity: JetMap;

    fn configuration_map(&self) -> &Self::Configuration;
    fn velocity_map(&self) -> &Self::Velocity;

    /// Degrees of freedom `n`.
    fn dof(&self) -> usize {
        self.configuration_map().dim()
    }
}

impl<M: FlatModel> StateMaps for ParameterizingMap<M> {
    type Configuration = ConfigurationMap<M>;
    type Velocity = VelocityMap<M>;

    fn configuration_map(&self) -> &ConfigurationMap<M> {
        self.configuration()
    }
    fn velocity_map(&self) -> &VelocityMap<M> {
        self.velocity()
    }
}

/// `q̄ = (y¹, …, yⁿ⁻¹, gⁿ(F_q))`.
#[derive(Clone, Debug)]
pub struct TransformedConfiguration<M> {
    configuration: ConfigurationMap<M>,
    model: M,
}

impl<M: FlatModel> JetMap for TransformedConfiguration<M> {
    fn dim(&self) -> usize {
        self.model.dof()
    }

    fn arity(&self) -> MultiIndex {
        self.configuration.arity()
    }

    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        let q = self.configuration.eval_unchecked(jet);
        let mut out: Vec<S> = (0..jet.channels()).map(|j| jet[(j, 0)]).collect();
        out.push(self.model.completion(&q));
        out
    }
}

/// Parameterization of the transformed coordinates: the first `n − 1` rows
/// are the flat output and its first derivative, only the last row of each
/// block carries the model.
#[derive(Clone, Debug)]
pub struct TransformedMap<M> {
    configuration: TransformedConfiguration<M>,
    velocity: Prolonged<TransformedConfiguration<M>>,
}

impl<M: FlatModel> TransformedMap<M> {
    /// `F^n_q̄` (and everything above it).
    pub fn configuration(&self) -> &TransformedConfiguration<M> {
        &self.configuration
    }

    pub fn velocity(&self) -> &Prolonged<TransformedConfiguration<M>> {
        &self.velocity
    }
}

impl<M: FlatModel> StateMaps for TransformedMap<M> {
    type Configuration = TransformedConfiguration<M>;
    type Velocity = Prolonged<TransformedConfiguration<M>>;

    fn configuration_map(&self) -> &Self::Configuration {
        &self.configuration
    }
    fn velocity_map(&self) -> &Self::Velocity {
        &self.velocity
    }
}

pub fn transform_map<M: FlatModel>(sys: &FlatSystem<M>, map: &ParameterizingMap<M>) -> TransformedMap<M> {
    let configuration = TransformedConfiguration {
        configuration: map.configuration().clone(),
        model: sys.model().clone(),
    };
    TransformedMap {
        velocity: prolong(configuration.clone()),
        configuration,
    }
}
