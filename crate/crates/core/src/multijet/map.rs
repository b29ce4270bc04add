use nalgebra::DMatrix;

use super::{Dual, Jet, JetError, JetVar, MultiIndex, Scalar};

/// A smooth vector-valued function of jet coordinates.
///
/// `arity()` is the highest order read per channel. Implementors write
/// [`JetMap::eval_unchecked`] generically so it can be run on nested duals;
/// it receives a jet covering the arity and must not read beyond it.
/// A scalar jet function is a map with `dim() == 1`.
pub trait JetMap {
    /// Number of outputs.
    fn dim(&self) -> usize;

    fn arity(&self) -> MultiIndex;

    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S>;

    /// Checked evaluation: the jet is restricted to the declared arity first,
    /// so an implementation that over-reads panics instead of returning garbage.
    fn eval<S: Scalar>(&self, jet: &Jet<S>) -> Result<Vec<S>, JetError> {
        let view = jet.restrict(&self.arity())?;
        Ok(self.eval_unchecked(&view))
    }
}

impl<F: JetMap + ?Sized> JetMap for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn arity(&self) -> MultiIndex {
        (**self).arity()
    }
    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        (**self).eval_unchecked(jet)
    }
}

/// Total time derivative `DF = Σⱼ Σ_β ∂F/∂y^j_[β] · y^j_[β+1]`.
///
/// Evaluated exactly by pushing the jet one step along the shift field:
/// every `y^j_[β]` becomes the dual `y^j_[β] + y^j_[β+1]·ε` and the
/// infinitesimal part of `F` is the total derivative.
#[derive(Clone, Debug)]
pub struct Prolonged<F> {
    inner: F,
}

pub fn prolong<F: JetMap>(inner: F) -> Prolonged<F> {
    Prolonged { inner }
}

impl<F> Prolonged<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: JetMap> JetMap for Prolonged<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn arity(&self) -> MultiIndex {
        self.inner.arity().shifted_up(1)
    }

    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        let inner_arity = self.inner.arity();
        let mut shifted: Jet<Dual<S>> = Jet::zeros(inner_arity.clone());
        for j in 0..inner_arity.len() {
            for k in 0..=inner_arity.get(j) {
                let value = Dual::new(jet[(j, k)], jet[(j, k + 1)]);
                shifted.set(j, k, value).expect("inside inner arity");
            }
        }
        self.inner
            .eval_unchecked(&shifted)
            .into_iter()
            .map(|d| d.eps)
            .collect()
    }
}

/// One output of a vector map, as a scalar jet function.
#[derive(Clone, Debug)]
pub struct Component<F> {
    map: F,
    index: usize,
}

impl<F: JetMap> Component<F> {
    pub fn new(map: F, index: usize) -> Self {
        assert!(index < map.dim(), "component {index} out of range");
        Component { map, index }
    }
}

impl<F: JetMap> JetMap for Component<F> {
    fn dim(&self) -> usize {
        1
    }
    fn arity(&self) -> MultiIndex {
        self.map.arity()
    }
    fn eval_unchecked<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
        vec![self.map.eval_unchecked(jet)[self.index]]
    }
}

/// Every first partial `∂Fⁱ/∂y^j_[k]` at `point`, one gradient per output.
///
/// Gradients are shaped like `point`; entries above the arity are zero.
pub fn jet_partials<F: JetMap>(map: &F, point: &Jet<f64>) -> Result<Vec<Jet<f64>>, JetError> {
    let arity = map.arity();
    let view = point.restrict(&arity)?;
    let mut grads = vec![Jet::zeros(point.shape().clone()); map.dim()];
    for (var, _) in view.iter() {
        let column = seeded_column(map, &view, var);
        for (grad, value) in grads.iter_mut().zip(column) {
            grad.set(var.channel, var.order, value)?;
        }
    }
    Ok(grads)
}

/// Jacobian of `map` at `point` with respect to the listed variables, in the
/// order given. Variables above the map's arity give zero columns.
pub fn jet_jacobian<F: JetMap>(
    map: &F,
    point: &Jet<f64>,
    columns: &[JetVar],
) -> Result<DMatrix<f64>, JetError> {
    let arity = map.arity();
    let view = point.restrict(&arity)?;
    let mut out = DMatrix::zeros(map.dim(), columns.len());
    for (c, var) in columns.iter().enumerate() {
        if var.channel >= arity.len() {
            return Err(JetError::MissingVariable {
                channel: var.channel,
                order: var.order,
                shape: arity,
            });
        }
        if var.order > arity.get(var.channel) {
            continue;
        }
        for (r, value) in seeded_column(map, &view, *var).into_iter().enumerate() {
            out[(r, c)] = value;
        }
    }
    Ok(out)
}

fn seeded_column<F: JetMap>(map: &F, view: &Jet<f64>, seed: JetVar) -> Vec<f64> {
    let dual = view.map(|var, value| {
        if var == seed {
            Dual::variable(value)
        } else {
            Dual::constant(value)
        }
    });
    map.eval_unchecked(&dual).into_iter().map(|d| d.eps).collect()
}
