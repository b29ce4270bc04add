use nalgebra::DMatrix;

use super::{StateMaps, StructureError};
use crate::linalg::reciprocal_condition;
use crate::multijet::{jet_jacobian, Jet, JetVar, MultiIndex};

/// Matrices with reciprocal condition number above this are regular.
pub const REGULARITY_RCOND: f64 = 1e-10;

/// Highest jet order that `(F_q, F_v)` can depend on.
pub const MAX_STATE_ORDER: usize = 3;

/// Columns of the full state Jacobian: derivative order major, channel minor,
/// i.e. `y¹, …, yᵐ, y¹_[1], …, yᵐ_[3]`.
pub fn full_columns(channels: usize) -> Vec<JetVar> {
    (0..=MAX_STATE_ORDER)
        .flat_map(|k| (0..channels).map(move |j| JetVar::new(j, k)))
        .collect()
}

/// Columns `y^j_[k]` with `k < κʲ`, in the same order as [`full_columns`].
pub fn kappa_columns(kappa: &MultiIndex) -> Vec<JetVar> {
    let top = kappa.orders().iter().copied().max().unwrap_or(0);
    (0..top)
        .flat_map(|k| {
            (0..kappa.len())
                .filter(move |&j| k < kappa.get(j))
                .map(move |j| JetVar::new(j, k))
        })
        .collect()
}

/// `2n × 4(n−1)` Jacobian of `(F_q, F_v)` with respect to `y_[0,3]`.
///
/// Rows are `q¹…qⁿ, v¹…vⁿ`; columns follow [`full_columns`].
pub fn full_jacobian<T: StateMaps>(maps: &T, point: &Jet<f64>) -> Result<DMatrix<f64>, StructureError> {
    let columns = full_columns(point.channels());
    stacked_jacobian(maps, point, &columns)
}

/// The square Jacobian of `(F_q, F_v)` with respect to `y_[0, κ−1]`.
pub fn kappa_jacobian<T: StateMaps>(
    maps: &T,
    kappa: &MultiIndex,
    orders: &MultiIndex,
    point: &Jet<f64>,
) -> Result<DMatrix<f64>, StructureError> {
    check_kappa(kappa, orders, maps.dof())?;
    stacked_jacobian(maps, point, &kappa_columns(kappa))
}

/// `#κ = 2n` and `κ ≤ R`.
pub fn check_kappa(kappa: &MultiIndex, orders: &MultiIndex, dof: usize) -> Result<(), StructureError> {
    if kappa.weight() != 2 * dof {
        return Err(StructureError::KappaWeight {
            kappa: kappa.clone(),
            expected: 2 * dof,
        });
    }
    if !kappa.leq(orders)? {
        return Err(StructureError::KappaAboveOrders {
            kappa: kappa.clone(),
            orders: orders.clone(),
        });
    }
    Ok(())
}

pub(crate) fn stacked_jacobian<T: StateMaps>(
    maps: &T,
    point: &Jet<f64>,
    columns: &[JetVar],
) -> Result<DMatrix<f64>, StructureError> {
    let top = jet_jacobian(maps.configuration_map(), point, columns)?;
    let bottom = jet_jacobian(maps.velocity_map(), point, columns)?;
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), columns.len());
    out.rows_mut(0, top.nrows()).copy_from(&top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(&bottom);
    Ok(out)
}

pub fn is_regular(m: &DMatrix<f64>) -> bool {
    reciprocal_condition(m) > REGULARITY_RCOND
}
