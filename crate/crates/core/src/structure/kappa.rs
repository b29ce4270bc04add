use serde::{Deserialize, Serialize};

use super::jacobian::{check_kappa, kappa_columns, stacked_jacobian, REGULARITY_RCOND};
use super::{ProbeSet, StateMaps, StructureError};
use crate::linalg::reciprocal_condition;
use crate::multijet::MultiIndex;

/// Which chain lengths to examine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaMode {
    /// `κʲ = 4` for one channel with `rʲ = 4`, `κ = 2` for all others.
    Canonical,
    /// Every `κ ≤ R` with `#κ = 2n`.
    Exhaustive,
}

/// Regularity of one candidate `κ` over a probe set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaReport {
    pub kappa: MultiIndex,
    /// `#κ = 2n`.
    pub weight_ok: bool,
    /// Regular at one or more generic probes.
    pub generic_regular: bool,
    /// Regular at every equilibrium probe (false when there are none).
    pub equilibrium_regular: bool,
    /// Worst condition number over the equilibrium probes, or the best over
    /// the generic probes when no equilibrium probes are given. Infinite when singular.
    pub condition_number: f64,
}

/// Candidate multi-indices in ascending lexicographic order.
pub fn kappa_candidates(orders: &MultiIndex, dof: usize, mode: KappaMode) -> Result<Vec<MultiIndex>, StructureError> {
    let m = orders.len();
    let mut out = match mode {
        KappaMode::Canonical => {
            let fourth: Vec<usize> = (0..m).filter(|&j| orders.get(j) == 4).collect();
            if fourth.is_empty() {
                return Err(StructureError::NoFourthOrderChannel(orders.clone()));
            }
            fourth
                .into_iter()
                .map(|j| MultiIndex::new((0..m).map(|i| if i == j { 4 } else { 2 }).collect()))
                .collect()
        }
        KappaMode::Exhaustive => {
            let mut acc = Vec::new();
            let mut current = Vec::with_capacity(m);
            bounded_compositions(orders.orders(), 2 * dof, &mut current, &mut acc);
            acc
        }
    };
    out.sort();
    Ok(out)
}

fn bounded_compositions(bounds: &[usize], remaining: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let Some((&bound, rest)) = bounds.split_first() else {
        if remaining == 0 {
            out.push(MultiIndex::new(current.clone()));
        }
        return;
    };
    let rest_capacity: usize = rest.iter().sum();
    for k in 0..=bound.min(remaining) {
        if remaining - k > rest_capacity {
            continue;
        }
        current.push(k);
        bounded_compositions(rest, remaining - k, current, out);
        current.pop();
    }
}

/// Classifies every candidate `κ` by the regularity of its square Jacobian.
pub fn enumerate_kappa<T: StateMaps>(
    maps: &T,
    orders: &MultiIndex,
    mode: KappaMode,
    probes: &ProbeSet,
) -> Result<Vec<KappaReport>, StructureError> {
    if probes.is_empty() {
        return Err(StructureError::NoProbes);
    }
    let dof = maps.dof();
    kappa_candidates(orders, dof, mode)?
        .into_iter()
        .map(|kappa| {
            check_kappa(&kappa, orders, dof)?;
            let columns = kappa_columns(&kappa);
            let rcond_at = |jets: &[crate::multijet::Jet<f64>]| {
                jets.iter()
                    .map(|p| stacked_jacobian(maps, p, &columns).map(|m| reciprocal_condition(&m)))
                    .collect::<Result<Vec<_>, _>>()
            };
            let eq = rcond_at(&probes.equilibrium)?;
            let generic = rcond_at(&probes.generic)?;
            let worst_eq = eq.iter().copied().fold(f64::INFINITY, f64::min);
            let best_generic = generic.iter().copied().fold(0.0, f64::max);
            let rcond = if eq.is_empty() { best_generic } else { worst_eq };
            Ok(KappaReport {
                weight_ok: kappa.weight() == 2 * dof,
                generic_regular: best_generic > REGULARITY_RCOND,
                equilibrium_regular: !eq.is_empty() && worst_eq > REGULARITY_RCOND,
                condition_number: if rcond > 0.0 { 1.0 / rcond } else { f64::INFINITY },
                kappa,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_candidates() {
        let r = MultiIndex::from([4, 4]);
        let c = kappa_candidates(&r, 3, KappaMode::Canonical).unwrap();
        assert_eq!(c, vec![MultiIndex::from([2, 4]), MultiIndex::from([4, 2])]);
        let r = MultiIndex::from([4, 3, 2]);
        let c = kappa_candidates(&r, 4, KappaMode::Canonical).unwrap();
        assert_eq!(c, vec![MultiIndex::from([4, 2, 2])]);
        assert!(kappa_candidates(&MultiIndex::from([3, 3]), 3, KappaMode::Canonical).is_err());
    }

    #[test]
    fn exhaustive_candidates() {
        let r = MultiIndex::from([4, 4]);
        let c = kappa_candidates(&r, 3, KappaMode::Exhaustive).unwrap();
        assert_eq!(
            c,
            vec![MultiIndex::from([2, 4]), MultiIndex::from([3, 3]), MultiIndex::from([4, 2])]
        );
        let r = MultiIndex::from([4, 4, 4]);
        let c = kappa_candidates(&r, 4, KappaMode::Exhaustive).unwrap();
        // compositions of 8 into 3 parts bounded by 4: 15
        assert_eq!(c.len(), 15);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert!(c.iter().all(|k| k.weight() == 8));
    }
}
