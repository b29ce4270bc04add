use serde::Serialize;

use super::{enumerate_kappa, KappaMode, KappaReport, ProbeSet, StructureError, TransformedMap};
use crate::flatmodel::{FlatModel, FlatSystem, ParameterizingMap, ZERO_PARTIAL_TOL};
use crate::multijet::{jet_partials, Jet, JetMap, MultiIndex};

/// Structural facts about a parameterizing map and its candidate chain lengths.
///
/// Serialized field names are part of the CLI's JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    #[serde(rename = "R")]
    pub orders: MultiIndex,
    /// `2 ≤ rʲ ≤ 4` for every channel.
    #[serde(rename = "thm1_bounds_ok")]
    pub order_bounds_ok: bool,
    /// 1-based channels `j` with `∂F^n_q̄/∂y^j_[2] ≢ 0`.
    #[serde(rename = "thm1_second_deriv_channels")]
    pub second_derivative_channels: Vec<usize>,
    pub candidates: Vec<KappaReport>,
}

impl StructureReport {
    pub fn equilibrium_regular(&self) -> Vec<&MultiIndex> {
        self.candidates
            .iter()
            .filter(|c| c.equilibrium_regular)
            .map(|c| &c.kappa)
            .collect()
    }

    pub fn generic_regular(&self) -> Vec<&MultiIndex> {
        self.candidates
            .iter()
            .filter(|c| c.generic_regular)
            .map(|c| &c.kappa)
            .collect()
    }
}

/// The individual structure checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureCheck {
    /// `2 ≤ R ≤ 4`.
    OrderBounds,
    /// `F^n_q̄` depends on `y^j_[2]` for at least one channel.
    SecondDerivativeDependence,
    /// Each such channel enters `F_v` at order 3.
    VelocityThirdOrder,
    /// Each such channel enters `F_u` at order 4.
    InputFourthOrder,
    /// `∂F^n_v̄/∂y_[2]` vanishes at rest jets.
    EquilibriumVanishing,
    /// Candidate chain lengths can be formed.
    Candidates,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub check: StructureCheck,
    pub detail: String,
}

/// Runs every structure check and classifies candidate `κ`.
///
/// Dependence checks use the generic probes (all probes if there are none);
/// the vanishing check uses the equilibrium probes. Any failed check is
/// returned as a [`StructureError::Violations`] naming it.
pub fn verify_structure<M: FlatModel>(
    sys: &FlatSystem<M>,
    map: &ParameterizingMap<M>,
    tmap: &TransformedMap<M>,
    probes: &ProbeSet,
    mode: KappaMode,
) -> Result<StructureReport, StructureError> {
    if probes.is_empty() {
        return Err(StructureError::NoProbes);
    }
    let n = sys.dof();
    let m = sys.inputs();
    let orders = map.orders().clone();
    let generic: Vec<&Jet<f64>> = if probes.generic.is_empty() {
        probes.all().collect()
    } else {
        probes.generic.iter().collect()
    };
    let mut violations = Vec::new();

    let order_bounds_ok = orders.orders().iter().all(|&r| (2..=4).contains(&r));
    if !order_bounds_ok {
        violations.push(Violation {
            check: StructureCheck::OrderBounds,
            detail: format!("R = {orders} is outside [2, 4]"),
        });
    }

    // max over probes of |∂F/∂y^j_[k]| for one output row of a map
    let peak = |map_partials: &dyn Fn(&Jet<f64>) -> Result<Vec<Jet<f64>>, StructureError>,
                rows: std::ops::Range<usize>,
                j: usize,
                k: usize|
     -> Result<f64, StructureError> {
        let mut best = 0.0f64;
        for p in &generic {
            let grads = map_partials(p)?;
            for g in &grads[rows.clone()] {
                best = best.max(g.get(j, k).map_or(0.0, f64::abs));
            }
        }
        Ok(best)
    };
    let tq = |p: &Jet<f64>| jet_partials(tmap.configuration(), p).map_err(StructureError::from);
    let fv = |p: &Jet<f64>| jet_partials(map.velocity(), p).map_err(StructureError::from);
    let fu = |p: &Jet<f64>| jet_partials(map.input(), p).map_err(StructureError::from);

    let mut second_derivative_channels = Vec::new();
    for j in 0..m {
        if peak(&tq, n - 1..n, j, 2)? > ZERO_PARTIAL_TOL {
            second_derivative_channels.push(j + 1);
        }
    }
    if second_derivative_channels.is_empty() {
        violations.push(Violation {
            check: StructureCheck::SecondDerivativeDependence,
            detail: "the last transformed coordinate depends on no second derivative".into(),
        });
    }
    for &label in &second_derivative_channels {
        let j = label - 1;
        if peak(&fv, 0..n, j, 3)? <= ZERO_PARTIAL_TOL {
            violations.push(Violation {
                check: StructureCheck::VelocityThirdOrder,
                detail: format!("F_v does not depend on y^{label}_[3]"),
            });
        }
        if map.input().arity().get(j) < 4 || peak(&fu, 0..m, j, 4)? <= ZERO_PARTIAL_TOL {
            violations.push(Violation {
                check: StructureCheck::InputFourthOrder,
                detail: format!("F_u does not depend on y^{label}_[4]"),
            });
        }
    }

    for (idx, p) in probes.equilibrium.iter().enumerate() {
        let grads = jet_partials(tmap.velocity(), p)?;
        let last = &grads[n - 1];
        for j in 0..m {
            let value = last.get(j, 2).map_or(0.0, f64::abs);
            if value >= ZERO_PARTIAL_TOL {
                violations.push(Violation {
                    check: StructureCheck::EquilibriumVanishing,
                    detail: format!(
                        "|dF^n_vbar/dy^{}_[2]| = {value:e} at equilibrium probe {idx}",
                        j + 1
                    ),
                });
            }
        }
    }

    let candidates = match enumerate_kappa(tmap, &orders, mode, probes) {
        Ok(c) => c,
        Err(e) => {
            violations.push(Violation {
                check: StructureCheck::Candidates,
                detail: e.to_string(),
            });
            Vec::new()
        }
    };

    if violations.is_empty() {
        Ok(StructureReport {
            orders,
            order_bounds_ok,
            second_derivative_channels,
            candidates,
        })
    } else {
        Err(StructureError::Violations(violations))
    }
}
