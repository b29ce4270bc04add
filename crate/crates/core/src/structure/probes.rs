use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::flatmodel::{FlatModel, FlatSystem, ProbeBox};
use crate::multijet::{Jet, MultiIndex};

/// Number of generic probes drawn when nothing else is configured.
pub const DEFAULT_GENERIC_PROBES: usize = 16;

const MAX_REJECTIONS: usize = 10_000;

/// Where to evaluate regularity: rest jets `(y_s, 0, …, 0)` and random jets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Rest values `y_s`; empty means none.
    pub equilibria: Vec<Vec<f64>>,
    pub region: ProbeBox,
    pub generic_count: usize,
    pub seed: u64,
}

impl ProbeConfig {
    /// Nominal equilibrium, the model's probe box, 16 generic probes.
    pub fn for_model<M: FlatModel>(model: &M, seed: u64) -> Self {
        ProbeConfig {
            equilibria: vec![model.nominal_equilibrium()],
            region: model.probe_box(),
            generic_count: DEFAULT_GENERIC_PROBES,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub equilibrium: Vec<Jet<f64>>,
    pub generic: Vec<Jet<f64>>,
}

impl ProbeSet {
    /// Probe jets of shape `arity(F_q) + 2`, enough for every map in the analysis.
    pub fn sample<M: FlatModel>(sys: &FlatSystem<M>, config: &ProbeConfig) -> Result<Self, StructureError> {
        let model = sys.model();
        let shape = model.configuration_arity().shifted_up(2);
        let m = sys.inputs();
        if config.region.position.len() != m {
            return Err(StructureError::ProbeRegion(format!(
                "expected {m} position ranges, found {}",
                config.region.position.len()
            )));
        }
        let equilibrium = config
            .equilibria
            .iter()
            .map(|y_s| {
                let jet = Jet::equilibrium(y_s, shape.clone())?;
                model.check_jet(&jet)?;
                Ok(jet)
            })
            .collect::<Result<Vec<_>, StructureError>>()?;
        let generic = sample_generic(model, &config.region, &shape, config.generic_count, config.seed)?;
        Ok(ProbeSet { equilibrium, generic })
    }

    pub fn all(&self) -> impl Iterator<Item = &Jet<f64>> {
        self.equilibrium.iter().chain(&self.generic)
    }

    pub fn is_empty(&self) -> bool {
        self.equilibrium.is_empty() && self.generic.is_empty()
    }
}

/// Rejection-samples `count` in-chart jets from `region`, reproducibly from `seed`.
pub fn sample_generic<M: FlatModel>(
    model: &M,
    region: &ProbeBox,
    shape: &MultiIndex,
    count: usize,
    seed: u64,
) -> Result<Vec<Jet<f64>>, StructureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let jet = region.sample(shape, &mut rng);
        if model.check_jet(&jet).is_ok() {
            out.push(jet);
        } else {
            rejected += 1;
            if rejected > MAX_REJECTIONS {
                return Err(StructureError::ProbeRegion(
                    "probe region lies (almost) entirely outside the chart".into(),
                ));
            }
        }
    }
    Ok(out)
}
