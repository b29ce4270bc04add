use super::{transform_map, verify_structure, KappaMode, ProbeConfig, ProbeSet, StructureError, StructureReport, TransformedMap};
use crate::flatmodel::{FlatModel, FlatSystem, ParameterizingMap};

/// Everything derived from a model for structural analysis and feedback synthesis.
#[derive(Clone, Debug)]
pub struct Analysis<M> {
    pub system: FlatSystem<M>,
    pub map: ParameterizingMap<M>,
    pub transformed: TransformedMap<M>,
    pub probes: ProbeSet,
}

impl<M: FlatModel> Analysis<M> {
    /// Samples probes, derives the parameterizing map on them and transforms it.
    pub fn new(model: M, config: &ProbeConfig) -> Result<Self, StructureError> {
        let system = FlatSystem::new(model)?;
        let probes = ProbeSet::sample(&system, config)?;
        let jets: Vec<_> = probes.all().cloned().collect();
        let map = ParameterizingMap::derive(&system, &jets)?;
        let transformed = transform_map(&system, &map);
        Ok(Analysis {
            system,
            map,
            transformed,
            probes,
        })
    }

    pub fn report(&self, mode: KappaMode) -> Result<StructureReport, StructureError> {
        verify_structure(&self.system, &self.map, &self.transformed, &self.probes, mode)
    }
}
