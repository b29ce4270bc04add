use super::{FlatModel, GantryCrane, ModelError, Parameter, Vtol};

/// Built-in models, looked up by name.
#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinModel {
    Vtol(Vtol),
    GantryCrane(GantryCrane),
}

impl BuiltinModel {
    pub const NAMES: [&'static str; 2] = ["vtol", "gantry-crane"];

    pub fn from_name(name: &str) -> Result<Self, ModelError> {
        match name {
            "vtol" => Ok(BuiltinModel::Vtol(Vtol::default())),
            "gantry-crane" => Ok(BuiltinModel::GantryCrane(GantryCrane::default())),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinModel::Vtol(m) => m.name(),
            BuiltinModel::GantryCrane(m) => m.name(),
        }
    }

    pub fn parameters(&self) -> Vec<Parameter> {
        match self {
            BuiltinModel::Vtol(m) => m.parameters(),
            BuiltinModel::GantryCrane(m) => m.parameters(),
        }
    }

    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        match self {
            BuiltinModel::Vtol(m) => m.set_parameter(name, value),
            BuiltinModel::GantryCrane(m) => m.set_parameter(name, value),
        }
    }

    pub fn nominal_equilibrium(&self) -> Vec<f64> {
        match self {
            BuiltinModel::Vtol(m) => m.nominal_equilibrium(),
            BuiltinModel::GantryCrane(m) => m.nominal_equilibrium(),
        }
    }
}
