use std::ops::Deref;

use crate::multijet::{Jet, JetError, MultiIndex};

/// The new input and its derivatives, `wʲ_[0, rʲ−κʲ]` per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct WJets(Jet<f64>);

impl WJets {
    pub fn zeros(shape: MultiIndex) -> Self {
        WJets(Jet::zeros(shape))
    }

    pub fn from_channels(channels: Vec<Vec<f64>>) -> Result<Self, JetError> {
        Jet::from_channels(channels).map(WJets)
    }

    pub fn from_jet(jet: Jet<f64>) -> Self {
        WJets(jet)
    }

    pub fn jet(&self) -> &Jet<f64> {
        &self.0
    }

    pub fn set(&mut self, channel: usize, order: usize, value: f64) -> Result<(), JetError> {
        self.0.set(channel, order, value)
    }

    /// `(w¹_[0], …, wᵐ_[0])`.
    pub fn values(&self) -> Vec<f64> {
        (0..self.0.channels()).map(|j| self.0[(j, 0)]).collect()
    }
}

impl Deref for WJets {
    type Target = Jet<f64>;

    fn deref(&self) -> &Jet<f64> {
        &self.0
    }
}
