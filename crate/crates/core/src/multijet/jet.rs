use std::ops::Index;

use super::{JetError, MultiIndex, Scalar};

/// One jet coordinate `y^channel_[order]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub channel: usize,
    pub order: usize,
}

impl JetVar {
    pub fn new(channel: usize, order: usize) -> Self {
        JetVar { channel, order }
    }
}

/// Values of the flat output and its time derivatives.
///
/// Channel `j` stores `y^j_[0], …, y^j_[bʲ]` densely, where `B = shape()`.
/// Reading above `bʲ` is an error (or a panic through `Index`), never a
/// silent zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    shape: MultiIndex,
    offsets: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zeros(shape: MultiIndex) -> Self {
        Self::filled(shape, S::zero())
    }

    fn filled(shape: MultiIndex, value: S) -> Self {
        let mut offsets = Vec::with_capacity(shape.len());
        let mut total = 0;
        for &b in shape.orders() {
            offsets.push(total);
            total += b + 1;
        }
        Jet {
            shape,
            offsets,
            values: vec![value; total],
        }
    }

    /// Builds a jet from per-channel derivative lists; channel `j` must be non-empty.
    pub fn from_channels(channels: Vec<Vec<S>>) -> Result<Self, JetError> {
        let orders = channels
            .iter()
            .enumerate()
            .map(|(j, c)| c.len().checked_sub(1).ok_or(JetError::EmptyChannel(j)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut jet = Jet::zeros(MultiIndex::new(orders));
        jet.values = channels.into_iter().flatten().collect();
        Ok(jet)
    }

    /// The rest jet `(y_s, 0, …, 0)`.
    pub fn equilibrium(y_s: &[S], shape: MultiIndex) -> Result<Self, JetError> {
        if y_s.len() != shape.len() {
            return Err(JetError::ChannelMismatch {
                expected: shape.len(),
                found: y_s.len(),
            });
        }
        let mut jet = Jet::zeros(shape);
        for (j, &y) in y_s.iter().enumerate() {
            let at = jet.offsets[j];
            jet.values[at] = y;
        }
        Ok(jet)
    }

    pub fn shape(&self) -> &MultiIndex {
        &self.shape
    }

    pub fn channels(&self) -> usize {
        self.shape.len()
    }

    pub fn get(&self, channel: usize, order: usize) -> Result<S, JetError> {
        self.position(channel, order).map(|at| self.values[at])
    }

    pub fn set(&mut self, channel: usize, order: usize, value: S) -> Result<(), JetError> {
        let at = self.position(channel, order)?;
        self.values[at] = value;
        Ok(())
    }

    /// All stored values of one channel, lowest order first.
    pub fn channel(&self, channel: usize) -> &[S] {
        let start = self.offsets[channel];
        &self.values[start..start + self.shape.get(channel) + 1]
    }

    /// `y_[0]` for every channel.
    pub fn values_at_order(&self, order: usize) -> Result<Vec<S>, JetError> {
        (0..self.channels()).map(|j| self.get(j, order)).collect()
    }

    /// Whether every variable up to `arity` is stored.
    pub fn covers(&self, arity: &MultiIndex) -> bool {
        arity.leq(&self.shape).unwrap_or(false)
    }

    /// Copy keeping only orders up to `shape`.
    pub fn restrict(&self, shape: &MultiIndex) -> Result<Jet<S>, JetError> {
        if !self.covers(shape) {
            return Err(JetError::NotCovered {
                required: shape.clone(),
                available: self.shape.clone(),
            });
        }
        let mut out = Jet::zeros(shape.clone());
        for j in 0..shape.len() {
            for k in 0..=shape.get(j) {
                let at = out.offsets[j] + k;
                out.values[at] = self[(j, k)];
            }
        }
        Ok(out)
    }

    /// Applies `f` to every stored value, keeping the layout.
    pub fn map<T: Scalar>(&self, mut f: impl FnMut(JetVar, S) -> T) -> Jet<T> {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.channels() {
            for k in 0..=self.shape.get(j) {
                values.push(f(JetVar::new(j, k), self[(j, k)]));
            }
        }
        Jet {
            shape: self.shape.clone(),
            offsets: self.offsets.clone(),
            values,
        }
    }

    /// Iterates `(variable, value)` channel by channel, lowest order first.
    pub fn iter(&self) -> impl Iterator<Item = (JetVar, S)> + '_ {
        (0..self.channels()).flat_map(move |j| {
            (0..=self.shape.get(j)).map(move |k| (JetVar::new(j, k), self[(j, k)]))
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn position(&self, channel: usize, order: usize) -> Result<usize, JetError> {
        if channel >= self.channels() || order > self.shape.get(channel) {
            return Err(JetError::MissingVariable {
                channel,
                order,
                shape: self.shape.clone(),
            });
        }
        Ok(self.offsets[channel] + order)
    }
}

impl Jet<f64> {
    /// Largest absolute entry-wise difference; jets must share a shape.
    pub fn max_abs_diff(&self, other: &Jet<f64>) -> f64 {
        assert_eq!(self.shape, other.shape, "jet shapes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> Index<(usize, usize)> for Jet<S> {
    type Output = S;

    fn index(&self, (channel, order): (usize, usize)) -> &S {
        match self.position(channel, order) {
            Ok(at) => &self.values[at],
            Err(e) => panic!("{e}"),
        }
    }
}
