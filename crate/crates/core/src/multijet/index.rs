use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::JetError;

/// Per-channel derivative orders `(a¹, …, aᵐ)`.
///
/// Used for the minimal orders `R` of a parameterizing map, the chain
/// lengths `κ`, and differences such as `R − κ`. Arithmetic is component-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(orders: Vec<usize>) -> Self {
        MultiIndex(orders)
    }

    /// Every channel set to `order`.
    pub fn uniform(channels: usize, order: usize) -> Self {
        MultiIndex(vec![order; channels])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn orders(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, channel: usize) -> usize {
        self.0[channel]
    }

    /// Sum of all entries, `#A`.
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// `A ≤ B` component-wise.
    pub fn leq(&self, other: &MultiIndex) -> Result<bool, JetError> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex, JetError> {
        self.check_len(other)?;
        Ok(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// `A − B`; fails if any entry would become negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Result<MultiIndex, JetError> {
        self.check_len(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
            .ok_or_else(|| JetError::NegativeOrder {
                lhs: self.clone(),
                rhs: other.clone(),
            })
    }

    /// Adds `k` to every channel.
    pub fn shifted_up(&self, k: usize) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| a + k).collect())
    }

    /// Subtracts `k` from every channel, `None` if an entry is below `k`.
    pub fn shifted_down(&self, k: usize) -> Option<MultiIndex> {
        self.0.iter().map(|a| a.checked_sub(k)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    /// Component-wise maximum.
    pub fn max(&self, other: &MultiIndex) -> Result<MultiIndex, JetError> {
        self.check_len(other)?;
        Ok(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect()))
    }

    fn check_len(&self, other: &MultiIndex) -> Result<(), JetError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(JetError::ChannelMismatch {
                expected: self.len(),
                found: other.len(),
            })
        }
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(orders: Vec<usize>) -> Self {
        MultiIndex(orders)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(orders: [usize; N]) -> Self {
        MultiIndex(orders.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Parses `"4,2"` or `"(4, 2)"`.
impl FromStr for MultiIndex {
    type Err = JetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|part| part.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex)
            .map_err(|_| JetError::Parse(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison() {
        let a = MultiIndex::from([2, 2]);
        let b = MultiIndex::from([4, 4]);
        assert!(a.leq(&b).unwrap());
        assert!(!MultiIndex::from([4, 2]).leq(&MultiIndex::from([2, 4])).unwrap());
        assert!(b.leq(&b).unwrap());
        assert!(a.leq(&MultiIndex::from([1, 2, 3])).is_err());
    }

    #[test]
    fn weight() {
        assert_eq!(MultiIndex::from([4, 2]).weight(), 6);
        assert_eq!(MultiIndex::from([0, 0]).weight(), 0);
        assert_eq!(MultiIndex::from([2, 2, 2]).weight(), 6);
    }

    #[test]
    fn arithmetic() {
        let r = MultiIndex::from([4, 4]);
        let k = MultiIndex::from([4, 2]);
        assert_eq!(r.checked_sub(&k).unwrap(), MultiIndex::from([0, 2]));
        assert!(k.checked_sub(&r).is_err());
        assert_eq!(k.checked_add(&k).unwrap(), MultiIndex::from([8, 4]));
        assert_eq!(k.shifted_down(3), None);
        assert_eq!(k.shifted_down(1), Some(MultiIndex::from([3, 1])));
    }

    #[test]
    fn parse_and_display() {
        let k: MultiIndex = "4,2".parse().unwrap();
        assert_eq!(k, MultiIndex::from([4, 2]));
        assert_eq!(k.to_string(), "(4,2)");
        assert_eq!("(2, 4)".parse::<MultiIndex>().unwrap(), MultiIndex::from([2, 4]));
        assert!("4,x".parse::<MultiIndex>().is_err());
    }
}
