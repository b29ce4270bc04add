use nalgebra::{DMatrix, DVector};

use super::SimulateError;

/// Central finite-difference weights on the offsets `−p, …, p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub derivative: usize,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// Half-width `p` in samples.
    pub fn half_width(&self) -> usize {
        self.weights.len() / 2
    }

    /// Derivative at sample `i` of `samples` spaced `h` apart, reading every
    /// `stride`-th sample.
    pub fn apply(&self, samples: &[f64], i: usize, stride: usize, h: f64) -> f64 {
        let p = self.half_width();
        let sum: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * samples[i + k * stride - p * stride])
            .sum();
        sum / h.powi(self.derivative as i32)
    }
}

/// Fourth-order accurate central stencil for the `derivative`-th derivative.
pub fn central_stencil(derivative: usize) -> Result<Stencil, SimulateError> {
    if derivative == 0 || derivative > 6 {
        return Err(SimulateError::Stencil { derivative, order: 4 });
    }
    let p = derivative.div_ceil(2) + 1;
    let n = 2 * p + 1;
    let offsets: Vec<f64> = (0..n).map(|i| i as f64 - p as f64).collect();
    let vandermonde = DMatrix::from_fn(n, n, |m, i| offsets[i].powi(m as i32));
    let factorial: f64 = (1..=derivative).map(|x| x as f64).product();
    let rhs = DVector::from_fn(n, |m, _| if m == derivative { factorial } else { 0.0 });
    let weights = vandermonde
        .lu()
        .solve(&rhs)
        .ok_or(SimulateError::Stencil { derivative, order: 4 })?;
    Ok(Stencil {
        derivative,
        weights: weights.iter().copied().collect(),
    })
}
