use serde::{Deserialize, Serialize};

use super::SimulateError;

/// A flat-output reference with analytic derivatives of any order.
pub trait ReferenceSignal {
    fn channels(&self) -> usize;

    /// `d^k yʲ_d / dt^k` at `t`.
    fn derivative(&self, channel: usize, order: usize, t: f64) -> f64;

    fn value(&self, t: f64) -> Vec<f64> {
        (0..self.channels()).map(|j| self.derivative(j, 0, t)).collect()
    }
}

/// Coefficients of `s(τ) = 126τ⁵ − 420τ⁶ + 540τ⁷ − 315τ⁸ + 70τ⁹`, the degree-9
/// polynomial with `s(0) = 0`, `s(1) = 1` and derivatives 1 to 4 zero at both ends.
const REST_TO_REST: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0];

/// Per-channel transition `y_start → y_end` over `[0, T]`, constant outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestToRest {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub duration: f64,
}

pub fn plan_rest_to_rest(start: &[f64], end: &[f64], duration: f64) -> Result<RestToRest, SimulateError> {
    if start.len() != end.len() {
        return Err(SimulateError::Dimension {
            what: "rest-to-rest end point",
            expected: start.len(),
            found: end.len(),
        });
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(SimulateError::Grid(format!("transition time must be positive, got {duration}")));
    }
    Ok(RestToRest {
        start: start.to_vec(),
        end: end.to_vec(),
        duration,
    })
}

/// `k`-th derivative of the normalized transition at `tau ∈ [0, 1]`.
///
/// Uses `s(τ) = 1 − s(1 − τ)` on the upper half so both endpoints are
/// evaluated from the flat end of the polynomial.
fn shape_derivative(order: usize, tau: f64) -> f64 {
    if tau <= 0.5 {
        return polynomial_derivative(order, tau);
    }
    let mirrored = polynomial_derivative(order, 1.0 - tau);
    match order {
        0 => 1.0 - mirrored,
        k if k % 2 == 1 => mirrored,
        _ => -mirrored,
    }
}

fn polynomial_derivative(order: usize, tau: f64) -> f64 {
    let mut acc = 0.0;
    for p in (order..REST_TO_REST.len()).rev() {
        let falling: f64 = ((p - order + 1)..=p).map(|x| x as f64).product();
        acc = acc * tau + REST_TO_REST[p] * falling;
    }
    acc
}

impl ReferenceSignal for RestToRest {
    fn channels(&self) -> usize {
        self.start.len()
    }

    fn derivative(&self, channel: usize, order: usize, t: f64) -> f64 {
        let (a, b, duration) = (self.start[channel], self.end[channel], self.duration);
        let tau = t / duration;
        if order == 0 {
            return a + (b - a) * shape_derivative(0, tau.clamp(0.0, 1.0));
        }
        if !(0.0..=1.0).contains(&tau) {
            return 0.0;
        }
        (b - a) * shape_derivative(order, tau) / duration.powi(order as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_shape() {
        assert_eq!(shape_derivative(0, 0.0), 0.0);
        assert!((shape_derivative(0, 1.0) - 1.0).abs() < 1e-12);
        assert!((shape_derivative(0, 0.5) - 0.5).abs() < 1e-15);
        for k in 1..=4 {
            assert_eq!(shape_derivative(k, 0.0), 0.0);
            assert_eq!(shape_derivative(k, 1.0), 0.0);
        }
        assert!((shape_derivative(9, 0.3) - 70.0 * 362880.0).abs() < 1e-6);
        // the mirrored branch agrees with direct evaluation
        for k in 0..=9 {
            for &tau in &[0.6, 0.8, 0.95] {
                let a = shape_derivative(k, tau);
                let b = polynomial_derivative(k, tau);
                assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "k={k} tau={tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivatives_are_consistent() {
        let r = plan_rest_to_rest(&[0.0], &[3.0], 2.0).unwrap();
        let h = 1e-4;
        for k in 0..6 {
            for &t in &[0.3, 1.0, 1.7] {
                let fd = (r.derivative(0, k, t + h) - r.derivative(0, k, t - h)) / (2.0 * h);
                let exact = r.derivative(0, k + 1, t);
                assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "order {k} at {t}");
            }
        }
    }
}
