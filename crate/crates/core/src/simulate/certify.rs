use serde::{Deserialize, Serialize};

use super::{central_stencil, OracleOutput, SimulateError, Trace};
use crate::multijet::MultiIndex;

/// Pass bounds of an [`IOCertificate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bound on `max |φʲ(q(t)) − oracle yʲ(t)|`.
    pub chain: f64,
    /// Bound on `max |y^j_[κʲ](t) − wʲ(t)|` with finite-difference derivatives.
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            chain: 1e-5,
            derivative: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelCertificate {
    /// 1-based channel number.
    pub channel: usize,
    pub kappa: usize,
    pub derivative_deviation: f64,
    /// Absent when no oracle was supplied.
    pub chain_deviation: Option<f64>,
    /// Samples between stencil points.
    pub stencil_stride: usize,
    /// Samples excluded at each end of the trace.
    pub excluded: usize,
    pub pass: bool,
}

/// Numerical evidence that the closed loop behaves like `y^j_[κʲ] = wʲ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IOCertificate {
    pub channels: Vec<ChannelCertificate>,
    pub tolerances: Tolerances,
    pub pass: bool,
}

/// Stencil spacing in samples for the `derivative`-th derivative: the step
/// `h ≈ ε^(1/(k+4))` that balances fourth-order truncation against rounding,
/// rounded to a multiple of `dt`.
pub fn stencil_stride(derivative: usize, dt: f64) -> usize {
    let h = f64::EPSILON.powf(1.0 / (derivative as f64 + 4.0));
    ((h / dt).round() as usize).max(1)
}

/// Compares finite-difference derivatives of the recorded flat output with
/// the applied `w`, and the flat output with the chain oracle.
pub fn certify_io(
    trace: &Trace,
    kappa: &MultiIndex,
    oracle: Option<&OracleOutput>,
    tolerances: &Tolerances,
) -> Result<IOCertificate, SimulateError> {
    if kappa.len() != trace.inputs {
        return Err(SimulateError::Dimension {
            what: "kappa channels",
            expected: trace.inputs,
            found: kappa.len(),
        });
    }
    if let Some(o) = oracle {
        let aligned = o.time.len() == trace.len()
            && o.time.iter().zip(&trace.time).all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0));
        if !aligned {
            return Err(SimulateError::Dimension {
                what: "oracle samples",
                expected: trace.len(),
                found: o.time.len(),
            });
        }
    }
    let dt = trace.dt();
    let mut channels = Vec::with_capacity(kappa.len());
    for j in 0..kappa.len() {
        let k = kappa.get(j);
        let stencil = central_stencil(k)?;
        let stride = stencil_stride(k, dt);
        let width = 2 * stencil.half_width() * stride;
        let excluded = 2 * width;
        if trace.len() <= 2 * excluded {
            return Err(SimulateError::TraceTooShort {
                samples: trace.len(),
                needed: 2 * excluded,
            });
        }
        let y = trace.output(j);
        let w = trace.applied(j);
        let h = dt * stride as f64;
        let derivative_deviation = (excluded..trace.len() - excluded)
            .map(|i| stencil.apply(&y, i, stride, h) - w[i])
            .fold(0.0, worst);
        let chain_deviation = oracle.map(|o| {
            y.iter()
                .zip(&o.y[j])
                .map(|(a, b)| a - b)
                .fold(0.0, worst)
        });
        let pass = derivative_deviation < tolerances.derivative
            && chain_deviation.is_none_or(|d| d < tolerances.chain);
        channels.push(ChannelCertificate {
            channel: j + 1,
            kappa: k,
            derivative_deviation,
            chain_deviation,
            stencil_stride: stride,
            excluded,
            pass,
        });
    }
    Ok(IOCertificate {
        pass: channels.iter().all(|c| c.pass),
        channels,
        tolerances: tolerances.clone(),
    })
}

/// Running maximum of `|d|` that treats non-finite deviations as infinite.
fn worst(acc: f64, d: f64) -> f64 {
    if d.is_finite() {
        acc.max(d.abs())
    } else {
        f64::INFINITY
    }
}
