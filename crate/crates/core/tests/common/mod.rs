//! Oracles shared by the integration tests. Nothing here calls into the
//! differentiation code under test.
#![allow(dead_code)]

use flatlin::flatmodel::{FlatModel, ProbeBox};
use flatlin::multijet::{Jet, JetVar, MultiIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fourth-order central difference of `f` in the jet variable `var`.
pub fn fd_partial(f: impl Fn(&Jet<f64>) -> Vec<f64>, p: &Jet<f64>, var: JetVar, h: f64) -> Vec<f64> {
    let at = |delta: f64| {
        let mut q = p.clone();
        let x = q[(var.channel, var.order)];
        q.set(var.channel, var.order, x + delta).unwrap();
        f(&q)
    };
    let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
    (0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
        .collect()
}

/// Fourth-order central difference of a scalar function of time.
pub fn fd_time(f: impl Fn(f64) -> Vec<f64>, t: f64, h: f64) -> Vec<f64> {
    let (p2, p1, m1, m2) = (f(t + 2.0 * h), f(t + h), f(t - h), f(t - 2.0 * h));
    (0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random jets of `shape` from the model's probe box that lie in its chart.
pub fn random_jets<M: FlatModel>(model: &M, shape: &MultiIndex, count: usize, seed: u64) -> Vec<Jet<f64>> {
    random_jets_in(model, &model.probe_box(), shape, count, seed)
}

pub fn random_jets_in<M: FlatModel>(
    model: &M,
    region: &ProbeBox,
    shape: &MultiIndex,
    count: usize,
    seed: u64,
) -> Vec<Jet<f64>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let jet = region.sample(shape, &mut r);
        if model.check_jet(&jet).is_ok() {
            out.push(jet);
        }
    }
    out
}

/// A smooth two-channel test trajectory with closed-form derivatives:
/// `yʲ(t) = aʲ + bʲ t + cʲ sin(ωʲ t + δʲ)`.
#[derive(Clone, Debug)]
pub struct SineTrajectory {
    pub offset: Vec<f64>,
    pub slope: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub frequency: Vec<f64>,
    pub phase: Vec<f64>,
}

impl SineTrajectory {
    pub fn vtol_like() -> Self {
        SineTrajectory {
            offset: vec![0.5, 1.0],
            slope: vec![0.1, -0.05],
            amplitude: vec![0.3, 0.2],
            frequency: vec![0.9, 1.3],
            phase: vec![0.2, -0.4],
        }
    }

    pub fn derivative(&self, j: usize, k: usize, t: f64) -> f64 {
        let (a, b, c, w, d) = (self.offset[j], self.slope[j], self.amplitude[j], self.frequency[j], self.phase[j]);
        let arg = w * t + d;
        let osc = c * w.powi(k as i32)
            * match k % 4 {
                0 => arg.sin(),
                1 => arg.cos(),
                2 => -arg.sin(),
                _ => -arg.cos(),
            };
        match k {
            0 => a + b * t + osc,
            1 => b + osc,
            _ => osc,
        }
    }

    pub fn jet(&self, t: f64, shape: &MultiIndex) -> Jet<f64> {
        let zero: Jet<f64> = Jet::zeros(shape.clone());
        zero.map(|var, _| self.derivative(var.channel, var.order, t))
    }
}

/// VTOL equations of motion written out by hand, independent of the model code.
pub fn vtol_accel(eps: f64, q: &[f64], u: &[f64]) -> [f64; 3] {
    let th = q[2];
    [
        eps * th.cos() * u[1] - th.sin() * u[0],
        th.cos() * u[0] + eps * th.sin() * u[1] - 1.0,
        u[1],
    ]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
