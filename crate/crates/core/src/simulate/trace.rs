use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::SimulateError;

/// Closed-loop samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub dof: usize,
    pub inputs: usize,
    /// Length of the state vector handed to the integrator.
    pub integrated_states: usize,
    pub time: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    /// Flat output `φ(q)`.
    pub y: Vec<Vec<f64>>,
    /// Applied new input `w_[0]`.
    pub w: Vec<Vec<f64>>,
    pub iterations: Vec<usize>,
    pub residual: Vec<f64>,
}

/// Solver statistics of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub samples: usize,
    pub integrated_states: usize,
    pub max_iterations: usize,
    pub mean_iterations: f64,
    pub max_residual: f64,
}

impl Trace {
    pub(crate) fn new(dof: usize, inputs: usize, integrated_states: usize) -> Self {
        Trace {
            dof,
            inputs,
            integrated_states,
            time: Vec::new(),
            q: Vec::new(),
            v: Vec::new(),
            u: Vec::new(),
            y: Vec::new(),
            w: Vec::new(),
            iterations: Vec::new(),
            residual: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Grid spacing.
    pub fn dt(&self) -> f64 {
        match self.time.len() {
            0 | 1 => 0.0,
            n => (self.time[n - 1] - self.time[0]) / (n - 1) as f64,
        }
    }

    /// Samples of the flat output channel `j`.
    pub fn output(&self, j: usize) -> Vec<f64> {
        self.y.iter().map(|y| y[j]).collect()
    }

    pub fn applied(&self, j: usize) -> Vec<f64> {
        self.w.iter().map(|w| w[j]).collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        for (prefix, count) in [("q", self.dof), ("v", self.dof), ("u", self.inputs), ("y", self.inputs), ("w", self.inputs)] {
            h.extend((1..=count).map(|i| format!("{prefix}{i}")));
        }
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimulateError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(self.header())?;
        for i in 0..self.len() {
            let row = std::iter::once(self.time[i])
                .chain(self.q[i].iter().copied())
                .chain(self.v[i].iter().copied())
                .chain(self.u[i].iter().copied())
                .chain(self.y[i].iter().copied())
                .chain(self.w[i].iter().copied());
            writer.write_record(row.map(|x| format!("{x:e}")))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), SimulateError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            samples: self.len(),
            integrated_states: self.integrated_states,
            max_iterations: self.iterations.iter().copied().max().unwrap_or(0),
            mean_iterations: if self.is_empty() {
                0.0
            } else {
                self.iterations.iter().sum::<usize>() as f64 / self.len() as f64
            },
            max_residual: self.residual.iter().copied().fold(0.0, f64::max),
        }
    }
}
