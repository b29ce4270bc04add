use super::{step_count, ControlSample, Controller, SimulateError, Trace};
use crate::flatmodel::FlatModel;

/// Increment `x(t + dt) − x(t)` of one classic fourth-order Runge–Kutta step of `ẋ = f(t, x)`.
pub fn rk4_increment<E>(
    mut f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    t: f64,
    x: &[f64],
    dt: f64,
) -> Result<Vec<f64>, E> {
    let shift = |k: &[f64], a: f64| -> Vec<f64> { x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect() };
    let k1 = f(t, x)?;
    let k2 = f(t + 0.5 * dt, &shift(&k1, 0.5 * dt))?;
    let k3 = f(t + 0.5 * dt, &shift(&k2, 0.5 * dt))?;
    let k4 = f(t + dt, &shift(&k3, dt))?;
    Ok((0..x.len())
        .map(|i| dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// One classic fourth-order Runge–Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<E>(
    f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    t: f64,
    x: &[f64],
    dt: f64,
) -> Result<Vec<f64>, E> {
    let dx = rk4_increment(f, t, x, dt)?;
    Ok(x.iter().zip(dx).map(|(a, b)| a + b).collect())
}

/// A state accumulated with compensated (Kahan) summation, so rounding does
/// not build up over many small steps.
#[derive(Clone, Debug)]
pub(crate) struct CompensatedState {
    pub x: Vec<f64>,
    carry: Vec<f64>,
}

impl CompensatedState {
    pub fn new(x: Vec<f64>) -> Self {
        let carry = vec![0.0; x.len()];
        CompensatedState { x, carry }
    }

    pub fn add(&mut self, dx: &[f64]) {
        for ((x, c), d) in self.x.iter_mut().zip(&mut self.carry).zip(dx) {
            let y = d - *c;
            let sum = *x + y;
            *c = (sum - *x) - y;
            *x = sum;
        }
    }
}

/// Integrates `q̇ = v`, `v̇ = f(q, v, u(t, q, v))` with fixed-step RK4.
///
/// The integrated state is exactly `(q, v)`; the controller is evaluated at
/// every stage. Samples are recorded at the grid points `0, dt, …, duration`.
pub fn simulate_closed_loop<M: FlatModel, C: Controller>(
    model: &M,
    controller: &mut C,
    q0: &[f64],
    v0: &[f64],
    duration: f64,
    dt: f64,
) -> Result<Trace, SimulateError> {
    let n = model.dof();
    for (what, x) in [("initial configuration", q0), ("initial velocity", v0)] {
        if x.len() != n {
            return Err(SimulateError::Dimension {
                what,
                expected: n,
                found: x.len(),
            });
        }
    }
    let steps = step_count(duration, dt)?;
    let mut state = CompensatedState::new(q0.iter().chain(v0).copied().collect());
    let mut trace = Trace::new(n, n - 1, state.x.len());

    for step in 0..=steps {
        let t = step as f64 * dt;
        let (k1, sample) = evaluate(model, controller, t, &state.x)?;
        let (q, v) = state.x.split_at(n);
        trace.time.push(t);
        trace.q.push(q.to_vec());
        trace.v.push(v.to_vec());
        trace.y.push(model.flat_output(q));
        trace.u.push(sample.u);
        trace.w.push(sample.w);
        trace.iterations.push(sample.iterations);
        trace.residual.push(sample.residual);
        if step == steps {
            break;
        }
        // k1 is the sample just recorded
        let mut first = Some(k1);
        let dx = rk4_increment(
            |ts, xs| match first.take() {
                Some(k) => Ok(k),
                None => evaluate(model, controller, ts, xs).map(|(k, _)| k),
            },
            t,
            &state.x,
            dt,
        )?;
        state.add(&dx);
        debug_assert_eq!(state.x.len(), 2 * n);
    }
    Ok(trace)
}

fn evaluate<M: FlatModel, C: Controller>(
    model: &M,
    controller: &mut C,
    t: f64,
    x: &[f64],
) -> Result<(Vec<f64>, ControlSample), SimulateError> {
    let (q, v) = x.split_at(model.dof());
    let sample = controller
        .control(t, q, v)
        .map_err(|source| SimulateError::Feedback { time: t, source })?;
    let acc = model.dynamics(q, v, &sample.u);
    Ok((v.iter().copied().chain(acc).collect(), sample))
}

