mod common;

use common::*;
use flatlin::flatmodel::*;
use flatlin::multijet::{jet_partials, Jet, JetMap, JetVar, MultiIndex, Scalar};

fn vtol() -> (FlatSystem<Vtol>, ParameterizingMap<Vtol>) {
    let sys = FlatSystem::new(Vtol::default()).unwrap();
    let probes = random_jets(sys.model(), &MultiIndex::from([4, 4]), 32, 1);
    let map = ParameterizingMap::derive(&sys, &probes).unwrap();
    (sys, map)
}

fn crane() -> (FlatSystem<GantryCrane>, ParameterizingMap<GantryCrane>) {
    let sys = FlatSystem::new(GantryCrane::default()).unwrap();
    let probes = random_jets(sys.model(), &MultiIndex::from([4, 4]), 1000, 2);
    let map = ParameterizingMap::derive(&sys, &probes).unwrap();
    (sys, map)
}

#[test]
fn vtol_orders_are_four_four() {
    let (_, map) = vtol();
    assert_eq!(map.orders(), &MultiIndex::from([4, 4]));
}

#[test]
fn crane_orders_from_dense_probe() {
    // Frozen from probing 1000 random chart points.
    let (_, map) = crane();
    assert_eq!(map.orders(), &MultiIndex::from([4, 4]));
}

#[test]
fn velocity_of_coordinate_channel_is_next_order() {
    // q̄¹ = y¹ for both built-ins composes to F_v¹ whose only order-3 partial is θ-driven;
    // the flat output channel itself prolongs to y¹_[1].
    let (sys, map) = vtol();
    let jet = random_jets(sys.model(), &MultiIndex::from([4, 4]), 1, 3).remove(0);
    let q = map.configuration().eval(&jet).unwrap();
    let v = map.velocity().eval(&jet).unwrap();
    let y = sys.model().flat_output(&q);
    assert!((y[0] - jet[(0, 0)]).abs() < 1e-12);
    // d/dt φ(q) = ∂φ/∂q · v must equal y_[1].
    let th = q[2];
    let eps = sys.model().epsilon;
    let ydot = [v[0] - eps * th.cos() * v[2], v[1] - eps * th.sin() * v[2]];
    assert!((ydot[0] - jet[(0, 1)]).abs() < 1e-12);
    assert!((ydot[1] - jet[(1, 1)]).abs() < 1e-12);
}

#[test]
fn constant_configuration_has_zero_velocity() {
    #[derive(Clone)]
    struct Frozen;
    impl flatlin::multijet::JetMap for Frozen {
        fn dim(&self) -> usize {
            2
        }
        fn arity(&self) -> MultiIndex {
            MultiIndex::from([1, 1])
        }
        fn eval_unchecked<S: Scalar>(&self, _jet: &Jet<S>) -> Vec<S> {
            vec![S::from_f64(1.5), S::from_f64(-2.0)]
        }
    }
    let d = flatlin::multijet::prolong(Frozen);
    let jet = Jet::from_channels(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
    assert_eq!(d.eval(&jet).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn vtol_velocity_matches_time_derivative_along_trajectory() {
    let (_, map) = vtol();
    let traj = SineTrajectory::vtol_like();
    let shape = MultiIndex::from([4, 4]);
    for &t in &[0.0, 0.7, 2.3] {
        let fd = fd_time(|s| map.configuration().eval(&traj.jet(s, &shape)).unwrap(), t, 1e-3);
        let v = map.velocity().eval(&traj.jet(t, &shape)).unwrap();
        for (a, b) in fd.iter().zip(&v) {
            assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn vtol_hover_input() {
    let (sys, map) = vtol();
    let eq = find_equilibrium(&sys, &map, &[0.0, sys.model().epsilon]).unwrap();
    assert!(max_abs_diff(&eq.q_s, &[0.0, 0.0, 0.0]) < 1e-15);
    assert!(max_abs_diff(&eq.u_s, &[1.0, 0.0]) < 1e-14);
}

#[test]
fn vtol_equilibrium_is_translation_invariant() {
    let (sys, map) = vtol();
    let eq = find_equilibrium(&sys, &map, &[5.0, sys.model().epsilon]).unwrap();
    assert!(max_abs_diff(&eq.q_s, &[5.0, 0.0, 0.0]) < 1e-15);
    assert!(max_abs_diff(&eq.u_s, &[1.0, 0.0]) < 1e-14);
}

#[test]
fn crane_equilibrium_and_chart() {
    let (sys, map) = crane();
    let eq = find_equilibrium(&sys, &map, &[0.4, 1.5]).unwrap();
    assert!(max_abs_diff(&eq.q_s, &[0.4, 1.5, 0.0]) < 1e-14);
    let weight = sys.model().load_mass * sys.model().gravity;
    assert!(max_abs_diff(&eq.u_s, &[0.0, -weight]) < 1e-12);
    assert!(matches!(
        find_equilibrium(&sys, &map, &[0.0, 0.0]),
        Err(ModelError::OutsideChart(_))
    ));
    assert!(find_equilibrium(&sys, &map, &[0.0, -1.0]).is_err());
}

#[test]
fn vtol_input_depends_only_on_orders_two_to_four() {
    let (sys, map) = vtol();
    for jet in random_jets(sys.model(), &MultiIndex::from([4, 4]), 20, 4) {
        for grad in jet_partials(map.input(), &jet).unwrap() {
            for (var, value) in grad.iter() {
                if var.order < 2 {
                    assert!(value.abs() < 1e-12, "u depends on {var:?}");
                }
            }
        }
    }
}

#[test]
fn degenerate_system_rejected() {
    #[derive(Clone)]
    struct DoubleIntegrator;
    impl FlatModel for DoubleIntegrator {
        fn name(&self) -> &'static str {
            "double-integrator"
        }
        fn dof(&self) -> usize {
            1
        }
        fn parameters(&self) -> Vec<Parameter> {
            vec![]
        }
        fn set_parameter(&mut self, name: &str, _: f64) -> Result<(), ModelError> {
            Err(ModelError::UnknownParameter(name.into()))
        }
        fn drift<S: Scalar>(&self, _: &[S], _: &[S]) -> Vec<S> {
            vec![S::zero()]
        }
        fn input_matrix<S: Scalar>(&self, _: &[S]) -> Vec<Vec<S>> {
            vec![vec![]]
        }
        fn flat_output<S: Scalar>(&self, _: &[S]) -> Vec<S> {
            vec![]
        }
        fn completion<S: Scalar>(&self, q: &[S]) -> S {
            q[0]
        }
        fn configuration_arity(&self) -> MultiIndex {
            MultiIndex::new(vec![])
        }
        fn configuration<S: Scalar>(&self, _: &Jet<S>) -> Vec<S> {
            vec![S::zero()]
        }
        fn nominal_equilibrium(&self) -> Vec<f64> {
            vec![]
        }
        fn probe_box(&self) -> ProbeBox {
            ProbeBox {
                position: vec![],
                derivative_half_width: vec![],
            }
        }
    }
    assert!(matches!(
        FlatSystem::new(DoubleIntegrator),
        Err(ModelError::NotMinimallyUnderactuated { dof: 1 })
    ));
}

#[test]
fn minimal_orders_detects_unused_second_derivative() {
    // Declares (2, 2) but only reads y²_[0]: r² must be 2.
    #[derive(Clone)]
    struct Lazy(Vtol);
    impl FlatModel for Lazy {
        fn name(&self) -> &'static str {
            "lazy"
        }
        fn dof(&self) -> usize {
            3
        }
        fn parameters(&self) -> Vec<Parameter> {
            vec![]
        }
        fn set_parameter(&mut self, name: &str, _: f64) -> Result<(), ModelError> {
            Err(ModelError::UnknownParameter(name.into()))
        }
        fn drift<S: Scalar>(&self, q: &[S], v: &[S]) -> Vec<S> {
            self.0.drift(q, v)
        }
        fn input_matrix<S: Scalar>(&self, q: &[S]) -> Vec<Vec<S>> {
            self.0.input_matrix(q)
        }
        fn flat_output<S: Scalar>(&self, q: &[S]) -> Vec<S> {
            self.0.flat_output(q)
        }
        fn completion<S: Scalar>(&self, q: &[S]) -> S {
            q[2]
        }
        fn configuration_arity(&self) -> MultiIndex {
            MultiIndex::from([2, 2])
        }
        fn configuration<S: Scalar>(&self, jet: &Jet<S>) -> Vec<S> {
            let theta = (-jet[(0, 2)]).atan2(S::one());
            vec![jet[(0, 0)] + theta.sin() * 0.3, jet[(1, 0)] - theta.cos() * 0.3, theta]
        }
        fn nominal_equilibrium(&self) -> Vec<f64> {
            vec![0.0, 0.3]
        }
        fn probe_box(&self) -> ProbeBox {
            self.0.probe_box()
        }
    }
    let sys = FlatSystem::new(Lazy(Vtol::default())).unwrap();
    let probes = random_jets(sys.model(), &MultiIndex::from([4, 4]), 64, 5);
    assert_eq!(minimal_orders(&sys, &probes).unwrap(), MultiIndex::from([4, 2]));
    assert!(matches!(
        ParameterizingMap::derive(&sys, &probes),
        Err(ModelError::ArityMismatch { .. })
    ));
}

fn defect<M: FlatModel>(map: &ParameterizingMap<M>, jet: &Jet<f64>) -> f64 {
    let q = map.configuration().eval(jet).unwrap();
    let v = map.velocity().eval(jet).unwrap();
    let u = map.input().solve(jet).unwrap().u;
    let acc = flatlin::multijet::prolong(map.velocity().clone()).eval(jet).unwrap();
    max_abs_diff(&map.model().dynamics(&q, &v, &u), &acc)
}

#[test]
fn dynamics_consistency_on_random_jets() {
    let (vsys, vmap) = vtol();
    for jet in random_jets(vsys.model(), &MultiIndex::from([4, 4]), 200, 6) {
        assert!(defect(&vmap, &jet) < 1e-8);
    }
    let (csys, cmap) = crane();
    for jet in random_jets(csys.model(), &MultiIndex::from([4, 4]), 200, 7) {
        assert!(defect(&cmap, &jet) < 1e-8);
    }
}

#[test]
fn flat_output_round_trip() {
    let (vsys, vmap) = vtol();
    for jet in random_jets(vsys.model(), &MultiIndex::from([4, 4]), 200, 8) {
        let q = vmap.configuration().eval(&jet).unwrap();
        assert!(max_abs_diff(&vsys.model().flat_output(&q), &jet.values_at_order(0).unwrap()) < 1e-10);
    }
}

#[test]
fn vtol_dynamics_match_hand_coded_copy() {
    let model = Vtol { epsilon: 0.37 };
    let mut r = rng(9);
    use rand::Rng;
    for _ in 0..100 {
        let q: Vec<f64> = (0..3).map(|_| r.gen_range(-3.0..3.0)).collect();
        let v: Vec<f64> = (0..3).map(|_| r.gen_range(-3.0..3.0)).collect();
        let u: Vec<f64> = (0..2).map(|_| r.gen_range(-3.0..3.0)).collect();
        let ours = model.dynamics(&q, &v, &u);
        assert!(max_abs_diff(&ours, &vtol_accel(0.37, &q, &u)) < 1e-14);
    }
}

#[test]
fn vtol_input_matrix_has_full_rank() {
    let sys = FlatSystem::new(Vtol::default()).unwrap();
    for th in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        let b = sys.model().input_matrix(&[0.0, 0.0, th]);
        let m = nalgebra::DMatrix::from_fn(3, 2, |i, j| b[i][j]);
        assert_eq!(flatlin::linalg::numerical_rank(&m, 1e-12), 2);
    }
}

#[test]
fn crane_conserves_energy_without_inputs() {
    // RK4 on the unforced crane: energy drift must shrink with the step.
    let model = GantryCrane::default();
    let rhs = |x: &[f64]| -> Vec<f64> {
        let acc = model.dynamics(&x[..3], &x[3..], &[0.0, 0.0]);
        x[3..].iter().copied().chain(acc).collect()
    };
    let x0 = vec![0.0, 1.0, 0.4, 0.2, 0.1, -0.3];
    let e0 = model.energy(&x0[..3], &x0[3..]);
    let dt = 1e-3;
    let mut x = x0.clone();
    for _ in 0..1000 {
        let k1 = rhs(&x);
        let k2 = rhs(&x.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect::<Vec<_>>());
        let k3 = rhs(&x.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect::<Vec<_>>());
        let k4 = rhs(&x.iter().zip(&k3).map(|(a, b)| a + dt * b).collect::<Vec<_>>());
        for i in 0..6 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let e1 = model.energy(&x[..3], &x[3..]);
    assert!((e1 - e0).abs() < 1e-9, "energy drift {}", e1 - e0);
}

#[test]
fn chart_jacobian_nonsingular() {
    let (vsys, _) = vtol();
    assert!(vsys.chart_regularity(&[0.3, -1.0, 0.7]) > 1e-3);
    let (csys, _) = crane();
    assert!(csys.chart_regularity(&[0.3, 1.2, 0.2]) > 1e-3);
}

#[test]
fn second_derivative_dependence_exists() {
    let (vsys, vmap) = vtol();
    for jet in random_jets(vsys.model(), &MultiIndex::from([4, 4]), 20, 10) {
        let grads = jet_partials(vmap.configuration(), &jet).unwrap();
        let theta_grad = &grads[2];
        assert!((0..2).any(|j| theta_grad[(j, 2)].abs() > 1e-9));
    }
}

#[test]
fn input_solve_rejects_uncovered_jet() {
    let (_, map) = vtol();
    let jet = Jet::equilibrium(&[0.0, 0.3], MultiIndex::from([3, 3])).unwrap();
    assert!(map.input().solve(&jet).is_err());
    let _ = JetVar::new(0, 0);
}

#[test]
fn input_solve_has_no_rounding_bias_along_a_transition() {
    use flatlin::multijet::prolong;
    use flatlin::simulate::{plan_rest_to_rest, ReferenceSignal};
    let (sys, map) = vtol();
    let reference = plan_rest_to_rest(&[0.0, 0.3], &[5.0, 2.3], 10.0).unwrap();
    let acceleration = prolong(map.velocity().clone());
    let n = 5000;
    let mut sum = 0.0;
    for i in 0..=n {
        let t = 10.0 * i as f64 / n as f64;
        let jet = Jet::<f64>::zeros(map.orders().clone()).map(|v, _| reference.derivative(v.channel, v.order, t));
        let (q, v) = map.state(&jet).unwrap();
        let u = map.input().solve(&jet).unwrap().u;
        sum += sys.model().dynamics(&q, &v, &u)[1] - acceleration.eval(&jet).unwrap()[1];
    }
    // a plain normal-equation solve leaves a mean defect near 3e-17 here
    assert!((sum / n as f64).abs() < 1e-18, "{}", sum / n as f64);
}
