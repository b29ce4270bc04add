mod common;

use common::*;
use flatlin::feedback::QuasiStaticFeedback;
use flatlin::flatmodel::*;
use flatlin::multijet::{Jet, MultiIndex};
use flatlin::simulate::*;
use flatlin::structure::{Analysis, ProbeConfig};

fn mi<const N: usize>(a: [usize; N]) -> MultiIndex {
    MultiIndex::from(a)
}

fn vtol_map() -> ParameterizingMap<Vtol> {
    let model = Vtol::default();
    Analysis::new(model.clone(), &ProbeConfig::for_model(&model, 9)).unwrap().map
}

#[test]
fn constant_plan_has_no_motion() {
    let r = plan_rest_to_rest(&[1.0, -2.0], &[1.0, -2.0], 3.0).unwrap();
    for &t in &[-1.0, 0.0, 0.4, 1.5, 3.0, 7.0] {
        assert_eq!(r.value(t), vec![1.0, -2.0]);
        for k in 1..=6 {
            assert_eq!(r.derivative(0, k, t), 0.0);
        }
    }
}

#[test]
fn plan_boundary_conditions_and_midpoint() {
    let r = plan_rest_to_rest(&[0.0, 0.3], &[5.0, 2.3], 10.0).unwrap();
    assert_eq!(r.value(0.0), vec![0.0, 0.3]);
    assert!(max_abs_diff(&r.value(10.0), &[5.0, 2.3]) < 1e-15);
    for j in 0..2 {
        for k in 1..=4 {
            assert!(r.derivative(j, k, 0.0).abs() < 1e-12);
            assert!(r.derivative(j, k, 10.0).abs() < 1e-12);
        }
    }
    assert!(max_abs_diff(&r.value(5.0), &[2.5, 1.3]) < 1e-14);
    assert_eq!(r.value(12.0), vec![5.0, 2.3]);
    assert!(plan_rest_to_rest(&[0.0], &[1.0], 0.0).is_err());
    assert!(plan_rest_to_rest(&[0.0], &[1.0, 2.0], 1.0).is_err());
}

#[test]
fn plan_derivatives_match_finite_differences() {
    let r = plan_rest_to_rest(&[0.0, 0.3], &[5.0, 2.3], 10.0).unwrap();
    for k in 0..5 {
        for &t in &[1.0, 4.2, 8.8] {
            let fd = fd_time(|s| r.value_derivatives(k, s), t, 1e-2);
            let exact = r.value_derivatives(k + 1, t);
            for (a, b) in fd.iter().zip(&exact) {
                assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "order {k} at {t}: {a} vs {b}");
            }
        }
    }
}

trait Derivatives {
    fn value_derivatives(&self, k: usize, t: f64) -> Vec<f64>;
}

impl Derivatives for RestToRest {
    fn value_derivatives(&self, k: usize, t: f64) -> Vec<f64> {
        (0..self.channels()).map(|j| self.derivative(j, k, t)).collect()
    }
}

#[test]
fn oracle_without_input_stays_put() {
    let init = Jet::from_channels(vec![vec![1.5, 0.0, 0.0, 0.0], vec![-0.5, 0.0]]).unwrap();
    let out = chain_oracle(&mi([4, 2]), &init, |_| vec![0.0, 0.0], 1.0, 0.01).unwrap();
    assert_eq!(out.time.len(), 101);
    assert!(out.y[0].iter().all(|&y| y == 1.5));
    assert!(out.y[1].iter().all(|&y| y == -0.5));
}

#[test]
fn oracle_double_integrator_closed_form() {
    let (y0, y1, c) = (0.4, -1.0, 0.7);
    let init = Jet::from_channels(vec![vec![y0, y1]]).unwrap();
    let out = chain_oracle(&mi([2]), &init, |_| vec![c], 2.0, 0.05).unwrap();
    for (t, y) in out.time.iter().zip(&out.y[0]) {
        let exact = y0 + y1 * t + 0.5 * c * t * t;
        assert!((y - exact).abs() < 1e-13);
    }
}

#[test]
fn oracle_reproduces_planned_polynomial() {
    let r = plan_rest_to_rest(&[0.0], &[5.0], 10.0).unwrap();
    let init = Jet::from_channels(vec![(0..4).map(|k| r.derivative(0, k, 0.0)).collect()]).unwrap();
    let out = chain_oracle(&mi([4]), &init, |t| vec![r.derivative(0, 4, t)], 10.0, 0.01).unwrap();
    for (t, y) in out.time.iter().zip(&out.y[0]) {
        assert!((y - r.derivative(0, 0, *t)).abs() < 1e-10);
    }
}

#[test]
fn hover_is_invariant() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let fb = QuasiStaticFeedback::new(map.clone(), mi([4, 2])).unwrap();
    let reference = plan_rest_to_rest(&[0.0, eps], &[0.0, eps], 5.0).unwrap();
    let mut ctl = LinearizingController::new(fb, reference).unwrap();
    let trace = simulate_closed_loop(map.model(), &mut ctl, &[0.0; 3], &[0.0; 3], 5.0, 1e-2).unwrap();
    assert_eq!(trace.integrated_states, 6);
    assert_eq!(trace.len(), 501);
    for (q, v) in trace.q.iter().zip(&trace.v) {
        assert!(q.iter().chain(v).all(|x| x.abs() < 1e-9));
    }
    for u in &trace.u {
        assert!(max_abs_diff(u, &[1.0, 0.0]) < 1e-12);
    }
}

#[test]
fn open_loop_hover_thrust_keeps_rest() {
    let model = Vtol::default();
    let mut ctl = ConstantInput {
        u: vec![1.0, 0.0],
        reference: plan_rest_to_rest(&[0.0, 0.3], &[0.0, 0.3], 1.0).unwrap(),
        kappa: mi([4, 2]),
    };
    let trace = simulate_closed_loop(&model, &mut ctl, &[2.0, 1.0, 0.0], &[0.0; 3], 5.0, 0.01).unwrap();
    let last = trace.q.last().unwrap();
    assert!(max_abs_diff(last, &[2.0, 1.0, 0.0]) < 1e-12);
}

#[test]
fn rest_to_rest_is_certified() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let s = RestToRestScenario::new(vec![0.0, eps], vec![5.0, eps + 2.0], 10.0, 5e-3);
    let r = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    assert!(r.certificate.pass, "{:?}", r.certificate);
    assert!(max_abs_diff(r.trace.y.last().unwrap(), &[5.0, eps + 2.0]) < 1e-5);
    for c in &r.certificate.channels {
        assert!(c.chain_deviation.unwrap() < 1e-8);
    }
}

#[test]
fn offset_start_follows_chains_from_actual_jets() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let mut s = RestToRestScenario::new(vec![0.0, eps], vec![1.0, eps], 4.0, 5e-3);
    s.q_offset = Some(vec![0.02, -0.01, 0.0]);
    let r = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    assert!((r.initial_psi[(0, 0)] - 0.02).abs() < 1e-12);
    assert!((r.initial_psi[(1, 0)] - (eps - 0.01)).abs() < 1e-12);
    assert!(r.certificate.pass, "{:?}", r.certificate);
    let last = r.trace.y.last().unwrap();
    assert!((last[0] - 1.02).abs() < 1e-8 && (last[1] - (eps - 0.01)).abs() < 1e-8);
}

#[test]
fn stabilization_removes_offset() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let mut s = RestToRestScenario::new(vec![0.0, eps], vec![1.0, eps], 6.0, 5e-3);
    s.q_offset = Some(vec![0.05, 0.0, 0.0]);
    s.gains = Some(vec![vec![16.0, 32.0, 24.0, 8.0], vec![]]);
    let r = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    assert!(r.oracle.is_none());
    let last = r.trace.y.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-3, "{last:?}");
    // the second channel has κ < r and cannot take gains
    s.gains = Some(vec![vec![], vec![1.0, 2.0]]);
    assert!(matches!(run_rest_to_rest(&map, &mi([4, 2]), &s), Err(SimulateError::Gains(_))));
}

#[test]
fn constant_input_fails_certificate() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let reference = plan_rest_to_rest(&[0.0, eps], &[5.0, eps + 2.0], 10.0).unwrap();
    let kappa = mi([4, 2]);
    let mut ctl = ConstantInput {
        u: vec![1.0, 0.0],
        reference: reference.clone(),
        kappa: kappa.clone(),
    };
    let trace = simulate_closed_loop(map.model(), &mut ctl, &[0.0; 3], &[0.0; 3], 10.0, 1e-2).unwrap();
    let init = Jet::equilibrium(&[0.0, eps], mi([3, 1])).unwrap();
    let w = |t: f64| vec![reference.derivative(0, 4, t), reference.derivative(1, 2, t)];
    let oracle = chain_oracle(&kappa, &init, w, 10.0, 1e-2).unwrap();
    let cert = certify_io(&trace, &kappa, Some(&oracle), &Tolerances::default()).unwrap();
    assert!(!cert.pass);
    assert!(cert.channels[0].chain_deviation.unwrap() > 1.0);
}

#[test]
fn attitude_at_chart_boundary_fails_at_start() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let mut s = RestToRestScenario::new(vec![0.0, eps], vec![1.0, eps], 2.0, 1e-2);
    s.q0 = Some(vec![0.0, 0.0, std::f64::consts::FRAC_PI_2]);
    match run_rest_to_rest(&map, &mi([4, 2]), &s) {
        Err(SimulateError::Feedback { time, .. }) => assert_eq!(time, 0.0),
        other => panic!("expected a feedback failure, got {:?}", other.map(|r| r.certificate)),
    }
}

#[test]
fn csv_layout() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let s = RestToRestScenario::new(vec![0.0, eps], vec![0.5, eps], 2.0, 0.01);
    let r = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    let mut buf = Vec::new();
    r.trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,q1,q2,q3,v1,v2,v3,u1,u2,y1,y2,w1,w2");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0].split(',').count(), 13);
}

#[test]
fn runs_are_bit_identical() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let s = RestToRestScenario::new(vec![0.0, eps], vec![0.5, eps + 0.5], 4.0, 0.01);
    let a = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    let b = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    assert_eq!(a.trace, b.trace);
}

#[test]
fn short_trace_is_rejected() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let s = RestToRestScenario::new(vec![0.0, eps], vec![0.0, eps], 0.05, 0.01);
    assert!(matches!(
        run_rest_to_rest(&map, &mi([4, 2]), &s),
        Err(SimulateError::TraceTooShort { .. })
    ));
}

#[test]
fn order_check_at_coarse_step() {
    let map = vtol_map();
    let eps = map.model().epsilon;
    let s = RestToRestScenario::new(vec![0.0, eps], vec![5.0, eps + 2.0], 10.0, 1e-2);
    let check = order_check(&map, &mi([4, 2]), &s).unwrap();
    assert!(check.pass, "{check:?}");
    assert!(check.ratio.iter().all(|r| (12.0..20.0).contains(r)), "{check:?}");
}

#[test]
fn crane_transfer_is_certified() {
    let model = GantryCrane::default();
    let map = Analysis::new(model.clone(), &ProbeConfig::for_model(&model, 9)).unwrap().map;
    let s = RestToRestScenario::new(vec![0.0, 1.0], vec![1.5, 1.5], 8.0, 5e-3);
    let r = run_rest_to_rest(&map, &mi([4, 2]), &s).unwrap();
    assert!(r.certificate.pass, "{:?}", r.certificate);
    assert_eq!(r.trace.integrated_states, 6);
}
