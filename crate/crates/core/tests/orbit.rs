use proptest::prelude::*;
use swarm_fdi::orbit::{
    cw_derivative, pro_state, propagate, ControlInput, OrbitEnvironment, ProParameters,
    RelativeState,
};
use swarm_fdi::Vec3;

fn env() -> OrbitEnvironment {
    OrbitEnvironment::new(0.00113).unwrap()
}

fn pro(ar: f64, yoff: f64, ac: f64, pr: f64, pc: f64) -> ProParameters {
    ProParameters {
        radial_amplitude: ar,
        along_track_offset: yoff,
        cross_track_amplitude: ac,
        phase_radial: pr,
        phase_cross: pc,
    }
}

fn run(s0: RelativeState, e: &OrbitEnvironment, dt: f64, steps: usize) -> RelativeState {
    (0..steps).fold(s0, |s, _| {
        propagate(&s, &ControlInput::zero(), e, dt).unwrap()
    })
}

fn err(a: &RelativeState, b: &RelativeState) -> f64 {
    (a.position - b.position).norm()
}

#[test]
fn pro_returns_to_start_after_one_period() {
    let e = env();
    let dt = e.period() / 2000.0;
    for p in [
        pro(10.0, 0.0, 15.0, 0.0, 0.0),
        pro(25.0, -8.0, 3.0, 1.3, 2.9),
        pro(0.0, 30.0, 12.0, 0.0, 0.7),
        pro(40.0, 5.0, 0.0, 4.4, 0.0),
    ] {
        let s0 = pro_state(&p, &e, 0.0);
        let s1 = run(s0, &e, dt, 2000);
        assert!(err(&s0, &s1) < 1e-5, "position error {}", err(&s0, &s1));
        assert!((s0.velocity - s1.velocity).norm() < 1e-7);
    }
}

#[test]
fn integrator_tracks_closed_form_on_a_grid() {
    let e = env();
    let dt = e.period() / 2000.0;
    let p = pro(18.0, 4.0, 9.0, 0.4, 2.2);
    for start in [0.0, 700.0, 3100.0] {
        let mut s = pro_state(&p, &e, start);
        for k in 1..=2000 {
            s = propagate(&s, &ControlInput::zero(), &e, dt).unwrap();
            let exact = pro_state(&p, &e, start + k as f64 * dt);
            assert!(err(&s, &exact) < 1e-5, "start {start} step {k}");
        }
    }
}

#[test]
fn step_halving_difference_is_fifth_order() {
    let e = env();
    let s0 = RelativeState::new(Vec3::new(12.0, -20.0, 7.0), Vec3::new(0.01, -0.02, 0.005));
    let diff = |dt: f64| {
        let one = propagate(&s0, &ControlInput::zero(), &e, dt).unwrap();
        let two = run(s0, &e, dt / 2.0, 2);
        err(&one, &two)
    };
    let (d1, d2) = (diff(400.0), diff(200.0));
    let ratio = d1 / d2;
    // O(dt⁵): halving dt shrinks the local difference by about 32
    assert!(ratio > 24.0 && ratio < 40.0, "ratio {ratio}");
}

#[test]
fn global_error_drops_at_least_eightfold_when_dt_halves() {
    let e = env();
    let p = pro(20.0, 0.0, 10.0, 0.9, 0.1);
    let s0 = pro_state(&p, &e, 0.0);
    let global = |steps: usize| err(&run(s0, &e, e.period() / steps as f64, steps), &s0);
    let (coarse, fine) = (global(100), global(200));
    assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
}

#[test]
fn pro_is_periodic_bitwise() {
    let e = env();
    let p = pro(13.0, 2.0, 6.0, 0.25, 1.75);
    for t in [0.0, 17.0, 1234.5] {
        assert_eq!(pro_state(&p, &e, t), pro_state(&p, &e, t + e.period()));
    }
}

fn arb_vec(scale: f64) -> impl Strategy<Value = Vec3> {
    (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn derivative_is_linear(
        n in 1e-4..1e-2f64,
        p1 in arb_vec(1e3), v1 in arb_vec(10.0), u1 in arb_vec(1e-2),
        p2 in arb_vec(1e3), v2 in arb_vec(10.0), u2 in arb_vec(1e-2),
        a in -5.0..5.0f64, b in -5.0..5.0f64,
    ) {
        let e = OrbitEnvironment::new(n).unwrap();
        let s1 = RelativeState::new(p1, v1);
        let s2 = RelativeState::new(p2, v2);
        let c1 = ControlInput { acceleration: u1 };
        let c2 = ControlInput { acceleration: u2 };
        let mix = RelativeState::new(p1 * a + p2 * b, v1 * a + v2 * b);
        let cmix = ControlInput { acceleration: u1 * a + u2 * b };
        let lhs = cw_derivative(&mix, &cmix, &e);
        let d1 = cw_derivative(&s1, &c1, &e);
        let d2 = cw_derivative(&s2, &c2, &e);
        prop_assert!((lhs.velocity - (d1.velocity * a + d2.velocity * b)).norm() <= 1e-12 * 1e2);
        prop_assert!((lhs.acceleration - (d1.acceleration * a + d2.acceleration * b)).norm() <= 1e-12);
    }
}
