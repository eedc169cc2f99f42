use channel_spectra::classical::{closed_form_trajectory, integrate, integrate_ensemble, ClassicalState};
use channel_spectra::model::{ChannelParams, PotentialSpec};
use proptest::prelude::*;

fn p34() -> ChannelParams {
    ChannelParams::new(3.0, 4.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // the cyclotron ellipse (y - y_c)² + p_y²/α² is conserved
    #[test]
    fn ellipse_invariance(y in -2.0f64..2.0, px in -3.0f64..3.0, py in -3.0f64..3.0) {
        let p = p34();
        let traj = closed_form_trajectory(&p, &PotentialSpec::zero(), &ClassicalState::new(0.0, y, px, py), 3.0, 0.01).unwrap();
        let yc = -p.mu() * px;
        let inv = |s: &ClassicalState| (s.y - yc).powi(2) + s.py.powi(2) / p.alpha().powi(2);
        let i0 = inv(&traj.states[0]);
        for s in &traj.states {
            prop_assert!((inv(s) - i0).abs() <= 1e-12 * (1.0 + i0));
            prop_assert_eq!(s.px, px);
        }
    }
}

fn final_position_error(dt: f64, reference: &ClassicalState, spec: &PotentialSpec) -> f64 {
    let s = integrate(&p34(), spec, &ClassicalState::new(0.1, 0.4, 1.0, -0.5), 1.0, dt).unwrap();
    let l = s.last();
    (l.x - reference.x).abs().max((l.y - reference.y).abs())
}

#[test]
fn rk4_is_fourth_order() {
    let spec = PotentialSpec::single_bump(0.8, 0.5, 0.2, 0.6).unwrap();
    let reference = integrate(&p34(), &spec, &ClassicalState::new(0.1, 0.4, 1.0, -0.5), 1.0, 1e-4).unwrap();
    let r = *reference.last();
    let e1 = final_position_error(0.02, &r, &spec);
    let e2 = final_position_error(0.01, &r, &spec);
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() < 0.3, "order {order}");
}

#[test]
fn energy_drift_with_potential() {
    let spec = PotentialSpec::single_bump(0.8, 0.5, 0.2, 0.6).unwrap();
    let traj = integrate(&p34(), &spec, &ClassicalState::new(0.1, 0.4, 1.0, -0.5), 2.0, 1e-3).unwrap();
    assert!(traj.energy_drift() < 1e-9, "{}", traj.energy_drift());
}

#[test]
fn ensemble_is_order_preserving() {
    let inits: Vec<ClassicalState> = (0..6).map(|k| ClassicalState::new(0.0, 0.1 * k as f64, 1.0, 0.0)).collect();
    let runs = integrate_ensemble(&p34(), &PotentialSpec::zero(), &inits, 0.5, 1e-3);
    for (init, run) in inits.iter().zip(&runs) {
        assert_eq!(run.as_ref().unwrap().states[0].y, init.y);
    }
}
