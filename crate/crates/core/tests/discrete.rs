use admlab_core::discrete::*;
use admlab_core::lti::RationalTF;
use admlab_core::plant::{ControllerParams, VarDamping};
use proptest::prelude::*;

fn rel_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

#[test]
fn nominal_tustin_matches_hand_expansion() {
    let g = RationalTF::from_coeffs(&[1.0, 0.02], &[0.0, 1000.0, 10.0]).unwrap();
    let d = discretize(&g, 8e-4, Method::Tustin).unwrap();
    assert!(rel_eq(d.a(), &[1.04, -2.0, 0.96], 1e-12));
    let k = 8e-4 * 8e-4 / 40.0;
    assert!(rel_eq(d.b(), &[51.0 * k, 2.0 * k, -49.0 * k], 1e-12));
}

#[test]
fn euler_admittance_coefficients() {
    // s -> (1 - q)/(h q): a = {1, Ba h/Ma - 2, 1 - Ba h/Ma}, b = {0, Kl h, h^2 - Kl h}/Ma
    let (ma, ba, kl, h) = (10.0, 1000.0, 0.02, 8e-4);
    let c = AdmittanceCoeffs::euler(ma, ba, kl, h).unwrap();
    assert!(rel_eq(&c.a, &[1.0, ba * h / ma - 2.0, 1.0 - ba * h / ma], 1e-12));
    assert!(rel_eq(&c.b, &[0.0, kl * h / ma, (h * h - kl * h) / ma], 1e-12));
}

#[test]
fn rising_edge_step_is_force_term_only() {
    let cp = ControllerParams {
        ma: 13.0,
        ba: 800.0,
        ..ControllerParams::contact_experiment()
    };
    let mut s = AdmittanceState::new(&cp).unwrap();
    let u = [30.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for k in 0..500 {
        collision_step(&mut s, &u, &[0.0; 3], &[0.0; 3], k as f64 * cp.h, &cp).unwrap();
    }
    let delta = s.xd_next[0] - s.xd_now[0];
    assert!(delta > 0.0);
    let (_, ev) = collision_step(&mut s, &u, &[9.0, 0.0, 0.0], &[0.02, 0.0, 0.0], 0.4, &cp).unwrap();
    assert!(ev);
    let x0 = s.xd_next[0];
    let u2 = [21.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let (x, _) = collision_step(&mut s, &u2, &[9.0, 0.0, 0.0], &[0.02, 0.0, 0.0], 0.4008, &cp).unwrap();
    let force = s.coeffs(&cp).unwrap().force_term(&s.f_hist[0]);
    assert!((x[0] - x0 - force).abs() <= 1e-12 * x0.abs().max(1.0));
}

proptest! {
    #[test]
    fn generic_tustin_equals_eq8(
        ma in 0.5..100.0f64,
        ba in 1.0..5000.0f64,
        kl in 0.0..0.1f64,
        h in 1e-4..5e-3f64,
    ) {
        let g = RationalTF::from_coeffs(&[1.0, kl], &[0.0, ba, ma]).unwrap();
        let d = discretize(&g, h, Method::Tustin).unwrap();
        let e = AdmittanceCoeffs::tustin(ma, ba, kl, h);
        prop_assert!(rel_eq(d.a(), &e.a, 1e-12));
        let b = d.b();
        let b = [b[0], b[1], *b.get(2).unwrap_or(&0.0)];
        prop_assert!(rel_eq(&b, &e.b, 1e-12));
    }

    #[test]
    fn contact_step_is_continuous(
        forces in prop::collection::vec(-60.0..60.0f64, 50..300),
        hit in 10usize..49,
    ) {
        let cp = ControllerParams { ma: 13.0, ba: 800.0, ..ControllerParams::contact_experiment() };
        let mut s = AdmittanceState::new(&cp).unwrap();
        let mut after_event = false;
        for (k, &f) in forces.iter().enumerate() {
            let u = [f, 0.0, 0.0, 0.0, 0.0, 0.0];
            let fz = if k == hit { [100.0, 0.0, 0.0] } else { [0.0; 3] };
            let before = s.xd_next[0];
            let (x, ev) = collision_step(&mut s, &u, &fz, &[1.0, 0.0, 0.0], k as f64 * cp.h, &cp).unwrap();
            if ev {
                prop_assert_eq!(x[0], before);
                after_event = true;
            } else if after_event {
                let g = s.coeffs(&cp).unwrap().force_term(&s.f_hist[0]);
                prop_assert!((x[0] - before).abs() <= g.abs() * (1.0 + 1e-9) + 1e-15);
                after_event = false;
            }
        }
    }

    #[test]
    fn carried_increment_keeps_sign(ma in 0.5..50.0f64, ba in 1.0..2000.0f64, h in 1e-4..2e-3f64) {
        prop_assume!(ma > 0.5 * ba * h);
        let c = AdmittanceCoeffs::tustin(ma, ba, 0.0, h);
        prop_assert!(c.carry() > 0.0);
    }

    #[test]
    fn adapted_damping_stays_bounded(speeds in prop::collection::vec(-2.0..2.0f64, 1..2000)) {
        let vd = VarDamping::default();
        let cp = ControllerParams { ba: 800.0, var_damping: Some(vd), ..ControllerParams::contact_experiment() };
        let mut s = AdmittanceState::new(&cp).unwrap();
        let mut last = s.ba_current;
        for (k, &v) in speeds.iter().enumerate() {
            let b = adapt_damping(&mut s, v, k as f64 * cp.h, &cp);
            prop_assert!(b >= vd.b_lo && b <= vd.b_hi);
            prop_assert!((b - last).abs() <= vd.max_delta + 1e-9);
            last = b;
        }
    }
}

#[test]
fn damping_updates_at_one_hundred_hertz() {
    let cp = ControllerParams {
        ba: 800.0,
        var_damping: Some(VarDamping::default()),
        ..ControllerParams::contact_experiment()
    };
    let mut s = AdmittanceState::new(&cp).unwrap();
    let mut updates = 0;
    let mut last = s.ba_current;
    let steps = (10.0 / cp.h).round() as usize;
    for k in 0..steps {
        // alternate target so every update changes the value
        let v = if (k / 50) % 2 == 0 { 1.0 } else { 0.0 };
        let b = adapt_damping(&mut s, v, k as f64 * cp.h, &cp);
        if b != last {
            updates += 1;
        }
        last = b;
    }
    assert!((990..=1001).contains(&updates), "{updates}");
}
