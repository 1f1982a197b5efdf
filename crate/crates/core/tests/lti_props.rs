use admlab_core::lti::{pade, Polynomial, RationalTF};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..=max_len)
}

fn stable_den() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(0.1..50.0f64, 1..=4).prop_map(|roots| {
        let r: Vec<Complex64> = roots.iter().map(|&x| Complex64::new(-x, 0.0)).collect();
        Polynomial::from_roots(&r, 1.0)
    })
}

fn tf() -> impl Strategy<Value = RationalTF> {
    (coeffs(4), stable_den()).prop_map(|(n, d)| RationalTF::new(Polynomial::new(n), d, 0.0).unwrap())
}

proptest! {
    #[test]
    fn series_response_is_product(g in tf(), h in tf(), w in 0.01..1e3f64) {
        let gh = g.series(&h).unwrap();
        let a = gh.freq_response(w).unwrap();
        let b = g.freq_response(w).unwrap() * h.freq_response(w).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-300));
    }

    #[test]
    fn poles_are_zeros_of_inverse(n in coeffs(4), d in coeffs(5)) {
        let n = Polynomial::new(n);
        let d = Polynomial::new(d);
        prop_assume!(!n.is_zero() && !d.is_zero() && n.degree() >= 1 && d.degree() >= 1);
        prop_assume!(n.origin_multiplicity() == 0 && d.origin_multiplicity() == 0);
        let g = RationalTF::new(n, d, 0.0).unwrap();
        let p = g.poles().unwrap();
        let z = g.inverse().unwrap().zeros().unwrap();
        prop_assert_eq!(p.len(), z.len());
        for a in &p {
            let d = z.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn pade_tracks_delay(d in 1e-4..0.1f64, x in 0.01..1.0f64, n in 4usize..8) {
        let w = x / d;
        let p = pade(d, n).unwrap().freq_response(w).unwrap();
        let exact = Complex64::from_polar(1.0, -x);
        prop_assert!((p - exact).norm() <= 1e-6);
    }

    #[test]
    fn third_order_pade_tracks_moderate_delay(d in 1e-4..0.1f64, x in 0.01..0.7f64) {
        let w = x / d;
        let p = pade(d, 3).unwrap().freq_response(w).unwrap();
        prop_assert!((p - Complex64::from_polar(1.0, -x)).norm() <= 1e-6);
    }

    #[test]
    fn pade_is_all_pass(w in 1e-2..1e5f64, n in 1usize..8) {
        let p = pade(2.4e-3, n).unwrap().freq_response(w).unwrap();
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stability_scale_invariant(n in coeffs(3), d in coeffs(5), k in 1e-3..1e3f64) {
        let n = Polynomial::new(n);
        let d = Polynomial::new(d);
        prop_assume!(!d.is_zero() && !n.is_zero());
        let a = RationalTF::new(n.clone(), d.clone(), 0.0).unwrap().stability(3);
        let b = RationalTF::new(n.scale(k), d.scale(k), 0.0).unwrap().stability(3);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.stable, b.stable);
                prop_assert!(a.margin == b.margin || (a.margin - b.margin).abs() <= 1e-9 * (1.0 + a.margin.abs()));
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }
}

#[test]
fn third_order_pade_error_at_unit_phase() {
    // The leading error term (n!)^2 / ((2n)! (2n+1)!) x^(2n+1) is about 9.9e-6
    // at n = 3, x = 1, so this order cannot meet 1e-6 over the full range.
    let p = pade(1.0, 3).unwrap().freq_response(1.0).unwrap();
    let err = (p - Complex64::from_polar(1.0, -1.0)).norm();
    assert!(err > 5e-6 && err < 2e-5, "{err}");
}

#[test]
fn nominal_robot_poles() {
    let r = RationalTF::from_coeffs(&[0.0, 400.0, 100.0], &[400.0, 120.0, 5.0]).unwrap();
    let mut p: Vec<f64> = r.poles().unwrap().iter().map(|z| z.re).collect();
    p.sort_by(f64::total_cmp);
    assert!((p[0] + 20.0).abs() < 1e-12 && (p[1] + 4.0).abs() < 1e-12);
}
