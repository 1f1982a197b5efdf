use std::f64::consts::PI;

use admlab_core::analysis::*;
use admlab_core::lti::DEFAULT_PADE_ORDER;
use admlab_core::plant::{ControllerParams, PlantParams};
use admlab_core::sim::{simulate, SimScenario, SimTrace};
use admlab_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn tone(f: f64, h: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (2.0 * PI * f * i as f64 * h).sin()).collect()
}

#[test]
fn fft_matches_direct_dft() {
    let x: Vec<Complex64> = (0..1024)
        .map(|i| {
            Complex64::new(
                (i as f64 * 0.37).sin() + 0.1 * i as f64 / 1024.0,
                (i as f64 * 1.3).cos(),
            )
        })
        .collect();
    let mut y = x.clone();
    fft(&mut y);
    let z = direct_dft(&x);
    let scale = z.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    for (a, b) in y.iter().zip(&z) {
        assert!((a - b).norm() <= 1e-9 * scale);
    }
}

#[test]
fn tone_frequency_recovered() {
    let h = 8e-4;
    let n = 2500;
    let f = dominant_frequency(&tone(2.5, h, n), h).unwrap();
    let bin = 1.0 / (n.next_power_of_two() as f64 * h);
    assert!((f - 2.5).abs() <= bin, "{f}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tone_within_one_bin(f in 0.5..40.0f64, periods in 4.0..20.0f64) {
        let h = 1e-3;
        let n = (periods / f / h).ceil() as usize;
        let est = dominant_frequency(&tone(f, h, n), h).unwrap();
        let bin = 1.0 / (n.next_power_of_two() as f64 * h);
        prop_assert!((est - f).abs() <= bin);
    }

    #[test]
    fn energy_sign_symmetric(f in prop::collection::vec(-50.0..50.0f64, 1..200), h in 1e-4..1e-2f64) {
        let v: Vec<f64> = f.iter().map(|x| x * 0.01 - 0.2).collect();
        let nf: Vec<f64> = f.iter().map(|x| -x).collect();
        let nv: Vec<f64> = v.iter().map(|x| -x).collect();
        prop_assert_eq!(energy(&f, &v, h), energy(&nf, &nv, h));
    }
}

#[test]
fn metrics_on_contact_trace() {
    let tr = simulate(&SimScenario::contact_experiment()).unwrap();
    let m = trace_metrics(&tr, 7.0, 0.5).unwrap();
    assert!(m.peak_force >= 30.0);
    assert!(m.time_to_contact > 0.0 && m.contact_velocity > 0.0);
    assert!(m.dominant_mode >= 0.0 && m.dominant_mode <= 0.5 / 8e-4);
    assert!((m.rms_noise - 0.14).abs() < 0.03, "{}", m.rms_noise);

    // brute-force spectrum of the same window
    let i = tr.f_meas.iter().position(|f| f.abs() > 7.0).unwrap();
    let w = &tr.f_meas[i..];
    let n = w.len();
    let mean = w.iter().sum::<f64>() / n as f64;
    let nfft = n.next_power_of_two();
    let mut x = vec![Complex64::new(0.0, 0.0); nfft];
    for (j, v) in w.iter().enumerate() {
        let hann = 0.5 - 0.5 * (2.0 * PI * j as f64 / (n - 1) as f64).cos();
        x[j] = Complex64::new((v - mean) * hann, 0.0);
    }
    let (_, mags) = magnitude_spectrum(w, 8e-4).unwrap();
    let k = (1..mags.len()).max_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap();
    let bin = |k: usize| -> f64 {
        x.iter()
            .enumerate()
            .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nfft as f64))
            .sum::<Complex64>()
            .norm()
    };
    for kk in [k - 1, k, k + 1] {
        assert!((bin(kk) - mags[kk]).abs() <= 1e-9 * mags[k]);
    }
    let df = 1.0 / (nfft as f64 * 8e-4);
    assert!((m.dominant_mode - k as f64 * df).abs() <= 0.5 * df);
}

#[test]
fn no_contact_reported() {
    let mut tr = SimTrace::default();
    tr.t = vec![0.0, 0.1, 0.2];
    tr.f_meas = vec![0.0; 3];
    tr.f_raw = vec![0.0; 3];
    tr.v_robot = vec![0.0; 3];
    assert_eq!(trace_metrics(&tr, 7.0, 0.1), Err(Error::NoContact));
    assert_eq!(trace_metrics(&SimTrace::default(), 7.0, 0.1), Err(Error::EmptyTrace));
}

#[test]
fn variant_rows_are_order_independent() {
    let mut base = SimScenario::contact_experiment();
    base.duration = 1.5;
    let a = VariantDelta {
        kl: Some(0.0),
        bfb: Some(0.0),
        ..VariantDelta::new("baseline")
    };
    let b = VariantDelta {
        bfb: Some(0.0),
        ..VariantDelta::new("lead")
    };
    let c = VariantDelta::new("lead_feedback");
    let fwd = compare_variants(&base, &[a.clone(), b.clone(), c.clone()], 7.0, 0.5).unwrap();
    let rev = compare_variants(&base, &[c, b.clone(), a], 7.0, 0.5).unwrap();
    for row in &fwd {
        assert_eq!(Some(row), rev.iter().find(|r| r.label == row.label));
    }
    let twice = compare_variants(&base, &[b.clone(), b], 7.0, 0.5).unwrap();
    assert_eq!(twice[0].metrics, twice[1].metrics);
}

#[test]
fn lead_removes_contact_resonance() {
    let cp = ControllerParams::nominal();
    let pp = PlantParams::nominal();
    let grid = default_grid();
    let (base, _) = resonance_peak(&Variant::Baseline.model(&cp, &pp).unwrap(), Response::Closed, &grid).unwrap();
    let (lead, _) = resonance_peak(&Variant::Lead.model(&cp, &pp).unwrap(), Response::Closed, &grid).unwrap();
    assert!(lead < base);
}

#[test]
fn ideal_compensation_raises_free_space_admittance() {
    let cp = ControllerParams::nominal();
    let pp = PlantParams {
        ke: 0.0,
        ..PlantParams::nominal()
    };
    let grid: Vec<f64> = default_grid()
        .into_iter()
        .filter(|w| *w >= 0.2 * PI && *w <= 20.0 * PI)
        .collect();
    let base = bode_sweep(&Variant::Baseline.model(&cp, &pp).unwrap(), Response::G, &grid, "b").unwrap();
    let ideal = bode_sweep(
        &Variant::IdealAcceleration.model(&cp, &pp).unwrap(),
        Response::G,
        &grid,
        "i",
    )
    .unwrap();
    for (i, b) in ideal.magnitudes.iter().zip(&base.magnitudes) {
        assert!(i >= b);
    }
}

#[test]
fn free_space_stable_at_nominal_damping() {
    let cp = ControllerParams {
        kl: 0.0,
        bfb: 0.0,
        ..ControllerParams::nominal()
    };
    let pp = PlantParams {
        ke: 0.0,
        ..PlantParams::nominal()
    };
    assert!(loop_stable(&cp, &pp, DEFAULT_PADE_ORDER).unwrap());
}

#[test]
fn frontier_brackets_the_boundary() {
    let cp = ControllerParams::nominal();
    let pp = PlantParams::nominal();
    let spec = FrontierSpec::new(SweepVariable::Ke, vec![5e4, 5e5, 5e4], &cp);
    let fr = scan_frontier(&cp, &pp, &spec).unwrap();
    assert_eq!(fr.points.len(), 2);
    for p in &fr.points {
        let plant = swept_plant(&pp, spec.variable, p.value);
        let ba = p.min_stable_ba.unwrap();
        let st = |ba: f64| loop_stable(&ControllerParams { ba, ..cp.clone() }, &plant, 3).unwrap();
        assert!(st(ba) && !st(ba * (1.0 - 2.0 * spec.rel_tol)));
        let kl = p.max_stable_kl.unwrap();
        let st = |kl: f64| loop_stable(&ControllerParams { kl, ..cp.clone() }, &plant, 3).unwrap();
        assert!(st(kl) && !st(kl * (1.0 + 2.0 * spec.rel_tol)));
    }
}

#[test]
fn frontier_without_bracket_fails() {
    let cp = ControllerParams::nominal();
    let pp = PlantParams::nominal();
    let mut spec = FrontierSpec::new(SweepVariable::Ke, vec![5e5], &cp);
    spec.ba_bounds = Some((5e3, 1e4));
    spec.kl_bounds = None;
    let e = scan_frontier(&cp, &pp, &spec).unwrap_err();
    assert_eq!(e.class(), "NoBracketError");
}
