//! Polynomial roots from companion-matrix eigenvalues with Newton polishing.

use alloc::vec::Vec;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Bound on the polished backward residual `|p(r)| / sum |c_k| |r|^k`.
pub const ROOT_TOLERANCE: f64 = 1e-9;

const SCHUR_MAX_ITER: usize = 10_000;
const POLISH_STEPS: usize = 8;

/// All roots of `p`, with multiplicity.
///
/// Roots at the origin are split off exactly. The remaining factor is
/// rescaled so its roots have unit geometric mean, balanced, and handed to a
/// real Schur decomposition of its companion matrix. Each eigenvalue is then
/// polished by Newton steps that are only accepted while they lower the
/// residual.
pub fn roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Ok(Vec::new());
    }
    let zeros = p.origin_multiplicity();
    let q = p.shift_down(zeros);
    let mut out = Vec::with_capacity(p.degree());
    out.extend(core::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));

    let n = q.degree();
    match n {
        0 => {}
        1 => out.push(Complex64::new(-q.coeffs()[0] / q.coeffs()[1], 0.0)),
        2 => out.extend(quadratic(q.coeffs()[2], q.coeffs()[1], q.coeffs()[0])),
        _ => out.extend(companion_roots(&q)?),
    }

    for r in out.iter_mut().skip(zeros) {
        *r = polish(&q, *r);
        let residual = backward_residual(&q, *r);
        if !(residual <= ROOT_TOLERANCE) {
            return Err(Error::Convergence {
                residual,
                tolerance: ROOT_TOLERANCE,
            });
        }
    }
    Ok(out)
}

fn backward_residual(p: &Polynomial, r: Complex64) -> f64 {
    let scale = p.eval_abs(r);
    if scale == 0.0 {
        return 0.0;
    }
    p.eval(r).norm() / scale
}

fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        // Cancellation-free form.
        let sq = libm::sqrt(disc);
        let t = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        if t == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(t / a, 0.0), Complex64::new(c / t, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = libm::sqrt(-disc) / (2.0 * a);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn companion_roots(q: &Polynomial) -> Result<Vec<Complex64>> {
    let c = q.coeffs();
    let n = q.degree();
    let sigma = libm::pow((c[0] / c[n]).abs(), 1.0 / n as f64);
    let sigma = if sigma.is_finite() && sigma > 0.0 { sigma } else { 1.0 };

    // Monic coefficients of q(sigma * t) / (c_n sigma^n).
    let mut monic = Vec::with_capacity(n);
    let mut pow = 1.0;
    for &ck in c.iter().take(n) {
        monic.push(ck * pow);
        pow *= sigma;
    }
    let lead = c[n] * pow;
    for m in monic.iter_mut() {
        *m /= lead;
    }

    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for (i, &m) in monic.iter().enumerate() {
        comp[(i, n - 1)] = -m;
    }
    balance_parlett_reinsch(&mut comp);
    let schur = Schur::try_new(comp, f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::Convergence {
        residual: f64::INFINITY,
        tolerance: ROOT_TOLERANCE,
    })?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re * sigma, z.im * sigma))
        .collect())
}

fn polish(p: &Polynomial, mut r: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut best = p.eval(r).norm();
    for _ in 0..POLISH_STEPS {
        if best == 0.0 {
            break;
        }
        let d = dp.eval(r);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = r - p.eval(r) / d;
        let val = p.eval(candidate).norm();
        if !(val < best) {
            break;
        }
        r = candidate;
        best = val;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn factorable_quadratic() {
        let r = sorted(roots(&Polynomial::new(vec![2.0, 3.0, 1.0])).unwrap());
        assert!((r[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn integrator_pole() {
        let r = roots(&Polynomial::s()).unwrap();
        assert_eq!(r, vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn robot_denominator() {
        // 5s^2 + 120s + 400 = 5(s + 4)(s + 20)
        let r = sorted(roots(&Polynomial::new(vec![400.0, 120.0, 5.0])).unwrap());
        assert!((r[0].re + 20.0).abs() < 1e-12 && r[0].im == 0.0);
        assert!((r[1].re + 4.0).abs() < 1e-12 && r[1].im == 0.0);
    }

    #[test]
    fn high_degree_with_spread_scales() {
        let expected = [
            Complex64::new(-0.5, 0.0),
            Complex64::new(-4.0, 0.0),
            Complex64::new(-20.0, 0.0),
            Complex64::new(-120.0, 0.0),
            Complex64::new(-200.0, 0.0),
            Complex64::new(-1250.0, 0.0),
            Complex64::new(-30.0, 140.0),
            Complex64::new(-30.0, -140.0),
            Complex64::new(3.0, 60.0),
            Complex64::new(3.0, -60.0),
        ];
        let p = Polynomial::from_roots(&expected, 7.5);
        let got = roots(&p).unwrap();
        assert_eq!(got.len(), expected.len());
        for e in expected {
            let best = got.iter().map(|g| (g - e).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8 * (1.0 + e.norm()), "missing root {e}: {best}");
        }
    }

    #[test]
    fn origin_roots_are_exact() {
        let p = Polynomial::new(vec![0.0, 0.0, 2.0, 3.0, 1.0]);
        let r = roots(&p).unwrap();
        assert_eq!(r.iter().filter(|z| **z == Complex64::new(0.0, 0.0)).count(), 2);
        assert_eq!(r.len(), 4);
    }
}
