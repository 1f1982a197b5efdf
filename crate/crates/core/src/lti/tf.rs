use alloc::vec::Vec;

use num_complex::Complex64;

use super::pade::{pade, DEFAULT_PADE_ORDER};
use super::poly::Polynomial;
use super::roots::roots;
use crate::error::{Error, Result};

/// Highest polynomial degree accepted in a transfer function.
pub const MAX_DEGREE: usize = 64;
/// Pole real part above which a system counts as unstable (rad/s).
pub const STABILITY_EPS: f64 = 1e-7;
/// Relative distance under which a pole and a zero are cancelled.
pub const CANCEL_TOL: f64 = 1e-7;

const AXIS_TOL: f64 = 1e-13;

/// How two transfer functions are combined by [`compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compose {
    Series,
    Parallel,
    Feedback,
}

/// Result of a pole-based stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// Largest pole real part (rad/s); `-inf` for a pole-free system.
    pub margin: f64,
}

/// `num(s)/den(s) * exp(-s * delay)` with a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
    delay: f64,
}

impl RationalTF {
    /// Builds a normalized transfer function.
    ///
    /// Powers of `s` common to both polynomials are cancelled exactly and the
    /// denominator is scaled to be monic.
    pub fn new(num: Polynomial, den: Polynomial, delay: f64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(Error::InvalidDelay(delay));
        }
        let (num, den) = if num.is_zero() {
            (Polynomial::zero(), Polynomial::one())
        } else {
            let k = num.origin_multiplicity().min(den.origin_multiplicity());
            (num.shift_down(k), den.shift_down(k))
        };
        let degree = num.degree().max(den.degree());
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                max: MAX_DEGREE,
            });
        }
        let lead = den.leading();
        Ok(RationalTF {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
            delay,
        })
    }

    /// Delay-free transfer function from ascending coefficient slices.
    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        RationalTF::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()), 0.0)
    }

    pub fn gain(k: f64) -> Self {
        RationalTF {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
            delay: 0.0,
        }
    }

    pub fn unit() -> Self {
        RationalTF::gain(1.0)
    }

    pub fn zero() -> Self {
        RationalTF::gain(0.0)
    }

    /// `1/s`
    pub fn integrator() -> Self {
        RationalTF {
            num: Polynomial::one(),
            den: Polynomial::s(),
            delay: 0.0,
        }
    }

    /// `s`
    pub fn differentiator() -> Self {
        RationalTF {
            num: Polynomial::s(),
            den: Polynomial::one(),
            delay: 0.0,
        }
    }

    pub fn with_delay(mut self, delay: f64) -> Result<Self> {
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(Error::InvalidDelay(delay));
        }
        self.delay = delay;
        Ok(self)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree()
    }

    /// Response at an arbitrary complex `s`, delay included.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let r = self.num.eval(s) / self.den.eval(s);
        if self.delay == 0.0 {
            r
        } else {
            r * (-s * self.delay).exp()
        }
    }

    /// Response at `s = j omega` with the delay evaluated exactly.
    pub fn freq_response(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidFrequency(omega));
        }
        let s = Complex64::new(0.0, omega);
        let d = self.den.eval(s);
        if d.norm() <= AXIS_TOL * self.den.eval_abs(s) {
            return Err(Error::PoleOnAxis { omega });
        }
        let r = self.num.eval(s) / d;
        Ok(if self.delay == 0.0 {
            r
        } else {
            r * Complex64::from_polar(1.0, -omega * self.delay)
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.num = out.num.scale(k);
        if out.num.is_zero() {
            out.den = Polynomial::one();
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// `1/g`; the delay cannot be inverted and must be zero.
    pub fn inverse(&self) -> Result<Self> {
        if self.delay != 0.0 {
            return Err(Error::DelayNotSupported(self.delay));
        }
        RationalTF::new(self.den.clone(), self.num.clone(), 0.0)
    }

    /// `g * h` with delays summed.
    pub fn series(&self, h: &RationalTF) -> Result<Self> {
        RationalTF::new(&self.num * &h.num, &self.den * &h.den, self.delay + h.delay)
    }

    /// `g + h`; both operands must carry the same delay.
    pub fn parallel(&self, h: &RationalTF) -> Result<Self> {
        if self.is_zero() {
            return Ok(h.clone());
        }
        if h.is_zero() {
            return Ok(self.clone());
        }
        if self.delay != h.delay {
            return Err(Error::MixedDelay(self.delay, h.delay));
        }
        let num = &(&self.num * &h.den) + &(&h.num * &self.den);
        RationalTF::new(num, &self.den * &h.den, self.delay)
    }

    /// `g + h`, converting unequal delays to Padé form of the given order.
    pub fn parallel_pade(&self, h: &RationalTF, order: usize) -> Result<Self> {
        if self.delay == h.delay || self.is_zero() || h.is_zero() {
            return self.parallel(h);
        }
        self.pade_converted(order)?.parallel(&h.pade_converted(order)?)
    }

    /// Negative feedback `g/(1 + g h)` at the default Padé order.
    pub fn feedback(&self, h: &RationalTF) -> Result<Self> {
        self.feedback_pade(h, DEFAULT_PADE_ORDER)
    }

    /// Negative feedback `g/(1 + g h)`.
    ///
    /// A zero `h` returns `g` untouched, delay included. Otherwise a delay on
    /// one operand is folded into the loop through a Padé approximant of the
    /// given order; delays on both operands are rejected.
    pub fn feedback_pade(&self, h: &RationalTF, order: usize) -> Result<Self> {
        if h.is_zero() {
            return Ok(self.clone());
        }
        if self.delay != 0.0 && h.delay != 0.0 {
            return Err(Error::MixedDelay(self.delay, h.delay));
        }
        let g = self.pade_converted(order)?;
        let h = h.pade_converted(order)?;
        let num = &g.num * &h.den;
        let den = &(&g.den * &h.den) + &(&g.num * &h.num);
        if den.is_zero() {
            return Err(Error::DegenerateLoop);
        }
        RationalTF::new(num, den, 0.0)
    }

    /// Replaces the delay by its diagonal Padé approximant.
    pub fn pade_converted(&self, order: usize) -> Result<Self> {
        if self.delay == 0.0 {
            return Ok(self.clone());
        }
        let p = pade(self.delay, order)?;
        RationalTF::new(&self.num * p.num(), &self.den * p.den(), 0.0)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.delay != 0.0 {
            return Err(Error::DelayNotSupported(self.delay));
        }
        roots(&self.den)
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if self.delay != 0.0 {
            return Err(Error::DelayNotSupported(self.delay));
        }
        roots(&self.num)
    }

    /// Cancels pole/zero pairs closer than `tol` (relative to root size).
    ///
    /// Real pairs are divided out as `(s - r)`, complex pairs as the
    /// conjugate quadratic. The delay is kept.
    pub fn minreal(&self, tol: f64) -> Result<Self> {
        if self.num.is_zero() || self.num.degree() == 0 || self.den.degree() == 0 {
            return Ok(self.clone());
        }
        let zs = roots(&self.num)?;
        let ps = roots(&self.den)?;
        let mut used = alloc::vec![false; ps.len()];
        let mut common = Vec::new();
        for z in &zs {
            let mut best: Option<(usize, f64)> = None;
            for (i, p) in ps.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let d = (z - p).norm();
                if d <= tol * p.norm().max(1.0) && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            if let Some((i, _)) = best {
                used[i] = true;
                common.push(ps[i]);
            }
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for r in common {
            let factor = if r.im.abs() <= tol * r.norm().max(1.0) {
                Polynomial::new(alloc::vec![-r.re, 1.0])
            } else if r.im > 0.0 {
                Polynomial::new(alloc::vec![r.norm_sqr(), -2.0 * r.re, 1.0])
            } else {
                continue;
            };
            if factor.degree() > num.degree() || factor.degree() > den.degree() {
                continue;
            }
            num = num.div_rem(&factor).0;
            den = den.div_rem(&factor).0;
        }
        RationalTF::new(num, den, self.delay)
    }

    /// Pole-based stability after Padé conversion and cancellation.
    pub fn stability(&self, pade_order: usize) -> Result<Stability> {
        let g = self.pade_converted(pade_order)?.minreal(CANCEL_TOL)?;
        let margin = g.poles()?.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        Ok(Stability {
            stable: margin < -STABILITY_EPS,
            margin,
        })
    }
}

/// Combines two transfer functions; feedback folds delays at the default Padé order.
pub fn compose(g: &RationalTF, h: &RationalTF, op: Compose) -> Result<RationalTF> {
    match op {
        Compose::Series => g.series(h),
        Compose::Parallel => g.parallel(h),
        Compose::Feedback => g.feedback(h),
    }
}

/// Pole-based stability of `g` with its delay replaced by a Padé approximant.
pub fn is_stable(g: &RationalTF, pade_order: usize) -> Result<Stability> {
    g.stability(pade_order)
}
