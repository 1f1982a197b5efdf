use alloc::vec::Vec;

use super::poly::Polynomial;
use super::tf::RationalTF;
use crate::error::{Error, Result};

/// Default approximation order used when a delay has to be made rational.
pub const DEFAULT_PADE_ORDER: usize = 3;

/// Diagonal `[n/n]` Padé approximant of `exp(-s * delay)`.
///
/// Coefficients are `c_k = (2n-k)! n! / ((2n)! k! (n-k)!)`, giving
/// `sum c_k (-delay s)^k / sum c_k (delay s)^k`.
pub fn pade(delay: f64, order: usize) -> Result<RationalTF> {
    if !(delay >= 0.0) || !delay.is_finite() {
        return Err(Error::InvalidDelay(delay));
    }
    if order == 0 {
        return Err(Error::InvalidParameter("pade order must be at least 1"));
    }
    if delay == 0.0 {
        return Ok(RationalTF::unit());
    }
    let c = coefficients(order);
    let mut num = Vec::with_capacity(order + 1);
    let mut den = Vec::with_capacity(order + 1);
    let mut p = 1.0;
    for (k, ck) in c.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        num.push(sign * ck * p);
        den.push(ck * p);
        p *= delay;
    }
    RationalTF::new(Polynomial::new(num), Polynomial::new(den), 0.0)
}

fn coefficients(n: usize) -> Vec<f64> {
    // c_0 = 1, c_{k+1} = c_k (n-k) / ((2n-k)(k+1))
    let mut c = Vec::with_capacity(n + 1);
    let mut ck = 1.0;
    for k in 0..=n {
        c.push(ck);
        ck *= (n - k) as f64 / (((2 * n - k) * (k + 1)) as f64);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_recurrence_matches_factorials() {
        fn fact(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        for n in 1..8 {
            let c = coefficients(n);
            for (k, ck) in c.iter().enumerate() {
                let exact = fact(2 * n - k) * fact(n) / (fact(2 * n) * fact(k) * fact(n - k));
                assert!((ck - exact).abs() <= 1e-15 * exact);
            }
        }
    }

    #[test]
    fn first_order() {
        let td = 2.4e-3;
        let p = pade(td, 1).unwrap();
        // (1 - Td s/2)/(1 + Td s/2), monic in s
        let k = 2.0 / td;
        assert!((p.den().coeffs()[0] - k).abs() < 1e-9);
        assert!((p.num().coeffs()[0] - k).abs() < 1e-9);
        assert!((p.num().coeffs()[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_delay_is_unit() {
        assert_eq!(pade(0.0, 4).unwrap(), RationalTF::unit());
    }
}
