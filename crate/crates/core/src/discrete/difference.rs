use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lti::{Polynomial, RationalTF};

/// Continuous-to-discrete substitution rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// `s -> (2/h)(z - 1)/(z + 1)`
    #[default]
    Tustin,
    /// `s -> (z - 1)/h`
    Euler,
}

/// `sum a_i y_{k-i} = sum b_i u_{k-i}`, index 0 being the newest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceEq {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DifferenceEq {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() || a[0] == 0.0 {
            return Err(Error::InvalidParameter("difference equation needs a[0] != 0"));
        }
        Ok(DifferenceEq { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Same equation scaled so that `a[0] = 1`.
    pub fn normalized(&self) -> DifferenceEq {
        let k = self.a[0];
        DifferenceEq {
            a: self.a.iter().map(|x| x / k).collect(),
            b: self.b.iter().map(|x| x / k).collect(),
        }
    }
}

/// Discretizes a delay-free proper transfer function at sample time `h`.
///
/// The denominator is first made monic in `s`; the substituted polynomials
/// are then cleared of fractions by `(h/2)^n (1 + q)^n` (Tustin) or
/// `(h q)^n` (Euler), with `q = z^-1` and `n` the denominator degree.
pub fn discretize(g: &RationalTF, h: f64, method: Method) -> Result<DifferenceEq> {
    if g.delay() != 0.0 {
        return Err(Error::DelayNotSupported(g.delay()));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter("sample time must be positive"));
    }
    if !g.is_proper() {
        return Err(Error::NotProper {
            num: g.num().degree(),
            den: g.den().degree(),
        });
    }
    let n = g.den().degree();
    let a = substitute(g.den(), n, h, method);
    let b = substitute(g.num(), n, h, method);
    DifferenceEq::new(a, b)
}

fn substitute(p: &Polynomial, n: usize, h: f64, method: Method) -> Vec<f64> {
    let one_minus = Polynomial::new(vec![1.0, -1.0]);
    let mut out = vec![0.0; n + 1];
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let term = match method {
            Method::Tustin => {
                // c (2/h)^k (1-q)^k (1+q)^(n-k) (h/2)^n
                let scale = c * libm::pow(h / 2.0, (n - k) as f64);
                (one_minus.pow(k) * Polynomial::new(vec![1.0, 1.0]).pow(n - k)).scale(scale)
            }
            Method::Euler => {
                // c (1-q)^k (h q)^(n-k)
                let scale = c * libm::pow(h, (n - k) as f64);
                (one_minus.pow(k) * Polynomial::monomial(1.0, n - k)).scale(scale)
            }
        };
        for (i, &t) in term.coeffs().iter().enumerate() {
            out[i] += t;
        }
    }
    out
}

/// Runs a difference equation sample by sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFilter {
    eq: DifferenceEq,
    u: Vec<f64>,
    y: Vec<f64>,
}

impl DiscreteFilter {
    pub fn new(eq: DifferenceEq) -> Self {
        let eq = eq.normalized();
        let u = vec![0.0; eq.b.len()];
        let y = vec![0.0; eq.a.len()];
        DiscreteFilter { eq, u, y }
    }

    pub fn from_tf(g: &RationalTF, h: f64, method: Method) -> Result<Self> {
        Ok(DiscreteFilter::new(discretize(g, h, method)?))
    }

    pub fn step(&mut self, input: f64) -> f64 {
        self.u.rotate_right(1);
        self.u[0] = input;
        let mut acc: f64 = self.eq.b.iter().zip(&self.u).map(|(b, u)| b * u).sum();
        for i in 1..self.eq.a.len() {
            acc -= self.eq.a[i] * self.y[i - 1];
        }
        self.y.rotate_right(1);
        self.y[0] = acc;
        acc
    }

    /// Most recent output.
    pub fn output(&self) -> f64 {
        self.y[0]
    }

    pub fn reset(&mut self) {
        self.u.iter_mut().for_each(|v| *v = 0.0);
        self.y.iter_mut().for_each(|v| *v = 0.0);
    }
}
