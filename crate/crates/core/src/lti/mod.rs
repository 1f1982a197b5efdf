//! Rational transfer functions with an input delay.

mod pade;
mod poly;
mod roots;
mod tf;

pub use pade::{pade, DEFAULT_PADE_ORDER};
pub use poly::Polynomial;
pub use roots::{roots, ROOT_TOLERANCE};
pub use tf::{compose, is_stable, Compose, RationalTF, Stability, CANCEL_TOL, MAX_DEGREE, STABILITY_EPS};
