//! Transfer-function analysis, discrete admittance control and contact
//! simulation for high-payload co-manipulation.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod discrete;
pub mod error;
pub mod lti;
pub mod plant;
pub mod sim;

pub use error::{Error, Result};
