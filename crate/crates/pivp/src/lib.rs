//! Building blocks for polynomial initial value problems (PIVPs): verified
//! arbitrary-precision numerics, an expression-to-ODE lowering pipeline,
//! analog programming gadgets, sequence generator encodings, a fixed
//! universal system, and a validated Taylor integrator.

pub mod error;
pub mod interval;
pub mod jet;
pub mod quadrature;
pub mod real;
pub mod series;

pub use error::{Error, Result};
pub use real::{BigReal, Prec, Rounding};
