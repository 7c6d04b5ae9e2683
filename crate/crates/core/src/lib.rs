//! Lower bounds for the proportion of modular elliptic curves over Galois CM
//! fields, together with the finite computations behind them.
//!
//! The bound `(1 - 5^-f)^(2r)` depends only on how 5 splits in the field. The
//! modules here evaluate it exactly ([`bounds`]), check the finite-field
//! residue counts it rests on ([`ffcurves`]), measure how fast the residue
//! criterion's density approaches it over imaginary quadratic fields
//! ([`density`]), and collect mod-5 Galois image evidence from Frobenius
//! traces ([`gimage`]).

pub mod arith;
pub mod bounds;
pub mod density;
pub mod error;
pub mod ffcurves;
pub mod ffield;
pub mod gimage;
pub mod numfield;

pub use error::{Error, Result};
