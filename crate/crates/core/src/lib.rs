//! Verification toolkit for supraposinormal operators on `l2`: interrupter
//! pairs `(Q, P)` with `AQA* = A*PA`, exact identity checks on factorable
//! matrices and weighted shifts, diagonal certificates for posinormality and
//! hyponormality, and floating-point falsifiers with rigorous tail bounds.
//!
//! Exact rational arithmetic is used for every identity and certificate;
//! binary64 only appears in [`numerics`].

pub mod certificates;
pub mod cli;
pub mod dominance;
pub mod error;
pub mod interrupters;
pub mod matrix;
pub mod numerics;
pub mod scalar;
pub mod sequences;
pub mod shifts;

pub use error::{Error, Result};
pub use scalar::Rational;
