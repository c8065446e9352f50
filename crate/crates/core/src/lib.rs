#![no_std]
//! Exact arithmetic of quartic del Pezzo surfaces whose Brauer group modulo
//! constants has order 4.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: Legendre and Hilbert symbols, modular square roots, square
//!   classes, factorisation and p-adic scalars.
//! * [`quadform`]: surface models (the two-parameter subfamily, the normal
//!   form and raw matrix pencils), the discriminant quintic, the order-4
//!   certificate and the collapse of rank-2 triples.
//! * [`localsolve`]: solubility over the reals and every `Q_q`, with Hensel
//!   certificates and seeded sampling of local points.
//! * [`brauer`]: the classes `A`, `B`, `C`, their local invariants,
//!   surjectivity witnesses and obstruction verdicts.
//! * [`families`]: the `Y` and `S` families, rational point search and
//!   census rows.
//!
//! Everything here allocates but never touches IO; the `brauer4` crate adds
//! the command line and file formats.

extern crate alloc;

pub mod arith;
pub mod brauer;
pub mod error;
pub mod families;
pub mod localsolve;
pub mod quadform;

pub use error::{Error, Result};
