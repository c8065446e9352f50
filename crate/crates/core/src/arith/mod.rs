//! Exact arithmetic primitives: symbols, square roots, square classes,
//! factorisation and p-adic scalars.

pub mod factor;
pub mod hilbert;
pub mod modular;
pub mod padic;

pub use factor::{factor, prime_divisors, square_class, square_class_int, squarefree_part, SquareClass};
pub use hilbert::{hilbert_symbol, hilbert_symbol_int, Place};
pub use modular::{is_prime_u64, legendre, legendre_u64, sqrt_mod, sqrt_mod_u64, PowerModulus};
pub use padic::{hensel_sqrt, PadicScalar};
