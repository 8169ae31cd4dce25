//! Exact finite-horizon tools for distributional chaos in compact systems:
//! orbit statistics of scrambled tuples, Furstenberg families of return
//! times, stable sets, and an explicit tuple construction on full shifts.
//!
//! Everything is generic over the integer backing of the exact arithmetic.
//! `Big*` aliases use `BigInt` and never overflow; `Fast*` aliases use
//! `i128` and panic on overflow rather than return a wrong answer.

pub mod arith;
pub mod construct;
pub mod error;
pub mod furstenberg;
pub mod orbitstats;
pub mod stable;
pub mod systems;

use num_bigint::BigInt;

pub use arith::{Distance, ExactInt, QuadraticNumber};
pub use error::{Error, Result};
pub use systems::{OpenSetSpec, Point, SymbolicSequence, SystemSpec};

pub type BigQuadratic = QuadraticNumber<BigInt>;
pub type FastQuadratic = QuadraticNumber<i128>;
pub type BigDistance = Distance<BigInt>;
pub type FastDistance = Distance<i128>;
pub type BigPoint = Point<BigInt>;
pub type FastPoint = Point<i128>;
pub type BigSystem = SystemSpec<BigInt>;
pub type FastSystem = SystemSpec<i128>;
