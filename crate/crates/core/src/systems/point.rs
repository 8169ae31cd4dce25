use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::sequence::SymbolicSequence;
use crate::arith::{ExactInt, QuadraticNumber};

/// A point of one of the supported state spaces.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum Point<T = BigInt> {
    Shift { sequence: SymbolicSequence },
    /// A coordinate in `[0, 1)`.
    Circle { x: QuadraticNumber<T> },
    /// b-adic digits, least significant first.
    Odometer { digits: SymbolicSequence },
    Torus { x: QuadraticNumber<T>, y: QuadraticNumber<T> },
    Product { components: Vec<Point<T>> },
}

impl<T: ExactInt> Point<T> {
    pub fn shift(sequence: SymbolicSequence) -> Self {
        Point::Shift { sequence }
    }

    /// Circle point, reduced mod 1.
    pub fn circle(x: QuadraticNumber<T>) -> Self {
        Point::Circle { x: x.fract() }
    }

    pub fn odometer(digits: SymbolicSequence) -> Self {
        Point::Odometer { digits }
    }

    /// Torus point, each coordinate reduced mod 1.
    pub fn torus(x: QuadraticNumber<T>, y: QuadraticNumber<T>) -> Self {
        Point::Torus { x: x.fract(), y: y.fract() }
    }

    pub fn product(components: Vec<Point<T>>) -> Self {
        Point::Product { components }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Shift { .. } => "shift",
            Point::Circle { .. } => "circle",
            Point::Odometer { .. } => "odometer",
            Point::Torus { .. } => "torus",
            Point::Product { .. } => "product",
        }
    }

    pub fn as_sequence(&self) -> Option<&SymbolicSequence> {
        match self {
            Point::Shift { sequence } => Some(sequence),
            Point::Odometer { digits } => Some(digits),
            _ => None,
        }
    }

    pub fn as_circle(&self) -> Option<&QuadraticNumber<T>> {
        match self {
            Point::Circle { x } => Some(x),
            _ => None,
        }
    }

    pub fn as_torus(&self) -> Option<(&QuadraticNumber<T>, &QuadraticNumber<T>)> {
        match self {
            Point::Torus { x, y } => Some((x, y)),
            _ => None,
        }
    }

    /// Converts the coefficient backing; `None` if something does not fit.
    pub fn convert<U: ExactInt>(&self) -> Option<Point<U>> {
        Some(match self {
            Point::Shift { sequence } => Point::Shift { sequence: sequence.clone() },
            Point::Odometer { digits } => Point::Odometer { digits: digits.clone() },
            Point::Circle { x } => Point::Circle { x: x.convert()? },
            Point::Torus { x, y } => Point::Torus { x: x.convert()?, y: y.convert()? },
            Point::Product { components } => Point::Product {
                components: components.iter().map(|c| c.convert()).collect::<Option<_>>()?,
            },
        })
    }
}

impl<T: ExactInt> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Shift { sequence } => write!(f, "{sequence}"),
            Point::Odometer { digits } => write!(f, "digits {digits}"),
            Point::Circle { x } => write!(f, "{x}"),
            Point::Torus { x, y } => write!(f, "({x}; {y})"),
            Point::Product { components } => {
                let parts: Vec<String> = components.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(" | "))
            }
        }
    }
}

impl<T: ExactInt> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
