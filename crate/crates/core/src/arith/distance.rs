use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::int::ExactInt;
use super::quadratic::QuadraticNumber;

/// A nonnegative exact real used for metric values and thresholds.
///
/// Shift metrics produce dyadic values `2^-k` with `k` up to the comparison
/// bound; keeping the exponent avoids materialising 65536-bit denominators.
/// The representation is canonical: `Pow2(k)` is the only form of `2^-k`, so
/// derived equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
#[derive(Default)]
pub enum Distance<T = BigInt> {
    #[default]
    Zero,
    /// `2^-k`.
    Pow2(i64),
    /// A positive element of `Q(√5)` that is not a power of two.
    Exact(QuadraticNumber<T>),
}

impl<T: ExactInt> Distance<T> {
    pub fn one() -> Self {
        Distance::Pow2(0)
    }

    /// Canonicalises a nonnegative field element. Panics on negative input.
    pub fn from_quadratic(q: QuadraticNumber<T>) -> Self {
        match q.signum() {
            Ordering::Less => panic!("distance must be nonnegative, got {q}"),
            Ordering::Equal => Distance::Zero,
            Ordering::Greater => match dyadic_exponent(&q) {
                Some(k) => Distance::Pow2(k),
                None => Distance::Exact(q),
            },
        }
    }

    pub fn rational(p: i64, q: i64) -> Self {
        Self::from_quadratic(QuadraticNumber::rational(p, q))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Distance::Zero)
    }

    /// The value as a field element. Panics if `2^k` overflows the backing.
    pub fn to_quadratic(&self) -> QuadraticNumber<T> {
        match self {
            Distance::Zero => QuadraticNumber::zero(),
            Distance::Pow2(k) => {
                let p = T::one()
                    .checked_mul_pow2(k.unsigned_abs() as u32)
                    .expect("power of two overflows the integer backing");
                if *k >= 0 {
                    QuadraticNumber::from_parts(T::one(), T::zero(), p)
                } else {
                    QuadraticNumber::from_integer(p)
                }
            }
            Distance::Exact(q) => q.clone(),
        }
    }

    /// Multiplies by the rational `num / den` (both positive).
    pub fn scale(&self, num: u32, den: u32) -> Self {
        assert!(num > 0 && den > 0);
        match self {
            Distance::Zero => Distance::Zero,
            Distance::Pow2(k) if num.is_power_of_two() && den.is_power_of_two() => {
                Distance::Pow2(k + den.trailing_zeros() as i64 - num.trailing_zeros() as i64)
            }
            _ => {
                let q = self.to_quadratic();
                let q = q.mul_int(&T::from_u32(num).unwrap()).div_int(&T::from_u32(den).unwrap());
                Self::from_quadratic(q)
            }
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Pow2(k) => 2f64.powi(-(*k).clamp(-1000, 1000) as i32),
            Distance::Exact(q) => q.approx(),
        }
    }
}

fn dyadic_exponent<T: ExactInt>(q: &QuadraticNumber<T>) -> Option<i64> {
    if !q.is_rational() {
        return None;
    }
    let (a, _, c) = q.parts();
    let pow2 = |x: &T| -> Option<i64> {
        let bits = x.bit_length();
        let p = T::one().checked_mul_pow2((bits - 1) as u32)?;
        (p == *x).then_some(bits as i64 - 1)
    };
    if a.is_one() {
        pow2(c)
    } else if c.is_one() {
        pow2(a).map(|e| -e)
    } else {
        None
    }
}

impl<T: ExactInt> PartialOrd for Distance<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: ExactInt> Ord for Distance<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        use Distance::*;
        match (self, other) {
            (Zero, Zero) => Ordering::Equal,
            (Zero, _) => Ordering::Less,
            (_, Zero) => Ordering::Greater,
            (Pow2(j), Pow2(k)) => k.cmp(j),
            (Exact(p), Exact(q)) => p.cmp(q),
            (Exact(p), Pow2(k)) => p.cmp_pow2(*k),
            (Pow2(k), Exact(q)) => q.cmp_pow2(*k).reverse(),
        }
    }
}

impl<T: ExactInt> fmt::Debug for Distance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<T: ExactInt> fmt::Display for Distance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Pow2(k) => write!(f, "2^{}", -k),
            Distance::Exact(q) => write!(f, "{q}"),
        }
    }
}

/// JSON form: `"0"`, `"2^-k"`, or the `{"a": .., "b": ..}` coefficient object.
impl<T: ExactInt> Serialize for Distance<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Zero => serializer.serialize_str("0"),
            Distance::Pow2(k) => serializer.serialize_str(&format!("2^{}", -k)),
            Distance::Exact(q) => q.serialize(serializer),
        }
    }
}

impl<'de, T: ExactInt> Deserialize<'de> for Distance<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged, bound = "T: ExactInt")]
        enum Repr<T: ExactInt> {
            Text(String),
            Field(QuadraticNumber<T>),
        }
        match Repr::<T>::deserialize(deserializer)? {
            Repr::Field(q) => Ok(Distance::from_quadratic(q)),
            Repr::Text(s) if s.trim() == "0" => Ok(Distance::Zero),
            Repr::Text(s) => {
                if let Some(e) = s.trim().strip_prefix("2^") {
                    let e: i64 = e.parse().map_err(D::Error::custom)?;
                    return Ok(Distance::Pow2(-e));
                }
                let q = super::parse::parse_quadratic::<T>(&s).map_err(D::Error::custom)?;
                if q.is_negative() {
                    return Err(D::Error::custom("negative distance"));
                }
                Ok(Distance::from_quadratic(q))
            }
        }
    }
}


impl<T: ExactInt> From<QuadraticNumber<T>> for Distance<T> {
    fn from(q: QuadraticNumber<T>) -> Self {
        Distance::from_quadratic(q)
    }
}
