use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, ToBigInt};
use num_integer::{Integer, Roots};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// Integer type backing the exact coefficients of rationals and `Q(√5)` numbers.
///
/// Implemented for `i64`, `i128` and `BigInt`. Fixed-width backings panic on
/// coefficient overflow instead of wrapping, so results are either exact or
/// absent; `BigInt` never overflows.
pub trait ExactInt:
    Integer
    + Signed
    + Roots
    + Clone
    + Hash
    + Debug
    + Display
    + ToBigInt
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
    /// Number of significant bits of `|self|` (0 for zero).
    fn bit_length(&self) -> u64;

    /// `self * 2^k`, or `None` on overflow.
    fn checked_mul_pow2(&self, k: u32) -> Option<Self>;

    fn from_bigint(value: &BigInt) -> Option<Self>;

    fn parse_decimal(s: &str) -> Option<Self>;
}

macro_rules! impl_exact_prim {
    ($t:ty) => {
        impl ExactInt for $t {
            fn bit_length(&self) -> u64 {
                (<$t>::BITS - self.unsigned_abs().leading_zeros()) as u64
            }

            fn checked_mul_pow2(&self, k: u32) -> Option<Self> {
                if *self == 0 {
                    return Some(0);
                }
                if k >= <$t>::BITS - 1 || self.bit_length() + k as u64 >= (<$t>::BITS - 1) as u64 {
                    return None;
                }
                Some(*self << k)
            }

            fn from_bigint(value: &BigInt) -> Option<Self> {
                value.to_string().parse().ok()
            }

            fn parse_decimal(s: &str) -> Option<Self> {
                s.parse().ok()
            }
        }
    };
}

impl_exact_prim!(i64);
impl_exact_prim!(i128);

impl ExactInt for BigInt {
    fn bit_length(&self) -> u64 {
        self.bits()
    }

    fn checked_mul_pow2(&self, k: u32) -> Option<Self> {
        Some(self << k)
    }

    fn from_bigint(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

const OVERFLOW: &str = "exact coefficient overflow: use the BigInt-backed types for this computation";

#[inline]
pub(crate) fn add<T: ExactInt>(x: &T, y: &T) -> T {
    x.checked_add(y).expect(OVERFLOW)
}

#[inline]
pub(crate) fn sub<T: ExactInt>(x: &T, y: &T) -> T {
    x.checked_sub(y).expect(OVERFLOW)
}

#[inline]
pub(crate) fn mul<T: ExactInt>(x: &T, y: &T) -> T {
    x.checked_mul(y).expect(OVERFLOW)
}

pub(crate) fn to_big<T: ExactInt>(x: &T) -> BigInt {
    x.to_bigint().expect("integer converts to BigInt")
}

pub(crate) fn from_big<T: ExactInt>(x: &BigInt) -> T {
    T::from_bigint(x).expect(OVERFLOW)
}

/// Sign of `a + b·√5` for integers `a`, `b`.
pub(crate) fn sign_sqrt5<T: ExactInt>(a: &T, b: &T) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let sa = a.signum();
    let sb = b.signum();
    if b.is_zero() {
        return sa.cmp(&T::zero());
    }
    if a.is_zero() || sa == sb {
        return sb.cmp(&T::zero());
    }
    // Opposite signs: compare a² with 5b².
    let five = T::from_u8(5).unwrap();
    let squares = a
        .checked_mul(a)
        .zip(b.checked_mul(b).and_then(|bb| bb.checked_mul(&five)));
    let cmp = match squares {
        Some((aa, bb5)) => aa.cmp(&bb5),
        None => {
            let (a, b) = (to_big(a), to_big(b));
            (&a * &a).cmp(&(&b * &b * 5u8))
        }
    };
    match (a.is_positive(), cmp) {
        (_, Equal) => unreachable!("√5 is irrational"),
        (true, c) => c,
        (false, c) => c.reverse(),
    }
}

/// `floor(b·√5)` for an integer `b`.
pub(crate) fn floor_sqrt5_times<T: ExactInt>(b: &T) -> T {
    if b.is_zero() {
        return T::zero();
    }
    let five = T::from_u8(5).unwrap();
    let root = match b.checked_mul(b).and_then(|bb| bb.checked_mul(&five)) {
        Some(bb5) => bb5.sqrt(),
        None => {
            let big = to_big(b);
            from_big(&(&big * &big * 5u8).sqrt())
        }
    };
    // 5b² is never a perfect square for b ≠ 0, so the root is strictly below √(5b²).
    if b.is_positive() {
        root
    } else {
        sub(&(-root), &T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_lengths() {
        assert_eq!(0i64.bit_length(), 0);
        assert_eq!(1i128.bit_length(), 1);
        assert_eq!((-8i64).bit_length(), 4);
        assert_eq!(BigInt::from(255).bit_length(), 8);
    }

    #[test]
    fn sqrt5_signs() {
        use std::cmp::Ordering::*;
        assert_eq!(sign_sqrt5(&3i64, &-1), Greater);
        assert_eq!(sign_sqrt5(&2i64, &-1), Less);
        assert_eq!(sign_sqrt5(&-3i64, &1), Less);
        assert_eq!(sign_sqrt5(&-2i64, &1), Greater);
        assert_eq!(sign_sqrt5(&0i64, &0), Equal);
    }

    #[test]
    fn floor_of_multiples() {
        assert_eq!(floor_sqrt5_times(&1i64), 2);
        assert_eq!(floor_sqrt5_times(&-1i64), -3);
        assert_eq!(floor_sqrt5_times(&10i128), 22);
        assert_eq!(floor_sqrt5_times(&BigInt::from(-10)), BigInt::from(-23));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let b: i128 = 1 << 100;
        assert_eq!(sign_sqrt5(&b, &(-b)), std::cmp::Ordering::Less);
        assert_eq!(sign_sqrt5(&(3 * b), &(-b)), std::cmp::Ordering::Greater);
    }
}
