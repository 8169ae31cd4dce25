use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::int::{self, ExactInt};
use super::parse;

/// An exact element `(a + b·√5) / c` of the real quadratic field `Q(√5)`.
///
/// Stored in lowest terms (`c > 0`, `gcd(a, b, c) = 1`), so structural
/// equality is field equality and the derived `Hash` is consistent with it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber<T = BigInt> {
    a: T,
    b: T,
    c: T,
}

impl<T: ExactInt> QuadraticNumber<T> {
    /// Builds `(a + b√5)/c` and reduces it. Panics if `c == 0`.
    pub fn from_parts(a: T, b: T, c: T) -> Self {
        assert!(!c.is_zero(), "zero denominator");
        let mut q = QuadraticNumber { a, b, c };
        q.reduce();
        q
    }

    /// `a + b·√5` from rational coefficients.
    pub fn new(a: Ratio<T>, b: Ratio<T>) -> Self {
        let (an, ad) = a.into();
        let (bn, bd) = b.into();
        let g = ad.gcd(&bd);
        let l = int::mul(&(ad.clone() / g), &bd);
        let a = int::mul(&an, &(l.clone() / ad));
        let b = int::mul(&bn, &(l.clone() / bd));
        Self::from_parts(a, b, l)
    }

    pub fn from_integer(n: T) -> Self {
        QuadraticNumber { a: n, b: T::zero(), c: T::one() }
    }

    pub fn from_ratio(r: Ratio<T>) -> Self {
        let (n, d) = r.into();
        Self::from_parts(n, T::zero(), d)
    }

    /// `p / q` as a field element.
    pub fn rational(p: i64, q: i64) -> Self {
        Self::from_parts(T::from_i64(p).unwrap(), T::zero(), T::from_i64(q).unwrap())
    }

    pub fn zero() -> Self {
        Self::from_integer(T::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(T::one())
    }

    pub fn sqrt5() -> Self {
        QuadraticNumber { a: T::zero(), b: T::one(), c: T::one() }
    }

    /// The golden rotation number `(√5 − 1)/2`.
    pub fn golden_angle() -> Self {
        Self::from_parts(-T::one(), T::one(), T::from_u8(2).unwrap())
    }

    fn reduce(&mut self) {
        if self.c.is_negative() {
            self.a = -self.a.clone();
            self.b = -self.b.clone();
            self.c = -self.c.clone();
        }
        if self.c.is_one() {
            return;
        }
        // Reduce mod c first so the gcd runs on small operands.
        let mut g = self.c.gcd(&self.a.mod_floor(&self.c));
        if g.is_one() {
            return;
        }
        g = g.gcd(&self.b.mod_floor(&g));
        if !g.is_one() {
            self.a = self.a.clone() / g.clone();
            self.b = self.b.clone() / g.clone();
            self.c = self.c.clone() / g;
        }
    }

    /// Numerators and common denominator `(a, b, c)` of `(a + b√5)/c`.
    pub fn parts(&self) -> (&T, &T, &T) {
        (&self.a, &self.b, &self.c)
    }

    pub fn rational_part(&self) -> Ratio<T> {
        Ratio::new(self.a.clone(), self.c.clone())
    }

    pub fn sqrt5_part(&self) -> Ratio<T> {
        Ratio::new(self.b.clone(), self.c.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        int::sign_sqrt5(&self.a, &self.b)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact `floor(self)`.
    pub fn floor(&self) -> T {
        // a + b√5 lies strictly between a + F and a + F + 1 where F = floor(b√5)
        // (or equals a when b = 0); no multiple of c fits strictly inside, so the
        // floor of the quotient is floor((a + F)/c).
        let f = int::floor_sqrt5_times(&self.b);
        int::add(&self.a, &f).div_floor(&self.c)
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let n = self.floor();
        if n.is_zero() {
            return self.clone();
        }
        // gcd(a − nc, b, c) = gcd(a, b, c) = 1, so the result is already reduced.
        QuadraticNumber {
            a: int::sub(&self.a, &int::mul(&n, &self.c)),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// Wraparound distance to the nearest integer, `min(frac, 1 − frac)`.
    pub fn circle_norm(&self) -> Self {
        let f = self.fract();
        let g = Self::one() - &f;
        if f <= g {
            f
        } else {
            g
        }
    }

    /// Field inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // c / (a + b√5) = c(a − b√5) / (a² − 5b²)
        let five = T::from_u8(5).unwrap();
        let norm = int::sub(
            &int::mul(&self.a, &self.a),
            &int::mul(&five, &int::mul(&self.b, &self.b)),
        );
        Some(Self::from_parts(
            int::mul(&self.c, &self.a),
            -int::mul(&self.c, &self.b),
            norm,
        ))
    }

    /// Galois conjugate `(a − b√5)/c`.
    pub fn conjugate(&self) -> Self {
        QuadraticNumber { a: self.a.clone(), b: -self.b.clone(), c: self.c.clone() }
    }

    pub fn mul_int(&self, n: &T) -> Self {
        Self::from_parts(int::mul(&self.a, n), int::mul(&self.b, n), self.c.clone())
    }

    pub fn div_int(&self, n: &T) -> Self {
        Self::from_parts(self.a.clone(), self.b.clone(), int::mul(&self.c, n))
    }

    pub fn add_int(&self, n: &T) -> Self {
        QuadraticNumber {
            a: int::add(&self.a, &int::mul(n, &self.c)),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// Compares `self` with `2^-k`.
    pub fn cmp_pow2(&self, k: i64) -> Ordering {
        if !self.is_positive() {
            return Ordering::Less;
        }
        if k < 0 {
            // 2^|k| is an integer.
            let m = u32::try_from(-k).expect("exponent in range");
            return match T::one().checked_mul_pow2(m) {
                Some(p) => self.cmp(&Self::from_integer(p)),
                None => self.to_big().cmp(&QuadraticNumber::from_integer(BigInt::one() << m)),
            };
        }
        // self > 2^-(bits(c) + bits(|a| + 3|b|)); see the norm bound a² − 5b² ∈ Z \ {0}.
        let three = T::from_u8(3).unwrap();
        let spread = self.a.abs().checked_add(&int::mul(&three, &self.b.abs()));
        if let Some(spread) = spread {
            let lower = self.c.bit_length() + spread.bit_length();
            if k as u64 >= lower {
                return Ordering::Greater;
            }
        }
        let k = k as u32;
        let scaled = self
            .a
            .checked_mul_pow2(k)
            .zip(self.b.checked_mul_pow2(k))
            .and_then(|(a, b)| a.checked_sub(&self.c).map(|a| (a, b)));
        match scaled {
            Some((a, b)) => int::sign_sqrt5(&a, &b),
            None => {
                let big = self.to_big();
                let a = (&big.a << k) - &big.c;
                let b = &big.b << k;
                int::sign_sqrt5(&a, &b)
            }
        }
    }

    pub fn to_big(&self) -> QuadraticNumber<BigInt> {
        QuadraticNumber { a: int::to_big(&self.a), b: int::to_big(&self.b), c: int::to_big(&self.c) }
    }

    /// Converts between integer backings; `None` if a coefficient does not fit.
    pub fn convert<U: ExactInt>(&self) -> Option<QuadraticNumber<U>> {
        Some(QuadraticNumber {
            a: U::from_bigint(&int::to_big(&self.a))?,
            b: U::from_bigint(&int::to_big(&self.b))?,
            c: U::from_bigint(&int::to_big(&self.c))?,
        })
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        let big = self.to_big();
        let a = big.a.to_f64().unwrap_or(f64::NAN);
        let b = big.b.to_f64().unwrap_or(f64::NAN);
        let c = big.c.to_f64().unwrap_or(f64::NAN);
        if big.a.sign() != big.b.sign() && !big.a.is_zero() && !big.b.is_zero() {
            // a + b√5 = (a² − 5b²)/(a − b√5) avoids cancellation
            let norm = (&big.a * &big.a - BigInt::from(5) * &big.b * &big.b).to_f64().unwrap_or(f64::NAN);
            return norm / (a - b * 5f64.sqrt()) / c;
        }
        (a + b * 5f64.sqrt()) / c
    }

    /// Writes the coefficient pair as `"p/q"` strings.
    pub fn coefficient_strings(&self) -> (String, String) {
        (ratio_string(&self.rational_part()), ratio_string(&self.sqrt5_part()))
    }
}

pub(crate) fn ratio_string<T: ExactInt>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl<T: ExactInt> PartialOrd for QuadraticNumber<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: ExactInt> Ord for QuadraticNumber<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.c == other.c {
            let a = int::sub(&self.a, &other.a);
            let b = int::sub(&self.b, &other.b);
            return int::sign_sqrt5(&a, &b);
        }
        let a = int::sub(&int::mul(&self.a, &other.c), &int::mul(&other.a, &self.c));
        let b = int::sub(&int::mul(&self.b, &other.c), &int::mul(&other.b, &self.c));
        int::sign_sqrt5(&a, &b)
    }
}

impl<'a, T: ExactInt> Add<&'a QuadraticNumber<T>> for &'a QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    fn add(self, rhs: &QuadraticNumber<T>) -> QuadraticNumber<T> {
        if self.c == rhs.c {
            return QuadraticNumber::from_parts(
                int::add(&self.a, &rhs.a),
                int::add(&self.b, &rhs.b),
                self.c.clone(),
            );
        }
        let g = self.c.gcd(&rhs.c);
        let left = self.c.clone() / g.clone();
        let right = rhs.c.clone() / g;
        QuadraticNumber::from_parts(
            int::add(&int::mul(&self.a, &right), &int::mul(&rhs.a, &left)),
            int::add(&int::mul(&self.b, &right), &int::mul(&rhs.b, &left)),
            int::mul(&left, &rhs.c),
        )
    }
}

impl<'a, T: ExactInt> Sub<&'a QuadraticNumber<T>> for &'a QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    fn sub(self, rhs: &QuadraticNumber<T>) -> QuadraticNumber<T> {
        self + &(-rhs)
    }
}

impl<'a, T: ExactInt> Mul<&'a QuadraticNumber<T>> for &'a QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    fn mul(self, rhs: &QuadraticNumber<T>) -> QuadraticNumber<T> {
        let five = T::from_u8(5).unwrap();
        let a = int::add(
            &int::mul(&self.a, &rhs.a),
            &int::mul(&five, &int::mul(&self.b, &rhs.b)),
        );
        let b = int::add(&int::mul(&self.a, &rhs.b), &int::mul(&self.b, &rhs.a));
        QuadraticNumber::from_parts(a, b, int::mul(&self.c, &rhs.c))
    }
}

impl<'a, T: ExactInt> Div<&'a QuadraticNumber<T>> for &'a QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QuadraticNumber<T>) -> QuadraticNumber<T> {
        self * &rhs.recip().expect("division by zero")
    }
}

impl<T: ExactInt> Neg for &QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    fn neg(self) -> QuadraticNumber<T> {
        QuadraticNumber { a: -self.a.clone(), b: -self.b.clone(), c: self.c.clone() }
    }
}

impl<T: ExactInt> Neg for QuadraticNumber<T> {
    type Output = QuadraticNumber<T>;
    fn neg(self) -> QuadraticNumber<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: ExactInt> $tr<QuadraticNumber<T>> for QuadraticNumber<T> {
            type Output = QuadraticNumber<T>;
            fn $m(self, rhs: QuadraticNumber<T>) -> QuadraticNumber<T> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, T: ExactInt> $tr<&'a QuadraticNumber<T>> for QuadraticNumber<T> {
            type Output = QuadraticNumber<T>;
            fn $m(self, rhs: &QuadraticNumber<T>) -> QuadraticNumber<T> {
                (&self).$m(rhs)
            }
        }
        impl<'a, T: ExactInt> $tr<QuadraticNumber<T>> for &'a QuadraticNumber<T> {
            type Output = QuadraticNumber<T>;
            fn $m(self, rhs: QuadraticNumber<T>) -> QuadraticNumber<T> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<T: ExactInt> fmt::Debug for QuadraticNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√5)/{}", self.a, self.b, self.c)
    }
}

impl<T: ExactInt> fmt::Display for QuadraticNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rational_part();
        if self.b.is_zero() {
            return write!(f, "{}/{}", r.numer(), r.denom());
        }
        let s = self.sqrt5_part();
        let sign = if s.numer().is_negative() { "-" } else { "+" };
        write!(f, "{}/{}{sign}{}/{}*sqrt5", r.numer(), r.denom(), s.numer().abs(), s.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct Coefficients {
    a: String,
    b: String,
}

impl<T: ExactInt> Serialize for QuadraticNumber<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (a, b) = self.coefficient_strings();
        Coefficients { a, b }.serialize(serializer)
    }
}

impl<'de, T: ExactInt> Deserialize<'de> for QuadraticNumber<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let c = Coefficients::deserialize(deserializer)?;
        let a = parse::parse_ratio::<T>(&c.a).map_err(D::Error::custom)?;
        let b = parse::parse_ratio::<T>(&c.b).map_err(D::Error::custom)?;
        Ok(QuadraticNumber::new(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = QuadraticNumber<i64>;

    fn q(a: (i64, i64), b: (i64, i64)) -> Q {
        Q::new(Ratio::new(a.0, a.1), Ratio::new(b.0, b.1))
    }

    #[test]
    fn display_and_approx() {
        assert_eq!(q((3, 2), (-1, 2)).to_string(), "3/2-1/2*sqrt5");
        assert_eq!(q((1, 3), (2, 1)).to_string(), "1/3+2/1*sqrt5");
        // λ^60 for λ = (3 − √5)/2 is about 9.3e-26; the naive sum cancels to noise
        let lam: QuadraticNumber<BigInt> = QuadraticNumber::new(Ratio::new(3.into(), 2.into()), Ratio::new((-1).into(), 2.into()));
        let mut p = QuadraticNumber::one();
        for _ in 0..60 {
            p = &p * &lam;
        }
        let want = ((3.0 - 5f64.sqrt()) / 2.0).powi(60);
        assert!((p.approx() / want - 1.0).abs() < 1e-9, "{}", p.approx());
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Q::from_parts(2, 4, 6), Q::from_parts(1, 2, 3));
        assert_eq!(Q::from_parts(-2, 0, -4), Q::rational(1, 2));
        let x = q((1, 2), (1, 3));
        assert_eq!(x.parts(), (&3, &2, &6));
    }

    #[test]
    fn floor_and_fract() {
        let g = Q::golden_angle();
        assert_eq!(g.floor(), 0);
        assert_eq!((&g + &g).floor(), 1);
        assert_eq!((-&g).floor(), -1);
        assert_eq!(Q::rational(-7, 8).fract(), Q::rational(1, 8));
        assert_eq!(Q::rational(9, 8).fract(), Q::rational(1, 8));
        let phi = Q::sqrt5();
        assert_eq!(phi.floor(), 2);
        assert_eq!(phi.fract(), Q::from_parts(-2, 1, 1));
    }

    #[test]
    fn field_identities() {
        let x = q((3, 7), (-2, 5));
        let y = q((-1, 4), (5, 9));
        assert_eq!(&(&x * &y) / &y, x);
        assert_eq!(&(&x + &y) - &y, x);
        assert_eq!(&x * &x.recip().unwrap(), Q::one());
        let golden = Q::golden_angle();
        // (√5 − 1)/2 satisfies t² + t − 1 = 0
        assert_eq!(&(&golden * &golden) + &golden, Q::one());
    }

    #[test]
    fn ordering_matches_real_embedding() {
        let mut xs = [Q::rational(1, 2),
            Q::golden_angle(),
            Q::rational(5, 8),
            q((0, 1), (1, 4)),
            Q::rational(-1, 3),
            Q::sqrt5()];
        xs.sort();
        let approx: Vec<f64> = xs.iter().map(|x| x.approx()).collect();
        assert!(approx.windows(2).all(|w| w[0] < w[1]), "{approx:?}");
    }

    #[test]
    fn compare_with_powers_of_two() {
        assert_eq!(Q::rational(1, 256).cmp_pow2(8), Ordering::Equal);
        assert_eq!(Q::rational(1, 255).cmp_pow2(8), Ordering::Greater);
        assert_eq!(Q::rational(1, 257).cmp_pow2(8), Ordering::Less);
        assert_eq!(Q::rational(3, 1).cmp_pow2(-1), Ordering::Greater);
        assert_eq!(Q::golden_angle().cmp_pow2(1), Ordering::Greater);
        assert_eq!(Q::golden_angle().cmp_pow2(100_000), Ordering::Greater);
        assert_eq!(Q::zero().cmp_pow2(3), Ordering::Less);
        // 1/2^70 needs the BigInt path under i64 backing.
        let tiny = QuadraticNumber::<BigInt>::from_parts(BigInt::one(), BigInt::zero(), BigInt::one() << 70);
        assert_eq!(tiny.cmp_pow2(70), Ordering::Equal);
        assert_eq!(tiny.cmp_pow2(69), Ordering::Less);
        assert_eq!(tiny.cmp_pow2(71), Ordering::Greater);
    }

    #[test]
    fn circle_norm_wraps() {
        assert_eq!(Q::rational(7, 8).circle_norm(), Q::rational(1, 8));
        assert_eq!(Q::rational(-3, 4).circle_norm(), Q::rational(1, 4));
        assert_eq!(Q::rational(1, 2).circle_norm(), Q::rational(1, 2));
    }

    #[test]
    fn json_coefficients() {
        let x = q((1, 2), (-3, 4));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"1/2","b":"-3/4"}"#);
        let back: Q = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
