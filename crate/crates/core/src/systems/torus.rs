//! Integer 2×2 matrices acting on the torus `R²/Z²`.



use crate::arith::{ExactInt, QuadraticNumber};
use crate::error::{Error, Result};

pub type Matrix = [[i64; 2]; 2];

pub fn det(m: &Matrix) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace(m: &Matrix) -> i64 {
    m[0][0] + m[1][1]
}

/// Rejects matrices that are not invertible over `Z` or not hyperbolic.
///
/// With `|det| = 1` the eigenvalues are real and off the unit circle iff
/// `|tr| > 2` (det 1) or `tr ≠ 0` (det −1).
pub fn check_hyperbolic(m: &Matrix) -> Result<()> {
    if m.iter().flatten().any(|e| e.unsigned_abs() > 1 << 20) {
        return Err(Error::InvalidSystem("matrix entries must stay below 2^20 in absolute value".into()));
    }
    let (d, t) = (det(m), trace(m));
    match d {
        1 if t.abs() > 2 => Ok(()),
        -1 if t != 0 => Ok(()),
        1 | -1 => Err(Error::InvalidSystem(format!("matrix {m:?} is not hyperbolic (trace {t}, det {d})"))),
        _ => Err(Error::InvalidSystem(format!("matrix {m:?} has determinant {d}, need ±1"))),
    }
}

/// Integer inverse of a determinant ±1 matrix.
pub fn inverse(m: &Matrix) -> Matrix {
    let d = det(m);
    debug_assert!(d.abs() == 1);
    [[d * m[1][1], -d * m[0][1]], [-d * m[1][0], d * m[0][0]]]
}

pub(crate) fn lift<T: ExactInt>(m: &Matrix) -> [[T; 2]; 2] {
    let e = |v: i64| T::from_i64(v).unwrap();
    [[e(m[0][0]), e(m[0][1])], [e(m[1][0]), e(m[1][1])]]
}

pub(crate) fn mat_mul<T: ExactInt>(a: &[[T; 2]; 2], b: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let entry = |i: usize, j: usize| {
        let x = a[i][0].checked_mul(&b[0][j]).expect("matrix power overflows the integer backing");
        let y = a[i][1].checked_mul(&b[1][j]).expect("matrix power overflows the integer backing");
        x.checked_add(&y).expect("matrix power overflows the integer backing")
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `m^n` by repeated squaring.
pub fn mat_pow<T: ExactInt>(m: &Matrix, mut n: u64) -> [[T; 2]; 2] {
    let mut result = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let mut base = lift::<T>(m);
    while n > 0 {
        if n & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        n >>= 1;
        if n > 0 {
            base = mat_mul(&base, &base);
        }
    }
    result
}

/// `m · (x, y)` without reduction mod 1.
pub fn apply_unreduced<T: ExactInt>(
    m: &[[T; 2]; 2],
    x: &QuadraticNumber<T>,
    y: &QuadraticNumber<T>,
) -> (QuadraticNumber<T>, QuadraticNumber<T>) {
    let row = |r: &[T; 2]| {
        let mut acc = QuadraticNumber::zero();
        if !r[0].is_zero() {
            acc = &acc + &x.mul_int(&r[0]);
        }
        if !r[1].is_zero() {
            acc = &acc + &y.mul_int(&r[1]);
        }
        acc
    };
    (row(&m[0]), row(&m[1]))
}

/// `m · (x, y) mod 1`.
pub fn apply<T: ExactInt>(
    m: &[[T; 2]; 2],
    x: &QuadraticNumber<T>,
    y: &QuadraticNumber<T>,
) -> (QuadraticNumber<T>, QuadraticNumber<T>) {
    let (u, v) = apply_unreduced(m, x, y);
    (u.fract(), v.fract())
}

/// Contracting eigenvalue and an eigenvector `(1, w)` for it, both in `Q(√5)`.
///
/// Requires `tr² − 4·det = 5·s²` for an integer `s`; other hyperbolic
/// matrices have their eigenvalues in a different quadratic field.
pub fn stable_eigen<T: ExactInt>(m: &Matrix) -> Result<(QuadraticNumber<T>, QuadraticNumber<T>)> {
    check_hyperbolic(m)?;
    let (t, d) = (trace(m), det(m));
    let disc = t * t - 4 * d;
    let s = if disc % 5 == 0 { num_integer::Roots::sqrt(&(disc / 5)) } else { 0 };
    if s == 0 || 5 * s * s != disc {
        return Err(Error::unsupported(format!(
            "eigenvalues of {m:?} lie outside Q(√5) (discriminant {disc})"
        )));
    }
    let two = T::from_u8(2).unwrap();
    let t_q = T::from_i64(t).unwrap();
    let s_q = T::from_i64(if t > 0 { -s } else { s }).unwrap();
    let lambda = QuadraticNumber::from_parts(t_q, s_q, two);
    let (a, b, c, dd) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let w = if b != 0 {
        // (a − λ)·1 + b·w = 0
        (&lambda - &QuadraticNumber::from_integer(T::from_i64(a).unwrap())).div_int(&T::from_i64(b).unwrap())
    } else {
        // c·1 + (d − λ)·w = 0
        let denom = &QuadraticNumber::from_integer(T::from_i64(dd).unwrap()) - &lambda;
        let num = QuadraticNumber::from_integer(T::from_i64(-c).unwrap());
        &num / &denom
    };
    debug_assert!(lambda.abs() < QuadraticNumber::one());
    Ok((lambda, w))
}
