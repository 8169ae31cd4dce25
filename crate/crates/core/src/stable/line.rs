//! Stable lines of hyperbolic toral automorphisms through periodic points.

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{Distance, ExactInt, QuadraticNumber};
use crate::error::{Error, Result};
use crate::systems::torus::{self, Matrix};
use crate::systems::{OpenSetSpec, Point, SystemSpec};

/// Longest period accepted for an anchor.
pub const PERIOD_CAP: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct StableLine<T: ExactInt = BigInt> {
    pub matrix: Matrix,
    pub anchor: Point<T>,
    pub period: u64,
    /// The contracting eigenvalue `λ`, `|λ| < 1`.
    pub eigenvalue: QuadraticNumber<T>,
    /// The line is `anchor + t·(1, slope)` mod 1.
    pub slope: QuadraticNumber<T>,
}

impl<T: ExactInt> StableLine<T> {
    pub fn point(&self, t: &QuadraticNumber<T>) -> Point<T> {
        let (ax, ay) = self.anchor.as_torus().expect("anchor is a torus point");
        Point::torus((ax + t).fract(), (ay + &(t * &self.slope)).fract())
    }
}

/// The stable line through a periodic point of `matrix`.
pub fn stable_line<T: ExactInt>(matrix: &Matrix, anchor: &Point<T>) -> Result<StableLine<T>> {
    let (eigenvalue, slope) = torus::stable_eigen::<T>(matrix)?;
    let spec = SystemSpec::TorusAutomorphism { matrix: *matrix };
    spec.check_point(anchor)?;
    let mut p = spec.step(anchor)?;
    let mut period = 1;
    while p != *anchor {
        if period == PERIOD_CAP {
            return Err(Error::precondition(format!("anchor {anchor} is not periodic with period at most {PERIOD_CAP}")));
        }
        p = spec.step(&p)?;
        period += 1;
    }
    Ok(StableLine { matrix: *matrix, anchor: anchor.clone(), period, eigenvalue, slope })
}

/// `anchor + t·v_s` mod 1 for the stable eigenvector `v_s = (1, w)`.
pub fn stable_line_point<T: ExactInt>(matrix: &Matrix, anchor: &Point<T>, t: &QuadraticNumber<T>) -> Result<Point<T>> {
    Ok(stable_line(matrix, anchor)?.point(t))
}

/// Whether some integer lift of `y − x` is a multiple of the stable eigenvector.
pub(crate) fn on_stable_line<T: ExactInt>(matrix: &Matrix, x: &Point<T>, y: &Point<T>) -> Result<bool> {
    let Ok((_, w)) = torus::stable_eigen::<T>(matrix) else { return Ok(false) };
    let ((x1, y1), (x2, y2)) = match (x.as_torus(), y.as_torus()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(false),
    };
    let dx = x2 - x1;
    let dy = y2 - y1;
    // need integers n1, n2 with dy + n2 = w·(dx + n1), i.e. n1·w − n2 = dy − w·dx
    let z = &dy - &(&w * &dx);
    let (wp, wq) = (w.rational_part(), w.sqrt5_part());
    if wq == Ratio::from_integer(T::zero()) {
        return Ok(false);
    }
    let n1 = z.sqrt5_part() / wq;
    if !n1.is_integer() {
        return Ok(false);
    }
    let n2 = n1 * wp - z.rational_part();
    Ok(n2.is_integer())
}

/// Line wraps searched per cell at `resolution`.
pub(crate) fn search_bound(resolution: u32) -> u64 {
    1 << (resolution.min(20) + 3)
}

/// A point of the stable line through `x` inside the box `cell`, with its
/// parameter, searching parameters `|t| ≤ bound + 1` outward from 0.
pub(crate) fn line_box_point<T: ExactInt>(
    matrix: &Matrix,
    x: &Point<T>,
    cell: &OpenSetSpec<T>,
    bound: u64,
) -> Result<Option<(QuadraticNumber<T>, Point<T>)>> {
    let OpenSetSpec::Box { x_center, x_radius, y_center, y_radius } = cell else {
        return Ok(None);
    };
    let Ok((_, w)) = torus::stable_eigen::<T>(matrix) else { return Ok(None) };
    let (ax, ay) = x.as_torus().ok_or_else(|| Error::precondition("stable lines need a torus point"))?;
    let int = |n: i64| QuadraticNumber::from_integer(T::from_i64(n).unwrap());
    let two = T::from_u8(2).unwrap();
    let base = (&(x_center - x_radius) - ax).fract();
    let x_width = x_radius.mul_int(&two);
    for step in 0..=2 * bound as i64 {
        // 0, −1, 1, −2, 2, ...
        let k = if step % 2 == 0 { step / 2 } else { -(step + 1) / 2 };
        let t0 = &base + &int(k);
        let t1 = &t0 + &x_width;
        let e0 = ay + &(&w * &t0);
        let e1 = ay + &(&w * &t1);
        let (lo, hi) = if e0 <= e1 { (e0, e1) } else { (e1, e0) };
        let n_lo = (&lo - &(y_center + y_radius)).floor().to_i64().expect("winding index fits i64");
        let n_hi = (&hi - &(y_center - y_radius)).floor().to_i64().expect("winding index fits i64") + 1;
        for n in n_lo..=n_hi {
            let a = &(y_center - y_radius) + &int(n);
            let b = &(y_center + y_radius) + &int(n);
            let i_lo = if a > lo { a } else { lo.clone() };
            let i_hi = if b < hi { b } else { hi.clone() };
            if i_lo >= i_hi {
                continue;
            }
            let mid = (&i_lo + &i_hi).div_int(&two);
            let t = &(&mid - ay) / &w;
            let p = Point::torus((ax + &t).fract(), mid.fract());
            if cell.contains(&p)? {
                return Ok(Some((t, p)));
            }
        }
    }
    Ok(None)
}

/// Exact distances `d(f^n anchor, f^n y)` for `y` on the stable line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct ContractionTrace<T: ExactInt = BigInt> {
    pub eigenvalue: QuadraticNumber<T>,
    pub point: Point<T>,
    /// Torus distances of the iterated points, `n = 0..=steps`.
    pub distances: Vec<Distance<T>>,
    /// Consecutive steps from `n = 0` with `d_(n+1) = |λ|·d_n` exactly.
    pub exact_ratio_steps: u64,
    /// First `n` where the torus distance differs from the unwrapped
    /// displacement `|λ|^n·|v|` because of reduction mod 1.
    pub first_wrap: Option<u64>,
}

/// Iterates the anchor and its stable-line point with the torus map and
/// compares each distance with the eigenvalue prediction.
pub fn stable_contraction_trace<T: ExactInt>(
    matrix: &Matrix,
    anchor: &Point<T>,
    t: &QuadraticNumber<T>,
    steps: u64,
) -> Result<ContractionTrace<T>> {
    let line = stable_line(matrix, anchor)?;
    let y = line.point(t);
    let spec = SystemSpec::TorusAutomorphism { matrix: *matrix };
    let lam = line.eigenvalue.abs();
    let mut unwrapped = t.abs().max((t * &line.slope).abs());
    let (mut a, mut b) = (anchor.clone(), y.clone());
    let mut distances = Vec::with_capacity(steps as usize + 1);
    let mut first_wrap = None;
    for n in 0..=steps {
        let d = spec.distance(&a, &b)?;
        if first_wrap.is_none() && d.to_quadratic() != unwrapped {
            first_wrap = Some(n);
        }
        distances.push(d);
        unwrapped = &unwrapped * &lam;
        if n < steps {
            a = spec.step(&a)?;
            b = spec.step(&b)?;
        }
    }
    let exact_ratio_steps = distances
        .windows(2)
        .take_while(|w| w[1].to_quadratic() == &w[0].to_quadratic() * &lam && !w[0].is_zero())
        .count() as u64;
    Ok(ContractionTrace { eigenvalue: line.eigenvalue, point: y, distances, exact_ratio_steps, first_wrap })
}
