//! Compact systems `(X, d, f)` with exact points, maps and metrics.

mod minimal;
mod open_set;
mod point;
mod sequence;
pub(crate) mod sft;
pub mod torus;

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use minimal::{check_minimal_equicontinuous, EquicontinuityVerdict, MinimalityReport, Modulus, Verdict};
pub use open_set::{hit_at, Hit, OpenSetSpec, MAX_BASIS};
pub use point::Point;
pub use sequence::{BlockProgram, Disagreement, Generator, SymbolicSequence, DEFAULT_COMPARISON_BOUND};

use crate::arith::{Distance, ExactInt, QuadraticNumber};
use crate::error::{Error, Result};
use torus::Matrix;

/// Longest orbit followed when expanding an `Orbit` subset.
pub const ORBIT_CAP: usize = 1 << 16;

/// A compact system: state space, self-map and metric.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum SystemSpec<T = BigInt> {
    FullShift {
        symbols: u32,
    },
    Sft {
        symbols: u32,
        forbidden: Vec<Vec<u8>>,
    },
    CircleRotation {
        angle: QuadraticNumber<T>,
    },
    Odometer {
        base: u32,
    },
    TorusAutomorphism {
        matrix: Matrix,
    },
    Product {
        factors: Vec<SystemSpec<T>>,
    },
    Restriction {
        parent: Box<SystemSpec<T>>,
        subset: Subset<T>,
    },
}

/// The invariant set a `Restriction` keeps.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum Subset<T = BigInt> {
    /// The whole parent space.
    Whole,
    Points { points: Vec<Point<T>> },
    /// The forward orbit of a periodic point.
    Orbit { seed: Point<T> },
}

/// A metric value together with whether the shift comparison bound was hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct DistanceReport<T: ExactInt = BigInt> {
    pub value: Distance<T>,
    /// Some shift coordinate agreed on the whole compared window and was
    /// reported as distance 0 without proof of equality.
    pub truncated: bool,
}

impl<T: ExactInt> SystemSpec<T> {
    pub fn full_shift(symbols: u32) -> Self {
        SystemSpec::FullShift { symbols }
    }

    pub fn rotation(angle: QuadraticNumber<T>) -> Self {
        SystemSpec::CircleRotation { angle }
    }

    pub fn golden_rotation() -> Self {
        SystemSpec::CircleRotation { angle: QuadraticNumber::golden_angle() }
    }

    pub fn odometer(base: u32) -> Self {
        SystemSpec::Odometer { base }
    }

    pub fn cat_map() -> Self {
        SystemSpec::TorusAutomorphism { matrix: [[2, 1], [1, 1]] }
    }

    pub fn product(factors: Vec<SystemSpec<T>>) -> Self {
        SystemSpec::Product { factors }
    }

    /// Restriction to a finite set of points.
    pub fn restrict(parent: SystemSpec<T>, points: Vec<Point<T>>) -> Result<Self> {
        let spec = SystemSpec::Restriction { parent: Box::new(parent), subset: Subset::Points { points } };
        spec.validate()?;
        Ok(spec)
    }

    /// Restriction to the orbit of a periodic point.
    pub fn orbit_of(parent: SystemSpec<T>, seed: Point<T>) -> Result<Self> {
        let spec = SystemSpec::Restriction { parent: Box::new(parent), subset: Subset::Orbit { seed } };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SystemSpec::FullShift { .. } => "full_shift",
            SystemSpec::Sft { .. } => "sft",
            SystemSpec::CircleRotation { .. } => "circle_rotation",
            SystemSpec::Odometer { .. } => "odometer",
            SystemSpec::TorusAutomorphism { .. } => "torus_automorphism",
            SystemSpec::Product { .. } => "product",
            SystemSpec::Restriction { .. } => "restriction",
        }
    }

    /// The system with any outer restrictions removed.
    pub fn ambient(&self) -> &SystemSpec<T> {
        match self {
            SystemSpec::Restriction { parent, .. } => parent.ambient(),
            other => other,
        }
    }

    /// Checks the structural invariants of the description.
    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::FullShift { symbols } => {
                if !(2..=256).contains(symbols) {
                    return Err(Error::InvalidSystem(format!("alphabet size {symbols} outside 2..=256")));
                }
            }
            SystemSpec::Sft { symbols, forbidden } => {
                let sft = sft::Sft::new(*symbols, forbidden)?;
                if !sft.extends_forever(&[])? {
                    return Err(Error::InvalidSystem("subshift has an empty language".into()));
                }
            }
            SystemSpec::CircleRotation { angle } => {
                if angle.is_negative() || *angle >= QuadraticNumber::one() {
                    return Err(Error::InvalidSystem(format!("rotation angle {angle} outside [0, 1)")));
                }
            }
            SystemSpec::Odometer { base } => {
                if !(2..=256).contains(base) {
                    return Err(Error::InvalidSystem(format!("odometer base {base} outside 2..=256")));
                }
            }
            SystemSpec::TorusAutomorphism { matrix } => torus::check_hyperbolic(matrix)?,
            SystemSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSystem("product needs at least one factor".into()));
                }
                factors.iter().try_for_each(|f| f.validate())?;
            }
            SystemSpec::Restriction { parent, subset } => {
                parent.validate()?;
                match subset {
                    Subset::Whole => {}
                    Subset::Points { points } => {
                        if points.is_empty() {
                            return Err(Error::InvalidSystem("restriction to an empty set".into()));
                        }
                        points.iter().try_for_each(|p| parent.check_point(p))?;
                        let set: HashSet<&Point<T>> = points.iter().collect();
                        for p in points {
                            let q = parent.step(p)?;
                            if !set.contains(&q) {
                                return Err(Error::NotInvariant(format!("{p} (image {q})")));
                            }
                        }
                    }
                    Subset::Orbit { seed } => {
                        parent.check_point(seed)?;
                        periodic_orbit(parent, seed)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// The points of a finite restriction, `None` for infinite spaces.
    pub fn finite_points(&self) -> Result<Option<Vec<Point<T>>>> {
        match self {
            SystemSpec::Restriction { parent, subset } => match subset {
                Subset::Whole => parent.finite_points(),
                Subset::Points { points } => Ok(Some(points.clone())),
                Subset::Orbit { seed } => periodic_orbit(parent, seed).map(Some),
            },
            _ => Ok(None),
        }
    }

    /// Errors unless `p` is a point of this system's space.
    pub fn check_point(&self, p: &Point<T>) -> Result<()> {
        let mismatch = || Error::KindMismatch { system: self.kind_name().into(), point: p.kind_name().into() };
        match (self, p) {
            (SystemSpec::FullShift { symbols }, Point::Shift { sequence }) => check_symbols(sequence, *symbols),
            (SystemSpec::Sft { symbols, forbidden }, Point::Shift { sequence }) => {
                check_symbols(sequence, *symbols)?;
                let sft = sft::Sft::new(*symbols, forbidden)?;
                let window = match sequence.eventual_period() {
                    Some((pre, per)) => pre + per * 2 + sft.longest_forbidden(),
                    None => DEFAULT_COMPARISON_BOUND as usize,
                };
                if !sft.is_allowed(&sequence.word(0, window)) {
                    return Err(Error::precondition(format!("{sequence} contains a forbidden word")));
                }
                Ok(())
            }
            (SystemSpec::CircleRotation { .. }, Point::Circle { x }) => check_unit(x),
            (SystemSpec::Odometer { base }, Point::Odometer { digits }) => {
                if !digits.is_prefix_periodic() {
                    return Err(Error::unsupported("odometer digits must be eventually periodic"));
                }
                check_symbols(digits, *base)
            }
            (SystemSpec::TorusAutomorphism { .. }, Point::Torus { x, y }) => {
                check_unit(x)?;
                check_unit(y)
            }
            (SystemSpec::Product { factors }, Point::Product { components }) => {
                if factors.len() != components.len() {
                    return Err(Error::precondition(format!(
                        "product of {} factors given a point with {} components",
                        factors.len(),
                        components.len()
                    )));
                }
                factors.iter().zip(components).try_for_each(|(f, c)| f.check_point(c))
            }
            (SystemSpec::Restriction { parent, subset }, _) => {
                parent.check_point(p)?;
                match subset {
                    Subset::Whole => Ok(()),
                    Subset::Points { points } if points.contains(p) => Ok(()),
                    Subset::Orbit { seed } if periodic_orbit(parent, seed)?.contains(p) => Ok(()),
                    _ => Err(Error::precondition(format!("{p} is not in the restricted set"))),
                }
            }
            _ => Err(mismatch()),
        }
    }

    /// `f(p)`.
    pub fn step(&self, p: &Point<T>) -> Result<Point<T>> {
        self.iterate(p, 1)
    }

    /// `f^n(p)`, computed in closed form where one exists.
    pub fn iterate(&self, p: &Point<T>, n: u64) -> Result<Point<T>> {
        let mismatch = || Error::KindMismatch { system: self.kind_name().into(), point: p.kind_name().into() };
        Ok(match (self, p) {
            (SystemSpec::FullShift { .. } | SystemSpec::Sft { .. }, Point::Shift { sequence }) => {
                Point::Shift { sequence: sequence.shifted(n) }
            }
            (SystemSpec::CircleRotation { angle }, Point::Circle { x }) => {
                let n = T::from_u64(n).expect("iteration count fits the integer backing");
                Point::Circle { x: (x + &angle.mul_int(&n)).fract() }
            }
            (SystemSpec::Odometer { base }, Point::Odometer { digits }) => {
                Point::Odometer { digits: odometer_add(digits, *base, n)? }
            }
            (SystemSpec::TorusAutomorphism { matrix }, Point::Torus { x, y }) => {
                let m = torus::mat_pow::<T>(matrix, n);
                let (x, y) = torus::apply(&m, x, y);
                Point::Torus { x, y }
            }
            (SystemSpec::Product { factors }, Point::Product { components }) if factors.len() == components.len() => {
                Point::Product {
                    components: factors.iter().zip(components).map(|(f, c)| f.iterate(c, n)).collect::<Result<_>>()?,
                }
            }
            (SystemSpec::Restriction { parent, .. }, _) => parent.iterate(p, n)?,
            _ => return Err(mismatch()),
        })
    }

    /// `d(p, q)`, with shift coordinates compared up to the default bound.
    pub fn distance(&self, p: &Point<T>, q: &Point<T>) -> Result<Distance<T>> {
        Ok(self.distance_report(p, q, DEFAULT_COMPARISON_BOUND)?.value)
    }

    /// `d(p, q)` with an explicit shift comparison bound.
    pub fn distance_report(&self, p: &Point<T>, q: &Point<T>, bound: u64) -> Result<DistanceReport<T>> {
        let mismatch = |pt: &Point<T>| Error::KindMismatch { system: self.kind_name().into(), point: pt.kind_name().into() };
        let exact = |value| DistanceReport { value, truncated: false };
        Ok(match (self, p, q) {
            (
                SystemSpec::FullShift { .. } | SystemSpec::Sft { .. },
                Point::Shift { sequence: x },
                Point::Shift { sequence: y },
            ) => match x.first_disagreement(y, bound) {
                Disagreement::At(k) => exact(Distance::Pow2(k as i64)),
                Disagreement::Never => exact(Distance::Zero),
                Disagreement::BeyondBound(_) => DistanceReport { value: Distance::Zero, truncated: true },
            },
            (SystemSpec::CircleRotation { .. }, Point::Circle { x }, Point::Circle { x: y }) => {
                exact(Distance::from_quadratic((x - y).circle_norm()))
            }
            (SystemSpec::Odometer { base }, Point::Odometer { digits: x }, Point::Odometer { digits: y }) => {
                match x.first_disagreement(y, bound) {
                    Disagreement::At(k) => exact(base_power_distance(*base, k)),
                    Disagreement::Never => exact(Distance::Zero),
                    Disagreement::BeyondBound(_) => DistanceReport { value: Distance::Zero, truncated: true },
                }
            }
            (SystemSpec::TorusAutomorphism { .. }, Point::Torus { x: x1, y: y1 }, Point::Torus { x: x2, y: y2 }) => {
                let dx = (x1 - x2).circle_norm();
                let dy = (y1 - y2).circle_norm();
                exact(Distance::from_quadratic(dx.max(dy)))
            }
            (SystemSpec::Product { factors }, Point::Product { components: a }, Point::Product { components: b })
                if factors.len() == a.len() && factors.len() == b.len() =>
            {
                let mut out = DistanceReport { value: Distance::Zero, truncated: false };
                for ((f, u), v) in factors.iter().zip(a).zip(b) {
                    let r = f.distance_report(u, v, bound)?;
                    out.truncated |= r.truncated;
                    if r.value > out.value {
                        out.value = r.value;
                    }
                }
                out
            }
            (SystemSpec::Restriction { parent, .. }, _, _) => parent.distance_report(p, q, bound)?,
            (SystemSpec::Product { .. }, Point::Product { .. }, _) => return Err(mismatch(q)),
            _ => return Err(mismatch(p)),
        })
    }

    /// Decides `d(p, q) ≤ eps` (or `< eps` when `strict`) exactly.
    ///
    /// Symbolic coordinates are compared only as deep as `eps` requires, so
    /// the answer never depends on the comparison bound unless `eps = 0`.
    pub fn within(&self, p: &Point<T>, q: &Point<T>, eps: &Distance<T>, strict: bool) -> Result<bool> {
        let mismatch = |pt: &Point<T>| Error::KindMismatch { system: self.kind_name().into(), point: pt.kind_name().into() };
        let symbolic = |x: &SymbolicSequence, y: &SymbolicSequence, base: u32| -> Result<bool> {
            if eps.is_zero() {
                if strict {
                    return Ok(false);
                }
                if x.is_prefix_periodic() && y.is_prefix_periodic() {
                    // canonical descriptions
                    return Ok(x == y);
                }
                return match x.first_disagreement(y, DEFAULT_COMPARISON_BOUND) {
                    Disagreement::Never => Ok(true),
                    Disagreement::At(_) => Ok(false),
                    Disagreement::BeyondBound(_) => {
                        Err(Error::unsupported(format!("equality of {x} and {y} is not decidable from their descriptions")))
                    }
                };
            }
            // least depth k with base^-k ≤ eps (< eps when strict)
            let mut k = 0u64;
            loop {
                let d = base_power_distance::<T>(base, k);
                if (strict && d < *eps) || (!strict && d <= *eps) {
                    break;
                }
                k += 1;
            }
            Ok(matches!(x.scan_disagreement(y, 0, k), Disagreement::BeyondBound(_)))
        };
        match (self, p, q) {
            (
                SystemSpec::FullShift { .. } | SystemSpec::Sft { .. },
                Point::Shift { sequence: x },
                Point::Shift { sequence: y },
            ) => symbolic(x, y, 2),
            (SystemSpec::Odometer { base }, Point::Odometer { digits: x }, Point::Odometer { digits: y }) => {
                symbolic(x, y, *base)
            }
            (SystemSpec::Product { factors }, Point::Product { components: a }, Point::Product { components: b })
                if factors.len() == a.len() && factors.len() == b.len() =>
            {
                for ((f, u), v) in factors.iter().zip(a).zip(b) {
                    if !f.within(u, v, eps, strict)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (SystemSpec::Restriction { parent, .. }, _, _) => parent.within(p, q, eps, strict),
            (SystemSpec::Product { .. }, Point::Product { .. }, _) => Err(mismatch(q)),
            (SystemSpec::Product { .. }, _, _) => Err(mismatch(p)),
            _ => {
                let d = self.distance(p, q)?;
                Ok(if strict { d < *eps } else { d <= *eps })
            }
        }
    }

    /// Converts the coefficient backing; `None` if something does not fit.
    pub fn convert<U: ExactInt>(&self) -> Option<SystemSpec<U>> {
        Some(match self {
            SystemSpec::FullShift { symbols } => SystemSpec::FullShift { symbols: *symbols },
            SystemSpec::Sft { symbols, forbidden } => SystemSpec::Sft { symbols: *symbols, forbidden: forbidden.clone() },
            SystemSpec::CircleRotation { angle } => SystemSpec::CircleRotation { angle: angle.convert()? },
            SystemSpec::Odometer { base } => SystemSpec::Odometer { base: *base },
            SystemSpec::TorusAutomorphism { matrix } => SystemSpec::TorusAutomorphism { matrix: *matrix },
            SystemSpec::Product { factors } => SystemSpec::Product {
                factors: factors.iter().map(|f| f.convert()).collect::<Option<_>>()?,
            },
            SystemSpec::Restriction { parent, subset } => SystemSpec::Restriction {
                parent: Box::new(parent.convert()?),
                subset: match subset {
                    Subset::Whole => Subset::Whole,
                    Subset::Points { points } => Subset::Points {
                        points: points.iter().map(|p| p.convert()).collect::<Option<_>>()?,
                    },
                    Subset::Orbit { seed } => Subset::Orbit { seed: seed.convert()? },
                },
            },
        })
    }
}

impl<T: ExactInt> std::fmt::Display for SystemSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemSpec::FullShift { symbols } => write!(f, "full shift on {symbols} symbols"),
            SystemSpec::Sft { symbols, forbidden } => {
                write!(f, "subshift on {symbols} symbols, {} forbidden words", forbidden.len())
            }
            SystemSpec::CircleRotation { angle } => write!(f, "rotation by {angle}"),
            SystemSpec::Odometer { base } => write!(f, "{base}-adic odometer"),
            SystemSpec::TorusAutomorphism { matrix } => write!(f, "torus automorphism {matrix:?}"),
            SystemSpec::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(") x ("))
            }
            SystemSpec::Restriction { parent, subset } => match subset {
                Subset::Whole => write!(f, "{parent}"),
                Subset::Points { points } => write!(f, "{parent} restricted to {} points", points.len()),
                Subset::Orbit { seed } => write!(f, "{parent} restricted to the orbit of {seed}"),
            },
        }
    }
}

impl<T: ExactInt> std::fmt::Debug for SystemSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

fn check_symbols(seq: &SymbolicSequence, symbols: u32) -> Result<()> {
    if seq.max_symbol() as u32 >= symbols {
        return Err(Error::precondition(format!("{seq} uses symbol {} outside 0..{symbols}", seq.max_symbol())));
    }
    Ok(())
}

fn check_unit<T: ExactInt>(x: &QuadraticNumber<T>) -> Result<()> {
    if x.is_negative() || *x >= QuadraticNumber::one() {
        return Err(Error::precondition(format!("coordinate {x} outside [0, 1)")));
    }
    Ok(())
}

/// `base^-k` as a distance.
fn base_power_distance<T: ExactInt>(base: u32, k: u64) -> Distance<T> {
    if base.is_power_of_two() {
        return Distance::Pow2(k as i64 * base.trailing_zeros() as i64);
    }
    let k = u32::try_from(k).expect("digit index fits u32");
    let p = num_traits::checked_pow(T::from_u32(base).unwrap(), k as usize)
        .expect("odometer distance overflows the integer backing");
    Distance::from_quadratic(QuadraticNumber::from_parts(T::one(), T::zero(), p))
}

/// Adds `n` to a `base`-adic integer with least significant digit first.
fn odometer_add(digits: &SymbolicSequence, base: u32, n: u64) -> Result<SymbolicSequence> {
    let (prefix, period) = digits
        .prefix_period()
        .ok_or_else(|| Error::unsupported("odometer digits must be eventually periodic"))?;
    let b = base as u128;
    let top = (base - 1) as u8;
    let all_top = period.iter().all(|&d| d == top);
    let mut out = Vec::new();
    let mut carry = n as u128;
    let mut i = 0u64;
    loop {
        let in_tail = i >= prefix.len() as u64;
        if carry == 0 && in_tail {
            break;
        }
        if carry == 1 && in_tail && all_top {
            // Infinite carry: every remaining digit wraps to zero.
            return SymbolicSequence::prefix_periodic(digits.alphabet(), out, vec![0]);
        }
        let s = digits.symbol_at(i) as u128 + carry;
        out.push((s % b) as u8);
        carry = s / b;
        i += 1;
    }
    let tail = digits.shifted(i);
    let (_, rotated) = tail.prefix_period().expect("tail of an eventually periodic sequence");
    SymbolicSequence::prefix_periodic(digits.alphabet(), out, rotated.to_vec())
}

/// The orbit of `seed`, which must return to itself within `ORBIT_CAP` steps.
fn periodic_orbit<T: ExactInt>(parent: &SystemSpec<T>, seed: &Point<T>) -> Result<Vec<Point<T>>> {
    let mut orbit = vec![seed.clone()];
    let mut p = parent.step(seed)?;
    while p != *seed {
        if orbit.len() >= ORBIT_CAP {
            return Err(Error::precondition(format!("{seed} is not periodic within {ORBIT_CAP} steps")));
        }
        orbit.push(p.clone());
        p = parent.step(&p)?;
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = QuadraticNumber<i64>;
    type S = SystemSpec<i64>;
    type P = Point<i64>;

    fn shift(s: &str) -> P {
        Point::shift(SymbolicSequence::parse(2, s).unwrap())
    }

    #[test]
    fn steps() {
        assert_eq!(S::full_shift(2).step(&shift("101(0)")).unwrap(), shift("01(0)"));
        let r = S::rotation(Q::rational(1, 4));
        assert_eq!(r.step(&P::circle(Q::rational(7, 8))).unwrap(), P::circle(Q::rational(1, 8)));
        let t = S::cat_map();
        let p = P::torus(Q::rational(1, 5), Q::rational(2, 5));
        assert_eq!(t.step(&p).unwrap(), P::torus(Q::rational(4, 5), Q::rational(3, 5)));
        assert!(matches!(r.step(&shift("(0)")), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn distances() {
        let s = S::full_shift(2);
        assert_eq!(s.distance(&shift("(0)"), &shift("(1)")).unwrap(), Distance::one());
        let r = S::golden_rotation();
        let d = r.distance(&P::circle(Q::rational(1, 8)), &P::circle(Q::rational(7, 8))).unwrap();
        assert_eq!(d, Distance::rational(1, 4));
        let prod = S::product(vec![s, r]);
        let a = P::product(vec![shift("(0)"), P::circle(Q::zero())]);
        let b = P::product(vec![shift("0(1)"), P::circle(Q::rational(1, 8))]);
        assert_eq!(prod.distance(&a, &b).unwrap(), Distance::rational(1, 2));
    }

    #[test]
    fn within_is_depth_limited() {
        let s = S::full_shift(2);
        let far = SymbolicSequence::prefix_periodic(2, [vec![0; 100_000], vec![1]].concat(), vec![0]).unwrap();
        // differs only at index 10^5, far past the comparison bound
        assert!(s.within(&shift("(0)"), &Point::shift(far.clone()), &Distance::Pow2(20), false).unwrap());
        assert!(!s.within(&shift("(0)"), &Point::shift(far), &Distance::Zero, false).unwrap());
        assert!(s.within(&shift("01(0)"), &shift("(0)"), &Distance::Pow2(1), false).unwrap());
        assert!(!s.within(&shift("01(0)"), &shift("(0)"), &Distance::Pow2(1), true).unwrap());
        assert!(s.within(&shift("01(0)"), &shift("(0)"), &Distance::rational(1, 3), false).is_ok_and(|b| !b));
        let o = S::odometer(3);
        let t = |x: &str| P::odometer(SymbolicSequence::parse(3, x).unwrap());
        assert!(o.within(&t("(0)"), &t("00(1)"), &Distance::rational(1, 9), false).unwrap());
        assert!(!o.within(&t("(0)"), &t("00(1)"), &Distance::rational(1, 9), true).unwrap());
        let r = S::golden_rotation();
        let (a, b) = (P::circle(Q::zero()), P::circle(Q::rational(1, 4)));
        assert!(r.within(&a, &b, &Distance::rational(1, 4), false).unwrap());
        assert!(!r.within(&a, &b, &Distance::rational(1, 4), true).unwrap());
    }

    #[test]
    fn truncated_comparison() {
        let s = S::full_shift(2);
        let far = SymbolicSequence::prefix_periodic(2, [vec![0; 40], vec![1]].concat(), vec![0]).unwrap();
        let r = s.distance_report(&shift("(0)"), &Point::shift(far), 16).unwrap();
        assert_eq!(r, DistanceReport { value: Distance::Zero, truncated: true });
    }

    #[test]
    fn odometer_carries() {
        let o = S::odometer(2);
        let d = |s: &str| P::odometer(SymbolicSequence::parse(2, s).unwrap());
        assert_eq!(o.step(&d("(0)")).unwrap(), d("1(0)"));
        assert_eq!(o.step(&d("1(0)")).unwrap(), d("01(0)"));
        assert_eq!(o.step(&d("(1)")).unwrap(), d("(0)"));
        assert_eq!(o.step(&d("11(01)")).unwrap(), d("001(10)"));
        assert_eq!(o.iterate(&d("(0)"), 6).unwrap(), d("011(0)"));
        assert_eq!(o.distance(&d("(0)"), &d("000(1)")).unwrap(), Distance::Pow2(3));
        let o3 = S::odometer(3);
        let t = |s: &str| P::odometer(SymbolicSequence::parse(3, s).unwrap());
        assert_eq!(o3.iterate(&t("(2)"), 1).unwrap(), t("(0)"));
        assert_eq!(o3.distance(&t("(0)"), &t("00(1)")).unwrap(), Distance::rational(1, 9));
    }

    #[test]
    fn iterate_matches_repeated_steps() {
        let t = S::cat_map();
        let mut p = P::torus(Q::rational(1, 7), Q::rational(3, 7));
        let start = p.clone();
        for _ in 0..9 {
            p = t.step(&p).unwrap();
        }
        assert_eq!(t.iterate(&start, 9).unwrap(), p);
    }

    #[test]
    fn validation() {
        assert!(S::rotation(Q::rational(5, 4)).validate().is_err());
        assert!(SystemSpec::<i64>::TorusAutomorphism { matrix: [[1, 1], [0, 1]] }.validate().is_err());
        let empty = S::Sft { symbols: 2, forbidden: vec![vec![0], vec![1]] };
        assert!(matches!(empty.validate(), Err(Error::InvalidSystem(_))));
        let escaping = S::restrict(S::full_shift(2), vec![shift("1(0)")]);
        assert!(matches!(escaping, Err(Error::NotInvariant(_))));
        let orbit = S::orbit_of(S::full_shift(2), shift("(001)")).unwrap();
        assert_eq!(orbit.finite_points().unwrap().unwrap().len(), 3);
        assert!(orbit.check_point(&shift("(010)")).is_ok());
        assert!(orbit.check_point(&shift("(0)")).is_err());
    }

    #[test]
    fn sft_points() {
        let golden = S::Sft { symbols: 2, forbidden: vec![vec![1, 1]] };
        assert!(golden.check_point(&shift("(10)")).is_ok());
        assert!(golden.check_point(&shift("0(110)")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = S::product(vec![S::full_shift(2), S::golden_rotation(), S::cat_map()]);
        let json = serde_json::to_string(&spec).unwrap();
        let back: S = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let r: S = serde_json::from_str(r#"{"kind":"circle_rotation","angle":{"a":"-1/2","b":"1/2"}}"#).unwrap();
        assert_eq!(r, S::golden_rotation());
    }
}
