//! Basis open sets, membership and exact hitting tests `f^i(U) ∩ V ≠ ∅`.

use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

use super::{sft, torus, Point, SymbolicSequence, SystemSpec};
use crate::arith::{ExactInt, QuadraticNumber};
use crate::error::{Error, Result};

/// Largest basis `basis` will build.
pub const MAX_BASIS: usize = 1 << 16;
/// Lattice columns examined by one torus hitting test before giving up.
const TORUS_COLUMN_CAP: u64 = 1 << 16;

/// A nonempty basic open set.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum OpenSetSpec<T = BigInt> {
    /// Sequences reading `word` at positions `offset, offset+1, ...`.
    Cylinder {
        word: Vec<u8>,
        #[serde(default)]
        offset: u64,
    },
    /// The arc `[center − radius, center + radius)` mod 1.
    Arc { center: QuadraticNumber<T>, radius: QuadraticNumber<T> },
    /// A product of two arcs on the torus.
    Box {
        x_center: QuadraticNumber<T>,
        x_radius: QuadraticNumber<T>,
        y_center: QuadraticNumber<T>,
        y_radius: QuadraticNumber<T>,
    },
    /// Odometer points whose lowest digits are `digits`.
    DigitCylinder { digits: Vec<u8> },
    Product { components: Vec<OpenSetSpec<T>> },
    /// A set of isolated points of a finite restriction.
    Points { points: Vec<Point<T>> },
}

/// Outcome of one hitting test, with a point `x ∈ U` such that `f^i(x) ∈ V`
/// when one is easy to exhibit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit<T: ExactInt = BigInt> {
    pub hit: bool,
    pub witness: Option<Point<T>>,
}

impl<T: ExactInt> Hit<T> {
    fn miss() -> Self {
        Hit { hit: false, witness: None }
    }
}

impl<T: ExactInt> OpenSetSpec<T> {
    pub fn cylinder(word: Vec<u8>) -> Self {
        OpenSetSpec::Cylinder { word, offset: 0 }
    }

    pub fn arc(center: QuadraticNumber<T>, radius: QuadraticNumber<T>) -> Self {
        OpenSetSpec::Arc { center, radius }
    }

    pub fn square(x: QuadraticNumber<T>, y: QuadraticNumber<T>, radius: QuadraticNumber<T>) -> Self {
        OpenSetSpec::Box { x_center: x, x_radius: radius.clone(), y_center: y, y_radius: radius }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OpenSetSpec::Cylinder { .. } => "cylinder",
            OpenSetSpec::Arc { .. } => "arc",
            OpenSetSpec::Box { .. } => "box",
            OpenSetSpec::DigitCylinder { .. } => "digit_cylinder",
            OpenSetSpec::Product { .. } => "product",
            OpenSetSpec::Points { .. } => "points",
        }
    }

    /// Whether `p` lies in the set.
    pub fn contains(&self, p: &Point<T>) -> Result<bool> {
        let mismatch = || Error::KindMismatch { system: self.kind_name().into(), point: p.kind_name().into() };
        Ok(match (self, p) {
            (OpenSetSpec::Points { points }, _) => points.contains(p),
            (OpenSetSpec::Cylinder { word, offset }, Point::Shift { sequence }) => {
                word.iter().enumerate().all(|(k, &s)| sequence.symbol_at(offset + k as u64) == s)
            }
            (OpenSetSpec::DigitCylinder { digits }, Point::Odometer { digits: d }) => {
                digits.iter().enumerate().all(|(k, &s)| d.symbol_at(k as u64) == s)
            }
            (OpenSetSpec::Arc { center, radius }, Point::Circle { x }) => in_arc(x, center, radius),
            (OpenSetSpec::Box { x_center, x_radius, y_center, y_radius }, Point::Torus { x, y }) => {
                in_arc(x, x_center, x_radius) && in_arc(y, y_center, y_radius)
            }
            (OpenSetSpec::Product { components: sets }, Point::Product { components })
                if sets.len() == components.len() =>
            {
                for (s, c) in sets.iter().zip(components) {
                    if !s.contains(c)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => return Err(mismatch()),
        })
    }

    /// The preimage `f^-j(self)` where it is again a basic set.
    pub fn preimage(&self, spec: &SystemSpec<T>, j: u64) -> Result<OpenSetSpec<T>> {
        Ok(match (spec, self) {
            (SystemSpec::Restriction { parent, .. }, OpenSetSpec::Points { .. }) => {
                let points = spec
                    .finite_points()?
                    .ok_or_else(|| Error::unsupported("point sets need a finite restriction"))?;
                let mut pre = Vec::new();
                for p in points {
                    if self.contains(&parent.iterate(&p, j)?)? {
                        pre.push(p);
                    }
                }
                OpenSetSpec::Points { points: pre }
            }
            (SystemSpec::Restriction { parent, .. }, _) => self.preimage(parent, j)?,
            (SystemSpec::FullShift { .. } | SystemSpec::Sft { .. }, OpenSetSpec::Cylinder { word, offset }) => {
                OpenSetSpec::Cylinder { word: word.clone(), offset: offset + j }
            }
            (SystemSpec::CircleRotation { angle }, OpenSetSpec::Arc { center, radius }) => {
                let j = T::from_u64(j).expect("index fits the integer backing");
                OpenSetSpec::Arc { center: (center - &angle.mul_int(&j)).fract(), radius: radius.clone() }
            }
            (SystemSpec::Product { factors }, OpenSetSpec::Product { components }) if factors.len() == components.len() => {
                OpenSetSpec::Product {
                    components: factors.iter().zip(components).map(|(f, c)| c.preimage(f, j)).collect::<Result<_>>()?,
                }
            }
            _ => {
                return Err(Error::unsupported(format!(
                    "preimage of a {} under a {} map",
                    self.kind_name(),
                    spec.kind_name()
                )))
            }
        })
    }
}

impl<T: ExactInt> std::fmt::Display for OpenSetSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let word = |w: &[u8]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("");
        match self {
            OpenSetSpec::Cylinder { word: w, offset: 0 } => write!(f, "[{}]", word(w)),
            OpenSetSpec::Cylinder { word: w, offset } => write!(f, "[{}]@{offset}", word(w)),
            OpenSetSpec::Arc { center, radius } => write!(f, "arc({center} ± {radius})"),
            OpenSetSpec::Box { x_center, x_radius, y_center, y_radius } => {
                write!(f, "box({x_center} ± {x_radius}; {y_center} ± {y_radius})")
            }
            OpenSetSpec::DigitCylinder { digits } => write!(f, "digits[{}]", word(digits)),
            OpenSetSpec::Product { components } => {
                let parts: Vec<String> = components.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", parts.join(" x "))
            }
            OpenSetSpec::Points { points } => {
                let parts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

impl<T: ExactInt> std::fmt::Debug for OpenSetSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

/// `x ∈ [c − r, c + r)` mod 1.
fn in_arc<T: ExactInt>(x: &QuadraticNumber<T>, c: &QuadraticNumber<T>, r: &QuadraticNumber<T>) -> bool {
    let width = r.mul_int(&T::from_u8(2).unwrap());
    if width >= QuadraticNumber::one() {
        return true;
    }
    (&(x - c) + r).fract() < width
}

impl<T: ExactInt> SystemSpec<T> {
    /// A finite cover by basic open sets of diameter at most `2^-resolution`.
    pub fn basis(&self, resolution: u32) -> Result<Vec<OpenSetSpec<T>>> {
        if resolution == 0 {
            return Err(Error::precondition("resolution must be at least 1"));
        }
        let too_big = |n: f64| {
            Error::Budget(format!("basis of about {n:.0} sets exceeds the cap {MAX_BASIS}; lower the resolution"))
        };
        Ok(match self {
            SystemSpec::FullShift { symbols } | SystemSpec::Sft { symbols, .. } => {
                let n = (*symbols as f64).powi(resolution as i32);
                if n > MAX_BASIS as f64 {
                    return Err(too_big(n));
                }
                let words = words(*symbols, resolution as usize);
                match self {
                    SystemSpec::Sft { symbols, forbidden } => {
                        let sft = sft::Sft::new(*symbols, forbidden)?;
                        let mut keep = Vec::new();
                        for w in words {
                            if sft.extends_forever(&w)? {
                                keep.push(OpenSetSpec::cylinder(w));
                            }
                        }
                        keep
                    }
                    _ => words.into_iter().map(OpenSetSpec::cylinder).collect(),
                }
            }
            SystemSpec::Odometer { base } => {
                let n = (*base as f64).powi(resolution as i32);
                if n > MAX_BASIS as f64 {
                    return Err(too_big(n));
                }
                words(*base, resolution as usize)
                    .into_iter()
                    .map(|digits| OpenSetSpec::DigitCylinder { digits })
                    .collect()
            }
            SystemSpec::CircleRotation { .. } => {
                if resolution > 16 {
                    return Err(too_big(2f64.powi(resolution as i32)));
                }
                let n = 1i64 << resolution;
                let radius = QuadraticNumber::rational(1, 2 * n);
                (0..n).map(|k| OpenSetSpec::arc(QuadraticNumber::rational(k, n), radius.clone())).collect()
            }
            SystemSpec::TorusAutomorphism { .. } => {
                if resolution > 8 {
                    return Err(too_big(4f64.powi(resolution as i32)));
                }
                let n = 1i64 << resolution;
                let radius = QuadraticNumber::rational(1, 2 * n);
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        out.push(OpenSetSpec::square(
                            QuadraticNumber::rational(i, n),
                            QuadraticNumber::rational(j, n),
                            radius.clone(),
                        ));
                    }
                }
                out
            }
            SystemSpec::Product { factors } => {
                let bases = factors.iter().map(|f| f.basis(resolution)).collect::<Result<Vec<_>>>()?;
                let n: f64 = bases.iter().map(|b| b.len() as f64).product();
                if n > MAX_BASIS as f64 {
                    return Err(too_big(n));
                }
                let mut out: Vec<Vec<OpenSetSpec<T>>> = vec![vec![]];
                for b in &bases {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            b.iter().map(move |s| {
                                let mut v = prefix.clone();
                                v.push(s.clone());
                                v
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|components| OpenSetSpec::Product { components }).collect()
            }
            SystemSpec::Restriction { parent, .. } => match self.finite_points()? {
                Some(points) => points.into_iter().map(|p| OpenSetSpec::Points { points: vec![p] }).collect(),
                None => parent.basis(resolution)?,
            },
        })
    }
}

pub(crate) fn words(symbols: u32, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u8>| {
                (0..symbols as u8).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Decides whether `f^i(U) ∩ V ≠ ∅` exactly.
pub fn hit_at<T: ExactInt>(spec: &SystemSpec<T>, u: &OpenSetSpec<T>, v: &OpenSetSpec<T>, i: u64) -> Result<Hit<T>> {
    let unsupported = || {
        Error::unsupported(format!("hitting test between a {} and a {} in a {} system", u.kind_name(), v.kind_name(), spec.kind_name()))
    };
    match spec {
        SystemSpec::Restriction { parent, .. } => {
            if let Some(points) = spec.finite_points()? {
                for p in points {
                    if u.contains(&p)? && v.contains(&parent.iterate(&p, i)?)? {
                        return Ok(Hit { hit: true, witness: Some(p) });
                    }
                }
                return Ok(Hit::miss());
            }
            hit_at(parent, u, v, i)
        }
        SystemSpec::FullShift { symbols } | SystemSpec::Sft { symbols, .. } => {
            let (OpenSetSpec::Cylinder { word: wu, offset: ou }, OpenSetSpec::Cylinder { word: wv, offset: ov }) = (u, v)
            else {
                return Err(unsupported());
            };
            let len = (ou + wu.len() as u64).max(i + ov + wv.len() as u64);
            let len = usize::try_from(len).map_err(|_| Error::Budget("cylinder constraint too long".into()))?;
            let mut constraints: Vec<Option<u8>> = vec![None; len];
            let placements = [(*ou as usize, wu), ((i + ov) as usize, wv)];
            for (start, word) in placements {
                for (k, &s) in word.iter().enumerate() {
                    match constraints[start + k] {
                        Some(t) if t != s => return Ok(Hit::miss()),
                        _ => constraints[start + k] = Some(s),
                    }
                }
            }
            let alphabet = *symbols;
            match spec {
                SystemSpec::Sft { forbidden, .. } => {
                    let sft = sft::Sft::new(alphabet, forbidden)?;
                    let Some(word) = sft.complete(&constraints)? else {
                        return Ok(Hit::miss());
                    };
                    let (middle, cycle) = sft.extension(&word)?.expect("completed words extend");
                    let prefix = [word, middle].concat();
                    let seq = SymbolicSequence::prefix_periodic(alphabet, prefix, cycle)?;
                    Ok(Hit { hit: true, witness: Some(Point::shift(seq)) })
                }
                _ => {
                    let prefix = constraints.iter().map(|c| c.unwrap_or(0)).collect();
                    let seq = SymbolicSequence::prefix_periodic(alphabet, prefix, vec![0])?;
                    Ok(Hit { hit: true, witness: Some(Point::shift(seq)) })
                }
            }
        }
        SystemSpec::CircleRotation { angle } => {
            let (OpenSetSpec::Arc { center: c1, radius: r1 }, OpenSetSpec::Arc { center: c2, radius: r2 }) = (u, v) else {
                return Err(unsupported());
            };
            let n = T::from_u64(i).expect("index fits the integer backing");
            let moved = c1 + &angle.mul_int(&n);
            // Signed offset from the moved centre to c2, in [-1/2, 1/2).
            let half = QuadraticNumber::rational(1, 2);
            let d = &(&(c2 - &moved) + &half).fract() - &half;
            if d.abs() >= r1 + r2 {
                return Ok(Hit::miss());
            }
            let lo = (-r1).max(&d - r2);
            let hi = r1.clone().min(&d + r2);
            let mid = (&lo + &hi).div_int(&T::from_u8(2).unwrap());
            Ok(Hit { hit: true, witness: Some(Point::circle(c1 + &mid)) })
        }
        SystemSpec::Odometer { base } => {
            let (OpenSetSpec::DigitCylinder { digits: du }, OpenSetSpec::DigitCylinder { digits: dv }) = (u, v) else {
                return Err(unsupported());
            };
            odometer_hit(*base, du, dv, i)
        }
        SystemSpec::TorusAutomorphism { matrix } => {
            let (
                OpenSetSpec::Box { x_center: p1, x_radius: r1x, y_center: p2, y_radius: r1y },
                OpenSetSpec::Box { x_center: q1, x_radius: r2x, y_center: q2, y_radius: r2y },
            ) = (u, v)
            else {
                return Err(unsupported());
            };
            let hit = torus_boxes_meet(matrix, i, [p1, p2], [r1x, r1y], [q1, q2], [r2x, r2y])?;
            Ok(Hit { hit, witness: None })
        }
        SystemSpec::Product { factors } => {
            let (OpenSetSpec::Product { components: us }, OpenSetSpec::Product { components: vs }) = (u, v) else {
                return Err(unsupported());
            };
            if us.len() != factors.len() || vs.len() != factors.len() {
                return Err(unsupported());
            }
            let mut witnesses = Some(Vec::new());
            for ((f, a), b) in factors.iter().zip(us).zip(vs) {
                let h = hit_at(f, a, b, i)?;
                if !h.hit {
                    return Ok(Hit::miss());
                }
                witnesses = witnesses.zip(h.witness).map(|(mut w, p)| {
                    w.push(p);
                    w
                });
            }
            Ok(Hit { hit: true, witness: witnesses.map(Point::product) })
        }
    }
}

fn odometer_hit<T: ExactInt>(base: u32, du: &[u8], dv: &[u8], i: u64) -> Result<Hit<T>> {
    let b = base as u128;
    let k = du.len().max(dv.len());
    if k > 120 / (32 - (base - 1).leading_zeros()).max(1) as usize {
        return Err(Error::unsupported("digit cylinder too long for the odometer hitting test"));
    }
    let value = |d: &[u8]| d.iter().rev().fold(0u128, |acc, &s| acc * b + s as u128);
    let modulus = |len: usize| b.pow(len as u32);
    let shared = modulus(du.len().min(dv.len()));
    let (u, v) = (value(du), value(dv));
    if (u + i as u128 % shared) % shared != v % shared {
        return Ok(Hit::miss());
    }
    // x ≡ u mod b^|du| and x + i ≡ v mod b^|dv|.
    let x = if du.len() >= dv.len() {
        u
    } else {
        let m = modulus(dv.len());
        (v + m - i as u128 % m) % m
    };
    let mut digits = Vec::with_capacity(k);
    let mut rest = x;
    for _ in 0..k {
        digits.push((rest % b) as u8);
        rest /= b;
    }
    let seq = SymbolicSequence::prefix_periodic(base, digits, vec![0])?;
    Ok(Hit { hit: true, witness: Some(Point::odometer(seq)) })
}

/// Whether `M^i(U) + n` meets `V` for some `n ∈ Z²`, for open boxes `U`, `V`.
///
/// Separating axes for a box and a parallelogram are the coordinate axes and
/// the rows of `M^-i`; each gives a strict linear inequality in `n`.
fn torus_boxes_meet<T: ExactInt>(
    matrix: &torus::Matrix,
    i: u64,
    p: [&QuadraticNumber<T>; 2],
    r1: [&QuadraticNumber<T>; 2],
    q: [&QuadraticNumber<T>; 2],
    r2: [&QuadraticNumber<T>; 2],
) -> Result<bool> {
    type Q<T> = QuadraticNumber<T>;
    let m = torus::mat_pow::<T>(matrix, i);
    let inv = torus::mat_pow::<T>(&torus::inverse(matrix), i);
    let abs = |t: &T| Q::from_integer(num_traits::Signed::abs(t));
    let (mp1, mp2) = torus::apply_unreduced(&m, p[0], p[1]);
    // |n1 + q1 − (Mp)_1| < rx and |n2 + q2 − (Mp)_2| < ry
    let rx = r2[0] + &(&(r1[0] * &abs(&m[0][0])) + &(r1[1] * &abs(&m[0][1])));
    let ry = r2[1] + &(&(r1[0] * &abs(&m[1][0])) + &(r1[1] * &abs(&m[1][1])));
    let cx = &mp1 - q[0];
    let cy = &mp2 - q[1];
    // |N_k1 (n1 + q1) + N_k2 (n2 + q2) − p_k| < r1_k + |N_k1| r2x + |N_k2| r2y
    let row_bound = |k: usize| r1[k] + &(&(&abs(&inv[k][0]) * r2[0]) + &(&abs(&inv[k][1]) * r2[1]));
    let bounds = [row_bound(0), row_bound(1)];
    let first_above = |x: &Q<T>| x.floor() + T::one();
    let n1_lo = first_above(&(&cx - &rx));
    let n1_hi = &cx + &rx;
    let center = cx.floor();
    // Scan columns outward from the centre so a hit usually ends the search early.
    let mut offsets = 0i64;
    let mut scanned = 0u64;
    loop {
        let mut any_in_range = false;
        for sign in [1i64, -1] {
            if offsets == 0 && sign == -1 {
                continue;
            }
            let n1 = center.clone() + T::from_i64(sign * offsets).unwrap();
            let n1_q = Q::from_integer(n1.clone());
            if n1 < n1_lo || n1_q >= n1_hi {
                continue;
            }
            any_in_range = true;
            scanned += 1;
            if scanned > TORUS_COLUMN_CAP {
                return Err(Error::Budget(format!(
                    "torus hitting test at step {i} needs more than {TORUS_COLUMN_CAP} lattice columns"
                )));
            }
            // Open interval (lo, hi) for n2.
            let mut lo = &cy - &ry;
            let mut hi = &cy + &ry;
            let mut feasible = true;
            for k in 0..2 {
                let (a, b) = (&inv[k][0], &inv[k][1]);
                let base = &(&(&n1_q + q[0]).mul_int(a) + &q[1].mul_int(b)) - p[k];
                if b.is_zero() {
                    if base.abs() >= bounds[k] {
                        feasible = false;
                    }
                    continue;
                }
                // |base + b·n2| < bound
                let bq = Q::from_integer(b.clone());
                let e1 = &(&(-&bounds[k]) - &base) / &bq;
                let e2 = &(&bounds[k] - &base) / &bq;
                let (l, h) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
                lo = lo.max(l);
                hi = hi.min(h);
            }
            if feasible && Q::from_integer(first_above(&lo)) < hi {
                return Ok(true);
            }
        }
        if !any_in_range && offsets > 0 {
            return Ok(false);
        }
        offsets += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = QuadraticNumber<i64>;
    type S = SystemSpec<i64>;
    type O = OpenSetSpec<i64>;

    #[test]
    fn basis_sizes() {
        assert_eq!(S::full_shift(2).basis(3).unwrap().len(), 8);
        let arcs = S::golden_rotation().basis(2).unwrap();
        assert_eq!(arcs.len(), 4);
        assert_eq!(arcs[1], O::arc(Q::rational(1, 4), Q::rational(1, 8)));
        assert_eq!(S::product(vec![S::full_shift(2), S::golden_rotation()]).basis(2).unwrap().len(), 16);
        assert!(S::full_shift(2).basis(20).unwrap_err().is_budget());
        let golden = S::Sft { symbols: 2, forbidden: vec![vec![1, 1]] };
        assert_eq!(golden.basis(3).unwrap().len(), 5);
    }

    #[test]
    fn arcs_are_half_open() {
        let a = O::arc(Q::zero(), Q::rational(1, 8));
        let c = |x: Q| Point::circle(x);
        assert!(a.contains(&c(Q::rational(7, 8))).unwrap());
        assert!(!a.contains(&c(Q::rational(1, 8))).unwrap());
        assert!(a.contains(&c(Q::zero())).unwrap());
    }

    #[test]
    fn shift_hits_with_witness() {
        let s = S::full_shift(2);
        let (u, v) = (O::cylinder(vec![0]), O::cylinder(vec![0]));
        for i in 0..5 {
            let h = hit_at(&s, &u, &v, i).unwrap();
            assert!(h.hit);
            let w = h.witness.unwrap();
            assert!(u.contains(&w).unwrap() && v.contains(&s.iterate(&w, i).unwrap()).unwrap());
        }
        let (u, v) = (O::cylinder(vec![0, 1]), O::cylinder(vec![0]));
        assert!(!hit_at(&s, &u, &v, 1).unwrap().hit);
    }

    #[test]
    fn rotation_hits() {
        let r = S::rotation(Q::rational(1, 4));
        let a = O::arc(Q::zero(), Q::rational(1, 8));
        let hits: Vec<u64> = (0..8).filter(|&i| hit_at(&r, &a, &a, i).unwrap().hit).collect();
        assert_eq!(hits, vec![0, 4]);
        let g = S::golden_rotation();
        let b = O::arc(Q::rational(1, 2), Q::rational(1, 10));
        for i in 0..50 {
            let h = hit_at(&g, &a, &b, i).unwrap();
            if let Some(w) = h.witness {
                assert!(a.contains(&w).unwrap() && b.contains(&g.iterate(&w, i).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn odometer_hits() {
        let o = S::odometer(2);
        let u = O::DigitCylinder { digits: vec![0, 0, 0] };
        let hits: Vec<u64> = (0..32).filter(|&i| hit_at(&o, &u, &u, i).unwrap().hit).collect();
        assert_eq!(hits, vec![0, 8, 16, 24]);
        let v = O::DigitCylinder { digits: vec![1, 0, 1, 1] };
        let h = hit_at(&o, &u, &v, 5).unwrap();
        assert!(h.hit);
        let w = h.witness.unwrap();
        assert!(u.contains(&w).unwrap() && v.contains(&o.iterate(&w, 5).unwrap()).unwrap());
    }

    #[test]
    fn finite_orbit_hits() {
        let seq = |s: &str| Point::shift(SymbolicSequence::parse(2, s).unwrap());
        let orbit = S::orbit_of(S::full_shift(2), seq("(001)")).unwrap();
        let p = seq("(001)");
        let fp = seq("(010)");
        let u = O::Points { points: vec![p] };
        let v = O::Points { points: vec![fp] };
        let hits: Vec<u64> = (0..7).filter(|&i| hit_at(&orbit, &u, &v, i).unwrap().hit).collect();
        assert_eq!(hits, vec![1, 4]);
    }

    #[test]
    fn torus_hits_match_point_sampling() {
        let t = SystemSpec::<BigInt>::cat_map();
        let basis = t.basis(2).unwrap();
        let u = &basis[0];
        // The centre of u maps to (0,0): every box containing (0,0) is hit at every step.
        for i in 0..6 {
            assert!(hit_at(&t, u, u, i).unwrap().hit);
        }
        // A rational grid of sample points gives lower-bound evidence.
        let samples: Vec<Point<BigInt>> = (0..16)
            .flat_map(|a| (0..16).map(move |b| Point::torus(QuadraticNumber::rational(a, 16), QuadraticNumber::rational(b, 16))))
            .collect();
        for v in &basis {
            for i in 0..4 {
                let sampled = samples
                    .iter()
                    .any(|x| u.contains(x).unwrap() && v.contains(&t.iterate(x, i).unwrap()).unwrap());
                if sampled {
                    assert!(hit_at(&t, u, v, i).unwrap().hit, "{v} at {i}");
                }
            }
        }
        // At step 0 only overlapping boxes meet.
        let far = &basis[10];
        assert!(!hit_at(&t, u, far, 0).unwrap().hit);
    }

    #[test]
    fn preimages() {
        let s = S::full_shift(2);
        let v = O::cylinder(vec![1]);
        assert_eq!(v.preimage(&s, 2).unwrap(), O::Cylinder { word: vec![1], offset: 2 });
        let r = S::rotation(Q::rational(1, 4));
        let a = O::arc(Q::zero(), Q::rational(1, 8));
        assert_eq!(a.preimage(&r, 1).unwrap(), O::arc(Q::rational(3, 4), Q::rational(1, 8)));
    }

    #[test]
    fn product_sets() {
        let p = O::Product { components: vec![O::cylinder(vec![1]), O::arc(Q::zero(), Q::rational(1, 4))] };
        let seq = SymbolicSequence::parse(2, "1(0)").unwrap();
        let x = Point::product(vec![Point::shift(seq), Point::circle(Q::rational(1, 8))]);
        assert!(p.contains(&x).unwrap());
    }
}
