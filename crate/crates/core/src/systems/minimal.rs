//! Minimality and equicontinuity checks for candidate sets `Λ`.

use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

use super::{sft, Point, SymbolicSequence, SystemSpec};
use crate::arith::{Distance, ExactInt, QuadraticNumber};
use crate::error::Result;

/// Three-valued answer with a witness on refutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict<W> {
    Certified,
    Refuted { witness: W },
    Unknown { horizon: u64 },
}

/// How `δ` depends on `ε` for all iterates at once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum Modulus<T: ExactInt = BigInt> {
    /// `δ(ε) = ε`, from the map being an isometry.
    Isometry,
    /// `δ(ε) = min(ε, s/2)` on a finite set with minimal separation `s`;
    /// `δ(ε) = ε` for a single point.
    Finite { separation: Option<Distance<T>> },
}

impl<T: ExactInt> Modulus<T> {
    pub fn delta(&self, eps: &Distance<T>) -> Distance<T> {
        match self {
            Modulus::Isometry | Modulus::Finite { separation: None } => eps.clone(),
            Modulus::Finite { separation: Some(s) } => eps.clone().min(s.scale(1, 2)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE", bound = "T: ExactInt")]
pub enum EquicontinuityVerdict<T: ExactInt = BigInt> {
    Certified {
        modulus: Modulus<T>,
        /// `analytic` for isometries, `finite` for finite sets.
        basis: String,
    },
    /// `d(x, y) = initial` yet `d(f^steps x, f^steps y) = later`.
    Refuted { x: Point<T>, y: Point<T>, initial: Distance<T>, steps: u64, later: Distance<T> },
    Unknown { horizon: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct MinimalityReport<T: ExactInt = BigInt> {
    /// A refutation carries a proper closed invariant subset.
    pub minimal: Verdict<Vec<Point<T>>>,
    /// Largest gap left by the orbit of a sample point, when measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_gap: Option<QuadraticNumber<T>>,
    pub equicontinuity: EquicontinuityVerdict<T>,
}

/// Checks whether `spec` (a whole system or a restriction) is minimal and
/// equicontinuous, looking at most `horizon` steps ahead.
pub fn check_minimal_equicontinuous<T: ExactInt>(spec: &SystemSpec<T>, horizon: u64) -> Result<MinimalityReport<T>> {
    spec.validate()?;
    if let Some(points) = spec.finite_points()? {
        return finite_set(spec, &points);
    }
    let unknown = |orbit_gap| MinimalityReport {
        minimal: Verdict::Unknown { horizon },
        orbit_gap,
        equicontinuity: EquicontinuityVerdict::Unknown { horizon },
    };
    let isometry = || EquicontinuityVerdict::Certified { modulus: Modulus::Isometry, basis: "analytic".into() };
    Ok(match spec.ambient() {
        SystemSpec::CircleRotation { angle } => {
            if angle.is_rational() {
                // The orbit of 0 is finite, closed and invariant.
                let q = angle.rational_part().denom().clone();
                let q = q.to_u64().filter(|&q| q <= 1 << 16);
                let witness = match q {
                    Some(q) => (0..q).map(|k| spec.iterate(&Point::circle(QuadraticNumber::zero()), k)).collect::<Result<_>>()?,
                    None => vec![Point::circle(QuadraticNumber::zero())],
                };
                MinimalityReport { minimal: Verdict::Refuted { witness }, orbit_gap: None, equicontinuity: isometry() }
            } else {
                let gap = orbit_gap(angle, horizon.min(1 << 20));
                MinimalityReport { minimal: Verdict::Unknown { horizon }, orbit_gap: Some(gap), equicontinuity: isometry() }
            }
        }
        // Every orbit runs through all b^k digit cylinders of length k in b^k steps.
        SystemSpec::Odometer { .. } => {
            MinimalityReport { minimal: Verdict::Certified, orbit_gap: None, equicontinuity: isometry() }
        }
        SystemSpec::FullShift { symbols } => {
            let fixed = Point::shift(SymbolicSequence::constant(*symbols, 0)?);
            let partner = Point::shift(SymbolicSequence::prefix_periodic(*symbols, [vec![0; 16], vec![1]].concat(), vec![0])?);
            MinimalityReport {
                minimal: Verdict::Refuted { witness: vec![fixed.clone()] },
                orbit_gap: None,
                equicontinuity: expansion_witness(spec, fixed, partner, horizon)?,
            }
        }
        SystemSpec::Sft { symbols, forbidden } => {
            let sft = sft::Sft::new(*symbols, forbidden)?;
            let (_, cycle) = sft.extension(&[])?.expect("validated nonempty language");
            let periodic = SymbolicSequence::prefix_periodic(*symbols, vec![], cycle.clone())?;
            // A word of the language missing from the periodic orbit lies outside its closure.
            let len = cycle.len() + sft.longest_forbidden();
            let seen: std::collections::HashSet<Vec<u8>> =
                (0..cycle.len() as u64).map(|k| periodic.word(k, len)).collect();
            let mut proper = false;
            if (*symbols as f64).powi(len as i32) <= 1e5 {
                for w in super::open_set::words(*symbols, len) {
                    if !seen.contains(&w) && sft.extends_forever(&w)? {
                        proper = true;
                        break;
                    }
                }
            }
            if proper {
                let witness = (0..cycle.len() as u64).map(|k| Point::shift(periodic.shifted(k))).collect();
                MinimalityReport {
                    minimal: Verdict::Refuted { witness },
                    orbit_gap: None,
                    equicontinuity: EquicontinuityVerdict::Unknown { horizon },
                }
            } else {
                unknown(None)
            }
        }
        SystemSpec::TorusAutomorphism { .. } => {
            let origin = Point::torus(QuadraticNumber::zero(), QuadraticNumber::zero());
            let near = Point::torus(QuadraticNumber::rational(1, 1 << 20), QuadraticNumber::zero());
            MinimalityReport {
                minimal: Verdict::Refuted { witness: vec![origin.clone()] },
                orbit_gap: None,
                equicontinuity: expansion_witness(spec, origin, near, horizon)?,
            }
        }
        _ => unknown(None),
    })
}

fn finite_set<T: ExactInt>(spec: &SystemSpec<T>, points: &[Point<T>]) -> Result<MinimalityReport<T>> {
    // Follow the first point into its eventual cycle.
    let start = &points[0];
    let mut seen = vec![start.clone()];
    let mut p = spec.step(start)?;
    while !seen.contains(&p) {
        seen.push(p.clone());
        p = spec.step(&p)?;
    }
    let cycle_start = seen.iter().position(|q| *q == p).unwrap();
    let cycle: Vec<Point<T>> = seen[cycle_start..].to_vec();
    let distinct: std::collections::HashSet<&Point<T>> = points.iter().collect();
    let minimal = if cycle_start == 0 && cycle.len() == distinct.len() {
        Verdict::Certified
    } else {
        Verdict::Refuted { witness: cycle }
    };
    let horizon = points.len() as u64;
    let mut separation: Option<Distance<T>> = None;
    let mut truncated = false;
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            let r = spec.distance_report(a, b, super::DEFAULT_COMPARISON_BOUND)?;
            truncated |= r.truncated;
            separation = Some(match separation {
                Some(s) if s <= r.value => s,
                _ => r.value,
            });
        }
    }
    let equicontinuity = if truncated {
        EquicontinuityVerdict::Unknown { horizon }
    } else {
        EquicontinuityVerdict::Certified { modulus: Modulus::Finite { separation }, basis: "finite".into() }
    };
    Ok(MinimalityReport { minimal, orbit_gap: None, equicontinuity })
}

/// Largest gap between consecutive points of `{k·angle mod 1 : k < n}`.
fn orbit_gap<T: ExactInt>(angle: &QuadraticNumber<T>, n: u64) -> QuadraticNumber<T> {
    let mut pts: Vec<QuadraticNumber<T>> = Vec::with_capacity(n as usize);
    let mut x = QuadraticNumber::zero();
    for _ in 0..n.max(1) {
        pts.push(x.clone());
        x = (&x + angle).fract();
    }
    pts.sort();
    let mut gap = &(&pts[0] + &QuadraticNumber::one()) - pts.last().unwrap();
    for w in pts.windows(2) {
        let g = &w[1] - &w[0];
        if g > gap {
            gap = g;
        }
    }
    gap
}

/// Iterates a close pair until it separates to at least 1/4.
fn expansion_witness<T: ExactInt>(
    spec: &SystemSpec<T>,
    x: Point<T>,
    y: Point<T>,
    horizon: u64,
) -> Result<EquicontinuityVerdict<T>> {
    let initial = spec.distance(&x, &y)?;
    let quarter = Distance::Pow2(2);
    let (mut a, mut b) = (x.clone(), y.clone());
    for steps in 1..=horizon {
        a = spec.step(&a)?;
        b = spec.step(&b)?;
        let later = spec.distance(&a, &b)?;
        if later >= quarter {
            return Ok(EquicontinuityVerdict::Refuted { x, y, initial, steps, later });
        }
    }
    Ok(EquicontinuityVerdict::Unknown { horizon })
}
