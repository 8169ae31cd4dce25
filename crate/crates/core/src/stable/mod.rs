//! ε-stable sets `V_ε^s(x) = {y : limsup d(f^i x, f^i y) ≤ ε}`.
//!
//! A finite window only bounds the tail; the limsup is computed exactly for
//! isometries, eventually periodic shift tails, pairs whose joint orbit
//! cycles, and differences lying on the stable line of a toral automorphism.

mod line;

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{ratio_serde, Distance, ExactInt, QuadraticNumber};
use crate::error::{Error, Result};
use crate::systems::{DistanceReport, OpenSetSpec, Point, SymbolicSequence, SystemSpec};

pub use line::{stable_contraction_trace, stable_line, stable_line_point, ContractionTrace, StableLine, PERIOD_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StableVerdict {
    /// The exact limsup is at most ε.
    InCertified,
    /// The window sup is at most ε; the tail beyond the horizon is unseen.
    InEvidence,
    /// The exact limsup exceeds ε.
    OutCertified,
    Unknown,
}

impl StableVerdict {
    pub fn is_in(self) -> bool {
        matches!(self, StableVerdict::InCertified | StableVerdict::InEvidence)
    }
}

/// How an exact limsup was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimsupRoute {
    /// The map preserves distances, so the limsup is `d(x, y)`.
    Isometry,
    /// Both shift points are eventually periodic; the limsup is 0 when the
    /// tails agree and 1 otherwise.
    PeriodicTails,
    /// The pair `(f^i x, f^i y)` returned to an earlier state.
    PeriodicPair,
    /// `y − x` lies on the stable line, so distances shrink geometrically.
    StableLine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct StableEvidence<T: ExactInt = BigInt> {
    pub eps: Distance<T>,
    pub tail_start: u64,
    pub horizon: u64,
    /// `max_{tail_start ≤ i < horizon} d(f^i x, f^i y)`.
    pub tail_sup_estimate: Distance<T>,
    pub sup_attained_at: u64,
    /// Some window distance ran into the shift comparison bound.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limsup: Option<Distance<T>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub route: Option<LimsupRoute>,
    pub verdict: StableVerdict,
}

/// Evidence for `y ∈ V_ε^s(x)`.
///
/// OUT is certified only when an exact limsup exceeds `ε`; a large window
/// sup alone gives UNKNOWN.
pub fn stable_membership<T: ExactInt>(
    spec: &SystemSpec<T>,
    x: &Point<T>,
    y: &Point<T>,
    eps: &Distance<T>,
    tail_start: u64,
    horizon: u64,
) -> Result<StableEvidence<T>> {
    if tail_start >= horizon {
        return Err(Error::precondition(format!("tail start {tail_start} must be below the horizon {horizon}")));
    }
    spec.check_point(x)?;
    spec.check_point(y)?;
    let (limsup, route) = match exact_limsup(spec, x, y, horizon)? {
        Some((l, r)) => (Some(l), Some(r)),
        None => (None, None),
    };
    let mut a = spec.iterate(x, tail_start)?;
    let mut b = spec.iterate(y, tail_start)?;
    let mut sup = (Distance::Zero, tail_start);
    let mut truncated = false;
    for i in tail_start..horizon {
        let DistanceReport { value, truncated: t } = spec.distance_report(&a, &b, crate::systems::DEFAULT_COMPARISON_BOUND)?;
        truncated |= t;
        if value > sup.0 {
            sup = (value, i);
        }
        if i + 1 < horizon {
            a = spec.step(&a)?;
            b = spec.step(&b)?;
        }
    }
    let verdict = match &limsup {
        Some(l) if l <= eps => StableVerdict::InCertified,
        Some(_) => StableVerdict::OutCertified,
        None if sup.0 <= *eps && !truncated => StableVerdict::InEvidence,
        None => StableVerdict::Unknown,
    };
    Ok(StableEvidence {
        eps: eps.clone(),
        tail_start,
        horizon,
        tail_sup_estimate: sup.0,
        sup_attained_at: sup.1,
        truncated,
        limsup,
        route,
        verdict,
    })
}

/// The exact limsup where one of the decidable routes applies.
fn exact_limsup<T: ExactInt>(
    spec: &SystemSpec<T>,
    x: &Point<T>,
    y: &Point<T>,
    horizon: u64,
) -> Result<Option<(Distance<T>, LimsupRoute)>> {
    let finite = spec.finite_points()?.is_some();
    match (spec.ambient(), x, y) {
        (SystemSpec::CircleRotation { .. } | SystemSpec::Odometer { .. }, _, _) if !finite => {
            return Ok(Some((spec.distance(x, y)?, LimsupRoute::Isometry)));
        }
        (SystemSpec::FullShift { .. } | SystemSpec::Sft { .. }, Point::Shift { sequence: s }, Point::Shift { sequence: t }) => {
            if let Some(equal) = tails_agree(s, t) {
                let l = if equal { Distance::Zero } else { Distance::one() };
                return Ok(Some((l, LimsupRoute::PeriodicTails)));
            }
        }
        (SystemSpec::TorusAutomorphism { matrix }, Point::Torus { .. }, Point::Torus { .. })
            if line::on_stable_line(matrix, x, y)? => {
                return Ok(Some((Distance::Zero, LimsupRoute::StableLine)));
            }
        _ => {}
    }
    Ok(periodic_pair_limsup(spec, x, y, horizon)?.map(|l| (l, LimsupRoute::PeriodicPair)))
}

/// Longest tail period compared symbol by symbol.
const TAIL_CAP: u64 = 1 << 20;

/// Whether two eventually periodic sequences agree from some index on.
fn tails_agree(s: &SymbolicSequence, t: &SymbolicSequence) -> Option<bool> {
    let (p1, q1) = s.prefix_period()?;
    let (p2, q2) = t.prefix_period()?;
    let start = p1.len().max(p2.len()) as u64;
    let len = num_integer::lcm(q1.len() as u64, q2.len() as u64);
    if len > TAIL_CAP {
        return None;
    }
    Some((start..start + len).all(|i| s.symbol_at(i) == t.symbol_at(i)))
}

/// Brent cycle detection on the pair state; the limsup is the max over the cycle.
fn periodic_pair_limsup<T: ExactInt>(spec: &SystemSpec<T>, x: &Point<T>, y: &Point<T>, horizon: u64) -> Result<Option<Distance<T>>> {
    let mut snap = (x.clone(), y.clone());
    let mut cur = snap.clone();
    let mut power = 1u64;
    let mut lam = 0u64;
    for _ in 0..horizon {
        cur = (spec.step(&cur.0)?, spec.step(&cur.1)?);
        lam += 1;
        if cur == snap {
            let mut max = Distance::Zero;
            for _ in 0..lam {
                let d = spec.distance_report(&cur.0, &cur.1, crate::systems::DEFAULT_COMPARISON_BOUND)?;
                if d.truncated {
                    return Ok(None);
                }
                max = max.max(d.value);
                cur = (spec.step(&cur.0)?, spec.step(&cur.1)?);
            }
            return Ok(Some(max));
        }
        if lam == power {
            snap = cur.clone();
            power *= 2;
            lam = 0;
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct CoverRow<T: ExactInt = BigInt> {
    pub cell: OpenSetSpec<T>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Point<T>>,
    /// The sample point `x ∈ Λ` whose stable set contains the witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<Point<T>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_sup: Option<Distance<T>>,
    /// Parameter of the witness along the stable line through the target.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line_parameter: Option<QuadraticNumber<T>>,
    pub verdict: StableVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct CoverReport<T: ExactInt = BigInt> {
    pub eps: Distance<T>,
    pub resolution: u32,
    pub tail_start: u64,
    pub horizon: u64,
    pub sample: Vec<Point<T>>,
    pub total_cells: u64,
    pub covered_cells: u64,
    #[serde(with = "ratio_serde")]
    pub coverage: Ratio<u64>,
    /// Wraps of the stable line searched per torus cell.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line_search_bound: Option<u64>,
    pub rows: Vec<CoverRow<T>>,
}

/// For every basis cell, a point of the cell lying in `V_ε^s(x)` for some sample `x`.
pub fn stable_cover_report<T: ExactInt>(
    spec: &SystemSpec<T>,
    sample: &[Point<T>],
    eps: &Distance<T>,
    resolution: u32,
    tail_start: u64,
    horizon: u64,
) -> Result<CoverReport<T>> {
    if sample.is_empty() {
        return Err(Error::precondition("the sample of Λ must be nonempty"));
    }
    if tail_start >= horizon {
        return Err(Error::precondition(format!("tail start {tail_start} must be below the horizon {horizon}")));
    }
    for x in sample {
        spec.check_point(x)?;
    }
    let cells = spec.basis(resolution)?;
    let torus = matches!(spec.ambient(), SystemSpec::TorusAutomorphism { .. }) && spec.finite_points()?.is_none();
    let bound = line::search_bound(resolution);
    let mut rows = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut row = CoverRow { cell: cell.clone(), witness: None, target: None, tail_sup: None, line_parameter: None, verdict: StableVerdict::Unknown };
        'search: for x in sample {
            for (y, t) in candidates(spec, &cell, x, bound)? {
                if !cell.contains(&y)? || spec.check_point(&y).is_err() {
                    continue;
                }
                let ev = stable_membership(spec, x, &y, eps, tail_start, horizon)?;
                let found = ev.verdict.is_in();
                if found || row.witness.is_none() {
                    row = CoverRow {
                        cell: cell.clone(),
                        witness: Some(y),
                        target: Some(x.clone()),
                        tail_sup: Some(ev.tail_sup_estimate),
                        line_parameter: t,
                        verdict: ev.verdict,
                    };
                }
                if found {
                    break 'search;
                }
            }
        }
        rows.push(row);
    }
    let total = rows.len() as u64;
    let covered = rows.iter().filter(|r| r.verdict.is_in()).count() as u64;
    Ok(CoverReport {
        eps: eps.clone(),
        resolution,
        tail_start,
        horizon,
        sample: sample.to_vec(),
        total_cells: total,
        covered_cells: covered,
        coverage: Ratio::new(covered, total.max(1)),
        line_search_bound: torus.then_some(bound),
        rows,
    })
}

type Candidate<T> = (Point<T>, Option<QuadraticNumber<T>>);

/// Candidate witnesses in `cell` whose orbit should shadow `x`, independent of `ε`.
fn candidates<T: ExactInt>(
    spec: &SystemSpec<T>,
    cell: &OpenSetSpec<T>,
    x: &Point<T>,
    bound: u64,
) -> Result<Vec<Candidate<T>>> {
    // a word followed by the tail of x from the same position
    let splice = |word: &[u8], s: &SymbolicSequence| -> Option<SymbolicSequence> {
        let (pre, per) = s.shifted(word.len() as u64).prefix_period().map(|(a, b)| (a.to_vec(), b.to_vec()))?;
        let mut prefix = word.to_vec();
        prefix.extend(pre);
        SymbolicSequence::prefix_periodic(s.alphabet(), prefix, per).ok()
    };
    Ok(match (cell, x) {
        (OpenSetSpec::Cylinder { word, offset: 0 }, Point::Shift { sequence }) => {
            splice(word, sequence).map(|s| (Point::shift(s), None)).into_iter().collect()
        }
        (OpenSetSpec::DigitCylinder { digits }, Point::Odometer { digits: d }) => {
            splice(digits, d).map(|s| (Point::odometer(s), None)).into_iter().collect()
        }
        (OpenSetSpec::Arc { center, .. }, Point::Circle { .. }) => vec![(Point::circle(center.clone()), None)],
        (OpenSetSpec::Box { .. }, Point::Torus { .. }) => {
            let SystemSpec::TorusAutomorphism { matrix } = spec.ambient() else { return Ok(vec![]) };
            match line::line_box_point(matrix, x, cell, bound)? {
                Some((t, y)) => vec![(y, Some(t))],
                None => vec![],
            }
        }
        (OpenSetSpec::Points { points }, _) => points.iter().map(|p| (p.clone(), None)).collect(),
        _ => vec![],
    })
}
