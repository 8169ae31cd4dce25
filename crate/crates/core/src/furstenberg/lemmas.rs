use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::returns::{hitting_witnesses, return_set, HitWitness};
use super::{difference_set, IndexSet};
use crate::arith::{Distance, ExactInt};
use crate::error::{Error, Result};
use crate::systems::{check_minimal_equicontinuous, hit_at, EquicontinuityVerdict, Modulus, OpenSetSpec, Point, SystemSpec, Verdict};

/// Violating indices kept in a report.
pub const MAX_LISTED_VIOLATIONS: usize = 100;
/// Basis pairs sampled for the transitivity conclusion of the second check.
pub const CONCLUSION_PAIRS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum InclusionStatus {
    Holds,
    Violated,
    Unknown,
}

/// Compares `left ⊆ right`; `right` may have a longer horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclusion {
    pub left_size: u64,
    pub right_size: u64,
    pub violation_count: u64,
    /// The first violating indices.
    pub violations: Vec<u64>,
}

impl Inclusion {
    fn of(left: &IndexSet, right: &IndexSet, shift: u64) -> Inclusion {
        let bad: Vec<u64> = left.members().filter(|&i| !right.contains(i + shift)).collect();
        Inclusion {
            left_size: left.len() as u64,
            right_size: right.len() as u64,
            violation_count: bad.len() as u64,
            violations: bad.into_iter().take(MAX_LISTED_VIOLATIONS).collect(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct Lemma12Report<T: ExactInt = BigInt> {
    pub eps: Distance<T>,
    pub horizon: u64,
    /// `certified`, `refuted` or `unknown`, from the minimality checker.
    pub minimality: String,
    pub modulus: Modulus<T>,
    /// `δ(ε/3)` from the equicontinuity modulus.
    pub delta: Distance<T>,
    /// Least `i` with `d(q, f^i p) ≤ δ`.
    pub index: Option<u64>,
    pub distance_at_index: Option<Distance<T>>,
    /// `N(f^i p, ε/3) ⊆ N(q, ε)`.
    pub inclusion: Option<Inclusion>,
    pub status: InclusionStatus,
    pub semantics: String,
}

fn minimality_name<W>(v: &Verdict<W>) -> String {
    match v {
        Verdict::Certified => "certified",
        Verdict::Refuted { .. } => "refuted",
        Verdict::Unknown { .. } => "unknown",
    }
    .into()
}

/// Checks the return-time inclusion that carries recurrence from `p` to `q`
/// inside a minimal equicontinuous set.
pub fn lemma12_inclusion_check<T: ExactInt>(
    spec: &SystemSpec<T>,
    p: &Point<T>,
    q: &Point<T>,
    eps: &Distance<T>,
    horizon: u64,
) -> Result<Lemma12Report<T>> {
    if eps.is_zero() {
        return Err(Error::precondition("ε must be positive"));
    }
    spec.check_point(p)?;
    spec.check_point(q)?;
    let report = check_minimal_equicontinuous(spec, horizon)?;
    let EquicontinuityVerdict::Certified { modulus, .. } = report.equicontinuity else {
        return Err(Error::precondition(
            "no certified equicontinuity modulus; use a rotation, an odometer or a finite orbit",
        ));
    };
    let third = eps.scale(1, 3);
    let delta = modulus.delta(&third);
    let mut index = None;
    let mut x = p.clone();
    for i in 0..horizon {
        if spec.within(q, &x, &delta, false)? {
            index = Some((i, x.clone()));
            break;
        }
        if i + 1 < horizon {
            x = spec.step(&x)?;
        }
    }
    let mut out = Lemma12Report {
        eps: eps.clone(),
        horizon,
        minimality: minimality_name(&report.minimal),
        modulus,
        delta: delta.clone(),
        index: None,
        distance_at_index: None,
        inclusion: None,
        status: InclusionStatus::Unknown,
        semantics: "HOLDS: every i < horizon returning f^i(p) within ε/3 of itself returns q within ε; \
            VIOLATED lists the indices where that fails; UNKNOWN: the orbit of p never came δ-close to q below the horizon"
            .into(),
    };
    if let Some((i, fip)) = index {
        let left = return_set(spec, &fip, &third, horizon)?;
        let right = return_set(spec, q, eps, horizon)?;
        let inc = Inclusion::of(&left, &right, 0);
        out.status = if inc.holds() { InclusionStatus::Holds } else { InclusionStatus::Violated };
        out.index = Some(i);
        out.distance_at_index = Some(spec.distance(q, &fip)?);
        out.inclusion = Some(inc);
    }
    Ok(out)
}

/// `{i < horizon : g^i(B) ∩ B ≠ ∅}` for the closed ball `B = B_δ(y)`.
pub fn ball_hitting_set<T: ExactInt>(g: &SystemSpec<T>, y: &Point<T>, delta: &Distance<T>, horizon: u64) -> Result<IndexSet> {
    g.check_point(y)?;
    if let Some(points) = g.finite_points()? {
        let mut ball = Vec::new();
        for z in &points {
            if g.within(y, z, delta, false)? {
                ball.push(z.clone());
            }
        }
        let mut cur = ball.clone();
        let mut out = IndexSet::empty(horizon)?;
        for i in 0..horizon {
            if cur.iter().any(|z| ball.contains(z)) {
                out.insert(i);
            }
            for z in &mut cur {
                *z = g.step(z)?;
            }
        }
        return Ok(out);
    }
    match g.ambient() {
        SystemSpec::CircleRotation { angle } => {
            // B + iα meets B iff the rotation moves by at most 2δ
            let two_delta = delta.scale(2, 1).to_quadratic();
            let mut x = crate::arith::QuadraticNumber::zero();
            IndexSet::from_predicate(horizon, |_| {
                let hit = x.circle_norm() <= two_delta;
                x = (&x + angle).fract();
                hit
            })
        }
        SystemSpec::Odometer { base } => {
            // B is a cylinder on the lowest K digits; adding i preserves it iff base^K | i
            if delta.is_zero() {
                return IndexSet::new(horizon, [0]);
            }
            let mut k = 0u32;
            while Distance::<T>::from_quadratic(pow_recip::<T>(*base, k)) > *delta {
                k += 1;
            }
            let modulus = (*base as u64).checked_pow(k).unwrap_or(u64::MAX);
            IndexSet::from_predicate(horizon, |i| i % modulus == 0)
        }
        other => Err(Error::unsupported(format!("exact ball hitting in a {} system", other.kind_name()))),
    }
}

fn pow_recip<T: ExactInt>(base: u32, k: u32) -> crate::arith::QuadraticNumber<T> {
    let mut d = T::one();
    let b = T::from_u32(base).unwrap();
    for _ in 0..k {
        d = d * b.clone();
    }
    crate::arith::QuadraticNumber::from_parts(T::one(), T::zero(), d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct ConclusionRow<T: ExactInt = BigInt> {
    pub u: OpenSetSpec<T>,
    pub v: OpenSetSpec<T>,
    /// Least `i` in `N(U, V) ∩ N(B, B)` below the horizon.
    pub first_common: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct Lemma13Report<T: ExactInt = BigInt> {
    pub delta: Distance<T>,
    pub horizon: u64,
    pub return_set_size: u64,
    pub difference_set_size: u64,
    pub ball_hitting_size: u64,
    /// `Δ(N(y, δ)) ⊆ N(B_δ(y), B_δ(y))`.
    pub inclusion1: Inclusion,
    pub j: u64,
    /// `N(U, f^-j V) + j ⊆ N(U, V)`.
    pub inclusion2: Inclusion,
    /// Points `x ∈ U` with `f^index(x) ∈ f^-j(V)`.
    pub witnesses: Vec<HitWitness<T>>,
    pub conclusion: Vec<ConclusionRow<T>>,
    pub status: InclusionStatus,
    pub semantics: String,
}

/// Checks both index-set inclusions behind transitivity of `f × g`.
#[allow(clippy::too_many_arguments)]
pub fn lemma13_inclusion_check<T: ExactInt>(
    g: &SystemSpec<T>,
    y: &Point<T>,
    delta: &Distance<T>,
    f: &SystemSpec<T>,
    u: &OpenSetSpec<T>,
    v: &OpenSetSpec<T>,
    j: u64,
    horizon: u64,
) -> Result<Lemma13Report<T>> {
    if j >= horizon {
        return Err(Error::precondition(format!("j = {j} must be below the horizon {horizon}")));
    }
    let n = return_set(g, y, delta, horizon)?;
    let d = difference_set(&n)?;
    let ball = ball_hitting_set(g, y, delta, horizon)?;
    let inclusion1 = Inclusion::of(&d, &ball, 0);

    let pre = v.preimage(f, j)?;
    let (left, witnesses) = hitting_witnesses(f, u, &pre, horizon, 5)?;
    let (right, _) = hitting_witnesses(f, u, v, horizon + j, 0)?;
    let inclusion2 = Inclusion::of(&left, &right, j);

    let basis = f.basis(2)?;
    let mut conclusion = Vec::new();
    'pairs: for bu in &basis {
        for bv in &basis {
            if conclusion.len() == CONCLUSION_PAIRS {
                break 'pairs;
            }
            let mut first_common = None;
            for i in ball.members() {
                if hit_at(f, bu, bv, i)?.hit {
                    first_common = Some(i);
                    break;
                }
            }
            conclusion.push(ConclusionRow { u: bu.clone(), v: bv.clone(), first_common });
        }
    }
    let status = if inclusion1.holds() && inclusion2.holds() { InclusionStatus::Holds } else { InclusionStatus::Violated };
    Ok(Lemma13Report {
        delta: delta.clone(),
        horizon,
        return_set_size: n.len() as u64,
        difference_set_size: d.len() as u64,
        ball_hitting_size: ball.len() as u64,
        inclusion1,
        j,
        inclusion2,
        witnesses,
        conclusion,
        status,
        semantics: "HOLDS: both inclusions hold at every index below the horizon; the conclusion rows give, \
            for sampled basis pairs, the first index where f^i(U) meets V and the ball B_δ(y) returns to itself"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::QuadraticNumber;
    use crate::systems::SymbolicSequence;

    fn q(p: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::rational(p, d)
    }

    fn seq(s: &str) -> Point {
        Point::shift(SymbolicSequence::parse(2, s).unwrap())
    }

    #[test]
    fn lemma12_golden() {
        let golden: SystemSpec = SystemSpec::golden_rotation();
        let r = lemma12_inclusion_check(&golden, &Point::circle(q(0, 1)), &Point::circle(q(1, 2)), &Distance::rational(1, 10), 10_000)
            .unwrap();
        assert_eq!(r.status, InclusionStatus::Holds);
        let i = r.index.unwrap();
        // oracle: least i with ‖iα − 1/2‖ ≤ 1/30
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let want = (0..10_000u64).find(|&i| ((i as f64 * alpha).fract() - 0.5).abs() <= 1.0 / 30.0).unwrap();
        assert_eq!(i, want);
        assert!(r.inclusion.unwrap().left_size > 0);
    }

    #[test]
    fn lemma12_periodic_orbit() {
        let p = seq("(0011)");
        let orbit = SystemSpec::orbit_of(SystemSpec::full_shift(2), p.clone()).unwrap();
        let q2 = orbit.iterate(&p, 2).unwrap();
        let r = lemma12_inclusion_check(&orbit, &p, &q2, &Distance::rational(1, 4), 100).unwrap();
        assert_eq!((r.index, r.status), (Some(2), InclusionStatus::Holds));
        assert_eq!(r.minimality, "certified");
    }

    #[test]
    fn lemma12_rational_rotation_is_unknown() {
        let quarter: SystemSpec = SystemSpec::rotation(q(1, 4));
        let r = lemma12_inclusion_check(&quarter, &Point::circle(q(0, 1)), &Point::circle(q(1, 8)), &Distance::rational(1, 10), 1000)
            .unwrap();
        assert_eq!((r.index, r.status), (None, InclusionStatus::Unknown));
        assert_eq!(r.minimality, "refuted");
    }

    #[test]
    fn ball_hitting_golden_matches_float() {
        let golden: SystemSpec = SystemSpec::golden_rotation();
        let b = ball_hitting_set(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 20), 3000).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        for i in 0..3000u64 {
            let x = (i as f64 * alpha).fract();
            assert_eq!(b.contains(i), x.min(1.0 - x) <= 0.1, "i={i}");
        }
    }

    #[test]
    fn lemma13_examples() {
        let golden: SystemSpec = SystemSpec::golden_rotation();
        let shift: SystemSpec = SystemSpec::full_shift(2);
        let c0 = OpenSetSpec::cylinder(vec![0]);
        let c1 = OpenSetSpec::cylinder(vec![1]);
        let r = lemma13_inclusion_check(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 20), &shift, &c0, &c1, 2, 10_000).unwrap();
        assert!(r.inclusion1.holds() && r.inclusion2.holds());
        assert_eq!(r.status, InclusionStatus::Holds);
        assert_eq!(r.conclusion.len(), 16);
        assert!(r.conclusion.iter().all(|c| c.first_common.is_some()));
        for w in &r.witnesses {
            assert!(c0.contains(&w.point).unwrap());
            assert!(c1.contains(&shift.iterate(&w.point, w.index + 2).unwrap()).unwrap());
        }
        assert!(lemma13_inclusion_check(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 20), &shift, &c0, &c1, 10, 10).is_err());
    }

    #[test]
    fn lemma13_period_two() {
        let p = seq("(01)");
        let g = SystemSpec::orbit_of(SystemSpec::full_shift(2), p.clone()).unwrap();
        let shift: SystemSpec = SystemSpec::full_shift(2);
        let c0 = OpenSetSpec::cylinder(vec![0]);
        let r = lemma13_inclusion_check(&g, &p, &Distance::Zero, &shift, &c0, &c0, 1, 20).unwrap();
        assert_eq!((r.return_set_size, r.difference_set_size, r.ball_hitting_size), (10, 10, 10));
        assert_eq!(r.status, InclusionStatus::Holds);
    }

    #[test]
    fn ball_hitting_odometer() {
        let odo: SystemSpec = SystemSpec::odometer(3);
        let y = Point::odometer(SymbolicSequence::constant(3, 0).unwrap());
        let b = ball_hitting_set(&odo, &y, &Distance::rational(1, 9), 30).unwrap();
        assert_eq!(b.members().collect::<Vec<_>>(), vec![0, 9, 18, 27]);
        let b = ball_hitting_set(&odo, &y, &Distance::rational(1, 5), 30).unwrap();
        assert_eq!(b.members().collect::<Vec<_>>(), vec![0, 9, 18, 27]);
        assert!(ball_hitting_set(&SystemSpec::<BigInt>::cat_map(), &Point::torus(q(0, 1), q(0, 1)), &Distance::rational(1, 5), 3).is_err());
    }
}
