use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::family::{family_test, Family, FamilyVerdict, Status};
use super::IndexSet;
use crate::arith::{Distance, ExactInt};
use crate::error::{Error, Result};
use crate::systems::{hit_at, OpenSetSpec, Point, SystemSpec};

/// `{i < horizon : d(x, f^i x) ≤ eps}` with `eps ≥ 0`.
pub(crate) fn return_set<T: ExactInt>(spec: &SystemSpec<T>, x: &Point<T>, eps: &Distance<T>, horizon: u64) -> Result<IndexSet> {
    spec.check_point(x)?;
    let mut out = IndexSet::empty(horizon)?;
    let mut p = x.clone();
    for i in 0..horizon {
        if spec.within(x, &p, eps, false)? {
            out.insert(i);
        }
        if i + 1 < horizon {
            p = spec.step(&p)?;
        }
    }
    Ok(out)
}

/// The return-time set `N(x, ε)` below `horizon`.
pub fn return_times<T: ExactInt>(spec: &SystemSpec<T>, x: &Point<T>, eps: &Distance<T>, horizon: u64) -> Result<IndexSet> {
    if eps.is_zero() {
        return Err(Error::precondition("ε must be positive"));
    }
    return_set(spec, x, eps, horizon)
}

/// `x ∈ U` with `f^index(x) ∈ V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct HitWitness<T: ExactInt = BigInt> {
    pub index: u64,
    pub point: Point<T>,
}

fn check_open_set<T: ExactInt>(s: &OpenSetSpec<T>) -> Result<()> {
    if matches!(s, OpenSetSpec::Points { points } if points.is_empty()) {
        return Err(Error::precondition("open sets must be nonempty"));
    }
    Ok(())
}

/// The hitting-time set `N(U, V) = {i : f^i(U) ∩ V ≠ ∅}` below `horizon`.
pub fn hitting_times<T: ExactInt>(spec: &SystemSpec<T>, u: &OpenSetSpec<T>, v: &OpenSetSpec<T>, horizon: u64) -> Result<IndexSet> {
    Ok(hitting_witnesses(spec, u, v, horizon, 0)?.0)
}

/// `hitting_times` plus witness points for the first `keep` hits that have one.
pub fn hitting_witnesses<T: ExactInt>(
    spec: &SystemSpec<T>,
    u: &OpenSetSpec<T>,
    v: &OpenSetSpec<T>,
    horizon: u64,
    keep: usize,
) -> Result<(IndexSet, Vec<HitWitness<T>>)> {
    check_open_set(u)?;
    check_open_set(v)?;
    let mut out = IndexSet::empty(horizon)?;
    let mut witnesses = Vec::new();
    for i in 0..horizon {
        let h = hit_at(spec, u, v, i)?;
        if h.hit {
            out.insert(i);
            if witnesses.len() < keep {
                if let Some(point) = h.witness {
                    witnesses.push(HitWitness { index: i, point });
                }
            }
        }
    }
    Ok((out, witnesses))
}

/// `N(y, δ)` in a rotation or odometer, a generator of members of `F_b`. `δ = 0` is allowed.
pub fn bohr_set<T: ExactInt>(spec: &SystemSpec<T>, y: &Point<T>, delta: &Distance<T>, horizon: u64) -> Result<IndexSet> {
    match spec {
        SystemSpec::CircleRotation { .. } | SystemSpec::Odometer { .. } => return_set(spec, y, delta, horizon),
        other => Err(Error::precondition(format!(
            "Bohr sets are generated by circle rotations and odometers, not a {}",
            other.kind_name()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct RecurrenceCell<T: ExactInt = BigInt> {
    pub eps: Distance<T>,
    pub returns: u64,
    pub verdict: FamilyVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct RecurrenceRow<T: ExactInt = BigInt> {
    pub point: Point<T>,
    pub cells: Vec<RecurrenceCell<T>>,
    /// Conjunction over the ε grid.
    pub overall: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct RecurrenceReport<T: ExactInt = BigInt> {
    pub family: Family,
    pub horizon: u64,
    pub rows: Vec<RecurrenceRow<T>>,
    pub semantics: String,
}

/// Per-point, per-ε family verdicts for the return-time sets of `points`.
pub fn recurrence_test<T: ExactInt>(
    spec: &SystemSpec<T>,
    points: &[Point<T>],
    family: Family,
    eps_grid: &[Distance<T>],
    horizon: u64,
) -> Result<RecurrenceReport<T>> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| e.is_zero()) {
        return Err(Error::precondition("ε grid must be nonempty and positive"));
    }
    if eps_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::precondition("ε grid must be strictly decreasing"));
    }
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        let mut cells = Vec::with_capacity(eps_grid.len());
        let mut overall = Status::In;
        for eps in eps_grid {
            let n = return_times(spec, x, eps, horizon)?;
            let verdict = family_test(&n, family);
            overall = overall.and(verdict.status);
            cells.push(RecurrenceCell { eps: eps.clone(), returns: n.len() as u64, verdict });
        }
        rows.push(RecurrenceRow { point: x.clone(), cells, overall });
    }
    Ok(RecurrenceReport {
        family,
        horizon,
        rows,
        semantics: "a point is recurrent for the family when N(x, ε) is a member for every ε > 0; \
            the overall verdict is OUT if any grid ε gives OUT, else UNKNOWN if any gives UNKNOWN, else IN, \
            and IN only speaks for the listed ε and horizon"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::QuadraticNumber;
    use crate::systems::SymbolicSequence;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::rational(p, d)
    }

    fn seq(s: &str) -> Point {
        Point::shift(SymbolicSequence::parse(2, s).unwrap())
    }

    fn members(s: &IndexSet) -> Vec<u64> {
        s.members().collect()
    }

    #[test]
    fn return_time_examples() {
        let quarter: SystemSpec = SystemSpec::rotation(q(1, 4));
        let n = return_times(&quarter, &Point::circle(q(0, 1)), &Distance::rational(3, 10), 10).unwrap();
        assert_eq!(members(&n), vec![0, 1, 3, 4, 5, 7, 8, 9]);

        let shift: SystemSpec = SystemSpec::full_shift(2);
        let n = return_times(&shift, &seq("(0)"), &Distance::Pow2(40), 50).unwrap();
        assert_eq!(n.len(), 50);

        let golden: SystemSpec = SystemSpec::golden_rotation();
        let n = return_times(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 100), 10).unwrap();
        assert_eq!(members(&n), vec![0]);
        assert!(return_times(&golden, &Point::circle(q(0, 1)), &Distance::Zero, 10).is_err());
    }

    #[test]
    fn golden_returns_match_float_oracle() {
        let golden: SystemSpec = SystemSpec::golden_rotation();
        let n = return_times(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 50), 2000).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let oracle: Vec<u64> = (0..2000u64)
            .filter(|&i| {
                let x = (i as f64 * alpha).fract();
                x.min(1.0 - x) <= 0.02
            })
            .collect();
        assert_eq!(members(&n), oracle);
        // three-gap sanity: consecutive returns take at most three distinct gaps
        let mut gaps: Vec<u64> = oracle.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_unstable();
        gaps.dedup();
        assert!(gaps.len() <= 3, "{gaps:?}");
    }

    #[test]
    fn hitting_examples() {
        let shift: SystemSpec = SystemSpec::full_shift(2);
        let c0 = OpenSetSpec::cylinder(vec![0]);
        let (n, w) = hitting_witnesses(&shift, &c0, &c0, 5, 5).unwrap();
        assert_eq!(n.len(), 5);
        for hw in &w {
            let x = &hw.point;
            assert!(c0.contains(x).unwrap());
            assert!(c0.contains(&shift.iterate(x, hw.index).unwrap()).unwrap());
        }

        let quarter: SystemSpec = SystemSpec::rotation(q(1, 4));
        let arc = OpenSetSpec::arc(q(0, 1), q(1, 8));
        assert_eq!(members(&hitting_times(&quarter, &arc, &arc, 8).unwrap()), vec![0, 4]);

        let p = seq("(001)");
        let orbit = SystemSpec::orbit_of(SystemSpec::full_shift(2), p.clone()).unwrap();
        let fp = orbit.step(&p).unwrap();
        let n = hitting_times(&orbit, &OpenSetSpec::Points { points: vec![p] }, &OpenSetSpec::Points { points: vec![fp] }, 7).unwrap();
        assert_eq!(members(&n), vec![1, 4]);
    }

    #[test]
    fn hitting_brute_force_words() {
        // f^i[u] ∩ [v] ≠ ∅ iff some word of length max(|u|, i+|v|) starts with u and reads v at i
        let shift: SystemSpec = SystemSpec::full_shift(2);
        let u = vec![0u8, 1];
        let v = vec![1u8, 1, 0];
        let n = hitting_times(&shift, &OpenSetSpec::cylinder(u.clone()), &OpenSetSpec::cylinder(v.clone()), 6).unwrap();
        for i in 0..6usize {
            let len = u.len().max(i + v.len());
            let exists = (0u32..1 << len).any(|m| {
                let w: Vec<u8> = (0..len).map(|k| (m >> k & 1) as u8).collect();
                w[..u.len()] == u[..] && w[i..i + v.len()] == v[..]
            });
            assert_eq!(n.contains(i as u64), exists, "i={i}");
        }
    }

    #[test]
    fn period_orbit_hits_are_progressions() {
        let p = seq("(00101)");
        let orbit = SystemSpec::orbit_of(SystemSpec::full_shift(2), p.clone()).unwrap();
        let pts = orbit.finite_points().unwrap().unwrap();
        for a in &pts {
            for b in &pts {
                let n = hitting_times(
                    &orbit,
                    &OpenSetSpec::Points { points: vec![a.clone()] },
                    &OpenSetSpec::Points { points: vec![b.clone()] },
                    40,
                )
                .unwrap();
                let r = n.first().unwrap();
                assert!(r < 5);
                assert_eq!(members(&n), (r..40).step_by(5).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn bohr_examples() {
        let quarter: SystemSpec = SystemSpec::rotation(q(1, 4));
        let b = bohr_set(&quarter, &Point::circle(q(0, 1)), &Distance::Zero, 20).unwrap();
        assert_eq!(members(&b), vec![0, 4, 8, 12, 16]);

        let odo: SystemSpec = SystemSpec::odometer(2);
        let zero = Point::odometer(SymbolicSequence::constant(2, 0).unwrap());
        let b = bohr_set(&odo, &zero, &Distance::Pow2(3), 32).unwrap();
        assert_eq!(members(&b), vec![0, 8, 16, 24]);

        let golden: SystemSpec = SystemSpec::golden_rotation();
        let b = bohr_set(&golden, &Point::circle(q(0, 1)), &Distance::rational(1, 5), 20).unwrap();
        assert!(b.contains(0));
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        for i in 0..20u64 {
            let x = (i as f64 * alpha).fract();
            assert_eq!(b.contains(i), x.min(1.0 - x) <= 0.2);
        }
        let d = super::super::difference_set(&b).unwrap();
        for i in d.members() {
            let x = (i as f64 * alpha).fract();
            assert!(x.min(1.0 - x) <= 0.4 + 1e-12);
        }
        assert!(bohr_set(&SystemSpec::<BigInt>::full_shift(2), &seq("(0)"), &Distance::Pow2(1), 5).is_err());
    }

    #[test]
    fn recurrence_examples() {
        let shift: SystemSpec = SystemSpec::full_shift(2);
        let grid = vec![Distance::Pow2(1), Distance::Pow2(3), Distance::Pow2(6)];
        let r = recurrence_test(&shift, &[seq("(001)")], Family::Frr { k: None }, &grid, 100).unwrap();
        assert_eq!(r.rows[0].overall, Status::In);
        for c in &r.rows[0].cells {
            assert_eq!(c.verdict.witness, Some(super::super::Witness::Period { k: 3 }));
        }

        let golden: SystemSpec = SystemSpec::golden_rotation();
        let r = recurrence_test(&golden, &[Point::circle(q(0, 1))], Family::Fs { k: None }, &[Distance::rational(1, 10)], 10_000).unwrap();
        assert_eq!(r.rows[0].overall, Status::In);

        // x = 1 0 0 0 ...: every later iterate differs from x at index 0
        let r = recurrence_test(&shift, &[seq("1(0)")], Family::Frr { k: None }, &[Distance::Pow2(1)], 50).unwrap();
        assert_eq!(r.rows[0].cells[0].returns, 1);
        assert_eq!(r.rows[0].overall, Status::Unknown);

        assert!(recurrence_test(&shift, &[seq("(0)")], Family::Frr { k: None }, &[Distance::Pow2(3), Distance::Pow2(1)], 5).is_err());
    }

    proptest! {
        #[test]
        fn returns_are_eps_monotone(num in 0i64..1000, e1 in 1i64..100, e2 in 1i64..100, x in 0i64..100) {
            let spec: SystemSpec = SystemSpec::rotation(q(num, 997));
            let (lo, hi) = (e1.min(e2), e1.max(e2));
            let x = Point::circle(q(x, 100));
            let a = return_times(&spec, &x, &Distance::rational(lo, 200), 300).unwrap();
            let b = return_times(&spec, &x, &Distance::rational(hi, 200), 300).unwrap();
            prop_assert!(a.is_subset(&b));
        }
    }
}
