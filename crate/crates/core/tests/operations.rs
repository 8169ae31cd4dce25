//! Worked examples for each module, each checked against an independent
//! computation that does not go through the library's own orbit code.

use dc1lab::construct::{build_dc1_tuple, tuple_from_stable_targets, BlockSchedule};
use dc1lab::furstenberg::{
    bohr_set, difference_set, family_test, hitting_times, lemma12_inclusion_check, lemma13_inclusion_check, recurrence_test,
    return_times, transitivity_report, Family, InclusionStatus, Status, TransitivityMode,
};
use dc1lab::orbitstats::{
    dc1_tuple_statistics, default_eps_grid, density_profile, distal_tuple_check, omega_limit_estimate, CheckpointSchedule,
    StatsOptions,
};
use dc1lab::stable::{stable_contraction_trace, stable_cover_report, stable_line_point, stable_membership, StableVerdict};
use dc1lab::systems::{check_minimal_equicontinuous, EquicontinuityVerdict, Modulus, Verdict};
use dc1lab::{BigDistance, BigPoint, BigQuadratic, BigSystem, OpenSetSpec, Point, SymbolicSequence};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::One;

type Q = BigQuadratic;

const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];
const PHI: f64 = 0.618_033_988_749_894_9;

fn q(p: i64, r: i64) -> Q {
    Q::rational(p, r)
}

fn seq(prefix: &[u8], period: &[u8]) -> SymbolicSequence {
    SymbolicSequence::prefix_periodic(2, prefix.to_vec(), period.to_vec()).unwrap()
}

fn shift_point(prefix: &[u8], period: &[u8]) -> BigPoint {
    Point::shift(seq(prefix, period))
}

fn circle_dist(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    f.min(1.0 - f)
}

fn members(s: &dc1lab::furstenberg::IndexSet) -> Vec<u64> {
    s.members().collect()
}

#[test]
fn torus_step_matches_rational_matrix_product() {
    let spec = BigSystem::cat_map();
    let p = Point::torus(q(1, 5), q(2, 5));
    let image = spec.step(&p).unwrap();
    // independent: rational matrix-vector product mod 1
    let v = [BigRational::new(1.into(), 5.into()), BigRational::new(2.into(), 5.into())];
    let w: Vec<BigRational> = CAT
        .iter()
        .map(|row| {
            let s = BigRational::from_integer(row[0].into()) * &v[0] + BigRational::from_integer(row[1].into()) * &v[1];
            &s - s.floor()
        })
        .collect();
    assert_eq!(w, vec![BigRational::new(4.into(), 5.into()), BigRational::new(3.into(), 5.into())]);
    let (x, y) = image.as_torus().unwrap();
    assert_eq!((x.rational_part(), y.rational_part()), (w[0].clone(), w[1].clone()));
    assert!(x.is_rational() && y.is_rational());
    assert_eq!(spec.step(&image).unwrap(), p);
}

#[test]
fn minimality_examples() {
    let shift = BigSystem::full_shift(2);
    let two_cycle = BigSystem::restrict(shift.clone(), vec![shift_point(&[], &[0, 1]), shift_point(&[], &[1, 0])]).unwrap();
    let r = check_minimal_equicontinuous(&two_cycle, 100).unwrap();
    assert_eq!(r.minimal, Verdict::Certified);
    // separation of 0101… and 1010… is 1, so δ(ε) = min(ε, 1/2)
    assert!(matches!(
        r.equicontinuity,
        EquicontinuityVerdict::Certified { modulus: Modulus::Finite { separation: Some(ref s) }, .. } if *s == BigDistance::one()
    ));

    let golden = check_minimal_equicontinuous(&BigSystem::golden_rotation(), 1000).unwrap();
    assert_eq!(golden.minimal, Verdict::Unknown { horizon: 1000 });
    assert!(matches!(golden.equicontinuity, EquicontinuityVerdict::Certified { modulus: Modulus::Isometry, ref basis } if basis == "analytic"));

    let fixed = BigSystem::restrict(shift, vec![shift_point(&[], &[0]), shift_point(&[], &[1])]).unwrap();
    assert!(matches!(check_minimal_equicontinuous(&fixed, 100).unwrap().minimal, Verdict::Refuted { .. }));
}

#[test]
fn return_time_examples() {
    let quarter = BigSystem::rotation(q(1, 4));
    let got = return_times(&quarter, &Point::circle(Q::zero()), &BigDistance::rational(3, 10), 10).unwrap();
    let oracle: Vec<u64> = (0..10).filter(|&i| circle_dist(i as f64 / 4.0) <= 0.3).collect();
    assert_eq!(members(&got), oracle);
    assert_eq!(oracle, vec![0, 1, 3, 4, 5, 7, 8, 9]);

    let golden = BigSystem::golden_rotation();
    let got = return_times(&golden, &Point::circle(Q::zero()), &BigDistance::rational(1, 100), 10).unwrap();
    let oracle: Vec<u64> = (0..10).filter(|&i| circle_dist(i as f64 * PHI) <= 0.01).collect();
    assert_eq!(members(&got), oracle);
    assert_eq!(oracle, vec![0]);

    // 1000… leaves its 1/2-ball for good after one step
    let shift = BigSystem::full_shift(2);
    let got = return_times(&shift, &shift_point(&[1], &[0]), &BigDistance::Pow2(1), 50).unwrap();
    assert_eq!(members(&got), vec![0]);
}

#[test]
fn hitting_time_examples() {
    let shift = BigSystem::full_shift(2);
    let c0 = OpenSetSpec::cylinder(vec![0]);
    assert_eq!(members(&hitting_times(&shift, &c0, &c0, 5).unwrap()), vec![0, 1, 2, 3, 4]);

    let quarter = BigSystem::rotation(q(1, 4));
    let arc = OpenSetSpec::arc(Q::zero(), q(1, 8));
    assert_eq!(members(&hitting_times(&quarter, &arc, &arc, 8).unwrap()), vec![0, 4]);
}

#[test]
fn bohr_set_examples() {
    let odo = BigSystem::odometer(2);
    let zero = Point::odometer(seq(&[], &[0]));
    let got = bohr_set(&odo, &zero, &BigDistance::Pow2(3), 32).unwrap();
    // 2-adic: n is within 2^-3 of 0 iff 8 divides n
    assert_eq!(members(&got), (0..32).filter(|n| n % 8 == 0).collect::<Vec<_>>());

    let golden = BigSystem::golden_rotation();
    let got = bohr_set(&golden, &Point::circle(Q::zero()), &BigDistance::rational(1, 5), 20).unwrap();
    let oracle: Vec<u64> = (0..20).filter(|&i| circle_dist(i as f64 * PHI) <= 0.2).collect();
    assert_eq!(members(&got), oracle);
    assert!(got.contains(0));
    let diff = difference_set(&got).unwrap();
    assert!(got.is_subset(&diff));
    for d in diff.members() {
        assert!(circle_dist(d as f64 * PHI) <= 0.4 + 1e-12, "difference {d}");
    }
    assert!(bohr_set(&BigSystem::full_shift(2), &shift_point(&[], &[0]), &BigDistance::Pow2(1), 10).is_err());
}

#[test]
fn difference_set_brute_force() {
    let a = dc1lab::furstenberg::IndexSet::new(6, [0, 2, 5]).unwrap();
    assert_eq!(members(&difference_set(&a).unwrap()), vec![0, 2, 3, 5]);
}

#[test]
fn family_examples() {
    let golden = BigSystem::golden_rotation();
    let r = recurrence_test(&golden, &[Point::circle(Q::zero())], Family::Fs { k: None }, &[BigDistance::rational(1, 10)], 10_000)
        .unwrap();
    assert_eq!(r.rows[0].overall, Status::In);
    // independent: gaps between f64 returns stay below the default bound
    let hits: Vec<u64> = (0..10_000).filter(|&i| circle_dist(i as f64 * PHI) <= 0.1).collect();
    let gap = hits.windows(2).map(|w| w[1] - w[0]).max().unwrap();
    assert!(gap <= 100, "gap {gap}");

    let evens = dc1lab::furstenberg::IndexSet::new(100, (0..100).step_by(2)).unwrap();
    assert_eq!(evens.max_run(), 1);
    assert_eq!(evens.complement().max_gap(), 2);
    assert_eq!(family_test(&evens, Family::Fs { k: Some(2) }).status, Status::In);
    assert_eq!(family_test(&evens, Family::Frr { k: None }).status, Status::In);
    assert_ne!(family_test(&evens, Family::Ft { length: Some(2) }).status, Status::In);
}

#[test]
fn lemma_examples() {
    let golden = BigSystem::golden_rotation();
    let zero = Point::circle(Q::zero());
    let r = lemma12_inclusion_check(&golden, &zero, &Point::circle(q(1, 2)), &BigDistance::rational(1, 10), 10_000).unwrap();
    assert_eq!(r.status, InclusionStatus::Holds);
    assert_eq!(r.inclusion.as_ref().unwrap().violation_count, 0);
    // the index found is a genuine δ-approach of 1/2
    let i = r.index.unwrap();
    assert!(circle_dist(i as f64 * PHI - 0.5) <= r.delta.approx() + 1e-12);

    let shift = BigSystem::full_shift(2);
    let (u, v) = (OpenSetSpec::cylinder(vec![0]), OpenSetSpec::cylinder(vec![1]));
    let r = lemma13_inclusion_check(&golden, &zero, &BigDistance::rational(1, 20), &shift, &u, &v, 2, 100).unwrap();
    assert_eq!(r.status, InclusionStatus::Holds);
    assert_eq!((r.inclusion1.violation_count, r.inclusion2.violation_count), (0, 0));
    // every witness really starts in U and lands in V after index + j steps
    for w in &r.witnesses {
        assert!(u.contains(&w.point).unwrap());
        assert!(v.contains(&shift.iterate(&w.point, w.index + 2).unwrap()).unwrap());
    }
}

#[test]
fn transitivity_examples() {
    let shift = BigSystem::full_shift(2);
    let r = transitivity_report(&shift, 3, 20, TransitivityMode::Plain).unwrap();
    assert_eq!(r.summary.pairs, 64);
    assert!(r.summary.all_in);
    assert!(r.summary.max_first_hit.unwrap() <= 3);
    // word-overlap oracle: u then v fits once i ≥ |u| or the words overlap consistently
    let words: Vec<Vec<u8>> = (0..8u8).map(|w| (0..3).map(|b| (w >> (2 - b)) & 1).collect()).collect();
    for e in &r.entries {
        let (wu, wv) = match (&r.cells[e.u], &r.cells[e.v]) {
            (OpenSetSpec::Cylinder { word: a, .. }, OpenSetSpec::Cylinder { word: b, .. }) => (a.clone(), b.clone()),
            other => panic!("unexpected cells {other:?}"),
        };
        assert!(words.contains(&wu) && words.contains(&wv));
        let first = (0..=3).find(|&i| (i..3).all(|k| wu[k] == wv[k - i])).unwrap() as u64;
        assert_eq!(e.first_hit, Some(first));
    }

    let cycle = BigSystem::orbit_of(shift.clone(), shift_point(&[], &[0, 0, 1])).unwrap();
    let r = transitivity_report(&shift, 2, 30, TransitivityMode::ProductWith { lambda: cycle }).unwrap();
    assert!(r.summary.all_in);

    let r = transitivity_report(&BigSystem::rotation(q(1, 4)), 3, 100, TransitivityMode::Plain).unwrap();
    assert!(r.summary.unknown_count > 0);
    assert!(!r.entries.iter().any(|e| e.status == Status::Out));
}

#[test]
fn distal_pair_separation() {
    let shift = BigSystem::full_shift(2);
    let pair = [shift_point(&[], &[0]), shift_point(&[0], &[1])];
    let r = distal_tuple_check(&shift, &pair, 50).unwrap();
    // direct: first disagreement of the shifted words
    let a = seq(&[], &[0]);
    let b = seq(&[0], &[1]);
    let oracle = (0..50u64)
        .map(|i| (0..64).find(|&k| a.symbol_at(i + k) != b.symbol_at(i + k)).map(|k| 0.5f64.powi(k as i32)).unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(oracle, 0.5);
    assert_eq!(r.min_separation, BigDistance::Pow2(1));
    assert_eq!(r.attained_at, 0);
    assert!(r.certified);
}

#[test]
fn golden_orbit_visits_every_arc() {
    let golden = BigSystem::golden_rotation();
    let r = omega_limit_estimate(&golden, &Point::circle(Q::zero()), 1000, 0, 3).unwrap();
    assert_eq!(r.total_cells, 8);
    assert_eq!(r.cells.len(), 8);
    let mut seen = [false; 8];
    for i in 0..1000 {
        seen[((i as f64 * PHI).fract() * 8.0) as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
    assert_eq!(r.eventual_period, None);

    let shift = BigSystem::full_shift(2);
    let r = omega_limit_estimate(&shift, &shift_point(&[1, 1], &[0, 1]), 100, 50, 2).unwrap();
    assert_eq!(r.eventual_period, Some(2));
    assert!(r.periodic_proximity);
}

#[test]
fn stable_line_examples() {
    let origin = Point::torus(Q::zero(), Q::zero());
    let t = q(1, 100);
    let p = stable_line_point(&CAT, &origin, &t).unwrap();
    // eigenvector (1, -(1+√5)/2) of λ = (3-√5)/2; λ² - 3λ + 1 = 0
    let lam = Q::new(Ratio::new(3.into(), 2.into()), Ratio::new((-1).into(), 2.into()));
    assert!((&(&lam * &lam) - &(&lam * &q(3, 1))).add_int(&BigInt::one()).is_zero());
    let slope = Q::new(Ratio::new((-1).into(), 2.into()), Ratio::new((-1).into(), 2.into()));
    let (x, y) = p.as_torus().unwrap();
    assert_eq!(x, &t);
    assert_eq!(y, &(&t * &slope).fract());
    // (2 1; 1 1)·(1, s) = λ·(1, s)
    assert_eq!(&q(2, 1) + &slope, lam);
    assert_eq!(&q(1, 1) + &slope, &lam * &slope);

    let spec = BigSystem::cat_map();
    let ev = stable_membership(&spec, &origin, &p, &BigDistance::rational(1, 100), 0, 30).unwrap();
    assert_eq!(ev.verdict, StableVerdict::InCertified);
    let trace = stable_contraction_trace(&CAT, &origin, &t, 30).unwrap();
    assert_eq!(trace.eigenvalue, lam);
    assert!(trace.exact_ratio_steps >= 20);
    for (n, d) in trace.distances.iter().enumerate().take(20) {
        let predicted = 0.01 * (1.0 + 5f64.sqrt()) / 2.0 * ((3.0 - 5f64.sqrt()) / 2.0).powi(n as i32);
        assert!((d.approx() - predicted).abs() <= 1e-12 * predicted.max(1e-300), "step {n}");
    }

    // a period-2 anchor contracts by λ² per period
    let anchor = Point::torus(q(1, 5), q(2, 5));
    let t = q(1, 50);
    let y = stable_line_point(&CAT, &anchor, &t).unwrap();
    let d0 = spec.distance(&anchor, &y).unwrap().to_quadratic();
    let d2 = spec.distance(&spec.iterate(&anchor, 2).unwrap(), &spec.iterate(&y, 2).unwrap()).unwrap().to_quadratic();
    assert_eq!(d2, &d0 * &(&lam * &lam));
    assert_eq!(spec.iterate(&anchor, 2).unwrap(), anchor);
}

#[test]
fn stable_cover_examples() {
    let spec = BigSystem::cat_map();
    let origin = Point::torus(Q::zero(), Q::zero());
    let eps = BigDistance::rational(1, 100);
    let r = stable_cover_report(&spec, std::slice::from_ref(&origin), &eps, 3, 10, 20).unwrap();
    assert_eq!(r.coverage, Ratio::one());
    for row in &r.rows {
        let w = row.witness.as_ref().unwrap();
        assert!(row.cell.contains(w).unwrap());
        let (wx, wy) = w.as_torus().unwrap();
        // the witness sits at parameter t on the line through 0
        let (fx, fy) = (wx.approx(), wy.approx());
        let s = -(1.0 + 5f64.sqrt()) / 2.0;
        let t = row.line_parameter.as_ref().unwrap().approx();
        assert!(circle_dist(fx - t) < 1e-9 && circle_dist(fy - s * t) < 1e-6, "{w:?}");
    }

    let shift = BigSystem::full_shift(2);
    let r = stable_cover_report(&shift, &[shift_point(&[], &[0])], &BigDistance::Pow2(2), 3, 5, 10).unwrap();
    assert_eq!(r.coverage, Ratio::one());
    for row in &r.rows {
        let w = row.witness.as_ref().unwrap().as_sequence().unwrap();
        assert!((8..40).all(|i| w.symbol_at(i) == 0));
    }
}

#[test]
fn linear_schedule_phase_lengths() {
    let s = BlockSchedule::linear();
    // L_1 = 1, L_k = k·S_(k-1)
    let mut ends = vec![1u64];
    for k in 2..=6u64 {
        let last = *ends.last().unwrap();
        ends.push(last + k * last);
    }
    assert_eq!(&s.ends()[..6], &ends[..]);
    assert_eq!(&ends[..4], &[1, 3, 12, 60]);
}

#[test]
fn two_tuple_density_at_phase_end() {
    let spec = build_dc1_tuple(2, BlockSchedule::linear(), None).unwrap();
    let xs = spec.sequences().unwrap();
    let checkpoints: Vec<u64> = spec.schedule.ends()[..5].to_vec();
    let sched = CheckpointSchedule::explicit(checkpoints.clone(), 1).unwrap();
    let profile = density_profile(|i| xs[0].symbol_at(i) != xs[1].symbol_at(i), &sched);
    // direct recount: even phases are the distal ones
    for (j, &m) in checkpoints.iter().enumerate() {
        let direct = (0..m).filter(|&i| {
            let phase = checkpoints.iter().position(|&e| i < e).unwrap() + 1;
            phase % 2 == 0
        });
        assert_eq!(profile.counts[j], direct.count() as u64);
    }
    // end of phase 4: distal indices are phases 2 and 4
    assert_eq!(profile.densities[3], Ratio::new(2 + 48, 60));
    for i in [1u64, 2, 12, 59] {
        assert_eq!((xs[0].symbol_at(i), xs[1].symbol_at(i)), (1, 2));
    }
}

#[test]
fn default_two_tuple_reaches_full_density() {
    let tuple = build_dc1_tuple(2, BlockSchedule::default(), None).unwrap();
    let spec: BigSystem = tuple.system();
    let points = tuple.points().unwrap();
    let sched = CheckpointSchedule::geometric(1000, 1_000_000, Ratio::new(11, 10)).unwrap();
    let v = dc1_tuple_statistics(&spec, &points, &BigDistance::Pow2(1), &[BigDistance::Pow2(8)], &sched, &StatsOptions::default())
        .unwrap();
    assert!(v.a_profile.limsup_estimate >= Ratio::new(99, 100));
    assert!(v.b_profiles[0].profile.limsup_estimate >= Ratio::new(99, 100));
    assert!(v.dc1_evidence && v.invariants_hold);
    assert_eq!(v.evidence_from_profiles(), v.dc1_evidence);
    assert_eq!(default_eps_grid::<BigInt>().len(), 3);
}

#[test]
fn tuples_from_stable_targets() {
    let fixed = [seq(&[], &[1]), seq(&[], &[0])];
    let t = tuple_from_stable_targets(&fixed, &seq(&[], &[0]), BlockSchedule::linear()).unwrap();
    assert_eq!(t.separation, BigDistance::one());

    let orbit = [seq(&[], &[0, 0, 1]), seq(&[], &[0, 1, 0]), seq(&[], &[1, 0, 0])];
    let t = tuple_from_stable_targets(&orbit, &seq(&[], &[0]), BlockSchedule::linear()).unwrap();
    // two distinct rotations of 001 first differ within two symbols
    assert_eq!(t.separation, BigDistance::Pow2(1));
    let xs = t.spec.sequences().unwrap();
    let schedule = &t.spec.schedule;
    // interior of distal phase 4 = [12, 60): distances at least s
    for i in 12..50u64 {
        for a in 0..3 {
            for b in a + 1..3 {
                let k = (0..3).find(|&k| xs[a].symbol_at(i + k) != xs[b].symbol_at(i + k));
                assert!(matches!(k, Some(0) | Some(1)), "index {i}");
            }
        }
        assert!(!schedule.is_proximal(i));
    }

    assert!(tuple_from_stable_targets(&[seq(&[], &[0, 1]), seq(&[], &[0, 1])], &seq(&[], &[0]), BlockSchedule::linear()).is_err());
}
