//! Explicit scrambled tuples on full shifts built from alternating
//! proximal and distal blocks.

mod schedule;

use serde::{Deserialize, Serialize};

pub use schedule::{BlockSchedule, GrowthRule};

use crate::arith::{Distance, ExactInt};
use crate::error::{Error, Result};
use crate::orbitstats::{derive_deltas, distal_tuple_check, Deltas};
use crate::systems::{BlockProgram, Point, SymbolicSequence, SystemSpec};

/// Description of an n-tuple whose coordinate `j` copies `proximal` on odd
/// phases and `anchors[j]` on even phases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScrambledTupleSpec {
    pub alphabet: u32,
    pub proximal: SymbolicSequence,
    pub anchors: Vec<SymbolicSequence>,
    pub schedule: BlockSchedule,
}

impl ScrambledTupleSpec {
    pub fn n(&self) -> usize {
        self.anchors.len()
    }

    /// The tuple's coordinates as block-program sequences.
    pub fn sequences(&self) -> Result<Vec<SymbolicSequence>> {
        if self.anchors.len() < 2 {
            return Err(Error::precondition("a tuple needs at least two anchors"));
        }
        self.anchors
            .iter()
            .map(|a| {
                SymbolicSequence::block_program(
                    self.alphabet,
                    BlockProgram { schedule: self.schedule.clone(), proximal: self.proximal.clone(), distal: a.clone() },
                )
            })
            .collect()
    }

    /// The coordinates as shift points.
    pub fn points<T: ExactInt>(&self) -> Result<Vec<Point<T>>> {
        Ok(self.sequences()?.into_iter().map(Point::shift).collect())
    }

    /// The full shift the tuple lives in.
    pub fn system<T: ExactInt>(&self) -> SystemSpec<T> {
        SystemSpec::full_shift(self.alphabet)
    }
}

/// The default tuple: proximal anchor `0^∞`, distal anchors constant
/// sequences over `n` distinct symbols.
///
/// With `alphabet = n + 1` the distal symbols are `1..=n`; with
/// `alphabet = n` they are `0..n` and the proximal anchor reuses `0`.
pub fn build_dc1_tuple(n: usize, schedule: BlockSchedule, alphabet: Option<u32>) -> Result<ScrambledTupleSpec> {
    if n < 2 {
        return Err(Error::precondition(format!("tuple size {n} below 2")));
    }
    let alphabet = alphabet.unwrap_or(n as u32 + 1);
    if (alphabet as usize) < n || alphabet > 256 {
        return Err(Error::precondition(format!("alphabet of size {alphabet} cannot hold {n} distinct anchors")));
    }
    let first = if alphabet as usize > n { 1 } else { 0 };
    let anchors = (0..n)
        .map(|j| SymbolicSequence::constant(alphabet, (first + j) as u8))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScrambledTupleSpec { alphabet, proximal: SymbolicSequence::constant(alphabet, 0)?, anchors, schedule })
}

/// A tuple tracking a distal set of anchors, with its certified separation
/// and the `δ`, `ε` derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedTuple {
    pub spec: ScrambledTupleSpec,
    pub separation: Distance,
    pub deltas: Deltas,
}

/// Generalises `build_dc1_tuple` to eventually periodic anchors and target.
pub fn tuple_from_stable_targets(
    anchors: &[SymbolicSequence],
    target: &SymbolicSequence,
    schedule: BlockSchedule,
) -> Result<TrackedTuple> {
    if anchors.len() < 2 {
        return Err(Error::precondition("a tuple needs at least two anchors"));
    }
    if !target.is_prefix_periodic() || anchors.iter().any(|a| !a.is_prefix_periodic()) {
        return Err(Error::precondition("anchors and target must be eventually periodic"));
    }
    let alphabet = anchors.iter().chain([target]).map(|s| s.alphabet()).max().unwrap();
    let spec: SystemSpec = SystemSpec::full_shift(alphabet);
    let points: Vec<Point> = anchors.iter().cloned().map(Point::shift).collect();
    let horizon = anchors
        .iter()
        .map(|a| a.eventual_period().unwrap())
        .fold((0usize, 1usize), |(p, l), (pa, la)| (p.max(pa), num_integer::lcm(l, la)));
    // cycle detection needs about twice the preperiod plus period
    let report = distal_tuple_check(&spec, &points, 2 * (horizon.0 + horizon.1) as u64 + 2)?;
    if !report.certified {
        return Err(Error::precondition("anchors could not be certified distal"));
    }
    if report.min_separation.is_zero() {
        return Err(Error::precondition(format!(
            "anchors are not distal: orbits meet at step {}",
            report.attained_at
        )));
    }
    let deltas = derive_deltas(&report.min_separation)?;
    Ok(TrackedTuple {
        spec: ScrambledTupleSpec { alphabet, proximal: target.clone(), anchors: anchors.to_vec(), schedule },
        separation: report.min_separation,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_tuple_layout() {
        let spec = build_dc1_tuple(2, BlockSchedule::linear(), None).unwrap();
        let xs = spec.sequences().unwrap();
        // Phases: [0,1) proximal, [1,3) distal, [3,12) proximal, [12,60) distal.
        for i in [0u64, 3, 11, 60] {
            assert_eq!((xs[0].symbol_at(i), xs[1].symbol_at(i)), (0, 0), "index {i}");
        }
        for i in [1u64, 2, 12, 59] {
            assert_eq!((xs[0].symbol_at(i), xs[1].symbol_at(i)), (1, 2), "index {i}");
        }
    }

    #[test]
    fn small_alphabet_reuses_zero() {
        let spec = build_dc1_tuple(2, BlockSchedule::default(), Some(2)).unwrap();
        let xs = spec.sequences().unwrap();
        assert_eq!((xs[0].symbol_at(5), xs[1].symbol_at(5)), (0, 1));
        assert!(build_dc1_tuple(3, BlockSchedule::default(), Some(2)).is_err());
        assert!(build_dc1_tuple(1, BlockSchedule::default(), None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = build_dc1_tuple(3, BlockSchedule::default(), None).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ScrambledTupleSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn fixed_point_anchors_reduce_to_the_default() {
        let a = [SymbolicSequence::constant(3, 1).unwrap(), SymbolicSequence::constant(3, 2).unwrap()];
        let t = tuple_from_stable_targets(&a, &SymbolicSequence::constant(3, 0).unwrap(), BlockSchedule::default()).unwrap();
        assert_eq!(t.spec, build_dc1_tuple(2, BlockSchedule::default(), None).unwrap());
        assert_eq!(t.separation, Distance::one());
    }

    #[test]
    fn equal_anchors_rejected() {
        let a = [SymbolicSequence::constant(2, 1).unwrap(), SymbolicSequence::constant(2, 1).unwrap()];
        assert!(tuple_from_stable_targets(&a, &SymbolicSequence::constant(2, 0).unwrap(), BlockSchedule::default()).is_err());
    }
}
