//! Lockstep iteration of a tuple with exact pairwise distances per step.
//!
//! Products are flattened into leaf factors. Shift leaves never materialise
//! shifted sequences: each pair keeps the next index where its coordinates
//! differ, so scanning is amortised over the run.

use crate::arith::{Distance, ExactInt};
use crate::error::{Error, Result};
use crate::systems::{Disagreement, Point, SymbolicSequence, SystemSpec, DEFAULT_COMPARISON_BOUND};

enum Leaf<'a, T> {
    Shift,
    /// Distance is preserved by the map.
    Isometric(&'a SystemSpec<T>),
    Other(&'a SystemSpec<T>),
}

struct ShiftPair {
    a: SymbolicSequence,
    b: SymbolicSequence,
    next: Option<u64>,
    scanned_to: u64,
    /// Both sequences agree from here on (eventually periodic inputs only).
    agree_from: Option<u64>,
}

impl ShiftPair {
    fn new(a: SymbolicSequence, b: SymbolicSequence) -> Self {
        let agree_from = match (a.eventual_period(), b.eventual_period()) {
            (Some((pa, _)), Some((pb, _))) => {
                let p = pa.max(pb) as u64;
                (a.shifted(p) == b.shifted(p))
                    .then(|| (0..p).rev().find(|&k| a.symbol_at(k) != b.symbol_at(k)).map_or(0, |k| k + 1))
            }
            _ => None,
        };
        ShiftPair { a, b, next: None, scanned_to: 0, agree_from }
    }

    /// Exponent `k` of `d(σ^i a, σ^i b) = 2^-k` (`None` for 0) and whether
    /// the value was cut off at the comparison bound.
    fn at(&mut self, i: u64, bound: u64) -> (Option<i64>, bool) {
        if let Some(n) = self.next {
            if n >= i {
                return (Some((n - i) as i64), false);
            }
            self.next = None;
        }
        let from = self.scanned_to.max(i);
        let mut stop = i.saturating_add(bound);
        if let Some(af) = self.agree_from {
            if from >= af {
                return (None, false);
            }
            stop = stop.min(af);
        }
        match self.a.scan_disagreement(&self.b, from, stop) {
            Disagreement::At(k) => {
                self.next = Some(k);
                (Some((k - i) as i64), false)
            }
            _ => {
                self.scanned_to = stop;
                (None, self.agree_from != Some(stop))
            }
        }
    }
}

pub(crate) struct Lockstep<'a, T> {
    leaves: Vec<Leaf<'a, T>>,
    /// `current[member][leaf]`; shift leaves keep the unshifted sequence.
    current: Vec<Vec<Point<T>>>,
    pairs: Vec<(usize, usize)>,
    trackers: Vec<Vec<Option<ShiftPair>>>,
    step: u64,
    bound: u64,
}

fn flatten<'a, T: ExactInt>(
    spec: &'a SystemSpec<T>,
    p: &Point<T>,
    leaves: &mut Vec<Leaf<'a, T>>,
    points: &mut Vec<Point<T>>,
) -> Result<()> {
    match (spec, p) {
        (SystemSpec::Restriction { parent, .. }, _) => flatten(parent, p, leaves, points),
        (SystemSpec::Product { factors }, Point::Product { components }) => {
            for (f, c) in factors.iter().zip(components) {
                flatten(f, c, leaves, points)?;
            }
            Ok(())
        }
        (SystemSpec::FullShift { .. } | SystemSpec::Sft { .. }, _) => {
            leaves.push(Leaf::Shift);
            points.push(p.clone());
            Ok(())
        }
        (SystemSpec::CircleRotation { .. } | SystemSpec::Odometer { .. }, _) => {
            leaves.push(Leaf::Isometric(spec));
            points.push(p.clone());
            Ok(())
        }
        _ => {
            leaves.push(Leaf::Other(spec));
            points.push(p.clone());
            Ok(())
        }
    }
}

impl<'a, T: ExactInt> Lockstep<'a, T> {
    /// Validates the tuple (membership, pairwise distinct) and sets up step 0.
    pub(crate) fn new(spec: &'a SystemSpec<T>, tuple: &[Point<T>]) -> Result<Self> {
        if tuple.len() < 2 {
            return Err(Error::precondition(format!("tuple of size {} needs at least two points", tuple.len())));
        }
        for p in tuple {
            spec.check_point(p)?;
        }
        let n = tuple.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
        for &(j, k) in &pairs {
            if tuple[j] == tuple[k] {
                return Err(Error::precondition(format!("tuple points {j} and {k} are identical")));
            }
        }
        let mut leaves = Vec::new();
        let mut current = Vec::with_capacity(n);
        for (idx, p) in tuple.iter().enumerate() {
            let mut ls = Vec::new();
            let mut pts = Vec::new();
            flatten(spec, p, &mut ls, &mut pts)?;
            if idx == 0 {
                leaves = ls;
            }
            current.push(pts);
        }
        let trackers = pairs
            .iter()
            .map(|&(j, k)| {
                leaves
                    .iter()
                    .enumerate()
                    .map(|(l, leaf)| match leaf {
                        Leaf::Shift => Some(ShiftPair::new(
                            current[j][l].as_sequence().unwrap().clone(),
                            current[k][l].as_sequence().unwrap().clone(),
                        )),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        Ok(Lockstep { leaves, current, pairs, trackers, step: 0, bound: DEFAULT_COMPARISON_BOUND })
    }

    pub(crate) fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Pairwise distances at the current step, in `pairs()` order. Returns
    /// the number of pairs whose value was cut off at the comparison bound.
    pub(crate) fn distances(&mut self, out: &mut Vec<Distance<T>>) -> Result<u64> {
        out.clear();
        let mut truncated = 0;
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            let mut d = Distance::Zero;
            let mut cut = false;
            for (l, leaf) in self.leaves.iter().enumerate() {
                let v = match leaf {
                    Leaf::Shift => {
                        let (v, c) = self.trackers[p][l].as_mut().unwrap().at(self.step, self.bound);
                        cut |= c;
                        v.map_or(Distance::Zero, Distance::Pow2)
                    }
                    Leaf::Isometric(s) | Leaf::Other(s) => {
                        let r = s.distance_report(&self.current[j][l], &self.current[k][l], self.bound)?;
                        cut |= r.truncated;
                        r.value
                    }
                };
                if v > d {
                    d = v;
                }
            }
            truncated += cut as u64;
            out.push(d);
        }
        Ok(truncated)
    }

    pub(crate) fn advance(&mut self) -> Result<()> {
        for member in &mut self.current {
            for (l, leaf) in self.leaves.iter().enumerate() {
                if let Leaf::Isometric(s) | Leaf::Other(s) = leaf {
                    member[l] = s.step(&member[l])?;
                }
            }
        }
        self.step += 1;
        Ok(())
    }

    /// True if every pairwise distance is constant along the orbit.
    pub(crate) fn all_isometric(&self) -> bool {
        self.leaves.iter().all(|l| matches!(l, Leaf::Isometric(_)))
    }

    /// The current state of the non-isometric leaves, when every such leaf
    /// has an exactly comparable state; equal states mean the distance
    /// sequence repeats from there on.
    pub(crate) fn state_key(&self) -> Option<Vec<Point<T>>> {
        let mut key = Vec::new();
        for member in &self.current {
            for (l, leaf) in self.leaves.iter().enumerate() {
                match leaf {
                    Leaf::Shift => {
                        let s = member[l].as_sequence().unwrap();
                        if !s.is_prefix_periodic() {
                            return None;
                        }
                        key.push(Point::shift(s.shifted(self.step)));
                    }
                    Leaf::Other(_) => key.push(member[l].clone()),
                    Leaf::Isometric(_) => {}
                }
            }
        }
        Some(key)
    }
}
