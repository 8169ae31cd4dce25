use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset of `[0, horizon)`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IndexSetRepr", into = "IndexSetRepr")]
pub struct IndexSet {
    horizon: u64,
    bits: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    horizon: u64,
    members: Vec<u64>,
}

impl From<IndexSet> for IndexSetRepr {
    fn from(s: IndexSet) -> Self {
        IndexSetRepr { horizon: s.horizon, members: s.members().collect() }
    }
}

impl TryFrom<IndexSetRepr> for IndexSet {
    type Error = String;

    fn try_from(r: IndexSetRepr) -> Result<Self, String> {
        if r.members.windows(2).any(|w| w[0] >= w[1]) {
            return Err("members must be sorted and distinct".into());
        }
        IndexSet::new(r.horizon, r.members).map_err(|e| e.to_string())
    }
}

impl IndexSet {
    pub fn empty(horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::precondition("horizon must be at least 1"));
        }
        Ok(IndexSet { horizon, bits: vec![0; horizon.div_ceil(64) as usize] })
    }

    /// `members` in any order; duplicates are merged.
    pub fn new(horizon: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::empty(horizon)?;
        for m in members {
            if m >= horizon {
                return Err(Error::precondition(format!("member {m} outside [0, {horizon})")));
            }
            s.insert(m);
        }
        Ok(s)
    }

    pub fn from_predicate(horizon: u64, mut pred: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut s = Self::empty(horizon)?;
        for i in 0..horizon {
            if pred(i) {
                s.insert(i);
            }
        }
        Ok(s)
    }

    pub fn full(horizon: u64) -> Result<Self> {
        Self::from_predicate(horizon, |_| true)
    }

    pub(crate) fn insert(&mut self, i: u64) {
        debug_assert!(i < self.horizon);
        self.bits[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn contains(&self, i: u64) -> bool {
        i < self.horizon && self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(k as u64 * 64 + t)
            })
        })
    }

    pub fn first(&self) -> Option<u64> {
        self.members().next()
    }

    fn check_horizon(&self, other: &IndexSet) -> Result<()> {
        if self.horizon != other.horizon {
            return Err(Error::precondition(format!("horizons differ: {} and {}", self.horizon, other.horizon)));
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.members().all(|m| other.contains(m))
    }

    /// Members of `self` missing from `other`.
    pub fn difference(&self, other: &IndexSet) -> Vec<u64> {
        self.members().filter(|&m| !other.contains(m)).collect()
    }

    pub fn intersection(&self, other: &IndexSet) -> Result<IndexSet> {
        self.check_horizon(other)?;
        Ok(IndexSet { horizon: self.horizon, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() })
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        self.check_horizon(other)?;
        Ok(IndexSet { horizon: self.horizon, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect() })
    }

    /// `[0, horizon) \ self`.
    pub fn complement(&self) -> IndexSet {
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        self.mask_tail(&mut bits);
        IndexSet { horizon: self.horizon, bits }
    }

    fn mask_tail(&self, bits: &mut [u64]) {
        let r = self.horizon % 64;
        if r != 0 {
            *bits.last_mut().unwrap() &= (1u64 << r) - 1;
        }
    }

    /// `{i − s : i ∈ self, i ≥ s}` as raw words.
    fn shifted_down(&self, s: u64) -> impl Iterator<Item = u64> + '_ {
        let (q, r) = ((s / 64) as usize, (s % 64) as u32);
        (0..self.bits.len()).map(move |k| {
            let lo = self.bits.get(k + q).copied().unwrap_or(0);
            if r == 0 {
                lo
            } else {
                let hi = self.bits.get(k + q + 1).copied().unwrap_or(0);
                (lo >> r) | (hi << (64 - r))
            }
        })
    }

    /// Largest distance between consecutive elements of `{−1} ∪ self ∪ {horizon}`,
    /// with the member (or −1) it starts from. The empty set gives `horizon + 1`.
    pub fn max_gap_at(&self) -> (i64, u64) {
        let mut prev: i64 = -1;
        let mut best = (-1i64, 0u64);
        for m in self.members().chain(std::iter::once(self.horizon)) {
            let g = (m as i64 - prev) as u64;
            if g > best.1 {
                best = (prev, g);
            }
            prev = m as i64;
        }
        best
    }

    pub fn max_gap(&self) -> u64 {
        self.max_gap_at().1
    }

    /// Start and length of the longest block of consecutive members; `(0, 0)` when empty.
    pub fn max_run_at(&self) -> (u64, u64) {
        let mut best = (0, 0);
        let mut start = 0;
        let mut len = 0;
        let mut last: Option<u64> = None;
        for m in self.members() {
            if last.is_some_and(|l| l + 1 == m) {
                len += 1;
            } else {
                start = m;
                len = 1;
            }
            if len > best.1 {
                best = (start, len);
            }
            last = Some(m);
        }
        best
    }

    pub fn max_run(&self) -> u64 {
        self.max_run_at().1
    }
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}/{}", self.horizon)
    }
}

/// `Δ(A) = {k − j : j ≤ k, j, k ∈ A}` at the same horizon.
pub fn difference_set(a: &IndexSet) -> Result<IndexSet> {
    if !a.contains(0) {
        return Err(Error::precondition("difference sets are defined for sets containing 0"));
    }
    let mut bits = vec![0u64; a.bits.len()];
    for j in a.members() {
        for (w, s) in bits.iter_mut().zip(a.shifted_down(j)) {
            *w |= s;
        }
    }
    Ok(IndexSet { horizon: a.horizon, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(h: u64, m: &[u64]) -> IndexSet {
        IndexSet::new(h, m.iter().copied()).unwrap()
    }

    fn brute_delta(a: &IndexSet) -> Vec<u64> {
        let m: Vec<u64> = a.members().collect();
        let mut out: Vec<u64> = m.iter().flat_map(|&j| m.iter().filter(move |&&k| k >= j).map(move |&k| k - j)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference_set(&set(10, &[0, 2, 5])).unwrap(), set(10, &[0, 2, 3, 5]));
        assert_eq!(difference_set(&set(10, &[0])).unwrap(), set(10, &[0]));
        let full = IndexSet::full(10).unwrap();
        assert_eq!(difference_set(&full).unwrap(), full);
        assert!(difference_set(&set(10, &[1, 2])).is_err());
    }

    #[test]
    fn gaps_and_runs() {
        let a = set(10, &[0, 3, 6, 9]);
        assert_eq!((a.max_gap(), a.max_run()), (3, 1));
        let full = IndexSet::full(10).unwrap();
        assert_eq!((full.max_gap(), full.max_run()), (1, 10));
        let five = set(10, &[5]);
        assert_eq!((five.max_gap_at(), five.max_run()), ((-1, 6), 1));
        let e = IndexSet::empty(10).unwrap();
        assert_eq!((e.max_gap(), e.max_run()), (11, 0));
    }

    #[test]
    fn complement_and_json() {
        let a = set(70, &[0, 1, 65, 69]);
        let c = a.complement();
        assert_eq!(c.len(), 66);
        assert!(!c.contains(69) && c.contains(68));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"horizon":70,"members":[0,1,65,69]}"#);
        assert_eq!(serde_json::from_str::<IndexSet>(&json).unwrap(), a);
        assert!(serde_json::from_str::<IndexSet>(r#"{"horizon":5,"members":[7]}"#).is_err());
        assert!(serde_json::from_str::<IndexSet>(r#"{"horizon":5,"members":[2,1]}"#).is_err());
    }

    proptest! {
        #[test]
        fn delta_matches_brute_force(h in 1u64..300, raw in prop::collection::vec(0u64..300, 0..40)) {
            let a = IndexSet::new(h, raw.into_iter().map(|m| m % h).chain([0])).unwrap();
            let d = difference_set(&a).unwrap();
            prop_assert_eq!(d.members().collect::<Vec<_>>(), brute_delta(&a));
            prop_assert!(a.is_subset(&d) && d.contains(0));
        }

        #[test]
        fn run_gap_identity(h in 1u64..300, raw in prop::collection::vec(0u64..300, 0..300)) {
            let a = IndexSet::new(h, raw.into_iter().map(|m| m % h)).unwrap();
            prop_assert_eq!(a.max_run() + 1, a.complement().max_gap());
            prop_assert_eq!(a.complement().complement(), a);
        }
    }
}
