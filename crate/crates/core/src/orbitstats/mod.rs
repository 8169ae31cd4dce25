//! Partial densities along orbits, scrambled-tuple statistics, distality
//! and ω-limit diagnostics.

mod distal;
mod lockstep;
mod omega;
mod tuple;

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use distal::{distal_tuple_check, DistalReport};
pub use omega::{omega_limit_estimate, CellVisits, OmegaReport};
pub use tuple::{dc1_tuple_statistics, default_eps_grid, BProfile, StatsOptions, TupleVerdict, DEFAULT_PAIR_STEP_BUDGET};

use crate::arith::{ratio_serde, Distance, ExactInt};
use crate::error::{Error, Result};

/// Finite grid of window lengths `m` at which partial densities are read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub struct CheckpointSchedule {
    m_min: u64,
    growth: Option<Ratio<u64>>,
    checkpoints: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    m_min: u64,
    m_max: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth: Option<String>,
    checkpoints: Vec<u64>,
}

impl From<CheckpointSchedule> for ScheduleRepr {
    fn from(s: CheckpointSchedule) -> Self {
        ScheduleRepr {
            m_min: s.m_min,
            m_max: s.m_max(),
            growth: s.growth.as_ref().map(ratio_serde::to_text),
            checkpoints: s.checkpoints,
        }
    }
}

impl TryFrom<ScheduleRepr> for CheckpointSchedule {
    type Error = String;

    fn try_from(r: ScheduleRepr) -> Result<Self, String> {
        let s = match &r.growth {
            Some(g) => CheckpointSchedule::geometric(r.m_min, r.m_max, ratio_serde::from_text(g)?),
            None => CheckpointSchedule::explicit(r.checkpoints.clone(), r.m_min),
        }
        .map_err(|e| e.to_string())?;
        if s.checkpoints != r.checkpoints || s.m_max() != r.m_max {
            return Err("checkpoint list does not match the schedule parameters".into());
        }
        Ok(s)
    }
}

impl CheckpointSchedule {
    /// `m_min, ⌈m_min·g⌉, ⌈m_min·g²⌉, ...` rounded up step by step, then `m_max`.
    pub fn geometric(m_min: u64, m_max: u64, growth: Ratio<u64>) -> Result<Self> {
        if m_min < 1 || m_min > m_max {
            return Err(Error::precondition(format!("need 1 ≤ m_min ≤ m_max, got {m_min} and {m_max}")));
        }
        if growth <= Ratio::from_integer(1) {
            return Err(Error::precondition(format!("checkpoint growth {growth} must exceed 1")));
        }
        let (p, q) = (*growth.numer() as u128, *growth.denom() as u128);
        let mut checkpoints = vec![m_min];
        let mut m = m_min;
        loop {
            let next = ((m as u128 * p).div_ceil(q)).max(m as u128 + 1);
            if next >= m_max as u128 {
                break;
            }
            m = next as u64;
            checkpoints.push(m);
        }
        if m_max > m_min {
            checkpoints.push(m_max);
        }
        Ok(CheckpointSchedule { m_min, growth: Some(growth), checkpoints })
    }

    /// An explicit strictly increasing list; the estimates use entries `≥ m_min`.
    pub fn explicit(checkpoints: Vec<u64>, m_min: u64) -> Result<Self> {
        if checkpoints.is_empty() || checkpoints[0] == 0 {
            return Err(Error::precondition("checkpoints must be a nonempty list of positive lengths"));
        }
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition("checkpoints must be strictly increasing"));
        }
        if m_min < 1 || m_min > *checkpoints.last().unwrap() {
            return Err(Error::precondition(format!("m_min {m_min} outside 1..=m_max")));
        }
        Ok(CheckpointSchedule { m_min, growth: None, checkpoints })
    }

    pub fn m_min(&self) -> u64 {
        self.m_min
    }

    pub fn m_max(&self) -> u64 {
        *self.checkpoints.last().unwrap()
    }

    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }
}

impl Default for CheckpointSchedule {
    /// `m_min = 10^3`, growth `11/10`, `m_max = 10^5`.
    fn default() -> Self {
        Self::geometric(1000, 100_000, Ratio::new(11, 10)).unwrap()
    }
}

/// Exact partial densities `|{i < m : pred(i)}| / m` on a checkpoint grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub m_min: u64,
    pub checkpoints: Vec<u64>,
    pub counts: Vec<u64>,
    #[serde(with = "ratio_serde::vec")]
    pub densities: Vec<Ratio<u64>>,
    /// Largest density at a checkpoint `m ≥ m_min`.
    #[serde(with = "ratio_serde")]
    pub limsup_estimate: Ratio<u64>,
    #[serde(with = "ratio_serde")]
    pub liminf_estimate: Ratio<u64>,
}

impl DensityProfile {
    fn from_counts(schedule: &CheckpointSchedule, counts: Vec<u64>) -> Self {
        let checkpoints = schedule.checkpoints.clone();
        let densities: Vec<Ratio<u64>> = counts.iter().zip(&checkpoints).map(|(&c, &m)| Ratio::new(c, m)).collect();
        let tail = || densities.iter().zip(&checkpoints).filter(|(_, &m)| m >= schedule.m_min).map(|(d, _)| *d);
        let limsup_estimate = tail().max().unwrap();
        let liminf_estimate = tail().min().unwrap();
        DensityProfile { m_min: schedule.m_min, checkpoints, counts, densities, limsup_estimate, liminf_estimate }
    }

    /// `m,d_m` rows with a header, densities as decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,count,d_m\n");
        for ((m, c), d) in self.checkpoints.iter().zip(&self.counts).zip(&self.densities) {
            out.push_str(&format!("{m},{c},{:.9}\n", *d.numer() as f64 / *d.denom() as f64));
        }
        out
    }

    /// `limsup_estimate ≥ 1 − tol`.
    pub fn reaches(&self, tol: &Ratio<u64>) -> bool {
        self.limsup_estimate + tol >= Ratio::from_integer(1)
    }
}

/// Running single-pass counter feeding a `DensityProfile`.
pub(crate) struct ProfileBuilder<'a> {
    schedule: &'a CheckpointSchedule,
    next: usize,
    seen: u64,
    count: u64,
    counts: Vec<u64>,
}

impl<'a> ProfileBuilder<'a> {
    pub(crate) fn new(schedule: &'a CheckpointSchedule) -> Self {
        ProfileBuilder { schedule, next: 0, seen: 0, count: 0, counts: Vec::with_capacity(schedule.checkpoints.len()) }
    }

    /// Records the indicator value at the next index.
    pub(crate) fn push(&mut self, value: bool) {
        self.count += value as u64;
        self.seen += 1;
        if self.schedule.checkpoints.get(self.next) == Some(&self.seen) {
            self.counts.push(self.count);
            self.next += 1;
        }
    }

    pub(crate) fn finish(self) -> DensityProfile {
        assert_eq!(self.counts.len(), self.schedule.checkpoints.len(), "profile fed fewer than m_max values");
        DensityProfile::from_counts(self.schedule, self.counts)
    }
}

/// Partial densities of `indicator` at every checkpoint.
pub fn density_profile(mut indicator: impl FnMut(u64) -> bool, schedule: &CheckpointSchedule) -> DensityProfile {
    let mut b = ProfileBuilder::new(schedule);
    for i in 0..schedule.m_max() {
        b.push(indicator(i));
    }
    b.finish()
}

/// Separation thresholds derived from a distal set's minimal separation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct Deltas<T: ExactInt = BigInt> {
    pub delta: Distance<T>,
    pub eps: Distance<T>,
}

/// `δ = s/2`, `ε = s/4`.
pub fn derive_deltas<T: ExactInt>(min_separation: &Distance<T>) -> Result<Deltas<T>> {
    if min_separation.is_zero() {
        return Err(Error::precondition("minimal separation must be positive"));
    }
    Ok(Deltas { delta: min_separation.scale(1, 2), eps: min_separation.scale(1, 4) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometric_grid() {
        let s = CheckpointSchedule::geometric(10, 20, Ratio::new(3, 2)).unwrap();
        assert_eq!(s.checkpoints(), &[10, 15, 20]);
        let s = CheckpointSchedule::geometric(1, 5, Ratio::new(11, 10)).unwrap();
        assert_eq!(s.checkpoints(), &[1, 2, 3, 4, 5]);
        let s = CheckpointSchedule::default();
        assert_eq!(s.checkpoints()[..4], [1000, 1100, 1210, 1331]);
        assert_eq!(s.m_max(), 100_000);
        assert!(CheckpointSchedule::geometric(10, 5, Ratio::new(2, 1)).is_err());
        assert!(CheckpointSchedule::geometric(1, 5, Ratio::new(1, 1)).is_err());
        assert!(CheckpointSchedule::explicit(vec![10, 10], 1).is_err());
    }

    #[test]
    fn schedule_json_round_trip() {
        for s in [CheckpointSchedule::default(), CheckpointSchedule::explicit(vec![3, 7, 40], 5).unwrap()] {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<CheckpointSchedule>(&json).unwrap(), s);
        }
        assert!(serde_json::from_str::<CheckpointSchedule>(r#"{"m_min":1,"m_max":3,"checkpoints":[1,3,2]}"#).is_err());
    }

    #[test]
    fn initial_segment() {
        let s = CheckpointSchedule::explicit(vec![10, 100], 10).unwrap();
        let p = density_profile(|i| i < 10, &s);
        assert_eq!(p.densities, vec![Ratio::from_integer(1), Ratio::new(1, 10)]);
        assert_eq!(p.limsup_estimate, Ratio::from_integer(1));
        assert_eq!(p.liminf_estimate, Ratio::new(1, 10));
    }

    #[test]
    fn constant_and_even_indicators() {
        let s = CheckpointSchedule::explicit(vec![10, 100, 1000], 10).unwrap();
        assert!(density_profile(|_| true, &s).densities.iter().all(|d| *d == Ratio::from_integer(1)));
        let p = density_profile(|i| i % 2 == 0, &s);
        assert!(p.densities.iter().all(|d| *d == Ratio::new(1, 2)));
        assert_eq!((p.limsup_estimate, p.liminf_estimate), (Ratio::new(1, 2), Ratio::new(1, 2)));
        assert!(p.to_csv().starts_with("m,count,d_m\n10,5,0.5"));
    }

    #[test]
    fn deltas() {
        let d = derive_deltas::<BigInt>(&Distance::one()).unwrap();
        assert_eq!((d.delta, d.eps), (Distance::rational(1, 2), Distance::rational(1, 4)));
        let d = derive_deltas::<BigInt>(&Distance::rational(1, 3)).unwrap();
        assert_eq!((d.delta, d.eps), (Distance::rational(1, 6), Distance::rational(1, 12)));
        assert!(derive_deltas::<BigInt>(&Distance::Zero).is_err());
    }

    proptest! {
        #[test]
        fn counts_match_recount(seed in any::<u64>(), m_max in 1u64..5000, picks in prop::collection::vec(1u64..5000, 1..100)) {
            let pred = |i: u64| (i.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ seed) % 7 < 3;
            let mut cps: Vec<u64> = picks.into_iter().map(|m| m % m_max + 1).collect();
            cps.sort_unstable();
            cps.dedup();
            let s = CheckpointSchedule::explicit(cps.clone(), 1).unwrap();
            let p = density_profile(pred, &s);
            for ((m, c), d) in cps.iter().zip(&p.counts).zip(&p.densities) {
                prop_assert_eq!(*c, (0..*m).filter(|&i| pred(i)).count() as u64);
                prop_assert_eq!(*d * Ratio::from_integer(*m), Ratio::from_integer(*c));
                prop_assert!(*d <= Ratio::from_integer(1));
            }
            prop_assert!(p.limsup_estimate >= p.liminf_estimate);
        }

        #[test]
        fn deltas_stay_below_separation(p in 1i64..1000, q in 1i64..1000) {
            let s = Distance::<BigInt>::rational(p, q);
            let d = derive_deltas(&s).unwrap();
            let sum = &d.delta.to_quadratic() + &d.eps.to_quadratic();
            prop_assert!(sum < s.to_quadratic());
        }
    }
}
