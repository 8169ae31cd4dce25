use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::lockstep::Lockstep;
use super::{CheckpointSchedule, DensityProfile, ProfileBuilder};
use crate::arith::{ratio_serde, Distance, ExactInt};
use crate::error::{Error, Result};
use crate::systems::{Point, SystemSpec};

/// Pair-steps (`pairs · m_max`) a single run may evaluate.
pub const DEFAULT_PAIR_STEP_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsOptions {
    /// Evidence needs every limsup estimate `≥ 1 − tol`.
    pub tol: Ratio<u64>,
    pub budget: u64,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions { tol: Ratio::new(1, 100), budget: DEFAULT_PAIR_STEP_BUDGET }
    }
}

/// Default proximality thresholds `2^-3, 2^-5, 2^-8`.
pub fn default_eps_grid<T: ExactInt>() -> Vec<Distance<T>> {
    vec![Distance::Pow2(3), Distance::Pow2(5), Distance::Pow2(8)]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct BProfile<T: ExactInt = BigInt> {
    pub eps: Distance<T>,
    pub profile: DensityProfile,
}

/// Densities of the separated set `A_δ` (min pairwise distance `> δ`) and the
/// proximal sets `B_ε` (max pairwise distance `< ε`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct TupleVerdict<T: ExactInt = BigInt> {
    pub n: usize,
    pub delta: Distance<T>,
    pub eps_grid: Vec<Distance<T>>,
    #[serde(with = "ratio_serde")]
    pub tol: Ratio<u64>,
    pub schedule: CheckpointSchedule,
    pub a_profile: DensityProfile,
    pub b_profiles: Vec<BProfile<T>>,
    pub dc1_evidence: bool,
    /// Pair-steps where a shift comparison ran into the comparison bound.
    pub truncated_pair_steps: u64,
    /// `d_m(A) + d_m(B_ε) ≤ 1` for `ε ≤ δ`, and `B_ε` counts monotone in `ε`.
    pub invariants_hold: bool,
}

impl<T: ExactInt> TupleVerdict<T> {
    /// The evidence flag recomputed from the stored profiles.
    pub fn evidence_from_profiles(&self) -> bool {
        self.a_profile.reaches(&self.tol) && self.b_profiles.iter().all(|b| b.profile.reaches(&self.tol))
    }
}

/// Runs the tuple's orbits in lockstep to `m_max` and records both density
/// conditions at every checkpoint.
pub fn dc1_tuple_statistics<T: ExactInt>(
    spec: &SystemSpec<T>,
    tuple: &[Point<T>],
    delta: &Distance<T>,
    eps_grid: &[Distance<T>],
    schedule: &CheckpointSchedule,
    options: &StatsOptions,
) -> Result<TupleVerdict<T>> {
    if delta.is_zero() {
        return Err(Error::precondition("δ must be positive"));
    }
    if eps_grid.is_empty() || eps_grid[eps_grid.len() - 1].is_zero() {
        return Err(Error::precondition("ε grid must be nonempty and positive"));
    }
    if eps_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::precondition("ε grid must be strictly decreasing"));
    }
    let mut lock = Lockstep::new(spec, tuple)?;
    let pairs = lock.pairs().len() as u64;
    let m_max = schedule.m_max();
    if pairs.saturating_mul(m_max) > options.budget {
        return Err(Error::Budget(format!(
            "{pairs} pairs over {m_max} steps exceeds {} distance evaluations; use a smaller m_max",
            options.budget
        )));
    }
    let mut a = ProfileBuilder::new(schedule);
    let mut bs: Vec<ProfileBuilder> = eps_grid.iter().map(|_| ProfileBuilder::new(schedule)).collect();
    let mut ds = Vec::with_capacity(pairs as usize);
    let mut truncated = 0;
    for i in 0..m_max {
        truncated += lock.distances(&mut ds)?;
        let min = ds.iter().min().unwrap();
        let max = ds.iter().max().unwrap();
        a.push(min > delta);
        for (b, eps) in bs.iter_mut().zip(eps_grid) {
            b.push(max < eps);
        }
        if i + 1 < m_max {
            lock.advance()?;
        }
    }
    let a_profile = a.finish();
    let b_profiles: Vec<BProfile<T>> =
        bs.into_iter().zip(eps_grid).map(|(b, eps)| BProfile { eps: eps.clone(), profile: b.finish() }).collect();

    let mut invariants_hold = true;
    for b in &b_profiles {
        if b.eps <= *delta {
            invariants_hold &= a_profile.counts.iter().zip(&b.profile.counts).zip(&a_profile.checkpoints).all(|((x, y), m)| x + y <= *m);
        }
    }
    for w in b_profiles.windows(2) {
        // eps decreasing along the grid, so counts must not increase
        invariants_hold &= w[0].profile.counts.iter().zip(&w[1].profile.counts).all(|(x, y)| x >= y);
    }

    let mut verdict = TupleVerdict {
        n: tuple.len(),
        delta: delta.clone(),
        eps_grid: eps_grid.to_vec(),
        tol: options.tol,
        schedule: schedule.clone(),
        a_profile,
        b_profiles,
        dc1_evidence: false,
        truncated_pair_steps: truncated,
        invariants_hold,
    };
    verdict.dc1_evidence = verdict.evidence_from_profiles();
    Ok(verdict)
}
