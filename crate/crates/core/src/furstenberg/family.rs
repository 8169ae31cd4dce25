use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IndexSet;

/// A Furstenberg family with an optional finite parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// Sets containing `kN_0` for some `k ≥ 1`.
    #[serde(rename = "F_rr")]
    Frr { k: Option<u64> },
    /// Syndetic sets: every window of `k` consecutive integers meets the set.
    #[serde(rename = "F_s")]
    Fs { k: Option<u64> },
    /// Thick sets: arbitrarily long runs.
    #[serde(rename = "F_t")]
    Ft { length: Option<u64> },
}

impl std::str::FromStr for Family {
    type Err = String;

    /// `Frr`, `Frr:3`, `Fs`, `Fs:5`, `Ft`, `Ft:10` (an `F_` prefix is also accepted).
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.trim().parse::<u64>().map_err(|e| format!("family parameter {a:?}: {e}"))?)),
            None => (s, None),
        };
        if arg == Some(0) {
            return Err("family parameter must be at least 1".into());
        }
        match name.trim().to_ascii_lowercase().replace('_', "").as_str() {
            "frr" => Ok(Family::Frr { k: arg }),
            "fs" => Ok(Family::Fs { k: arg }),
            "ft" => Ok(Family::Ft { length: arg }),
            _ => Err(format!("unknown family {name:?}; expected Frr, Fs or Ft")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    In,
    Out,
    Unknown,
}

impl Status {
    /// Conjunction with UNKNOWN propagation: any OUT wins, then any UNKNOWN.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Out, _) | (_, Status::Out) => Status::Out,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::In,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::In => "IN",
            Status::Out => "OUT",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Every multiple of `k` below the horizon is a member.
    Period { k: u64 },
    /// No members in `(start, start + length)`; `start = −1` is the leading gap.
    Gap { start: i64, length: u64 },
    /// `[start, start + length)` is contained in the set.
    Run { start: u64, length: u64 },
    /// A required index that is not a member.
    Missing { index: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub semantics: String,
}

/// Finite-horizon membership of `a` in `family`.
pub fn family_test(a: &IndexSet, family: Family) -> FamilyVerdict {
    let h = a.horizon();
    let verdict = |status, witness, semantics: String| FamilyVerdict { status, witness, semantics };
    match family {
        Family::Frr { k } => {
            if !a.contains(0) {
                return verdict(
                    Status::Out,
                    Some(Witness::Missing { index: 0 }),
                    "0 is not a member, and every kN_0 contains 0".into(),
                );
            }
            let missing = |k: u64| (0..h).step_by(k as usize).find(|&i| !a.contains(i));
            match k {
                Some(k) => match missing(k) {
                    None => verdict(
                        Status::In,
                        Some(Witness::Period { k }),
                        format!("every multiple of {k} below {h} is a member; membership beyond the horizon is not checked"),
                    ),
                    Some(index) => verdict(
                        Status::Out,
                        Some(Witness::Missing { index }),
                        format!("the multiple {index} of {k} is not a member, so {k}N_0 is not contained in the set"),
                    ),
                },
                None => match (1..=(h / 2).max(1)).find(|&k| missing(k).is_none()) {
                    Some(k) => verdict(
                        Status::In,
                        Some(Witness::Period { k }),
                        format!("{k} is the least k whose multiples below {h} are all members; the horizon cannot see further"),
                    ),
                    None => verdict(
                        Status::Unknown,
                        None,
                        format!("no k ≤ {} has all its multiples below {h} in the set; larger k are not decidable at this horizon", h / 2),
                    ),
                },
            }
        }
        Family::Fs { k } => {
            let bound = k.unwrap_or_else(|| (h as f64).sqrt().floor().max(1.0) as u64);
            let (start, length) = a.max_gap_at();
            let witness = Some(Witness::Gap { start, length });
            if length <= bound {
                verdict(
                    Status::In,
                    witness,
                    format!("every window of {bound} consecutive indices in [0, {h}) meets the set; largest gap {length}"),
                )
            } else {
                verdict(
                    Status::Out,
                    witness,
                    format!("a gap of {length} > {bound} below {h} refutes the gap bound {bound}; other bounds are not refuted"),
                )
            }
        }
        Family::Ft { length } => {
            let (start, run) = a.max_run_at();
            let needed = length.unwrap_or(1);
            if run >= needed && run > 0 {
                verdict(
                    Status::In,
                    Some(Witness::Run { start, length: run }),
                    format!("evidence only: the set contains a run of length {run} below {h}; thickness needs arbitrarily long runs"),
                )
            } else {
                verdict(
                    Status::Unknown,
                    None,
                    format!("longest run below {h} is {run} < {needed}; longer runs may occur beyond the horizon"),
                )
            }
        }
    }
}

/// Gap bounds checked by `duality_check`.
pub const DUALITY_MAX_K: u64 = 16;
/// Random test sets drawn per gap bound.
pub const DUALITY_SAMPLES: usize = 32;

/// Convention used by `max_gap`/`max_run` and the duality statements.
pub const GAP_CONVENTION: &str = "max_gap counts the leading gap from -1 and the trailing gap to the horizon; \
max_run(A) = max_gap([0,H) minus A) - 1; A meets every B with max_gap(B) <= k iff max_run(A) >= k, \
and the complement of A is the extremal B";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityRow {
    pub k: u64,
    /// `max_run(A) < k`: the complement is a gap-`k` set missing `A`.
    pub complement_is_witness: bool,
    /// The complement (when it is the witness) was verified to miss `A`
    /// and have gaps at most `k`.
    pub witness_verified: bool,
    /// Random gap-`≤ k` sets that missed `A` although `max_run(A) ≥ k`.
    pub sampled_misses: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub horizon: u64,
    pub convention: String,
    pub max_run: u64,
    pub run_start: u64,
    pub complement_max_gap: u64,
    pub complement_gap_start: i64,
    pub identity_holds: bool,
    pub seed: u64,
    pub rows: Vec<DualityRow>,
    pub pass: bool,
}

/// Checks the syndetic/thick duality at the horizon.
///
/// For each gap bound `k ≤ 16`: if `max_run(A) < k` the complement of `A`
/// must be a set with gaps `≤ k` disjoint from `A`; otherwise every set with
/// gaps `≤ k` must meet `A`, which is sampled with a seeded generator.
pub fn duality_check(a: &IndexSet, seed: u64) -> DualityReport {
    let h = a.horizon();
    let (run_start, max_run) = a.max_run_at();
    let comp = a.complement();
    let (complement_gap_start, complement_max_gap) = comp.max_gap_at();
    let identity_holds = max_run + 1 == complement_max_gap;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for k in 1..=DUALITY_MAX_K.min(h) {
        if max_run < k {
            let verified = comp.max_gap() <= k && comp.members().all(|i| !a.contains(i));
            rows.push(DualityRow { k, complement_is_witness: true, witness_verified: verified, sampled_misses: 0 });
        } else {
            let mut misses = 0;
            for _ in 0..DUALITY_SAMPLES {
                if !random_gap_set(h, k, &mut rng).any(|i| a.contains(i)) {
                    misses += 1;
                }
            }
            rows.push(DualityRow { k, complement_is_witness: false, witness_verified: true, sampled_misses: misses });
        }
    }
    let pass = identity_holds && rows.iter().all(|r| r.witness_verified && r.sampled_misses == 0);
    DualityReport {
        horizon: h,
        convention: GAP_CONVENTION.into(),
        max_run,
        run_start,
        complement_max_gap,
        complement_gap_start,
        identity_holds,
        seed,
        rows,
        pass,
    }
}

/// Members of a random subset of `[0, h)` whose gaps (boundary included) are at most `k`.
fn random_gap_set(h: u64, k: u64, rng: &mut impl Rng) -> impl Iterator<Item = u64> + '_ {
    let mut next: i64 = -1;
    std::iter::from_fn(move || {
        next += rng.gen_range(1..=k) as i64;
        (next < h as i64).then_some(next as u64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(h: u64, m: impl IntoIterator<Item = u64>) -> IndexSet {
        IndexSet::new(h, m).unwrap()
    }

    #[test]
    fn family_examples() {
        let mult3 = set(100, (0..100).step_by(3));
        let v = family_test(&mult3, Family::Frr { k: None });
        assert_eq!((v.status, v.witness), (Status::In, Some(Witness::Period { k: 3 })));
        let v = family_test(&mult3, Family::Fs { k: Some(3) });
        assert_eq!((v.status, v.witness), (Status::In, Some(Witness::Gap { start: 0, length: 3 })));

        let block = set(100, 10..20);
        let v = family_test(&block, Family::Ft { length: None });
        assert_eq!((v.status, v.witness), (Status::In, Some(Witness::Run { start: 10, length: 10 })));
        let v = family_test(&block, Family::Fs { k: None });
        assert_eq!((v.status, v.witness), (Status::Out, Some(Witness::Gap { start: 19, length: 81 })));
        assert_eq!(family_test(&block, Family::Frr { k: None }).status, Status::Out);
        assert_eq!(family_test(&block, Family::Ft { length: Some(11) }).status, Status::Unknown);
    }

    #[test]
    fn frr_with_given_period() {
        let a = set(20, [0, 4, 8, 12, 16, 5]);
        assert_eq!(family_test(&a, Family::Frr { k: Some(4) }).status, Status::In);
        let v = family_test(&a, Family::Frr { k: Some(2) });
        assert_eq!((v.status, v.witness), (Status::Out, Some(Witness::Missing { index: 2 })));
        assert_eq!(family_test(&set(20, [0, 1]), Family::Frr { k: None }).status, Status::Unknown);
    }

    #[test]
    fn duality_examples() {
        let evens = set(100, (0..100).step_by(2));
        let r = duality_check(&evens, 7);
        assert_eq!((r.max_run, r.complement_max_gap), (1, 2));
        assert!(r.pass);

        let half = set(100, 0..50);
        let r = duality_check(&half, 7);
        assert_eq!((r.max_run, r.complement_max_gap, r.complement_gap_start), (50, 51, -1));
        assert!(r.pass);

        let empty = IndexSet::empty(100).unwrap();
        let r = duality_check(&empty, 7);
        assert_eq!((r.max_run, r.complement_max_gap), (0, 1));
        assert!(r.pass);
    }

    /// All subsets of `[0, h)` as bitmasks.
    fn all_sets(h: u64) -> impl Iterator<Item = IndexSet> {
        (0u64..1 << h).map(move |mask| IndexSet::from_predicate(h, |i| mask >> i & 1 == 1).unwrap())
    }

    #[test]
    fn duality_exhaustive_small_horizon() {
        // A misses some B with max_gap(B) ≤ k  ⟺  max_run(A) < k
        for h in 1..=9u64 {
            let sets: Vec<IndexSet> = all_sets(h).collect();
            for k in 1..=h {
                let tests: Vec<&IndexSet> = sets.iter().filter(|b| b.max_gap() <= k).collect();
                for a in &sets {
                    let misses_some = tests.iter().any(|b| b.members().all(|i| !a.contains(i)));
                    assert_eq!(misses_some, a.max_run() < k, "h={h} k={k} a={a:?}");
                }
            }
        }
    }

    #[test]
    fn random_gap_sets_respect_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..10 {
            for _ in 0..50 {
                let b = set(200, random_gap_set(200, k, &mut rng));
                assert!(b.max_gap() <= k);
            }
        }
    }

    #[test]
    fn parse_family() {
        assert_eq!("Frr".parse::<Family>().unwrap(), Family::Frr { k: None });
        assert_eq!("F_s:5".parse::<Family>().unwrap(), Family::Fs { k: Some(5) });
        assert_eq!("ft:10".parse::<Family>().unwrap(), Family::Ft { length: Some(10) });
        assert!("Fx".parse::<Family>().is_err());
        assert!("Fs:0".parse::<Family>().is_err());
        let json = serde_json::to_string(&Family::Frr { k: Some(3) }).unwrap();
        assert_eq!(json, r#"{"family":"F_rr","k":3}"#);
    }

    proptest! {
        #[test]
        fn frr_implies_gap_bound(h in 1u64..400, raw in prop::collection::vec(0u64..400, 0..200), k in 1u64..20) {
            let a = IndexSet::new(h, raw.into_iter().map(|m| m % h).chain((0..h).step_by(k as usize))).unwrap();
            let v = family_test(&a, Family::Frr { k: None });
            prop_assert_eq!(v.status, Status::In);
            if let Some(Witness::Period { k: w }) = v.witness {
                prop_assert!(w <= k && a.max_gap() <= w);
            } else {
                prop_assert!(false, "missing witness");
            }
        }

        #[test]
        fn duality_passes(h in 1u64..300, raw in prop::collection::vec(0u64..300, 0..300), seed in any::<u64>()) {
            let a = IndexSet::new(h, raw.into_iter().map(|m| m % h)).unwrap();
            prop_assert!(duality_check(&a, seed).pass);
        }
    }
}
