use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::family::Status;
use crate::arith::ExactInt;
use crate::error::{Error, Result};
use crate::systems::{hit_at, OpenSetSpec, SystemSpec};

/// Most `(k, U, V)` combinations one report may examine.
pub const MAX_TRANSITIVITY_PAIRS: u64 = 1 << 16;
/// Most hitting tests (`pairs · horizon`) one report may run.
pub const TRANSITIVITY_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", bound = "T: ExactInt")]
pub enum TransitivityMode<T: ExactInt = BigInt> {
    Plain,
    /// `f^k` for every `k ≤ k_max`.
    Total { k_max: u64 },
    /// `f × f`.
    WeakMixing,
    /// `f|Λ × f` on `Λ × X`.
    ProductWith { lambda: SystemSpec<T> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityEntry {
    pub k: u64,
    /// Index into `cells`.
    pub u: usize,
    pub v: usize,
    pub status: Status,
    /// Least `i` below the horizon with `f^(k·i)(U) ∩ V ≠ ∅`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_hit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivitySummary {
    pub pairs: u64,
    pub in_count: u64,
    pub unknown_count: u64,
    pub min_first_hit: Option<u64>,
    pub max_first_hit: Option<u64>,
    pub all_in: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct TransitivityReport<T: ExactInt = BigInt> {
    /// The system whose basis pairs were tested.
    pub system: SystemSpec<T>,
    pub mode: TransitivityMode<T>,
    pub resolution: u32,
    pub horizon: u64,
    pub cells: Vec<OpenSetSpec<T>>,
    pub entries: Vec<TransitivityEntry>,
    pub summary: TransitivitySummary,
    pub semantics: String,
}

/// First hitting index for every pair of basis cells.
pub fn transitivity_report<T: ExactInt>(
    spec: &SystemSpec<T>,
    resolution: u32,
    horizon: u64,
    mode: TransitivityMode<T>,
) -> Result<TransitivityReport<T>> {
    if horizon == 0 {
        return Err(Error::precondition("horizon must be positive"));
    }
    let (system, k_max) = match &mode {
        TransitivityMode::Plain => (spec.clone(), 1),
        TransitivityMode::Total { k_max } => {
            if *k_max == 0 {
                return Err(Error::precondition("k_max must be at least 1"));
            }
            (spec.clone(), *k_max)
        }
        TransitivityMode::WeakMixing => (SystemSpec::product(vec![spec.clone(), spec.clone()]), 1),
        TransitivityMode::ProductWith { lambda } => (SystemSpec::product(vec![lambda.clone(), spec.clone()]), 1),
    };
    system.validate()?;
    let cells = system.basis(resolution)?;
    let n = cells.len() as u64;
    let pairs = n * n * k_max;
    if pairs > MAX_TRANSITIVITY_PAIRS {
        return Err(Error::Budget(format!(
            "{pairs} basis pairs exceed the cap {MAX_TRANSITIVITY_PAIRS}; lower the resolution or k_max"
        )));
    }
    if pairs.saturating_mul(horizon) > TRANSITIVITY_BUDGET {
        return Err(Error::Budget(format!(
            "{pairs} pairs over horizon {horizon} exceed {TRANSITIVITY_BUDGET} hitting tests; lower the horizon"
        )));
    }
    let mut entries = Vec::with_capacity(pairs as usize);
    for k in 1..=k_max {
        for (a, u) in cells.iter().enumerate() {
            for (b, v) in cells.iter().enumerate() {
                let mut first_hit = None;
                for i in 0..horizon {
                    let step = i.checked_mul(k).ok_or_else(|| Error::Budget("iterate index overflows".into()))?;
                    if hit_at(&system, u, v, step)?.hit {
                        first_hit = Some(i);
                        break;
                    }
                }
                let status = if first_hit.is_some() { Status::In } else { Status::Unknown };
                entries.push(TransitivityEntry { k, u: a, v: b, status, first_hit });
            }
        }
    }
    let hits: Vec<u64> = entries.iter().filter_map(|e| e.first_hit).collect();
    let summary = TransitivitySummary {
        pairs,
        in_count: hits.len() as u64,
        unknown_count: pairs - hits.len() as u64,
        min_first_hit: hits.iter().min().copied(),
        max_first_hit: hits.iter().max().copied(),
        all_in: hits.len() as u64 == pairs,
    };
    Ok(TransitivityReport {
        system,
        mode,
        resolution,
        horizon,
        cells,
        entries,
        summary,
        semantics: "IN: f^(k*i)(U) meets V at the listed first index; UNKNOWN: no hit below the horizon, \
            which is consistent with failure of transitivity at this resolution but does not refute it. \
            OUT is never reported, and the pairs are not aggregated into a family membership claim"
            .into(),
    })
}
