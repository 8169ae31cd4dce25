use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::lockstep::Lockstep;
use crate::arith::{Distance, ExactInt};
use crate::error::{Error, Result};
use crate::systems::{Point, SystemSpec};

/// Smallest pairwise orbit distance seen over a horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct DistalReport<T: ExactInt = BigInt> {
    pub min_separation: Distance<T>,
    pub attained_at: u64,
    /// Steps actually examined.
    pub steps: u64,
    /// The minimum over the examined steps is the infimum over all time:
    /// every factor is an isometry, or the tuple state returned to an
    /// earlier state within the horizon.
    pub certified: bool,
    /// Some shift comparison ran into the comparison bound.
    pub truncated: bool,
}

/// Exact `min_{i < horizon} min_{j<k} d(f^i x_j, f^i x_k)`.
///
/// Stops early once the value is certified for all time.
pub fn distal_tuple_check<T: ExactInt>(spec: &SystemSpec<T>, tuple: &[Point<T>], horizon: u64) -> Result<DistalReport<T>> {
    if horizon == 0 {
        return Err(Error::precondition("horizon must be positive"));
    }
    let mut lock = Lockstep::new(spec, tuple)?;
    let isometric = lock.all_isometric();
    // Brent-style cycle detection: compare against a snapshot taken at powers of two.
    let mut snapshot: Option<Vec<Point<T>>> = None;
    let mut best: Option<(Distance<T>, u64)> = None;
    let mut truncated = false;
    let mut certified = false;
    let mut ds = Vec::new();
    let mut steps = 0;
    for i in 0..horizon {
        if !isometric {
            match lock.state_key() {
                Some(key) => {
                    if let Some(snap) = &snapshot {
                        if *snap == key {
                            certified = true;
                            break;
                        }
                    }
                    if (i + 1).is_power_of_two() || snapshot.is_none() {
                        snapshot = Some(key);
                    }
                }
                None => snapshot = None,
            }
        }
        truncated |= lock.distances(&mut ds)? > 0;
        steps = i + 1;
        let m = ds.iter().min().unwrap().clone();
        if best.as_ref().is_none_or(|(b, _)| m < *b) {
            best = Some((m, i));
        }
        if isometric {
            certified = true;
            break;
        }
        if i + 1 < horizon {
            lock.advance()?;
        }
    }
    let (min_separation, attained_at) = best.unwrap();
    Ok(DistalReport { min_separation, attained_at, steps, certified: certified && !truncated, truncated })
}
