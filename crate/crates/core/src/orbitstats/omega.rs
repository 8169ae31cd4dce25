use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

use crate::arith::{ExactInt, QuadraticNumber};
use crate::error::{Error, Result};
use crate::systems::{OpenSetSpec, Point, SystemSpec};

/// Longest cycle the periodicity check looks for.
pub const MAX_DETECTED_PERIOD: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct CellVisits<T: ExactInt = BigInt> {
    /// Position in `basis(resolution)`.
    pub index: usize,
    pub cell: OpenSetSpec<T>,
    pub hits: u64,
}

/// Basis cells met by the late orbit segment `[burn_in, horizon)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: ExactInt")]
pub struct OmegaReport<T: ExactInt = BigInt> {
    pub horizon: u64,
    pub burn_in: u64,
    pub resolution: u32,
    pub total_cells: usize,
    pub cells: Vec<CellVisits<T>>,
    /// Least `p ≤ 64` with `f^(burn_in + p)(x) = f^burn_in(x)`.
    pub eventual_period: Option<u64>,
    /// The orbit ends on a periodic cycle, so its ω-limit meets the
    /// periodic points and the orbit is not distal-type.
    pub periodic_proximity: bool,
}

/// Cells of `basis(resolution)` visited after `burn_in`, with hit counts.
pub fn omega_limit_estimate<T: ExactInt>(
    spec: &SystemSpec<T>,
    x: &Point<T>,
    horizon: u64,
    burn_in: u64,
    resolution: u32,
) -> Result<OmegaReport<T>> {
    if burn_in.saturating_mul(2) > horizon || horizon == 0 {
        return Err(Error::precondition(format!("horizon {horizon} must be positive and at least twice the burn-in {burn_in}")));
    }
    spec.check_point(x)?;
    let basis = spec.basis(resolution)?;
    let mut hits = vec![0u64; basis.len()];
    let mut p = spec.iterate(x, burn_in)?;
    let late = p.clone();
    let mut eventual_period = None;
    for i in burn_in..horizon {
        let k = cell_index(spec, &basis, resolution, &p)?;
        hits[k] += 1;
        if i + 1 < horizon {
            p = spec.step(&p)?;
        }
        let t = i + 1 - burn_in;
        if eventual_period.is_none() && t <= MAX_DETECTED_PERIOD && i + 1 < horizon && p == late {
            eventual_period = Some(t);
        }
    }
    if eventual_period.is_none() {
        // short horizons: finish the periodicity check off the counted segment
        let mut q = late.clone();
        for t in 1..=MAX_DETECTED_PERIOD {
            q = spec.step(&q)?;
            if q == late {
                eventual_period = Some(t);
                break;
            }
        }
    }
    let cells = basis
        .into_iter()
        .zip(&hits)
        .enumerate()
        .filter(|(_, (_, &h))| h > 0)
        .map(|(index, (cell, &hits))| CellVisits { index, cell, hits })
        .collect();
    Ok(OmegaReport {
        horizon,
        burn_in,
        resolution,
        total_cells: hits.len(),
        cells,
        eventual_period,
        periodic_proximity: eventual_period.is_some(),
    })
}

/// Index of the basis cell containing `p`; basis cells are disjoint.
fn cell_index<T: ExactInt>(spec: &SystemSpec<T>, basis: &[OpenSetSpec<T>], resolution: u32, p: &Point<T>) -> Result<usize> {
    let n = 1u64 << resolution.min(16);
    let arc_of = |x: &QuadraticNumber<T>| -> usize {
        // arcs are [k/n − 1/(2n), k/n + 1/(2n))
        let shifted = x.mul_int(&T::from_u64(2 * n).unwrap()).add_int(&T::one());
        let k = shifted.floor().to_u64().unwrap() / 2;
        (k % n) as usize
    };
    match (spec.ambient(), p) {
        (SystemSpec::CircleRotation { .. }, Point::Circle { x }) if spec.finite_points()?.is_none() => {
            return Ok(arc_of(x));
        }
        (SystemSpec::TorusAutomorphism { .. }, Point::Torus { x, y }) if spec.finite_points()?.is_none() => {
            return Ok(arc_of(x) * n as usize + arc_of(y));
        }
        _ => {}
    }
    for (k, cell) in basis.iter().enumerate() {
        if cell.contains(p)? {
            return Ok(k);
        }
    }
    Err(Error::precondition(format!("{p} lies in no basis cell")))
}
