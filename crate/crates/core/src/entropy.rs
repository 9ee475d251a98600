//! Dyadic partition entropy of atomic measures.
//!
//! At resolution `n` the unit interval splits into `2^n` cells; a finite
//! atomic measure with denominator `B` and equal weights induces cell
//! probabilities by exact binning `cell = floor(num * 2^n / B)`. The
//! Shannon entropy `H_n` of that partition, read as the ratio
//! `H_n / (n ln 2)`, estimates the entropy dimension of the measure the
//! atoms approximate.
//!
//! The reading is only meaningful while cells stay coarse relative to the
//! atom grid — once `2^n` approaches `B` every atom sits alone and the
//! ratio drifts towards counting atoms instead of measure. The margin
//! guard `16 * 2^n <= B` keeps at least sixteen grid steps per cell and
//! turns the degenerate regime into an error instead of a wrong number.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::Error;
use crate::measure::AtomicMeasure;
use crate::Real;
use crate::Result;

/// One resolution row of the entropy profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRow<F> {
    /// Dyadic resolution `n` (cells of width `2^-n`).
    pub resolution: u32,
    /// Number of occupied cells.
    pub occupied: u64,
    /// Shannon entropy of the cell distribution, in nats.
    pub entropy: F,
    /// `entropy / (n ln 2)`: the dimension reading at this resolution.
    pub ratio: F,
}

/// Exact-binning entropy profile of an atomic measure over the given
/// dyadic resolutions.
pub fn entropy_estimate<F: Real>(
    measure: &AtomicMeasure,
    resolutions: &[u32],
) -> Result<Vec<EntropyRow<F>>> {
    if resolutions.is_empty() {
        return Err(Error::EmptyInput { what: "entropy resolutions" });
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        if n == 0 || n > 56 {
            return Err(Error::LevelTooDeep { requested: n as u64, cap: 56 });
        }
        // Margin guard: at least 16 grid steps per cell.
        if (BigUint::from(16u32) << n) > *measure.denominator() {
            return Err(Error::EntropyMarginViolation { level: n });
        }
        let mut cells: HashMap<u64, u64> = HashMap::new();
        for num in measure.numerators() {
            let cell = ((num << n) / measure.denominator())
                .to_u64()
                .expect("cell index below 2^56");
            *cells.entry(cell).or_insert(0) += 1;
        }
        let total = measure.count() as f64;
        let entropy: f64 = cells
            .values()
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum();
        rows.push(EntropyRow {
            resolution: n,
            occupied: cells.len() as u64,
            entropy: F::from_f64_lossy(entropy),
            ratio: F::from_f64_lossy(entropy / (n as f64 * std::f64::consts::LN_2)),
        });
    }
    Ok(rows)
}
