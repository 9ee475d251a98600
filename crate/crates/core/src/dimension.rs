//! Beurling dimension by window counting.
//!
//! For a countable `Lambda` the upper Beurling dimension is
//!
//! ```text
//! dim Lambda = limsup_(h -> inf)  ln sup_x #(Lambda cap [x, x + h]) / ln h .
//! ```
//!
//! On a finite, sorted snapshot the inner sup is attained with the window
//! anchored at a point — sliding the left edge right onto the next point
//! never loses a member — so [`window_counts`] maximizes an exact count
//! over point-anchored closed windows with one two-pointer sweep per
//! scale. Counts are exact big-integer comparisons; only the final
//! `ln count / ln h` ratio is floating point.
//!
//! A [`ScalePlan`] fixes the window lengths: dyadic halvings of the span,
//! the system's own scale ladder `B_k` (on which canonical-type counts hit
//! the closed formulas exactly — the count in any window of length `B_k`
//! is exactly `Q_k` because consecutive stride blocks sit `rho_(k+1) >=
//! 2 B_k` apart), or explicit scales. The headline estimate reads the
//! largest quarter of the scales, where the limsup lives.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::limits::MAX_OCTAVE_SCALES;
use crate::real::{big_ratio_to_f64, ln_big};
use crate::system::MoranSystem;
use crate::Real;
use crate::Result;

/// A validated, strictly increasing list of window lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalePlan {
    #[serde(serialize_with = "crate::real::serde_big::biguints_as_decimal")]
    scales: Vec<BigUint>,
}

impl ScalePlan {
    /// Halvings of the point-set span, largest [`MAX_OCTAVE_SCALES`] kept.
    pub fn dyadic(points: &[BigInt]) -> Result<Self> {
        validate_points(points)?;
        let span = (points.last().expect("nonempty") - points.first().expect("nonempty"))
            .to_biguint()
            .expect("sorted increasing span is positive");
        if span < BigUint::from(2u32) {
            return Err(Error::DegenerateScale { scale: span.to_string() });
        }
        let mut scales = Vec::new();
        let mut h = span;
        while h >= BigUint::from(2u32) && scales.len() < MAX_OCTAVE_SCALES {
            scales.push(h.clone());
            h >>= 1;
        }
        scales.reverse();
        Ok(Self { scales })
    }

    /// The system's own ladder `B_1 < B_2 < ... < B_(k_max)`.
    pub fn natural(system: &MoranSystem, k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::EmptyInput { what: "natural scale ladder" });
        }
        let mut scales = Vec::with_capacity(k_max as usize);
        let mut big_b = BigUint::one();
        for k in 1..=k_max {
            big_b *= BigUint::from(system.base(k));
            scales.push(big_b.clone());
        }
        Ok(Self { scales })
    }

    /// Explicit scales; must be strictly increasing, each at least 2.
    pub fn from_scales(scales: Vec<BigUint>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::EmptyInput { what: "scales" });
        }
        for (i, s) in scales.iter().enumerate() {
            if *s < BigUint::from(2u32) {
                return Err(Error::DegenerateScale { scale: s.to_string() });
            }
            if i > 0 && scales[i - 1] >= *s {
                return Err(Error::UnsortedScales { index: i });
            }
        }
        Ok(Self { scales })
    }

    pub fn scales(&self) -> &[BigUint] {
        &self.scales
    }

    /// Rejects plans whose windows dwarf the data: a scale more than twice
    /// the span counts the whole set and certifies nothing.
    pub fn check_against_span(&self, points: &[BigInt]) -> Result<()> {
        validate_points(points)?;
        let span = (points.last().expect("nonempty") - points.first().expect("nonempty"))
            .to_biguint()
            .expect("span is positive");
        let bound = &span * BigUint::from(2u32);
        for s in &self.scales {
            if *s > bound {
                return Err(Error::ScaleBeyondSpan {
                    scale: s.to_string(),
                    span: span.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn validate_points(points: &[BigInt]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "window counting",
            needed: 2,
            got: points.len(),
        });
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoints { value: w[0].to_string() });
        }
        if w[0] > w[1] {
            return Err(Error::UnsortedPoints { index: i + 1 });
        }
    }
    Ok(())
}

/// Max count over point-anchored closed windows `[p, p + h]`, per scale.
pub fn window_counts(points: &[BigInt], scales: &[BigUint]) -> Result<Vec<u64>> {
    validate_points(points)?;
    if scales.is_empty() {
        return Err(Error::EmptyInput { what: "scales" });
    }
    Ok(scales
        .par_iter()
        .map(|h| {
            let h = BigInt::from(h.clone());
            let mut best = 0u64;
            let mut j = 0usize;
            for i in 0..points.len() {
                if j < i {
                    j = i;
                }
                let edge = &points[i] + &h;
                while j < points.len() && points[j] <= edge {
                    j += 1;
                }
                best = best.max((j - i) as u64);
            }
            best
        })
        .collect())
}

/// One counting row: a scale, its best window count, the log-ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow<F> {
    #[serde(serialize_with = "crate::real::serde_big::biguint_as_decimal")]
    pub scale: BigUint,
    pub count: u64,
    /// `ln count / ln scale`.
    pub ratio: F,
}

/// Window-counting dimension estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate<F> {
    /// Max ratio over the largest quarter of the scales.
    pub headline: F,
    /// Least-squares slope of `ln count` against `ln scale`.
    pub slope: F,
    pub rows: Vec<WindowRow<F>>,
    /// Prefix maxima of the ratios in increasing-scale order.
    pub running_sup: Vec<F>,
}

/// Counts windows over the plan and reduces to headline and slope.
pub fn beurling_estimate<F: Real>(
    points: &[BigInt],
    plan: &ScalePlan,
) -> Result<DimensionEstimate<F>> {
    let counts = window_counts(points, plan.scales())?;
    let mut rows = Vec::with_capacity(counts.len());
    let mut running_sup = Vec::with_capacity(counts.len());
    let mut sup = F::zero();
    for (scale, &count) in plan.scales().iter().zip(&counts) {
        let ratio = if count <= 1 {
            F::zero()
        } else {
            F::from_f64_lossy((count as f64).ln() / ln_big(scale))
        };
        sup = sup.max(ratio);
        running_sup.push(sup);
        rows.push(WindowRow { scale: scale.clone(), count, ratio });
    }
    let quarter = rows.len().div_ceil(4);
    let headline = rows[rows.len() - quarter..]
        .iter()
        .map(|r| r.ratio)
        .fold(F::zero(), F::max);
    // Least squares on (ln h, ln count); a single scale degenerates to its
    // own ratio.
    let slope = if rows.len() < 2 {
        rows[0].ratio
    } else {
        let xs: Vec<f64> = plan.scales().iter().map(ln_big).collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        F::from_f64_lossy(sxy / sxx)
    };
    Ok(DimensionEstimate { headline, slope, rows, running_sup })
}

/// Lacunarity report for a point sequence in construction order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunarityReport<F> {
    /// The ratio bound `num/den` the sequence was tested against.
    pub ratio_num: u64,
    pub ratio_den: u64,
    /// Adjacent pairs checked.
    pub checked: u64,
    pub is_lacunary: bool,
    /// First position `n` with `|a_(n+1)| den < |a_n| num`, if any.
    pub first_failure: Option<u64>,
    /// Smallest adjacent magnitude ratio seen (ignoring zero terms).
    pub min_adjacent_ratio: F,
}

/// Exact check that `|a_(n+1)| >= (num/den) |a_n|` along the sequence.
///
/// Zero terms (the spectrum's own `lambda_0 = 0`) pass vacuously. The
/// comparison is integer cross-multiplication; only the reported minimum
/// ratio is floating point.
pub fn lacunary_check<F: Real>(
    points: &[BigInt],
    ratio_num: u64,
    ratio_den: u64,
) -> Result<LacunarityReport<F>> {
    assert!(ratio_den >= 1 && ratio_num >= ratio_den, "lacunarity ratio must be >= 1");
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "lacunarity check",
            needed: 2,
            got: points.len(),
        });
    }
    let mut first_failure = None;
    let mut min_ratio = f64::INFINITY;
    let mut checked = 0u64;
    for (n, w) in points.windows(2).enumerate() {
        let prev = w[0].magnitude();
        let next = w[1].magnitude();
        checked += 1;
        if prev.is_zero() {
            continue;
        }
        min_ratio = min_ratio.min(big_ratio_to_f64(next, prev));
        if next * ratio_den < prev * ratio_num && first_failure.is_none() {
            first_failure = Some(n as u64);
        }
    }
    Ok(LacunarityReport {
        ratio_num,
        ratio_den,
        checked,
        is_lacunary: first_failure.is_none(),
        first_failure,
        min_adjacent_ratio: F::from_f64_lossy(if min_ratio.is_finite() {
            min_ratio
        } else {
            f64::NAN
        }),
    })
}
