//! Finite-level atomic measures and support bounds.
//!
//! Truncating the infinite convolution after `n` levels leaves the uniform
//! atomic measure
//!
//! ```text
//! mu_n = (1 / Q_n) sum { delta_(a / B_n) :  a = sum_(k<=n) d_k B_n / B_k,  d_k < q_k },
//! ```
//!
//! whose `Q_n` atoms live on the grid `B_n^(-1) Z` inside `[0, 1)`. The
//! numerators are generated exactly and arrive pre-sorted because appending
//! a level maps `a` to `a b_k + d_k` monotonically.
//!
//! The *scaled tail support* after level `k` is `S_k = sum_(j>k) (q_j - 1)
//! / (b_(k+1) ... b_j)`; admissibility (`r_j >= 2`, so `q_j <= b_j / 2` and
//! `b_j >= 4`) keeps every `S_k` strictly below 1, which is what separates
//! digit contributions across levels. [`scaled_support_max`] evaluates a
//! prefix of the sum exactly and certifies the remainder with two
//! closed-form tail majorants.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::limits::MAX_LEVEL_POINTS;
use crate::system::MoranSystem;
use crate::Result;

/// A uniform atomic measure on `numerators / denominator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomicMeasure {
    level: u64,
    #[serde(serialize_with = "crate::real::serde_big::biguint_as_decimal")]
    denominator: BigUint,
    #[serde(serialize_with = "crate::real::serde_big::biguints_as_decimal")]
    numerators: Vec<BigUint>,
}

impl AtomicMeasure {
    /// Wraps raw parts; numerators must be sorted, distinct, and below the
    /// denominator.
    pub fn from_parts(level: u64, denominator: BigUint, numerators: Vec<BigUint>) -> Result<Self> {
        if numerators.is_empty() {
            return Err(Error::EmptyInput { what: "atomic measure" });
        }
        for (i, w) in numerators.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::UnsortedPoints { index: i + 1 });
            }
        }
        if numerators.last().expect("nonempty") >= &denominator {
            return Err(Error::DegenerateScale { scale: denominator.to_string() });
        }
        Ok(Self { level, denominator, numerators })
    }

    /// Truncation level `n`.
    pub fn level(&self) -> u64 {
        self.level
    }

    /// The common denominator `B_n`.
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Sorted atom numerators.
    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    /// Number of atoms `Q_n`.
    pub fn count(&self) -> usize {
        self.numerators.len()
    }

    /// Uniform atom weight `1 / Q_n`.
    pub fn weight(&self) -> BigRational {
        BigRational::new(1.into(), BigUint::from(self.numerators.len()).into())
    }

    /// Largest atom position as an exact rational in `[0, 1)`.
    pub fn max_atom(&self) -> BigRational {
        BigRational::new(
            self.numerators.last().expect("nonempty").clone().into(),
            self.denominator.clone().into(),
        )
    }
}

/// The level-`n` truncation of the system's measure.
///
/// `max_level` guards the call; the atom count is additionally capped by
/// [`MAX_LEVEL_POINTS`] before anything is materialized.
pub fn level_measure(system: &MoranSystem, n: u64, max_level: u64) -> Result<AtomicMeasure> {
    if n > max_level {
        return Err(Error::LevelTooDeep { requested: n, cap: max_level });
    }
    let mut count = BigUint::one();
    for k in 1..=n {
        count *= BigUint::from(system.digit_count(k));
    }
    if count > BigUint::from(MAX_LEVEL_POINTS) {
        return Err(Error::TooManyPoints {
            what: "level measure atoms",
            got: count.to_string(),
            cap: MAX_LEVEL_POINTS,
        });
    }
    let mut numerators = vec![BigUint::zero()];
    let mut denominator = BigUint::one();
    for k in 1..=n {
        let b = BigUint::from(system.base(k));
        let q = system.digit_count(k);
        denominator *= &b;
        let mut next = Vec::with_capacity(numerators.len() * q as usize);
        // a -> a b_k + d keeps lexicographic generation sorted because
        // d < q <= b - 1 never bridges consecutive a blocks.
        for a in &numerators {
            let base = a * &b;
            for d in 0..q {
                next.push(&base + BigUint::from(d));
            }
        }
        numerators = next;
    }
    AtomicMeasure::from_parts(n, denominator, numerators)
}

/// Exact prefix and certified tail of the scaled support supremum `S_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportBound {
    /// Levels summed exactly.
    pub terms: u64,
    /// `sum_(j=1..terms) (q_(k+j) - 1) / (b_(k+1) ... b_(k+j))`, exact.
    #[serde(serialize_with = "crate::real::serde_big::ratio_as_decimal")]
    pub partial: BigRational,
    /// Certified majorant of the omitted tail.
    #[serde(serialize_with = "crate::real::serde_big::ratio_as_decimal")]
    pub tail_bound: BigRational,
    /// `partial + tail_bound`.
    #[serde(serialize_with = "crate::real::serde_big::ratio_as_decimal")]
    pub upper: BigRational,
    /// Whether the certified upper bound stays below 1 (it must, for every
    /// admissible system).
    pub strictly_below_one: bool,
}

/// Bounds `S_k`, the scaled support supremum of the tail beyond level `k`,
/// summing `terms >= 1` levels exactly.
///
/// Two tail majorants are intersected: a geometric envelope
/// `(2/3) / (b_(k+1) ... b_(k+terms))` valid for every admissible system,
/// and a ratio envelope `last_term * r / (1 - r)` with
/// `r = (ceil(M/2) - 1) / 4`, sharper when bases stay small.
pub fn scaled_support_max(system: &MoranSystem, k: u64, terms: u64) -> SupportBound {
    assert!(terms >= 1, "at least one exact term is required");
    let mut partial = BigRational::zero();
    let mut prod = BigUint::one(); // b_(k+1) ... b_(k+j)
    let mut last_term = BigRational::zero();
    for j in 1..=terms {
        let level = k + j;
        prod *= BigUint::from(system.base(level));
        last_term = BigRational::new(
            BigUint::from(system.digit_count(level) - 1).into(),
            prod.clone().into(),
        );
        partial += &last_term;
    }
    let geometric = BigRational::new(2.into(), (BigUint::from(3u32) * &prod).into());
    let m = system.base_bound();
    let r_num = (m as u64).div_ceil(2).saturating_sub(1);
    let tail_bound = if r_num >= 4 {
        geometric
    } else {
        // last_term * (r / (1 - r)) with r = r_num / 4.
        let ratio_envelope = &last_term
            * BigRational::new(BigUint::from(r_num).into(), BigUint::from(4 - r_num).into());
        geometric.min(ratio_envelope)
    };
    let upper = &partial + &tail_bound;
    SupportBound {
        terms,
        strictly_below_one: upper < BigRational::one(),
        partial,
        tail_bound,
        upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::SequenceRule;

    fn sys(b: u32, q: u32) -> MoranSystem {
        MoranSystem::new(SequenceRule::constant(b), SequenceRule::constant(q)).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn level_two_atoms_match_hand_values() {
        // (4, 2) level 2: numerators {0, 1, 4, 5} over 16,
        // i.e. digit sums d_1/4 + d_2/16.
        let m = level_measure(&sys(4, 2), 2, 12).unwrap();
        let nums: Vec<u32> = m.numerators().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(nums, [0, 1, 4, 5]);
        assert_eq!(m.denominator(), &BigUint::from(16u32));
        assert_eq!(m.weight(), rat(1, 4));
        assert_eq!(m.max_atom(), rat(5, 16));
    }

    #[test]
    fn atoms_stay_sorted_and_distinct_at_depth() {
        let m = level_measure(&sys(4, 2), 10, 12).unwrap();
        assert_eq!(m.count(), 1 << 10);
        assert!(m.numerators().windows(2).all(|w| w[0] < w[1]));
        assert!(m.max_atom() < BigRational::one());
    }

    #[test]
    fn level_cap_and_cardinality_guard() {
        assert!(matches!(
            level_measure(&sys(4, 2), 13, 12),
            Err(Error::LevelTooDeep { requested: 13, cap: 12 })
        ));
        let rich = MoranSystem::new(SequenceRule::constant(36), SequenceRule::constant(18))
            .unwrap();
        assert!(matches!(
            level_measure(&rich, 12, 12),
            Err(Error::TooManyPoints { .. })
        ));
    }

    #[test]
    fn support_bound_matches_exact_geometric_sum() {
        // (4, 2): S_k = sum 1/4^j = 1/3 for every k. One exact term leaves
        // tail exactly 1/12, and the ratio envelope is sharp there.
        let bound = scaled_support_max(&sys(4, 2), 0, 1);
        assert_eq!(bound.partial, rat(1, 4));
        assert_eq!(bound.tail_bound, rat(1, 12));
        assert_eq!(bound.upper, rat(1, 3));
        assert!(bound.strictly_below_one);
        // More exact terms keep the same certified envelope.
        let deeper = scaled_support_max(&sys(4, 2), 0, 8);
        assert!(deeper.upper <= rat(1, 3));
        assert!(deeper.partial < rat(1, 3));
    }

    #[test]
    fn support_bound_is_sub_unit_for_rich_systems() {
        // q = b/2 maximizes digit mass; the bound must still certify < 1.
        for (b, q) in [(4u32, 2u32), (8, 4), (16, 8), (36, 18)] {
            let bound = scaled_support_max(&sys(b, q), 3, 6);
            assert!(bound.strictly_below_one, "({b}, {q}): {:?}", bound.upper);
        }
    }
}
