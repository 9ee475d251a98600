//! Validated Moran systems and their scale ladder.
//!
//! A system is a pair of sequence rules `(b_k, q_k)` passing, level by
//! level, the admissibility checks `q_k >= 2`, `q_k | b_k`, and
//! `r_k = b_k / q_k >= 2`, with all bases below a finite bound `M`. The
//! products
//!
//! ```text
//! B_k = b_1 ... b_k      Q_k = q_1 ... q_k      rho_k = r_k B_(k-1)
//! ```
//!
//! form the scale ladder: `B_k` is the resolution of level `k`, `Q_k` its
//! atom count, and `rho_k` the stride of the level-`k` digit inside the
//! canonical spectrum. The strides telescope below the resolution,
//!
//! ```text
//! sum_(i<=k) (q_i - 1) rho_i  <=  B_k - 1,
//! ```
//!
//! so digit sums in mixed strides never collide — the identity behind order
//! preservation of every tree-labelled spectrum.
//!
//! Prefix log-ratios `ln Q_k / ln B_k` carry the dimension theory: their
//! limsup is the upper entropy dimension of the measure and their liminf
//! the Hausdorff dimension of its support.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::limits::{DEFAULT_VALIDATION_DEPTH, DIMENSION_TOLERANCE};
use crate::real::{ln_big, LogRatio, Real};
use crate::seq::SequenceRule;
use crate::Result;

/// A validated base/digit-count pair with its uniform base bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoranSystem {
    base: SequenceRule,
    digits: SequenceRule,
    bound: u32,
    validated_depth: u64,
}

impl MoranSystem {
    /// Validates `(base, digits)` to `DEFAULT_VALIDATION_DEPTH` and one full
    /// structural period of each rule, whichever is deeper.
    pub fn new(base: SequenceRule, digits: SequenceRule) -> Result<Self> {
        Self::with_depth(base, digits, DEFAULT_VALIDATION_DEPTH)
    }

    /// Validates every level `k <= depth` (extended to cover both rules'
    /// structural depth, so periodic rules are certified for all `k`).
    pub fn with_depth(base: SequenceRule, digits: SequenceRule, depth: u64) -> Result<Self> {
        base.validate()?;
        digits.validate()?;
        let bound = base.sup();
        let depth = depth
            .max(base.structural_depth())
            .max(digits.structural_depth());
        for k in 1..=depth {
            let b = base.term(k);
            let q = digits.term(k);
            if q < 2 {
                return Err(Error::DigitCountTooSmall { k, q });
            }
            if b % q != 0 {
                return Err(Error::NonDividingDigitCount { k, q, b });
            }
            let r = b / q;
            if r < 2 {
                return Err(Error::RatioTooSmall { k, b, q, r });
            }
            if b > bound {
                return Err(Error::BaseAboveBound { k, b, bound });
            }
        }
        Ok(Self { base, digits, bound, validated_depth: depth })
    }

    /// Base `b_k`, 1-indexed.
    pub fn base(&self, k: u64) -> u32 {
        self.base.term(k)
    }

    /// Digit count `q_k`, 1-indexed.
    pub fn digit_count(&self, k: u64) -> u32 {
        self.digits.term(k)
    }

    /// Ratio `r_k = b_k / q_k`, 1-indexed.
    pub fn ratio(&self, k: u64) -> u32 {
        self.base.term(k) / self.digits.term(k)
    }

    /// The uniform bound `M = sup b_k`.
    pub fn base_bound(&self) -> u32 {
        self.bound
    }

    /// Depth to which admissibility was checked level by level.
    pub fn validated_depth(&self) -> u64 {
        self.validated_depth
    }

    /// The underlying base rule.
    pub fn base_rule(&self) -> &SequenceRule {
        &self.base
    }

    /// The underlying digit-count rule.
    pub fn digit_rule(&self) -> &SequenceRule {
        &self.digits
    }

    /// `(B_k, Q_k, rho_k)` at one level; `O(k)` products.
    pub fn ladder_at(&self, k: u64) -> LadderRung {
        self.ladder().nth(k as usize).expect("ladder is infinite")
    }

    /// Iterator over rungs `k = 0, 1, 2, ...` with `B_0 = Q_0 = 1`,
    /// `rho_0 = 0`; each step multiplies the running products once.
    pub fn ladder(&self) -> Ladder<'_> {
        Ladder {
            system: self,
            next_k: 0,
            big_b: BigUint::one(),
            big_q: BigUint::one(),
        }
    }

    /// Prefix log-ratio samples `ln Q_k / ln B_k` for `k = 1..=depth`.
    pub fn prefix_ratios<F: Real>(&self, depth: u64) -> Vec<RatioSample<F>> {
        let mut out = Vec::with_capacity(depth as usize);
        for rung in self.ladder().skip(1).take(depth as usize) {
            out.push(RatioSample {
                k: rung.k,
                ratio: F::from_f64_lossy(ln_big(&rung.big_q) / ln_big(&rung.big_b)),
            });
        }
        out
    }

    /// Upper entropy dimension: limsup of the prefix log-ratios.
    pub fn upper_entropy_dim<F: Real>(&self, depth: u64) -> DimensionReport<F> {
        self.prefix_ratio_report(depth, ExtremumMode::Limsup)
    }

    /// Hausdorff dimension of the support: liminf of the same ratios.
    pub fn hausdorff_support_dim<F: Real>(&self, depth: u64) -> DimensionReport<F> {
        self.prefix_ratio_report(depth, ExtremumMode::Liminf)
    }

    fn prefix_ratio_report<F: Real>(&self, depth: u64, mode: ExtremumMode) -> DimensionReport<F> {
        assert!(depth >= 4, "dimension reports need at least 4 levels");
        let samples = self.prefix_ratios::<F>(depth);
        let pick = |from: usize| -> F {
            let iter = samples[from..].iter().map(|s| s.ratio);
            match mode {
                ExtremumMode::Limsup => iter.fold(F::neg_infinity(), F::max),
                ExtremumMode::Liminf => iter.fold(F::infinity(), F::min),
            }
        };
        // The limit superior/inferior is the extremum of an ever-later tail;
        // compare the last-half and last-quarter reads for convergence.
        let value = pick(samples.len() / 2);
        let late = pick(samples.len() - samples.len() / 4);
        let tolerance = F::from_f64_lossy(DIMENSION_TOLERANCE);
        DimensionReport {
            value,
            mode,
            converged: (value - late).abs() <= tolerance,
            tolerance,
            exact: self.exact_prefix_ratio_limit(),
            samples,
        }
    }

    /// Closed-form limit of `ln Q_k / ln B_k` for eventually periodic rules:
    /// the log-ratio of the per-period products, independent of the prefix.
    pub fn exact_prefix_ratio_limit(&self) -> Option<LogRatio> {
        let (pb, base_period) = self.base.eventually_periodic()?;
        let (pq, digit_period) = self.digits.eventually_periodic()?;
        let start = pb.max(pq);
        let len = lcm_usize(base_period.len(), digit_period.len()) as u64;
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for k in start + 1..=start + len {
            num *= BigUint::from(self.digits.term(k));
            den *= BigUint::from(self.base.term(k));
        }
        Some(LogRatio::new(num, den))
    }
}

fn lcm_usize(a: usize, b: usize) -> usize {
    num_integer::lcm(a, b)
}

/// One rung of the scale ladder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderRung {
    pub k: u64,
    /// `B_k = b_1 ... b_k`.
    pub big_b: BigUint,
    /// `Q_k = q_1 ... q_k`.
    pub big_q: BigUint,
    /// `rho_k = r_k B_(k-1)`; zero at `k = 0`.
    pub rho: BigUint,
}

/// Iterator form of the scale ladder.
pub struct Ladder<'a> {
    system: &'a MoranSystem,
    next_k: u64,
    big_b: BigUint,
    big_q: BigUint,
}

impl Iterator for Ladder<'_> {
    type Item = LadderRung;

    fn next(&mut self) -> Option<LadderRung> {
        let k = self.next_k;
        self.next_k += 1;
        if k == 0 {
            return Some(LadderRung {
                k,
                big_b: BigUint::one(),
                big_q: BigUint::one(),
                rho: BigUint::zero(),
            });
        }
        // rho_k = r_k B_(k-1) uses the previous B before it is advanced.
        let rho = &self.big_b * BigUint::from(self.system.ratio(k));
        self.big_b *= BigUint::from(self.system.base(k));
        self.big_q *= BigUint::from(self.system.digit_count(k));
        Some(LadderRung {
            k,
            big_b: self.big_b.clone(),
            big_q: self.big_q.clone(),
            rho,
        })
    }
}

/// Which tail extremum a dimension report takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumMode {
    Limsup,
    Liminf,
}

/// One prefix log-ratio sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample<F> {
    pub k: u64,
    pub ratio: F,
}

/// Tail-extremum report over prefix log-ratios.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport<F> {
    /// Extremum of the second half of the samples.
    pub value: F,
    pub mode: ExtremumMode,
    /// Whether the last-quarter extremum agrees with `value` within
    /// `tolerance`; block programs with growing oscillation stay `false`.
    pub converged: bool,
    pub tolerance: F,
    /// Closed-form limit when both rules are eventually periodic.
    pub exact: Option<LogRatio>,
    pub samples: Vec<RatioSample<F>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{Block, BlockLen};

    fn sys(b: u32, q: u32) -> MoranSystem {
        MoranSystem::new(SequenceRule::constant(b), SequenceRule::constant(q)).unwrap()
    }

    #[test]
    fn admissibility_is_enforced() {
        assert!(matches!(
            MoranSystem::new(SequenceRule::constant(4), SequenceRule::constant(1)),
            Err(Error::DigitCountTooSmall { k: 1, q: 1 })
        ));
        assert!(matches!(
            MoranSystem::new(SequenceRule::constant(9), SequenceRule::constant(2)),
            Err(Error::NonDividingDigitCount { k: 1, q: 2, b: 9 })
        ));
        // b = q forces r = 1.
        assert!(matches!(
            MoranSystem::new(SequenceRule::constant(2), SequenceRule::constant(2)),
            Err(Error::RatioTooSmall { k: 1, .. })
        ));
        // The checks force b_k >= 4 for every admissible system.
        assert!(matches!(
            MoranSystem::new(SequenceRule::constant(3), SequenceRule::constant(3)),
            Err(Error::RatioTooSmall { .. })
        ));
        assert!(sys(4, 2).base_bound() == 4);
    }

    #[test]
    fn periodic_rules_are_validated_over_a_full_period() {
        // Depth 2 would miss the bad third term without structural extension.
        let base = SequenceRule::Periodic { values: vec![4, 4, 6] };
        let digits = SequenceRule::Periodic { values: vec![2, 2, 4] };
        let err = MoranSystem::with_depth(base, digits, 2);
        assert!(matches!(err, Err(Error::NonDividingDigitCount { k: 3, q: 4, b: 6 })));
    }

    #[test]
    fn scale_ladder_matches_hand_products() {
        // (b, q) = (4, 2): B_3 = 64, Q_3 = 8, rho_3 = 2 * 16 = 32.
        let s = sys(4, 2);
        let rung = s.ladder_at(3);
        assert_eq!(rung.big_b, BigUint::from(64u32));
        assert_eq!(rung.big_q, BigUint::from(8u32));
        assert_eq!(rung.rho, BigUint::from(32u32));
        // Stride telescoping: sum (q_i - 1) rho_i = 2 + 8 + 32 = 42 <= 63.
        let strides: BigUint = s
            .ladder()
            .skip(1)
            .take(3)
            .map(|r| r.rho * BigUint::from(s.digit_count(r.k) - 1))
            .sum();
        assert_eq!(strides, BigUint::from(42u32));
    }

    #[test]
    fn constant_system_dimensions_are_exact() {
        let s = sys(4, 2);
        let up = s.upper_entropy_dim::<f64>(64);
        let low = s.hausdorff_support_dim::<f64>(64);
        assert!((up.value - 0.5).abs() < 1e-12);
        assert!((low.value - 0.5).abs() < 1e-12);
        assert!(up.converged && low.converged);
        let exact = up.exact.unwrap();
        assert!((exact.value::<f64>() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixed_periodic_system_hits_log_ratio_of_period_products() {
        // b = (4, 6, 4, 6, ...), q = (2, 3, 2, 3, ...):
        // limit = ln 6 / ln 24 = 0.5637914...
        let s = MoranSystem::new(
            SequenceRule::Periodic { values: vec![4, 6] },
            SequenceRule::Periodic { values: vec![2, 3] },
        )
        .unwrap();
        let expect = 6f64.ln() / 24f64.ln();
        assert!((expect - 0.563_791_4).abs() < 1e-6);
        let up = s.upper_entropy_dim::<f64>(64);
        let exact = up.exact.clone().unwrap();
        assert_eq!(exact.num, BigUint::from(6u32));
        assert_eq!(exact.den, BigUint::from(24u32));
        // Even-length prefixes hit the limit exactly; the report's tail
        // extremum sits within one term's wobble of it.
        assert!((up.value - expect).abs() < 2e-2);
        assert!(up.value >= expect - 1e-12);
    }

    #[test]
    fn doubling_blocks_separate_limsup_from_liminf() {
        // Alternate lean levels (q = 2 of b = 64, per-level ratio 1/6) with
        // rich levels (q = 32, ratio 5/6) in doubling blocks: each block is
        // as long as the whole past, so the prefix ratio oscillates forever
        // between (2/6 + 5/6)/3 = 7/18 after lean runs and 1/2 after rich
        // runs.
        let base = SequenceRule::constant(64);
        let digits = SequenceRule::Blocks {
            blocks: vec![
                Block { value: 2, len: BlockLen::Doubling(1) },
                Block { value: 32, len: BlockLen::Doubling(1) },
            ],
        };
        let s = MoranSystem::with_depth(base, digits, 64).unwrap();
        let up = s.upper_entropy_dim::<f64>(512);
        let low = s.hausdorff_support_dim::<f64>(512);
        assert!(up.exact.is_none());
        // Depth 512 ends exactly at a rich-run boundary (level 510), so the
        // limsup read is exact and the liminf read sits near 7/18.
        assert!((up.value - 0.5).abs() < 1e-12, "limsup read {}", up.value);
        assert!((low.value - 7.0 / 18.0).abs() < 0.01, "liminf read {}", low.value);
        assert!(up.value > low.value + 0.1);
    }

    #[test]
    fn dimension_sandwich_for_samples() {
        for (b, q) in [(4u32, 2u32), (8, 2), (8, 4), (16, 2), (36, 6)] {
            let s = sys(b, q);
            let up = s.upper_entropy_dim::<f64>(64);
            let low = s.hausdorff_support_dim::<f64>(64);
            let expect = (q as f64).ln() / (b as f64).ln();
            assert!((up.value - expect).abs() < 1e-12);
            assert!(low.value <= up.value + 1e-15);
            assert!(up.value < 1.0);
        }
    }
}
