//! Digit-count thinning toward a prescribed dimension.
//!
//! To build a spectrum of Beurling dimension exactly `t` strictly between 0
//! and the upper entropy dimension, thin the digit counts: replace `q_m` by
//! `q'_m in {1, q_m}` so the thinned prefix ratios `ln(q'_1 .. q'_m) /
//! ln(b_1 .. b_m)` approach `t` from below with controlled overshoots.
//!
//! The rule is a greedy keep-run: `q'_1 = 1`, and from `m = 2` on, keep
//! `q_m` whenever the resulting prefix ratio stays at or below `t`. When a
//! keep-run's next candidate would cross `t`, the run's last position is
//! recorded as a *checkpoint* `k_j`, the crossing digit is kept anyway (the
//! single overshoot that pins the limsup from above), and ones follow until
//! a keep fits again. Checkpoints satisfy the exact two-sided inequality
//!
//! ```text
//! ln(q'_1 .. q'_(k_j)) / ln(b_1 .. b_(k_j))  <=  t  <  ln(q'_1 .. q'_(k_j + 1)) / ln(b_1 .. b_(k_j + 1))
//! ```
//!
//! verified with integer power comparisons, never floats: for `t = a/c` in
//! lowest terms, `ln N / ln B <= a/c` iff `N^c <= B^a`.
//!
//! The *thinning set* `Gamma` holds the indices whose digit words live
//! entirely inside the thinned counts (`sigma_j < q'_j` at every position).
//! Splitting a spectrum's indices along `Gamma` splits the spectrum into a
//! regular part of dimension `t` and a sparse lacunary remainder.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::Error;
use crate::limits::THINNING_DENOMINATOR_CAP;
use crate::real::{ln_big, Real};
use crate::system::{MoranSystem, RatioSample};
use crate::word::encode_index;
use crate::Result;

/// An index thinning set, decided by digit words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GammaSet {
    /// The empty set: every index is outside.
    Empty,
    /// Indices whose word satisfies `sigma_j < qprime[j - 1]` everywhere.
    /// Positions with `qprime = 1` force the digit to zero.
    Thinned { qprime: Vec<u32> },
}

impl GammaSet {
    /// Membership of index `n >= 1`.
    ///
    /// Errs when the word of `n` is deeper than the thinned data.
    pub fn contains_index(&self, system: &MoranSystem, n: u64) -> Result<bool> {
        assert!(n >= 1, "thinning sets contain positive indices only");
        match self {
            GammaSet::Empty => Ok(false),
            GammaSet::Thinned { qprime } => {
                let digits = encode_index(system, n);
                if digits.len() > qprime.len() {
                    return Err(Error::ThinningTooShallow {
                        depth: qprime.len() as u64,
                        needed: digits.len() as u64,
                    });
                }
                Ok(digits.iter().zip(qprime).all(|(&d, &qp)| d < qp))
            }
        }
    }
}

/// Result of thinning a system's digit counts toward target `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinnedDigits {
    #[serde(serialize_with = "crate::real::serde_big::ratio_as_decimal")]
    target: BigRational,
    qprime: Vec<u32>,
    checkpoints: Vec<u64>,
}

impl ThinnedDigits {
    /// The target dimension `t`.
    pub fn target(&self) -> &BigRational {
        &self.target
    }

    /// Thinned digit counts `q'_1, ..., q'_depth`.
    pub fn qprime(&self) -> &[u32] {
        &self.qprime
    }

    /// Thinned count at 1-indexed level `k`.
    pub fn qprime_at(&self, k: u64) -> u32 {
        self.qprime[(k - 1) as usize]
    }

    /// Checkpoint levels `k_1 < k_2 < ...` where keep-runs crossed `t`.
    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    /// Depth of the thinned data.
    pub fn depth(&self) -> u64 {
        self.qprime.len() as u64
    }

    /// The index thinning set these counts carve out.
    pub fn gamma(&self) -> GammaSet {
        GammaSet::Thinned { qprime: self.qprime.clone() }
    }

    /// Thinned prefix ratios `ln(N_k) / ln(B_k)`, `N_k = q'_1 ... q'_k`.
    pub fn prefix_ratios<F: Real>(&self, system: &MoranSystem) -> Vec<RatioSample<F>> {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        let mut out = Vec::with_capacity(self.qprime.len());
        for (j, &qp) in self.qprime.iter().enumerate() {
            let k = j as u64 + 1;
            num *= BigUint::from(qp);
            den *= BigUint::from(system.base(k));
            out.push(RatioSample {
                k,
                ratio: F::from_f64_lossy(ln_big(&num) / ln_big(&den)),
            });
        }
        out
    }

    /// Exact two-sided verification of every checkpoint.
    ///
    /// At each `k_j` the thinned ratio must sit at or below `t`, and the
    /// kept crossing digit must push the ratio at `k_j + 1` strictly above
    /// `t`; both comparisons run as integer power tests.
    pub fn verify_checkpoints(&self, system: &MoranSystem) -> Vec<CheckpointCheck> {
        let (a, c) = target_powers(&self.target);
        let mut n_pow = BigUint::one();
        let mut b_pow = BigUint::one();
        let mut per_level = Vec::with_capacity(self.qprime.len());
        for (j, &qp) in self.qprime.iter().enumerate() {
            let k = j as u64 + 1;
            n_pow *= BigUint::from(qp).pow(c);
            b_pow *= BigUint::from(system.base(k)).pow(a);
            per_level.push(n_pow <= b_pow);
        }
        self.checkpoints
            .iter()
            .map(|&k| CheckpointCheck {
                k,
                at_or_below_target: per_level[(k - 1) as usize],
                next_exceeds_target: !per_level[k as usize],
            })
            .collect()
    }
}

/// Exact checkpoint verdict for one `k_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckpointCheck {
    pub k: u64,
    /// `N_(k_j)^c <= B_(k_j)^a`.
    pub at_or_below_target: bool,
    /// `N_(k_j + 1)^c > B_(k_j + 1)^a`.
    pub next_exceeds_target: bool,
}

/// Greedy keep-run thinning of `system`'s digit counts toward `target`.
///
/// `target` must be a rational strictly between 0 and the system's upper
/// entropy dimension, with reduced denominator at most
/// [`THINNING_DENOMINATOR_CAP`]. For eventually periodic systems the upper
/// bound is enforced exactly; for block programs it is checked against the
/// sampled limsup at the validated depth.
pub fn thin_digits(
    system: &MoranSystem,
    target: &BigRational,
    depth: u64,
) -> Result<ThinnedDigits> {
    validate_target(system, target)?;
    let (a, c) = target_powers(target);
    let mut qprime = Vec::with_capacity(depth as usize);
    let mut checkpoints = Vec::new();
    let mut n_pow = BigUint::one(); // N_m^c
    let mut b_pow = BigUint::one(); // B_m^a
    let mut in_run = false;
    for m in 1..=depth {
        b_pow *= BigUint::from(system.base(m)).pow(a);
        if m == 1 {
            // The first level always thins to one digit: a single level can
            // never sit at or below a target strictly below dimension 1.
            qprime.push(1);
            continue;
        }
        let q_m = system.digit_count(m);
        let candidate = &n_pow * BigUint::from(q_m).pow(c);
        if candidate <= b_pow {
            qprime.push(q_m);
            n_pow = candidate;
            in_run = true;
        } else if in_run {
            // The run crossed the target: checkpoint the last in-run level
            // and keep the crossing digit, overshooting exactly once.
            checkpoints.push(m - 1);
            qprime.push(q_m);
            n_pow = candidate;
            in_run = false;
        } else {
            qprime.push(1);
        }
    }
    Ok(ThinnedDigits { target: target.clone(), qprime, checkpoints })
}

/// Index split along a thinning set: members and complement up to `n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaIndexSet {
    pub members: Vec<u64>,
    pub complement: Vec<u64>,
}

/// Splits `1..=n_max` along membership in `gamma`.
pub fn gamma_index_set(
    system: &MoranSystem,
    gamma: &GammaSet,
    n_max: u64,
) -> Result<GammaIndexSet> {
    let mut members = Vec::new();
    let mut complement = Vec::new();
    for n in 1..=n_max {
        if gamma.contains_index(system, n)? {
            members.push(n);
        } else {
            complement.push(n);
        }
    }
    Ok(GammaIndexSet { members, complement })
}

fn target_powers(target: &BigRational) -> (u32, u32) {
    let a = target.numer().to_u32().expect("validated numerator");
    let c = target.denom().to_u32().expect("validated denominator");
    (a, c)
}

fn validate_target(system: &MoranSystem, target: &BigRational) -> Result<()> {
    let out_of_range = || Error::ThinningTargetOutOfRange {
        target: format!("{}/{}", target.numer(), target.denom()),
        upper: match system.exact_prefix_ratio_limit() {
            Some(lr) => format!("ln({}) / ln({})", lr.num, lr.den),
            None => format!("{}", system.upper_entropy_dim::<f64>(system.validated_depth()).value),
        },
    };
    if !target.is_positive() || target >= &BigRational::one() {
        return Err(out_of_range());
    }
    let denom = target.denom();
    if denom.to_u32().map_or(true, |d| d > THINNING_DENOMINATOR_CAP) {
        return Err(Error::ThinningTargetTooFine {
            denominator: denom.to_string(),
            cap: THINNING_DENOMINATOR_CAP,
        });
    }
    let (a, c) = target_powers(target);
    match system.exact_prefix_ratio_limit() {
        Some(limit) => {
            // t = a/c < ln(num)/ln(den) iff den^a < num^c.
            if limit.den.pow(a) < limit.num.pow(c) {
                Ok(())
            } else {
                Err(out_of_range())
            }
        }
        None => {
            let upper: f64 = system.upper_entropy_dim::<f64>(system.validated_depth()).value;
            let t = target.to_f64().unwrap_or(f64::NAN);
            if t < upper {
                Ok(())
            } else {
                Err(out_of_range())
            }
        }
    }
}
