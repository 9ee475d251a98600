//! Orthogonality, unitarity, Parseval completeness, separation.
//!
//! Everything here treats a candidate spectrum as *data* — a plain list of
//! integers — and verifies its properties against the measure from
//! scratch, independently of how the list was produced.
//!
//! ## Exact pairwise orthogonality
//!
//! `e_lambda` and `e_kappa` are orthogonal in `L^2(mu)` iff
//! `mu_hat(lambda - kappa) = 0`, i.e. iff the difference lies in the
//! integer zero set `Z = union_k B_k r_(k+1) (Z \ q_(k+1) Z)`. Writing a
//! positive integer in the mixed radix of the bases,
//! `z = sum e_l B_(l-1)` with `0 <= e_l < b_l`, membership collapses to a
//! *single digit test*: if `e_(v+1)` is the first nonzero digit then
//!
//! ```text
//! z in Z   iff   r_(v+1) divides e_(v+1),
//! ```
//!
//! because `z / B_v = e_(v+1) + b_(v+1) (...)` and the cofactor
//! `e_(v+1) / r_(v+1)` lies in `[1, q_(v+1))`, never divisible by
//! `q_(v+1)`. So each pair costs one digit-vector subtraction that can
//! stop at the first nonzero digit — no big-integer division in the hot
//! loop. The digit path is differentially tested against the independent
//! divisibility-descent membership in [`crate::fourier::zero_set_member`].
//!
//! ## Unitarity and completeness
//!
//! Level-`k` digit/frequency compatibility is a `q_k x q_k` unitary
//! matrix condition checked both numerically (Gram deviations) and by
//! exact residue arithmetic. Level-`n` truncations are checked as full
//! Gram matrices against the atomic measure, and Parseval sums
//! `sum_lambda |mu_hat_n(xi + lambda)|^2 = 1` hold at *every* real
//! frequency when the level set is complete; sums over the infinite
//! measure profile how fast a point list exhausts `L^2(mu)`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::fourier::{fourier_transform, fourier_transform_adaptive};
use crate::limits::{BESSEL_SLACK, MAX_MATRIX_DIM};
use crate::measure::level_measure;
use crate::real::big_ratio_to_f64;
use crate::system::MoranSystem;
use crate::Real;
use crate::Result;

/// Per-level base and ratio tables covering a value range.
struct DigitTable {
    bases: Vec<u32>,
    ratios: Vec<u32>,
}

impl DigitTable {
    /// Enough levels that `B_levels` exceeds `bound`.
    fn covering(system: &MoranSystem, bound: &BigUint) -> Self {
        let mut bases = Vec::new();
        let mut ratios = Vec::new();
        let mut big_b = BigUint::one();
        let mut level = 0u64;
        while big_b <= *bound {
            level += 1;
            bases.push(system.base(level));
            ratios.push(system.ratio(level));
            big_b *= BigUint::from(system.base(level));
        }
        Self { bases, ratios }
    }

    /// Little-endian mixed-radix digits, padded to the table length.
    fn digits(&self, value: &BigUint) -> Vec<u32> {
        let mut digits = Vec::with_capacity(self.bases.len());
        let mut rest = value.clone();
        for &b in &self.bases {
            let (q, r) = rest.div_rem(&BigUint::from(b));
            digits.push(r.to_u32().expect("remainder below base"));
            rest = q;
        }
        debug_assert!(rest.is_zero(), "digit table too short");
        digits
    }

    /// First nonzero digit of `a - b` (`a >= b` digitwise-encoded), or
    /// `None` when equal. Borrows only propagate upward, so the scan can
    /// stop at the first nonzero output digit.
    fn first_nonzero_sub(&self, a: &[u32], b: &[u32]) -> Option<(usize, u32)> {
        let mut borrow = 0i64;
        for l in 0..a.len() {
            let mut d = a[l] as i64 - b[l] as i64 - borrow;
            if d < 0 {
                d += self.bases[l] as i64;
                borrow = 1;
            } else {
                borrow = 0;
            }
            if d != 0 {
                return Some((l, d as u32));
            }
        }
        debug_assert_eq!(borrow, 0, "subtraction order violated");
        None
    }

    /// First nonzero digit of `a + b`, or `None` when both are zero.
    fn first_nonzero_add(&self, a: &[u32], b: &[u32]) -> Option<(usize, u32)> {
        let mut carry = 0u64;
        for l in 0..a.len() {
            let mut d = a[l] as u64 + b[l] as u64 + carry;
            if d >= self.bases[l] as u64 {
                d -= self.bases[l] as u64;
                carry = 1;
            } else {
                carry = 0;
            }
            if d != 0 {
                return Some((l, d as u32));
            }
        }
        // Both operands zero (a carry past the top would mean the table
        // was too short for a + b).
        debug_assert_eq!(carry, 0, "digit table too short for sum");
        None
    }

    /// Zero-set membership from the first nonzero digit: the witness level
    /// `v` when `r_(v+1)` divides the digit.
    fn witness(&self, first_nonzero: Option<(usize, u32)>) -> Option<u64> {
        let (l, d) = first_nonzero?;
        if d % self.ratios[l] == 0 {
            Some(l as u64)
        } else {
            None
        }
    }
}

/// One non-orthogonal pair, in decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityFailure {
    pub left: String,
    pub right: String,
    pub difference: String,
}

/// Exact pairwise orthogonality verdict for a point list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub points: usize,
    pub pairs: u64,
    pub failure_count: u64,
    /// At most [`FAILURE_SAMPLE`] failures are materialized.
    pub failures: Vec<OrthogonalityFailure>,
    /// Deepest zero-set witness level over all orthogonal pairs.
    pub max_witness_level: u64,
}

/// Cap on materialized failure rows.
pub const FAILURE_SAMPLE: usize = 32;

struct PairScan {
    pairs: u64,
    failure_count: u64,
    failures: Vec<(usize, usize)>,
    max_witness_level: u64,
}

impl PairScan {
    fn empty() -> Self {
        Self { pairs: 0, failure_count: 0, failures: Vec::new(), max_witness_level: 0 }
    }

    fn merge(mut self, other: Self) -> Self {
        self.pairs += other.pairs;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < FAILURE_SAMPLE {
                self.failures.push(f);
            }
        }
        self.max_witness_level = self.max_witness_level.max(other.max_witness_level);
        self
    }
}

/// Verifies that every difference of two distinct points lies in the
/// integer zero set of the measure's transform — exactly.
pub fn pairwise_orthogonal(system: &MoranSystem, points: &[BigInt]) -> Result<OrthogonalityReport> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "pairwise orthogonality",
            needed: 2,
            got: points.len(),
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoints { value: w[0].to_string() });
        }
    }
    // Differences of mixed signs add magnitudes; cover 2x the largest.
    let max_mag = sorted.iter().map(|p| p.magnitude()).max().expect("nonempty");
    let table = DigitTable::covering(system, &(max_mag * BigUint::from(2u32)));
    let signs: Vec<bool> = sorted.iter().map(|p| p.is_negative()).collect();
    let digits: Vec<Vec<u32>> = sorted.par_iter().map(|p| table.digits(p.magnitude())).collect();

    let scan = (0..sorted.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut local = PairScan::empty();
            for j in i + 1..sorted.len() {
                local.pairs += 1;
                // sorted[j] > sorted[i]: the difference is |j| - |i|,
                // |i| - |j|, or |i| + |j| depending on the sign pattern.
                let first = match (signs[i], signs[j]) {
                    (false, false) => table.first_nonzero_sub(&digits[j], &digits[i]),
                    (true, true) => table.first_nonzero_sub(&digits[i], &digits[j]),
                    (true, false) => table.first_nonzero_add(&digits[i], &digits[j]),
                    (false, true) => unreachable!("sorted: negative after positive"),
                };
                match table.witness(first) {
                    Some(level) => local.max_witness_level = local.max_witness_level.max(level),
                    None => {
                        local.failure_count += 1;
                        if local.failures.len() < FAILURE_SAMPLE {
                            local.failures.push((i, j));
                        }
                    }
                }
            }
            local
        })
        .reduce(PairScan::empty, PairScan::merge);

    let failures = scan
        .failures
        .iter()
        .take(FAILURE_SAMPLE)
        .map(|&(i, j)| OrthogonalityFailure {
            left: sorted[i].to_string(),
            right: sorted[j].to_string(),
            difference: (&sorted[j] - &sorted[i]).to_string(),
        })
        .collect();
    Ok(OrthogonalityReport {
        points: sorted.len(),
        pairs: scan.pairs,
        failure_count: scan.failure_count,
        failures,
        max_witness_level: scan.max_witness_level,
    })
}

/// Gram-matrix unitarity report, numeric and exact lanes together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitarityReport<F> {
    pub level: u64,
    pub dim: usize,
    /// Digit sign for compatibility checks; `None` for level Grams.
    pub sign: Option<i8>,
    pub max_offdiag: F,
    pub max_diag_deviation: F,
    pub exact_pass: bool,
}

/// Checks the level-`k` digit/frequency compatibility matrix
/// `U[d][l] = exp(-2 pi i d w r_k l / b_k) / sqrt(q_k)` for a digit sign
/// `w in {+1, -1}`: numerically via `U* U - I`, and exactly via the
/// residue conditions `b_k | q_k r_k D` and `b_k !| r_k D` for every
/// column offset `D in [1, q_k)`.
pub fn compatible_pair_check<F: Real>(
    system: &MoranSystem,
    k: u64,
    sign: i8,
) -> Result<UnitarityReport<F>> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidSign { position: k, value: sign });
    }
    let q = system.digit_count(k) as usize;
    let b = system.base(k) as u64;
    let r = system.ratio(k) as u64;
    // Exact lane: geometric column sums vanish iff the residues comply.
    let mut exact_pass = true;
    for delta in 1..q as u64 {
        let qrd = (q as u64) * r * delta;
        let rd = r * delta;
        if qrd % b != 0 || rd % b == 0 {
            exact_pass = false;
        }
    }
    // Numeric lane.
    let scale = F::one() / F::from_f64_lossy((q as f64).sqrt());
    let tau = F::from_f64_lossy(-2.0 * std::f64::consts::PI * sign as f64);
    let cols: Vec<Vec<Complex<F>>> = (0..q)
        .map(|l| {
            (0..q)
                .map(|d| {
                    let angle = tau * F::from_f64_lossy(((d as u64 * r * l as u64) % b) as f64)
                        / F::from_f64_lossy(b as f64);
                    Complex::new(angle.cos(), angle.sin()) * scale
                })
                .collect()
        })
        .collect();
    let (max_offdiag, max_diag_deviation) = gram_deviation(&cols);
    Ok(UnitarityReport {
        level: k,
        dim: q,
        sign: Some(sign),
        max_offdiag,
        max_diag_deviation,
        exact_pass,
    })
}

/// `max |G_ij|` offdiag and `max |G_ii - 1|` for columns of unit scale.
fn gram_deviation<F: Real>(cols: &[Vec<Complex<F>>]) -> (F, F) {
    let deviations: Vec<(F, F)> = (0..cols.len())
        .into_par_iter()
        .map(|i| {
            let mut off = F::zero();
            let mut diag = F::zero();
            for j in i..cols.len() {
                let mut g = Complex::new(F::zero(), F::zero());
                for (x, y) in cols[i].iter().zip(&cols[j]) {
                    g += x.conj() * y;
                }
                if i == j {
                    diag = (g - Complex::new(F::one(), F::zero())).norm();
                } else {
                    off = off.max(g.norm());
                }
            }
            (off, diag)
        })
        .collect();
    deviations
        .into_iter()
        .fold((F::zero(), F::zero()), |(o, d), (ro, rd)| (o.max(ro), d.max(rd)))
}

/// Verifies that `frequencies` is an orthonormal basis for the level-`n`
/// measure: cardinality `Q_n`, exact zero-set witnesses strictly below
/// level `n` for every pair, and the numeric Gram against the atoms.
pub fn level_unitarity<F: Real>(
    system: &MoranSystem,
    frequencies: &[BigInt],
    n: u64,
) -> Result<UnitarityReport<F>> {
    let mut expected: u128 = 1;
    for j in 1..=n {
        expected *= system.digit_count(j) as u128;
    }
    if frequencies.len() as u128 != expected {
        return Err(Error::WrongCardinality {
            expected: expected.to_string(),
            got: frequencies.len(),
        });
    }
    if frequencies.len() > MAX_MATRIX_DIM {
        return Err(Error::MatrixTooLarge { dim: frequencies.len(), cap: MAX_MATRIX_DIM });
    }
    for (i, w) in frequencies.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoints { value: w[0].to_string() });
        }
        if w[0] > w[1] {
            return Err(Error::UnsortedPoints { index: i + 1 });
        }
    }
    // Exact lane: a pair is orthogonal at level n iff some product factor
    // at level <= n vanishes, i.e. the witness level is < n.
    let report = pairwise_orthogonal(system, frequencies)?;
    let exact_pass = report.failure_count == 0 && report.max_witness_level < n;
    // Numeric lane: Gram of the exponentials over the level atoms.
    let measure = level_measure(system, n, n)?;
    let den = BigInt::from(measure.denominator().clone());
    let scale = F::one() / F::from_f64_lossy((measure.count() as f64).sqrt());
    let tau = F::from_f64_lossy(-2.0 * std::f64::consts::PI);
    let cols: Vec<Vec<Complex<F>>> = frequencies
        .par_iter()
        .map(|lambda| {
            measure
                .numerators()
                .iter()
                .map(|num| {
                    let t = (lambda * BigInt::from(num.clone())).mod_floor(&den);
                    let frac = big_ratio_to_f64(
                        t.magnitude(),
                        measure.denominator(),
                    );
                    let angle = tau * F::from_f64_lossy(frac);
                    Complex::new(angle.cos(), angle.sin()) * scale
                })
                .collect()
        })
        .collect();
    let (max_offdiag, max_diag_deviation) = gram_deviation(&cols);
    Ok(UnitarityReport {
        level: n,
        dim: frequencies.len(),
        sign: None,
        max_offdiag,
        max_diag_deviation,
        exact_pass,
    })
}

/// Parseval sum `sum_lambda |mu_hat_n(xi + lambda)|^2` for the level-`n`
/// truncation; equals 1 at every `xi` iff the frequency set is an
/// orthonormal basis for the level measure.
pub fn parseval_sum<F: Real>(
    system: &MoranSystem,
    frequencies: &[BigInt],
    n: u64,
    xi: &BigRational,
) -> Result<F> {
    let mut expected: u128 = 1;
    for j in 1..=n {
        expected *= system.digit_count(j) as u128;
    }
    if frequencies.len() as u128 != expected {
        return Err(Error::WrongCardinality {
            expected: expected.to_string(),
            got: frequencies.len(),
        });
    }
    let total = frequencies
        .par_iter()
        .map(|lambda| {
            let shifted = xi + BigRational::from(lambda.clone());
            let v = fourier_transform::<F>(system, &shifted, n);
            v.magnitude() * v.magnitude()
        })
        .sum::<F>();
    Ok(total)
}

/// One checkpoint of a completeness profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint<F> {
    pub count: u64,
    pub sum: F,
}

/// Running Parseval mass of a point list against the full measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessProfile<F> {
    #[serde(serialize_with = "crate::real::serde_big::ratio_as_decimal")]
    pub xi: BigRational,
    pub count: usize,
    /// `sum |mu_hat(xi + lambda)|^2` over the whole list.
    pub final_sum: F,
    /// Certified bound on the truncation error of the sum.
    pub certified_slack: F,
    /// No prefix sum may exceed `1 +` [`BESSEL_SLACK`].
    pub bessel_ok: bool,
    /// Prefix sums at power-of-two counts and at the end.
    pub checkpoints: Vec<ProfilePoint<F>>,
}

/// Sums `|mu_hat(xi + lambda)|^2` over the list in the given order with
/// adaptively truncated, tail-certified transforms. Pass frequencies in
/// increasing magnitude for a meaningful growth profile.
pub fn completeness_profile<F: Real>(
    system: &MoranSystem,
    frequencies: &[BigInt],
    xi: &BigRational,
    min_levels: u64,
) -> Result<CompletenessProfile<F>> {
    if frequencies.is_empty() {
        return Err(Error::EmptyInput { what: "completeness frequencies" });
    }
    let terms: Vec<(F, F)> = frequencies
        .par_iter()
        .map(|lambda| {
            let shifted = xi + BigRational::from(lambda.clone());
            let v = fourier_transform_adaptive::<F>(system, &shifted, min_levels);
            let mag = v.magnitude();
            // |(m + e)^2 - m^2| <= e (2m + e) for |e| <= tail bound.
            (mag * mag, v.tail_bound * (mag + mag + v.tail_bound))
        })
        .collect();
    let bessel_cap = F::one() + F::from_f64_lossy(BESSEL_SLACK);
    let mut sum = F::zero();
    let mut slack = F::zero();
    let mut bessel_ok = true;
    let mut checkpoints = Vec::new();
    let mut next_checkpoint = 1usize;
    for (i, (mag2, err)) in terms.iter().enumerate() {
        sum += *mag2;
        slack += *err;
        if sum > bessel_cap {
            bessel_ok = false;
        }
        if i + 1 == next_checkpoint || i + 1 == terms.len() {
            checkpoints.push(ProfilePoint { count: (i + 1) as u64, sum });
            next_checkpoint = next_checkpoint.saturating_mul(2);
        }
    }
    Ok(CompletenessProfile {
        xi: xi.clone(),
        count: frequencies.len(),
        final_sum: sum,
        certified_slack: slack,
        bessel_ok,
        checkpoints,
    })
}

/// Separation and window report for a truncation set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport<F> {
    pub level: u64,
    pub count: usize,
    /// Smallest gap between consecutive points, exactly.
    #[serde(serialize_with = "crate::real::serde_big::biguint_as_decimal")]
    pub min_gap: BigUint,
    /// Whether the smallest gap is at least the first stride `rho_1 = r_1`.
    pub gap_at_least_first_stride: bool,
    /// Whether every magnitude stays below `B_n`.
    pub inside_window: bool,
    /// `min_gap / B_n`.
    pub normalized_min_gap: F,
    /// `(max - min) / B_n`.
    pub normalized_span: F,
}

/// Exact gap and window statistics of a sorted level-`n` truncation.
pub fn separation_check<F: Real>(
    system: &MoranSystem,
    points: &[BigInt],
    n: u64,
) -> Result<SeparationReport<F>> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { what: "separation check", needed: 2, got: points.len() });
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoints { value: w[0].to_string() });
        }
        if w[0] > w[1] {
            return Err(Error::UnsortedPoints { index: i + 1 });
        }
    }
    let min_gap = points
        .windows(2)
        .map(|w| (&w[1] - &w[0]).magnitude().clone())
        .min()
        .expect("at least one gap");
    let mut big_b = BigUint::one();
    for j in 1..=n {
        big_b *= BigUint::from(system.base(j));
    }
    let first = points.first().expect("nonempty");
    let last = points.last().expect("nonempty");
    let max_mag = first.magnitude().max(last.magnitude());
    let span = (last - first).magnitude().clone();
    Ok(SeparationReport {
        level: n,
        count: points.len(),
        gap_at_least_first_stride: min_gap >= BigUint::from(system.ratio(1)),
        inside_window: *max_mag < big_b,
        normalized_min_gap: F::from_f64_lossy(big_ratio_to_f64(&min_gap, &big_b)),
        normalized_span: F::from_f64_lossy(big_ratio_to_f64(&span, &big_b)),
        min_gap,
    })
}
