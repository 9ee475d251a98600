//! The factored Fourier transform, its zero set, and tail certificates.
//!
//! The measure's transform is the infinite product
//!
//! ```text
//! mu^(xi) = prod_(k>=1) f_k(xi),
//! f_k(xi) = e^(-pi i (q_k - 1) u) sin(pi q_k u) / (q_k sin(pi u)),
//! u = frac(xi / B_k),
//! ```
//!
//! each factor the normalized exponential sum over one digit level. The
//! fractional part `u` is computed as an exact rational, so the two
//! structural cases are decided exactly: `u = 0` gives factor 1, and
//! `q_k u` integral with `u != 0` gives factor 0 — the only way any factor
//! vanishes. Consequently the integer zero set is
//!
//! ```text
//! Z = union_(k>=0)  B_k r_(k+1) (Z \ q_(k+1) Z),
//! ```
//!
//! and membership of an integer is decided by a divisibility descent that
//! shrinks the candidate by a factor `b >= 4` per level. Orthogonality of a
//! spectrum is exactly "all pairwise differences lie in `Z`".
//!
//! Truncation is certified: `|1 - f_k| <= pi (q_k - 1) |xi| / B_k`, so the
//! levels beyond `K` multiply the value by `1 + delta` with
//! `|delta| <= expm1(pi |xi| (M - 1) (4/3) / B_(K+1))`. The adaptive
//! variant extends `K` until that certificate is negligible and exits early
//! once the partial product's magnitude is already below reporting
//! precision.
//!
//! With decay certified absent — `|mu^(B_k)|` stays near `prod_j cos(pi /
//! 4^j) ~ 0.6926` for the dyadic demonstration system — these measures
//! separate spectrality from Fourier decay, which is why every spectrum
//! check here goes through exact arithmetic instead of transform smallness.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::limits::{ADAPTIVE_GUARD_LEVELS, MAGNITUDE_CUTOFF};
use crate::measure::AtomicMeasure;
use crate::real::{big_ratio_to_f64, Real};
use crate::system::MoranSystem;

/// A truncated transform value with a certified relative tail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FourierValue<F> {
    /// Real part of the truncated product.
    pub re: F,
    /// Imaginary part of the truncated product.
    pub im: F,
    /// Levels actually multiplied.
    pub truncation: u64,
    /// Bound on `|full - truncated|`; zero when a factor vanished exactly.
    pub tail_bound: F,
    /// Whether some factor was exactly zero (the value is then exact).
    pub exact_zero: bool,
}

impl<F: Real> FourierValue<F> {
    /// The truncated product as a complex number.
    pub fn value(&self) -> Complex<F> {
        Complex::new(self.re, self.im)
    }

    /// Magnitude of the truncated product.
    pub fn magnitude(&self) -> F {
        self.value().norm()
    }
}

/// Exact split `xi = sign * (whole + p / s)` with `0 <= p < s`.
struct RationalParts {
    negative: bool,
    whole: BigUint,
    p: BigUint,
    s: BigUint,
}

fn split_rational(xi: &BigRational) -> RationalParts {
    let negative = xi.is_negative();
    let abs = xi.abs();
    let whole = abs.trunc().to_integer().to_biguint().expect("abs");
    let frac = abs.fract();
    RationalParts {
        negative,
        whole,
        p: frac.numer().to_biguint().expect("abs"),
        s: frac.denom().to_biguint().expect("positive denominator"),
    }
}

/// The truncated transform `prod_(k<=truncation) f_k(xi)`.
pub fn fourier_transform<F: Real>(
    system: &MoranSystem,
    xi: &BigRational,
    truncation: u64,
) -> FourierValue<F> {
    transform_impl(system, xi, truncation, None)
}

/// Adaptive truncation: deep enough that the certified tail is negligible
/// for `|xi|`, never shallower than `min_levels`, with early exit once the
/// partial magnitude falls below [`MAGNITUDE_CUTOFF`].
///
/// A fixed truncation aliases large frequencies — the `K`-level product is
/// `B_K`-periodic — so completeness sums over frequencies as large as
/// `B_(N)` must deepen the product with the frequency; this picks
/// `K = min{k : B_k >= |xi|} + ADAPTIVE_GUARD_LEVELS` capped below by
/// `min_levels`.
pub fn fourier_transform_adaptive<F: Real>(
    system: &MoranSystem,
    xi: &BigRational,
    min_levels: u64,
) -> FourierValue<F> {
    transform_impl(system, xi, min_levels, Some(F::from_f64_lossy(MAGNITUDE_CUTOFF)))
}

fn transform_impl<F: Real>(
    system: &MoranSystem,
    xi: &BigRational,
    levels: u64,
    adaptive_cutoff: Option<F>,
) -> FourierValue<F> {
    let parts = split_rational(xi);
    let mut prod = Complex::new(F::one(), F::zero());
    let mut big_b = BigUint::one();
    // Mixed-radix digit peeling: rem = whole mod B_k and quot = whole div B_k
    // advance one small division per level, instead of a fresh full-width
    // reduction of `whole` at every level.
    let mut quot = parts.whole.clone();
    let mut rem = BigUint::zero();
    let mut k = 0u64;
    // First level whose B_k exceeds |xi|; the adaptive stop sits
    // ADAPTIVE_GUARD_LEVELS past it.
    let mut scale_level: Option<u64> = None;
    loop {
        let next = k + 1;
        let done = match (adaptive_cutoff, scale_level) {
            (None, _) => next > levels,
            (Some(_), Some(sl)) => next > levels && next > sl + ADAPTIVE_GUARD_LEVELS,
            (Some(_), None) => false,
        };
        if done {
            break;
        }
        if let Some(cutoff) = adaptive_cutoff {
            // Remaining factors have modulus <= 1, so the magnitude can
            // only shrink further: stop paying for levels.
            if prod.norm_sqr() < cutoff * cutoff {
                break;
            }
        }
        k = next;
        let base = BigUint::from(system.base(k));
        let (rest, digit) = quot.div_rem(&base);
        rem += digit * &big_b; // rem = whole mod B_k with big_b still B_(k-1)
        quot = rest;
        big_b *= &base;
        if scale_level.is_none() && quot.is_zero() {
            scale_level = Some(k); // whole div B_k = 0 iff B_k > whole
        }
        // u = frac(xi / B_k) = ((whole mod B_k) s + p) / (s B_k), exact.
        let u_num = &rem * &parts.s + &parts.p;
        if u_num.is_zero() {
            continue; // factor is exactly 1
        }
        let u_den = &parts.s * &big_b;
        let q = system.digit_count(k);
        // Factor vanishes iff q u is a nonzero integer: s B_k | q u_num.
        if ((&u_num * BigUint::from(q)) % &u_den).is_zero() {
            return FourierValue {
                re: F::zero(),
                im: F::zero(),
                truncation: k,
                tail_bound: F::zero(),
                exact_zero: true,
            };
        }
        prod = prod * factor_value::<F>(q, &u_num, &u_den);
    }
    if parts.negative {
        prod = prod.conj();
    }
    // Tail: |1 - f_j| <= pi (q_j - 1) |xi| / B_j and the B_j grow at least
    // fourfold, so sum_(j>k) <= S = pi |xi| (M - 1) (4/3) / B_(k+1); then
    // |full - truncated| <= |truncated| min(expm1(S), 2), the 2 because the
    // full product can never exceed the truncated one in modulus.
    let next_b = &big_b * BigUint::from(system.base(k + 1));
    let abs_num = &parts.whole * &parts.s + &parts.p;
    let ratio = big_ratio_to_f64(
        &(abs_num * BigUint::from(4u32) * BigUint::from(system.base_bound() - 1)),
        &(next_b * BigUint::from(3u32) * &parts.s),
    );
    let relative = (std::f64::consts::PI * ratio).exp_m1().min(2.0);
    let magnitude = prod.norm();
    FourierValue {
        re: prod.re,
        im: prod.im,
        truncation: k,
        tail_bound: magnitude * F::from_f64_lossy(relative),
        exact_zero: false,
    }
}

fn factor_value<F: Real>(q: u32, u_num: &BigUint, u_den: &BigUint) -> Complex<F> {
    let u = big_ratio_to_f64(u_num, u_den);
    if u == 0.0 {
        // Underflowed fractional part: the factor is 1 to f64 precision.
        return Complex::new(F::one(), F::zero());
    }
    let qf = q as f64;
    let ratio = (std::f64::consts::PI * qf * u).sin() / (qf * (std::f64::consts::PI * u).sin());
    let phase = -std::f64::consts::PI * (qf - 1.0) * u;
    Complex::new(
        F::from_f64_lossy(ratio * phase.cos()),
        F::from_f64_lossy(ratio * phase.sin()),
    )
}

/// Transform of a finite atomic measure by direct summation (the oracle
/// for the factored product at materializable levels).
pub fn atom_transform<F: Real>(measure: &AtomicMeasure, xi: &BigRational) -> Complex<F> {
    let den = BigInt::from(measure.denominator().clone()) * xi.denom();
    let mut sum = Complex::new(F::zero(), F::zero());
    for num in measure.numerators() {
        // Atom at num / B_n contributes e^(-2 pi i num xi / B_n); the
        // angle reduces mod 1 exactly before any float enters.
        let t = (BigInt::from(num.clone()) * xi.numer()).mod_floor(&den);
        let angle = -2.0 * std::f64::consts::PI * big_ratio_to_f64(
            &t.to_biguint().expect("mod_floor is nonnegative"),
            &den.to_biguint().expect("positive"),
        );
        sum += Complex::new(F::from_f64_lossy(angle.cos()), F::from_f64_lossy(angle.sin()));
    }
    sum / F::from_usize(measure.count()).expect("count fits")
}

/// Witness that an integer lies in the transform's zero set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroWitness {
    /// The level `k` with `xi in B_k r_(k+1) (Z \ q_(k+1) Z)`.
    pub level: u64,
}

/// Exact zero-set membership for integer frequencies.
///
/// Divisibility descent: strip `r_1`, test `q_1`, strip `q_1`, and so on;
/// each round divides the candidate by `b_k >= 4`, so the scan terminates
/// in `O(log |xi|)` levels. Zero is never a member.
pub fn zero_set_member(system: &MoranSystem, xi: &BigInt) -> Option<ZeroWitness> {
    if xi.is_zero() {
        return None;
    }
    let mut x = xi.abs().to_biguint().expect("abs");
    let mut k = 0u64;
    loop {
        let r = BigUint::from(system.ratio(k + 1));
        if (&x % &r) != BigUint::zero() {
            return None;
        }
        let d = x / r;
        let q = BigUint::from(system.digit_count(k + 1));
        if (&d % &q) != BigUint::zero() {
            return Some(ZeroWitness { level: k });
        }
        x = d / q;
        if x.is_zero() {
            // xi was exactly B_k r ... q: divisible forever only if zero.
            return None;
        }
        k += 1;
    }
}

/// One row of the non-decay probe.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NondecayRow<F> {
    pub k: u64,
    /// `|mu^(B_k)|` truncated `extra` levels past `k`.
    pub magnitude: F,
    pub tail_bound: F,
}

/// Evaluates `|mu^(B_k)|` for `k = 1..=k_max`, each truncated `extra`
/// levels beyond `k`.
///
/// The first `k` factors are exactly 1 (`B_k / B_j` is integral), so the
/// product starts at level `k + 1`, where `u = B_k / B_(k+j)` stays away
/// from 0: the magnitudes converge to a positive constant instead of
/// decaying — the signature of a measure with spectra but no Fourier decay.
pub fn fourier_nondecay_probe<F: Real>(
    system: &MoranSystem,
    k_max: u64,
    extra: u64,
) -> Vec<NondecayRow<F>> {
    let mut out = Vec::with_capacity(k_max as usize);
    let mut big_b = BigUint::one();
    for k in 1..=k_max {
        big_b *= BigUint::from(system.base(k));
        let xi = BigRational::from(BigInt::from(big_b.clone()));
        let fv = fourier_transform::<F>(system, &xi, k + extra);
        out.push(NondecayRow { k, magnitude: fv.magnitude(), tail_bound: fv.tail_bound });
    }
    out
}
