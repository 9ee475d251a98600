//! Scalar abstraction and exact-to-float bridges.
//!
//! The crate's exact lanes produce big integers and big rationals; the
//! numeric lanes (Fourier magnitudes, dimension estimates, entropies) are
//! generic over [`Real`], implemented by `f32` and `f64`. The bridges here
//! convert huge exact quantities to floats without overflowing: logarithms
//! go through a mantissa/exponent split rather than a lossy full conversion.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::Serialize;

/// Floating-point scalar for the numeric lanes.
///
/// `f32` and `f64` implement this automatically; the crate-root aliases fix
/// `f64`, which every tolerance in [`crate::limits`] is calibrated for.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + AddAssign
    + Sum
    + Debug
    + Display
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, saturating at the type's range.
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).unwrap_or_else(|| {
            if value.is_sign_negative() {
                Self::neg_infinity()
            } else {
                Self::infinity()
            }
        })
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + AddAssign
        + Sum
        + Debug
        + Display
        + Serialize
        + Send
        + Sync
        + 'static
{
}

/// Exact dimension value `ln(num) / ln(den)`, kept in integer form.
///
/// Log-ratios of products of sequence terms are the closed forms for every
/// dimension in the crate; holding the two products exactly lets reports
/// print full-precision values at any float width and lets thinning compare
/// targets against the value without rounding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogRatio {
    /// Numerator argument; the count product (e.g. `Q_k`).
    #[serde(serialize_with = "crate::real::serde_big::biguint_as_decimal")]
    pub num: BigUint,
    /// Denominator argument; the scale product (e.g. `B_k`), at least 2.
    #[serde(serialize_with = "crate::real::serde_big::biguint_as_decimal")]
    pub den: BigUint,
}

impl LogRatio {
    /// Builds `ln(num)/ln(den)`. Panics if `den < 2` or `num = 0`; callers
    /// construct these from validated products where both are impossible.
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(num >= BigUint::from(1u32), "log-ratio numerator must be positive");
        assert!(den >= BigUint::from(2u32), "log-ratio denominator must be at least 2");
        Self { num, den }
    }

    /// The value `ln(num)/ln(den)` in the requested scalar.
    pub fn value<F: Real>(&self) -> F {
        F::from_f64_lossy(ln_big(&self.num) / ln_big(&self.den))
    }
}

/// Natural logarithm of a positive big integer, exact to f64 precision.
///
/// Splits `x = m * 2^s` with `m` holding the top 64 bits, so the result is
/// `ln(m) + s ln 2` without ever materializing `x` as a float.
pub fn ln_big(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits by bit count") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top word fits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as `f64` for arbitrary big-integer sizes, `num < den` or not.
///
/// Aligns both operands to at most 64 significant bits under a common shift;
/// relative error stays within a few ulps, and quotients below about
/// `2^-1000` underflow to zero (callers treat such values as exactly the
/// limit they approach).
pub fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio with zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits();
    let db = den.bits();
    if nb <= 1020 && db <= 1020 {
        // Both convert exactly-enough on their own.
        return to_f64_by_bits(num, nb) / to_f64_by_bits(den, db);
    }
    let top_num = if nb > 64 { (num >> (nb - 64)).to_u64() } else { num.to_u64() };
    let top_den = if db > 64 { (den >> (db - 64)).to_u64() } else { den.to_u64() };
    let mantissa = top_num.expect("top bits fit") as f64 / top_den.expect("top bits fit") as f64;
    let exp = nb as i64 - db as i64;
    // Guard powi's i32 domain; far outside it the result under/overflows anyway.
    if exp > 40_000 {
        return f64::INFINITY;
    }
    if exp < -40_000 {
        return 0.0;
    }
    mantissa * 2f64.powi(exp as i32)
}

fn to_f64_by_bits(x: &BigUint, bits: u64) -> f64 {
    if bits <= 64 {
        x.to_u64().expect("fits") as f64
    } else {
        let shift = bits - 64;
        x.to_u64()
            .map(|v| v as f64)
            .unwrap_or_else(|| (x >> shift).to_u64().expect("top word fits") as f64 * 2f64.powi(shift as i32))
    }
}

use num_traits::Zero;

/// Serde helpers rendering big integers and rationals as decimal strings.
///
/// JSON numbers cannot hold values like `B_4000`; every serialized report
/// carries exact quantities as strings instead.
pub mod serde_big {
    use num_bigint::{BigInt, BigUint};
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn biguint_as_decimal<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn bigint_as_decimal<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn bigints_as_decimal<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn biguints_as_decimal<S: Serializer>(xs: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn ratio_as_decimal<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }

    pub fn opt_ratio_as_decimal<S: Serializer>(
        x: &Option<BigRational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match x {
            Some(r) => ratio_as_decimal(r, s),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn ln_big_matches_f64_for_small_values() {
        for v in [1u64, 2, 3, 10, 1 << 20, u64::MAX] {
            let exact = (v as f64).ln();
            let got = ln_big(&BigUint::from(v));
            assert!((exact - got).abs() <= 1e-12 * exact.max(1.0), "v = {v}");
        }
    }

    #[test]
    fn ln_big_handles_powers_beyond_f64() {
        // ln(2^5000) = 5000 ln 2, far outside f64's direct range.
        let x = BigUint::one() << 5000;
        let got = ln_big(&x);
        let expect = 5000.0 * std::f64::consts::LN_2;
        assert!((got - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn log_ratio_reproduces_closed_forms() {
        // ln 2 / ln 4 = 1/2 exactly.
        let half = LogRatio::new(BigUint::from(2u32), BigUint::from(4u32));
        assert!((half.value::<f64>() - 0.5).abs() < 1e-15);
        // ln 6 / ln 24 = 0.5637914... (mixed two-periodic system).
        let v = LogRatio::new(BigUint::from(6u32), BigUint::from(24u32)).value::<f64>();
        assert!((v - 0.563_791_4).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn big_ratio_handles_huge_numerators_and_denominators() {
        // (2^3000 + junk) / 2^3001 ~ 1/2.
        let num = (BigUint::one() << 3000) + BigUint::from(12345u32);
        let den = BigUint::one() << 3001;
        let got = big_ratio_to_f64(&num, &den);
        assert!((got - 0.5).abs() < 1e-12, "got {got}");
        // Tiny quotient underflows to zero gracefully.
        let tiny = big_ratio_to_f64(&BigUint::one(), &(BigUint::one() << 4000));
        assert_eq!(tiny, 0.0);
    }

    #[test]
    fn big_ratio_small_operands_are_exact() {
        let got = big_ratio_to_f64(&BigUint::from(3u32), &BigUint::from(8u32));
        assert_eq!(got, 0.375);
    }
}
