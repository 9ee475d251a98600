//! Mixed-radix index codec.
//!
//! Index `n >= 1` and its digit word determine each other through
//!
//! ```text
//! n = sum_(j<=k) sigma_j Q_(j-1),    0 <= sigma_j < q_j,   sigma_k != 0,
//! ```
//!
//! with `n = 0` encoded by the empty word. The final digit of a nonzero
//! index is automatically nonzero, which is what lets spectra address tree
//! nodes by index without ambiguity.

use crate::error::Error;
use crate::system::MoranSystem;
use crate::Result;

/// Digits of `n` in the system's mixed radix, least significant first;
/// empty for `n = 0`, last entry nonzero otherwise.
pub fn encode_index(system: &MoranSystem, n: u64) -> Vec<u32> {
    let mut digits = Vec::new();
    let mut rest = n;
    let mut k = 1;
    while rest > 0 {
        let q = system.digit_count(k) as u64;
        digits.push((rest % q) as u32);
        rest /= q;
        k += 1;
    }
    digits
}

/// Inverse of [`encode_index`]; validates digit ranges and the nonzero tail.
pub fn decode_word(system: &MoranSystem, digits: &[u32]) -> Result<u64> {
    if let Some(&last) = digits.last() {
        if last == 0 {
            return Err(Error::TrailingZeroDigit);
        }
    }
    let mut n: u128 = 0;
    let mut place: u128 = 1;
    for (j, &d) in digits.iter().enumerate() {
        let k = j as u64 + 1;
        let q = system.digit_count(k);
        if d >= q {
            return Err(Error::DigitOutOfRange { position: k, digit: d, q });
        }
        n += d as u128 * place;
        place = place
            .checked_mul(q as u128)
            .ok_or(Error::IndexOverflow)?;
        if n > u64::MAX as u128 {
            return Err(Error::IndexOverflow);
        }
    }
    Ok(n as u64)
}

/// Word length of `n`: the level at which the index's word terminates.
pub fn word_depth(system: &MoranSystem, n: u64) -> u64 {
    let mut depth = 0;
    let mut rest = n;
    let mut k = 1;
    while rest > 0 {
        rest /= system.digit_count(k) as u64;
        depth += 1;
        k += 1;
    }
    depth
}
