//! Shift sequences, sign words, and bit sources.
//!
//! A *shift sequence* assigns every index `n >= 1` a nonnegative shift
//! `s_n`; spectra place the branch for index `n` at tree depth
//! `word_depth(n) + s_n`. A *sign word* assigns every digit position a sign
//! `w_i in {+1, -1}`; signed-digit spectra scale stride `rho_i` by `w_i`.
//! A *bit source* is a finite, fully materialized bit string — explicit or
//! expanded once from a seeded generator — so every run is reproducible
//! from the construction data alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::system::MoranSystem;
use crate::thinning::GammaSet;
use crate::word::{encode_index, word_depth};
use crate::Result;

/// A finite bit string with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitString {
    bits: Vec<bool>,
    origin: BitOrigin,
}

/// How a bit string was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BitOrigin {
    Explicit,
    Seeded { seed: u64 },
}

impl BitString {
    /// Wraps explicit bits.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits, origin: BitOrigin::Explicit }
    }

    /// Expands `len` bits from a seeded ChaCha stream, fixed once for ever.
    pub fn from_seed(seed: u64, len: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..len).map(|_| rng.gen::<bool>()).collect();
        Self { bits, origin: BitOrigin::Seeded { seed } }
    }

    /// Bit at `index`, erring when the string is too short.
    pub fn bit(&self, index: u64) -> Result<bool> {
        self.bits
            .get(index as usize)
            .copied()
            .ok_or(Error::BitsExhausted { needed: index, available: self.bits.len() as u64 })
    }

    pub fn len(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn origin(&self) -> BitOrigin {
        self.origin
    }
}

/// A sign `w_i in {+1, -1}` per digit position `i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignWord {
    prefix: Vec<i8>,
    period: Vec<i8>,
}

impl SignWord {
    /// `prefix` once, then `period` forever; entries must be `+1` or `-1`.
    pub fn new(prefix: Vec<i8>, period: Vec<i8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptySequence);
        }
        for (i, &w) in prefix.iter().chain(period.iter()).enumerate() {
            if w != 1 && w != -1 {
                return Err(Error::InvalidSign { position: i as u64 + 1, value: w });
            }
        }
        Ok(Self { prefix, period })
    }

    /// All positive: reproduces the canonical spectrum.
    pub fn all_plus() -> Self {
        Self { prefix: vec![], period: vec![1] }
    }

    /// All negative: the canonical spectrum reflected through zero.
    pub fn all_minus() -> Self {
        Self { prefix: vec![], period: vec![-1] }
    }

    /// `+1, -1, +1, -1, ...`.
    pub fn alternating() -> Self {
        Self { prefix: vec![], period: vec![1, -1] }
    }

    /// Sign at 1-indexed position `i`.
    pub fn sign(&self, i: u64) -> i8 {
        assert!(i >= 1, "sign positions are 1-indexed");
        let p = self.prefix.len() as u64;
        if i <= p {
            self.prefix[(i - 1) as usize]
        } else {
            self.period[((i - p - 1) % self.period.len() as u64) as usize]
        }
    }
}

/// Assignment of a shift `s_n >= 0` to every index `n >= 1`.
///
/// The square-choice rules read one bit per index they shift; `GammaZero`
/// and `GammaSquareChoice` consult a thinning set and shift only indices
/// outside it. Bits are indexed by the *rank* of the index among shifted
/// ones, so the same bit string addresses different index sets coherently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ShiftSequence {
    /// `s_n = 0`: the canonical spectrum.
    AllZero,
    /// `s_n = n`: lacunary growth, one branch per scale.
    Identity,
    /// `s_n = n^2 + bit(n - 1)`: distinct spectra per bit string.
    SquareChoice { bits: BitString },
    /// `s_n = 0` on the thinning set, `s_n = n` off it.
    GammaZero { gamma: GammaSet },
    /// `s_n = 0` on the thinning set, `s_n = n^2 + bit(rank)` off it,
    /// where `rank` counts earlier off-set indices.
    GammaSquareChoice { gamma: GammaSet, bits: BitString },
    /// Explicit table for indices `1..=len`.
    Table(Vec<u64>),
}

impl ShiftSequence {
    /// Shift `s_n` for `n >= 1`.
    ///
    /// Rank-indexed rules scan indices `1..n` to find the rank, costing
    /// `O(n)` digit decodes; bulk consumers should use [`ShiftStream`].
    pub fn shift_at(&self, system: &MoranSystem, n: u64) -> Result<u64> {
        assert!(n >= 1, "shifts are defined for n >= 1");
        match self {
            ShiftSequence::AllZero => Ok(0),
            ShiftSequence::Identity => Ok(n),
            ShiftSequence::SquareChoice { bits } => {
                Ok(n * n + bits.bit(n - 1)? as u64)
            }
            ShiftSequence::GammaZero { gamma } => {
                if gamma.contains_index(system, n)? { Ok(0) } else { Ok(n) }
            }
            ShiftSequence::GammaSquareChoice { gamma, bits } => {
                if gamma.contains_index(system, n)? {
                    return Ok(0);
                }
                let mut rank = 0;
                for m in 1..n {
                    if !gamma.contains_index(system, m)? {
                        rank += 1;
                    }
                }
                Ok(n * n + bits.bit(rank)? as u64)
            }
            ShiftSequence::Table(table) => table
                .get((n - 1) as usize)
                .copied()
                .ok_or(Error::ShiftTableExhausted { index: n }),
        }
    }

    /// Whether `s_n = l`, without full evaluation when a cheap lower bound
    /// rules it out.
    ///
    /// Square-growth rules satisfy `s_n >= n^2`, so `n^2 > l` answers
    /// immediately — no rank scan, no bit lookup. Label evaluation leans on
    /// this: zero runs inside a word are at most the word depth long, so
    /// only tiny prefix indices can ever match.
    pub fn shift_equals(&self, system: &MoranSystem, n: u64, l: u64) -> Result<bool> {
        assert!(n >= 1, "shifts are defined for n >= 1");
        match self {
            ShiftSequence::AllZero => Ok(l == 0),
            ShiftSequence::Identity => Ok(l == n),
            ShiftSequence::SquareChoice { .. } => {
                if n.saturating_mul(n) > l {
                    return Ok(false);
                }
                Ok(self.shift_at(system, n)? == l)
            }
            ShiftSequence::GammaZero { gamma } => {
                if gamma.contains_index(system, n)? { Ok(l == 0) } else { Ok(l == n) }
            }
            ShiftSequence::GammaSquareChoice { gamma, .. } => {
                if gamma.contains_index(system, n)? {
                    return Ok(l == 0);
                }
                if n.saturating_mul(n) > l {
                    return Ok(false);
                }
                Ok(self.shift_at(system, n)? == l)
            }
            ShiftSequence::Table(_) => Ok(self.shift_at(system, n)? == l),
        }
    }

    /// Streaming evaluator that amortizes rank bookkeeping.
    pub fn stream<'a>(&'a self, system: &'a MoranSystem) -> ShiftStream<'a> {
        ShiftStream { seq: self, system, next_n: 1, rank: 0 }
    }

    /// Largest count of nonzero labels on any descending all-zero ray below
    /// a node, over indices `n <= n_max`.
    ///
    /// The label rule marks at most one depth (`word_depth(n) + s_n`) per
    /// ray, so the bound is 1 as soon as any index is shifted and 0 when no
    /// index is; both values certify label-summability of the tree.
    pub fn ray_label_bound(&self, system: &MoranSystem, n_max: u64) -> Result<u32> {
        let mut stream = self.stream(system);
        for _ in 1..=n_max {
            let (_, s) = stream.next_shift()?;
            if s > 0 {
                return Ok(1);
            }
        }
        Ok(0)
    }
}

/// Sequential shift evaluator; yields `(n, s_n)` for `n = 1, 2, ...`.
pub struct ShiftStream<'a> {
    seq: &'a ShiftSequence,
    system: &'a MoranSystem,
    next_n: u64,
    rank: u64,
}

impl ShiftStream<'_> {
    /// The next `(n, s_n)` pair.
    pub fn next_shift(&mut self) -> Result<(u64, u64)> {
        let n = self.next_n;
        self.next_n += 1;
        let s = match self.seq {
            ShiftSequence::GammaSquareChoice { gamma, bits } => {
                if gamma.contains_index(self.system, n)? {
                    0
                } else {
                    let s = n * n + bits.bit(self.rank)? as u64;
                    self.rank += 1;
                    s
                }
            }
            other => other.shift_at(self.system, n)?,
        };
        Ok((n, s))
    }
}

/// Word-depth helper re-exported for shift consumers.
pub fn depth_of(system: &MoranSystem, n: u64) -> u64 {
    word_depth(system, n)
}

/// Digits helper re-exported for shift consumers.
pub fn digits_of(system: &MoranSystem, n: u64) -> Vec<u32> {
    encode_index(system, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::SequenceRule;

    fn sys() -> MoranSystem {
        MoranSystem::new(SequenceRule::constant(4), SequenceRule::constant(2)).unwrap()
    }

    #[test]
    fn seeded_bits_are_reproducible() {
        let a = BitString::from_seed(7, 64);
        let b = BitString::from_seed(7, 64);
        let c = BitString::from_seed(8, 64);
        assert_eq!(a, b);
        assert_ne!(a.bits(), c.bits());
        assert!(matches!(a.bit(64), Err(Error::BitsExhausted { needed: 64, available: 64 })));
    }

    #[test]
    fn sign_word_prefix_then_period() {
        let w = SignWord::new(vec![1, -1], vec![-1, 1]).unwrap();
        let got: Vec<i8> = (1..=6).map(|i| w.sign(i)).collect();
        assert_eq!(got, [1, -1, -1, 1, -1, 1]);
        assert!(matches!(
            SignWord::new(vec![], vec![2]),
            Err(Error::InvalidSign { position: 1, value: 2 })
        ));
        assert_eq!(SignWord::alternating().sign(3), 1);
    }

    #[test]
    fn identity_and_square_choice_shifts() {
        let s = sys();
        assert_eq!(ShiftSequence::Identity.shift_at(&s, 9).unwrap(), 9);
        let bits = BitString::from_bits(vec![true, false, true]);
        let sq = ShiftSequence::SquareChoice { bits };
        assert_eq!(sq.shift_at(&s, 1).unwrap(), 2); // 1 + bit0 = 1 + 1
        assert_eq!(sq.shift_at(&s, 2).unwrap(), 4); // 4 + bit1 = 4 + 0
        assert_eq!(sq.shift_at(&s, 3).unwrap(), 10); // 9 + bit2 = 9 + 1
        assert!(sq.shift_at(&s, 4).is_err());
    }

    #[test]
    fn stream_agrees_with_pointwise_shifts() {
        let s = sys();
        let bits = BitString::from_seed(3, 100);
        let seq = ShiftSequence::SquareChoice { bits };
        let mut stream = seq.stream(&s);
        for n in 1..=100 {
            let (m, v) = stream.next_shift().unwrap();
            assert_eq!(m, n);
            assert_eq!(v, seq.shift_at(&s, n).unwrap());
        }
    }

    #[test]
    fn ray_label_bound_is_zero_only_for_all_zero() {
        let s = sys();
        assert_eq!(ShiftSequence::AllZero.ray_label_bound(&s, 100).unwrap(), 0);
        assert_eq!(ShiftSequence::Identity.ray_label_bound(&s, 100).unwrap(), 1);
    }
}
