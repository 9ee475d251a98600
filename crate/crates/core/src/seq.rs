//! Total rules for the integer sequences `{b_k}` and `{q_k}`.
//!
//! A rule must produce a term for every level `k >= 1`. Three shapes cover
//! everything the spectrum families need: plain periodic repetition, an
//! explicit prefix followed by a periodic tail, and block programs whose
//! block lengths may double on each pass (the shape that makes prefix
//! log-ratios oscillate and separates limsup from liminf dimensions).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Length rule for one block of a block program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockLen {
    /// The block has this length on every pass.
    Fixed(u64),
    /// The block has length `initial * 2^c` on pass `c = 0, 1, 2, ...`.
    Doubling(u64),
}

/// One block of a block program: a repeated value with a length rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub value: u32,
    pub len: BlockLen,
}

/// A total rule `k -> value` for a positive integer sequence, `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceRule {
    /// `values` repeated forever.
    Periodic { values: Vec<u32> },
    /// `prefix` once, then `period` repeated forever.
    PrefixPeriodic { prefix: Vec<u32>, period: Vec<u32> },
    /// The blocks emitted in order, then again with doubled `Doubling`
    /// lengths, and so on pass after pass.
    Blocks { blocks: Vec<Block> },
}

impl SequenceRule {
    /// Constant sequence.
    pub fn constant(value: u32) -> Self {
        SequenceRule::Periodic { values: vec![value] }
    }

    /// Rejects empty rules, zero terms, and zero-length blocks.
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceRule::Periodic { values } => validate_values(values, 0),
            SequenceRule::PrefixPeriodic { prefix, period } => {
                // An empty prefix is fine; an empty period is not.
                if !prefix.is_empty() {
                    validate_values(prefix, 0)?;
                }
                validate_values(period, prefix.len() as u64)
            }
            SequenceRule::Blocks { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::EmptySequence);
                }
                for (i, b) in blocks.iter().enumerate() {
                    if b.value == 0 {
                        return Err(Error::NonPositiveTerm { position: i as u64 + 1 });
                    }
                    let zero_len = match b.len {
                        BlockLen::Fixed(l) => l == 0,
                        BlockLen::Doubling(l) => l == 0,
                    };
                    if zero_len {
                        return Err(Error::EmptyBlock { index: i });
                    }
                }
                Ok(())
            }
        }
    }

    /// The term at 1-indexed position `k`.
    pub fn term(&self, k: u64) -> u32 {
        assert!(k >= 1, "sequence positions are 1-indexed");
        match self {
            SequenceRule::Periodic { values } => {
                values[((k - 1) % values.len() as u64) as usize]
            }
            SequenceRule::PrefixPeriodic { prefix, period } => {
                let p = prefix.len() as u64;
                if k <= p {
                    prefix[(k - 1) as usize]
                } else {
                    period[((k - p - 1) % period.len() as u64) as usize]
                }
            }
            SequenceRule::Blocks { blocks } => {
                let mut rest = k;
                for pass in 0u32.. {
                    for b in blocks {
                        let len = match b.len {
                            BlockLen::Fixed(l) => l,
                            // Saturate: one pass beyond 2^63 covers any u64 index.
                            BlockLen::Doubling(l) => l.checked_shl(pass).unwrap_or(u64::MAX),
                        };
                        if rest <= len {
                            return b.value;
                        }
                        rest -= len;
                    }
                }
                unreachable!("every pass has positive total length")
            }
        }
    }

    /// Largest value the rule can ever produce.
    pub fn sup(&self) -> u32 {
        let max = |vs: &[u32]| vs.iter().copied().max().unwrap_or(0);
        match self {
            SequenceRule::Periodic { values } => max(values),
            SequenceRule::PrefixPeriodic { prefix, period } => max(prefix).max(max(period)),
            SequenceRule::Blocks { blocks } => {
                blocks.iter().map(|b| b.value).max().unwrap_or(0)
            }
        }
    }

    /// `(prefix length, period)` when the rule is eventually periodic.
    ///
    /// Block programs with any `Doubling` block are not eventually periodic;
    /// all-`Fixed` programs repeat with the pass length as period.
    pub fn eventually_periodic(&self) -> Option<(u64, Vec<u32>)> {
        match self {
            SequenceRule::Periodic { values } => Some((0, values.clone())),
            SequenceRule::PrefixPeriodic { prefix, period } => {
                Some((prefix.len() as u64, period.clone()))
            }
            SequenceRule::Blocks { blocks } => {
                let mut period = Vec::new();
                for b in blocks {
                    match b.len {
                        BlockLen::Fixed(l) => {
                            period.extend(std::iter::repeat(b.value).take(l as usize))
                        }
                        BlockLen::Doubling(_) => return None,
                    }
                }
                Some((0, period))
            }
        }
    }

    /// Depth that exercises the rule's full static structure: one whole
    /// period past the prefix, or one whole first pass for block programs.
    pub fn structural_depth(&self) -> u64 {
        match self.eventually_periodic() {
            Some((prefix, period)) => prefix + period.len() as u64,
            None => match self {
                SequenceRule::Blocks { blocks } => blocks
                    .iter()
                    .map(|b| match b.len {
                        BlockLen::Fixed(l) => l,
                        BlockLen::Doubling(l) => l,
                    })
                    .sum(),
                _ => unreachable!("only block programs are aperiodic"),
            },
        }
    }
}

fn validate_values(values: &[u32], offset: u64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    for (i, &v) in values.iter().enumerate() {
        if v == 0 {
            return Err(Error::NonPositiveTerm { position: offset + i as u64 + 1 });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_terms_cycle() {
        let r = SequenceRule::Periodic { values: vec![4, 6] };
        let got: Vec<u32> = (1..=6).map(|k| r.term(k)).collect();
        assert_eq!(got, [4, 6, 4, 6, 4, 6]);
        assert_eq!(r.sup(), 6);
    }

    #[test]
    fn prefix_periodic_switches_to_tail() {
        let r = SequenceRule::PrefixPeriodic { prefix: vec![8, 8, 8], period: vec![4, 16] };
        let got: Vec<u32> = (1..=8).map(|k| r.term(k)).collect();
        assert_eq!(got, [8, 8, 8, 4, 16, 4, 16, 4]);
        assert_eq!(r.eventually_periodic(), Some((3, vec![4, 16])));
    }

    #[test]
    fn doubling_blocks_stretch_each_pass() {
        // Pass 0: 4 then 16,16; pass 1: 4,4 then 16x4; pass 2: 4x4 ...
        let r = SequenceRule::Blocks {
            blocks: vec![
                Block { value: 4, len: BlockLen::Doubling(1) },
                Block { value: 16, len: BlockLen::Doubling(2) },
            ],
        };
        let got: Vec<u32> = (1..=12).map(|k| r.term(k)).collect();
        assert_eq!(got, [4, 16, 16, 4, 4, 16, 16, 16, 16, 4, 4, 4]);
        assert_eq!(r.eventually_periodic(), None);
        assert_eq!(r.structural_depth(), 3);
    }

    #[test]
    fn fixed_blocks_are_periodic() {
        let r = SequenceRule::Blocks {
            blocks: vec![
                Block { value: 4, len: BlockLen::Fixed(2) },
                Block { value: 8, len: BlockLen::Fixed(1) },
            ],
        };
        assert_eq!(r.eventually_periodic(), Some((0, vec![4, 4, 8])));
        let got: Vec<u32> = (1..=7).map(|k| r.term(k)).collect();
        assert_eq!(got, [4, 4, 8, 4, 4, 8, 4]);
    }

    #[test]
    fn validation_rejects_degenerate_rules() {
        assert!(matches!(
            SequenceRule::Periodic { values: vec![] }.validate(),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(
            SequenceRule::Periodic { values: vec![4, 0] }.validate(),
            Err(Error::NonPositiveTerm { position: 2 })
        ));
        assert!(matches!(
            SequenceRule::Blocks {
                blocks: vec![Block { value: 4, len: BlockLen::Fixed(0) }]
            }
            .validate(),
            Err(Error::EmptyBlock { index: 0 })
        ));
    }

    #[test]
    fn serde_round_trip_is_stable() {
        let r = SequenceRule::PrefixPeriodic { prefix: vec![8], period: vec![4, 16] };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"prefix_periodic","prefix":[8],"period":[4,16]}"#
        );
        let back: SequenceRule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
