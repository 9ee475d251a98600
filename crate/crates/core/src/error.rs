//! Crate-wide error type.
//!
//! Every fallible operation returns [`enum@Error`]; variants carry the exact
//! offending values (big integers as decimal strings) so reports and CLI
//! diagnostics can be produced without re-deriving context.

use thiserror::Error;

/// Unified error for construction, validation, and verification failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A sequence rule was given no values.
    #[error("sequence rule has no values")]
    EmptySequence,

    /// A sequence entry is zero; all sequence terms must be positive.
    #[error("sequence term at position {position} must be positive")]
    NonPositiveTerm { position: u64 },

    /// A block program contains a block of length zero.
    #[error("block at index {index} has length zero")]
    EmptyBlock { index: usize },

    /// `q_k < 2`: every level must carry at least two digits.
    #[error("digit count q_{k} = {q} is below 2")]
    DigitCountTooSmall { k: u64, q: u32 },

    /// `q_k` does not divide `b_k`, so the digit set is not spectral for the level.
    #[error("digit count q_{k} = {q} does not divide base b_{k} = {b}")]
    NonDividingDigitCount { k: u64, q: u32, b: u32 },

    /// `r_k = b_k / q_k < 2`: levels must contract by at least 2 beyond the digits.
    #[error("ratio r_{k} = {r} is below 2 (base b_{k} = {b}, digit count q_{k} = {q})")]
    RatioTooSmall { k: u64, b: u32, q: u32, r: u32 },

    /// A base term exceeds the declared uniform bound.
    #[error("base b_{k} = {b} exceeds the declared bound {bound}")]
    BaseAboveBound { k: u64, b: u32, bound: u32 },

    /// A level or depth argument exceeds its configured cap.
    #[error("requested level {requested} exceeds the cap {cap}")]
    LevelTooDeep { requested: u64, cap: u64 },

    /// A word digit is not strictly below its level's digit count.
    #[error("digit {digit} at position {position} is not below q = {q}")]
    DigitOutOfRange { position: u64, digit: u32, q: u32 },

    /// A nonempty digit word ends in zero, so it encodes no index.
    #[error("digit word has a trailing zero")]
    TrailingZeroDigit,

    /// A decoded index does not fit in 64 bits.
    #[error("decoded index does not fit in 64 bits")]
    IndexOverflow,

    /// A bit source ran out of bits.
    #[error("bit source exhausted: bit {needed} requested, {available} available")]
    BitsExhausted { needed: u64, available: u64 },

    /// A finite shift table has no entry for the requested index.
    #[error("shift table has no entry for index {index}")]
    ShiftTableExhausted { index: u64 },

    /// A sign-word entry is neither `+1` nor `-1`.
    #[error("sign at position {position} must be +1 or -1 (got {value})")]
    InvalidSign { position: u64, value: i8 },

    /// A thinning target lies outside `(0, upper entropy dimension)`.
    #[error("thinning target {target} is not strictly between 0 and the upper entropy dimension {upper}")]
    ThinningTargetOutOfRange { target: String, upper: String },

    /// A thinning target's reduced denominator is too large for exact checks.
    #[error("thinning target denominator {denominator} exceeds the exact-arithmetic cap {cap}")]
    ThinningTargetTooFine { denominator: String, cap: u32 },

    /// An operation needed thinning data deeper than what was computed.
    #[error("thinning depth {depth} does not cover the required depth {needed}")]
    ThinningTooShallow { depth: u64, needed: u64 },

    /// Paired sequences have different lengths.
    #[error("{what}: sequences have mismatched lengths ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// The separation condition for integer Moran data fails at some level.
    #[error("separation condition fails at k = {k}: t_(k+1) n_1..n_k = {lhs} is not above {rhs}")]
    SeparationConditionViolation { k: u64, lhs: String, rhs: String },

    /// An operation needs more points than were supplied.
    #[error("{what}: needs at least {needed} points, got {got}")]
    TooFewPoints {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// A point set contains a repeated value.
    #[error("point set contains duplicate value {value}")]
    DuplicatePoints { value: String },

    /// A point slice is not sorted strictly increasing where required.
    #[error("points must be sorted strictly increasing (violation at index {index})")]
    UnsortedPoints { index: usize },

    /// A counting scale is below 2, where log-ratios degenerate.
    #[error("scale {scale} is degenerate: window lengths must be at least 2")]
    DegenerateScale { scale: String },

    /// A counting scale exceeds the span of the point set.
    #[error("scale {scale} exceeds the point-set span {span}")]
    ScaleBeyondSpan { scale: String, span: String },

    /// Scales must be supplied strictly increasing.
    #[error("scales must be strictly increasing (violation at index {index})")]
    UnsortedScales { index: usize },

    /// A frequency set has the wrong cardinality for its level.
    #[error("frequency count {got} does not match the level cardinality {expected}")]
    WrongCardinality { expected: String, got: usize },

    /// A Gram matrix dimension exceeds the configured cap.
    #[error("matrix dimension {dim} exceeds the cap {cap}")]
    MatrixTooLarge { dim: usize, cap: usize },

    /// The dyadic entropy level is too fine for the atom grid.
    #[error("entropy level {level} breaks the margin: 16 * 2^level must not exceed the atom denominator")]
    EntropyMarginViolation { level: u32 },

    /// An input collection that must be nonempty was empty.
    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    /// A materialization cap was exceeded.
    #[error("{what}: cardinality {got} exceeds the cap {cap}")]
    TooManyPoints {
        what: &'static str,
        got: String,
        cap: u64,
    },

}
