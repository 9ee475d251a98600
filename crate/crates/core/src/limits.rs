//! Guard rails and default tolerances.
//!
//! Every cap here exists to keep an exact computation from silently turning
//! into an unbounded one, and every tolerance is calibrated for `f64` with a
//! comment saying what it protects. Callers may override the caps through
//! the explicit function arguments; the constants are the defaults the CLI
//! and the test suite use.

/// Default number of leading terms checked when validating a system.
///
/// Eventually periodic rules are additionally checked over one full period,
/// so this only bounds how far block programs are probed.
pub const DEFAULT_VALIDATION_DEPTH: u64 = 64;

/// Default convergence tolerance for prefix-ratio dimension reports.
pub const DIMENSION_TOLERANCE: f64 = 1e-9;

/// Largest level for full atomic-measure materialization.
///
/// Level `n` has `Q_n` atoms; beyond 12 levels even the sparsest admissible
/// system (`q_k = 2`) exceeds 4096 atoms only mildly, but rich systems blow
/// up combinatorially, so deeper levels must go through the factored
/// transform instead.
pub const MAX_ATOM_LEVEL: u64 = 12;

/// Largest Gram matrix dimension for direct unitarity checks (`Q_n` cap).
pub const MAX_MATRIX_DIM: usize = 1024;

/// Cap on level-set materialization cardinality.
pub const MAX_LEVEL_POINTS: u64 = 1 << 20;

/// Off-diagonal and diagonal deviation tolerance for numeric unitarity.
///
/// Matrix entries are unit complex numbers from exact rational phases; the
/// only error is `sin`/`cos` rounding, so deviations sit at the 1e-15 scale
/// and 1e-9 leaves six orders of headroom.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Parseval identities at materializable levels must hit 1 within this.
pub const PARSEVAL_TOLERANCE: f64 = 1e-9;

/// Slack allowed above 1 for truncated Bessel sums (accumulated tail slop).
pub const BESSEL_SLACK: f64 = 1e-6;

/// Extra levels appended beyond the frequency's own scale when the adaptive
/// transform picks its truncation depth.
///
/// Factor `k` differs from 1 by at most `pi (q_k - 1) |xi| / B_k`; thirty
/// levels of ratio at least 4 shrink the certified tail below `4^-30`, i.e.
/// under 1e-18 relative, beyond f64 resolution.
pub const ADAPTIVE_GUARD_LEVELS: u64 = 30;

/// Early-exit threshold on partial product magnitude in adaptive transforms.
///
/// Later factors have modulus at most 1, so once the partial product drops
/// below this the final magnitude is already below it; squared contributions
/// fall under 1e-16 and cannot move any reported sum at f64 precision.
pub const MAGNITUDE_CUTOFF: f64 = 1e-8;

/// Cap on the reduced denominator of exact thinning targets.
///
/// Checkpoint comparisons raise scale products to the power of the target's
/// denominator; beyond a few thousand the exact integers become needlessly
/// large for no extra modelling power.
pub const THINNING_DENOMINATOR_CAP: u32 = 4096;

/// Default materialization cap for spectrum point counts.
pub const DEFAULT_INDEX_CAP: u64 = 100_000;

/// Levels kept when dyadic octave scale plans get very deep.
pub const MAX_OCTAVE_SCALES: usize = 40;
