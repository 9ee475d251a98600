//! # moran-spectra
//!
//! Exact construction and verification of exponential-basis spectra for
//! Moran-type infinite convolution measures on the line.
//!
//! ## The measure
//!
//! Two integer sequences drive everything: bases `b_k` and digit counts
//! `q_k`, subject to `q_k >= 2`, `q_k | b_k`, and contraction ratios
//! `r_k = b_k / q_k >= 2` (which forces `b_k >= 4`), with `sup b_k` finite.
//! The measure is the infinite convolution
//!
//! ```text
//! mu = delta_{D_1 / B_1} * delta_{D_2 / B_2} * ...     D_k = {0, ..., q_k - 1}
//! ```
//!
//! where `B_k = b_1 ... b_k`. Its Fourier transform factors over levels, its
//! integer zero set is a union of explicit divisibility classes, and the
//! support dimensions are log-ratios of the scale ladder `(B_k, Q_k, rho_k)`
//! with `Q_k = q_1 ... q_k` and `rho_k = r_k B_{k-1}`.
//!
//! ## The spectra
//!
//! Countable integer sets `Lambda = {lambda_n}` making `{e^(2 pi i lambda x)}`
//! orthonormal and complete in `L^2(mu)`. All families here come from labelled
//! digit trees driven by a shift sequence `{s_n}`:
//!
//! * all-zero shifts: the canonical spectrum `{sum x_i rho_i : x_i < q_i}`;
//! * identity shifts: a 2-lacunary spectrum of Beurling dimension 0;
//! * zero shifts on a thinned index set: spectra whose Beurling dimension is
//!   any prescribed value `t` strictly between 0 and the entropy dimension;
//! * sign words `w_i in {+1, -1}`: spectra `{sum x_i w_i rho_i}` mixing signs;
//! * square-growth shift choices driven by a bit string: a continuum of
//!   mutually distinct spectra.
//!
//! ## Design
//!
//! * **Exact lanes stay exact.** Scale products, spectrum values, zero-set
//!   membership, thinning checkpoints, and separation conditions use
//!   arbitrary-precision integers and rationals; no float ever decides an
//!   orthogonality or checkpoint question.
//! * **Floats are generic.** Everything that genuinely lives in the reals
//!   (Fourier magnitudes, dimension and entropy estimates, Gram deviations)
//!   is generic over the [`Real`] scalar trait with `f64` aliases at the
//!   crate root.
//! * **Estimates are cross-checked.** Dimension counting runs against closed
//!   formulas, transform products against atom sums, unitary matrices
//!   against exact residue tests.
//!
//! ## Module map
//!
//! | module | contents |
//! |--------|----------|
//! | [`seq`] | total sequence rules: periodic, prefix + periodic, block programs |
//! | [`system`] | validated `(b, q)` systems, scale ladder, entropy/Hausdorff dimension reports |
//! | [`word`] | mixed-radix index codec |
//! | [`shifts`] | bit sources, sign words, shift sequences |
//! | [`thinning`] | digit-count thinning to a target dimension, index thinning sets |
//! | [`spectrum`] | labelled-tree spectra, the five families, truncation views |
//! | [`ims`] | integer Moran point sets, separation condition, dimension formula |
//! | [`measure`] | finite-level atomic measures, support bounds |
//! | [`fourier`] | transform factors, tail bounds, integer zero set, non-decay probe |
//! | [`dimension`] | window counting, Beurling estimates, lacunarity checks |
//! | [`entropy`] | dyadic partition entropy ratios |
//! | [`verify`] | orthogonality, unitarity, Parseval completeness, separation |
//! | [`limits`] | the numeric guard rails and default tolerances |

pub mod dimension;
pub mod entropy;
pub mod error;
pub mod fourier;
pub mod ims;
pub mod limits;
pub mod measure;
pub mod real;
pub mod seq;
pub mod shifts;
pub mod spectrum;
pub mod system;
pub mod thinning;
pub mod verify;
pub mod word;

pub use error::Error;
pub use real::{LogRatio, Real};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Concrete `f64` instantiations of the generic report types.
pub mod f64_aliases {
    /// Truncated Fourier transform value with certified tail bound.
    pub type FourierValue = crate::fourier::FourierValue<f64>;
    /// Prefix-ratio dimension report (entropy or Hausdorff mode).
    pub type DimensionReport = crate::system::DimensionReport<f64>;
    /// Window-counting Beurling dimension estimate.
    pub type DimensionEstimate = crate::dimension::DimensionEstimate<f64>;
    /// Closed-formula dimension evaluation for integer Moran data.
    pub type FormulaDimension = crate::ims::FormulaDimension<f64>;
    /// Dyadic partition entropy table.
    pub type EntropyRow = crate::entropy::EntropyRow<f64>;
    /// Gram-matrix unitarity report.
    pub type UnitarityReport = crate::verify::UnitarityReport<f64>;
    /// Parseval completeness profile.
    pub type CompletenessProfile = crate::verify::CompletenessProfile<f64>;
    /// Zero-set separation report for sign-word truncations.
    pub type SeparationReport = crate::verify::SeparationReport<f64>;
}
