//! Integer Moran point sets and their dimension formula.
//!
//! Data `({n_k}, {m_k}, {t_k})` of positive integers generates the nested
//! finite sets
//!
//! ```text
//! M_k = { sum_(i<=k) x_i t_i n_1 ... n_(i-1) : 0 <= x_i < m_i },
//! ```
//!
//! unions of translated copies scaled by `n_1 ... n_(k-1)`. Under the
//! separation condition
//!
//! ```text
//! t_(k+1) n_1 ... n_k  >  sum_(i<=k) (m_i - 1) t_i n_1 ... n_(i-1)      (all k)
//! ```
//!
//! each level's translates stay disjoint, the sets have exactly
//! `m_1 ... m_k` points, and the upper Beurling dimension of the limit set
//! is the closed form
//!
//! ```text
//! limsup_k  ln(m_1 ... m_k) / ln(m_k t_k n_1 ... n_(k-1)).
//! ```
//!
//! The canonical spectrum of a Moran system is the special case
//! `(n, m, t) = (b, q, r)`, and thinned spectra's regular parts are the
//! case `(b, q', r)`; both inherit the separation condition from
//! `r_(k+1) B_k >= 2 B_k > sum (q_i - 1) rho_i`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::real::{ln_big, LogRatio, Real};
use crate::system::MoranSystem;
use crate::thinning::ThinnedDigits;
use crate::Result;

/// Generating data for an integer Moran set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerMoranData {
    /// Scale factors `n_k >= 1`.
    pub n_seq: Vec<u32>,
    /// Branch counts `m_k >= 1`.
    pub m_seq: Vec<u32>,
    /// Strides `t_k >= 1`.
    pub t_seq: Vec<u32>,
    /// Closed-form dimension when the data is a periodic repetition.
    pub exact_dim: Option<LogRatio>,
}

impl IntegerMoranData {
    /// Validates positivity and matching lengths.
    pub fn new(n_seq: Vec<u32>, m_seq: Vec<u32>, t_seq: Vec<u32>) -> Result<Self> {
        if n_seq.len() != m_seq.len() || n_seq.len() != t_seq.len() {
            return Err(Error::LengthMismatch {
                what: "integer Moran data",
                left: n_seq.len(),
                right: m_seq.len().max(t_seq.len()),
            });
        }
        if n_seq.is_empty() {
            return Err(Error::EmptyInput { what: "integer Moran data" });
        }
        for (i, ((&n, &m), &t)) in n_seq.iter().zip(&m_seq).zip(&t_seq).enumerate() {
            if n == 0 || m == 0 || t == 0 {
                return Err(Error::NonPositiveTerm { position: i as u64 + 1 });
            }
        }
        Ok(Self { n_seq, m_seq, t_seq, exact_dim: None })
    }

    /// One period `(n, m, t)` repeated `periods` times, with the exact
    /// dimension `ln(prod m) / ln(prod n)` attached when `prod n >= 2`.
    pub fn from_periodic(
        n_period: &[u32],
        m_period: &[u32],
        t_period: &[u32],
        periods: usize,
    ) -> Result<Self> {
        let rep = |xs: &[u32]| xs.repeat(periods);
        let mut data = Self::new(rep(n_period), rep(m_period), rep(t_period))?;
        let m_prod: BigUint = m_period.iter().map(|&m| BigUint::from(m)).product();
        let n_prod: BigUint = n_period.iter().map(|&n| BigUint::from(n)).product();
        if n_prod >= BigUint::from(2u32) {
            data.exact_dim = Some(LogRatio::new(m_prod, n_prod));
        }
        Ok(data)
    }

    /// The canonical spectrum's data `(b, q, r)` down to `depth`.
    pub fn from_system(system: &MoranSystem, depth: u64) -> Result<Self> {
        let ks = 1..=depth;
        let mut data = Self::new(
            ks.clone().map(|k| system.base(k)).collect(),
            ks.clone().map(|k| system.digit_count(k)).collect(),
            ks.map(|k| system.ratio(k)).collect(),
        )?;
        data.exact_dim = system.exact_prefix_ratio_limit();
        Ok(data)
    }

    /// A thinned spectrum's regular-part data `(b, q', r)`.
    pub fn from_thinned(system: &MoranSystem, thinned: &ThinnedDigits) -> Result<Self> {
        let depth = thinned.depth();
        let ks = 1..=depth;
        Self::new(
            ks.clone().map(|k| system.base(k)).collect(),
            (1..=depth).map(|k| thinned.qprime_at(k)).collect(),
            ks.map(|k| system.ratio(k)).collect(),
        )
    }

    /// Data depth.
    pub fn depth(&self) -> u64 {
        self.n_seq.len() as u64
    }

    /// Exact separation-condition check for every `k < depth`.
    ///
    /// Errs with the first violated level and both exact sides.
    pub fn validate_separation(&self) -> Result<()> {
        let mut scale = BigUint::one(); // n_1 ... n_k
        let mut reach = BigUint::zero(); // sum (m_i - 1) t_i n_1 ... n_(i-1)
        for k in 0..self.n_seq.len() {
            reach += BigUint::from(self.m_seq[k] - 1) * BigUint::from(self.t_seq[k]) * &scale;
            scale *= BigUint::from(self.n_seq[k]);
            if k + 1 < self.n_seq.len() {
                let lhs = BigUint::from(self.t_seq[k + 1]) * &scale;
                if lhs <= reach {
                    return Err(Error::SeparationConditionViolation {
                        k: k as u64 + 1,
                        lhs: lhs.to_string(),
                        rhs: reach.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The level-`depth` point set, sorted; exactly `m_1 ... m_depth`
    /// points once the separation condition holds.
    ///
    /// `cap` bounds the cardinality before any point is materialized.
    pub fn points(&self, cap: u64) -> Result<Vec<BigInt>> {
        self.validate_separation()?;
        let count: BigUint = self.m_seq.iter().map(|&m| BigUint::from(m)).product();
        if count > BigUint::from(cap) {
            return Err(Error::TooManyPoints {
                what: "integer Moran set",
                got: count.to_string(),
                cap,
            });
        }
        // Build level by level: each level adds x * t_k * n_1...n_(k-1).
        let mut points = vec![BigInt::zero()];
        let mut scale = BigUint::one();
        for k in 0..self.n_seq.len() {
            let stride = BigInt::from(BigUint::from(self.t_seq[k]) * &scale);
            let mut next = Vec::with_capacity(points.len() * self.m_seq[k] as usize);
            for x in 0..self.m_seq[k] {
                let shift = &stride * BigInt::from(x);
                next.extend(points.iter().map(|p| p + &shift));
            }
            points = next;
            scale *= BigUint::from(self.n_seq[k]);
        }
        points.sort();
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]), "separation keeps points distinct");
        Ok(points)
    }

    /// Natural window scales `h_k = sum_(i<=k) (m_i - 1) t_i n_1...n_(i-1)`:
    /// the diameter of level `k`, inside which the set has exactly
    /// `m_1 ... m_k` points. Deduplicated and filtered to `h >= 2`.
    pub fn natural_scales(&self) -> Vec<BigUint> {
        let mut scale = BigUint::one();
        let mut reach = BigUint::zero();
        let mut out: Vec<BigUint> = Vec::with_capacity(self.n_seq.len());
        for k in 0..self.n_seq.len() {
            reach += BigUint::from(self.m_seq[k] - 1) * BigUint::from(self.t_seq[k]) * &scale;
            scale *= BigUint::from(self.n_seq[k]);
            if reach >= BigUint::from(2u32) && out.last() != Some(&reach) {
                out.push(reach.clone());
            }
        }
        out
    }

    /// Closed-formula dimension samples
    /// `ln(m_1...m_k) / ln(m_k t_k n_1...n_(k-1))` for each level.
    pub fn formula_samples<F: Real>(&self) -> Vec<FormulaSample<F>> {
        let mut m_prod = BigUint::one();
        let mut scale = BigUint::one();
        let mut out = Vec::with_capacity(self.n_seq.len());
        for k in 0..self.n_seq.len() {
            m_prod *= BigUint::from(self.m_seq[k]);
            let den = BigUint::from(self.m_seq[k]) * BigUint::from(self.t_seq[k]) * &scale;
            scale *= BigUint::from(self.n_seq[k]);
            if den < BigUint::from(2u32) {
                continue; // a log-1 denominator carries no information
            }
            out.push(FormulaSample {
                k: k as u64 + 1,
                value: F::from_f64_lossy(ln_big(&m_prod) / ln_big(&den)),
            });
        }
        out
    }

    /// Headline formula dimension: limsup read as the max over the last
    /// quarter of the per-level samples.
    pub fn formula_dimension<F: Real>(&self) -> FormulaDimension<F> {
        let samples = self.formula_samples::<F>();
        assert!(!samples.is_empty(), "formula needs at least one usable level");
        let from = samples.len() - (samples.len() / 4).max(1);
        let headline = samples[from..]
            .iter()
            .map(|s| s.value)
            .fold(F::neg_infinity(), F::max);
        FormulaDimension {
            headline,
            exact: self.exact_dim.clone(),
            samples,
        }
    }
}

/// One per-level closed-formula sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormulaSample<F> {
    pub k: u64,
    pub value: F,
}

/// Closed-formula dimension report.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaDimension<F> {
    /// Max over the last quarter of levels: the limsup read.
    pub headline: F,
    /// Exact value for periodic data.
    pub exact: Option<LogRatio>,
    pub samples: Vec<FormulaSample<F>>,
}
