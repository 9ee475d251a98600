//! Labelled-tree spectra: construction of the five families.
//!
//! ## Tree labels
//!
//! Nodes of the digit tree at depth `j` carry words `delta_1 ... delta_j`
//! with `delta_i < q_i`. A word with a nonzero digit somewhere encodes the
//! index `n` obtained by trimming its trailing zeros. A *shift sequence*
//! `{s_n}` turns the tree into a labelled tree:
//!
//! * on the word itself the label is its last digit;
//! * `l >= 1` zeros past index `n`'s word get label `q_(k+l)` exactly when
//!   `l = s_n` (the *marker* of `n`) and 0 otherwise;
//! * all-zero words are labelled 0.
//!
//! The spectrum value of `n` sums `label * rho_j` along the ray to the
//! marker:
//!
//! ```text
//! lambda_n = sum_(j<=k) c_j rho_j + B_(k + s_n) [s_n >= 1],      k = word_depth(n),
//! ```
//!
//! where `c_j` is the label of the `j`-th prefix: the digit `sigma_j` when
//! nonzero, and `q_j` when the prefix ends in a zero run of length exactly
//! `s_(n')` for the trimmed prefix index `n'` — markers of *other* indices
//! landing inside the word contribute, which is what keeps distinct rays
//! label-disjoint. The marker term equals `q_(k+s) rho_(k+s) = B_(k+s)`.
//!
//! ## The families
//!
//! | shifts | spectrum |
//! |--------|----------|
//! | `s_n = 0` | canonical `{ sum x_i rho_i }` |
//! | `s_n = n` | lacunary, `B_(k_n + n) <= lambda_n <= 2 B_(k_n + n)` |
//! | `0` on a thinning set, `n` off it | dimension exactly the thinning target |
//! | `0` on the set, `n^2 + bit` off it | a continuum of distinct spectra |
//!
//! plus the signed-digit family `lambda_n = sum sigma_j w_j rho_j` for a
//! sign word `w`, whose level sets are translates of the canonical ones.
//!
//! Order preservation (`lambda` strictly increasing where all signs are
//! `+1`), pairwise distinctness, and level-set cardinality `Q_k` are all
//! consequences of stride telescoping `sum (q_i - 1) rho_i < B_k`; the
//! tests pin each one.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::limits::MAX_LEVEL_POINTS;
use crate::shifts::{BitString, ShiftSequence, SignWord};
use crate::system::MoranSystem;
use crate::thinning::{GammaSet, ThinnedDigits};
use crate::word::{decode_word, encode_index, word_depth};
use crate::Result;

/// Which half of the regular/irregular decomposition a point belongs to.
///
/// Regular points come from unshifted indices (their values stay inside the
/// canonical window `[0, B_k)`); irregular points carry a marker term
/// `B_(k + s_n)` and run off lacunarily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumPart {
    Regular,
    Irregular,
}

/// One materialized spectrum point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumPoint {
    pub index: u64,
    #[serde(serialize_with = "crate::real::serde_big::bigint_as_decimal")]
    pub value: BigInt,
    pub part: SpectrumPart,
}

/// Family tag carried for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Canonical,
    Lacunary,
    Intermediate,
    SignWord,
    ContinuumSample,
    Custom,
}

/// How indices map to values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ValueRule {
    /// Labelled-tree evaluation driven by a shift sequence.
    TreeShift(ShiftSequence),
    /// Signed digit sums `sum sigma_j w_j rho_j`.
    SignedDigits(SignWord),
}

/// A spectrum: a system together with an index-to-value rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    system: MoranSystem,
    rule: ValueRule,
    kind: SpectrumKind,
}

impl Spectrum {
    /// The canonical spectrum: all shifts zero.
    pub fn canonical(system: MoranSystem) -> Self {
        Self { system, rule: ValueRule::TreeShift(ShiftSequence::AllZero), kind: SpectrumKind::Canonical }
    }

    /// The lacunary spectrum: `s_n = n`.
    pub fn lacunary(system: MoranSystem) -> Self {
        Self { system, rule: ValueRule::TreeShift(ShiftSequence::Identity), kind: SpectrumKind::Lacunary }
    }

    /// Intermediate-dimension spectrum: zero shifts on the thinning set.
    pub fn intermediate(system: MoranSystem, thinned: &ThinnedDigits) -> Self {
        Self {
            system,
            rule: ValueRule::TreeShift(ShiftSequence::GammaZero { gamma: thinned.gamma() }),
            kind: SpectrumKind::Intermediate,
        }
    }

    /// Signed-digit spectrum for a sign word.
    pub fn sign_word(system: MoranSystem, word: SignWord) -> Self {
        Self { system, rule: ValueRule::SignedDigits(word), kind: SpectrumKind::SignWord }
    }

    /// One sample of the continuum family: square-growth shift choices
    /// driven by `bits` off the thinning set (pass `None` to shift every
    /// index).
    pub fn continuum_sample(
        system: MoranSystem,
        thinned: Option<&ThinnedDigits>,
        bits: BitString,
    ) -> Self {
        let gamma = match thinned {
            Some(t) => t.gamma(),
            None => GammaSet::Empty,
        };
        Self {
            system,
            rule: ValueRule::TreeShift(ShiftSequence::GammaSquareChoice { gamma, bits }),
            kind: SpectrumKind::ContinuumSample,
        }
    }

    /// A custom tree spectrum from an explicit shift sequence.
    pub fn from_shifts(system: MoranSystem, shifts: ShiftSequence) -> Self {
        Self { system, rule: ValueRule::TreeShift(shifts), kind: SpectrumKind::Custom }
    }

    pub fn system(&self) -> &MoranSystem {
        &self.system
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn rule(&self) -> &ValueRule {
        &self.rule
    }

    /// The value `lambda_n`.
    ///
    /// For rank-driven shift rules this costs an `O(n)` scan; bulk callers
    /// should use [`Spectrum::points`].
    pub fn lambda(&self, n: u64) -> Result<BigInt> {
        match &self.rule {
            ValueRule::TreeShift(shifts) => {
                if n == 0 {
                    return Ok(BigInt::zero());
                }
                let s = shifts.shift_at(&self.system, n)?;
                tree_lambda(&self.system, shifts, n, s, &mut ScaleLadder::new())
            }
            ValueRule::SignedDigits(word) => Ok(signed_lambda(&self.system, word, n)),
        }
    }

    /// Regular/irregular tag of index `n`.
    pub fn part(&self, n: u64) -> Result<SpectrumPart> {
        match &self.rule {
            ValueRule::TreeShift(shifts) => {
                if n == 0 || shifts.shift_at(&self.system, n)? == 0 {
                    Ok(SpectrumPart::Regular)
                } else {
                    Ok(SpectrumPart::Irregular)
                }
            }
            ValueRule::SignedDigits(_) => Ok(SpectrumPart::Regular),
        }
    }

    /// Materializes `lambda_0 ..= lambda_(n_max)` in index order.
    ///
    /// With `value_cap`, points whose magnitude exceeds the cap are skipped
    /// — decided *before* evaluating the value whenever the marker level
    /// alone certifies `lambda_n >= 4^level > cap`, so gigantic markers
    /// (square-growth shifts) cost nothing to reject.
    pub fn points(&self, n_max: u64, value_cap: Option<&BigUint>) -> Result<Vec<SpectrumPoint>> {
        match &self.rule {
            ValueRule::TreeShift(shifts) => {
                let mut out = Vec::new();
                out.push(SpectrumPoint {
                    index: 0,
                    value: BigInt::zero(),
                    part: SpectrumPart::Regular,
                });
                let mut stream = shifts.stream(&self.system);
                let mut ladder = ScaleLadder::new();
                for n in 1..=n_max {
                    let (_, s) = stream.next_shift()?;
                    if let Some(cap) = value_cap {
                        if s >= 1 {
                            let level = word_depth(&self.system, n) + s;
                            // B_level >= 4^level: skip without materializing.
                            if 2 * level >= cap.bits() {
                                continue;
                            }
                        }
                    }
                    let value = tree_lambda(&self.system, shifts, n, s, &mut ladder)?;
                    if let Some(cap) = value_cap {
                        if value.magnitude() > cap {
                            continue;
                        }
                    }
                    out.push(SpectrumPoint {
                        index: n,
                        value,
                        part: if s == 0 { SpectrumPart::Regular } else { SpectrumPart::Irregular },
                    });
                }
                Ok(out)
            }
            ValueRule::SignedDigits(word) => {
                let mut out = Vec::with_capacity(n_max as usize + 1);
                for n in 0..=n_max {
                    let value = signed_lambda(&self.system, word, n);
                    if let Some(cap) = value_cap {
                        if value.magnitude() > cap {
                            continue;
                        }
                    }
                    out.push(SpectrumPoint { index: n, value, part: SpectrumPart::Regular });
                }
                Ok(out)
            }
        }
    }

    /// The level-`k` truncation set: values of all indices whose marker
    /// depth `word_depth(n) + s_n` fits inside `k` levels, sorted.
    ///
    /// For the canonical and signed-digit spectra this has exactly `Q_k`
    /// points and is an orthonormal frequency set for the level-`k`
    /// measure.
    pub fn level_set(&self, k: u64) -> Result<Vec<BigInt>> {
        let mut count: u128 = 1;
        for j in 1..=k {
            count *= self.system.digit_count(j) as u128;
            if count > MAX_LEVEL_POINTS as u128 {
                return Err(Error::TooManyPoints {
                    what: "spectrum level set",
                    got: count.to_string(),
                    cap: MAX_LEVEL_POINTS,
                });
            }
        }
        let values = match &self.rule {
            ValueRule::TreeShift(shifts) => {
                let mut out = vec![BigInt::zero()];
                let mut stream = shifts.stream(&self.system);
                let mut ladder = ScaleLadder::new();
                for n in 1..count as u64 {
                    let (_, s) = stream.next_shift()?;
                    if word_depth(&self.system, n) + s <= k {
                        out.push(tree_lambda(&self.system, shifts, n, s, &mut ladder)?);
                    }
                }
                out.sort();
                out
            }
            ValueRule::SignedDigits(word) => {
                // Odometer over digit tuples: q_1 x ... x q_k values.
                let mut out = vec![BigInt::zero()];
                let mut big_b = BigUint::one();
                for j in 1..=k {
                    let rho = &big_b * BigUint::from(self.system.ratio(j));
                    big_b *= BigUint::from(self.system.base(j));
                    let step = BigInt::from(rho) * BigInt::from(word.sign(j));
                    let mut next = Vec::with_capacity(out.len() * self.system.digit_count(j) as usize);
                    for x in 0..self.system.digit_count(j) {
                        let shift = &step * BigInt::from(x);
                        next.extend(out.iter().map(|v| v + &shift));
                    }
                    out = next;
                }
                out.sort();
                out
            }
        };
        for w in values.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePoints { value: w[0].to_string() });
            }
        }
        Ok(values)
    }
}

/// Lazily extended ladder of scale products `B_0 = 1, B_1, B_2, ...`.
///
/// Marker terms need `B_(k + s_n)`, and rank-driven shift rules visit marker
/// depths that grow with the index; sharing one ladder across a
/// materialization run makes the total cost of all marker terms one
/// multiplication chain instead of one chain per point.
struct ScaleLadder {
    levels: Vec<BigUint>,
}

impl ScaleLadder {
    fn new() -> Self {
        ScaleLadder { levels: vec![BigUint::one()] }
    }

    /// `B_level`, extending the ladder as needed.
    fn get(&mut self, system: &MoranSystem, level: u64) -> &BigUint {
        while (self.levels.len() as u64) <= level {
            let j = self.levels.len() as u64;
            let next = self.levels.last().expect("ladder starts at B_0") * BigUint::from(system.base(j));
            self.levels.push(next);
        }
        &self.levels[level as usize]
    }
}

/// `lambda_n` for a tree spectrum, with the shift supplied by the caller.
fn tree_lambda(
    system: &MoranSystem,
    shifts: &ShiftSequence,
    n: u64,
    s_n: u64,
    ladder: &mut ScaleLadder,
) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::zero());
    }
    let digits = encode_index(system, n);
    let k = digits.len() as u64;
    let mut lambda = BigUint::zero();
    let mut big_b = BigUint::one(); // B_(j-1)
    let mut q_prod: u128 = 1; // Q_(j-1)
    let mut last_nonzero: Option<(u64, u64)> = None; // (j', n' = n mod Q_(j'))
    for (idx, &d) in digits.iter().enumerate() {
        let j = idx as u64 + 1;
        let q_j = system.digit_count(j);
        let rho = &big_b * BigUint::from(system.ratio(j));
        let coeff: u64 = if d != 0 {
            d as u64
        } else if let Some((jp, np)) = last_nonzero {
            // A zero run of length l = j - j' below index n' carries the
            // marker label q_j exactly when l = s_(n').
            if shifts.shift_equals(system, np, j - jp)? {
                q_j as u64
            } else {
                0
            }
        } else {
            0
        };
        if coeff != 0 {
            lambda += rho * BigUint::from(coeff);
        }
        q_prod *= q_j as u128;
        if d != 0 {
            last_nonzero = Some((j, (n as u128 % q_prod) as u64));
        }
        big_b *= BigUint::from(system.base(j));
    }
    if s_n >= 1 {
        // Marker term B_(k + s_n) = q rho at the marker depth.
        lambda += ladder.get(system, k + s_n);
    }
    Ok(BigInt::from(lambda))
}

/// `lambda_n = sum sigma_j w_j rho_j` for a signed-digit spectrum.
fn signed_lambda(system: &MoranSystem, word: &SignWord, n: u64) -> BigInt {
    let digits = encode_index(system, n);
    let mut lambda = BigInt::zero();
    let mut big_b = BigUint::one();
    for (idx, &d) in digits.iter().enumerate() {
        let j = idx as u64 + 1;
        let rho = &big_b * BigUint::from(system.ratio(j));
        if d != 0 {
            lambda += BigInt::from(rho * BigUint::from(d)) * BigInt::from(word.sign(j));
        }
        big_b *= BigUint::from(system.base(j));
    }
    lambda
}

/// Label of the node `word 0^extra_zeros` in the labelled tree.
///
/// The word must be a valid index word (validated digits, nonzero tail);
/// the empty word addresses the all-zero ray, labelled 0 everywhere.
pub fn tree_map_value(
    system: &MoranSystem,
    shifts: &ShiftSequence,
    word: &[u32],
    extra_zeros: u64,
) -> Result<i64> {
    let n = decode_word(system, word)?;
    if n == 0 {
        return Ok(0);
    }
    if extra_zeros == 0 {
        return Ok(*word.last().expect("nonzero index has digits") as i64);
    }
    if shifts.shift_equals(system, n, extra_zeros)? {
        Ok(system.digit_count(word.len() as u64 + extra_zeros) as i64)
    } else {
        Ok(0)
    }
}

/// A detected labelled-tree axiom violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelViolation {
    pub index: u64,
    pub depth: u64,
    pub got: i64,
    pub rule: &'static str,
}

/// Validation report for a shift sequence's labelled tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeMappingReport {
    /// Index words enumerated (the whole tree to the requested depth).
    pub indices_checked: u64,
    /// Deepest marker among checked indices.
    pub max_marker_depth: u64,
    /// Max count of nonzero labels on any descending zero-ray (0 or 1).
    pub ray_label_bound: u32,
    pub violations: Vec<LabelViolation>,
}

/// Checks the labelled-tree axioms over every index word of depth at most
/// `depth`:
///
/// 1. the all-zero ray is labelled 0 at every level;
/// 2. each index word's own label is its last digit, and every label is
///    congruent to the node digit mod `q_j` within `[0, b_j - 2]`;
/// 3. below each index the zero-ray carries exactly one nonzero label, the
///    marker `q` at depth `word_depth + s_n` (sampled just before, at, and
///    just past the marker).
pub fn validate_tree_mapping(
    system: &MoranSystem,
    shifts: &ShiftSequence,
    depth: u64,
) -> Result<TreeMappingReport> {
    let mut count: u128 = 1;
    for j in 1..=depth {
        count *= system.digit_count(j) as u128;
        if count > MAX_LEVEL_POINTS as u128 {
            return Err(Error::TooManyPoints {
                what: "tree mapping validation",
                got: count.to_string(),
                cap: MAX_LEVEL_POINTS,
            });
        }
    }
    let mut violations = Vec::new();
    let mut max_marker_depth = 0u64;
    // Axiom 1: the all-zero ray.
    for j in 1..=depth + 2 {
        let got = tree_map_value(system, shifts, &[], j)?;
        if got != 0 {
            violations.push(LabelViolation { index: 0, depth: j, got, rule: "zero ray" });
        }
    }
    let mut stream = shifts.stream(system);
    for n in 1..count as u64 {
        let (_, s) = stream.next_shift()?;
        let word = encode_index(system, n);
        let k = word.len() as u64;
        // Axiom 2 on the word itself.
        let own = tree_map_value(system, shifts, &word, 0)?;
        if own != *word.last().expect("nonzero") as i64 {
            violations.push(LabelViolation { index: n, depth: k, got: own, rule: "word label" });
        }
        // Axiom 3 on the zero-ray below: zeros before the marker, the
        // marker itself, zeros after.
        let marker = k + s;
        max_marker_depth = max_marker_depth.max(marker);
        let mut probes: Vec<u64> = (1..=s.min(4)).collect();
        if s >= 1 {
            probes.extend([s - 1, s, s + 1, s + 2]);
        } else {
            probes.extend([1, 2, 3]);
        }
        probes.retain(|&l| l >= 1);
        probes.sort_unstable();
        probes.dedup();
        for l in probes {
            let got = tree_map_value(system, shifts, &word, l)?;
            let expect = if s >= 1 && l == s { system.digit_count(k + l) as i64 } else { 0 };
            if got != expect {
                violations.push(LabelViolation { index: n, depth: k + l, got, rule: "ray label" });
                continue;
            }
            // Congruence and range: labels are digits mod q at their level.
            let q_level = system.digit_count(k + l) as i64;
            let b_level = system.base(k + l) as i64;
            if got % q_level != 0 || got < 0 || got > b_level - 2 {
                violations.push(LabelViolation { index: n, depth: k + l, got, rule: "congruence" });
            }
        }
    }
    Ok(TreeMappingReport {
        indices_checked: count as u64 - 1,
        max_marker_depth,
        ray_label_bound: shifts.ray_label_bound(system, count as u64 - 1)?,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::SequenceRule;
    use crate::thinning::thin_digits;
    use num_rational::BigRational;

    fn sys42() -> MoranSystem {
        MoranSystem::new(SequenceRule::constant(4), SequenceRule::constant(2)).unwrap()
    }

    fn small(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn canonical_level_sets_match_hand_values() {
        let spec = Spectrum::canonical(sys42());
        // Level 2: {0, rho_1, rho_2, rho_1 + rho_2} = {0, 2, 8, 10}.
        assert_eq!(spec.level_set(2).unwrap(), small(&[0, 2, 8, 10]));
        // lambda is strictly increasing in the index.
        let pts = spec.points(64, None).unwrap();
        for w in pts.windows(2) {
            assert!(w[0].value < w[1].value);
        }
        // Frozen small values: lambda_4 = rho_3 = 32, lambda_5 = 34.
        assert_eq!(pts[4].value, BigInt::from(32));
        assert_eq!(pts[5].value, BigInt::from(34));
        assert!(pts.iter().all(|p| p.part == SpectrumPart::Regular));
    }

    #[test]
    fn canonical_equals_all_plus_sign_word() {
        let canonical = Spectrum::canonical(sys42());
        let plus = Spectrum::sign_word(sys42(), SignWord::all_plus());
        for n in 0..200 {
            assert_eq!(canonical.lambda(n).unwrap(), plus.lambda(n).unwrap());
        }
        assert_eq!(canonical.level_set(3).unwrap(), plus.level_set(3).unwrap());
    }

    #[test]
    fn sign_word_level_sets_are_translates_of_canonical() {
        // w = (+1, -1, +1, ...): level-2 values {0, 2, -8, -6} sorted is
        // {-8, -6, 0, 2} = canonical {0, 2, 8, 10} shifted by -8.
        let w = SignWord::new(vec![1, -1], vec![1]).unwrap();
        let spec = Spectrum::sign_word(sys42(), w);
        let lv = spec.level_set(2).unwrap();
        assert_eq!(lv, small(&[-8, -6, 0, 2]));
        let canonical = Spectrum::canonical(sys42()).level_set(2).unwrap();
        let shift = &lv[0] - &canonical[0];
        for (a, b) in lv.iter().zip(&canonical) {
            assert_eq!(a - b, shift);
        }
    }

    #[test]
    fn lacunary_values_sandwich_between_markers() {
        let spec = Spectrum::lacunary(sys42());
        // lambda_1 = rho_1 + B_2 = 2 + 16 = 18.
        assert_eq!(spec.lambda(1).unwrap(), BigInt::from(18));
        // lambda_2 = rho_2 + B_4 = 8 + 256 = 264.
        assert_eq!(spec.lambda(2).unwrap(), BigInt::from(264));
        // Sandwich B_(k+n) <= lambda_n <= 2 B_(k+n) and ratio >= 2.
        let pts = spec.points(64, None).unwrap();
        let mut prev = BigInt::one();
        for p in pts.iter().skip(1) {
            let k = word_depth(spec.system(), p.index);
            let level = k + p.index;
            let mut big_b = BigUint::one();
            for j in 1..=level {
                big_b *= BigUint::from(spec.system().base(j));
            }
            let b = BigInt::from(big_b);
            assert!(p.value >= b && p.value <= 2 * &b, "n = {}", p.index);
            assert!(&p.value >= &(2 * &prev), "ratio drop at n = {}", p.index);
            prev = p.value.clone();
            assert_eq!(p.part, SpectrumPart::Irregular);
        }
    }

    #[test]
    fn cross_ray_markers_contribute_inside_words() {
        // Identity shifts, n = 5 = (1, 0, 1): the zero at position 2 sits
        // one step below index 1 whose shift is 1, so c_2 = q_2 = 2:
        // lambda_5 = 2 + 2*8 + 32 + B_8 = 65586.
        let spec = Spectrum::lacunary(sys42());
        assert_eq!(spec.lambda(5).unwrap(), BigInt::from(65586u64));
    }

    #[test]
    fn intermediate_spectrum_splits_along_gamma() {
        let s = sys42();
        let thinned = thin_digits(&s, &BigRational::new(1.into(), 4.into()), 40).unwrap();
        let spec = Spectrum::intermediate(s.clone(), &thinned);
        // n = 4 = (0,0,1) lies in Gamma (digits below (1,2,2)): regular,
        // lambda_4 = rho_3 = 32. n = 5 = (1,0,1) is out: irregular.
        assert_eq!(spec.part(4).unwrap(), SpectrumPart::Regular);
        assert_eq!(spec.lambda(4).unwrap(), BigInt::from(32));
        assert_eq!(spec.part(5).unwrap(), SpectrumPart::Irregular);
        assert_eq!(spec.lambda(5).unwrap(), BigInt::from(65586u64));
        // Regular part at small indices matches the thinned integer Moran
        // set values.
        let pts = spec.points(200, None).unwrap();
        let regular: Vec<&SpectrumPoint> =
            pts.iter().filter(|p| p.part == SpectrumPart::Regular).collect();
        assert!(regular.len() > 1);
        for p in &regular {
            // Regular values stay inside the canonical window.
            let k = word_depth(&s, p.index);
            let mut big_b = BigUint::one();
            for j in 1..=k {
                big_b *= BigUint::from(s.base(j));
            }
            assert!(p.value < BigInt::from(big_b));
        }
    }

    #[test]
    fn value_cap_skips_giant_markers_cheaply() {
        // Square-growth shifts produce astronomically deep markers; the
        // cap must reject them without materializing any value.
        let bits = BitString::from_seed(11, 4096);
        let spec = Spectrum::continuum_sample(sys42(), None, bits);
        let cap = BigUint::from(1u64 << 40);
        let pts = spec.points(4000, Some(&cap)).unwrap();
        // Only indices with k_n + n^2 + 1 <= 20 levels can fit: n <= 4.
        assert!(pts.len() <= 5, "{} points", pts.len());
        for p in &pts {
            assert!(p.value.magnitude() <= &cap);
        }
    }

    #[test]
    fn tree_mapping_axioms_hold_for_all_families() {
        let s = sys42();
        let thinned = thin_digits(&s, &BigRational::new(1.into(), 4.into()), 20).unwrap();
        let rules = [
            ShiftSequence::AllZero,
            ShiftSequence::Identity,
            ShiftSequence::GammaZero { gamma: thinned.gamma() },
            ShiftSequence::GammaSquareChoice {
                gamma: thinned.gamma(),
                bits: BitString::from_seed(5, 512),
            },
        ];
        for rule in rules {
            let report = validate_tree_mapping(&s, &rule, 6).unwrap();
            assert_eq!(report.indices_checked, 63);
            assert!(report.violations.is_empty(), "{:?}", report.violations);
            assert!(report.ray_label_bound <= 1);
        }
    }

    #[test]
    fn table_shifts_round_trip_through_tree_map_value() {
        let s = sys42();
        let table = ShiftSequence::Table(vec![2, 0, 1]);
        // n = 1: marker at depth 1 + 2 = 3 labelled q = 2.
        assert_eq!(tree_map_value(&s, &table, &[1], 2).unwrap(), 2);
        assert_eq!(tree_map_value(&s, &table, &[1], 1).unwrap(), 0);
        assert_eq!(tree_map_value(&s, &table, &[1], 3).unwrap(), 0);
        // n = 2 has shift 0: no marker on its ray.
        assert_eq!(tree_map_value(&s, &table, &[0, 1], 1).unwrap(), 0);
        // Beyond the table: error.
        assert!(tree_map_value(&s, &table, &[0, 0, 1], 1).is_err());
    }

    #[test]
    fn level_set_rejects_oversized_levels() {
        let spec = Spectrum::canonical(sys42());
        assert!(matches!(
            spec.level_set(40),
            Err(Error::TooManyPoints { .. })
        ));
    }
}
