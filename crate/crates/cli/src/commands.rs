//! Command execution: one function per subcommand, each materializing what
//! it needs from the resolved parameters, writing artifacts, and reporting
//! whether any mathematical check failed.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use moran_spectra::dimension::{beurling_estimate, lacunary_check, window_counts, ScalePlan};
use moran_spectra::entropy::entropy_estimate;
use moran_spectra::fourier::fourier_nondecay_probe;
use moran_spectra::ims::IntegerMoranData;
use moran_spectra::limits::UNITARITY_TOLERANCE;
use moran_spectra::measure::{level_measure, scaled_support_max};
use moran_spectra::shifts::{BitString, SignWord};
use moran_spectra::spectrum::{Spectrum, SpectrumPart};
use moran_spectra::system::MoranSystem;
use moran_spectra::thinning::{thin_digits, ThinnedDigits};
use moran_spectra::verify::{
    compatible_pair_check, completeness_profile, level_unitarity, pairwise_orthogonal,
    separation_check,
};

use crate::artifacts::ArtifactWriter;
use crate::config::{parse_signs, parse_target, parse_u32_list, RunConfig, SystemSpec};
use crate::CliError;

/// Whether the run's mathematical checks all held.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
}

fn default_thin_depth() -> u64 {
    400
}
fn default_sign_period() -> String {
    "+,-".into()
}
fn default_seed() -> u64 {
    7
}
fn default_bits() -> u64 {
    1 << 15
}

/// Family selection shared by `spectrum gen`, `spectrum verify`, and
/// `dim beurling`; all defaults are echoed into the run config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyParams {
    /// canonical | lacunary | intermediate | sign-word | continuum.
    pub kind: String,
    /// Materialize the full level set (canonical and sign-word only).
    pub level: Option<u64>,
    /// Materialize indices 0..=max_index instead.
    pub max_index: Option<u64>,
    /// Thinning target `a/b` for intermediate (and optionally continuum).
    pub target: Option<String>,
    pub thin_depth: u64,
    pub sign_prefix: String,
    pub sign_period: String,
    /// Seed for the continuum family's bit string.
    pub seed: u64,
    /// Bit-string length for the continuum family.
    pub bits: u64,
    /// Drop values at or above `B_(cap_level)`.
    pub cap_level: Option<u64>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            kind: "canonical".into(),
            level: None,
            max_index: None,
            target: None,
            thin_depth: default_thin_depth(),
            sign_prefix: String::new(),
            sign_period: default_sign_period(),
            seed: default_seed(),
            bits: default_bits(),
            cap_level: None,
        }
    }
}

/// One emitted spectrum point; values as decimal strings everywhere.
#[derive(Debug, Clone, Serialize)]
pub struct PointRow {
    pub index: u64,
    pub value: String,
    pub part: &'static str,
}

pub struct Materialized {
    pub rows: Vec<PointRow>,
    pub sorted_values: Vec<BigInt>,
    pub level: Option<u64>,
    pub thinned: Option<ThinnedDigits>,
}

fn part_name(part: SpectrumPart) -> &'static str {
    match part {
        SpectrumPart::Regular => "regular",
        SpectrumPart::Irregular => "irregular",
    }
}

/// Builds the configured family. Level sets serve the canonical and
/// sign-word kinds; the index-enumerated kinds run 0..=max_index.
pub fn materialize(system: &MoranSystem, params: &FamilyParams) -> Result<Materialized, CliError> {
    if params.level.is_some() && params.max_index.is_some() {
        return Err(CliError::Config("give either level or max_index, not both".into()));
    }
    let cap: Option<BigUint> = params.cap_level.map(|k| system.ladder_at(k).big_b);

    let thinned = match params.kind.as_str() {
        "intermediate" => {
            let target = parse_target(params.target.as_deref().unwrap_or("1/4"))?;
            Some(thin_digits(system, &target, params.thin_depth).map_err(CliError::Validation)?)
        }
        "continuum" => match &params.target {
            Some(text) => {
                let target = parse_target(text)?;
                Some(thin_digits(system, &target, params.thin_depth).map_err(CliError::Validation)?)
            }
            None => None,
        },
        _ => None,
    };

    let spectrum = match params.kind.as_str() {
        "canonical" => Spectrum::canonical(system.clone()),
        "lacunary" => Spectrum::lacunary(system.clone()),
        "intermediate" => {
            Spectrum::intermediate(system.clone(), thinned.as_ref().expect("thinned above"))
        }
        "sign-word" => {
            let word = SignWord::new(parse_signs(&params.sign_prefix)?, parse_signs(&params.sign_period)?)
                .map_err(CliError::Validation)?;
            Spectrum::sign_word(system.clone(), word)
        }
        "continuum" => Spectrum::continuum_sample(
            system.clone(),
            thinned.as_ref(),
            BitString::from_seed(params.seed, params.bits),
        ),
        other => {
            return Err(CliError::Config(format!(
                "unknown kind `{}` (canonical, lacunary, intermediate, sign-word, continuum)",
                other
            )))
        }
    };

    let level_kind = matches!(params.kind.as_str(), "canonical" | "sign-word");
    let use_level = match (params.level, params.max_index) {
        (Some(_), _) if !level_kind => {
            return Err(CliError::Config(format!(
                "kind `{}` is index-enumerated; use max_index",
                params.kind
            )))
        }
        (Some(k), _) => Some(k),
        (None, Some(_)) => None,
        // Defaults: full level 8 where level sets exist, 4096 indices else.
        (None, None) if level_kind => Some(8),
        (None, None) => None,
    };

    let (rows, level) = match use_level {
        Some(k) => {
            let values = spectrum.level_set(k).map_err(CliError::Validation)?;
            let rows: Vec<PointRow> = values
                .iter()
                .enumerate()
                .map(|(i, v)| PointRow { index: i as u64, value: v.to_string(), part: "regular" })
                .collect();
            (rows, Some(k))
        }
        None => {
            let n_max = params.max_index.unwrap_or(4096);
            let points = spectrum.points(n_max, cap.as_ref()).map_err(CliError::Validation)?;
            let rows = points
                .iter()
                .map(|p| PointRow {
                    index: p.index,
                    value: p.value.to_string(),
                    part: part_name(p.part),
                })
                .collect();
            (rows, None)
        }
    };

    let mut sorted_values: Vec<BigInt> =
        rows.iter().map(|r| r.value.parse().expect("round-trips")).collect();
    sorted_values.sort();

    Ok(Materialized { rows, sorted_values, level, thinned })
}

fn point_csv(writer: &mut ArtifactWriter, rows: &[PointRow]) -> Result<(), CliError> {
    let lines: Vec<String> =
        rows.iter().map(|r| format!("{},{},{}", r.index, r.value, r.part)).collect();
    writer.write_csv("index,value,part", &lines)?;
    Ok(())
}

// ---------------------------------------------------------------- dims --

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimsParams {
    pub depth: u64,
}

impl Default for DimsParams {
    fn default() -> Self {
        DimsParams { depth: 64 }
    }
}

pub fn dims(
    spec: &SystemSpec,
    params: &DimsParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("dims", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "dims", &config.run_id())?;

    let entropy = system.upper_entropy_dim::<f64>(params.depth);
    let hausdorff = system.hausdorff_support_dim::<f64>(params.depth);
    let exact = system.exact_prefix_ratio_limit();
    let payload = serde_json::json!({
        "entropy": entropy,
        "hausdorff": hausdorff,
        "exact_prefix_ratio": exact,
    });
    writer.write_jsonl(&config, &[payload])?;

    let rows: Vec<String> = system
        .prefix_ratios::<f64>(params.depth)
        .iter()
        .map(|s| format!("{},{}", s.k, s.ratio))
        .collect();
    writer.write_csv("k,prefix_ratio", &rows)?;

    report(&writer);
    println!(
        "entropy {:.6} (converged: {}), hausdorff {:.6} (converged: {})",
        entropy.value, entropy.converged, hausdorff.value, hausdorff.converged
    );
    Ok(Outcome::Pass)
}

// -------------------------------------------------------- spectrum gen --

pub fn spectrum_gen(
    spec: &SystemSpec,
    params: &FamilyParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("spectrum gen", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "spectrum gen", &config.run_id())?;

    let set = materialize(&system, params)?;
    writer.write_jsonl(&config, &set.rows)?;
    point_csv(&mut writer, &set.rows)?;

    report(&writer);
    match set.level {
        Some(k) => println!("{} points ({}, level {})", set.rows.len(), params.kind, k),
        None => println!("{} points ({})", set.rows.len(), params.kind),
    }
    Ok(Outcome::Pass)
}

// ----------------------------------------------------- spectrum verify --

fn default_check() -> String {
    "orthogonality".into()
}
fn default_kmax() -> u64 {
    20
}
fn default_unitarity_levels() -> u64 {
    5
}
fn default_xi() -> String {
    "37/100".into()
}
fn default_min_levels() -> u64 {
    40
}
fn default_threshold() -> f64 {
    0.999
}

// No deny_unknown_fields here: it cannot combine with flatten, and the
// flattened FamilyParams already rejects stray keys itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyParams {
    /// orthogonality | unitarity | completeness | separation.
    pub check: String,
    #[serde(flatten)]
    pub family: FamilyParams,
    /// Largest single level checked for compatible pairs (unitarity).
    pub kmax: u64,
    /// Deepest full level whose exponential matrix is checked (unitarity).
    pub unitarity_levels: u64,
    /// Base frequency `a/b` for the completeness profile.
    pub xi: String,
    /// Tail-certificate depth for the completeness profile.
    pub min_levels: u64,
    /// Completeness mass the profile must reach.
    pub threshold: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            check: default_check(),
            family: FamilyParams::default(),
            kmax: default_kmax(),
            unitarity_levels: default_unitarity_levels(),
            xi: default_xi(),
            min_levels: default_min_levels(),
            threshold: default_threshold(),
        }
    }
}

pub fn spectrum_verify(
    spec: &SystemSpec,
    params: &VerifyParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("spectrum verify", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "spectrum verify", &config.run_id())?;

    let outcome = match params.check.as_str() {
        "orthogonality" => {
            let set = materialize(&system, &params.family)?;
            let report_ =
                pairwise_orthogonal(&system, &set.sorted_values).map_err(CliError::Validation)?;
            let failures = report_.failure_count;
            writer.write_jsonl(&config, &[&report_])?;
            println!(
                "orthogonality: {} points, {} pairs, {} failures",
                report_.points, report_.pairs, failures
            );
            if failures == 0 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{} non-orthogonal pairs", failures))
            }
        }
        "unitarity" => {
            let mut reports = Vec::new();
            let mut csv = Vec::new();
            let mut worst = 0.0f64;
            let mut all_exact = true;
            for k in 1..=params.kmax {
                for sign in [1i8, -1] {
                    let r = compatible_pair_check::<f64>(&system, k, sign)
                        .map_err(CliError::Validation)?;
                    worst = worst.max(r.max_offdiag);
                    all_exact &= r.exact_pass;
                    csv.push(format!("{},{},{},{}", k, sign, r.max_offdiag, r.exact_pass));
                    reports.push(r);
                }
            }
            for n in 1..=params.unitarity_levels {
                let frequencies =
                    Spectrum::canonical(system.clone()).level_set(n).map_err(CliError::Validation)?;
                let r = level_unitarity::<f64>(&system, &frequencies, n)
                    .map_err(CliError::Validation)?;
                worst = worst.max(r.max_offdiag);
                all_exact &= r.exact_pass;
                csv.push(format!("{},level,{},{}", n, r.max_offdiag, r.exact_pass));
                reports.push(r);
            }
            writer.write_jsonl(&config, &reports)?;
            writer.write_csv("k,sign,max_offdiag,exact_pass", &csv)?;
            println!("unitarity: {} checks, worst off-diagonal {:.3e}", reports.len(), worst);
            if all_exact && worst < UNITARITY_TOLERANCE {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("worst off-diagonal {:.3e}", worst))
            }
        }
        "completeness" => {
            let set = materialize(&system, &params.family)?;
            let xi = parse_target(&params.xi)?;
            let profile =
                completeness_profile::<f64>(&system, &set.sorted_values, &xi, params.min_levels)
                    .map_err(CliError::Validation)?;
            let csv: Vec<String> = profile
                .checkpoints
                .iter()
                .map(|p| format!("{},{}", p.count, p.sum))
                .collect();
            writer.write_jsonl(&config, &[&profile])?;
            writer.write_csv("count,sum", &csv)?;
            println!(
                "completeness at xi={}: {:.9} over {} points (bessel ok: {})",
                params.xi, profile.final_sum, profile.count, profile.bessel_ok
            );
            if profile.bessel_ok && profile.final_sum >= params.threshold {
                Outcome::Pass
            } else {
                Outcome::Fail(format!(
                    "profile reached {:.9} < {}",
                    profile.final_sum, params.threshold
                ))
            }
        }
        "separation" => {
            let set = materialize(&system, &params.family)?;
            let level = set.level.ok_or_else(|| {
                CliError::Config("separation check needs a level set; pass level".into())
            })?;
            let r = separation_check::<f64>(&system, &set.sorted_values, level)
                .map_err(CliError::Validation)?;
            let pass = r.gap_at_least_first_stride;
            writer.write_jsonl(&config, &[&r])?;
            println!(
                "separation at level {}: min gap {}, inside window: {}",
                level, r.min_gap, r.inside_window
            );
            if pass {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("min gap {} below the first stride", r.min_gap))
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown check `{}` (orthogonality, unitarity, completeness, separation)",
                other
            )))
        }
    };

    report(&writer);
    Ok(outcome)
}

// -------------------------------------------------------- dim beurling --

fn default_scales() -> String {
    "dyadic".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BeurlingParams {
    #[serde(flatten)]
    pub family: FamilyParams,
    /// dyadic | natural.
    pub scales: String,
}

impl Default for BeurlingParams {
    fn default() -> Self {
        BeurlingParams { family: FamilyParams::default(), scales: default_scales() }
    }
}

pub fn dim_beurling(
    spec: &SystemSpec,
    params: &BeurlingParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("dim beurling", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "dim beurling", &config.run_id())?;

    let set = materialize(&system, &params.family)?;
    let plan = match params.scales.as_str() {
        "dyadic" => ScalePlan::dyadic(&set.sorted_values).map_err(CliError::Validation)?,
        "natural" => {
            let level = set.level.ok_or_else(|| {
                CliError::Config("natural scales need a level set; pass level".into())
            })?;
            ScalePlan::natural(&system, level).map_err(CliError::Validation)?
        }
        other => {
            return Err(CliError::Config(format!("unknown scales `{}` (dyadic, natural)", other)))
        }
    };
    let estimate =
        beurling_estimate::<f64>(&set.sorted_values, &plan).map_err(CliError::Validation)?;
    let lacunarity = lacunary_check::<f64>(&set.sorted_values, 2, 1).ok();
    // The closed formula applies whenever the family's regular part comes
    // from a digit thinning.
    let formula = match &set.thinned {
        Some(thin) => Some(
            IntegerMoranData::from_thinned(&system, thin)
                .map_err(CliError::Validation)?
                .formula_dimension::<f64>(),
        ),
        None => None,
    };

    let payload = serde_json::json!({
        "estimate": estimate,
        "formula": formula,
        "lacunarity": lacunarity,
    });
    writer.write_jsonl(&config, &[payload])?;
    let csv: Vec<String> = estimate
        .rows
        .iter()
        .map(|r| format!("{},{},{}", r.scale, r.count, r.ratio))
        .collect();
    writer.write_csv("scale,count,ratio", &csv)?;

    report(&writer);
    match &formula {
        Some(f) => println!(
            "headline {:.6}, slope {:.6}, formula {:.6}",
            estimate.headline, estimate.slope, f.headline
        ),
        None => println!("headline {:.6}, slope {:.6}", estimate.headline, estimate.slope),
    }
    Ok(Outcome::Pass)
}

// --------------------------------------------------------- dim entropy --

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyParams {
    /// Convolution level whose measure is binned.
    pub level: u64,
    /// Truncation level of the reference measure.
    pub max_level: u64,
    /// Dyadic resolutions, comma-separated.
    pub resolutions: String,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams { level: 12, max_level: 12, resolutions: "8,16".into() }
    }
}

pub fn dim_entropy(
    spec: &SystemSpec,
    params: &EntropyParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("dim entropy", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "dim entropy", &config.run_id())?;

    let resolutions = parse_u32_list(&params.resolutions)?;
    let measure =
        level_measure(&system, params.level, params.max_level).map_err(CliError::Validation)?;
    let rows = entropy_estimate::<f64>(&measure, &resolutions).map_err(CliError::Validation)?;

    writer.write_jsonl(&config, &rows)?;
    let csv: Vec<String> = rows
        .iter()
        .map(|r| format!("{},{},{},{}", r.resolution, r.occupied, r.entropy, r.ratio))
        .collect();
    writer.write_csv("resolution,occupied,entropy,ratio", &csv)?;

    report(&writer);
    for row in &rows {
        println!("resolution {}: ratio {:.6} ({} cells)", row.resolution, row.ratio, row.occupied);
    }
    Ok(Outcome::Pass)
}

// -------------------------------------------------------- fourier probe --

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeParams {
    /// Scale indices probed: `B_1 ..= B_kmax`.
    pub kmax: u64,
    /// Extra truncation levels past each probe point.
    pub extra: u64,
    /// Exact terms in each scaled-support bound.
    pub support_terms: u64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams { kmax: 20, extra: 25, support_terms: 12 }
    }
}

pub fn fourier_probe(
    spec: &SystemSpec,
    params: &ProbeParams,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("fourier probe", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "fourier probe", &config.run_id())?;

    let rows = fourier_nondecay_probe::<f64>(&system, params.kmax, params.extra);
    let support: Vec<_> =
        (1..=params.kmax).map(|k| scaled_support_max(&system, k, params.support_terms)).collect();

    let payload = serde_json::json!({ "magnitudes": rows, "support_bounds": support });
    writer.write_jsonl(&config, &[payload])?;
    let csv: Vec<String> =
        rows.iter().map(|r| format!("{},{},{}", r.k, r.magnitude, r.tail_bound)).collect();
    writer.write_csv("k,magnitude,tail_bound", &csv)?;

    report(&writer);
    let min = rows.iter().map(|r| r.magnitude).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    println!("{} magnitudes in [{:.6}, {:.6}]", rows.len(), min, max);
    Ok(Outcome::Pass)
}

// ------------------------------------------------------------------ ims --

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImsParams {
    /// Explicit expansion bases, comma-separated.
    pub n_seq: Option<String>,
    /// Explicit branch counts, comma-separated.
    pub m_seq: Option<String>,
    /// Explicit strides; defaults to all ones.
    pub t_seq: Option<String>,
    /// Depth when deriving the data from the configured system.
    pub depth: u64,
    /// Point-count cap.
    pub cap: u64,
}

impl Default for ImsParams {
    fn default() -> Self {
        ImsParams { n_seq: None, m_seq: None, t_seq: None, depth: 8, cap: 100_000 }
    }
}

pub fn ims(spec: &SystemSpec, params: &ImsParams, out_dir: &Path) -> Result<Outcome, CliError> {
    let system = spec.build()?;
    let config = RunConfig::new("ims", spec.clone(), params)?;
    let mut writer = ArtifactWriter::new(out_dir, "ims", &config.run_id())?;

    let data = match (&params.n_seq, &params.m_seq) {
        (Some(n), Some(m)) => {
            let n_seq = parse_u32_list(n)?;
            let m_seq = parse_u32_list(m)?;
            let t_seq = match &params.t_seq {
                Some(t) => parse_u32_list(t)?,
                None => vec![1; m_seq.len()],
            };
            IntegerMoranData::new(n_seq, m_seq, t_seq).map_err(CliError::Validation)?
        }
        (None, None) => {
            IntegerMoranData::from_system(&system, params.depth).map_err(CliError::Validation)?
        }
        _ => return Err(CliError::Config("give both n_seq and m_seq, or neither".into())),
    };
    data.validate_separation().map_err(CliError::Validation)?;

    let points = data.points(params.cap).map_err(CliError::Validation)?;
    let scales = data.natural_scales();
    let counts = window_counts(&points, &scales).map_err(CliError::Validation)?;
    let formula = data.formula_dimension::<f64>();

    let payload = serde_json::json!({
        "data": data,
        "count": points.len(),
        "natural_scales": scales.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "window_counts": counts,
        "formula": formula,
    });
    writer.write_jsonl(&config, &[payload])?;
    let csv: Vec<String> =
        points.iter().enumerate().map(|(i, v)| format!("{},{}", i, v)).collect();
    writer.write_csv("index,value", &csv)?;

    report(&writer);
    println!(
        "{} points, formula headline {:.6}{}",
        points.len(),
        formula.headline,
        match &formula.exact {
            Some(_) => " (exact limit available)",
            None => "",
        }
    );
    Ok(Outcome::Pass)
}

fn report(writer: &ArtifactWriter) {
    println!("run {}", writer.run_id());
    for path in writer.written() {
        println!("wrote {}", path.display());
    }
}
