//! Run configuration: file ingestion, inline-flag merging, and the content
//! hash that stamps every artifact.
//!
//! A run is fully determined by its resolved [`RunConfig`] — system rules,
//! command name, command parameters with every default filled in, and the
//! operative limits. The `run_id` is the SHA-256 of its canonical JSON, so
//! identical configs hash identically and the artifacts they produce can be
//! compared byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use moran_spectra::limits::{DEFAULT_INDEX_CAP, MAX_LEVEL_POINTS, MAX_MATRIX_DIM};
use moran_spectra::seq::SequenceRule;
use moran_spectra::system::MoranSystem;

use crate::CliError;

/// The digit/base rule pair defining the measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub base: SequenceRule,
    pub digits: SequenceRule,
}

impl Default for SystemSpec {
    fn default() -> Self {
        SystemSpec { base: SequenceRule::constant(4), digits: SequenceRule::constant(2) }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<MoranSystem, CliError> {
        MoranSystem::new(self.base.clone(), self.digits.clone()).map_err(CliError::Validation)
    }
}

/// On-disk run description; every field optional, inline flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<SystemSpec>,
    pub command: Option<String>,
    #[serde(default)]
    pub parameters: serde_json::Value,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {}", path.display(), e)))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))
    }

    /// Deserializes the `parameters` object into a command's parameter
    /// struct, reporting the offending field on mismatch.
    pub fn parameters_as<T: for<'de> Deserialize<'de> + Default>(&self) -> Result<T, CliError> {
        if self.parameters.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::Config(format!("config parameters: {}", e)))
    }
}

/// Hard caps echoed into every run record.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunLimits {
    pub max_level_points: u64,
    pub max_index: u64,
    pub max_matrix_dim: usize,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_level_points: MAX_LEVEL_POINTS,
            max_index: DEFAULT_INDEX_CAP,
            max_matrix_dim: MAX_MATRIX_DIM,
        }
    }
}

/// The fully resolved description of one run; hashing input.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub system: SystemSpec,
    pub parameters: serde_json::Value,
    pub limits: RunLimits,
}

impl RunConfig {
    pub fn new<P: Serialize>(
        command: &'static str,
        system: SystemSpec,
        parameters: &P,
    ) -> Result<Self, CliError> {
        let parameters = serde_json::to_value(parameters)
            .map_err(|e| CliError::Config(format!("cannot encode parameters: {}", e)))?;
        Ok(RunConfig { command, system, parameters, limits: RunLimits::default() })
    }

    /// SHA-256 of the canonical JSON encoding, lowercase hex.
    pub fn run_id(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{:02x}", byte).expect("hex formatting");
        }
        hex
    }
}

/// Parses `a/b` or a bare integer into an exact rational in `(0, 1)`
/// suitable as a thinning target.
pub fn parse_target(text: &str) -> Result<BigRational, CliError> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| CliError::Config(format!("target numerator `{}` is not an integer", num)))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| CliError::Config(format!("target denominator `{}` is not an integer", den)))?;
    if den == BigInt::from(0) {
        return Err(CliError::Config("target denominator is zero".into()));
    }
    Ok(BigRational::new(num, den))
}

/// Parses a comma-separated sign word, accepting `+`, `+1`, `1`, `-`, `-1`.
pub fn parse_signs(text: &str) -> Result<Vec<i8>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| match tok.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(CliError::Config(format!("sign `{}` is not +1 or -1", other))),
        })
        .collect()
}

/// Parses a comma-separated list of positive integers.
pub fn parse_u32_list(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Config(format!("`{}` is not a small integer", tok)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_id_is_stable_and_sensitive() {
        let params = serde_json::json!({ "depth": 64 });
        let a = RunConfig::new("dims", SystemSpec::default(), &params).unwrap();
        let b = RunConfig::new("dims", SystemSpec::default(), &params).unwrap();
        assert_eq!(a.run_id(), b.run_id());
        let other = serde_json::json!({ "depth": 65 });
        let c = RunConfig::new("dims", SystemSpec::default(), &other).unwrap();
        assert_ne!(a.run_id(), c.run_id());
        assert_eq!(a.run_id().len(), 64);
    }

    #[test]
    fn target_parsing_accepts_fractions() {
        assert_eq!(parse_target("1/4").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_target(" 2 / 5 ").unwrap(), BigRational::new(2.into(), 5.into()));
        assert!(parse_target("x/4").is_err());
        assert!(parse_target("1/0").is_err());
    }

    #[test]
    fn sign_parsing_accepts_all_spellings() {
        assert_eq!(parse_signs("+,-").unwrap(), vec![1, -1]);
        assert_eq!(parse_signs("+1,-1,1").unwrap(), vec![1, -1, 1]);
        assert_eq!(parse_signs("").unwrap(), Vec::<i8>::new());
        assert!(parse_signs("0").is_err());
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"systm": {}}"#).unwrap_err();
        assert!(err.to_string().contains("systm"));
    }
}
