//! `moran`: spectra, dimension estimates, and exact verification for Moran
//! spectral measures, from a JSON config or inline flags.
//!
//! Exit codes: 0 success, 1 configuration error, 2 validation error
//! (inadmissible system or data), 3 a mathematical check failed.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use moran_spectra::seq::SequenceRule;

use commands::{
    BeurlingParams, DimsParams, EntropyParams, FamilyParams, ImsParams, Outcome, ProbeParams,
    VerifyParams,
};
use config::{parse_u32_list, FileConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Validation(#[from] moran_spectra::Error),
}

#[derive(Parser)]
#[command(
    name = "moran",
    version,
    about = "Spectra and dimensions of Moran spectral measures",
    subcommand_negates_reqs = true
)]
struct Cli {
    /// JSON run configuration; inline flags override its fields.
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory artifacts are written into.
    #[arg(short, long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Periodic base sequence, comma-separated (default 4).
    #[arg(long, global = true, value_name = "LIST")]
    base: Option<String>,
    /// Periodic digit-count sequence, comma-separated (default 2).
    #[arg(long, global = true, value_name = "LIST")]
    digits: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy and Hausdorff dimension reports for the system.
    Dims {
        /// Ladder depth the reports sample.
        #[arg(long)]
        depth: Option<u64>,
    },
    /// Generate or verify spectrum families.
    Spectrum {
        #[command(subcommand)]
        action: SpectrumAction,
    },
    /// Dimension estimates from materialized data.
    Dim {
        #[command(subcommand)]
        action: DimAction,
    },
    /// Fourier-side probes of the measure.
    Fourier {
        #[command(subcommand)]
        action: FourierAction,
    },
    /// Integer Moran data: points, window counts, closed formula.
    Ims(ImsFlags),
}

#[derive(Subcommand)]
enum SpectrumAction {
    /// Materialize a family to JSONL and CSV.
    Gen(FamilyFlags),
    /// Run an exact verification check on a family.
    Verify(VerifyFlags),
}

#[derive(Subcommand)]
enum DimAction {
    /// Window-counting estimate of a family's dimension.
    Beurling(BeurlingFlags),
    /// Entropy profile of a level measure under dyadic binning.
    Entropy(EntropyFlags),
}

#[derive(Subcommand)]
enum FourierAction {
    /// Transform magnitudes along the scale ladder, with support bounds.
    Probe(ProbeFlags),
}

#[derive(Args)]
struct FamilyFlags {
    /// canonical | lacunary | intermediate | sign-word | continuum.
    #[arg(long)]
    kind: Option<String>,
    /// Materialize the full level-K set (canonical and sign-word).
    #[arg(long, value_name = "K")]
    level: Option<u64>,
    /// Materialize indices 0..=N instead.
    #[arg(long, value_name = "N")]
    max_index: Option<u64>,
    /// Thinning target a/b (intermediate; optional for continuum).
    #[arg(short, long)]
    target: Option<String>,
    #[arg(long)]
    thin_depth: Option<u64>,
    /// Sign-word prefix, e.g. "+,+,-".
    #[arg(long)]
    sign_prefix: Option<String>,
    /// Sign-word period, e.g. "+,-".
    #[arg(long)]
    sign_period: Option<String>,
    /// Seed for the continuum family's bit string.
    #[arg(long)]
    seed: Option<u64>,
    /// Bit-string length for the continuum family.
    #[arg(long)]
    bits: Option<u64>,
    /// Drop values at or above B_K.
    #[arg(long, value_name = "K")]
    cap_level: Option<u64>,
}

impl FamilyFlags {
    fn apply(&self, p: &mut FamilyParams) {
        if let Some(v) = &self.kind {
            p.kind = v.clone();
        }
        if let Some(v) = self.level {
            p.level = Some(v);
        }
        if let Some(v) = self.max_index {
            p.max_index = Some(v);
        }
        if let Some(v) = &self.target {
            p.target = Some(v.clone());
        }
        if let Some(v) = self.thin_depth {
            p.thin_depth = v;
        }
        if let Some(v) = &self.sign_prefix {
            p.sign_prefix = v.clone();
        }
        if let Some(v) = &self.sign_period {
            p.sign_period = v.clone();
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = self.bits {
            p.bits = v;
        }
        if let Some(v) = self.cap_level {
            p.cap_level = Some(v);
        }
    }
}

#[derive(Args)]
struct VerifyFlags {
    /// orthogonality | unitarity | completeness | separation.
    #[arg(long)]
    check: Option<String>,
    #[command(flatten)]
    family: FamilyFlags,
    /// Largest single level checked for compatible pairs (unitarity).
    #[arg(long)]
    kmax: Option<u64>,
    /// Deepest full level whose exponential matrix is checked (unitarity).
    #[arg(long)]
    unitarity_levels: Option<u64>,
    /// Base frequency a/b for the completeness profile.
    #[arg(long)]
    xi: Option<String>,
    /// Tail-certificate depth for the completeness profile.
    #[arg(long)]
    min_levels: Option<u64>,
    /// Completeness mass the profile must reach.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct BeurlingFlags {
    #[command(flatten)]
    family: FamilyFlags,
    /// dyadic | natural.
    #[arg(long)]
    scales: Option<String>,
}

#[derive(Args)]
struct EntropyFlags {
    /// Convolution level whose measure is binned.
    #[arg(long)]
    level: Option<u64>,
    /// Truncation level of the reference measure.
    #[arg(long)]
    max_level: Option<u64>,
    /// Dyadic resolutions, comma-separated.
    #[arg(long)]
    resolutions: Option<String>,
}

#[derive(Args)]
struct ProbeFlags {
    /// Scale indices probed: B_1 ..= B_kmax.
    #[arg(long)]
    kmax: Option<u64>,
    /// Extra truncation levels past each probe point.
    #[arg(long)]
    extra: Option<u64>,
    /// Exact terms in each scaled-support bound.
    #[arg(long)]
    support_terms: Option<u64>,
}

#[derive(Args)]
struct ImsFlags {
    /// Explicit expansion bases, comma-separated.
    #[arg(long)]
    n_seq: Option<String>,
    /// Explicit branch counts, comma-separated.
    #[arg(long)]
    m_seq: Option<String>,
    /// Explicit strides; defaults to all ones.
    #[arg(long)]
    t_seq: Option<String>,
    /// Depth when deriving the data from the configured system.
    #[arg(long)]
    depth: Option<u64>,
    /// Point-count cap.
    #[arg(long)]
    cap: Option<u64>,
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Dims { .. } => "dims",
        Command::Spectrum { action: SpectrumAction::Gen(_) } => "spectrum gen",
        Command::Spectrum { action: SpectrumAction::Verify(_) } => "spectrum verify",
        Command::Dim { action: DimAction::Beurling(_) } => "dim beurling",
        Command::Dim { action: DimAction::Entropy(_) } => "dim entropy",
        Command::Fourier { action: FourierAction::Probe(_) } => "fourier probe",
        Command::Ims(_) => "ims",
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(text) = std::env::var("MORAN_THREADS") {
        let n: usize = text
            .parse()
            .map_err(|_| CliError::Config(format!("MORAN_THREADS `{}` is not a count", text)))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {}", e)))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let mut spec = file.system.clone().unwrap_or_default();
    if let Some(text) = &cli.base {
        spec.base = SequenceRule::Periodic { values: parse_u32_list(text)? };
    }
    if let Some(text) = &cli.digits {
        spec.digits = SequenceRule::Periodic { values: parse_u32_list(text)? };
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("moran-out"));

    // The subcommand wins; a config-file command must agree if both appear.
    let file_command = file.command.as_deref().map(|c| c.replace('-', " "));
    let command = match (&cli.command, file_command.as_deref()) {
        (Some(cmd), Some(named)) if command_name(cmd) != named => {
            return Err(CliError::Config(format!(
                "config names command `{}` but `{}` was invoked",
                named,
                command_name(cmd)
            )));
        }
        (Some(cmd), _) => cmd,
        (None, Some(named)) => {
            // Dispatch purely from the file.
            return match named {
                "dims" => commands::dims(&spec, &file.parameters_as::<DimsParams>()?, &out_dir),
                "spectrum gen" => {
                    commands::spectrum_gen(&spec, &file.parameters_as::<FamilyParams>()?, &out_dir)
                }
                "spectrum verify" => {
                    commands::spectrum_verify(&spec, &file.parameters_as::<VerifyParams>()?, &out_dir)
                }
                "dim beurling" => {
                    commands::dim_beurling(&spec, &file.parameters_as::<BeurlingParams>()?, &out_dir)
                }
                "dim entropy" => {
                    commands::dim_entropy(&spec, &file.parameters_as::<EntropyParams>()?, &out_dir)
                }
                "fourier probe" => {
                    commands::fourier_probe(&spec, &file.parameters_as::<ProbeParams>()?, &out_dir)
                }
                "ims" => commands::ims(&spec, &file.parameters_as::<ImsParams>()?, &out_dir),
                other => Err(CliError::Config(format!("unknown command `{}` in config", other))),
            };
        }
        (None, None) => {
            return Err(CliError::Config(
                "no command: pass a subcommand or a config file naming one".into(),
            ))
        }
    };

    match command {
        Command::Dims { depth } => {
            let mut params = file.parameters_as::<DimsParams>()?;
            if let Some(d) = depth {
                params.depth = *d;
            }
            commands::dims(&spec, &params, &out_dir)
        }
        Command::Spectrum { action: SpectrumAction::Gen(flags) } => {
            let mut params = file.parameters_as::<FamilyParams>()?;
            flags.apply(&mut params);
            commands::spectrum_gen(&spec, &params, &out_dir)
        }
        Command::Spectrum { action: SpectrumAction::Verify(flags) } => {
            let mut params = file.parameters_as::<VerifyParams>()?;
            if let Some(v) = &flags.check {
                params.check = v.clone();
            }
            flags.family.apply(&mut params.family);
            if let Some(v) = flags.kmax {
                params.kmax = v;
            }
            if let Some(v) = flags.unitarity_levels {
                params.unitarity_levels = v;
            }
            if let Some(v) = &flags.xi {
                params.xi = v.clone();
            }
            if let Some(v) = flags.min_levels {
                params.min_levels = v;
            }
            if let Some(v) = flags.threshold {
                params.threshold = v;
            }
            commands::spectrum_verify(&spec, &params, &out_dir)
        }
        Command::Dim { action: DimAction::Beurling(flags) } => {
            let mut params = file.parameters_as::<BeurlingParams>()?;
            flags.family.apply(&mut params.family);
            if let Some(v) = &flags.scales {
                params.scales = v.clone();
            }
            commands::dim_beurling(&spec, &params, &out_dir)
        }
        Command::Dim { action: DimAction::Entropy(flags) } => {
            let mut params = file.parameters_as::<EntropyParams>()?;
            if let Some(v) = flags.level {
                params.level = v;
            }
            if let Some(v) = flags.max_level {
                params.max_level = v;
            }
            if let Some(v) = &flags.resolutions {
                params.resolutions = v.clone();
            }
            commands::dim_entropy(&spec, &params, &out_dir)
        }
        Command::Fourier { action: FourierAction::Probe(flags) } => {
            let mut params = file.parameters_as::<ProbeParams>()?;
            if let Some(v) = flags.kmax {
                params.kmax = v;
            }
            if let Some(v) = flags.extra {
                params.extra = v;
            }
            if let Some(v) = flags.support_terms {
                params.support_terms = v;
            }
            commands::fourier_probe(&spec, &params, &out_dir)
        }
        Command::Ims(flags) => {
            let mut params = file.parameters_as::<ImsParams>()?;
            if let Some(v) = &flags.n_seq {
                params.n_seq = Some(v.clone());
            }
            if let Some(v) = &flags.m_seq {
                params.m_seq = Some(v.clone());
            }
            if let Some(v) = &flags.t_seq {
                params.t_seq = Some(v.clone());
            }
            if let Some(v) = flags.depth {
                params.depth = v;
            }
            if let Some(v) = flags.cap {
                params.cap = v;
            }
            commands::ims(&spec, &params, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(reason)) => {
            eprintln!("verification failed: {}", reason);
            ExitCode::from(3)
        }
        Err(CliError::Config(message)) => {
            eprintln!("config error: {}", message);
            ExitCode::from(1)
        }
        Err(CliError::Validation(error)) => {
            eprintln!("validation error: {}", error);
            ExitCode::from(2)
        }
    }
}
