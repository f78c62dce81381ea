//! Batch front end: each subcommand writes one table (CSV or JSON) and a run manifest.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::*;
use output::{versions, Format, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "yanglee", version, about = "Yang-Lee zeros, correlations and entanglement of non-Hermitian chains")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Table destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest destination; defaults to `<out>.manifest.json`, or stderr without --out.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Residual threshold for numeric zeros (xxz-zeros, xxz-verify-theorem1).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Yang-Lee zero region of the SSH chain over (w − v, T).
    #[command(after_help = SSH_ZEROS_SCAN_HELP)]
    SshZerosScan(SshZerosScanArgs),
    /// Direct zero count χ against the asymptotic density.
    #[command(after_help = SSH_CHI_HELP)]
    SshChi(SshChiArgs),
    /// Real-space ground-state correlations and exponent fits.
    #[command(after_help = SSH_CORR_HELP)]
    SshCorr(SshCorrArgs),
    /// Entanglement entropy scaling from the correlation matrix.
    #[command(after_help = SSH_EE_HELP)]
    SshEe(SshEeArgs),
    /// Coefficients of Σ_M z^{M(L−M)}.
    #[command(after_help = XXZ_POLY_HELP)]
    XxzPoly(XxzPolyArgs),
    /// Analytic and numeric partition-function zeros in the Δ plane.
    #[command(after_help = XXZ_ZEROS_HELP)]
    XxzZeros(XxzZerosArgs),
    /// Pairs every n = 0 analytic zero with its nearest numeric zero.
    #[command(name = "xxz-verify-theorem1", after_help = XXZ_VERIFY_HELP)]
    XxzVerifyTheorem1(XxzVerifyArgs),
    /// Roots of the first-order Bethe equations.
    #[command(after_help = XXZ_SBAE_HELP)]
    XxzSbae(XxzSbaeArgs),
    /// Ground-state entanglement of the XXZ chain.
    #[command(after_help = XXZ_EE_HELP)]
    XxzEe(XxzEeArgs),
    /// ED gap against the magnon formula.
    #[command(after_help = XXZ_GAP_HELP)]
    XxzGap(XxzGapArgs),
    /// Susceptibility exponent on the gapless side.
    #[command(after_help = XXZ_SUSCEPTIBILITY_HELP)]
    XxzSusceptibility(XxzSusceptibilityArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SshZerosScan(_) => "ssh-zeros-scan",
            Command::SshChi(_) => "ssh-chi",
            Command::SshCorr(_) => "ssh-corr",
            Command::SshEe(_) => "ssh-ee",
            Command::XxzPoly(_) => "xxz-poly",
            Command::XxzZeros(_) => "xxz-zeros",
            Command::XxzVerifyTheorem1(_) => "xxz-verify-theorem1",
            Command::XxzSbae(_) => "xxz-sbae",
            Command::XxzEe(_) => "xxz-ee",
            Command::XxzGap(_) => "xxz-gap",
            Command::XxzSusceptibility(_) => "xxz-susceptibility",
        }
    }

    fn parameters(&self) -> Value {
        let v = match self {
            Command::SshZerosScan(a) => serde_json::to_value(a),
            Command::SshChi(a) => serde_json::to_value(a),
            Command::SshCorr(a) => serde_json::to_value(a),
            Command::SshEe(a) => serde_json::to_value(a),
            Command::XxzPoly(a) => serde_json::to_value(a),
            Command::XxzZeros(a) => serde_json::to_value(a),
            Command::XxzVerifyTheorem1(a) => serde_json::to_value(a),
            Command::XxzSbae(a) => serde_json::to_value(a),
            Command::XxzEe(a) => serde_json::to_value(a),
            Command::XxzGap(a) => serde_json::to_value(a),
            Command::XxzSusceptibility(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }

    fn execute(&self, global: &GlobalArgs) -> Result<output::Report, CliError> {
        match self {
            Command::SshZerosScan(a) => ssh_zeros_scan(a),
            Command::SshChi(a) => ssh_chi(a),
            Command::SshCorr(a) => ssh_corr(a),
            Command::SshEe(a) => ssh_ee(a),
            Command::XxzPoly(a) => xxz_poly(a),
            Command::XxzZeros(a) => xxz_zeros(a, global),
            Command::XxzVerifyTheorem1(a) => xxz_verify(a, global),
            Command::XxzSbae(a) => xxz_sbae(a, global),
            Command::XxzEe(a) => xxz_ee(a),
            Command::XxzGap(a) => xxz_gap(a),
            Command::XxzSusceptibility(a) => xxz_susceptibility(a),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] yanglee::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Numeric(yanglee::Error::InvalidInput(_)) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let name = cli.command.name();
    let mut parameters = cli.command.parameters();
    if let Value::Object(map) = &mut parameters {
        map.insert("format".into(), serde_json::to_value(cli.global.format).expect("format serializes"));
        map.insert("threads".into(), cli.global.threads.into());
        map.insert("tol".into(), cli.global.tol.into());
    }
    let manifest_path = cli.global.manifest.clone().or_else(|| {
        cli.global.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });

    let outcome = execute(&cli);
    let (outputs, summary, error, code) = match outcome {
        Ok((outputs, summary)) => (outputs, summary, None, EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            (Vec::new(), Default::default(), Some(e.to_string()), code)
        }
    };
    let manifest = RunManifest {
        command: name.to_owned(),
        parameters,
        seed: cli.global.seed,
        versions: versions(),
        outputs,
        wall_time: start.elapsed().as_secs_f64(),
        summary,
        error,
    };
    let mut text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    text.push(b'\n');
    let written = match &manifest_path {
        Some(path) => fs::write(path, &text),
        None => std::io::stderr().write_all(&text),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write manifest: {e}");
        return if code == EXIT_OK { EXIT_NUMERIC } else { code };
    }
    code
}

fn execute(cli: &Cli) -> Result<(Vec<String>, serde_json::Map<String, Value>), CliError> {
    let report = match cli.global.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| cli.command.execute(&cli.global))?,
        None => cli.command.execute(&cli.global)?,
    };
    let mut outputs = Vec::new();
    if let Some(table) = &report.table {
        let bytes = table.render(cli.global.format)?;
        match &cli.global.out {
            Some(path) => {
                fs::write(path, bytes)?;
                outputs.push(path.display().to_string());
            }
            None => std::io::stdout().write_all(&bytes)?,
        }
    }
    Ok((outputs, report.summary))
}
