use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gammalab_cli::{
    bessel_csv, bessel_json, bessel_report, cmd_gamma, cmd_verify, emit, gamma_csv, gamma_json, verify_csv, verify_json,
    CliError, CliResult, OutputFormat, RunConfig, ThetaSpec, DEFAULT_TOL,
};
use num_complex::Complex64;

/// Exterior-square gamma factors of cuspidal representations of GL_n(F_q).
#[derive(Parser, Debug)]
#[command(name = "gammalab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute γ by every applicable route for one θ or all regular θ.
    Gamma(Common),
    /// Run the invariant suites and report pass/fail with residuals.
    Verify(Common),
    /// Write Bessel tables or gamma sweeps to a file.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ExportKind::Bessel)]
        kind: ExportKind,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Bessel,
    Gamma,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Characteristic of the base field.
    #[arg(long, conflicts_with = "q")]
    p: Option<u32>,
    /// Base field is F_{p^e}.
    #[arg(long, default_value_t = 1, conflicts_with = "q")]
    e: u32,
    /// Base field size, as a shorthand for --p/--e.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: u32,
    /// Exponent k of θ relative to the field generator, or `all-regular`.
    #[arg(long, default_value = "all-regular")]
    theta: ThetaSpec,
    /// Use ψ^{-1} in place of the trace character ψ.
    #[arg(long)]
    psi_inverse: bool,
    /// Real part of c = ω_π(ϖ) for the level-zero factors.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c_im: f64,
    #[arg(long, default_value_t = 0x6a73)]
    seed: u64,
    /// Random pairs checked when the exhaustive check is too large.
    #[arg(long, default_value_t = 128)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check every (W, φ) pair regardless of group size.
    #[arg(long)]
    exhaustive: bool,
}

fn split_prime_power(q: u32) -> CliResult<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0).ok_or_else(|| CliError::Precondition(format!("q = {q} is not a prime power")))?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 {
        return Err(CliError::Precondition(format!("q = {q} is not a prime power")));
    }
    Ok((p, e))
}

impl Common {
    fn config(&self) -> CliResult<RunConfig> {
        let (p, e) = match (self.q, self.p) {
            (Some(q), _) => split_prime_power(q)?,
            (None, Some(p)) => (p, self.e),
            (None, None) => return Err(CliError::Precondition("one of --p or --q is required".into())),
        };
        let cfg = RunConfig {
            p,
            e,
            n: self.n,
            theta: self.theta,
            psi_inverse: self.psi_inverse,
            c: Complex64::new(self.c_re, self.c_im),
            seed: self.seed,
            trials: self.trials,
            tol: self.tol,
            exhaustive: self.exhaustive,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn format(&self, default: OutputFormat) -> OutputFormat {
        match self.format {
            Some(Format::Json) => OutputFormat::Json,
            Some(Format::Csv) => OutputFormat::Csv,
            None => default,
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Gamma(c) => {
            let (report, disagreement) = cmd_gamma(&c.config()?)?;
            let text = match c.format(OutputFormat::Json) {
                OutputFormat::Json => gamma_json(&report)?,
                OutputFormat::Csv => gamma_csv(&report)?,
            };
            emit(&text, c.out.as_deref())?;
            match disagreement {
                Some(msg) => Err(CliError::RouteDisagreement(msg)),
                None => Ok(()),
            }
        }
        Command::Verify(c) => {
            let report = cmd_verify(&c.config()?)?;
            let text = match c.format {
                None => report.text(),
                Some(Format::Json) => verify_json(&report)?,
                Some(Format::Csv) => verify_csv(&report)?,
            };
            emit(&text, c.out.as_deref())?;
            if report.all_passed() {
                Ok(())
            } else {
                let n = report.checks.iter().filter(|r| !r.passed).count();
                Err(CliError::VerifyFailed(format!("{n} checks failed")))
            }
        }
        Command::Export { common, kind } => {
            let cfg = common.config()?;
            let format = common.format(OutputFormat::Csv);
            let text = match kind {
                ExportKind::Bessel => {
                    let r = bessel_report(&cfg)?;
                    if format == OutputFormat::Json { bessel_json(&r)? } else { bessel_csv(&r)? }
                }
                ExportKind::Gamma => {
                    let (r, _) = cmd_gamma(&cfg)?;
                    if format == OutputFormat::Json { gamma_json(&r)? } else { gamma_csv(&r)? }
                }
            };
            emit(&text, common.out.as_deref())
        }
    };
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
