use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phermion_core::algebra::{MetricOperator, Species};
use phermion_core::oscillator::OscillatorKind;
use phermion_core::properties::DEFAULT_SEED;
use phermion_core::report::{
    render_table, run_all, run_lie, run_multi, run_oscillator, run_verify_algebra, AllOptions, SuiteOutput,
    SuiteReport,
};
use phermion_core::{ComplexMatrix, Error, Tolerance};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "phermion-lab", version, about = "Verification suites for phermion algebras and their oscillators")]
struct Cli {
    /// Absolute tolerance for relation residuals (scaled by operator norms).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Boson truncation level.
    #[arg(long, global = true, default_value_t = 8)]
    truncation: usize,

    /// Seed for randomized suites; PHERMION_SEED takes precedence.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Defining relations of one ladder species.
    VerifyAlgebra {
        #[arg(long, value_parser = parse_species)]
        species: Species,
        /// identity | sigma3 | diag:a,b | file:path
        #[arg(long)]
        eta: Option<EtaSpec>,
    },
    /// Boson ⊗ two-level oscillator with its supercharge.
    Oscillator {
        #[arg(long, value_parser = parse_kind)]
        kind: OscillatorKind,
        /// Energy scale; defaults to +1, or −1 for the abnormal kind.
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: Option<f64>,
        #[arg(long)]
        eta: Option<EtaSpec>,
    },
    /// Jordan-Wigner tower of abnormal phermions.
    Multi {
        #[arg(long)]
        ell: usize,
    },
    /// J-operator brackets for ε = ±1.
    Lie {
        #[arg(long, allow_negative_numbers = true)]
        epsilon: i8,
    },
    /// Every suite with default parameters.
    All,
}

#[derive(Clone, Debug)]
enum EtaSpec {
    Identity,
    Sigma3,
    Diag(Vec<f64>),
    File(PathBuf),
}

impl FromStr for EtaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(EtaSpec::Identity),
            "sigma3" => Ok(EtaSpec::Sigma3),
            _ => {
                if let Some(list) = s.strip_prefix("diag:") {
                    let values = list
                        .split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad diagonal entry {x:?}: {e}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(EtaSpec::Diag(values))
                } else if let Some(path) = s.strip_prefix("file:") {
                    Ok(EtaSpec::File(PathBuf::from(path)))
                } else {
                    Err(format!("unknown metric {s:?}; expected identity, sigma3, diag:a,b or file:path"))
                }
            }
        }
    }
}

impl EtaSpec {
    fn label(&self) -> String {
        match self {
            EtaSpec::Identity => "identity".into(),
            EtaSpec::Sigma3 => "sigma3".into(),
            EtaSpec::Diag(d) => format!("diag:{}", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            EtaSpec::File(p) => format!("file:{}", p.display()),
        }
    }

    fn load(&self) -> Result<MetricOperator, String> {
        let metric = match self {
            EtaSpec::Identity => Ok(MetricOperator::identity(2)),
            EtaSpec::Sigma3 => Ok(MetricOperator::sigma3()),
            EtaSpec::Diag(d) => MetricOperator::from_diagonal(d),
            EtaSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
                    .map_err(|e| format!("{}: expected a JSON matrix of [re, im] pairs: {e}", path.display()))?;
                ComplexMatrix::from_pairs(&rows).and_then(MetricOperator::new)
            }
        };
        metric.map_err(|e| format!("invalid metric {}: {e}", self.label()))
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn parse_species(s: &str) -> Result<Species, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown species {s:?}; expected boson, fermion, phermion or abnormal-phermion"))
}

fn parse_kind(s: &str) -> Result<OscillatorKind, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| {
        format!("unknown kind {s:?}; expected boson-fermion, boson-phermion or boson-abnormal-phermion")
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunConfig {
    command: &'static str,
    tolerance: f64,
    truncation: usize,
    seed: u64,
    output_format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    species: Option<Species>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<OscillatorKind>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<i8>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Range { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    match std::env::var("PHERMION_SEED") {
        Ok(v) if !v.trim().is_empty() => parse_seed(v.trim()).map_err(|e| Failure::Usage(format!("PHERMION_SEED: {e}"))),
        _ => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn run(cli: Cli) -> Result<(SuiteReport, Vec<SuiteOutput>), Failure> {
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        return Err(Failure::Usage(format!("--tolerance must be positive, got {}", cli.tolerance)));
    }
    if cli.truncation < 2 {
        return Err(Failure::Usage(format!("--truncation must be at least 2, got {}", cli.truncation)));
    }
    let tol = Tolerance::new(cli.tolerance);
    let mut config = RunConfig {
        command: "",
        tolerance: cli.tolerance,
        truncation: cli.truncation,
        seed: resolve_seed(cli.seed)?,
        output_format: cli.format,
        species: None,
        kind: None,
        energy: None,
        eta_spec: None,
        ell: None,
        epsilon: None,
    };
    let load = |eta: &Option<EtaSpec>| eta.as_ref().map(|e| e.load()).transpose().map_err(Failure::Usage);
    let start = Instant::now();
    let outputs = match &cli.command {
        Command::VerifyAlgebra { species, eta } => {
            config.command = "verify-algebra";
            config.species = Some(*species);
            config.eta_spec = eta.as_ref().map(EtaSpec::label);
            vec![run_verify_algebra(*species, load(eta)?.as_ref(), cli.truncation, tol)?]
        }
        Command::Oscillator { kind, energy, eta } => {
            config.command = "oscillator";
            let energy = energy.unwrap_or(match kind {
                OscillatorKind::BosonAbnormalPhermion => -1.0,
                _ => 1.0,
            });
            if eta.is_some() && *kind != OscillatorKind::BosonPhermion {
                return Err(Failure::Usage(format!("--eta only applies to boson-phermion, not {kind}")));
            }
            config.kind = Some(*kind);
            config.energy = Some(energy);
            config.eta_spec = eta.as_ref().map(EtaSpec::label);
            vec![run_oscillator(*kind, energy, cli.truncation, load(eta)?.as_ref(), tol)?]
        }
        Command::Multi { ell } => {
            config.command = "multi";
            config.ell = Some(*ell);
            vec![run_multi(*ell, tol)?]
        }
        Command::Lie { epsilon } => {
            config.command = "lie";
            if epsilon.abs() != 1 {
                return Err(Failure::Usage(format!("--epsilon must be +1 or -1, got {epsilon}")));
            }
            config.epsilon = Some(*epsilon);
            vec![run_lie(*epsilon, tol)?]
        }
        Command::All => {
            config.command = "all";
            run_all(&AllOptions {
                tolerance: tol,
                truncation: cli.truncation,
                seed: config.seed,
            })?
        }
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let config_value = serde_json::to_value(&config).map_err(|e| Failure::Runtime(e.to_string()))?;
    let report = SuiteReport::new(config.command, config_value, outputs.clone(), elapsed);
    Ok((report, outputs))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok((report, outputs)) => {
            match format {
                Format::Table => print!("{}", render_table(&report, &outputs)),
                Format::Json => match serde_json::to_string_pretty(&report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_FAIL);
                    }
                },
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
