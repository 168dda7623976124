mod decode;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use surftn::experiment::{
    emit_results, render_checks, run_ad_benchmark, run_cbf_benchmark, run_oracle_checks, run_timing, ConfigFile,
    ExperimentConfig, ExperimentKind, OutputFormat,
};
use surftn::{build_lattice, Error};

#[derive(Parser)]
#[command(name = "surftn", version, about = "Tensor-network decoding of the surface code")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decode one syndrome given in the --config document.
    Decode,
    /// Amplitude-damping benchmark (ad-sweep or ad-size-sweep).
    BenchAd,
    /// Correlated bit-flip benchmark.
    BenchCbf,
    /// Exhaustive cross-checks on small lattices; exit status 1 on failure.
    OracleCheck,
    /// Decode wall time against lattice size.
    Timing,
    /// Print the lattice description as JSON.
    Lattice {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
    },
}

/// A failed run and its exit status.
enum Failure {
    Config(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Lattice(_) | Error::Domain(_) | Error::Validation(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn read_config_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn experiment_config(cli: &Cli, kinds: &[ExperimentKind]) -> Result<ExperimentConfig, Failure> {
    let mut file = match &cli.config {
        Some(p) => serde_json::from_str::<ConfigFile>(&read_config_text(p)?)
            .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => ConfigFile::default(),
    };
    let kind = match file.kind {
        Some(k) if kinds.contains(&k) => k,
        Some(k) => return Err(Failure::Config(format!("config kind {k:?} does not fit this command"))),
        None => kinds[0],
    };
    file.kind = Some(kind);
    file.seed = cli.seed.or(file.seed);
    file.workers = cli.workers.or(file.workers);
    file.format = cli.format.or(file.format);
    if let Some(out) = &cli.out {
        file.out = Some(out.display().to_string());
    }
    Ok(ExperimentConfig::resolve(file, None)?)
}

fn echo(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn write_text(text: &str, out: Option<&str>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Run(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Decode => {
            let path = cli.config.as_ref().ok_or_else(|| Failure::Config("decode needs --config <input.json>".into()))?;
            if cli.format == Some(OutputFormat::Csv) {
                return Err(Failure::Config("decode writes JSON only".into()));
            }
            let input: decode::DecodeInput = serde_json::from_str(&read_config_text(path)?)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            decode::prepare(&input)?;
            let report = decode::run(&input).map_err(|e| Failure::Run(e.to_string()))?;
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))?;
            text.push('\n');
            write_text(&text, cli.out.as_ref().and_then(|p| p.to_str()))
        }
        Cmd::BenchAd => {
            let cfg = experiment_config(cli, &[ExperimentKind::AdSweep, ExperimentKind::AdSizeSweep])?;
            let rows = run_ad_benchmark(&cfg)?;
            Ok(emit_results(&rows, &echo(&cfg), cfg.out.as_deref().map(Path::new), cfg.format)?)
        }
        Cmd::BenchCbf => {
            let cfg = experiment_config(cli, &[ExperimentKind::CbfSweep])?;
            let rows = run_cbf_benchmark(&cfg)?;
            Ok(emit_results(&rows, &echo(&cfg), cfg.out.as_deref().map(Path::new), cfg.format)?)
        }
        Cmd::Timing => {
            let cfg = experiment_config(cli, &[ExperimentKind::Timing])?;
            let report = run_timing(&cfg)?;
            eprintln!(
                "decode: affine R² {:.4}, log-log exponent {:.3}; contraction: affine R² {:.4}, exponent {:.3}",
                report.decode_fit.r2, report.decode_exponent, report.contraction_fit.r2, report.contraction_exponent
            );
            Ok(emit_results(&report.rows(&cfg), &echo(&cfg), cfg.out.as_deref().map(Path::new), cfg.format)?)
        }
        Cmd::OracleCheck => {
            let cfg = experiment_config(cli, &[ExperimentKind::OracleCheck])?;
            let checks = run_oracle_checks(&cfg)?;
            write_text(&render_checks(&checks, &echo(&cfg), cfg.format)?, cfg.out.as_deref())?;
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
            for c in &failed {
                eprintln!("FAIL {} d={} {}={}: {:e} > {:e}", c.check, c.size, c.param, c.param_value, c.value, c.threshold);
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Run(format!("{} of {} checks failed", failed.len(), checks.len())))
            }
        }
        Cmd::Lattice { width, height } => {
            let lat = build_lattice(*width, *height)?;
            let mut text = serde_json::to_string_pretty(&lat.to_json()).map_err(|e| Failure::Run(e.to_string()))?;
            text.push('\n');
            write_text(&text, cli.out.as_ref().and_then(|p| p.to_str()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("config error: {m}"),
                Failure::Run(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
