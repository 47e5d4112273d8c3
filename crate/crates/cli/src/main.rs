//! `joints`: command-line driver for the joints workbench.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::*;
use crate::report::{to_pretty_json, write_output, CliError, CliResult, ExperimentReport, Inputs, Table, SCHEMA_VERSION};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "joints", version, about = "Exact-arithmetic experiments on joints, multijoints and incidences")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a standard configuration as JSON.
    Generate(GenerateArgs),
    /// Find joints, their multiplicities and bucket statistics.
    Detect(DetectArgs),
    /// Find multijoints of three line collections.
    Multijoint(MultijointArgs),
    /// Compute a polynomial vanishing on a point set.
    Vanish(VanishArgs),
    /// Peel the joints of an arrangement and emit a certificate.
    Peel(PeelArgs),
    /// Replay a peeling certificate against an arrangement.
    Verify(VerifyArgs),
    /// Polynomial partitioning of a rational point set.
    Partition(PartitionArgs),
    /// Count point–line incidences.
    Incidence(IncidenceArgs),
    /// Full point–line census of F_p^n.
    Census(CensusArgs),
    /// Classify lines against an algebraic surface in Q^3.
    Surface(SurfaceArgs),
    /// Hypergeometric tails, Monte Carlo checks and witness subcollections.
    Furth(FurthArgs),
    /// Time representative workloads.
    Bench(BenchArgs),
}

fn verdict_table(v: &[report::VerdictEntry]) -> Table {
    let mut t = Table::new(&["verdict", "pass", "detail"]);
    for e in v {
        t.push([e.name.clone(), e.pass.to_string(), e.detail.clone()]);
    }
    t
}

fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a, cli.seed)?,
        Command::Detect(a) => detect(a, &mut inputs)?,
        Command::Multijoint(a) => multijoint(a, &mut inputs)?,
        Command::Vanish(a) => vanish(a, &mut inputs)?,
        Command::Peel(a) => peel(a, &mut inputs)?,
        Command::Verify(a) => verify(a, &mut inputs)?,
        Command::Partition(a) => partition(a, &mut inputs, cli.seed)?,
        Command::Incidence(a) => incidence(a, &mut inputs)?,
        Command::Census(a) => census(a)?,
        Command::Surface(a) => surface(a, &mut inputs)?,
        Command::Furth(a) => furth(a, &mut inputs, cli.seed)?,
        Command::Bench(a) => bench(a, cli.seed)?,
    };
    if let Some(text) = &outcome.artifact {
        write_output(cli.out.as_deref(), text)?;
        return Ok(true);
    }
    let pass = outcome.passed();
    let text = match cli.format {
        Format::Csv => match &outcome.table {
            Some(t) => t.to_csv()?,
            None => verdict_table(&outcome.verdicts).to_csv()?,
        },
        Format::Json => to_pretty_json(&ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: std::env::args().skip(1).collect(),
            input_hashes: inputs.hashes,
            elapsed_ms: start.elapsed().as_millis() as u64,
            payload: outcome.payload,
            verdicts: outcome.verdicts,
            pass,
        }),
    };
    write_output(cli.out.as_deref(), &text)?;
    let extra = match &cli.command {
        Command::Partition(a) => a.report.as_deref(),
        Command::Surface(a) => a.report.as_deref(),
        _ => None,
    };
    if let Some(path) = extra {
        write_output(Some(path), &text)?;
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("joints: one or more verdicts failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("joints: {e}");
            ExitCode::from(1)
        }
    }
}
