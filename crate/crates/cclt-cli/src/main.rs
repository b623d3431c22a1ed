mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{Flags, Format, Settings};
use output::{write_manifest, write_results, Artifact, Manifest};

const AFTER_HELP: &str = "\
Distance and rate results are CSV with the columns
  model,n,k,samples,distance,stderr,bound_total,seed
(RFC 4180 quoting, empty cells for unavailable values). Every run also writes
<out>/<command>.manifest.txt with the resolved configuration, seed, versions
and wall time. Results depend only on the configuration and seed, never on
--workers.";

#[derive(Parser, Debug)]
#[command(name = "cclt", version, about = "Conditional CLT experiments", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate a small model and check the symmetrised drift and R0 identities.
    VerifyAssumptions(Flags),
    /// Brute-force conditional moments against their closed forms.
    OracleCheck(Flags),
    /// Monte Carlo W1 distance of W given Y = k to the standard normal.
    Distance(Flags),
    /// Distances over --ns and the fitted log-log slope.
    Rate(Flags),
    /// Per-term bound report from exact or sampled residual summaries.
    Bound(Flags),
    /// Local limit quantities of the conditioning count.
    Llt(Flags),
    /// Subgraph-count decomposition into triangle and wedge parts.
    Decompose(Flags),
}

impl Command {
    fn parts(self) -> (&'static str, Flags) {
        match self {
            Command::VerifyAssumptions(f) => ("verify-assumptions", f),
            Command::OracleCheck(f) => ("oracle-check", f),
            Command::Distance(f) => ("distance", f),
            Command::Rate(f) => ("rate", f),
            Command::Bound(f) => ("bound", f),
            Command::Llt(f) => ("llt", f),
            Command::Decompose(f) => ("decompose", f),
        }
    }
}

fn dispatch(name: &str, s: &Settings) -> Result<Artifact> {
    match name {
        "verify-assumptions" => commands::verify_assumptions(s),
        "oracle-check" => commands::oracle_check(s),
        "distance" => commands::distance(s),
        "rate" => commands::rate(s),
        "bound" => commands::bound(s),
        "llt" => commands::llt(s),
        "decompose" => commands::decompose(s),
        _ => unreachable!("clap only yields known subcommands"),
    }
}

fn run(name: &'static str, mut flags: Flags) -> Result<()> {
    flags.merge_config()?;
    let default_format = match name {
        "bound" | "decompose" => Format::Json,
        _ => Format::Csv,
    };
    let s = Settings::resolve(&flags, default_format)?;
    let started = SystemTime::now();
    let clock = Instant::now();
    let result = cclt::rng::with_workers(s.workers, || dispatch(name, &s));
    let (outputs, summary, error) = match &result {
        Ok(a) => (write_results(name, &s, a)?.files, a.summary.clone(), None),
        Err(e) => (Vec::new(), Vec::new(), Some(format!("{e:#}"))),
    };
    write_manifest(&Manifest {
        command: name,
        argv: std::env::args().collect(),
        settings: &s,
        started,
        wall: clock.elapsed(),
        outputs: &outputs,
        summary: &summary,
        error,
    })?;
    result.map(|_| ())
}

fn main() -> ExitCode {
    let (name, flags) = Cli::parse().command.parts();
    match run(name, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
