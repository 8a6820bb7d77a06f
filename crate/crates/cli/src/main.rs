// SPDX-License-Identifier: Apache-2.0
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;

use ffr_atpg::env::protocol::{serve_stream, serve_tcp, AgentClient};
use ffr_atpg::env::{FeatureScale, RlPolicy, DEFAULT_K};
use ffr_atpg::fault::{
    collapse_faults, dead_logic_faults, enumerate_faults, format_fault_list, parse_fault_list,
};
use ffr_atpg::ffr::partition_csv;
use ffr_atpg::podem::{
    run_fault_list, FaultOutcome, FfrLevelHeuristic, GateLevelHeuristic, RunMetrics,
};
use ffr_atpg::scoap::scoap_csv;
use ffr_atpg::{generate_test, Circuit, FaultSite};
use ffr_atpg_cli::config::{FileConfig, Limit};
use ffr_atpg_cli::report;
use ffr_atpg_cli::runfile::{FaultRow, RunFile, RunFileError, RunHeader};

#[derive(Parser)]
#[command(
    name = "ffratpg",
    version,
    about = "PODEM test generation with region-level backtrace"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Gate,
    Ffr,
    Rl,
}

impl PolicyArg {
    fn name(self) -> &'static str {
        match self {
            PolicyArg::Gate => "gate",
            PolicyArg::Ffr => "ffr",
            PolicyArg::Rl => "rl",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the pin-level stuck-at fault list.
    Faults {
        #[arg(long)]
        bench: PathBuf,
        /// Merge structurally equivalent faults.
        #[arg(long)]
        collapse: bool,
        /// Keep a seeded random sample of this many faults.
        #[arg(long, conflicts_with = "hardest")]
        sample: Option<usize>,
        /// Keep the faults with the most backtracks under the region-level
        /// heuristic.
        #[arg(long)]
        hardest: Option<usize>,
        #[arg(long)]
        backtrack_limit: Option<Limit>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the fanout-free region partition as CSV.
    Partition {
        #[arg(long)]
        bench: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write SCOAP measures as CSV.
    Scoap {
        #[arg(long)]
        bench: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate tests for a fault list and write the per-fault run file.
    Atpg {
        #[arg(long)]
        bench: PathBuf,
        /// Fault list file, or `all`.
        #[arg(long, default_value = "all")]
        faults: String,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Agent address for `--policy rl`.
        #[arg(long)]
        endpoint: Option<String>,
        /// Backtracks allowed per fault, or `unlimited`.
        #[arg(long)]
        backtrack_limit: Option<Limit>,
        #[arg(long)]
        parallel: Option<usize>,
        /// Action slots shown to the agent.
        #[arg(long)]
        k: Option<usize>,
        /// Run file path; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Serve episodes over newline-delimited JSON.
    ServeEnv {
        /// Address to listen on, e.g. 127.0.0.1:7000.
        #[arg(long, default_value = "127.0.0.1:7000", conflicts_with = "stdio")]
        listen: String,
        /// Serve a single session on stdin/stdout.
        #[arg(long)]
        stdio: bool,
    },
    /// Compare run files.
    Report {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Policy the others are compared against.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Failure classes, mapped to exit codes 2 and 3.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.into())
    }
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Input(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(e))) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}

fn load_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Circuit::from_bench(&text, &name).with_context(|| path.display().to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| p.display().to_string())?,
        None => io::stdout().write_all(text.as_bytes()).map_err(internal)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = cli.common.seed.or(cfg.seed).unwrap_or(0);
    let limit = |flag: Option<Limit>| flag.or(cfg.backtrack_limit).unwrap_or(Limit(Some(100)));
    match cli.command {
        Command::Faults {
            bench,
            collapse,
            sample,
            hardest,
            backtrack_limit,
            out,
        } => {
            let c = load_circuit(&bench)?;
            let mut faults = enumerate_faults(&c.netlist);
            if collapse {
                faults = collapse_faults(&c.netlist, &faults);
            }
            if let Some(n) = sample {
                let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                let mut idx: Vec<usize> = (0..faults.len()).collect();
                idx.shuffle(&mut rng);
                idx.truncate(n);
                idx.sort_unstable();
                faults = idx.into_iter().map(|i| faults[i]).collect();
            }
            if let Some(n) = hardest {
                let parallel = cfg.parallel.unwrap_or_else(default_parallelism);
                let outcomes = run_fault_list(
                    &c,
                    &faults,
                    || FfrLevelHeuristic,
                    limit(backtrack_limit).budget(),
                    parallel,
                )
                .map_err(internal)?;
                let mut idx: Vec<usize> = (0..faults.len()).collect();
                idx.sort_by_key(|&i| std::cmp::Reverse(outcomes[i].result.backtracks));
                idx.truncate(n);
                idx.sort_unstable();
                faults = idx.into_iter().map(|i| faults[i]).collect();
            }
            emit(out.as_deref(), &format_fault_list(&faults, &c.netlist))
        }
        Command::Partition { bench, out } => {
            let c = load_circuit(&bench)?;
            emit(out.as_deref(), &partition_csv(&c.netlist, &c.partition))
        }
        Command::Scoap { bench, out } => {
            let c = load_circuit(&bench)?;
            emit(out.as_deref(), &scoap_csv(&c.netlist, &c.scoap))
        }
        Command::Atpg {
            bench,
            faults,
            policy,
            endpoint,
            backtrack_limit,
            parallel,
            k,
            report,
        } => {
            let policy = match policy {
                Some(p) => p,
                None => match cfg.policy.as_deref() {
                    None | Some("ffr") => PolicyArg::Ffr,
                    Some("gate") => PolicyArg::Gate,
                    Some("rl") => PolicyArg::Rl,
                    Some(other) => return Err(anyhow!("unknown policy '{other}' in config").into()),
                },
            };
            let limit = limit(backtrack_limit);
            let parallel = parallel
                .or(cfg.parallel)
                .unwrap_or_else(default_parallelism)
                .max(1);
            let k = k.or(cfg.k).unwrap_or(DEFAULT_K);
            if k == 0 {
                return Err(anyhow!("--k must be positive").into());
            }
            let c = load_circuit(&bench)?;
            let universe = enumerate_faults(&c.netlist);
            let list = if faults.eq_ignore_ascii_case("all") {
                universe.clone()
            } else {
                let text = std::fs::read_to_string(&faults).with_context(|| faults.clone())?;
                parse_fault_list(&text, &c.netlist).with_context(|| faults.clone())?
            };
            let outcomes = match policy {
                PolicyArg::Gate => {
                    run_fault_list(&c, &list, || GateLevelHeuristic, limit.budget(), parallel)
                }
                PolicyArg::Ffr => {
                    run_fault_list(&c, &list, || FfrLevelHeuristic, limit.budget(), parallel)
                }
                PolicyArg::Rl => {
                    let endpoint = endpoint
                        .or(cfg.endpoint.clone())
                        .ok_or_else(|| anyhow!("--policy rl needs --endpoint"))?;
                    run_rl(&c, &list, &endpoint, k, limit.budget())?
                }
            }
            .map_err(internal)?;
            let run = RunFile {
                header: RunHeader {
                    circuit: c.netlist.name.clone(),
                    policy: policy.name().to_string(),
                    backtrack_limit: limit.0,
                    universe: universe.len() as u64,
                    dead_logic_faults: dead_logic_faults(&c.netlist).len() as u64,
                    ffr_avg_depth: c.partition.average_depth(),
                    seed,
                },
                rows: outcomes
                    .iter()
                    .map(|o| FaultRow {
                        fault: o.fault.display(&c.netlist).to_string(),
                        status: o.result.status,
                        backtracks: o.result.backtracks,
                        backtrace_steps: o.result.backtrace_steps,
                        decisions: o.result.decisions,
                    })
                    .collect(),
            };
            let mut buf = Vec::new();
            run.write(&mut buf).map_err(internal)?;
            match &report {
                Some(p) => {
                    std::fs::write(p, &buf).with_context(|| p.display().to_string())?;
                    let m = RunMetrics::from_outcomes(&outcomes);
                    let summary = serde_json::json!({
                        "circuit": run.header.circuit,
                        "policy": run.header.policy,
                        "metrics": m,
                        "ufp": report::ufp(m.undetected(), run.header.universe),
                    });
                    println!("{summary}");
                }
                None => io::stdout().write_all(&buf).map_err(internal)?,
            }
            Ok(())
        }
        Command::ServeEnv { listen, stdio } => {
            if stdio {
                let stdin = io::stdin();
                serve_stream(stdin.lock(), io::stdout().lock()).map_err(internal)?;
            } else {
                let listener = TcpListener::bind(&listen).with_context(|| listen.clone())?;
                eprintln!("listening on {}", listener.local_addr().map_err(internal)?);
                serve_tcp(listener).map_err(internal)?;
            }
            Ok(())
        }
        Command::Report {
            runs,
            target,
            format,
            out,
        } => {
            let files = runs
                .iter()
                .map(|p| {
                    let text =
                        std::fs::read_to_string(p).with_context(|| p.display().to_string())?;
                    RunFile::parse(&text)
                        .map_err(|e: RunFileError| anyhow!(e))
                        .with_context(|| p.display().to_string())
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let rows = report::build(&files, target.as_deref().or(cfg.target.as_deref()))?;
            let text = match format {
                Format::Csv => report::to_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).map_err(internal)? + "\n",
            };
            emit(out.as_deref(), &text)
        }
    }
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs the fault list serially with one agent connection.
fn run_rl(
    c: &Circuit,
    faults: &[FaultSite],
    endpoint: &str,
    k: usize,
    limit: u64,
) -> Result<Result<Vec<FaultOutcome>, ffr_atpg::FaultError>, Failure> {
    let agent = AgentClient::connect(endpoint).with_context(|| format!("agent at {endpoint}"))?;
    let mut policy = RlPolicy::new(agent, Arc::new(FeatureScale::new(c)), k);
    let mut out = Vec::with_capacity(faults.len());
    for &fault in faults {
        match generate_test(c, fault, &mut policy, limit) {
            Ok(result) => out.push(FaultOutcome { fault, result }),
            Err(e) => return Ok(Err(e)),
        }
    }
    if policy.fallbacks > 0 {
        log::warn!(
            "{} hops fell back to the distance heuristic",
            policy.fallbacks
        );
    }
    Ok(Ok(out))
}
