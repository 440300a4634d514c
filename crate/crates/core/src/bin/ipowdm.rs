use std::error::Error;
use std::fs;
use std::io::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ipowdm::experiment::{
    averages, averages_to_csv, compare, rows_to_csv, run_experiment, run_single, savings_to_csv, ExperimentConfig,
};
use ipowdm::plan::PlanDocument;
use ipowdm::topology::builtin;
use ipowdm::{network_power, Architecture, ModeCatalog, Topology, TrafficScenario};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "ipowdm", version, about = "Plan IP-over-WDM networks with ZR/ZR+ pluggables and report their power")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a full-mesh traffic matrix.
    GenTraffic {
        #[command(flatten)]
        one: Single,
    },
    /// Provision one matrix and print the plan document.
    Plan {
        #[command(flatten)]
        one: Single,
        #[arg(long, default_value = "TrIPandZR")]
        arch: Architecture,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Per-node equipment and power of a plan, generated or read from `--plan`.
    Power {
        #[command(flatten)]
        one: Single,
        #[arg(long, default_value = "TrIPandZR")]
        arch: Architecture,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Plan document written by `plan`; overrides --arch/--scenario/--seed.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Savings of every architecture against a baseline, averaged over seeds.
    Compare {
        #[command(flatten)]
        batch: Batch,
        #[arg(long, default_value = "OpIP")]
        baseline: Architecture,
    },
    /// Every run plus per-cell averages.
    Experiment {
        #[command(flatten)]
        batch: Batch,
    },
}

#[derive(Args)]
struct Single {
    /// Topology file, or J14 / G17.
    #[arg(long, default_value = "J14")]
    topology: String,
    /// Scenario file, or TS1 / TS2 / TS3.
    #[arg(long, default_value = "TS1")]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Batch {
    /// Repeatable; defaults to J14 and G17.
    #[arg(long)]
    topology: Vec<String>,
    /// Repeatable; defaults to every architecture.
    #[arg(long)]
    arch: Vec<Architecture>,
    /// Repeatable; defaults to TS1, TS2 and TS3.
    #[arg(long)]
    scenario: Vec<String>,
    /// Seeds 0..runs.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail if any demand is blocked.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn load_topology(arg: &str) -> Result<Topology> {
    if FsPath::new(arg).is_file() {
        return Ok(Topology::parse(&fs::read_to_string(arg)?)?);
    }
    match builtin::load(arg) {
        Some(t) => Ok(t?),
        None => Err(format!("no topology file or built-in topology named `{arg}`").into()),
    }
}

fn load_scenario(arg: &str) -> Result<TrafficScenario> {
    let path = FsPath::new(arg);
    if path.is_file() {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg).to_ascii_uppercase();
        return Ok(TrafficScenario::from_json(&name, &fs::read_to_string(path)?)?);
    }
    Ok(TrafficScenario::builtin(arg)?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Print to stdout, or write `name` under `dir`.
fn emit(dir: Option<&FsPath>, name: &str, text: &str) -> Result<()> {
    match dir {
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DemandOut<'a> {
    src: &'a str,
    dst: &'a str,
    rate_gbps: u32,
}

fn batch_config(b: &Batch) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::shipped(b.runs);
    if !b.topology.is_empty() {
        cfg.topologies = b.topology.iter().map(|t| load_topology(t)).collect::<Result<_>>()?;
    }
    if !b.arch.is_empty() {
        cfg.architectures = b.arch.clone();
    }
    if !b.scenario.is_empty() {
        cfg.scenarios = b.scenario.iter().map(|s| load_scenario(s)).collect::<Result<_>>()?;
    }
    cfg.planner.k = b.k;
    cfg.strict = b.strict;
    Ok(cfg)
}

fn single_config(one: &Single, k: usize) -> Result<(ExperimentConfig, Topology, TrafficScenario)> {
    let topology = load_topology(&one.topology)?;
    let scenario = load_scenario(&one.scenario)?;
    let mut cfg = ExperimentConfig::shipped(1);
    cfg.planner.k = k;
    Ok((cfg, topology, scenario))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenTraffic { one } => {
            let topology = load_topology(&one.topology)?;
            let scenario = load_scenario(&one.scenario)?;
            let m = ipowdm::generate_traffic(&topology, &scenario, one.seed);
            let text = match one.format {
                Format::Csv => m.to_csv(&topology)?,
                Format::Json => json(
                    &m.demands
                        .iter()
                        .map(|d| DemandOut {
                            src: topology.node_name(d.src),
                            dst: topology.node_name(d.dst),
                            rate_gbps: d.rate_gbps,
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            emit(one.out.as_deref(), &format!("traffic.{}", one.format.ext()), &text)
        }
        Command::Plan { one, arch, k } => {
            let (cfg, topology, scenario) = single_config(&one, k)?;
            let (row, outcome) = run_single(&cfg, &topology, arch, &scenario, one.seed)?;
            let m = ipowdm::generate_traffic(&topology, &scenario, one.seed);
            let doc = PlanDocument::from_outcome(&outcome, &m);
            let mut text = doc.to_json();
            text.push('\n');
            emit(one.out.as_deref(), "plan.json", &text)?;
            if one.out.is_some() {
                emit(one.out.as_deref(), "run.csv", &rows_to_csv(std::slice::from_ref(&row)))?;
            }
            Ok(())
        }
        Command::Power { one, arch, k, plan } => {
            let (cfg, topology, scenario) = single_config(&one, k)?;
            let outcome = match plan {
                Some(path) => PlanDocument::from_json(&fs::read_to_string(path)?)?
                    .to_outcome(&topology, &ModeCatalog::default())?,
                None => run_single(&cfg, &topology, arch, &scenario, one.seed)?.1,
            };
            let report = network_power(&outcome.state, &cfg.power_table, &cfg.dimensioning);
            let text = match one.format {
                Format::Csv => report.to_csv()?,
                Format::Json => json(&report),
            };
            emit(one.out.as_deref(), &format!("power.{}", one.format.ext()), &text)
        }
        Command::Compare { batch, baseline } => {
            let cfg = batch_config(&batch)?;
            let mut archs = cfg.architectures.clone();
            if !archs.contains(&baseline) {
                archs.push(baseline);
            }
            let cfg = ExperimentConfig { architectures: archs.clone(), ..cfg };
            let cells = averages(&run_experiment(&cfg)?);
            let savings = compare(&cells, &archs, baseline);
            let text = match batch.format {
                Format::Csv => savings_to_csv(&savings),
                Format::Json => json(&savings),
            };
            emit(batch.out.as_deref(), &format!("savings.{}", batch.format.ext()), &text)
        }
        Command::Experiment { batch } => {
            let cfg = batch_config(&batch)?;
            let rows = run_experiment(&cfg)?;
            let cells = averages(&rows);
            let (runs, means) = match batch.format {
                Format::Csv => (rows_to_csv(&rows), averages_to_csv(&cells)),
                Format::Json => (json(&rows), json(&cells)),
            };
            let ext = batch.format.ext();
            emit(batch.out.as_deref(), &format!("runs.{ext}"), &runs)?;
            if batch.out.is_some() {
                emit(batch.out.as_deref(), &format!("averages.{ext}"), &means)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
