mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use exelkit::rational::FloatPolicy;

#[derive(Parser, Debug)]
#[command(
    name = "exelkit",
    version,
    about = "Transfer operators, Exel systems and Cuntz-Krieger families on finite data"
)]
struct Cli {
    /// Print `key<TAB>value` lines instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Accept decimal input, rounded to this many significant digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    float: Option<u32>,
    /// JSON file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for independent inputs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    #[command(subcommand)]
    Graph(GraphCmd),
    #[command(subcommand)]
    Cp(CpCmd),
    #[command(subcommand)]
    Exel(ExelCmd),
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph documents, fixture names, or `lazy:<rose|star>:<rule>`.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// `file`, `uniform`, a rational constant, or a JSON file of edge weights.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Edges inspected on lazy graphs.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowArg {
    Boundary,
    Fock,
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    CheckLambda(GraphArgs),
    Classify(GraphArgs),
    Ideals(GraphArgs),
    Represent(GraphArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MatrixArgs {
    /// Matrix as JSON rows or CSV, or a fixture name.
    #[arg(required = true)]
    pub inputs: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum CpCmd {
    Analyze(MatrixArgs),
    Quiver(MatrixArgs),
    Correspondence(MatrixArgs),
}

#[derive(Subcommand, Debug)]
enum ExelCmd {
    /// Regular endomorphisms for a positive map, or for the transfer operator
    /// of a graph on its depth-`d` truncation.
    EnumerateRegular(GraphArgs),
}

#[derive(Subcommand, Debug)]
enum FixturesCmd {
    List,
    /// Writes every built-in fixture as JSON into a directory.
    Export {
        dir: PathBuf,
    },
}

/// Defaults read from `--config`; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    lambda: Option<String>,
    depth: Option<usize>,
    budget: Option<usize>,
    window: Option<WindowArg>,
    table: Option<bool>,
    float: Option<u32>,
    jobs: Option<usize>,
}

pub struct Settings {
    pub lambda: String,
    /// `None` when neither flag nor config gave one; commands pick their own.
    pub depth: Option<usize>,
    pub budget: usize,
    pub window: WindowArg,
    pub policy: FloatPolicy,
    pub jobs: usize,
}

impl Settings {
    pub fn depth_or(&self, d: usize) -> usize {
        self.depth.unwrap_or(d)
    }
}

/// Mathematical negatives exit with 2, input errors with 1.
pub struct Outcome {
    pub report: serde_json::Value,
    pub negative: bool,
}

fn settings(cli: &Cli, args: Option<&GraphArgs>) -> Result<(Settings, bool)> {
    let cfg: Config = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("{}: file not found", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("{}: bad config", p.display()))?
        }
        None => Config::default(),
    };
    let float = cli.float.or(cfg.float);
    let s = Settings {
        lambda: args.and_then(|a| a.lambda.clone()).or(cfg.lambda).unwrap_or_else(|| "file".into()),
        depth: args.and_then(|a| a.depth).or(cfg.depth),
        budget: args.and_then(|a| a.budget).or(cfg.budget).unwrap_or(1000),
        window: args.and_then(|a| a.window).or(cfg.window).unwrap_or(WindowArg::Boundary),
        policy: float.map_or(FloatPolicy::Reject, |digits| FloatPolicy::Round { digits }),
        jobs: cli.jobs.or(cfg.jobs).unwrap_or(1).max(1),
    };
    Ok((s, cli.table || cfg.table.unwrap_or(false)))
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let graph_args = match &cli.command {
        Command::Graph(
            GraphCmd::CheckLambda(a) | GraphCmd::Classify(a) | GraphCmd::Ideals(a) | GraphCmd::Represent(a),
        ) => Some(a),
        Command::Exel(ExelCmd::EnumerateRegular(a)) => Some(a),
        _ => None,
    };
    let (s, table) = settings(cli, graph_args)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(s.jobs).build()?;
    let outcome = pool.install(|| match &cli.command {
        Command::Graph(GraphCmd::CheckLambda(a)) => commands::each(&a.inputs, |i| commands::check_lambda(i, &s)),
        Command::Graph(GraphCmd::Classify(a)) => commands::each(&a.inputs, |i| commands::classify(i, &s)),
        Command::Graph(GraphCmd::Ideals(a)) => commands::each(&a.inputs, |i| commands::ideals(i, &s)),
        Command::Graph(GraphCmd::Represent(a)) => commands::each(&a.inputs, |i| commands::represent(i, &s)),
        Command::Cp(CpCmd::Analyze(a)) => commands::each(&a.inputs, |i| commands::cp_analyze(i, &s)),
        Command::Cp(CpCmd::Quiver(a)) => commands::each(&a.inputs, |i| commands::cp_quiver(i, &s)),
        Command::Cp(CpCmd::Correspondence(a)) => commands::each(&a.inputs, |i| commands::cp_correspondence(i, &s)),
        Command::Exel(ExelCmd::EnumerateRegular(a)) => {
            commands::each(&a.inputs, |i| commands::enumerate_regular(i, &s))
        }
        Command::Fixtures(FixturesCmd::List) => commands::fixtures_list(),
        Command::Fixtures(FixturesCmd::Export { dir }) => commands::fixtures_export(dir),
    })?;
    let text = if table { output::table(&outcome.report) } else { output::json(&outcome.report) };
    Ok((text, outcome.negative))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, negative)) => {
            println!("{text}");
            if negative {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
