//! `dl-harmonics`: exact experiments with harmonic functions on
//! Diestel-Leader graphs.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails
//! (a JSON report goes to stdout), 2 on invalid input.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dl_harmonics::walks::Alpha;

#[derive(Parser)]
#[command(name = "dl-harmonics", version, about, args_override_self = true)]
struct Cli {
    /// JSON file with default values for the subcommand's flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct GraphArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub r: u32,
}

#[derive(Args, Clone)]
pub struct WalkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Drift parameter, "NUM/DEN"
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: Alpha,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum WalkKind {
    /// `P_α` on DL(q, r)
    P,
    /// `Q_α` on the switch-walk-switch graph
    Q,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Variant {
    Dl,
    Dls,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Model {
    WalkSwitch,
    SwitchWalkSwitch,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a lifted Martin kernel K_i(x, ξ)
    KernelEval {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, value_enum)]
        side: Side,
        /// End as JSON: {"omega": true} or {"labels": [[k, v], ...]}
        #[arg(long)]
        end: String,
        /// Vertex as JSON: {"x1": {...}, "x2": {...}}
        #[arg(long)]
        at: String,
    },
    /// Check P h = h exactly at sampled vertices of a ball
    HarmonicCheck {
        /// Harmonic function as JSON, inline or a file path
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the Dirichlet problem on the truncation S^(n)
    DirichletSolve {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        n: u32,
        /// Verify the product formula against the two tree tables
        #[arg(long)]
        check_product: bool,
        /// Write the hitting table as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a harmonic function as h1 + h2 on S^(n)
    Decompose {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: u32,
    },
    /// Sample a trajectory, one JSON vertex per line
    Simulate {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, value_enum, default_value = "p")]
        kind: WalkKind,
        /// Run the projected walk on one of the trees instead
        #[arg(long, value_enum)]
        tree: Option<Side>,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start vertex as JSON (root by default)
        #[arg(long)]
        start: Option<String>,
    },
    /// Monte-Carlo estimate of the hitting probability F(x, y)
    EstimateF {
        #[command(flatten)]
        walk: WalkArgs,
        /// Estimate on one of the trees instead of DL(q, r)
        #[arg(long, value_enum)]
        tree: Option<Side>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1_000)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop a run once the closed-form hitting bound drops below this
        #[arg(long, default_value_t = 1e-9)]
        escape_tolerance: f64,
    },
    /// Compare Cayley graph adjacency with DL(q, q) adjacency
    CayleyCheck {
        #[arg(long)]
        q: u32,
        /// Elements with |k| ≤ span and lamps supported in [-span, span]
        #[arg(long, default_value_t = 2)]
        span: i64,
    },
    /// Defect of a group element and the defect kernel
    Defect {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "walk-switch")]
        model: Model,
        /// Group element as JSON: {"k": k, "eta": [[n, v], ...]}
        #[arg(long)]
        element: String,
        /// Boundary configuration as JSON: {"side": "+", "labels": [[n, v], ...]}
        #[arg(long)]
        xi: String,
    },
    /// Export a ball around the root as DOT or JSON
    GraphExport {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value = "dl")]
        variant: Variant,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_alpha(text: &str) -> Result<Alpha, String> {
    Alpha::parse(text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    let outcome = match cli.command {
        Command::KernelEval { walk, side, end, at } => commands::kernel_eval(&walk, side, &end, &at),
        Command::HarmonicCheck { spec, samples, radius, seed } => {
            commands::harmonic_check(&spec, samples, radius, seed)
        }
        Command::DirichletSolve { walk, n, check_product, out } => {
            commands::dirichlet_solve(&walk, n, check_product, out.as_deref())
        }
        Command::Decompose { spec, n } => commands::decompose(&spec, n),
        Command::Simulate { walk, kind, tree, steps, seed, start } => {
            commands::simulate(&walk, kind, tree, steps, seed, start.as_deref())
        }
        Command::EstimateF { walk, tree, from, to, trials, horizon, seed, escape_tolerance } => {
            commands::estimate_f(&walk, tree, &from, &to, trials, horizon, seed, escape_tolerance)
        }
        Command::CayleyCheck { q, span } => commands::cayley_check(q, span),
        Command::Defect { q, model, element, xi } => commands::defect(q, model, &element, &xi),
        Command::GraphExport { graph, radius, variant, format, out } => {
            commands::graph_export(&graph, radius, variant, format, out.as_deref())
        }
    };
    match outcome {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
