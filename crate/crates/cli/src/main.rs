//! `refgraph`: analyse reference graphs from the command line.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "refgraph", version, about = "Analyse reference graphs: models, contradictions, Yablo-style constructions")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,

    /// Worker threads for model enumeration.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Largest number of sinks enumerated below one node.
    #[arg(long, env = "REFGRAPH_SINK_LIMIT", global = true)]
    pub sink_limit: Option<usize>,

    /// Longest path (in arrows) explored by path enumeration and search.
    #[arg(long, default_value_t = 32, global = true)]
    pub max_len: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DocFormat {
    Json,
    Dsl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityArg {
    Pos,
    Neg,
    Both,
}

/// Where a graph comes from: a file (`-` for stdin) or a built-in fixture.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Input {
    /// `.refgraph.json` or `.refgraph` file, `-` for stdin.
    #[arg(value_name = "GRAPH", required_unless_present = "fixture")]
    pub graph: Option<PathBuf>,

    /// Built-in graph: gamma, gamma-prime, four-paths, composition, triangle, pipeline:M.
    #[arg(long, conflicts_with = "graph")]
    pub fixture: Option<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Parse and validate a graph; optionally print it in canonical form.
    Validate {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        print: Option<DocFormat>,
    },
    /// Status of nodes: (C1) no model of x, (C2) no model of ¬x, or open.
    Check {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long)]
        node: Option<String>,
    },
    /// Enumerate the sink assignments making a node true or false.
    Models {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long)]
        node: String,
        #[arg(long, value_enum, default_value_t = PolarityArg::Both)]
        polarity: PolarityArg,
    },
    /// Symbolic model expressions M(x) and M(¬x).
    Expr {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long)]
        node: Option<String>,
    },
    /// Three-valued evaluation from sink values (`--sink z=xi`).
    Eval3 {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        /// `NODE=VALUE` with VALUE one of T, F, xi.
        #[arg(long = "sink", value_name = "NODE=VALUE")]
        sinks: Vec<String>,
    },
    /// Contradictory cells between two nodes and the odd-loop check.
    Cells {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The eighteen cell variants and the conditions they meet.
    ClassifyVariants,
    /// Print the truncation x0..xn of Yablo's structure.
    BuildYablo {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        print: Option<DocFormat>,
    },
    /// Replay an inductive construction and show the ledger of expressions.
    ReplayConstruction {
        /// Script file: JSON array of steps or one step per line.
        #[arg(long, conflicts_with = "depth", required_unless_present = "depth")]
        script: Option<PathBuf>,
        /// Use the canonical script with this many rounds.
        #[arg(long)]
        depth: Option<usize>,
        /// Only report these nodes.
        #[arg(long = "node")]
        nodes: Vec<String>,
    },
    /// Insert tautologies into the sides of the Yablo triangle (`--side xy:+`),
    /// or into one arrow of a given graph.
    InsertTautology {
        #[arg(value_name = "GRAPH")]
        graph: Option<PathBuf>,
        #[arg(long, value_name = "SIDE:SIGN", conflicts_with_all = ["graph", "arrow"])]
        side: Vec<String>,
        /// `FROM,TO` of the arrow to split.
        #[arg(long, requires = "graph")]
        arrow: Option<String>,
        #[arg(long, default_value = "+")]
        sign: String,
        #[arg(long, value_enum)]
        print: Option<DocFormat>,
    },
    /// Label the contradictory cells at an origin as safe or escape hazards.
    AuditComposition {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
        #[arg(long, default_value = "x0")]
        origin: String,
    },
    /// Search for a contradiction-preserving injection of x0..xn into a bare graph.
    Inject {
        #[command(flatten)]
        #[serde(flatten)]
        target: Input,
        #[arg(long)]
        n: usize,
        /// Search nodes explored before giving up.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Find an injection, extend it to an interpretation and check the ξ values.
    Extend {
        #[command(flatten)]
        #[serde(flatten)]
        target: Input,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
        #[arg(long, value_enum)]
        print: Option<DocFormat>,
    },
    /// Statuses, expressions and path richness of every node.
    Report {
        #[command(flatten)]
        #[serde(flatten)]
        input: Input,
    },
}

impl Command {
    /// `--print FORMAT` replaces the report by the canonical document.
    fn print(&self) -> Option<DocFormat> {
        match self {
            Command::Validate { print, .. }
            | Command::BuildYablo { print, .. }
            | Command::InsertTautology { print, .. }
            | Command::Extend { print, .. } => *print,
            _ => None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("refgraph: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            let doc = out.report["result"].get("document").filter(|_| cli.command.print().is_some());
            let text = match (doc, cli.format) {
                (Some(Value::String(s)), _) => s.clone(),
                (Some(d), _) => {
                    let mut s = serde_json::to_string_pretty(d).expect("documents serialize");
                    s.push('\n');
                    s
                }
                (None, OutputFormat::Json) => {
                    let mut s = serde_json::to_string_pretty(&out.report).expect("reports serialize");
                    s.push('\n');
                    s
                }
                (None, OutputFormat::Text) => render::text(&out.report),
            };
            print!("{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("refgraph: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
