mod input;
mod report;
mod run;

use clap::{Args, Parser, Subcommand};
use raag::mccool::DEFAULT_TAIL_LEN;
use raag::RaagError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Untwisted automorphisms of right-angled Artin groups.
#[derive(Parser, Debug)]
#[command(name = "raag", version)]
pub struct Cli {
    /// Graph file: a `vertices: a b c` line, then `edge: a b` lines.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Print one JSON object instead of key=value lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search cap (states, nodes or ball vertices). Falls back to
    /// RAAG_STATE_CAP, then to each command's default.
    #[arg(long, global = true)]
    pub state_cap: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Normal form of a word.
    Reduce(WordArg),
    /// A cyclically reduced conjugate.
    Cyclic(WordArg),
    /// Reduced length and translation length.
    Length(WordArg),
    /// Conjugacy test with canonical representatives.
    Conj {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    #[command(subcommand)]
    Auto(AutoCmd),
    #[command(subcommand)]
    Wh(WhCmd),
    /// Peak-reduce a tuple of conjugacy classes.
    Minimize {
        /// Comma-separated words.
        #[arg(long)]
        targets: String,
        #[command(flatten)]
        constraints: Constraints,
    },
    /// Decide whether the McCool group carries one tuple to another.
    Equivalent {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[command(flatten)]
        constraints: Constraints,
    },
    /// Cyclic classes standing in for a fixed subgroup.
    ExpandFixed {
        /// Comma-separated generators of the subgroup.
        #[arg(long)]
        gens: String,
    },
    /// The graph with an isolated vertex added, and the family realizing
    /// the original automorphism group.
    AuterEmbed,
    #[command(subcommand)]
    Cube(CubeCmd),
    #[command(subcommand)]
    Spine(SpineCmd),
}

#[derive(Args, Debug)]
pub struct WordArg {
    #[arg(long)]
    pub word: String,
}

#[derive(Args, Debug)]
pub struct Constraints {
    /// Standard subgroups to stabilize up to conjugacy, e.g. `{a},{b,c}`.
    #[arg(long, default_value = "")]
    pub stabilize: String,
    /// Comma-separated words whose classes are fixed.
    #[arg(long, default_value = "")]
    pub fix: String,
    #[arg(long, default_value_t = DEFAULT_TAIL_LEN)]
    pub tail_len: usize,
}

#[derive(Subcommand, Debug)]
pub enum AutoCmd {
    /// Apply a product of generators to a word.
    Apply {
        /// Generator descriptors separated by `;`, e.g. `fold a b; inv b`.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        word: String,
    },
    /// Images of `left ∘ right`.
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Certify an automorphism and report its properties.
    Check {
        #[arg(long, conflicts_with = "images")]
        gens: Option<String>,
        /// Comma-separated images of the generators, in vertex order.
        #[arg(long, requires = "inverse_images")]
        images: Option<String>,
        #[arg(long)]
        inverse_images: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum WhCmd {
    /// Every Whitehead partition with its admissible basepoints.
    Enumerate,
    /// Validate a spec `P={..} Pstar={..} base=x`.
    Validate {
        #[arg(long)]
        partition: String,
    },
    /// Apply the Whitehead automorphism to a word.
    Apply {
        #[arg(long)]
        partition: String,
        #[arg(long)]
        word: String,
    },
    /// Quadrant partitions of two non-compatible based partitions.
    Quadrants {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// The relative condition against a family of standard subgroups.
    Relcond {
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "")]
        stabilize: String,
    },
    /// Crossings of a cyclic word with the blow-up hyperplane.
    Cross {
        #[arg(long)]
        partition: String,
        #[arg(long)]
        word: String,
    },
}

#[derive(Args, Debug)]
pub struct Radius {
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
}

#[derive(Subcommand, Debug)]
pub enum CubeCmd {
    /// Build a ball in the universal cover of the Salvetti complex.
    Ball {
        #[command(flatten)]
        radius: Radius,
        /// Accepted for symmetry with the other commands; stats are always printed.
        #[arg(long)]
        stats: bool,
        /// Write vertex, edge, square and hyperplane tables as JSON.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    Median {
        #[command(flatten)]
        radius: Radius,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
    },
    /// Min-set of an element inside the ball.
    Minset {
        #[command(flatten)]
        radius: Radius,
        #[arg(long)]
        g: String,
    },
    /// d(Min(g), Min(h)) against ℓ(gh)/2, for one pair or seeded samples.
    Distcheck {
        #[command(flatten)]
        radius: Radius,
        #[arg(long, requires = "h")]
        g: Option<String>,
        #[arg(long)]
        h: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// A vertex displaced boundedly by every listed element.
    Witness {
        #[command(flatten)]
        radius: Radius,
        /// Comma-separated elements.
        #[arg(long)]
        elements: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpineCmd {
    /// Pairwise-compatible sets of Whitehead partitions.
    Simplices {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long)]
        list: bool,
    },
    /// Whitehead-move graph of marked Salvettis under a norm bound.
    Movegraph {
        #[arg(long)]
        targets: String,
        /// Entrywise bound on the pulled target lengths, e.g. `4,4`.
        #[arg(long)]
        bound: String,
        #[arg(long, default_value = "")]
        stabilize: String,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Check the length-change formula, for one move or seeded samples.
    Changenorm {
        #[arg(long, requires = "partition")]
        targets: Option<String>,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Exit statuses beyond 0/1/2.
pub mod status {
    pub const PARSE: u8 = 64;
    pub const CAP: u8 = 65;
    pub const IO: u8 = 66;
    pub const INTERNAL: u8 = 70;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Raag(#[from] RaagError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Usage(_) => status::PARSE,
            CliError::Io { .. } => status::IO,
            CliError::Raag(e) => match e {
                RaagError::CapExceeded { .. } | RaagError::Clipped(_) | RaagError::NoWitness { .. } => status::CAP,
                RaagError::Internal(_) => status::INTERNAL,
                _ => status::PARSE,
            },
        }
    }
}

fn repro(graph_text: Option<&str>) {
    let args: Vec<String> = std::env::args().collect();
    eprintln!("repro: {args:?}");
    if let Some(text) = graph_text {
        eprintln!("graph:\n{text}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { status::PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(status::INTERNAL);
    }
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    let graph_text = cli.graph.as_ref().and_then(|p| std::fs::read_to_string(p).ok());
    match std::panic::catch_unwind(|| run::dispatch(&cli)) {
        Ok(Ok((report, code))) => {
            print!("{}", report.render(cli.json));
            ExitCode::from(code)
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let code = e.status();
            if code == status::INTERNAL {
                repro(graph_text.as_deref());
            }
            ExitCode::from(code)
        }
        Err(_) => {
            repro(graph_text.as_deref());
            ExitCode::from(status::INTERNAL)
        }
    }
}
