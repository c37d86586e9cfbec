use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tiltcert::canonize::Caps;
use tiltcert::cusp::DEFAULT_MARGIN;
use tiltcert_cli::{cmd_canonize, cmd_certify, cmd_lspace, CanonizeOptions, CertifyOptions, Fill, Format};

/// Certified canonical triangulations of cusped hyperbolic 3-manifolds.
///
/// Exit codes: 0 when everything requested was certified, 1 when some
/// certification failed or was inconclusive, 2 on unreadable input.
#[derive(Parser)]
#[command(name = "tiltcert", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify shapes, canonicity and the symmetry group of each file.
    Certify {
        /// Triangulation files (native text format or SnapPea `.tri`).
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Files certified in parallel.
        #[arg(long, env = "TILTCERT_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Also report H1 of a Dehn filling, `p,q` or `p,q:cusp`; repeat for
        /// several cusps.
        #[arg(long)]
        fill: Vec<Fill>,
        /// Relative margin for bracketing cusp areas with several cusps.
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        bracketing_margin: f64,
        /// Include wall-clock times (makes the output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Search for a canonical triangulation by Pachner moves.
    Canonize {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent searches with seeds `seed, seed+1, …`.
        #[arg(long, default_value_t = 1)]
        attempts: usize,
        #[arg(long, env = "TILTCERT_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Cap on the total number of moves per search.
        #[arg(long, default_value_t = Caps::default().max_moves)]
        max_moves: usize,
        /// Write the candidate triangulation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the replay trace (JSON) here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Orders of the L-space slopes α+β, 2α+β, …, nα+β.
    Lspace { order_alpha: u64, order_beta: u64, n: u64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Certify { files, jobs, fill, bracketing_margin, timings } => {
            let opts = CertifyOptions { jobs, fills: fill, format: cli.format, margin: bracketing_margin, timings };
            cmd_certify(&files, &opts)
        }
        Command::Canonize { file, seed, attempts, jobs, max_moves, out, trace } => {
            let caps = Caps { max_moves, ..Caps::default() };
            cmd_canonize(&file, &CanonizeOptions { seed, attempts, jobs, caps, out, trace, format: cli.format })
        }
        Command::Lspace { order_alpha, order_beta, n } => cmd_lspace(order_alpha, order_beta, n, cli.format),
    };
    print!("{}", out.stdout);
    ExitCode::from(out.code as u8)
}
