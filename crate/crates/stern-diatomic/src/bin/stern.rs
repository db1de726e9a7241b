//! Subcommand front end over the library; all behavior lives in
//! `stern_diatomic::cli::commands`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stern_diatomic::cli::commands::{self, ComputeMethod, GlobalOpts, Outcome, OutputFormat};
use stern_diatomic::verify::GapMode;

#[derive(Parser)]
#[command(
    name = "stern",
    version,
    about = "Exact computation and verification for Stern's diatomic sequence \
             and its piecewise-linear record envelope"
)]
struct Cli {
    /// Working precision in bits for floating-point quantities.
    #[arg(long, global = true, default_value_t = 128)]
    prec: u32,

    /// Report format for emitting commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Fast,
    Naive,
    Pair,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Integers,
    Pieces,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a(n).
    Compute {
        n: String,
        #[arg(long, value_enum, default_value_t = Method::Fast)]
        method: Method,
    },
    /// Recompute the embedded 22-row fixture of (a(m), h(m)) and diff it.
    Table,
    /// List record points (n, m_n, F_n).
    Records {
        #[arg(long, default_value_t = 20)]
        max_n: u64,
    },
    /// Evaluate the envelope h at a point (integer or p/q).
    Envelope {
        x: String,
        /// Also evaluate the asymptotic approximation.
        #[arg(long)]
        asym: bool,
    },
    /// Exact gap report over an integer range.
    Gaps {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = Mode::Integers)]
        mode: Mode,
    },
    /// Range verifications with pass/fail exit status.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Streaming ratio scan over [2, max-m] with optional checkpointing.
    Scan {
        #[arg(long)]
        max_m: String,
        /// Emit a CSV row at every multiple of this index (0 = none).
        #[arg(long, default_value_t = 4096)]
        emit_every: u64,
        /// Checkpoint file; an existing one resumes the scan.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// The limit constant and its classical brackets.
    Constant,
    /// Cross-check sequence values against an OEIS b-file.
    OeisCheck {
        /// Local b-file path (default: the embedded offline fixture).
        #[arg(long, conflicts_with = "fetch")]
        bfile: Option<PathBuf>,
        /// Fetch the live b-file over HTTP.
        #[arg(long)]
        fetch: bool,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// a(m) <= h(m) for every m up to the bound, exactly.
    Domination {
        #[arg(long, default_value = "1000000")]
        max_m: String,
    },
    /// Brute-force interval maxima against (F_n, m_n).
    Records {
        #[arg(long, default_value_t = 20)]
        max_n: u64,
    },
    /// Exact gap report (always exits 0; witnesses are in the report).
    Gaps {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = Mode::Integers)]
        mode: Mode,
    },
    /// Upper-envelope comparison report (always exits 0).
    Upper {
        #[arg(long, default_value_t = 8)]
        n_lo: u64,
        #[arg(long, default_value_t = 24)]
        n_hi: u64,
        /// Interior integer samples per interval.
        #[arg(long)]
        grid: Option<u32>,
    },
}

impl From<Mode> for GapMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Integers => GapMode::Integers,
            Mode::Pieces => GapMode::Pieces,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = GlobalOpts {
        prec: cli.prec,
        format: match cli.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
        out: cli.out,
    };
    let result = match cli.command {
        Command::Compute { n, method } => {
            let method = match method {
                Method::Fast => ComputeMethod::Fast,
                Method::Naive => ComputeMethod::Naive,
                Method::Pair => ComputeMethod::Pair,
                Method::All => ComputeMethod::All,
            };
            commands::cmd_compute(&n, method, &g)
        }
        Command::Table => commands::cmd_table(&g),
        Command::Records { max_n } => commands::cmd_records(max_n, &g),
        Command::Envelope { x, asym } => commands::cmd_envelope(&x, asym, &g),
        Command::Gaps { from, to, mode } => commands::cmd_gaps(&from, &to, mode.into(), &g),
        Command::Verify { kind } => match kind {
            VerifyKind::Domination { max_m } => commands::cmd_verify_domination(&max_m, &g),
            VerifyKind::Records { max_n } => commands::cmd_verify_records(max_n, &g),
            VerifyKind::Gaps { from, to, mode } => {
                commands::cmd_gaps(&from, &to, mode.into(), &g)
            }
            VerifyKind::Upper { n_lo, n_hi, grid } => {
                commands::cmd_verify_upper(n_lo, n_hi, grid, &g)
            }
        },
        Command::Scan {
            max_m,
            emit_every,
            checkpoint,
        } => commands::cmd_scan(&max_m, emit_every, checkpoint.as_deref(), &g),
        Command::Constant => commands::cmd_constant(&g),
        Command::OeisCheck { bfile, fetch } => {
            commands::cmd_oeis_check(bfile.as_deref(), fetch, &g)
        }
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
