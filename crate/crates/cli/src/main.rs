//! `quadot` command line: parameter sweeps written as CSV plus a JSON sidecar.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use quadot::manybody::AssemblyMode;
use quadot::sweep::{self, Command, RunMetadata, EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL};

/// Environment failures (I/O, thread pool) outside the documented 0/2/3/4 set.
const EXIT_IO: i32 = 1;

#[derive(Parser)]
#[command(
    name = "quadot",
    version,
    about = "Four-dot singlet-triplet qubit sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Tracked energies and branch compositions along one axis.
    Spectrum(RunArgs),
    /// Spectral and effective exchange of the left qubit along one axis.
    Exchange(RunArgs),
    /// Inter-qubit exchange, capacitive coupling and their ratio.
    Couplings(RunArgs),
    /// Effective exchange of both qubits over an eps_l x eps_r grid.
    Crosstalk(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides `[output] csv`. Without either the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Hamiltonian assembly; overrides the config's `mode`.
    #[arg(long)]
    mode: Option<AssemblyMode>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::Exchange(a) => (Command::Exchange, a),
        Sub::Couplings(a) => (Command::Couplings, a),
        Sub::Crosstalk(a) => (Command::Crosstalk, a),
    };
    ExitCode::from(execute(command, args) as u8)
}

fn execute(command: Command, args: RunArgs) -> i32 {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    let mut config = match sweep::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return sweep::exit_code(&e);
        }
    };
    if let Some(m) = args.mode {
        config.mode = m;
    }
    if let Some(out) = args.out {
        config.output.csv = Some(out);
    }

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };
    let start = Instant::now();
    let table = match pool.install(|| sweep::run(command, &config)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return sweep::exit_code(&e);
        }
    };
    let wall = start.elapsed().as_secs_f64();

    let csv = table.to_csv();
    match &config.output.csv {
        Some(path) => {
            let meta = RunMetadata::new(command, &config, &table, pool.current_num_threads(), wall);
            let json = config.json_path(path);
            if let Err(e) =
                fs::write(path, csv).and_then(|_| fs::write(&json, meta.to_json() + "\n"))
            {
                eprintln!("error: cannot write output: {e}");
                return EXIT_IO;
            }
        }
        None => print!("{csv}"),
    }

    let masked = table.masked_rows();
    if masked > 0 {
        eprintln!("warning: {masked} of {} rows masked", table.rows.len());
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}
