use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dynlcs::bench::{bench, CSV_HEADER};
use dynlcs::replay::{run, Options, RunError};
use dynlcs::stream::{parse, InputError, Mode};

/// Maintain the longest common substring of two strings under letter
/// substitutions.
///
/// Replays an update stream and prints "<index> <length> <s_pos> <t_pos>" per
/// step (index 0 is the initial pair, "-" marks absent positions). Exit codes:
/// 0 ok, 1 oracle mismatch, 2 input error.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// Stream file, or "-" for standard input.
    #[arg(required_unless_present = "bench")]
    stream: Option<PathBuf>,

    /// Check every answer against the quadratic DP oracle; exit 1 on the first mismatch.
    #[arg(long)]
    oracle_check: bool,

    /// Print one JSON object per line instead of plain text.
    #[arg(long)]
    json: bool,

    /// Seed for the grammar's random bipartitions (full mode).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Time random substitutions instead of replaying a stream and print CSV
    /// (n,ops,mean_us,median_us,p99_us). Every size is run twice and the
    /// second, warm run is reported.
    #[arg(long)]
    bench: bool,

    /// Engine to benchmark.
    #[arg(long, value_enum, default_value_t = Mode::Full, requires = "bench")]
    mode: Mode,

    /// Comma-separated string lengths to benchmark.
    #[arg(long, value_delimiter = ',', default_values_t = [256usize, 1024], requires = "bench")]
    sizes: Vec<usize>,

    /// Substitutions timed per size.
    #[arg(long, default_value_t = 200, requires = "bench")]
    ops: usize,
}

fn read_stream(path: &PathBuf) -> Result<String, InputError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError::Unsupported(format!("{}: {e}", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());

    if cli.bench {
        if cli.sizes.contains(&0) || cli.ops == 0 {
            eprintln!("error: --sizes and --ops must be positive");
            return ExitCode::from(2);
        }
        let mut lines = vec![CSV_HEADER.to_string()];
        lines.extend(cli.sizes.iter().map(|&n| bench(cli.mode, n, cli.ops, cli.seed).csv()));
        return match writeln!(out, "{}", lines.join("\n")) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: output: {e}");
                ExitCode::from(2)
            }
        };
    }

    let path = cli.stream.expect("clap requires a stream without --bench");
    let result = read_stream(&path)
        .and_then(|text| parse(&text))
        .map_err(RunError::from)
        .and_then(|stream| run(&stream, Options { oracle_check: cli.oracle_check, json: cli.json, seed: cli.seed }, &mut out));
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(e @ RunError::Mismatch { .. }), _) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: output: {e}");
            ExitCode::from(2)
        }
    }
}
