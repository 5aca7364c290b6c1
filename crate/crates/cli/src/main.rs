use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcc::analysis::{
    gen_clustering, measure, run_rate_benchmark, run_time_benchmark, write_csv, RateRow,
    SavingsReport, SizeProfile,
};
use rcc::baselines::roc1_size_order;
use rcc::container::{compress, decompress};
use rcc::format::{self, FileFormat};
use rcc::{Backend, Clustering, CodecId};

#[derive(Parser)]
#[command(
    name = "rcc",
    version,
    about = "Lossless compression of clusterings with random cycle coding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a clustering file into an RCC1 container.
    Encode(EncodeArgs),
    /// Decompress an RCC1 container back into a clustering file.
    Decode(DecodeArgs),
    /// Check a clustering file and print its savings report.
    Verify(VerifyArgs),
    /// Benchmark codecs over a grid of (n, k) cells and write CSV.
    Bench(BenchArgs),
    /// Generate a synthetic clustering file.
    Gen(GenArgs),
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "rcc")]
    codec: CodecId,
    #[arg(long, default_value = "exact")]
    backend: Backend,
    /// Element width for text files that contain no elements.
    #[arg(long, default_value_t = 1)]
    width: usize,
}

#[derive(Args)]
struct DecodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "text")]
    format: FileFormat,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    width: usize,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    /// Median encode+decode wall time per cell and codec.
    Time,
    /// Formula versus measured savings per cell and codec.
    Rate,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated `n:k` cells, e.g. `10000:100,100000:316`.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[arg(long, value_delimiter = ',', default_value = "rcc,roc1,roc2,seq")]
    codecs: Vec<CodecId>,
    #[arg(long, default_value = "stream")]
    backend: Backend,
    #[arg(long, value_enum, default_value = "time")]
    mode: BenchMode,
    /// Timing repeats per cell (time mode) or clusterings per cell (rate mode).
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 8)]
    width: usize,
    #[arg(long, env = "RCC_SEED", default_value_t = 0)]
    seed: u64,
    /// Grid cells timed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long, default_value = "equal")]
    profile: String,
    #[arg(long, default_value_t = 4)]
    width: usize,
    #[arg(long, env = "RCC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "text")]
    format: FileFormat,
    /// Destination; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Grid(Vec<(u64, u64)>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.split(',')
        .map(|cell| {
            let (n, k) = cell
                .split_once(':')
                .ok_or_else(|| format!("grid cell {cell:?} is not n:k"))?;
            let parse = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("{v:?}: {e}"));
            Ok((parse(n)?, parse(k)?))
        })
        .collect::<Result<_, _>>()
        .map(Grid)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] rcc::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use rcc::Error as E;
        match self {
            CliError::Core(E::DuplicateElement(_)) => 2,
            CliError::Core(E::Parse { .. }) => 3,
            CliError::Core(E::WidthMismatch { .. } | E::ZeroWidth | E::WidthTooSmall { .. }) => 4,
            CliError::Core(E::Corrupt(_) | E::Truncated { .. }) => 5,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::File {
        path: path.into(),
        source,
    })
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::File {
            path: p.into(),
            source,
        }),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::File {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn report_for(clustering: &Clustering, name: &str) -> CliResult<SavingsReport> {
    Ok(SavingsReport::from_sizes(
        name,
        &roc1_size_order(clustering),
    )?)
}

fn encode(args: EncodeArgs) -> CliResult {
    let clustering = format::parse_any(&read(&args.input)?, args.width)?;
    let out = compress(&clustering, args.codec, args.backend)?;
    write_to(Some(&args.output), &out.bytes)?;
    let m = &measure(&clustering, &[args.codec], args.backend, 0)?[0];
    println!("codec              {}", args.codec);
    println!("backend            {}", args.backend);
    println!("n                  {}", clustering.n());
    println!("k                  {}", clustering.k());
    println!("stack bits         {}", out.stack.ceil_bits());
    println!("container bytes    {}", out.bytes.len());
    println!("formula savings    {:.3} bits", m.formula_savings_bits);
    println!("measured savings   {:.3} bits", m.measured_savings_bits);
    Ok(())
}

fn decode(args: DecodeArgs) -> CliResult {
    let (_, clustering) = decompress(&read(&args.input)?)?;
    write_to(
        Some(&args.output),
        &format::write(&clustering, args.format)?,
    )
}

fn verify(args: VerifyArgs) -> CliResult {
    let clustering = format::parse_any(&read(&args.input)?, args.width)?;
    let name = args.input.display().to_string();
    let report = report_for(&clustering, &name)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let mut csv = Vec::new();
    let json = match args.mode {
        BenchMode::Time => {
            let rows = run_time_benchmark(
                &args.grid.0,
                &args.codecs,
                args.backend,
                args.width,
                args.repeats,
                args.seed,
                args.jobs,
            )?;
            write_csv(&rows, &mut csv)?;
            serde_json::to_vec_pretty(&rows)?
        }
        BenchMode::Rate => {
            let mut reports = Vec::new();
            for &(n, k) in &args.grid.0 {
                reports.extend(run_rate_benchmark(
                    &SizeProfile::Equal { n, k },
                    &args.codecs,
                    args.backend,
                    args.width,
                    args.repeats,
                    args.seed,
                )?);
            }
            write_csv(&RateRow::from_reports(&reports), &mut csv)?;
            serde_json::to_vec_pretty(&reports)?
        }
    };
    write_to(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.json {
        write_to(Some(path), &json)?;
    }
    Ok(())
}

fn generate(args: GenArgs) -> CliResult {
    let profile = SizeProfile::from_name(&args.profile, args.n, args.k)?;
    let clustering = gen_clustering(&profile, args.width, args.seed)?;
    write_to(
        args.out.as_deref(),
        &format::write(&clustering, args.format)?,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rcc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
