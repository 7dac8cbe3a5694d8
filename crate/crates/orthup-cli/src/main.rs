//! Command-line front end for rank-one updates of orthogonal
//! factorizations: apply a single update, track a stream of them,
//! measure subspace distances, and time the available methods.
//!
//! Exit codes: 0 on success, 1 when the input is structurally sound but
//! the requested operation is mathematically undefined (deflating update,
//! singular coefficient factor, …), 2 for usage, parse, and shape errors.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orthup::update::{rank_one_update_with_tol, DEFAULT_DEFLATION_TOL};
use orthup::{
    principal_angles, read_matrix, read_update_stream, time_update, track, write_matrix,
    write_report, Error, Factorization, Method, OrthonormalFactor, TrackError, TrackerConfig,
    WKind,
};

#[derive(Parser)]
#[command(
    name = "orthup",
    version,
    about = "Rank-one updates of orthogonal factorizations X = UW"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one rank-one update X + abᵀ and write the updated factors.
    Update(UpdateArgs),
    /// Apply a stream of updates, writing a per-step CSV report.
    Track(TrackArgs),
    /// Print the distance between the spans of two orthonormal bases.
    Dist(DistArgs),
    /// Time update methods over a grid of sizes, printing CSV rows.
    Bench(BenchArgs),
}

#[derive(Args)]
struct UpdateArgs {
    /// Orthonormal factor U, as a text matrix file.
    #[arg(long)]
    u: PathBuf,
    /// Coefficient factor W, as a text matrix file.
    #[arg(long)]
    w: PathBuf,
    /// Update stream holding exactly one record (entries of a, then b).
    #[arg(long)]
    ab: PathBuf,
    /// Where to write the updated U.
    #[arg(long)]
    out_u: PathBuf,
    /// Where to write the updated W.
    #[arg(long)]
    out_w: PathBuf,
    /// Relative deflation tolerance for the range test.
    #[arg(long, default_value_t = DEFAULT_DEFLATION_TOL)]
    tol: f64,
}

#[derive(Args)]
struct TrackArgs {
    /// Initial orthonormal factor U, as a text matrix file.
    #[arg(long)]
    u: PathBuf,
    /// Initial coefficient factor W, as a text matrix file.
    #[arg(long)]
    w: PathBuf,
    /// Update stream, one record per line (entries of a, then b).
    #[arg(long)]
    stream: PathBuf,
    /// Update method: geodesic, brand, kaufman, or refactor.
    #[arg(long, default_value = "geodesic")]
    method: String,
    /// Reorthogonalize every K updates (0 disables).
    #[arg(long, default_value_t = 0)]
    reorth_every: usize,
    /// Where to write the per-step CSV report.
    #[arg(long)]
    report: PathBuf,
    /// Where to write the final U (optional).
    #[arg(long)]
    out_u: Option<PathBuf>,
    /// Where to write the final W (optional).
    #[arg(long)]
    out_w: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    /// First orthonormal basis, as a text matrix file.
    #[arg(long)]
    u: PathBuf,
    /// Second orthonormal basis, as a text matrix file.
    #[arg(long)]
    v: PathBuf,
    /// Also print the principal angles, ascending, one per line.
    #[arg(long)]
    angles: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated list of row counts n.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated list of column counts p.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<usize>,
    /// Timed repetitions per shape.
    #[arg(long, default_value_t = 9)]
    reps: usize,
    /// Update method: geodesic, brand, kaufman, or refactor.
    #[arg(long, default_value = "geodesic")]
    method: String,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    Lib(Error),
    Track(TrackError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(err) => err.fmt(f),
            CliError::Track(err) => err.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

impl From<TrackError> for CliError {
    fn from(err: TrackError) -> Self {
        CliError::Track(err)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let domain = match self {
            CliError::Lib(err) => err.is_domain(),
            CliError::Track(err) => err.source.is_domain(),
        };
        if domain {
            1
        } else {
            2
        }
    }
}

/// Reads `U` and `W` files into a validated factorization.
fn read_factorization(u_path: &PathBuf, w_path: &PathBuf) -> Result<Factorization, CliError> {
    let u = OrthonormalFactor::new(read_matrix(u_path)?)?;
    let w = read_matrix(w_path)?;
    Ok(Factorization::new(u, w, WKind::General)?)
}

/// Checks a stream header against the factorization it will be applied to.
fn check_stream_dims(f: &Factorization, n: usize, p: usize) -> Result<(), CliError> {
    let (fn_, fp) = f.dims();
    if (n, p) != (fn_, fp) {
        return Err(CliError::Lib(Error::DimensionMismatch {
            context: "update stream header",
            expected: format!("{fn_} {fp}"),
            got: format!("{n} {p}"),
        }));
    }
    Ok(())
}

fn run_update(args: UpdateArgs) -> Result<(), CliError> {
    let f = read_factorization(&args.u, &args.w)?;
    let (n, p, updates) = read_update_stream(&args.ab)?;
    check_stream_dims(&f, n, p)?;
    if updates.len() != 1 {
        return Err(CliError::Lib(Error::InvalidConfig {
            message: format!(
                "expected exactly one update record, found {}",
                updates.len()
            ),
        }));
    }
    let out = rank_one_update_with_tol(&f, &updates[0], args.tol)?;
    println!("distance_rad={}", out.distance);
    println!("kind={}", out.kind);
    write_matrix(&args.out_u, out.factorization.u().mat())?;
    write_matrix(&args.out_w, out.factorization.w())?;
    Ok(())
}

fn run_track(args: TrackArgs) -> Result<(), CliError> {
    let f = read_factorization(&args.u, &args.w)?;
    let (n, p, updates) = read_update_stream(&args.stream)?;
    check_stream_dims(&f, n, p)?;
    let method: Method = args.method.parse()?;
    let cfg = TrackerConfig {
        reorth_every: args.reorth_every,
        method,
        record_distances: true,
        ..TrackerConfig::default()
    };
    let (final_f, reports) = track(&f, &updates, &cfg)?;
    write_report(&args.report, &reports)?;
    if let Some(path) = &args.out_u {
        write_matrix(path, final_f.u().mat())?;
    }
    if let Some(path) = &args.out_w {
        write_matrix(path, final_f.w())?;
    }
    println!("tracked {} updates", reports.len());
    Ok(())
}

fn run_dist(args: DistArgs) -> Result<(), CliError> {
    let u = OrthonormalFactor::new(read_matrix(&args.u)?)?;
    let v = OrthonormalFactor::new(read_matrix(&args.v)?)?;
    let angles = principal_angles(&u, &v)?;
    println!("{}", angles.distance());
    if args.angles {
        let mut thetas: Vec<f64> = angles.thetas().iter().copied().collect();
        thetas.sort_by(f64::total_cmp);
        for theta in thetas {
            println!("{theta}");
        }
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let method: Method = args.method.parse()?;
    println!("n,p,method,median_ns,mean_ns");
    for &n in &args.n {
        for &p in &args.p {
            let stats = time_update(n, p, method, args.reps, args.seed)?;
            println!("{n},{p},{method},{},{}", stats.median_ns, stats.mean_ns);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Update(args) => run_update(args),
        Command::Track(args) => run_track(args),
        Command::Dist(args) => run_dist(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
