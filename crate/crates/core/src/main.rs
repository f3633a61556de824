use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtunnel::bench::{
    grid_minimum, gradcheck_suite, revisit_statistics, run_experiment, write_histogram, write_profile,
    ExperimentConfig, Method, ProblemKind, ProfileRecord, ToyOracle, HS_REVISIT_TOL, TOY_PERIOD,
};
use qtunnel::model::{exact_ground_energy, tfim_chain, tfim_grid, ChainSpec, GridSpec};
use qtunnel::tunnel::{dynamic_tunneling, DescentKind, Euclidean, HilbertSchmidt, TunnelConfig};
use qtunnel::{Error, Result};

/// Dynamic tunneling for variational quantum eigensolvers.
#[derive(Parser)]
#[command(name = "qtunnel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descend and tunnel on the one-dimensional demo cost.
    Toy(ToyArgs),
    /// Run a VQE ensemble described by a JSON config.
    Vqe(VqeArgs),
    /// Print the exact ground energy of an Ising model.
    Exact(ExactArgs),
    /// Compare adjoint, parameter-shift and finite-difference gradients.
    Gradcheck(GradcheckArgs),
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long, default_value_t = 2.2, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.005)]
    eta: f64,
    #[arg(long, default_value_t = 50.0)]
    k: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the iteration profile.
    #[arg(long, default_value = "toy_profile.csv")]
    profile: PathBuf,
}

#[derive(Args)]
struct VqeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExactArgs {
    /// Open chain with this many sites.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    chain: Option<usize>,
    /// Open lattice given as ROWSxCOLS.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    j: f64,
    #[arg(long = "B", default_value_t = 5.0, allow_negative_numbers = true)]
    b: f64,
}

#[derive(Args)]
struct GradcheckArgs {
    #[arg(long, default_value_t = 20)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Toy(args) => toy(args),
        Command::Vqe(args) => vqe(args),
        Command::Exact(args) => exact(args),
        Command::Gradcheck(args) => gradcheck(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}

fn toy(args: ToyArgs) -> Result<ExitCode> {
    let cfg = TunnelConfig {
        k: args.k,
        learning_rate: args.eta,
        max_tunnels: 10,
        seed: args.seed,
        ..Default::default()
    };
    let run = dynamic_tunneling(&ToyOracle, &Euclidean, &[args.x0], &cfg, DescentKind::Plain)?;
    for (i, sp) in run.stable_points.iter().enumerate() {
        println!(
            "stable point {}: x = {:.6}  f = {:.6}  lambda = {:.3}  descent iterations = {}",
            i + 1,
            sp.x[0],
            sp.value,
            sp.lambda,
            sp.descent_iters
        );
    }
    let (x_min, f_min) = grid_minimum(0.0, TOY_PERIOD, 1e-6);
    println!("termination: {}", run.termination.as_str());
    println!("final f = {:.9} at x = {:.6}", run.best.value, run.best.x[0]);
    println!("grid-scan minimum f = {f_min:.9} at x = {x_min:.6}");

    let profile: Vec<ProfileRecord> = run
        .trace
        .iter()
        .enumerate()
        .map(|(i, r)| ProfileRecord {
            sample_id: 0,
            global_iteration: i,
            phase: r.phase,
            f: r.value,
            distance_to_stable: r.distance,
        })
        .collect();
    write_profile(&profile, &args.profile)?;
    println!("profile written to {}", args.profile.display());
    Ok(ExitCode::SUCCESS)
}

fn vqe(args: VqeArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(n) = args.samples {
        cfg.n_samples = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    std::fs::create_dir_all(&args.out_dir).map_err(|source| Error::Io {
        path: args.out_dir.clone(),
        source,
    })?;

    let exp = run_experiment(&cfg)?;
    let histogram = args.out_dir.join("histogram.csv");
    let profile = args.out_dir.join("profile.csv");
    write_histogram(&exp.histogram(), &histogram)?;
    write_profile(&exp.profile(), &profile)?;

    let best = exp.samples.iter().map(|s| s.run.best.value).fold(f64::INFINITY, f64::min);
    println!("method: {}  samples: {}", cfg.method.as_str(), cfg.n_samples);
    println!("lowest final value: {best:.9}");
    if let Some(e0) = exact_reference(&cfg) {
        println!("exact ground energy: {e0:.9}");
        println!("fraction within 0.1 of exact: {:.3}", exp.success_fraction(e0, 0.1));
    }
    if cfg.method != Method::DescentOnly {
        let hs = revisit_statistics(exp.runs(), &HilbertSchmidt, HS_REVISIT_TOL);
        let eu = revisit_statistics(exp.runs(), &Euclidean, HS_REVISIT_TOL);
        println!(
            "same-state revisits: {} of {} tunneling phases (state distance), {} (parameter distance)",
            hs.n_revisits, hs.n_tunnel_starts, eu.n_revisits
        );
    }
    println!("histogram written to {}", histogram.display());
    println!("profile written to {}", profile.display());
    Ok(ExitCode::SUCCESS)
}

/// Exact energy for problems small enough to diagonalize.
fn exact_reference(cfg: &ExperimentConfig) -> Option<f64> {
    let h = match cfg.problem {
        ProblemKind::Toy => return None,
        ProblemKind::Chain => tfim_chain(ChainSpec {
            n_sites: cfg.n_sites?,
            j: cfg.j,
            b: cfg.b,
        }),
        ProblemKind::Grid => tfim_grid(GridSpec {
            rows: cfg.rows?,
            cols: cfg.cols?,
            j: cfg.j,
            b: cfg.b,
        }),
    };
    exact_ground_energy(&h.ok()?).ok()
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid must look like 3x4, got {text:?}"));
    let (r, c) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn exact(args: ExactArgs) -> Result<ExitCode> {
    let h = match (args.chain, &args.grid) {
        (Some(n), _) => tfim_chain(ChainSpec { n_sites: n, j: args.j, b: args.b })?,
        (None, Some(g)) => {
            let (rows, cols) = parse_grid(g)?;
            tfim_grid(GridSpec { rows, cols, j: args.j, b: args.b })?
        }
        (None, None) => return Err(Error::Config("give --chain N or --grid RxC".into())),
    };
    println!("{:.6}", exact_ground_energy(&h)?);
    Ok(ExitCode::SUCCESS)
}

fn gradcheck(args: GradcheckArgs) -> Result<ExitCode> {
    let mut worst: f64 = 0.0;
    for case in gradcheck_suite(args.draws, args.seed)? {
        println!(
            "{}: {} draws, max |adjoint - shift| = {:.2e}, max |adjoint - fd| = {:.2e}, max |shift - fd| = {:.2e}",
            case.name, case.draws, case.max_adjoint_vs_shift, case.max_adjoint_vs_fd, case.max_shift_vs_fd
        );
        worst = worst.max(case.max_deviation());
    }
    println!("max deviation: {worst:.2e}");
    if worst < args.tol {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("gradients disagree by more than {:e}", args.tol);
        Ok(ExitCode::from(2))
    }
}
