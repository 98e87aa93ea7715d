use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use promkit::data::{
    read_model_bundle, read_snapshot_file, write_matrix_file, write_model_bundle, ParameterPoint,
};
use promkit::dmd::train_ensemble;
use promkit::manifold::{interpolate_local_rom, InterpolationConfig};
use promkit::reconstruct::predict_qoi_trajectory;
use promkit::{Error, Result};
use promkit_harness::config::ExperimentConfig;
use promkit_harness::runner::{run_benchmark, Method};
use promkit_harness::{problems, report};

/// Parametric reduced-order modeling toolkit.
#[derive(Parser)]
#[command(name = "promkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model ensemble from a JSON experiment configuration.
    Train(TrainArgs),
    /// Predict a trajectory at a new parameter from a trained bundle.
    Predict(PredictArgs),
    /// Run the full benchmark sweep and write reports.
    Bench(BenchArgs),
    /// Compare methods on one configuration and print a table.
    Compare(CompareArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output model bundle directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model bundle directory.
    #[arg(long)]
    model: PathBuf,
    /// Target parameter coordinates.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    param: Vec<f64>,
    /// Snapshot file whose first column is the initial QoI vector.
    #[arg(long)]
    init: PathBuf,
    /// Number of prediction steps.
    #[arg(long)]
    steps: usize,
    /// Output trajectory file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output report directory.
    #[arg(long)]
    out: PathBuf,
    /// Methods to benchmark.
    #[arg(long, value_delimiter = ',', default_value = "dmd,kriging")]
    methods: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated methods: dmd, pod, kriging.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long)]
    config: PathBuf,
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = names
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<_>>>()?;
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    Ok(out)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_file(&args.config)?;
    let data = problems::generate(&cfg, &cfg.train_parameters, cfg.snapshots)?;
    let ens = train_ensemble(&data.datasets, &data.lift, cfg.rank)?;
    write_model_bundle(&args.out, &ens)?;
    println!(
        "trained {} local models (rank {}) -> {}",
        ens.roms().len(),
        ens.rank(),
        args.out.display()
    );
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let ens = read_model_bundle(&args.model)?;
    let init = read_snapshot_file(&args.init)?;
    if init.qoi_dim() != ens.lift().qoi_dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial snapshot has dimension {}, model expects {}",
            init.qoi_dim(),
            ens.lift().qoi_dim()
        )));
    }
    let target = ParameterPoint::new(args.param.clone())?;
    let rom = interpolate_local_rom(&ens, &target, &InterpolationConfig::default())?;
    let q0: Vec<f64> = (0..init.qoi_dim()).map(|i| init.data()[(i, 0)]).collect();
    let (pred, diag) = predict_qoi_trajectory(&rom, &q0, args.steps)?;
    write_matrix_file(&args.out, pred.as_ref())?;
    println!(
        "wrote {} ({} x {}), spectral radius {:.4}",
        args.out.display(),
        pred.nrows(),
        pred.ncols(),
        diag.spectral_radius
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_file(&args.config)?;
    let methods = parse_methods(&args.methods)?;
    let rep = run_benchmark(&cfg, &methods)?;
    report::write_report(&args.out, &rep)?;
    print!("{}", report::render_table(&rep));
    println!("reports written to {}", args.out.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_file(&args.config)?;
    let methods = parse_methods(&args.methods)?;
    let rep = run_benchmark(&cfg, &methods)?;
    print!("{}", report::render_table(&rep));
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Numerical(_) | Error::NonFinite(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    promkit::parallel::configure_threads_from_env();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
