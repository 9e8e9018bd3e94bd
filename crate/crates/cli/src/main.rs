//! Command line front-end: fitting, cross-validation, split-based
//! evaluation, model-selection timing and synthetic data.

mod model;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rblda_core::{
    blda_fit, bpca_fit, cross_validate, fit_rlda, load_mts, rblda_fit_v2, run_bench, run_experiment, save_mts,
    synth_separable, BenchConfig, CvConfig, CvMethod, CvReport, Error, ErrorCategory, ExperimentConfig, Method,
    Proportion, RegGrid, Scaling, ScalingPolicy, WhiteningMode,
};

use model::ModelFile;

#[derive(Debug, Parser)]
#[command(name = "rblda", version, about = "Regularized bilinear discriminant analysis for matrix-valued data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one model and write it as JSON.
    Fit(FitArgs),
    /// Grid search over the regularization parameters by V-fold cross validation.
    Crossval(CrossvalArgs),
    /// Repeated random splits: cross validation, refit, dimension sweep, 1NN.
    Evaluate(EvaluateArgs),
    /// Time model selection for growing grids.
    Bench(BenchArgs),
    /// Write a synthetic dataset with well separated class means.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    method: Method,
    /// Column-direction parameter (the only one for rlda).
    #[arg(long, default_value_t = 0.5)]
    r1: f64,
    /// Row-direction parameter; defaults to r1.
    #[arg(long)]
    r2: Option<f64>,
    #[arg(long, default_value = "w")]
    scaling: Scaling,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CrossvalArgs {
    #[arg(long)]
    data: PathBuf,
    /// rblda or rlda.
    #[arg(long, default_value = "rblda")]
    method: Method,
    /// Comma-separated candidates in (0, 1]; the 13-value standard grid when absent.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Row-direction candidates; defaults to --grid.
    #[arg(long, value_delimiter = ',')]
    grid2: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "w")]
    scaling: Scaling,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// TOML file with any of the flag settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Fixed test set; splits then only subsample the training data.
    #[arg(long)]
    test_data: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    /// Training proportion per class, e.g. 1/2.
    #[arg(long)]
    proportion: Option<Proportion>,
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grid2: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// w, t, unit or best.
    #[arg(long)]
    scaling: Option<ScalingPolicy>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    /// Row-direction replication factor.
    #[arg(long, default_value_t = 1)]
    replicate: usize,
    /// Values of m; each run uses an m x m grid.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,50,100")]
    grids: Vec<usize>,
    #[arg(long, default_value = "1/16")]
    proportion: Proportion,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timed runs per grid size; the fastest is kept.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    d1: usize,
    #[arg(long)]
    d2: usize,
    #[arg(long)]
    classes: usize,
    #[arg(long)]
    per_class: usize,
    /// Distance between consecutive class means, in pattern units.
    #[arg(long)]
    gap: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Everything that ends the process early.
enum Failure {
    Core(Error),
    /// The report was written but the method could not run on the data.
    Unavailable(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Input => 2,
        ErrorCategory::Numerical => 3,
        ErrorCategory::Unavailable => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => fit(args),
        Command::Crossval(args) => crossval(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Bench(args) => bench(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
        Err(Failure::Unavailable(reason)) => {
            eprintln!("method unavailable: {reason}");
            ExitCode::from(exit_code(ErrorCategory::Unavailable))
        }
    }
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)?;
    Ok(())
}

fn fit(args: FitArgs) -> Result<(), Failure> {
    let data = load_mts(&args.data)?;
    let r2 = args.r2.unwrap_or(args.r1);
    let model = match args.method {
        Method::Rblda => ModelFile::from_rblda(&rblda_fit_v2(&data, args.r1, r2, args.scaling)?),
        Method::Rlda => ModelFile::from_rlda(&fit_rlda(&data, args.r1, args.scaling)?, data.dims()),
        Method::Blda => ModelFile::from_bilinear(&blda_fit(&data, WhiteningMode::Strict)?),
        Method::Pblda => ModelFile::from_bilinear(&blda_fit(&data, WhiteningMode::Pseudo)?),
        Method::Bpca => {
            let (q1, q2) = rblda_core::bilinear::total_scatter_ranks(&data)?;
            ModelFile::from_bilinear(&bpca_fit(&data, q1, q2)?)
        }
    };
    let json = serde_json::to_string_pretty(&model).expect("model serializes");
    write_output(&args.out, &(json + "\n"))
}

fn crossval_csv(report: &CvReport, rlda: bool) -> String {
    let mut out = String::from("i,j,r1,r2,error");
    for v in 0..report.folds {
        let _ = write!(out, ",fold{v}");
    }
    out.push_str(",selected\n");
    for i in 0..report.error_grid.nrows() {
        for j in 0..report.error_grid.ncols() {
            let r2 = if rlda { String::new() } else { report.grid2[j].to_string() };
            let _ = write!(out, "{i},{j},{},{r2},{}", report.grid1[i], report.error_grid[(i, j)]);
            for fold in &report.per_fold {
                let _ = write!(out, ",{}", fold[(i, j)]);
            }
            let _ = writeln!(out, ",{}", u8::from(report.selected == (i, j)));
        }
    }
    out
}

fn crossval(args: CrossvalArgs) -> Result<(), Failure> {
    let method = match args.method {
        Method::Rblda => CvMethod::Rblda,
        Method::Rlda => CvMethod::Rlda,
        other => {
            return Err(Error::Input(format!("cross validation supports rblda and rlda, not {other}")).into());
        }
    };
    let data = load_mts(&args.data)?;
    let grid = match args.grid {
        Some(v) => RegGrid::new(v)?,
        None => RegGrid::standard(),
    };
    let mut config = CvConfig::new(method, grid);
    config.grid2 = args.grid2.map(RegGrid::new).transpose()?;
    config.folds = args.folds;
    config.seed = args.seed;
    config.scaling = args.scaling;
    config.workers = args.workers;
    let report = cross_validate(&data, &config)?;
    write_output(&args.out, &crossval_csv(&report, method == CvMethod::Rlda))?;
    let (r1, r2) = report.selected_values;
    match r2 {
        Some(r2) => println!("selected r1 = {r1}, r2 = {r2}, cv error {}", report.error_grid[report.selected]),
        None => println!("selected r = {r1}, cv error {}", report.error_grid[report.selected]),
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&fs::read_to_string(path)?)?,
        None => {
            let method = args
                .method
                .ok_or_else(|| Error::Input("--method is required without --config".into()))?;
            ExperimentConfig::new(method)
        }
    };
    if let Some(m) = args.method {
        config.method = m;
    }
    if args.data.is_some() {
        config.data = args.data;
    }
    if args.test_data.is_some() {
        config.test_data = args.test_data;
    }
    if let Some(p) = args.proportion {
        config.train_proportion = p;
    }
    if let Some(s) = args.splits {
        config.splits = s;
    }
    if let Some(f) = args.folds {
        config.folds = f;
    }
    if args.grid.is_some() {
        config.grid = args.grid;
    }
    if args.grid2.is_some() {
        config.grid2 = args.grid2;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(s) = args.scaling {
        config.scaling = s;
    }
    if let Some(w) = args.workers {
        config.workers = w;
    }

    let path = config
        .data
        .clone()
        .ok_or_else(|| Error::Input("no dataset given (--data or `data` in the config)".into()))?;
    let data = load_mts(path)?;
    let test = config.test_data.as_ref().map(load_mts).transpose()?;
    let report = run_experiment(&data, test.as_ref(), &config)?;
    write_output(&args.out, &report.to_csv())?;
    match &report.outcome {
        rblda_core::experiment::MethodOutcome::Unavailable { reason } => Err(Failure::Unavailable(reason.clone())),
        rblda_core::experiment::MethodOutcome::Evaluated { summaries, best } => {
            let s = &summaries[*best];
            println!(
                "{} p = {}: mean error {:.4} (std {:.4}) at dims {:?}, scaling {}",
                report.method, report.proportion, s.mean_error, s.std_error, s.dims, s.scaling
            );
            Ok(())
        }
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let data = load_mts(&args.data)?;
    let config = BenchConfig {
        replicate: args.replicate,
        grid_sizes: args.grids,
        train_proportion: args.proportion,
        folds: args.folds,
        seed: args.seed,
        repeats: args.repeats,
        workers: args.workers,
    };
    let report = run_bench(&data, &config)?;
    write_output(&args.out, &report.to_csv())?;
    for row in &report.rows {
        println!("m^2 = {:>6}: {:.4} s, ratio {:.3}", row.candidates(), row.seconds, row.ratio);
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Failure> {
    if args.d1 == 0 || args.d2 == 0 {
        return Err(Error::Input("d1 and d2 must be positive".into()).into());
    }
    let data = synth_separable(
        args.d1,
        args.d2,
        args.per_class,
        args.classes,
        args.gap,
        args.sigma,
        args.seed,
    )?;
    save_mts(&args.out, &data)?;
    Ok(())
}
