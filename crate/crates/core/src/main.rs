use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use robnet::experiments::{
    run_experiment_a, run_experiment_b, run_experiment_d, ExperimentAConfig, ExperimentBConfig, ExperimentDConfig,
    ExperimentResult,
};
use robnet::graphon::{run_chain, write_chain_csv, ChainConfig, GraphonBall};
use robnet::info::{InfoIndexReport, T_GRID};
use robnet::metrics::{MetricsRow, DEFAULT_REFERENCE_SEEDS};
use robnet::models::{
    sample_configuration_model, sample_gnm, sample_graphon, sample_sparse_er, sample_two_block_sbm, DegreeModel,
    LabelledSbmParams, SparseErParams, StepGraphon,
};
use robnet::robust::{
    default_step, kl_tilt_solve, mirror_descent_adversary, sensitivity_curve, Divergence, Normalization, PhiBall,
    TiltSolution, DEFAULT_TOL,
};
use robnet::{Error, Graph, Result, WeightedSample};

#[derive(Parser)]
#[command(name = "robnet", version, about = "Robust Bayesian analysis of random-graph models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it as an edge list.
    Sample(SampleArgs),
    /// Descriptive metrics of an edge-list graph as one CSV row.
    Metrics {
        input: PathBuf,
        /// Seeds for the G(n, m) reference graphs of the small-world index.
        #[arg(long, default_value_t = DEFAULT_REFERENCE_SEEDS)]
        reference_seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// KL and Chernoff indices for ER versus the two-block SBM.
    Indices {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        lambda: f64,
        /// Also report finite-n divergences per vertex.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case risk over a KL ball (one radius) or a sensitivity curve (several).
    Tilt {
        input: PathBuf,
        #[arg(long, conflicts_with = "radii")]
        radius: Option<f64>,
        /// Comma-separated increasing radii.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Rho)]
        normalization: NormalizationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mirror-descent adversary over a KL or χ² ball.
    Mirror {
        input: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = BallArg::Kl)]
        ball: BallArg,
        /// Defaults to 0.5 / max |L − mean|.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain of perturb/rescale moves inside a KL ball around a step graphon.
    Graphon {
        #[arg(long)]
        center_file: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 1000)]
        moves: usize,
        /// Vertex count of the induced graph law.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a synthetic experiment from a JSON config.
    Experiment {
        #[arg(value_enum)]
        which: ExperimentArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    /// Mean degree for `er` and `sbm`.
    #[arg(long, default_value_t = 3.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Poisson degree mean for `cm`.
    #[arg(long, default_value_t = 0.8)]
    mean: f64,
    /// Edge count for `gnm`.
    #[arg(long)]
    m: Option<usize>,
    /// JSON step graphon for `graphon`.
    #[arg(long)]
    graphon_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Er,
    Sbm,
    Graphon,
    Cm,
    Gnm,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Rho,
    Var,
    None,
}

impl From<NormalizationArg> for Normalization {
    fn from(a: NormalizationArg) -> Self {
        match a {
            NormalizationArg::Rho => Normalization::RhoSqrtC,
            NormalizationArg::Var => Normalization::VarSqrtC,
            NormalizationArg::None => Normalization::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BallArg {
    Kl,
    Chi2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    A,
    B,
    D,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_sample(path: &Path) -> Result<WeightedSample> {
    WeightedSample::read_csv(BufReader::new(File::open(path)?))
}

fn write_solution(sample: &WeightedSample, sol: &TiltSolution, out: &mut dyn Write) -> Result<()> {
    let lambda = sol.lambda_star.map_or_else(|| "none".to_string(), |l| l.to_string());
    writeln!(
        out,
        "# lambda_star={lambda} robust_risk={} achieved_kl={} achieved_divergence={}",
        sol.robust_risk, sol.achieved_kl, sol.achieved_divergence
    )?;
    writeln!(out, "atom,weight,loss,tilted_weight")?;
    let losses = sample.require_losses()?;
    for (((a, w), l), q) in sample.atoms().iter().zip(sample.weights()).zip(losses).zip(&sol.tilted_weights) {
        writeln!(out, "{a},{w},{l},{q}")?;
    }
    Ok(())
}

fn sample_graph(args: &SampleArgs) -> Result<Graph> {
    match args.model {
        ModelArg::Er => Ok(sample_sparse_er(&SparseErParams::new(args.n, args.c)?, args.seed)),
        ModelArg::Sbm => {
            Ok(sample_two_block_sbm(&LabelledSbmParams::with_halves(args.n, args.c, args.lambda)?, args.seed))
        }
        ModelArg::Graphon => {
            let path =
                args.graphon_file.as_ref().ok_or_else(|| Error::Parameter("--graphon-file is required".into()))?;
            let w = StepGraphon::from_json(&fs::read_to_string(path)?)?;
            Ok(sample_graphon(args.n, &w, args.seed).0)
        }
        ModelArg::Cm => sample_configuration_model(args.n, &DegreeModel::Poisson(args.mean), args.seed),
        ModelArg::Gnm => {
            let m = args.m.ok_or_else(|| Error::Parameter("--m is required".into()))?;
            sample_gnm(args.n, m, args.seed)
        }
    }
}

fn run_experiment(which: ExperimentArg, config: &str, seed: u64) -> Result<ExperimentResult> {
    let parse = |e: serde_json::Error| Error::Parse(format!("config: {e}"));
    Ok(match which {
        ExperimentArg::A => {
            run_experiment_a(&serde_json::from_str::<ExperimentAConfig>(config).map_err(parse)?, seed)?.to_result()
        }
        ExperimentArg::B => {
            run_experiment_b(&serde_json::from_str::<ExperimentBConfig>(config).map_err(parse)?, seed)?.to_result()
        }
        ExperimentArg::D => {
            run_experiment_d(&serde_json::from_str::<ExperimentDConfig>(config).map_err(parse)?, seed)?.to_result()
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(args) => {
            let g = sample_graph(&args)?;
            let mut out = output(&args.out)?;
            g.write_edge_list(&mut out)?;
            out.flush()?;
        }
        Command::Metrics { input, reference_seeds, out } => {
            let g = Graph::read_edge_list(BufReader::new(File::open(input)?))?;
            let seeds: Vec<u64> = (0..reference_seeds).collect();
            let row = MetricsRow::compute(&g, &seeds)?;
            let mut out = output(&out)?;
            writeln!(out, "{}", MetricsRow::HEADER)?;
            writeln!(out, "{}", row.to_csv())?;
            out.flush()?;
        }
        Command::Indices { c, lambda, n, out } => {
            let report = InfoIndexReport::compute(c, lambda, n, T_GRID)?;
            let mut out = output(&out)?;
            writeln!(out, "{}", InfoIndexReport::HEADER)?;
            writeln!(out, "{}", report.to_csv())?;
            out.flush()?;
        }
        Command::Tilt { input, radius, radii, tol, normalization, out } => {
            let sample = read_sample(&input)?;
            let mut out = output(&out)?;
            match (radius, radii) {
                (Some(c), None) => write_solution(&sample, &kl_tilt_solve(&sample, c, tol)?, &mut out)?,
                (None, Some(radii)) => sensitivity_curve(&sample, &radii, normalization.into())?.write_csv(&mut out)?,
                _ => return Err(Error::Parameter("pass exactly one of --radius or --radii".into())),
            }
            out.flush()?;
        }
        Command::Mirror { input, radius, ball, step, iters, out } => {
            let sample = read_sample(&input)?;
            let kind = match ball {
                BallArg::Kl => Divergence::Kl,
                BallArg::Chi2 => Divergence::ChiSquared,
            };
            let step = match step {
                Some(s) => s,
                None => default_step(&sample)?,
            };
            let sol = mirror_descent_adversary(&sample, PhiBall::new(kind, radius)?, step, iters)?;
            let mut out = output(&out)?;
            write_solution(&sample, &sol, &mut out)?;
            out.flush()?;
        }
        Command::Graphon { center_file, radius, moves, n, alpha, rho, seed, out } => {
            let center = StepGraphon::from_json(&fs::read_to_string(center_file)?)?;
            let k = center.k();
            let ball = GraphonBall::new(center, radius, n)?;
            let trace = run_chain(&ball, &ChainConfig { moves, alpha, rho, ..Default::default() }, seed)?;
            let mut out = output(&out)?;
            write_chain_csv(&trace, k, &mut out)?;
            out.flush()?;
        }
        Command::Experiment { which, config, seed, out, threads } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| Error::Parameter(e.to_string()))?;
            }
            let result = run_experiment(which, &fs::read_to_string(config)?, seed)?;
            let mut out = output(&out)?;
            result.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
