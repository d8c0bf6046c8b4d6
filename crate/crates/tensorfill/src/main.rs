use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use tensorfill::experiment::{self, ExperimentSpec};
use tensorfill::io;
use tensorfill::{Error, Result};
use tensorfill_core::contraction::{complete_contraction, ContractionConfig, ContractionThreshold, SplitMode};
use tensorfill_core::matrix::{incoherence_params, unfolding_params, UnfoldingParams};
use tensorfill_core::random::{generate, stream_rng, ComponentDistribution, RandomTensorSpec};
use tensorfill_core::sampling::{sample_mask, SamplingMode};
use tensorfill_core::tensor::{multilinear_rank, numerical_rank, project_mask};
use tensorfill_core::unfold::{complete_unfold, UnfoldConfig, UnfoldThreshold};
use tensorfill_core::{SpectrumSide, DEFAULT_RANK_TOL};

/// Spectral completion of low-rank tensors from a subset of their entries.
#[derive(Parser)]
#[command(name = "tensorfill", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random symmetric tensor T = Σ a_s^{⊗k}.
    Generate(GenerateArgs),
    /// Reveal a random subset of a tensor's entries.
    Sample(SampleArgs),
    /// Complete an observation file.
    Complete(CompleteArgs),
    /// Report incoherence parameters of a tensor or matrix file.
    Params(ParamsArgs),
    /// Run a Monte-Carlo sweep described by a TOML or JSON file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Gaussian,
    Rademacher,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value_t = DistributionArg::Gaussian)]
    distribution: DistributionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Also write the components a_s.
    #[arg(long)]
    components: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Exact,
    Bernoulli,
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(long)]
    tensor: PathBuf,
    /// Number of entries (exact) or expected number of entries (bernoulli).
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SamplingArg::Exact)]
    mode: SamplingArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Unfold,
    Contract,
}

#[derive(Clone, Copy, Debug)]
enum LambdaArg {
    Value(f64),
    AutoTheorem,
    AutoSimulation,
}

fn parse_lambda(s: &str) -> std::result::Result<LambdaArg, String> {
    match s {
        "auto-theorem" => Ok(LambdaArg::AutoTheorem),
        "auto-simulation" => Ok(LambdaArg::AutoSimulation),
        v => match v.parse::<f64>() {
            Ok(x) if x.is_finite() && x >= 0.0 => Ok(LambdaArg::Value(x)),
            _ => Err(format!("expected a non-negative number, auto-theorem or auto-simulation, got `{v}`")),
        },
    }
}

fn parse_params(s: &str) -> std::result::Result<UnfoldingParams, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || format!("expected R,ALPHA,MU, got `{s}`");
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(UnfoldingParams {
        big_r: parts[0].trim().parse().map_err(|_| bad())?,
        alpha: parts[1].trim().parse().map_err(|_| bad())?,
        mu: parts[2].trim().parse().map_err(|_| bad())?,
    })
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    ExactSizes,
    Bernoulli,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    LeftSingular,
    Symmetrized,
}

#[derive(clap::Args)]
struct CompleteArgs {
    #[arg(long)]
    observations: PathBuf,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// A number, `auto-theorem` or `auto-simulation` (unfold only). Defaults
    /// to `auto-simulation` for unfold and `auto-theorem` for contract.
    #[arg(long, value_parser = parse_lambda)]
    lambda_star: Option<LambdaArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Ground-truth tensor: reports the normalized error and supplies the
    /// unfolding parameters for `auto-theorem`.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Unfolding parameters `R,ALPHA,MU` for `auto-theorem`.
    #[arg(long, value_parser = parse_params)]
    params: Option<UnfoldingParams>,
    /// Slack t >= 1 for the Bernoulli-model regime check (unfold).
    #[arg(long)]
    slack: Option<f64>,
    /// Leading factor of `auto-simulation`.
    #[arg(long, default_value_t = 3.0)]
    simulation_factor: f64,
    /// Rank r for the contract `auto-theorem` threshold.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, value_enum, default_value_t = SplitArg::Bernoulli)]
    split: SplitArg,
    #[arg(long, value_enum, default_value_t = SideArg::LeftSingular)]
    side: SideArg,
}

#[derive(clap::Args)]
struct ParamsArgs {
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    tensor: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    plotdata: Option<PathBuf>,
    /// Override the replicate count of the config.
    #[arg(long)]
    replicates: Option<usize>,
    /// Run replicates one after another on the calling thread.
    #[arg(long)]
    serial: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Complete(a) => cmd_complete(a),
        Command::Params(a) => cmd_params(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_kv(pairs: &[(&str, String)]) {
    let mut out = std::io::stdout().lock();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let mut spec = RandomTensorSpec::new(a.k, a.d, a.r, a.seed);
    spec.distribution = match a.distribution {
        DistributionArg::Gaussian => ComponentDistribution::Gaussian,
        DistributionArg::Rademacher => ComponentDistribution::Rademacher,
    };
    let (t, comps) = generate(&spec)?;
    io::write_file(&a.output, |w| io::write_tensor(w, &t))?;
    if let Some(path) = &a.components {
        io::write_file(path, |w| io::write_components(w, &comps))?;
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let t = io::load_tensor(&a.tensor)?;
    let mode = match a.mode {
        SamplingArg::Exact => SamplingMode::ExactN,
        SamplingArg::Bernoulli => SamplingMode::Bernoulli,
    };
    let mask = sample_mask(t.order(), t.dim(), a.n, mode, &mut stream_rng(a.seed, 0))?;
    let y = project_mask(&t, &mask)?;
    io::write_file(&a.output, |w| io::write_observations(w, &y))
}

fn cmd_complete(a: CompleteArgs) -> Result<()> {
    let y = io::load_observations(&a.observations)?;
    let truth = a.truth.as_deref().map(io::load_tensor).transpose()?;
    if let Some(t) = &truth {
        if (t.order(), t.dim()) != (y.order(), y.dim()) {
            return Err(Error::Infeasible(format!(
                "truth has k={}, d={} but the observations have k={}, d={}",
                t.order(),
                t.dim(),
                y.order(),
                y.dim()
            )));
        }
    }
    let started = Instant::now();
    let mut result = match a.algorithm {
        AlgorithmArg::Unfold => {
            let params = match (a.params, &truth) {
                (Some(p), _) => Some(p),
                (None, Some(t)) => Some(unfolding_params(t, DEFAULT_RANK_TOL)?),
                (None, None) => None,
            };
            let threshold = match a.lambda_star.unwrap_or(LambdaArg::AutoSimulation) {
                LambdaArg::Value(l) => UnfoldThreshold::Fixed(l),
                LambdaArg::AutoSimulation => UnfoldThreshold::Simulation {
                    factor: a.simulation_factor,
                },
                LambdaArg::AutoTheorem if params.is_none() => {
                    return Err(Error::Config("auto-theorem needs --params or --truth".into()));
                }
                LambdaArg::AutoTheorem => UnfoldThreshold::Theorem,
            };
            let cfg = UnfoldConfig {
                threshold,
                params,
                slack: a.slack,
                split: SamplingMode::ExactN,
                seed: a.seed,
                stream: 0,
            };
            complete_unfold(&y, &cfg)?
        }
        AlgorithmArg::Contract => {
            let threshold = match a.lambda_star.unwrap_or(LambdaArg::AutoTheorem) {
                LambdaArg::Value(l) => ContractionThreshold::Fixed(l),
                LambdaArg::AutoTheorem => match a.rank {
                    Some(rank) => ContractionThreshold::Theorem { rank },
                    None => return Err(Error::Config("auto-theorem for contract needs --rank".into())),
                },
                LambdaArg::AutoSimulation => {
                    return Err(Error::Config("auto-simulation applies to the unfold algorithm only".into()));
                }
            };
            let cfg = ContractionConfig {
                threshold,
                split: match a.split {
                    SplitArg::ExactSizes => SplitMode::ExactSizes,
                    SplitArg::Bernoulli => SplitMode::Bernoulli,
                },
                side: match a.side {
                    SideArg::LeftSingular => SpectrumSide::LeftSingular,
                    SideArg::Symmetrized => SpectrumSide::SymmetrizedEigen,
                },
                seed: a.seed,
                stream: 0,
            };
            complete_contraction(&y, &cfg)?
        }
    };
    result.diagnostics.elapsed = Some(started.elapsed());
    io::write_file(&a.output, |w| io::write_tensor(w, &result.estimate))?;
    let mut kv = result.diagnostics.key_values();
    if let Some(t) = &truth {
        kv.push(("mse", io::fmt_f64(experiment::mse(t, &result.estimate)?)));
    }
    print_kv(&kv);
    Ok(())
}

fn cmd_params(a: ParamsArgs) -> Result<()> {
    if let Some(path) = &a.tensor {
        let t = io::load_tensor(path)?;
        let p = unfolding_params(&t, a.tol)?;
        let ranks = multilinear_rank(&t, a.tol)?;
        let ranks: Vec<String> = ranks.ranks.iter().map(usize::to_string).collect();
        print_kv(&[
            ("k", t.order().to_string()),
            ("d", t.dim().to_string()),
            ("R", p.big_r.to_string()),
            ("alpha", io::fmt_f64(p.alpha)),
            ("mu", io::fmt_f64(p.mu)),
            ("varpi", io::fmt_f64(p.varpi())),
            ("multilinear_rank", ranks.join(",")),
        ]);
    } else if let Some(path) = &a.matrix {
        let m = io::load_matrix(path)?;
        let p = incoherence_params(&m)?;
        print_kv(&[
            ("d1", m.nrows().to_string()),
            ("d2", m.ncols().to_string()),
            ("rank", numerical_rank(&m, a.tol).to_string()),
            ("lambda", io::fmt_f64(p.lambda)),
            ("gamma", io::fmt_f64(p.gamma)),
            ("rho", io::fmt_f64(p.rho)),
        ]);
    }
    Ok(())
}

fn write_or_stdout(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
            let mut w = std::io::BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| Error::io(p, e))
        }
        None => f(&mut std::io::stdout().lock()),
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let mut spec = ExperimentSpec::from_path(&a.config)?;
    if let Some(r) = a.replicates {
        spec.replicates = r;
        spec.validate()?;
    }
    let outcome = experiment::run_experiment(&spec, !a.serial)?;
    for reason in &outcome.skipped {
        eprintln!("skipped: {reason}");
    }
    if outcome.records.is_empty() {
        return Err(Error::Infeasible("no feasible grid point".into()));
    }
    write_or_stdout(a.csv.as_deref(), |w| experiment::emit_csv(&outcome.records, w))?;
    if let Some(p) = &a.plotdata {
        write_or_stdout(Some(p), |w| experiment::emit_plotdata(&outcome.records, w))?;
    }
    Ok(())
}
