//! Replicated Monte-Carlo sweeps of the normalized mean squared error
//! `‖T̂⋆ − T‖²_F / ‖T‖²_F` over a grid of dimensions and sample sizes.
//!
//! Every replicate draws from its own generator streams. The ground-truth
//! tensor depends on `(d, replicate)` only, so all sample sizes of a
//! dimension share their tensors; the mask and the estimator's internal
//! splits depend on `(d, n, replicate)`. Replicates may run in any order or
//! in parallel: records are aggregated in `(d, n, replicate)` order.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tensorfill_core::contraction::{complete_contraction, ContractionConfig, ContractionThreshold, SplitMode};
use tensorfill_core::matrix::unfolding_params;
use tensorfill_core::random::{generate, stream_id, stream_rng, ComponentDistribution, RandomTensorSpec};
use tensorfill_core::sampling::{sample_mask, SamplingMode};
use tensorfill_core::unfold::{complete_unfold, UnfoldConfig, UnfoldThreshold};
use tensorfill_core::{CompletionResult, PartialTensor, SpectrumSide, Tensor, DEFAULT_RANK_TOL};

use crate::error::{Error, Result};

const TENSOR_STREAM: u64 = 1;
const MASK_STREAM: u64 = 2;
const ESTIMATOR_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Unfold,
    Contract,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Unfold => "unfold",
            Algorithm::Contract => "contract",
        }
    }
}

/// Number of components: fixed, or a multiple of `d` rounded to the nearest
/// integer (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RankSetting {
    Absolute(usize),
    Ratio { ratio: f64 },
}

impl RankSetting {
    pub fn at(self, d: usize) -> usize {
        match self {
            RankSetting::Absolute(r) => r,
            RankSetting::Ratio { ratio } => ((ratio * d as f64).round() as usize).max(1),
        }
    }
}

/// Unit of the `n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NScale {
    #[default]
    #[serde(rename = "absolute")]
    Absolute,
    /// Multiples of `d^{3/2}`.
    #[serde(rename = "d^1.5")]
    DThreeHalves,
    /// Multiples of `r·d^{3/2}`.
    #[serde(rename = "r*d^1.5")]
    RDThreeHalves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaPolicy {
    Theorem,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSetting {
    Fixed(f64),
    Policy(LambdaPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    #[default]
    Exact,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    ExactSizes,
    #[default]
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    #[default]
    LeftSingular,
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    #[default]
    Gaussian,
    Rademacher,
}

fn default_order() -> usize {
    3
}

fn default_replicates() -> usize {
    100
}

fn default_factor() -> f64 {
    3.0
}

/// A sweep over `d × n`, read from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    #[serde(default = "default_order")]
    pub k: usize,
    pub d: Vec<usize>,
    pub r: RankSetting,
    pub n: Vec<f64>,
    #[serde(default)]
    pub n_scale: NScale,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the simulation rule for `unfold` and the theorem rule for
    /// `contract`.
    #[serde(default)]
    pub lambda_star: Option<LambdaSetting>,
    #[serde(default = "default_factor")]
    pub simulation_factor: f64,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub split: Split,
    #[serde(default)]
    pub side: Side,
    #[serde(default)]
    pub distribution: Distribution,
    /// Clamp sample sizes above `d^k` to `d^k` instead of skipping them.
    #[serde(default)]
    pub clamp_n: bool,
}

impl ExperimentSpec {
    /// Parses JSON when the file name ends in `.json`, TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let spec = if is_json {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        Ok(spec)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn lambda_setting(&self) -> LambdaSetting {
        self.lambda_star.unwrap_or(match self.algorithm {
            Algorithm::Unfold => LambdaSetting::Policy(LambdaPolicy::Simulation),
            Algorithm::Contract => LambdaSetting::Policy(LambdaPolicy::Theorem),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        match self.algorithm {
            Algorithm::Unfold if self.k < 3 => return fail(format!("unfold needs k >= 3, got {}", self.k)),
            Algorithm::Contract if self.k != 3 => return fail(format!("contract needs k = 3, got {}", self.k)),
            _ => {}
        }
        if self.d.is_empty() || self.n.is_empty() {
            return fail("both the d and the n grids must be non-empty".into());
        }
        if let Some(&d) = self.d.iter().find(|&&d| d < 2) {
            return fail(format!("dimension {d} is below 2"));
        }
        if let Some(&n) = self.n.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return fail(format!("sample size {n} must be positive"));
        }
        if self.replicates == 0 {
            return fail("replicates must be at least 1".into());
        }
        match self.r {
            RankSetting::Absolute(0) => return fail("rank must be positive".into()),
            RankSetting::Ratio { ratio } if !(ratio.is_finite() && ratio > 0.0) => {
                return fail(format!("rank ratio {ratio} must be positive"));
            }
            _ => {}
        }
        if !(self.simulation_factor.is_finite() && self.simulation_factor > 0.0) {
            return fail(format!("simulation factor {} must be positive", self.simulation_factor));
        }
        match (self.algorithm, self.lambda_setting()) {
            (_, LambdaSetting::Fixed(l)) if !(l.is_finite() && l >= 0.0) => fail(format!("fixed lambda_star {l} must be non-negative")),
            (Algorithm::Contract, LambdaSetting::Policy(LambdaPolicy::Simulation)) => {
                fail("the simulation rule for lambda_star applies to the unfold algorithm only".into())
            }
            _ => Ok(()),
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub d: usize,
    pub r: usize,
    pub n: usize,
}

/// `n/d^{3/2}` for `unfold`, `n/(r d^{3/2})` for `contract`.
pub fn rescaled_n(algorithm: Algorithm, n: usize, d: usize, r: usize) -> f64 {
    let base = (d as f64).powf(1.5);
    match algorithm {
        Algorithm::Unfold => n as f64 / base,
        Algorithm::Contract => n as f64 / (r as f64 * base),
    }
}

/// Resolves the grid into cells, listing the skipped ones with a reason.
pub fn cells(spec: &ExperimentSpec) -> (Vec<Cell>, Vec<String>) {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for &d in &spec.d {
        let r = spec.r.at(d);
        let capacity = (d as f64).powi(spec.k as i32);
        for &m in &spec.n {
            let unit = match spec.n_scale {
                NScale::Absolute => 1.0,
                NScale::DThreeHalves => (d as f64).powf(1.5),
                NScale::RDThreeHalves => r as f64 * (d as f64).powf(1.5),
            };
            let mut n = (m * unit).round();
            if n > capacity {
                if spec.clamp_n {
                    n = capacity;
                } else {
                    skipped.push(format!("d={d}, n={n}: more samples than the {capacity} entries"));
                    continue;
                }
            }
            if n < 1.0 {
                skipped.push(format!("d={d}, n={m}×{unit}: rounds to no samples"));
                continue;
            }
            out.push(Cell { d, r, n: n as usize });
        }
    }
    (out, skipped)
}

/// Result of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    /// `‖T̂⋆ − T‖²_F`.
    pub error: f64,
    /// `‖T‖²_F`.
    pub norm: f64,
    pub lambda_star: f64,
    pub rank_q: usize,
}

/// `‖estimate − truth‖²_F / ‖truth‖²_F`.
pub fn mse(truth: &Tensor, estimate: &Tensor) -> Result<f64> {
    let (num, den) = mse_parts(truth, estimate)?;
    Ok(num / den)
}

fn mse_parts(truth: &Tensor, estimate: &Tensor) -> Result<(f64, f64)> {
    let diff = estimate.sub(truth)?;
    let den = truth.frobenius().powi(2);
    if den == 0.0 {
        return Err(Error::Infeasible("normalized error of a zero tensor".into()));
    }
    Ok((diff.frobenius().powi(2), den))
}

/// Runs the configured estimator on one observed tensor.
pub fn complete(spec: &ExperimentSpec, truth: &Tensor, r: usize, y: &PartialTensor, stream: u64) -> Result<CompletionResult> {
    let out = match spec.algorithm {
        Algorithm::Unfold => {
            let (threshold, params) = match spec.lambda_setting() {
                LambdaSetting::Fixed(l) => (UnfoldThreshold::Fixed(l), None),
                LambdaSetting::Policy(LambdaPolicy::Simulation) => (
                    UnfoldThreshold::Simulation {
                        factor: spec.simulation_factor,
                    },
                    None,
                ),
                LambdaSetting::Policy(LambdaPolicy::Theorem) => {
                    (UnfoldThreshold::Theorem, Some(unfolding_params(truth, DEFAULT_RANK_TOL)?))
                }
            };
            let cfg = UnfoldConfig {
                threshold,
                params,
                slack: None,
                split: match spec.sampling {
                    Sampling::Exact => SamplingMode::ExactN,
                    Sampling::Bernoulli => SamplingMode::Bernoulli,
                },
                seed: spec.seed,
                stream,
            };
            complete_unfold(y, &cfg)?
        }
        Algorithm::Contract => {
            let threshold = match spec.lambda_setting() {
                LambdaSetting::Fixed(l) => ContractionThreshold::Fixed(l),
                _ => ContractionThreshold::Theorem { rank: r },
            };
            let cfg = ContractionConfig {
                threshold,
                split: match spec.split {
                    Split::ExactSizes => SplitMode::ExactSizes,
                    Split::Bernoulli => SplitMode::Bernoulli,
                },
                side: match spec.side {
                    Side::LeftSingular => SpectrumSide::LeftSingular,
                    Side::Symmetrized => SpectrumSide::SymmetrizedEigen,
                },
                seed: spec.seed,
                stream,
            };
            complete_contraction(y, &cfg)?
        }
    };
    Ok(out)
}

/// Ground truth of replicate `rep` at dimension `d`.
pub fn truth(spec: &ExperimentSpec, d: usize, r: usize, rep: usize) -> Result<Tensor> {
    let mut ts = RandomTensorSpec::new(spec.k, d, r, spec.seed);
    ts.distribution = match spec.distribution {
        Distribution::Gaussian => ComponentDistribution::Gaussian,
        Distribution::Rademacher => ComponentDistribution::Rademacher,
    };
    ts.stream = stream_id(&[TENSOR_STREAM, d as u64, r as u64, rep as u64]);
    Ok(generate(&ts)?.0)
}

/// Draws, completes and scores one replicate of `cell`.
pub fn run_replicate(spec: &ExperimentSpec, cell: Cell, rep: usize) -> Result<Replicate> {
    let t = truth(spec, cell.d, cell.r, rep)?;
    let (d, n, r) = (cell.d as u64, cell.n as u64, rep as u64);
    let mut rng = stream_rng(spec.seed, stream_id(&[MASK_STREAM, d, n, r]));
    let mode = match spec.sampling {
        Sampling::Exact => SamplingMode::ExactN,
        Sampling::Bernoulli => SamplingMode::Bernoulli,
    };
    let mask = sample_mask(spec.k, cell.d, cell.n, mode, &mut rng)?;
    if mask.is_empty() {
        return Err(Error::Infeasible(format!("d={}, n={}: the sampled mask is empty", cell.d, cell.n)));
    }
    let y = tensorfill_core::tensor::project_mask(&t, &mask)?;
    let out = complete(spec, &t, cell.r, &y, stream_id(&[ESTIMATOR_STREAM, d, n, r]))?;
    let (error, norm) = mse_parts(&t, &out.estimate)?;
    Ok(Replicate {
        error,
        norm,
        lambda_star: out.diagnostics.lambda_star,
        rank_q: out.diagnostics.rank_q,
    })
}

/// One aggregated grid point. Serializes to the CSV columns in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRecord {
    pub algorithm: Algorithm,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub n_rescaled: f64,
    pub replicates: usize,
    /// Mean squared error over mean squared norm.
    pub mse_mean: f64,
    /// Standard error of the per-replicate ratios.
    pub mse_stderr: f64,
    pub lambda_star_mean: f64,
    pub rank_q_mean: f64,
    pub seed: u64,
    /// Mean of the per-replicate ratios; written to plot data only.
    #[serde(skip)]
    pub mse_ratio_mean: f64,
}

pub const CSV_HEADER: &str = "algorithm,k,d,r,n,n_rescaled,replicates,mse_mean,mse_stderr,lambda_star_mean,rank_q_mean,seed";

/// Aggregates the replicates of `cell`, given in replicate order.
pub fn aggregate(spec: &ExperimentSpec, cell: Cell, reps: &[Replicate]) -> MseRecord {
    let m = reps.len() as f64;
    let error: f64 = reps.iter().map(|r| r.error).sum();
    let norm: f64 = reps.iter().map(|r| r.norm).sum();
    let ratios: Vec<f64> = reps.iter().map(|r| r.error / r.norm).collect();
    let ratio_mean = ratios.iter().sum::<f64>() / m;
    let stderr = if reps.len() > 1 {
        let var = ratios.iter().map(|x| (x - ratio_mean).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    MseRecord {
        algorithm: spec.algorithm,
        k: spec.k,
        d: cell.d,
        r: cell.r,
        n: cell.n,
        n_rescaled: rescaled_n(spec.algorithm, cell.n, cell.d, cell.r),
        replicates: reps.len(),
        mse_mean: (error / m) / (norm / m),
        mse_stderr: stderr,
        lambda_star_mean: reps.iter().map(|r| r.lambda_star).sum::<f64>() / m,
        rank_q_mean: reps.iter().map(|r| r.rank_q as f64).sum::<f64>() / m,
        seed: spec.seed,
        mse_ratio_mean: ratio_mean,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<MseRecord>,
    /// Grid points left out, with the reason.
    pub skipped: Vec<String>,
}

/// Runs every replicate of every feasible cell. With `parallel`, replicates
/// are spread over the rayon pool; the records are identical either way.
pub fn run_experiment(spec: &ExperimentSpec, parallel: bool) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let (cells, skipped) = cells(spec);
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.replicates).map(move |rep| (c, rep)))
        .collect();
    let run = |&(c, rep): &(usize, usize)| run_replicate(spec, cells[c], rep);
    let results: Vec<Result<Replicate>> = if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let records = cells
        .iter()
        .zip(results.chunks(spec.replicates))
        .map(|(&cell, reps)| aggregate(spec, cell, reps))
        .collect();
    Ok(ExperimentOutcome { records, skipped })
}

pub fn emit_csv(records: &[MseRecord], w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CSV_HEADER.split(','))?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn parse_csv(reader: impl std::io::Read) -> Result<Vec<MseRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{}`", header.join(",")),
        });
    }
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<MseRecord>, _>>()?)
}

/// Whitespace-separated columns, one block per dimension, blocks separated
/// by two blank lines.
pub fn emit_plotdata(records: &[MseRecord], mut w: impl Write) -> Result<()> {
    let mut ds: Vec<usize> = records.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let mut text = String::new();
    for (b, &d) in ds.iter().enumerate() {
        if b > 0 {
            text.push_str("\n\n");
        }
        let block: Vec<&MseRecord> = records.iter().filter(|r| r.d == d).collect();
        let first = block[0];
        text.push_str(&format!(
            "# algorithm={} k={} d={} r={} replicates={} seed={}\n",
            first.algorithm.name(),
            first.k,
            d,
            first.r,
            first.replicates,
            first.seed
        ));
        text.push_str("# n n_rescaled mse_mean mse_stderr mse_ratio_mean lambda_star_mean rank_q_mean\n");
        for r in block {
            text.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                r.n, r.n_rescaled, r.mse_mean, r.mse_stderr, r.mse_ratio_mean, r.lambda_star_mean, r.rank_q_mean
            ));
        }
    }
    w.write_all(text.as_bytes()).map_err(|e| Error::io("<plot data>", e))
}
