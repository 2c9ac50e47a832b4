//! Experiment harness: seeded runs of the selection and ranking
//! algorithms, analytic correctness verdicts, and CSV emission.
//!
//! Verdicts are computed purely from the true model; verification never
//! draws from the oracle.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::bsr::{binary_search_ranking, BsrConfig, MergeRankBackend};
use crate::error::{Error, Result};
use crate::maxsel::knockout;
use crate::mergerank::{rank3, seq_error};
use crate::oracle::{Arena, Ctx, ElementId, PreferenceModel, Tally};
use crate::stream::RngFactory;

/// True iff `e` is within `eps` of the truly strongest element:
/// `margin(true_max, e) <= eps`.
pub fn is_eps_maximum(e: ElementId, model: &PreferenceModel, eps: f64) -> bool {
    model.margin(model.true_max(), e) <= eps
}

/// Error of an ordered sequence (weakest first) under the true model; the
/// sequence is an eps-ranking iff this is at most eps.
pub fn eval_err(seq: &[ElementId], model: &PreferenceModel) -> f64 {
    seq_error(seq, model)
}

/// Which algorithm an experiment runs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Algorithm {
    Knockout,
    MergeRank,
    Bsr,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Knockout => "knockout",
            Algorithm::MergeRank => "merge-rank",
            Algorithm::Bsr => "bsr",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knockout" => Ok(Algorithm::Knockout),
            "merge-rank" => Ok(Algorithm::MergeRank),
            "bsr" => Ok(Algorithm::Bsr),
            other => Err(Error::param(format!(
                "unknown algorithm {other:?} (expected knockout, merge-rank, or bsr)"
            ))),
        }
    }
}

/// A model family plus its parameter, as given on the command line:
/// `adjacent-gap:P`, `single-gap:PTILDE`, `mallows:PHI`, `btl:FILE`,
/// `matrix:FILE`.
#[derive(Clone, PartialEq, Debug)]
pub enum ModelSpec {
    AdjacentGap { p: f64 },
    SingleGap { ptilde: f64 },
    Mallows { phi: f64 },
    Btl { path: PathBuf },
    Matrix { path: PathBuf },
}

impl ModelSpec {
    /// Whether the family takes its size from `--n` (as opposed to a file).
    pub fn needs_n(&self) -> bool {
        !matches!(self, ModelSpec::Btl { .. } | ModelSpec::Matrix { .. })
    }

    /// Builds the concrete model. `n` is required for the parametric
    /// families and, when given for a file-backed family, must match the
    /// file.
    pub fn instantiate(&self, n: Option<usize>) -> Result<PreferenceModel> {
        let need = |n: Option<usize>| {
            n.ok_or_else(|| Error::param("this model family requires --n"))
        };
        let model = match self {
            ModelSpec::AdjacentGap { p } => PreferenceModel::adjacent_gap(need(n)?, *p)?,
            ModelSpec::SingleGap { ptilde } => PreferenceModel::single_gap(need(n)?, *ptilde)?,
            ModelSpec::Mallows { phi } => PreferenceModel::mallows(need(n)?, *phi)?,
            ModelSpec::Btl { path } => PreferenceModel::btl_from_file(path)?,
            ModelSpec::Matrix { path } => PreferenceModel::matrix_from_csv(path)?,
        };
        if let Some(n) = n {
            if model.n() != n {
                return Err(Error::param(format!(
                    "--n {} does not match the model size {}",
                    n,
                    model.n()
                )));
            }
        }
        Ok(model)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::AdjacentGap { p } => write!(f, "adjacent-gap:{p}"),
            ModelSpec::SingleGap { ptilde } => write!(f, "single-gap:{ptilde}"),
            ModelSpec::Mallows { phi } => write!(f, "mallows:{phi}"),
            ModelSpec::Btl { path } => write!(f, "btl:{}", path.display()),
            ModelSpec::Matrix { path } => write!(f, "matrix:{}", path.display()),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, arg) = s.split_once(':').ok_or_else(|| {
            Error::param(format!("model spec {s:?} must look like family:parameter"))
        })?;
        let num = |what: &str| {
            arg.parse::<f64>()
                .map_err(|_| Error::param(format!("{family} needs a numeric {what}, got {arg:?}")))
        };
        match family {
            "adjacent-gap" => Ok(ModelSpec::AdjacentGap { p: num("p")? }),
            "single-gap" => Ok(ModelSpec::SingleGap { ptilde: num("ptilde")? }),
            "mallows" => Ok(ModelSpec::Mallows { phi: num("phi")? }),
            "btl" => Ok(ModelSpec::Btl { path: PathBuf::from(arg) }),
            "matrix" => Ok(ModelSpec::Matrix { path: PathBuf::from(arg) }),
            other => Err(Error::param(format!("unknown model family {other:?}"))),
        }
    }
}

/// Everything one experiment needs: algorithm, model, parameters, run
/// count, and the root seed all per-run seeds derive from.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub model: ModelSpec,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub x: f64,
    pub anchor_override: Option<usize>,
    pub runs: u64,
    pub root_seed: u64,
    /// CSV destination; ranking sidecars are placed next to it.
    pub out: Option<PathBuf>,
}

/// One completed run. `output_head` is the winning element id for maximum
/// selection; for rankings it is the sidecar file name when one was
/// written, otherwise the strongest element's id.
#[derive(Clone, PartialEq, Debug)]
pub struct ExperimentRecord {
    pub run_id: u64,
    pub algorithm: String,
    pub model: String,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub x: f64,
    pub seed: u64,
    pub comparisons: u64,
    pub output_head: String,
    pub correct: bool,
    pub wall_ms: f64,
}

fn sidecar_path(out: &Path, run_id: u64) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_owned());
    out.with_file_name(format!("{stem}.run{run_id}.ranking"))
}

fn write_ranking(path: &Path, seq: &[ElementId]) -> Result<()> {
    let mut text = String::new();
    for e in seq {
        text.push_str(&format!("{e}\n"));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs `spec.runs` independent seeded runs, possibly on the worker pool.
/// Records come back ordered by run id regardless of completion order, and
/// every field except `wall_ms` is a deterministic function of the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    if spec.runs < 1 {
        return Err(Error::param("an experiment needs at least one run"));
    }
    let model = spec.model.instantiate(Some(spec.n))?;
    let seeds = RngFactory::new(spec.root_seed).named("run");
    (0..spec.runs)
        .into_par_iter()
        .map(|run_id| {
            let seed = seeds.child(run_id).seed();
            let streams = RngFactory::new(seed);
            let tally = Tally::new();
            let mut arena = Arena::new(&model);
            let input: Vec<ElementId> = (1..=spec.n).map(ElementId).collect();
            let started = Instant::now();
            let (output_head, correct) = match spec.algorithm {
                Algorithm::Knockout => {
                    let winner = knockout(
                        &mut arena,
                        &tally,
                        &input,
                        spec.eps,
                        spec.delta,
                        spec.gamma,
                        &streams,
                    )?;
                    (winner.to_string(), is_eps_maximum(winner, &model, spec.eps))
                }
                Algorithm::MergeRank => {
                    let ctx = Ctx::new(&arena, &tally);
                    let ranked = rank3(ctx, &input, spec.eps, spec.delta, &streams)?;
                    let correct = eval_err(&ranked.0, &model) <= spec.eps;
                    (ranking_head(spec, run_id, &ranked.0)?, correct)
                }
                Algorithm::Bsr => {
                    let cfg = BsrConfig {
                        eps: spec.eps,
                        x: spec.x,
                        anchor_override: spec.anchor_override,
                    };
                    let out = binary_search_ranking(
                        &mut arena,
                        &tally,
                        &input,
                        &cfg,
                        &MergeRankBackend,
                        &streams,
                    )?;
                    let correct = eval_err(&out.ranking.0, &model) <= spec.eps;
                    (ranking_head(spec, run_id, &out.ranking.0)?, correct)
                }
            };
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            Ok(ExperimentRecord {
                run_id,
                algorithm: spec.algorithm.to_string(),
                model: spec.model.to_string(),
                n: spec.n,
                eps: spec.eps,
                delta: spec.delta,
                gamma: spec.gamma,
                x: spec.x,
                seed,
                comparisons: tally.total(),
                output_head,
                correct,
                wall_ms,
            })
        })
        .collect()
}

fn ranking_head(spec: &ExperimentSpec, run_id: u64, seq: &[ElementId]) -> Result<String> {
    match &spec.out {
        Some(out) => {
            let sidecar = sidecar_path(out, run_id);
            write_ranking(&sidecar, seq)?;
            Ok(sidecar
                .file_name()
                .expect("sidecar has a file name")
                .to_string_lossy()
                .into_owned())
        }
        None => Ok(seq.last().expect("nonempty ranking").to_string()),
    }
}

pub const CSV_HEADER: &str =
    "run_id,algorithm,model,n,eps,delta,gamma,x,seed,comparisons,output_head,correct,wall_ms";

/// Renders records as CSV text. Floats use the shortest round-trip
/// representation, so parsing the output reproduces the records exactly.
pub fn render_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.run_id,
            r.algorithm,
            r.model,
            r.n,
            r.eps,
            r.delta,
            r.gamma,
            r.x,
            r.seed,
            r.comparisons,
            r.output_head,
            r.correct,
            r.wall_ms
        ));
    }
    out
}

/// Writes [`render_csv`] output to `destination`.
pub fn emit_csv(records: &[ExperimentRecord], destination: &Path) -> Result<()> {
    fs::write(destination, render_csv(records)).map_err(|e| Error::io(destination, e))
}

/// Parses text produced by [`render_csv`] back into records.
pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::param(format!("bad CSV header: {other:?}")));
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 13 {
                return Err(Error::param(format!(
                    "expected 13 CSV fields, got {}: {line:?}",
                    f.len()
                )));
            }
            let bad = |what: &str| Error::param(format!("bad {what} in CSV row: {line:?}"));
            Ok(ExperimentRecord {
                run_id: f[0].parse().map_err(|_| bad("run_id"))?,
                algorithm: f[1].to_owned(),
                model: f[2].to_owned(),
                n: f[3].parse().map_err(|_| bad("n"))?,
                eps: f[4].parse().map_err(|_| bad("eps"))?,
                delta: f[5].parse().map_err(|_| bad("delta"))?,
                gamma: f[6].parse().map_err(|_| bad("gamma"))?,
                x: f[7].parse().map_err(|_| bad("x"))?,
                seed: f[8].parse().map_err(|_| bad("seed"))?,
                comparisons: f[9].parse().map_err(|_| bad("comparisons"))?,
                output_head: f[10].to_owned(),
                correct: f[11].parse().map_err(|_| bad("correct"))?,
                wall_ms: f[12].parse().map_err(|_| bad("wall_ms"))?,
            })
        })
        .collect()
}

/// Summary statistics over an experiment's records.
#[derive(Clone, Copy, Debug)]
pub struct ExperimentSummary {
    pub runs: u64,
    pub successes: u64,
    pub mean_comparisons: f64,
    pub stddev_comparisons: f64,
}

pub fn summarize(records: &[ExperimentRecord]) -> ExperimentSummary {
    let runs = records.len() as u64;
    let successes = records.iter().filter(|r| r.correct).count() as u64;
    let mean = records.iter().map(|r| r.comparisons as f64).sum::<f64>() / runs.max(1) as f64;
    let var = records
        .iter()
        .map(|r| (r.comparisons as f64 - mean).powi(2))
        .sum::<f64>()
        / runs.max(1) as f64;
    ExperimentSummary {
        runs,
        successes,
        mean_comparisons: mean,
        stddev_comparisons: var.sqrt(),
    }
}
