//! Benchmark CLI: single algorithm runs, model validation, and seeded
//! experiments with CSV output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noisyrank::{
    binary_search_ranking, emit_csv, eval_err, is_eps_maximum, knockout, rank3, render_csv,
    run_experiment, summarize, verify_properties, Algorithm, Arena, BsrConfig, Ctx, ElementId,
    ExperimentSpec, MergeRankBackend, ModelSpec, RngFactory, Tally,
};

#[derive(Parser)]
#[command(name = "noisyrank", about = "PAC maximum selection and ranking from noisy duels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Model family and parameter: adjacent-gap:P, single-gap:PTILDE,
    /// mallows:PHI, btl:FILE, matrix:FILE
    #[arg(long)]
    model: ModelSpec,
    /// Number of elements (required unless the model comes from a file)
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Root seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores; 1 is fully serial)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Select an eps-maximum with the knockout tournament
    Max {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Relaxed-transitivity parameter of the instance
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Produce an eps-ranking with noisy merge sort
    RankMerge {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Write the ranking here (one id per line, ascending strength)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Produce an eps-ranking with the binary-search ranking pipeline
    RankBsr {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Anchor-count exponent: floor(n / (log2 n)^x) anchors
        #[arg(long, default_value_t = 3.0)]
        x: f64,
        /// Fixed anchor count, overriding the formula
        #[arg(long)]
        anchors: Option<usize>,
        /// Write the ranking here (one id per line, ascending strength)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a model for strong stochastic transitivity and the
    /// stochastic triangle inequality
    VerifyModel {
        #[command(flatten)]
        model: ModelArgs,
        /// Slack allowed before a triple counts as a violation
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Run a batch of seeded runs and emit CSV
    Experiment {
        /// Which algorithm to benchmark: knockout, merge-rank, or bsr
        #[arg(long)]
        algorithm: Algorithm,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 3.0)]
        x: f64,
        #[arg(long)]
        anchors: Option<usize>,
        #[arg(long, default_value_t = 100)]
        runs: u64,
        /// CSV destination (stdout when omitted); ranking sidecars land
        /// next to it
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn install_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Box<dyn std::error::Error>> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    Ok(b.build()?)
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Max {
            model,
            common,
            gamma,
        } => {
            let m = model.model.instantiate(model.n)?;
            let pool = install_pool(common.threads)?;
            let tally = Tally::new();
            let winner = pool.install(|| {
                let mut arena = Arena::new(&m);
                let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
                knockout(
                    &mut arena,
                    &tally,
                    &input,
                    common.eps,
                    common.delta,
                    gamma,
                    &RngFactory::new(common.seed),
                )
            })?;
            println!("winner: {winner}");
            println!("comparisons: {}", tally.total());
            println!(
                "eps_maximum: {}",
                is_eps_maximum(winner, &m, common.eps)
            );
        }
        Command::RankMerge {
            model,
            common,
            out,
        } => {
            let m = model.model.instantiate(model.n)?;
            let pool = install_pool(common.threads)?;
            let tally = Tally::new();
            let ranked = pool.install(|| {
                let arena = Arena::new(&m);
                let ctx = Ctx::new(&arena, &tally);
                let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
                rank3(
                    ctx,
                    &input,
                    common.eps,
                    common.delta,
                    &RngFactory::new(common.seed),
                )
            })?;
            report_ranking(&ranked.0, &m, tally.total(), out.as_deref())?;
        }
        Command::RankBsr {
            model,
            common,
            x,
            anchors,
            out,
        } => {
            let m = model.model.instantiate(model.n)?;
            let pool = install_pool(common.threads)?;
            let tally = Tally::new();
            let result = pool.install(|| {
                let mut arena = Arena::new(&m);
                let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
                let cfg = BsrConfig {
                    eps: common.eps,
                    x,
                    anchor_override: anchors,
                };
                binary_search_ranking(
                    &mut arena,
                    &tally,
                    &input,
                    &cfg,
                    &MergeRankBackend,
                    &RngFactory::new(common.seed),
                )
            })?;
            println!("anchors: {}", result.anchor_count);
            if result.used_fallback {
                println!("note: too few anchors, ranked the whole input directly");
            }
            report_ranking(&result.ranking.0, &m, tally.total(), out.as_deref())?;
        }
        Command::VerifyModel { model, tol } => {
            let m = model.model.instantiate(model.n)?;
            let report = verify_properties(&m, tol)?;
            println!("n: {}", m.n());
            println!("sst: {}", if report.sst_holds { "holds" } else { "violated" });
            println!("sti: {}", if report.sti_holds { "holds" } else { "violated" });
            println!("gamma: {}", report.gamma);
            if let Some(v) = report.worst_violation {
                let (i, j, k) = v.triple;
                println!(
                    "worst violation: {:?} at triple ({i}, {j}, {k}), magnitude {}",
                    v.kind, v.magnitude
                );
            }
        }
        Command::Experiment {
            algorithm,
            model,
            common,
            gamma,
            x,
            anchors,
            runs,
            out,
        } => {
            let m = model.model.instantiate(model.n)?;
            let spec = ExperimentSpec {
                algorithm,
                model: model.model,
                n: m.n(),
                eps: common.eps,
                delta: common.delta,
                gamma,
                x,
                anchor_override: anchors,
                runs,
                root_seed: common.seed,
                out: out.clone(),
            };
            let pool = install_pool(common.threads)?;
            let records = pool.install(|| run_experiment(&spec))?;
            match &out {
                Some(path) => {
                    emit_csv(&records, path)?;
                    let s = summarize(&records);
                    println!("runs: {}", s.runs);
                    println!("successes: {}", s.successes);
                    println!("mean_comparisons: {}", s.mean_comparisons);
                    println!("stddev_comparisons: {}", s.stddev_comparisons);
                    println!("csv: {}", path.display());
                }
                None => print!("{}", render_csv(&records)),
            }
        }
    }
    Ok(())
}

fn report_ranking(
    seq: &[ElementId],
    model: &noisyrank::PreferenceModel,
    comparisons: u64,
    out: Option<&std::path::Path>,
) -> Result<(), Box<dyn std::error::Error>> {
    let text: Vec<String> = seq.iter().map(|e| e.to_string()).collect();
    match out {
        Some(path) => {
            std::fs::write(path, format!("{}\n", text.join("\n")))?;
            println!("ranking: {}", path.display());
        }
        None => println!("ranking (ascending strength): {}", text.join(" ")),
    }
    println!("comparisons: {comparisons}");
    println!("err: {}", eval_err(seq, model));
    Ok(())
}
