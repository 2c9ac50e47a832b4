//! PAC maximum selection and ranking from noisy pairwise comparisons.
//!
//! The oracle simulates duels from a ground-truth preference model; the
//! algorithms see only duel outcomes. `knockout` finds an eps-maximum,
//! `rank3` and `binary_search_ranking` produce eps-rankings, and `bench`
//! wraps everything in a seeded experiment harness.

pub mod bench;
pub mod bsr;
pub mod duel;
pub mod error;
pub mod maxsel;
pub mod mergerank;
pub mod oracle;
pub mod stream;

pub use bench::{
    emit_csv, eval_err, is_eps_maximum, parse_csv, render_csv, run_experiment, summarize,
    Algorithm, ExperimentRecord, ExperimentSpec, ExperimentSummary, ModelSpec,
};
pub use bsr::{
    binary_search, binary_search_ranking, build_tree, interval_binary_search, BsrConfig,
    BsrOutput, IntervalTree, MergeRankBackend, RankBackend, WalkOutcome,
};
pub use duel::{compare, compare2, confidence_radius, CompareParams};
pub use error::{Error, Result};
pub use maxsel::{knockout, knockout_constant, knockout_round, KnockoutParams};
pub use mergerank::{merge, merge_rank, rank3, seq_error, RankedSeq};
pub use oracle::{
    mallows_pairwise, verify_properties, Arena, Ctx, DummyKind, ElementId,
    ModelPropertyReport, PreferenceModel, PropertyKind, Tally, Violation,
};
pub use stream::{RngFactory, Stream};
