//! Ground-truth preference models, the duel entry point every algorithm
//! consumes, comparison accounting, and model-property verification.
//!
//! Convention: element 1 is the strongest. `margin(i, j)` is
//! `p(i, j) - 1/2`, nonnegative whenever `i` is truly stronger than `j`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::distributions::Distribution;
use rand::Rng;
use rand_distr::Binomial;

use crate::error::{Error, Result};
use crate::stream::Stream;

/// Index of an element in a problem instance. Real ids live in `[1, n]`;
/// ids above `n` denote synthetic dummy elements registered on an [`Arena`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ElementId(pub usize);

impl std::fmt::Display for ElementId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Mallows pairwise marginal: the probability that the item of better rank
/// beats the other, for rank gap `k = |i_rank - j_rank|`, via
/// `h(k, phi) = k / (1 - phi^k)` and `p = h(k+1, phi) - h(k, phi)`.
/// The adjacent case reduces to `1 / (1 + phi)`.
pub fn mallows_pairwise(phi: f64, i_rank: usize, j_rank: usize) -> Result<f64> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::param(format!("mallows phi must be in (0,1), got {phi}")));
    }
    if i_rank == j_rank {
        return Err(Error::param("mallows_pairwise requires distinct ranks"));
    }
    let k = i_rank.abs_diff(j_rank) as f64;
    // h(k+1) - h(k) rearranged over a common denominator; exp_m1 keeps
    // 1 - phi^k accurate as phi approaches 1
    let lnphi = phi.ln();
    let a = -f64::exp_m1(k * lnphi); // 1 - phi^k
    let b = -f64::exp_m1((k + 1.0) * lnphi); // 1 - phi^(k+1)
    Ok(((k + 1.0) * a - k * b) / (a * b))
}

/// Ground-truth pairwise win probabilities plus the true strength order.
#[derive(Clone, Debug)]
pub enum PreferenceModel {
    /// `p(i, j) = p` for every truly-stronger `i` (ids ascending = weakening).
    AdjacentGap { n: usize, p: f64 },
    /// `p(1, j) = 0.6` for all `j > 1`; `p(i, j) = 0.5 + ptilde` for `1 < i < j`.
    SingleGap { n: usize, ptilde: f64 },
    /// Mallows permutation model with dispersion `phi`; ids are reference ranks.
    Mallows { n: usize, phi: f64 },
    /// Bradley-Terry-Luce: `p(i, j) = w_i / (w_i + w_j)`.
    Btl { weights: Vec<f64> },
    /// Explicit probability matrix, row i column j = `p(i, j)`. Ids are
    /// assumed listed in strength order (element 1 strongest).
    Matrix { p: Vec<Vec<f64>> },
}

/// Row/column consistency tolerance for matrix models (CSV round-trip noise).
pub const MATRIX_TOL: f64 = 1e-9;

impl PreferenceModel {
    pub fn adjacent_gap(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::model("n must be positive"));
        }
        if !(0.5..=1.0).contains(&p) {
            return Err(Error::model(format!("adjacent-gap p must be in [0.5, 1], got {p}")));
        }
        Ok(PreferenceModel::AdjacentGap { n, p })
    }

    pub fn single_gap(n: usize, ptilde: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::model("n must be positive"));
        }
        if !(0.0..0.1).contains(&ptilde) {
            return Err(Error::model(format!(
                "single-gap ptilde must be in [0, 0.1), got {ptilde}"
            )));
        }
        Ok(PreferenceModel::SingleGap { n, ptilde })
    }

    pub fn mallows(n: usize, phi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::model("n must be positive"));
        }
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::model(format!("mallows phi must be in (0,1), got {phi}")));
        }
        Ok(PreferenceModel::Mallows { n, phi })
    }

    pub fn btl(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::model("btl needs at least one weight"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::model("btl weights must be positive and finite"));
        }
        Ok(PreferenceModel::Btl { weights })
    }

    pub fn matrix(p: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::model("matrix model is empty"));
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::model(format!(
                    "matrix row {} has {} columns, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if i == j {
                    continue; // diagonal ignored
                }
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::model(format!(
                        "matrix p({},{}) = {v} outside [0, 1]",
                        i + 1,
                        j + 1
                    )));
                }
                if (p[i][j] + p[j][i] - 1.0).abs() > MATRIX_TOL {
                    return Err(Error::model(format!(
                        "matrix p({},{}) + p({},{}) = {} != 1",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1,
                        p[i][j] + p[j][i]
                    )));
                }
            }
        }
        Ok(PreferenceModel::Matrix { p })
    }

    /// Matrix model from a CSV file: n rows x n columns of decimals.
    pub fn matrix_from_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| {
                Error::model(format!("{}:{}: {e}", path.display(), ln + 1))
            })?;
            rows.push(row);
        }
        Self::matrix(rows)
    }

    /// BTL model from a file with one positive decimal weight per line.
    pub fn btl_from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let weights: std::result::Result<Vec<f64>, _> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<f64>())
            .collect();
        let weights =
            weights.map_err(|e| Error::model(format!("{}: {e}", path.display())))?;
        Self::btl(weights)
    }

    pub fn n(&self) -> usize {
        match self {
            PreferenceModel::AdjacentGap { n, .. }
            | PreferenceModel::SingleGap { n, .. }
            | PreferenceModel::Mallows { n, .. } => *n,
            PreferenceModel::Btl { weights } => weights.len(),
            PreferenceModel::Matrix { p } => p.len(),
        }
    }

    /// True strength rank of `i`: 1 = strongest.
    pub fn rank_of(&self, i: ElementId) -> usize {
        match self {
            PreferenceModel::Btl { weights } => {
                let wi = weights[i.0 - 1];
                1 + weights
                    .iter()
                    .enumerate()
                    .filter(|(j, w)| **w > wi || (**w == wi && j + 1 < i.0))
                    .count()
            }
            _ => i.0,
        }
    }

    /// The truly strongest element (ties broken by least id).
    pub fn true_max(&self) -> ElementId {
        (1..=self.n())
            .map(ElementId)
            .min_by_key(|e| self.rank_of(*e))
            .expect("nonempty model")
    }

    /// Win probability of `i` over `j`. `prob(i, i)` is 1/2 by convention.
    pub fn prob(&self, i: ElementId, j: ElementId) -> f64 {
        assert!(self.is_valid(i) && self.is_valid(j), "id out of range");
        if i == j {
            return 0.5;
        }
        match self {
            PreferenceModel::AdjacentGap { p, .. } => {
                if i.0 < j.0 {
                    *p
                } else {
                    1.0 - *p
                }
            }
            PreferenceModel::SingleGap { ptilde, .. } => {
                let lo = i.0.min(j.0);
                let p = if lo == 1 { 0.6 } else { 0.5 + *ptilde };
                if i.0 == lo {
                    p
                } else {
                    1.0 - p
                }
            }
            PreferenceModel::Mallows { phi, .. } => {
                let p = mallows_pairwise(*phi, i.0, j.0).expect("validated at construction");
                if i.0 < j.0 {
                    p
                } else {
                    1.0 - p
                }
            }
            PreferenceModel::Btl { weights } => {
                let (wi, wj) = (weights[i.0 - 1], weights[j.0 - 1]);
                wi / (wi + wj)
            }
            PreferenceModel::Matrix { p } => p[i.0 - 1][j.0 - 1],
        }
    }

    /// `margin(i, j) = p(i, j) - 1/2`, the advantage of `i` over `j`.
    pub fn margin(&self, i: ElementId, j: ElementId) -> f64 {
        self.prob(i, j) - 0.5
    }

    fn is_valid(&self, i: ElementId) -> bool {
        i.0 >= 1 && i.0 <= self.n()
    }
}

/// Running count of oracle duels, the sample-complexity measurand.
/// Safe for concurrent increment; the total equals the serial sum.
#[derive(Default, Debug)]
pub struct Tally {
    total: AtomicU64,
    phases: Mutex<BTreeMap<String, u64>>,
}

impl Tally {
    pub fn new() -> Self {
        Tally::default()
    }

    pub fn record(&self, phase: Option<&str>, duels: u64) {
        self.total.fetch_add(duels, Ordering::Relaxed);
        if let Some(label) = phase {
            let mut phases = self.phases.lock().expect("tally lock");
            *phases.entry(label.to_owned()).or_insert(0) += duels;
        }
    }

    pub fn total(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub fn phases(&self) -> BTreeMap<String, u64> {
        self.phases.lock().expect("tally lock").clone()
    }
}

/// How a dummy element fares against everything else.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DummyKind {
    /// Loses to every real element (and to `AlwaysWins` dummies) w.p. 1.
    AlwaysLoses,
    /// Beats every real element (and `AlwaysLoses` dummies) w.p. 1.
    AlwaysWins,
}

/// A model plus its registered dummy elements. Dummies get virtual ids
/// above `n`; the model itself is never touched.
#[derive(Debug)]
pub struct Arena<'m> {
    model: &'m PreferenceModel,
    dummies: Vec<DummyKind>,
}

impl<'m> Arena<'m> {
    pub fn new(model: &'m PreferenceModel) -> Self {
        Arena {
            model,
            dummies: Vec::new(),
        }
    }

    pub fn model(&self) -> &PreferenceModel {
        self.model
    }

    pub fn add_dummy(&mut self, kind: DummyKind) -> ElementId {
        self.dummies.push(kind);
        ElementId(self.model.n() + self.dummies.len())
    }

    pub fn is_real(&self, id: ElementId) -> bool {
        id.0 >= 1 && id.0 <= self.model.n()
    }

    fn dummy_kind(&self, id: ElementId) -> Option<DummyKind> {
        id.0
            .checked_sub(self.model.n() + 1)
            .and_then(|k| self.dummies.get(k).copied())
    }

    fn check(&self, id: ElementId) -> Result<()> {
        if self.is_real(id) || self.dummy_kind(id).is_some() {
            Ok(())
        } else {
            Err(Error::param(format!("unknown element id {id}")))
        }
    }

    /// Win probability of `i` over `j`, dummies included. Two dummies of the
    /// same kind meet at 1/2.
    pub fn prob(&self, i: ElementId, j: ElementId) -> f64 {
        use DummyKind::*;
        match (self.dummy_kind(i), self.dummy_kind(j)) {
            (None, None) => self.model.prob(i, j),
            (Some(AlwaysLoses), None) | (Some(AlwaysLoses), Some(AlwaysWins)) => 0.0,
            (Some(AlwaysWins), None) | (Some(AlwaysWins), Some(AlwaysLoses)) => 1.0,
            (None, Some(AlwaysLoses)) => 1.0,
            (None, Some(AlwaysWins)) => 0.0,
            (Some(AlwaysWins), Some(AlwaysWins)) | (Some(AlwaysLoses), Some(AlwaysLoses)) => 0.5,
        }
    }
}

/// Shared, copyable view handed to every algorithm: the arena, the tally,
/// and an optional phase label for sub-counter accounting.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub arena: &'a Arena<'a>,
    pub tally: &'a Tally,
    pub phase: Option<&'a str>,
}

impl<'a> Ctx<'a> {
    pub fn new(arena: &'a Arena<'a>, tally: &'a Tally) -> Self {
        Ctx {
            arena,
            tally,
            phase: None,
        }
    }

    pub fn with_phase(self, phase: &'a str) -> Self {
        Ctx {
            phase: Some(phase),
            ..self
        }
    }

    /// One noisy comparison: returns `i` with probability `p(i, j)`, else
    /// `j`, and counts exactly one duel. Repeated calls are independent
    /// given the stream.
    pub fn duel(&self, i: ElementId, j: ElementId, rng: &mut Stream) -> Result<ElementId> {
        if i == j {
            return Err(Error::param(format!("cannot duel element {i} against itself")));
        }
        self.arena.check(i)?;
        self.arena.check(j)?;
        let p = self.arena.prob(i, j);
        self.tally.record(self.phase, 1);
        let i_wins = match p {
            p if p <= 0.0 => false,
            p if p >= 1.0 => true,
            p => rng.gen_bool(p),
        };
        Ok(if i_wins { i } else { j })
    }

    /// `k` independent duels of `i` vs `j`, returning how many `i` won.
    /// Wins are drawn as a single Binomial(k, p) sample, which has exactly
    /// the distribution of `k` individual duels; the tally advances by `k`.
    pub fn duel_many(&self, i: ElementId, j: ElementId, k: u64, rng: &mut Stream) -> Result<u64> {
        if i == j {
            return Err(Error::param(format!("cannot duel element {i} against itself")));
        }
        self.arena.check(i)?;
        self.arena.check(j)?;
        let p = self.arena.prob(i, j);
        self.tally.record(self.phase, k);
        Ok(match p {
            p if p <= 0.0 => 0,
            p if p >= 1.0 => k,
            p => Binomial::new(k, p).expect("valid binomial").sample(rng),
        })
    }
}

/// One violated triple, reported by [`verify_properties`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub kind: PropertyKind,
    /// `(i, j, k)` ordered strongest to weakest by the true ranking.
    pub triple: (ElementId, ElementId, ElementId),
    pub magnitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    StrongStochasticTransitivity,
    StochasticTriangleInequality,
}

/// Result of checking SST, STI, and gamma-transitivity over all triples.
#[derive(Clone, Debug)]
pub struct ModelPropertyReport {
    pub sst_holds: bool,
    pub sti_holds: bool,
    /// Smallest `gamma >= 1` with `max(margin(i,j), margin(j,k)) <= gamma *
    /// margin(i,k)` on all ordered triples; exactly 1 when SST holds.
    pub gamma: f64,
    pub worst_violation: Option<Violation>,
}

/// Checks every ordered triple (strongest, middle, weakest) of the true
/// ranking for SST and STI within `tol`, and computes the minimal gamma.
/// Guarded at n <= 2000 (O(n^3) enumeration).
pub fn verify_properties(model: &PreferenceModel, tol: f64) -> Result<ModelPropertyReport> {
    let n = model.n();
    if n > 2000 {
        return Err(Error::param(format!(
            "verify_properties enumerates O(n^3) triples; n = {n} exceeds the 2000 guard"
        )));
    }
    let mut by_rank: Vec<ElementId> = (1..=n).map(ElementId).collect();
    by_rank.sort_by_key(|e| model.rank_of(*e));

    let mut worst: Option<Violation> = None;
    let mut gamma = 1.0f64;
    let mut sst_holds = true;
    let mut sti_holds = true;

    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let (i, j, k) = (by_rank[a], by_rank[b], by_rank[c]);
                let m_ij = model.margin(i, j);
                let m_jk = model.margin(j, k);
                let m_ik = model.margin(i, k);
                let strongest_leg = m_ij.max(m_jk);

                let sst_gap = strongest_leg - m_ik;
                if sst_gap > tol {
                    sst_holds = false;
                    record_worst(
                        &mut worst,
                        PropertyKind::StrongStochasticTransitivity,
                        (i, j, k),
                        sst_gap,
                    );
                }
                let sti_gap = m_ik - (m_ij + m_jk);
                if sti_gap > tol {
                    sti_holds = false;
                    record_worst(
                        &mut worst,
                        PropertyKind::StochasticTriangleInequality,
                        (i, j, k),
                        sti_gap,
                    );
                }
                if strongest_leg > 0.0 {
                    if m_ik > 0.0 {
                        gamma = gamma.max(strongest_leg / m_ik);
                    } else {
                        gamma = f64::INFINITY;
                    }
                }
            }
        }
    }
    if sst_holds {
        gamma = 1.0;
    }
    Ok(ModelPropertyReport {
        sst_holds,
        sti_holds,
        gamma,
        worst_violation: worst,
    })
}

fn record_worst(
    worst: &mut Option<Violation>,
    kind: PropertyKind,
    triple: (ElementId, ElementId, ElementId),
    magnitude: f64,
) {
    if worst.map_or(true, |w| magnitude > w.magnitude) {
        *worst = Some(Violation {
            kind,
            triple,
            magnitude,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RngFactory;

    #[test]
    fn deterministic_duel_always_returns_winner() {
        let model = PreferenceModel::matrix(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut rng = RngFactory::new(1).stream();
        for _ in 0..50 {
            assert_eq!(
                ctx.duel(ElementId(1), ElementId(2), &mut rng).unwrap(),
                ElementId(1)
            );
        }
    }

    #[test]
    fn duel_rejects_bad_input() {
        let model = PreferenceModel::adjacent_gap(3, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut rng = RngFactory::new(1).stream();
        assert!(ctx.duel(ElementId(1), ElementId(1), &mut rng).is_err());
        assert!(ctx.duel(ElementId(1), ElementId(9), &mut rng).is_err());
        assert_eq!(tally.total(), 0);
    }

    #[test]
    fn duel_counts_one_per_call() {
        let model = PreferenceModel::adjacent_gap(4, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally).with_phase("unit");
        let mut rng = RngFactory::new(3).stream();
        for _ in 0..17 {
            ctx.duel(ElementId(2), ElementId(3), &mut rng).unwrap();
        }
        assert_eq!(tally.total(), 17);
        assert_eq!(tally.phases()["unit"], 17);
    }

    // Empirical duel frequency over 10^6 draws stays within 5 sigma of p.
    #[test]
    fn adjacent_gap_empirical_rate() {
        let model = PreferenceModel::adjacent_gap(5, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut rng = RngFactory::new(42).stream();
        let n_draws = 1_000_000u64;
        let mut wins = 0u64;
        for _ in 0..n_draws {
            if ctx.duel(ElementId(1), ElementId(2), &mut rng).unwrap() == ElementId(1) {
                wins += 1;
            }
        }
        let freq = wins as f64 / n_draws as f64;
        let sigma = (0.6f64 * 0.4 / n_draws as f64).sqrt();
        assert!(
            (freq - 0.6).abs() <= 5.0 * sigma,
            "freq {freq} outside 0.6 +/- {}",
            5.0 * sigma
        );
        assert!((freq - 0.6).abs() <= 0.002);
    }

    #[test]
    fn duel_many_matches_probability() {
        let model = PreferenceModel::adjacent_gap(5, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut rng = RngFactory::new(11).stream();
        let k = 1_000_000u64;
        let wins = ctx.duel_many(ElementId(1), ElementId(2), k, &mut rng).unwrap();
        let freq = wins as f64 / k as f64;
        assert!((freq - 0.6).abs() <= 0.002, "freq {freq}");
        assert_eq!(tally.total(), k);
    }

    #[test]
    fn probabilities_are_complementary() {
        let models = [
            PreferenceModel::adjacent_gap(6, 0.6).unwrap(),
            PreferenceModel::single_gap(6, 0.01).unwrap(),
            PreferenceModel::mallows(6, 0.8).unwrap(),
            PreferenceModel::btl(vec![5.0, 3.0, 2.0, 1.0]).unwrap(),
        ];
        for model in &models {
            for i in 1..=model.n() {
                for j in 1..=model.n() {
                    if i == j {
                        continue;
                    }
                    let (i, j) = (ElementId(i), ElementId(j));
                    assert_eq!(model.prob(i, j) + model.prob(j, i), 1.0);
                }
            }
        }
    }

    #[test]
    fn stronger_element_has_nonnegative_margin() {
        let model = PreferenceModel::btl(vec![1.0, 4.0, 2.0]).unwrap();
        // element 2 is the strongest under these weights
        assert_eq!(model.true_max(), ElementId(2));
        assert_eq!(model.rank_of(ElementId(2)), 1);
        assert_eq!(model.rank_of(ElementId(3)), 2);
        assert_eq!(model.rank_of(ElementId(1)), 3);
        assert!(model.margin(ElementId(2), ElementId(1)) >= 0.0);
        assert!(model.margin(ElementId(2), ElementId(3)) >= 0.0);
    }

    #[test]
    fn mallows_adjacent_anchor() {
        // phi = 0.99 adjacent: p = 1/1.99, margin about 0.0025
        let p = mallows_pairwise(0.99, 1, 2).unwrap();
        assert!((p - 1.0 / 1.99).abs() < 1e-12);
        assert!((p - 0.5 - 0.0025).abs() < 1e-4);
        // phi -> 1 limit: adjacent probability approaches 1/2
        assert!((mallows_pairwise(0.999999, 1, 2).unwrap() - 0.5).abs() < 1e-6);
        assert!(mallows_pairwise(1.0, 1, 2).is_err());
        assert!(mallows_pairwise(0.5, 2, 2).is_err());
    }

    #[test]
    fn adjacent_gap_properties() {
        let model = PreferenceModel::adjacent_gap(8, 0.6).unwrap();
        let report = verify_properties(&model, 1e-12).unwrap();
        assert!(report.sst_holds);
        assert!(report.sti_holds);
        assert_eq!(report.gamma, 1.0);
        assert!(report.worst_violation.is_none());
    }

    #[test]
    fn single_gap_properties() {
        let model = PreferenceModel::single_gap(8, 0.01).unwrap();
        let report = verify_properties(&model, 1e-12).unwrap();
        assert!(report.sst_holds);
        assert!(report.sti_holds);
        assert_eq!(report.gamma, 1.0);
    }

    #[test]
    fn gamma_of_sst_violating_matrix() {
        // p(1,3) = 0.55 while p(1,2) = p(2,3) = 0.6: gamma = 0.1 / 0.05 = 2
        let model = PreferenceModel::matrix(vec![
            vec![0.5, 0.6, 0.55],
            vec![0.4, 0.5, 0.6],
            vec![0.45, 0.4, 0.5],
        ])
        .unwrap();
        let report = verify_properties(&model, 1e-12).unwrap();
        assert!(!report.sst_holds);
        assert!((report.gamma - 2.0).abs() < 1e-12);
        let worst = report.worst_violation.unwrap();
        assert_eq!(worst.kind, PropertyKind::StrongStochasticTransitivity);
        assert!((worst.magnitude - 0.05).abs() < 1e-12);
    }

    #[test]
    fn verify_guard_rejects_large_n() {
        let model = PreferenceModel::adjacent_gap(2001, 0.6).unwrap();
        assert!(verify_properties(&model, 1e-9).is_err());
    }

    #[test]
    fn matrix_rejects_inconsistent_rows() {
        let bad = PreferenceModel::matrix(vec![vec![0.5, 0.7], vec![0.4, 0.5]]);
        assert!(bad.is_err());
    }

    #[test]
    fn dummies_never_beat_real_elements() {
        let model = PreferenceModel::adjacent_gap(3, 0.6).unwrap();
        let mut arena = Arena::new(&model);
        let loser = arena.add_dummy(DummyKind::AlwaysLoses);
        let winner = arena.add_dummy(DummyKind::AlwaysWins);
        assert!(!arena.is_real(loser));
        assert_eq!(arena.prob(loser, ElementId(1)), 0.0);
        assert_eq!(arena.prob(ElementId(3), loser), 1.0);
        assert_eq!(arena.prob(winner, ElementId(1)), 1.0);
        assert_eq!(arena.prob(winner, loser), 1.0);
        assert_eq!(arena.prob(loser, winner), 0.0);
    }

    // Lemma-style consequence check: on any model passing both flags, for
    // every ordered triple margin(i,k) <= eps1 + eps2 with eps1 = margin(i,j),
    // eps2 = margin(j,k). Enumeration over a model that passes both.
    #[test]
    fn trans_tri_implication_on_passing_models() {
        for model in [
            PreferenceModel::adjacent_gap(10, 0.6).unwrap(),
            PreferenceModel::single_gap(10, 0.02).unwrap(),
        ] {
            let report = verify_properties(&model, 1e-12).unwrap();
            assert!(report.sst_holds && report.sti_holds);
            for i in 1..=10usize {
                for j in (i + 1)..=10 {
                    for k in (j + 1)..=10 {
                        let (i, j, k) = (ElementId(i), ElementId(j), ElementId(k));
                        assert!(
                            model.margin(i, k) <= model.margin(i, j) + model.margin(j, k) + 1e-12
                        );
                    }
                }
            }
        }
    }
}
