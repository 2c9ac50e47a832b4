//! The two comparison primitives every higher-level algorithm uses:
//! adaptive-stopping `compare` and fixed-budget `compare2`.

use crate::error::{Error, Result};
use crate::oracle::{Ctx, ElementId};
use crate::stream::Stream;

/// Bias, confidence, and the comparison budget they imply:
/// `m = ceil(ln(2/delta) / (2 eps^2))`. All logs are natural.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareParams {
    pub eps: f64,
    pub delta: f64,
    pub budget: u64,
}

impl CompareParams {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::param(format!("compare eps must be in (0, 1/2), got {eps}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("compare delta must be in (0, 1), got {delta}")));
        }
        let budget = ((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as u64;
        Ok(CompareParams { eps, delta, budget })
    }
}

/// Confidence radius after `r` duels: `sqrt(ln(4 r^2 / delta) / (2 r))`.
/// Initialized to 1/2 at `r = 0` so the loop always duels at least once.
pub fn confidence_radius(r: u64, delta: f64) -> f64 {
    if r == 0 {
        return 0.5;
    }
    let r = r as f64;
    ((4.0 * r * r / delta).ln() / (2.0 * r)).sqrt()
}

/// Adaptive comparison of `i` and `j`: duels until the empirical win rate
/// of `i` clears the shrinking confidence band or the budget runs out,
/// then declares `j` the winner iff the rate is at most 1/2.
///
/// Consumes at most `budget + 1` duels (the loop guard is `r <= m` with
/// `r` incremented after the duel). If `margin(i, j) >= eps` the output
/// is `i` with probability at least `1 - delta`.
pub fn compare(
    ctx: Ctx<'_>,
    i: ElementId,
    j: ElementId,
    eps: f64,
    delta: f64,
    rng: &mut Stream,
) -> Result<ElementId> {
    if i == j {
        return Err(Error::param(format!("cannot compare element {i} against itself")));
    }
    let params = CompareParams::new(eps, delta)?;
    let mut wins = 0u64;
    let mut r = 0u64;
    let mut p_hat = 0.5f64;
    let mut c_hat = 0.5f64;
    while (p_hat - 0.5).abs() <= c_hat - eps && r <= params.budget {
        if ctx.duel(i, j, rng)? == i {
            wins += 1;
        }
        r += 1;
        p_hat = wins as f64 / r as f64;
        c_hat = confidence_radius(r, delta);
    }
    Ok(if p_hat <= 0.5 { j } else { i })
}

/// Fixed-budget comparison: exactly `k` duels, returning the fraction of
/// times `a` beat `b`.
pub fn compare2(ctx: Ctx<'_>, a: ElementId, b: ElementId, k: u64, rng: &mut Stream) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("compare2 needs a positive duel count"));
    }
    let wins = ctx.duel_many(a, b, k, rng)?;
    Ok(wins as f64 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Arena, PreferenceModel, Tally};
    use crate::stream::RngFactory;

    #[test]
    fn budget_formula() {
        // eps = 0.05, delta = 0.1: m = ceil(200 ln 20) = 600
        let p = CompareParams::new(0.05, 0.1).unwrap();
        assert_eq!(p.budget, 600);
        assert!(CompareParams::new(0.5, 0.1).is_err());
        assert!(CompareParams::new(0.05, 1.0).is_err());
    }

    // Oracle: first r at which a sure winner (p_hat = 1) exits the loop is
    // the least r with 1/2 > c_hat(r) - eps.
    fn first_confident_round(eps: f64, delta: f64) -> u64 {
        (1..).find(|&r| 0.5 > confidence_radius(r, delta) - eps).unwrap()
    }

    #[test]
    fn deterministic_pair_stops_early() {
        let model = PreferenceModel::matrix(vec![vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        let arena = Arena::new(&model);
        let expected_rounds = first_confident_round(0.05, 0.1);
        assert!((16..=20).contains(&expected_rounds), "oracle gave {expected_rounds}");
        for seed in 0..20 {
            let tally = Tally::new();
            let ctx = Ctx::new(&arena, &tally);
            let mut rng = RngFactory::new(seed).stream();
            let w = compare(ctx, ElementId(1), ElementId(2), 0.05, 0.1, &mut rng).unwrap();
            assert_eq!(w, ElementId(1));
            assert_eq!(tally.total(), expected_rounds);
        }
    }

    #[test]
    fn never_exceeds_budget_plus_one() {
        // p exactly 1/2 forces worst-case budget exhaustion
        let model = PreferenceModel::matrix(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let arena = Arena::new(&model);
        let params = CompareParams::new(0.1, 0.2).unwrap();
        for seed in 0..30 {
            let tally = Tally::new();
            let ctx = Ctx::new(&arena, &tally);
            let mut rng = RngFactory::new(seed).stream();
            let w = compare(ctx, ElementId(1), ElementId(2), 0.1, 0.2, &mut rng).unwrap();
            assert!(w == ElementId(1) || w == ElementId(2));
            assert!(tally.total() <= params.budget + 1, "used {}", tally.total());
        }
    }

    #[test]
    fn symmetric_pair_is_unbiased() {
        let model = PreferenceModel::matrix(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut ones = 0usize;
        let runs = 1000;
        for seed in 0..runs {
            let mut rng = RngFactory::new(seed as u64).named("sym").stream();
            if compare(ctx, ElementId(1), ElementId(2), 0.1, 0.3, &mut rng).unwrap()
                == ElementId(1)
            {
                ones += 1;
            }
        }
        let freq = ones as f64 / runs as f64;
        assert!((freq - 0.5).abs() <= 0.05, "freq {freq}");
    }

    // Lemma-1-style guarantee at test scale: margin 0.1, eps = 0.05,
    // delta = 0.1 -> wrong winner in at most 13% of 2000 runs.
    #[test]
    fn wrong_winner_rate_bounded() {
        let model = PreferenceModel::adjacent_gap(2, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut wrong = 0usize;
        let runs = 2000;
        for seed in 0..runs {
            let mut rng = RngFactory::new(seed as u64).named("lemma1").stream();
            if compare(ctx, ElementId(1), ElementId(2), 0.05, 0.1, &mut rng).unwrap()
                != ElementId(1)
            {
                wrong += 1;
            }
        }
        assert!(
            (wrong as f64 / runs as f64) <= 0.13,
            "wrong rate {}",
            wrong as f64 / runs as f64
        );
    }

    // "stops much before comparison budget" when the margin dwarfs eps.
    #[test]
    fn early_stopping_with_wide_margin() {
        let model = PreferenceModel::adjacent_gap(2, 0.9).unwrap();
        let arena = Arena::new(&model);
        let params = CompareParams::new(0.05, 0.1).unwrap();
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let runs = 200u64;
        for seed in 0..runs {
            let mut rng = RngFactory::new(seed).named("early").stream();
            compare(ctx, ElementId(1), ElementId(2), 0.05, 0.1, &mut rng).unwrap();
        }
        let mean = tally.total() as f64 / runs as f64;
        assert!(mean < params.budget as f64 / 4.0, "mean duels {mean}");
    }

    #[test]
    fn compare2_contract() {
        let model = PreferenceModel::matrix(vec![vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let mut rng = RngFactory::new(5).stream();
        let t = compare2(ctx, ElementId(1), ElementId(2), 10, &mut rng).unwrap();
        assert_eq!(t, 1.0);
        assert_eq!(tally.total(), 10);
        compare2(ctx, ElementId(2), ElementId(1), 7, &mut rng).unwrap();
        assert_eq!(tally.total(), 17);
        assert!(compare2(ctx, ElementId(1), ElementId(2), 0, &mut rng).is_err());
    }

    #[test]
    fn compare2_concentrates() {
        let model = PreferenceModel::adjacent_gap(2, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        // Binomial concentration: 4 sigma at k = 1e5 is about 0.0062 < 0.01
        let mut rng = RngFactory::new(9).stream();
        let t = compare2(ctx, ElementId(1), ElementId(2), 100_000, &mut rng).unwrap();
        assert!((t - 0.6).abs() <= 0.01, "fraction {t}");
    }
}
