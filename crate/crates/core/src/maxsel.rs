//! Knockout-Round and Knockout: (eps, delta)-PAC maximum selection.
//!
//! Knockout pads to a power of two with always-losing dummies, then runs
//! rounds of random pairings. Round `i` uses bias `c*eps / (gamma * 2^(i/3))`
//! and confidence `delta / 2^i` with `c = 2^(1/3) - 1`, so the per-round
//! biases telescope to exactly `eps`.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::duel::compare;
use crate::error::{Error, Result};
use crate::oracle::{Arena, Ctx, DummyKind, ElementId, Tally};
use crate::stream::RngFactory;

/// `c = 2^(1/3) - 1`, the constant that makes the bias schedule telescope.
pub fn knockout_constant() -> f64 {
    2f64.powf(1.0 / 3.0) - 1.0
}

/// Per-round schedule for [`knockout`].
#[derive(Clone, Copy, Debug)]
pub struct KnockoutParams {
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl KnockoutParams {
    pub fn new(eps: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::param(format!("knockout eps must be in (0, 1/2), got {eps}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("knockout delta must be in (0, 1), got {delta}")));
        }
        if !(gamma >= 1.0) {
            return Err(Error::param(format!("knockout gamma must be >= 1, got {gamma}")));
        }
        Ok(KnockoutParams { eps, delta, gamma })
    }

    /// Bias passed to round `i` (1-based): `c*eps / (gamma * 2^(i/3))`.
    pub fn round_bias(&self, round: u32) -> f64 {
        knockout_constant() * self.eps / (self.gamma * 2f64.powf(f64::from(round) / 3.0))
    }

    /// Confidence passed to round `i` (1-based): `delta / 2^i`.
    pub fn round_confidence(&self, round: u32) -> f64 {
        self.delta / 2f64.powi(round as i32)
    }
}

/// One knockout round: a uniformly random perfect pairing of `s`, each pair
/// resolved by adaptive [`compare`]; returns the winners in pair order.
/// `|s|` must be even (the caller pads). Pairs are resolved concurrently
/// with per-pair child streams, so the result is independent of the worker
/// count.
pub fn knockout_round(
    ctx: Ctx<'_>,
    s: &[ElementId],
    eps: f64,
    delta: f64,
    streams: &RngFactory,
) -> Result<Vec<ElementId>> {
    if s.len() < 2 || s.len() % 2 != 0 {
        return Err(Error::param(format!(
            "knockout_round needs an even set of size >= 2, got {}",
            s.len()
        )));
    }
    let mut shuffled = s.to_vec();
    shuffled.shuffle(&mut streams.named("pairing").stream());
    shuffled
        .par_chunks(2)
        .enumerate()
        .map(|(pair_idx, pair)| {
            let mut rng = streams.named("pair").child(pair_idx as u64).stream();
            compare(ctx, pair[0], pair[1], eps, delta, &mut rng)
        })
        .collect()
}

/// Knockout maximum selection. Pads `s` to the next power of two with
/// dummies that lose to everything, then halves the field each round under
/// the geometric (bias, confidence) schedule. With probability at least
/// `1 - delta` the output is an eps-maximum; the comparison count is
/// `O(gamma^2 |s| / eps^2 * log(1/delta))`.
pub fn knockout(
    arena: &mut Arena<'_>,
    tally: &Tally,
    s: &[ElementId],
    eps: f64,
    delta: f64,
    gamma: f64,
    streams: &RngFactory,
) -> Result<ElementId> {
    let params = KnockoutParams::new(eps, delta, gamma)?;
    if s.is_empty() {
        return Err(Error::param("knockout needs a nonempty set"));
    }
    if s.len() == 1 {
        return Ok(s[0]);
    }
    let mut field = s.to_vec();
    let padded = s.len().next_power_of_two();
    for _ in s.len()..padded {
        field.push(arena.add_dummy(DummyKind::AlwaysLoses));
    }
    let arena = &*arena;
    let mut round: u32 = 1;
    while field.len() > 1 {
        let phase = format!("round{round}");
        let ctx = Ctx::new(arena, tally).with_phase(&phase);
        field = knockout_round(
            ctx,
            &field,
            params.round_bias(round),
            params.round_confidence(round),
            &streams.named("round").child(u64::from(round)),
        )?;
        round += 1;
    }
    let winner = field[0];
    debug_assert!(arena.is_real(winner), "a dummy survived the tournament");
    Ok(winner)
}
