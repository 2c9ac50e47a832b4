//! Merge and Merge-Rank: noisy merge sort as an (eps, delta)-PAC ranking
//! algorithm, plus the Rank-3 parameterization consumed by the
//! binary-search ranking pipeline.
//!
//! Sequences are ascending by strength: position 1 holds the weakest
//! element, so a perfect output over ids 1..n is (n, n-1, ..., 1).

use crate::duel::compare;
use crate::error::{Error, Result};
use crate::oracle::{Ctx, ElementId, PreferenceModel};
use crate::stream::{RngFactory, Stream};

/// An ordered sequence of element ids, ascending strength (weakest first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedSeq(pub Vec<ElementId>);

impl RankedSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The strongest element (last position), if any.
    pub fn strongest(&self) -> Option<ElementId> {
        self.0.last().copied()
    }
}

/// Error of an ordered sequence under the true model: the maximum margin
/// `margin(S(i), S(j))` over position pairs i < j. At most 0 for a
/// perfectly ordered ascending sequence; the sequence is an eps-ranking
/// iff this is at most eps. Sequences with fewer than two elements have
/// error 0 by convention.
pub fn seq_error(seq: &[ElementId], model: &PreferenceModel) -> f64 {
    if seq.len() < 2 {
        return 0.0;
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            worst = worst.max(model.margin(seq[i], seq[j]));
        }
    }
    worst
}

/// Merges two ascending sequences with noisy head-to-heads: each is
/// resolved by adaptive [`compare`] and the loser is emitted first. With
/// probability `>= 1 - (|s1|+|s2|) delta` the merged error exceeds
/// `max(err(s1), err(s2))` by at most eps.
pub fn merge(
    ctx: Ctx<'_>,
    s1: &[ElementId],
    s2: &[ElementId],
    eps: f64,
    delta: f64,
    rng: &mut Stream,
) -> Result<Vec<ElementId>> {
    let mut out = Vec::with_capacity(s1.len() + s2.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < s1.len() && j < s2.len() {
        if compare(ctx, s1[i], s2[j], eps, delta, rng)? == s1[i] {
            out.push(s2[j]);
            j += 1;
        } else {
            out.push(s1[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&s1[i..]);
    out.extend_from_slice(&s2[j..]);
    Ok(out)
}

/// Recursive halving merge sort over noisy comparisons. Every merge level
/// reuses the same `(eps, delta)`; the output error is at most
/// `eps * log2 |s|` with probability `>= 1 - |s|^2 delta`. The two halves
/// run concurrently on independent derived streams.
pub fn merge_rank(
    ctx: Ctx<'_>,
    s: &[ElementId],
    eps: f64,
    delta: f64,
    streams: &RngFactory,
) -> Result<Vec<ElementId>> {
    if s.len() <= 1 {
        return Ok(s.to_vec());
    }
    let mid = s.len() / 2; // left half gets the floor
    let (left, right) = rayon::join(
        || merge_rank(ctx, &s[..mid], eps, delta, &streams.child(1)),
        || merge_rank(ctx, &s[mid..], eps, delta, &streams.child(2)),
    );
    merge(
        ctx,
        &left?,
        &right?,
        eps,
        delta,
        &mut streams.named("merge").stream(),
    )
}

/// Rank-3 parameterization: `merge_rank(s, eps / log2 |s|, delta / |s|^2)`.
/// With probability `>= 1 - delta` the output is an eps-ranking, in
/// `O(|s| (log |s|)^3 / eps^2 * log(|s|/delta))` comparisons.
pub fn rank3(
    ctx: Ctx<'_>,
    s: &[ElementId],
    eps: f64,
    delta: f64,
    streams: &RngFactory,
) -> Result<RankedSeq> {
    if s.len() < 2 {
        return Err(Error::param(format!("rank3 needs at least 2 elements, got {}", s.len())));
    }
    let inner_eps = eps / (s.len() as f64).log2();
    let inner_delta = delta / (s.len() as f64).powi(2);
    Ok(RankedSeq(merge_rank(ctx, s, inner_eps, inner_delta, streams)?))
}
