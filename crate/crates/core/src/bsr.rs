//! Binary-search ranking: anchor selection, interval-tree random-walk
//! binning, anchor binary-search fallback, near/far classification,
//! per-bin ranking, and assembly.
//!
//! Anchor sequences here are ascending by strength with a always-losing
//! dummy at position 1 and an always-winning dummy at the last position,
//! so every element falls in some bin `(k, k+1)`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::duel::compare2;
use crate::error::{Error, Result};
use crate::mergerank::{rank3, RankedSeq};
use crate::oracle::{Arena, Ctx, DummyKind, ElementId, Tally};
use crate::stream::{RngFactory, Stream};

/// A node of the anchor interval tree: the interval between anchor
/// positions `alpha1` and `alpha2`. Leaves are the bins `(k, k+1)`.
#[derive(Clone, Copy, Debug)]
pub struct IntervalNode {
    pub alpha1: usize,
    pub alpha2: usize,
    pub parent: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Interval tree over anchor positions `1..=m`, stored as an index arena.
#[derive(Clone, Debug)]
pub struct IntervalTree {
    nodes: Vec<IntervalNode>,
    root: usize,
}

impl IntervalTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, idx: usize) -> &IntervalNode {
        &self.nodes[idx]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_leaf(&self, idx: usize) -> bool {
        let n = &self.nodes[idx];
        n.alpha2 - n.alpha1 <= 1
    }

    pub fn leaves(&self) -> impl Iterator<Item = &IntervalNode> {
        self.nodes.iter().filter(|n| n.alpha2 - n.alpha1 <= 1)
    }
}

fn interval_mid(a1: usize, a2: usize) -> usize {
    (a1 + a2).div_ceil(2)
}

/// Builds the binary search tree over `m` anchors: root `(1, m)`, children
/// split at `ceil((a1 + a2) / 2)`, leaves exactly `(k, k+1)` for
/// `k = 1..m-1`.
pub fn build_tree(m: usize) -> Result<IntervalTree> {
    if m < 2 {
        return Err(Error::param(format!("interval tree needs >= 2 anchors, got {m}")));
    }
    let mut nodes = Vec::new();
    nodes.push(IntervalNode {
        alpha1: 1,
        alpha2: m,
        parent: None,
        left: None,
        right: None,
    });
    let mut pending = vec![0usize];
    while let Some(idx) = pending.pop() {
        let (a1, a2) = (nodes[idx].alpha1, nodes[idx].alpha2);
        if a2 - a1 > 1 {
            let mid = interval_mid(a1, a2);
            let left = nodes.len();
            nodes.push(IntervalNode {
                alpha1: a1,
                alpha2: mid,
                parent: Some(idx),
                left: None,
                right: None,
            });
            let right = nodes.len();
            nodes.push(IntervalNode {
                alpha1: mid,
                alpha2: a2,
                parent: Some(idx),
                left: None,
                right: None,
            });
            nodes[idx].left = Some(left);
            nodes[idx].right = Some(right);
            pending.push(left);
            pending.push(right);
        }
    }
    Ok(IntervalTree { nodes, root: 0 })
}

fn ln_ceil(n: usize) -> u64 {
    (n as f64).ln().ceil() as u64
}

/// Outcome of one interval walk: the bin index (position of the bin's left
/// anchor in the anchor sequence) and whether it came from the counter
/// path or the binary-search fallback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkOutcome {
    pub bin: usize,
    pub via_counter: bool,
}

/// Random walk over the anchor interval tree, placing `e` in a nearly
/// correct bin. Runs for `30 ceil(ln n)` steps with `ceil(10 / eps^2)`
/// duels per anchor test; if the leaf counter ends above `10 ceil(ln n)`
/// the leaf's bin is returned, otherwise the visited anchors are handed to
/// [`binary_search`] with bias `2 eps`.
///
/// `n` is the size of the enclosing problem and sets the step and
/// repetition budgets.
pub fn interval_binary_search(
    ctx: Ctx<'_>,
    s_prime: &[ElementId],
    e: ElementId,
    eps: f64,
    n: usize,
    rng: &mut Stream,
) -> Result<WalkOutcome> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("walk eps must be in (0, 1/2), got {eps}")));
    }
    let tree = build_tree(s_prime.len())?;
    let steps = 30 * ln_ceil(n);
    let threshold = 10 * ln_ceil(n);
    let k = (10.0 / (eps * eps)).ceil() as u64;
    let anchor = |pos: usize| s_prime[pos - 1];

    let mut node = tree.root();
    let mut count: u64 = 0;
    let mut visited: BTreeSet<usize> = BTreeSet::new();
    for _ in 0..steps {
        let nd = *tree.node(node);
        if nd.alpha2 - nd.alpha1 > 1 {
            let mid = interval_mid(nd.alpha1, nd.alpha2);
            visited.insert(nd.alpha1);
            visited.insert(nd.alpha2);
            visited.insert(mid);
            if compare2(ctx, anchor(nd.alpha1), e, k, rng)? > 0.5
                || compare2(ctx, e, anchor(nd.alpha2), k, rng)? > 0.5
            {
                node = nd.parent.unwrap_or(node);
            } else if compare2(ctx, anchor(mid), e, k, rng)? > 0.5 {
                node = nd.left.expect("internal node");
            } else {
                node = nd.right.expect("internal node");
            }
        } else {
            visited.insert(nd.alpha1);
            visited.insert(nd.alpha2);
            if compare2(ctx, e, anchor(nd.alpha1), k, rng)? > 0.5
                && compare2(ctx, anchor(nd.alpha2), e, k, rng)? > 0.5
            {
                count += 1;
            } else if count == 0 {
                node = nd.parent.unwrap_or(node);
            } else {
                count -= 1;
            }
        }
    }
    debug_assert!(visited.len() as u64 <= 3 * steps);
    let nd = tree.node(node);
    if nd.alpha2 - nd.alpha1 == 1 && count > threshold {
        return Ok(WalkOutcome {
            bin: nd.alpha1,
            via_counter: true,
        });
    }
    let q: Vec<usize> = visited.into_iter().collect();
    let bin = binary_search(ctx, s_prime, &q, e, 2.0 * eps, n, rng)?;
    Ok(WalkOutcome {
        bin,
        via_counter: false,
    })
}

/// Noisy binary search over the visited anchor positions `q` (sorted
/// ascending, deduplicated): returns an anchor position whose win fraction
/// against `e` lands in `[1/2 - 3 eps, 1/2 + 3 eps]`, or the last
/// surviving candidate. Each probe spends `ceil(10 ln n / eps^2)` duels.
///
/// When `e` loses to the probed anchor the search keeps the weaker half,
/// and vice versa.
pub fn binary_search(
    ctx: Ctx<'_>,
    s_prime: &[ElementId],
    q: &[usize],
    e: ElementId,
    eps: f64,
    n: usize,
    rng: &mut Stream,
) -> Result<usize> {
    if q.is_empty() {
        return Err(Error::param("binary_search needs a nonempty anchor set"));
    }
    let k = (10.0 * (n as f64).ln() / (eps * eps)).ceil() as u64;
    let (mut lo, mut hi) = (1usize, q.len());
    while hi > lo {
        let mid = (lo + hi).div_ceil(2);
        let t = compare2(ctx, e, s_prime[q[mid - 1] - 1], k, rng)?;
        if (0.5 - 3.0 * eps..=0.5 + 3.0 * eps).contains(&t) {
            return Ok(q[mid - 1]);
        }
        if t < 0.5 - 3.0 * eps {
            // anchor beats e: discard the stronger half
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    Ok(q[hi - 1])
}

/// A ranking backend satisfying the Rank-x contract: `rank(s, eps, delta)`
/// returns an eps-ranking with probability at least `1 - delta`.
pub trait RankBackend: Sync {
    fn rank(
        &self,
        ctx: Ctx<'_>,
        items: &[ElementId],
        eps: f64,
        delta: f64,
        streams: &RngFactory,
    ) -> Result<RankedSeq>;
}

/// The bundled Rank-3 backend (noisy merge sort).
pub struct MergeRankBackend;

impl RankBackend for MergeRankBackend {
    fn rank(
        &self,
        ctx: Ctx<'_>,
        items: &[ElementId],
        eps: f64,
        delta: f64,
        streams: &RngFactory,
    ) -> Result<RankedSeq> {
        if items.len() < 2 {
            return Ok(RankedSeq(items.to_vec()));
        }
        rank3(ctx, items, eps, delta, streams)
    }
}

/// Tuning for [`binary_search_ranking`].
#[derive(Clone, Copy, Debug)]
pub struct BsrConfig {
    pub eps: f64,
    /// Rank-x exponent; the anchor count is `floor(n / (log2 n)^x)`.
    pub x: f64,
    /// Overrides the anchor count, for exercising the full pipeline at
    /// sizes where the asymptotic formula degenerates.
    pub anchor_override: Option<usize>,
}

/// What one pipeline run produced, plus the partition diagnostics the
/// correctness argument rests on.
#[derive(Clone, Debug)]
pub struct BsrOutput {
    pub ranking: RankedSeq,
    /// Every non-anchor element landed in exactly one near/far set.
    pub partition_ok: bool,
    pub anchor_count: usize,
    /// The degenerate path (too few anchors; whole input ranked directly).
    pub used_fallback: bool,
    /// How many elements were binned by the walk's counter path.
    pub counter_path: usize,
}

/// The full binary-search ranking pipeline. With a conforming Rank-x
/// backend this outputs an eps-ranking with probability at least `1 - 1/n`
/// in `O(n log n (log log n)^x / eps^2)` comparisons.
pub fn binary_search_ranking(
    arena: &mut Arena<'_>,
    tally: &Tally,
    s: &[ElementId],
    cfg: &BsrConfig,
    backend: &dyn RankBackend,
    streams: &RngFactory,
) -> Result<BsrOutput> {
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
        return Err(Error::param(format!("bsr eps must be in (0, 1/2), got {}", cfg.eps)));
    }
    if !(cfg.x > 1.0) {
        return Err(Error::param(format!("bsr exponent x must be > 1, got {}", cfg.x)));
    }
    let n = s.len();
    if n < 2 {
        return Ok(BsrOutput {
            ranking: RankedSeq(s.to_vec()),
            partition_ok: true,
            anchor_count: 0,
            used_fallback: true,
            counter_path: 0,
        });
    }
    let nf = n as f64;
    let anchor_count = match cfg.anchor_override {
        Some(m) => {
            if m < 2 || m > n {
                return Err(Error::param(format!(
                    "anchor override {m} outside [2, {n}]"
                )));
            }
            m
        }
        None => (nf / nf.log2().powf(cfg.x)).floor() as usize,
    };
    if anchor_count < 2 {
        let ctx = Ctx::new(arena, tally).with_phase("fallback-rank");
        let ranking = backend.rank(ctx, s, cfg.eps, 1.0 / nf, &streams.named("fallback"))?;
        return Ok(BsrOutput {
            ranking,
            partition_ok: true,
            anchor_count,
            used_fallback: true,
            counter_path: 0,
        });
    }

    let eps2 = cfg.eps / 15.0; // bias for binning and classification
    let eps1 = cfg.eps / 16.0; // bias for the anchor ranking

    // Step 1: sample anchors without replacement.
    let mut shuffled = s.to_vec();
    use rand::seq::SliceRandom;
    shuffled.shuffle(&mut streams.named("anchors").stream());
    let anchors: Vec<ElementId> = shuffled[..anchor_count].to_vec();
    let rest: Vec<ElementId> = s
        .iter()
        .copied()
        .filter(|e| !anchors.contains(e))
        .collect();

    // Step 2: rank the anchors.
    let ranked_anchors = {
        let ctx = Ctx::new(arena, tally).with_phase("anchor-rank");
        backend.rank(ctx, &anchors, eps1, nf.powi(-6), &streams.named("rank-anchors"))?
    };

    // Step 3: dummies bracket the anchor sequence.
    let dummy_lo = arena.add_dummy(DummyKind::AlwaysLoses);
    let dummy_hi = arena.add_dummy(DummyKind::AlwaysWins);
    let mut s_prime = Vec::with_capacity(anchor_count + 2);
    s_prime.push(dummy_lo);
    s_prime.extend_from_slice(&ranked_anchors.0);
    s_prime.push(dummy_hi);
    let arena = &*arena;

    // Step 4: bin every non-anchor via the interval walk.
    let binning = streams.named("binning");
    let placed: Vec<(ElementId, WalkOutcome)> = {
        let ctx = Ctx::new(arena, tally).with_phase("binning");
        rest.par_iter()
            .enumerate()
            .map(|(idx, &e)| {
                let mut rng = binning.child(idx as u64).stream();
                interval_binary_search(ctx, &s_prime, e, eps2, n, &mut rng)
                    .map(|w| (e, w))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let counter_path = placed.iter().filter(|(_, w)| w.via_counter).count();
    let bin_count = s_prime.len() - 1;
    let mut bins: Vec<Vec<(usize, ElementId)>> = vec![Vec::new(); bin_count + 2];
    for (idx, (e, w)) in placed.iter().enumerate() {
        bins[w.bin].push((idx, *e));
    }

    // Step 5: classify against the bin anchors, rank the far sets, assemble.
    let budget = (10.0 * nf.ln() / (eps2 * eps2)).ceil() as u64;
    let band = 0.5 - 6.0 * eps2..=0.5 + 6.0 * eps2;
    let mut near: Vec<Vec<ElementId>> = vec![Vec::new(); bin_count + 2];
    let mut far: Vec<Vec<ElementId>> = vec![Vec::new(); bin_count + 2];
    let classify = streams.named("classify");
    {
        let ctx = Ctx::new(arena, tally).with_phase("classify");
        for j in 1..=bin_count {
            for &(idx, e) in &bins[j] {
                let mut rng = classify.child(idx as u64).stream();
                let t1 = compare2(ctx, e, s_prime[j - 1], budget, &mut rng)?;
                if band.contains(&t1) {
                    near[j].push(e);
                } else {
                    let t2 = compare2(ctx, e, s_prime[j], budget, &mut rng)?;
                    if band.contains(&t2) {
                        near[j + 1].push(e);
                    } else {
                        far[j].push(e);
                    }
                }
            }
        }
    }
    debug_assert!(near[bin_count + 1].is_empty(), "nothing lands next to the top dummy");

    let mut out: Vec<ElementId> = Vec::with_capacity(n + 2);
    let bin_rank = streams.named("bin-rank");
    {
        let ctx = Ctx::new(arena, tally).with_phase("bin-rank");
        for j in 1..=bin_count {
            out.push(s_prime[j - 1]);
            out.extend_from_slice(&near[j]);
            let ranked_far = backend.rank(
                ctx,
                &far[j],
                eps2,
                nf.powi(-4),
                &bin_rank.child(j as u64),
            )?;
            out.extend_from_slice(&ranked_far.0);
        }
    }
    let assigned: usize = near.iter().map(Vec::len).sum::<usize>()
        + far.iter().map(Vec::len).sum::<usize>();
    let partition_ok = assigned == rest.len();

    // Strip dummies; the result must be a permutation of the input.
    let ranking: Vec<ElementId> = out.into_iter().filter(|e| arena.is_real(*e)).collect();
    Ok(BsrOutput {
        ranking: RankedSeq(ranking),
        partition_ok,
        anchor_count,
        used_fallback: false,
        counter_path,
    })
}
