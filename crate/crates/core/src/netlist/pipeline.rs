use std::collections::BTreeSet;

use serde::Serialize;

use crate::kernel::KernelOrdering;

/// Combinational depth of one kernel stage in XOR delays.
pub fn stage_depth(dim: usize) -> u32 {
    if dim == 2 {
        1
    } else {
        2
    }
}

/// Minimum depth between two pipeline registers (two XOR delays).
pub const MIN_SEGMENT_DEPTH: u32 = 2;

/// Pipeline cut placement for one non-systematic encoder pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NpsSet {
    pub requested: usize,
    pub effective: usize,
    /// Registered stage boundaries, as "after stage k" with stages counted
    /// from 1 in network order (innermost kernel first).
    pub cuts: Vec<usize>,
    /// Sub-encoder sizes whose outputs are registered.
    pub sizes: BTreeSet<usize>,
}

impl NpsSet {
    fn from_cuts(ord: &KernelOrdering, requested: usize, cuts: Vec<usize>) -> Self {
        let stage_sizes = ord.stage_sizes();
        let sizes = cuts.iter().map(|&k| stage_sizes[k - 1]).collect();
        NpsSet {
            requested,
            effective: cuts.len(),
            cuts,
            sizes,
        }
    }

    pub fn is_clamped(&self) -> bool {
        self.effective < self.requested
    }

    pub fn contains(&self, size: usize) -> bool {
        self.sizes.contains(&size)
    }
}

fn prefix_depths(ord: &KernelOrdering) -> Vec<u32> {
    let mut acc = 0;
    std::iter::once(0)
        .chain(ord.stages().map(|d| {
            acc += stage_depth(d);
            acc
        }))
        .collect()
}

/// Largest number of cuts that keeps every segment at least
/// [`MIN_SEGMENT_DEPTH`] deep.
pub fn max_legal_cuts(ord: &KernelOrdering) -> usize {
    let prefix = prefix_depths(ord);
    let total = *prefix.last().unwrap();
    let mut last = 0;
    let mut count = 0;
    for k in 1..ord.len() {
        if prefix[k] - last >= MIN_SEGMENT_DEPTH && total - prefix[k] >= MIN_SEGMENT_DEPTH {
            count += 1;
            last = prefix[k];
        }
    }
    count
}

/// Chooses where to register `requested` pipeline stages in one encoder.
///
/// Every segment between registers must contain at least two XOR delays
/// (binary stage = 1, ternary stage = 2). If fewer legal cuts exist the
/// request is clamped. Among legal placements the one with the smallest
/// critical segment wins, then the one whose cumulative depths lie closest
/// to the even split `D*j/(P+1)`, then the lexicographically smallest.
pub fn place_pipelines(ord: &KernelOrdering, requested: usize) -> NpsSet {
    let effective = requested.min(max_legal_cuts(ord));
    if effective == 0 {
        return NpsSet::from_cuts(ord, requested, Vec::new());
    }
    let prefix = prefix_depths(ord);
    let total = *prefix.last().unwrap();
    let stages = ord.len();

    // score = (max segment depth, sum |prefix*(P+1) - D*j|)
    let mut best: Option<((u32, u64), Vec<usize>)> = None;
    let mut chosen = Vec::with_capacity(effective);
    search(
        &prefix,
        total,
        stages,
        effective,
        1,
        &mut chosen,
        &mut best,
    );
    let cuts = best.expect("effective cuts are placeable").1;
    NpsSet::from_cuts(ord, requested, cuts)
}

fn search(
    prefix: &[u32],
    total: u32,
    stages: usize,
    want: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    best: &mut Option<((u32, u64), Vec<usize>)>,
) {
    let last = chosen.last().map_or(0, |&k| prefix[k]);
    if chosen.len() == want {
        if total - last < MIN_SEGMENT_DEPTH {
            return;
        }
        let score = score(prefix, total, chosen);
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            *best = Some((score, chosen.clone()));
        }
        return;
    }
    for k in start..stages {
        if prefix[k] - last < MIN_SEGMENT_DEPTH {
            continue;
        }
        if total - prefix[k] < MIN_SEGMENT_DEPTH {
            break;
        }
        chosen.push(k);
        search(prefix, total, stages, want, k + 1, chosen, best);
        chosen.pop();
    }
}

fn score(prefix: &[u32], total: u32, cuts: &[usize]) -> (u32, u64) {
    let parts = cuts.len() as u64 + 1;
    let mut bounds: Vec<u32> = vec![0];
    bounds.extend(cuts.iter().map(|&k| prefix[k]));
    bounds.push(total);
    let max_seg = bounds.windows(2).map(|w| w[1] - w[0]).max().unwrap();
    let deviation = cuts
        .iter()
        .enumerate()
        .map(|(j, &k)| (u64::from(prefix[k]) * parts).abs_diff(u64::from(total) * (j as u64 + 1)))
        .sum();
    (max_seg, deviation)
}

/// Registers every stage boundary.
pub fn place_deep(ord: &KernelOrdering, requested: usize) -> NpsSet {
    NpsSet::from_cuts(ord, requested, (1..ord.len()).collect())
}
