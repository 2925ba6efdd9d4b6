//! Uniform capacities: one randomized iteration, grouping and redistribution.
//!
//! An iteration with profile `r` and a guess `k_L` for the number of large
//! optimal clusters:
//!
//! 1. samples `k_L` centers at random and places `B(c_j, 2r_j)`;
//! 2. repeatedly takes the lowest uncovered point `x`, guesses an unused index
//!    `j` and places `B(x, 2r_j)`;
//! 3. hangs every unused index `i` on a random placed index (`T_j`), grows
//!    the balls with non-empty `T_j` to `2r_j + 2 max_{i∈T_j} r_i` and lets
//!    them take `⌊U(1+γ)⌋` points, `γ = 1/k²`;
//! 4. finds groups `G_j` by a feasibility flow and hands the overflowing
//!    groups to [`redistribute`], which moves the excess into new clusters
//!    whose radii are distinct large-cluster radii.
//!
//! Any iteration may fail; none ever emits an invalid clustering.

use crate::error::{Error, Result};
use crate::flow::{feasible_assignment, max_matching, AssignmentProblem, BipartiteGraph};
use crate::guess::Guesser;
use crate::model::{Ball, Clustering, Instance, MetricSpace};

/// Why an iteration returned no clustering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformFailure {
    /// Every index is used and a point is still uncovered.
    OutOfIndices,
    /// No groups `G_j` respecting the enlarged capacities exist.
    NoGroups,
    /// No ordered choice of large radii admits a saturating matching.
    RedistributeFailed,
    /// More clusters than `k` would be needed; only reachable on bad guesses.
    TooManyClusters,
}

/// Bookkeeping of one iteration, kept for structural checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UniformTrace {
    /// Placed indices in placement order.
    pub placed: Vec<usize>,
    pub centers: Vec<Option<usize>>,
    /// `T_j` per index (empty for unplaced indices).
    pub attached: Vec<Vec<usize>>,
    /// Indices whose group exceeded `U`.
    pub overflowing: Vec<usize>,
    /// Large-radius index used for each overflowing group, in order.
    pub sigma: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformReport {
    pub clustering: Option<Clustering>,
    pub failure: Option<UniformFailure>,
    pub trace: UniformTrace,
}

impl UniformReport {
    fn failed(failure: UniformFailure, trace: UniformTrace) -> Self {
        UniformReport {
            clustering: None,
            failure: Some(failure),
            trace,
        }
    }
}

/// One cluster carved out of an overflowing group.
#[derive(Clone, Debug, PartialEq)]
pub struct Redistributed {
    /// Position in the large-radii list.
    pub radius_index: usize,
    pub center: usize,
    pub taken: Vec<usize>,
}

pub fn gamma(k: usize) -> f64 {
    1.0 / (k * k) as f64
}

/// Finds disjoint `G_j ⊆ balls[j]` with `|G_j| <= caps[j]` covering every
/// point, or `None`.
pub fn cover_groups(metric: &MetricSpace, balls: &[Ball], caps: &[u64]) -> Option<Vec<Vec<usize>>> {
    let n = metric.len();
    let admissible: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            balls
                .iter()
                .enumerate()
                .filter(|(_, b)| b.contains(metric, p))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    if admissible.iter().any(Vec::is_empty) {
        return None;
    }
    let assignment = feasible_assignment(&AssignmentProblem {
        point_count: n,
        sink_count: balls.len(),
        admissible,
        sink_caps: caps.to_vec(),
    })?;
    let mut groups = vec![Vec::new(); balls.len()];
    for (p, j) in assignment.into_iter().enumerate() {
        groups[j].push(p);
    }
    Some(groups)
}

/// Tries every ordered selection of `groups.len()` radii from `large_radii`,
/// lexicographically. For a selection, group `i` may be served by any
/// non-forbidden point `w` whose ball `B(w, r_{σ_i})` holds at least `γU`
/// points of the group; a matching saturating all groups yields the answer.
/// Each served group gives up its `|G_i| - U` excess points.
pub fn redistribute(
    metric: &MetricSpace,
    groups: &[Vec<usize>],
    forbidden: &[usize],
    large_radii: &[f64],
    gamma_u: f64,
    capacity: u64,
) -> Option<Vec<Redistributed>> {
    let h = groups.len();
    if h == 0 {
        return Some(Vec::new());
    }
    if h > large_radii.len() {
        return None;
    }
    let n = metric.len();
    let mut allowed = vec![true; n];
    for &c in forbidden {
        allowed[c] = false;
    }
    let candidates: Vec<usize> = (0..n).filter(|&w| allowed[w]).collect();

    let mut selection = Vec::with_capacity(h);
    let mut used = vec![false; large_radii.len()];
    let mut found = None;
    ordered_selections(large_radii.len(), h, &mut selection, &mut used, &mut |sigma| {
        let mut graph = BipartiteGraph::new(h, candidates.len());
        for (i, group) in groups.iter().enumerate() {
            let r = large_radii[sigma[i]];
            for (slot, &w) in candidates.iter().enumerate() {
                let inside = group.iter().filter(|&&p| metric.d(w, p) <= r).count();
                if inside as f64 >= gamma_u {
                    graph.add_edge(i, slot);
                }
            }
        }
        let matching = max_matching(&graph);
        if !matching.saturates_left() {
            return false;
        }
        let out = groups
            .iter()
            .enumerate()
            .map(|(i, group)| {
                let w = candidates[matching.left_to_right[i].expect("saturated")];
                let r = large_radii[sigma[i]];
                let excess = group.len().saturating_sub(capacity as usize);
                let taken: Vec<usize> = group
                    .iter()
                    .copied()
                    .filter(|&p| metric.d(w, p) <= r)
                    .take(excess)
                    .collect();
                Redistributed {
                    radius_index: sigma[i],
                    center: w,
                    taken,
                }
            })
            .collect::<Vec<_>>();
        if out
            .iter()
            .zip(groups)
            .any(|(o, g)| o.taken.len() < g.len().saturating_sub(capacity as usize))
        {
            return false;
        }
        found = Some(out);
        true
    });
    found
}

/// Calls `visit` with each ordered `len`-selection of `0..m` in
/// lexicographic order until it returns `true`.
fn ordered_selections(
    m: usize,
    len: usize,
    current: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if current.len() == len {
        return visit(current);
    }
    for i in 0..m {
        if used[i] {
            continue;
        }
        used[i] = true;
        current.push(i);
        let stop = ordered_selections(m, len, current, used, visit);
        current.pop();
        used[i] = false;
        if stop {
            return true;
        }
    }
    false
}

/// One randomized iteration for uniform capacity `U`. `k_large` is the guess
/// for the number of large optimal clusters; their radii are the first
/// `k_large` profile entries.
pub fn uniform_iteration(
    inst: &Instance,
    profile: &[f64],
    k_large: usize,
    guesser: &mut dyn Guesser,
) -> Result<UniformReport> {
    let capacity = inst
        .uniform_capacity()
        .ok_or_else(|| Error::param("uniform solver needs all capacities equal"))?;
    let k = inst.k;
    if profile.len() != k {
        return Err(Error::param(format!(
            "profile has {} radii, expected {k}",
            profile.len()
        )));
    }
    if k_large > k {
        return Err(Error::param(format!("k_L guess {k_large} exceeds k = {k}")));
    }
    let metric = &inst.metric;
    let n = inst.n();
    let gamma = gamma(k);

    let mut trace = UniformTrace {
        centers: vec![None; k],
        attached: vec![Vec::new(); k],
        ..Default::default()
    };
    let mut covered = vec![false; n];
    let place = |j: usize, c: usize, trace: &mut UniformTrace, covered: &mut [bool]| {
        trace.centers[j] = Some(c);
        trace.placed.push(j);
        for (p, cov) in covered.iter_mut().enumerate() {
            if metric.d(c, p) <= 2.0 * profile[j] {
                *cov = true;
            }
        }
    };

    // Large clusters: sampled centers, drawn without repetition.
    let mut pool: Vec<usize> = (0..n).collect();
    for j in 0..k_large.min(n) {
        let c = pool.swap_remove(guesser.below(pool.len()));
        place(j, c, &mut trace, &mut covered);
    }
    while let Some(x) = covered.iter().position(|&c| !c) {
        let free: Vec<usize> = (0..k).filter(|&j| trace.centers[j].is_none()).collect();
        if free.is_empty() {
            return Ok(UniformReport::failed(UniformFailure::OutOfIndices, trace));
        }
        let j = free[guesser.below(free.len())];
        place(j, x, &mut trace, &mut covered);
    }

    let placed = trace.placed.clone();
    for i in 0..k {
        if trace.centers[i].is_none() {
            let j = placed[guesser.below(placed.len())];
            trace.attached[j].push(i);
        }
    }

    let enlarged_cap = (capacity as f64 * (1.0 + gamma)).floor() as u64;
    let mut balls = Vec::with_capacity(placed.len());
    let mut caps = Vec::with_capacity(placed.len());
    let mut radii = Vec::with_capacity(placed.len());
    for &j in &placed {
        let c = trace.centers[j].expect("placed");
        let radius = match trace.attached[j].iter().map(|&i| profile[i]).reduce(f64::max) {
            Some(reach) => {
                caps.push(enlarged_cap);
                2.0 * profile[j] + 2.0 * reach
            }
            None => {
                caps.push(capacity);
                2.0 * profile[j]
            }
        };
        balls.push(Ball::new(c, radius));
        radii.push(radius);
    }
    let Some(mut groups) = cover_groups(metric, &balls, &caps) else {
        return Ok(UniformReport::failed(UniformFailure::NoGroups, trace));
    };

    let overflow_slots: Vec<usize> = (0..placed.len())
        .filter(|&s| groups[s].len() as u64 > capacity)
        .collect();
    trace.overflowing = overflow_slots.iter().map(|&s| placed[s]).collect();
    let forbidden: Vec<usize> = balls.iter().map(|b| b.center).collect();
    let overflowing: Vec<Vec<usize>> = overflow_slots.iter().map(|&s| groups[s].clone()).collect();
    let Some(moved) = redistribute(
        metric,
        &overflowing,
        &forbidden,
        &profile[..k_large],
        gamma * capacity as f64,
        capacity,
    ) else {
        return Ok(UniformReport::failed(UniformFailure::RedistributeFailed, trace));
    };
    if placed.len() + moved.len() > k {
        return Ok(UniformReport::failed(UniformFailure::TooManyClusters, trace));
    }
    trace.sigma = moved.iter().map(|m| m.radius_index).collect();

    let mut centers = forbidden;
    let mut nominal_radii = radii;
    for (slot, m) in overflow_slots.iter().zip(&moved) {
        groups[*slot].retain(|p| !m.taken.contains(p));
    }
    let mut members = groups;
    for m in moved {
        centers.push(m.center);
        nominal_radii.push(profile[m.radius_index]);
        members.push(m.taken);
    }
    pad_with_empty_clusters(n, k, &mut centers, &mut members, &mut nominal_radii);
    Ok(UniformReport {
        clustering: Some(Clustering {
            centers,
            members,
            nominal_radii,
        }),
        failure: None,
        trace,
    })
}

/// Fills up to `k` clusters with empty radius-0 clusters at the lowest
/// unused points.
pub(crate) fn pad_with_empty_clusters(
    n: usize,
    k: usize,
    centers: &mut Vec<usize>,
    members: &mut Vec<Vec<usize>>,
    radii: &mut Vec<f64>,
) {
    let mut taken = vec![false; n];
    for &c in centers.iter() {
        taken[c] = true;
    }
    let mut spare = (0..n).filter(|&p| !taken[p]);
    while centers.len() < k {
        let c = spare.next().expect("k <= n leaves a spare point");
        centers.push(c);
        members.push(Vec::new());
        radii.push(0.0);
    }
}
