//! Exact solver for desk-scale instances.
//!
//! Only points with positive capacity can host a non-empty cluster, so the
//! search picks `min(k, m)` of the `m` such points as centers and pads with
//! zero-capacity points holding empty radius-0 clusters. For a center set,
//! radii are searched per center over that center's distinct distances, in
//! ascending order, with the running best cost as a bound; the last center's
//! radius is found by binary search, since feasibility is monotone in it.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::flow::{feasible_assignment, AssignmentProblem};
use crate::model::{Clustering, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Refuse when the estimated number of feasibility checks exceeds this.
    pub ceiling: u128,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            ceiling: 100_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub opt_cost: f64,
    pub witness: Clustering,
    /// Radii of the witness in center order.
    pub optimal_radii: Vec<f64>,
    /// Feasibility checks performed.
    pub checks: u64,
}

/// Assignment of every point to a center within its radius, respecting the
/// centers' capacities.
pub fn assign_with(inst: &Instance, centers: &[usize], radii: &[f64]) -> Option<Clustering> {
    let metric = &inst.metric;
    let admissible = (0..inst.n())
        .map(|p| {
            (0..centers.len())
                .filter(|&j| metric.d(centers[j], p) <= radii[j])
                .collect()
        })
        .collect();
    let assignment = feasible_assignment(&AssignmentProblem {
        point_count: inst.n(),
        sink_count: centers.len(),
        admissible,
        sink_caps: centers.iter().map(|&c| inst.capacities[c]).collect(),
    })?;
    let mut members = vec![Vec::new(); centers.len()];
    for (p, j) in assignment.into_iter().enumerate() {
        members[j].push(p);
    }
    Some(Clustering {
        centers: centers.to_vec(),
        members,
        nominal_radii: radii.to_vec(),
    })
}

pub fn feasible_with(inst: &Instance, centers: &[usize], radii: &[f64]) -> bool {
    assign_with(inst, centers, radii).is_some()
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn positive_points(inst: &Instance) -> Vec<usize> {
    (0..inst.n()).filter(|&p| inst.capacities[p] > 0).collect()
}

/// Upper estimate of the feasibility checks [`optimal`] performs:
/// `C(m, s) · D^(s-1) · (⌈log2 D⌉ + 1)` where `D` bounds the candidate radii
/// per center.
pub fn search_estimate(inst: &Instance) -> u128 {
    let candidates = positive_points(inst);
    let s = inst.k.min(candidates.len());
    if s == 0 {
        return 0;
    }
    let d = candidates
        .iter()
        .map(|&c| inst.metric.distinct_distances_from(c).len())
        .max()
        .unwrap_or(1) as u128;
    let log = 128 - (d.max(1) - 1).leading_zeros() as u128;
    binomial(candidates.len(), s)
        .saturating_mul(d.saturating_pow(s as u32 - 1))
        .saturating_mul(log + 1)
}

pub fn optimal(inst: &Instance) -> Result<OracleResult> {
    optimal_with(inst, &OracleConfig::default())
}

pub fn optimal_with(inst: &Instance, cfg: &OracleConfig) -> Result<OracleResult> {
    let n = inst.n();
    if inst.top_k_capacity() < n as u128 {
        return Err(Error::Infeasible(format!(
            "top-{} capacity {} < {n}",
            inst.k,
            inst.top_k_capacity()
        )));
    }
    let estimate = search_estimate(inst);
    if estimate > cfg.ceiling {
        return Err(Error::OracleRefused {
            estimate,
            ceiling: cfg.ceiling,
        });
    }
    let candidates = positive_points(inst);
    let s = inst.k.min(candidates.len());
    let radii_options: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            if inst.capacities[c] > 0 {
                inst.metric.distinct_distances_from(c)
            } else {
                Vec::new()
            }
        })
        .collect();

    let sets = combinations(&candidates, s);
    let search = Search {
        inst,
        radii_options: &radii_options,
        bound: Mutex::new(f64::INFINITY),
        checks: AtomicU64::new(0),
    };
    let best = best_over_sets(&search, &sets);
    let checks = search.checks.load(Ordering::Relaxed);
    let (_, set_index, radii) = best.ok_or_else(|| {
        Error::Infeasible("no center set admits a feasible assignment".into())
    })?;

    let mut centers = sets[set_index].clone();
    let mut witness = assign_with(inst, &centers, &radii).expect("witness was feasible");
    let mut spare = (0..n).filter(|&p| inst.capacities[p] == 0);
    while centers.len() < inst.k {
        let c = spare.next().expect("k <= n leaves a zero-capacity point");
        centers.push(c);
        witness.centers.push(c);
        witness.members.push(Vec::new());
        witness.nominal_radii.push(0.0);
    }
    let optimal_radii = witness.tight_radii(&inst.metric);
    witness.nominal_radii = optimal_radii.clone();
    Ok(OracleResult {
        opt_cost: inst.objective.aggregate(&optimal_radii),
        witness,
        optimal_radii,
        checks,
    })
}

/// Best `(power sum, set index, radii)`, ties to the lowest set index.
type Best = Option<(f64, usize, Vec<f64>)>;

#[cfg(feature = "parallel")]
fn best_over_sets(search: &Search<'_>, sets: &[Vec<usize>]) -> Best {
    use rayon::prelude::*;
    sets.par_iter()
        .enumerate()
        .filter_map(|(i, set)| search.best_radii(set).map(|(cost, radii)| (cost, i, radii)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
}

#[cfg(not(feature = "parallel"))]
fn best_over_sets(search: &Search<'_>, sets: &[Vec<usize>]) -> Best {
    sets.iter()
        .enumerate()
        .filter_map(|(i, set)| search.best_radii(set).map(|(cost, radii)| (cost, i, radii)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
}

struct Search<'a> {
    inst: &'a Instance,
    radii_options: &'a [Vec<f64>],
    /// Best power sum found by any worker. Pruning is strict, so a set that
    /// attains the optimum is never cut, whatever the schedule.
    bound: Mutex<f64>,
    checks: AtomicU64,
}

impl Search<'_> {
    fn feasible(&self, centers: &[usize], radii: &[f64]) -> bool {
        self.checks.fetch_add(1, Ordering::Relaxed);
        feasible_with(self.inst, centers, radii)
    }

    fn bound(&self) -> f64 {
        *self.bound.lock().expect("bound lock")
    }

    fn offer(&self, cost: f64) {
        let mut b = self.bound.lock().expect("bound lock");
        if cost < *b {
            *b = cost;
        }
    }

    /// Cheapest radii for a fixed center set, as (power sum, radii).
    fn best_radii(&self, centers: &[usize]) -> Option<(f64, Vec<f64>)> {
        let mut radii: Vec<f64> = centers
            .iter()
            .map(|&c| *self.radii_options[c].last().expect("distance 0 is always present"))
            .collect();
        if !self.feasible(centers, &radii) {
            return None;
        }
        let mut best = None;
        self.descend(centers, 0, 0.0, &mut radii, &mut best);
        best
    }

    fn descend(
        &self,
        centers: &[usize],
        level: usize,
        partial: f64,
        radii: &mut Vec<f64>,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let objective = self.inst.objective;
        let options = &self.radii_options[centers[level]];
        let local_bound = |best: &Option<(f64, Vec<f64>)>| {
            best.as_ref().map_or(f64::INFINITY, |b| b.0).min(self.bound())
        };
        if level + 1 == centers.len() {
            // Smallest feasible radius for the last center.
            let (mut lo, mut hi) = (0, options.len() - 1);
            radii[level] = options[hi];
            if !self.feasible(centers, radii) {
                return;
            }
            while lo < hi {
                let mid = (lo + hi) / 2;
                radii[level] = options[mid];
                if self.feasible(centers, radii) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            radii[level] = options[lo];
            let cost = partial + objective.power(options[lo]);
            if cost < best.as_ref().map_or(f64::INFINITY, |b| b.0) && cost <= self.bound() {
                self.offer(cost);
                *best = Some((cost, radii.clone()));
            }
            return;
        }
        let largest: Vec<f64> = centers[level + 1..]
            .iter()
            .map(|&c| *self.radii_options[c].last().expect("nonempty"))
            .collect();
        for &r in options {
            let here = partial + objective.power(r);
            if here > local_bound(best) {
                break;
            }
            radii[level] = r;
            radii[level + 1..].copy_from_slice(&largest);
            if level + 2 < centers.len() && !self.feasible(centers, radii) {
                continue;
            }
            self.descend(centers, level + 1, here, radii, best);
        }
    }
}

/// All `s`-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(s);
    fn rec(items: &[usize], start: usize, s: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == s {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < s - current.len() {
                break;
            }
            current.push(items[i]);
            rec(items, i + 1, s, current, out);
            current.pop();
        }
    }
    rec(items, 0, s, &mut current, &mut out);
    out
}
