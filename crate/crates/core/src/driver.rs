//! Repetition driver: profiles × guesses × budget.
//!
//! Profiles are tried in ascending objective value. Since every successful
//! iteration costs at most `factor · value(profile)`, the first profile that
//! yields any success already meets the guarantee whenever the dominating
//! profile sits at or after it, so the scan stops there.
//!
//! A profile is skipped without running any iteration when no choice of
//! distinct centers for its radii admits a capacity-respecting assignment:
//! such a profile cannot dominate any feasible solution. A cheap
//! capacity-blind covering test runs first; both searches give up (and keep
//! the profile) past a node limit.

use std::collections::HashMap;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::flow::{feasible_assignment, AssignmentProblem};
use crate::guess::seeded_guesser;
use crate::model::{validate_solution, Clustering, Instance, MetricSpace};
use crate::nonuniform::{nonuniform_iteration, RadiusRule};
use crate::profiles::{enumerate_profiles, profile_count, RadiiProfile};
use crate::uniform::uniform_iteration;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Solver {
    Uniform,
    NonUniform(RadiusRule),
}

impl Solver {
    /// Guaranteed ratio between a success's nominal cost and its profile's
    /// value under `inst`'s objective.
    pub fn factor(self, inst: &Instance) -> f64 {
        match self {
            Solver::Uniform => {
                let p = inst.objective.p();
                (2f64.powf(2.0 * p - 1.0) + 1.0).powf(1.0 / p)
            }
            Solver::NonUniform(rule) => rule.factor(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub solver: Solver,
    pub eps: f64,
    /// Iterations per profile (and per large-cluster guess, when uniform).
    pub budget: u64,
    pub seed: u64,
    /// Refuse instances whose profile family is larger than this.
    pub max_profiles: u128,
}

impl SolveConfig {
    pub fn new(solver: Solver, eps: f64, budget: u64, seed: u64) -> Self {
        SolveConfig {
            solver,
            eps,
            budget,
            seed,
            max_profiles: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: u64,
    pub successes: u64,
    /// Successes whose clustering failed validation; always zero unless a
    /// solver is broken. Such outputs are never returned.
    pub invalid_outputs: u64,
    /// Iterations aborted by an internal guard or invariant check.
    pub violations: u64,
    pub profiles_total: u128,
    pub profiles_scanned: u64,
    pub profiles_skipped: u64,
    pub best_nominal: Option<f64>,
    pub best_tight: Option<f64>,
    pub best_profile: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    /// `None` means no iteration succeeded within the budget.
    pub best: Option<Clustering>,
    pub stats: SolveStats,
}

pub fn run_uniform(inst: &Instance, eps: f64, budget: u64, seed: u64) -> Result<SolveOutcome> {
    solve(inst, &SolveConfig::new(Solver::Uniform, eps, budget, seed))
}

pub fn run_nonuniform(
    inst: &Instance,
    eps: f64,
    rule: RadiusRule,
    budget: u64,
    seed: u64,
) -> Result<SolveOutcome> {
    solve(inst, &SolveConfig::new(Solver::NonUniform(rule), eps, budget, seed))
}

pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveOutcome> {
    if cfg.budget == 0 {
        return Err(Error::param("budget must be positive"));
    }
    let k = inst.k;
    if cfg.solver == Solver::Uniform {
        if inst.uniform_capacity().is_none() {
            return Err(Error::param("uniform solver needs all capacities equal"));
        }
        let wanted = 2.0 * (k as f64).powi(5);
        if (inst.n() as f64) < wanted {
            warn!(
                "n = {} is below 2k^5 = {wanted}; success probability per iteration drops",
                inst.n()
            );
        }
    }
    let total = profile_count(inst, cfg.eps)?;
    if total > cfg.max_profiles {
        return Err(Error::param(format!(
            "{total} radii profiles exceed the limit of {}; raise eps",
            cfg.max_profiles
        )));
    }
    let mut profiles: Vec<(f64, RadiiProfile)> = enumerate_profiles(inst, cfg.eps)?
        .map(|p| (p.value(inst.objective), p))
        .collect();
    // Stable: equal values keep enumeration order.
    profiles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut stats = SolveStats {
        profiles_total: total,
        ..Default::default()
    };
    let mut best: Option<(f64, Clustering)> = None;
    let mut cover_cache: HashMap<Vec<u64>, bool> = HashMap::new();

    for (position, (_, profile)) in profiles.iter().enumerate() {
        let mut key: Vec<u64> = profile.radii.iter().map(|r| r.to_bits()).collect();
        key.sort_unstable();
        let coverable = *cover_cache.entry(key).or_insert_with(|| {
            ball_cover_exists(&inst.metric, &profile.radii, COVER_SEARCH_LIMIT) != Some(false)
                && capacitated_cover_exists(inst, &profile.radii, COVER_SEARCH_LIMIT) != Some(false)
        });
        if !coverable {
            stats.profiles_skipped += 1;
            continue;
        }
        stats.profiles_scanned += 1;
        let before = stats.successes;
        let mut consider = |sol: Clustering, stats: &mut SolveStats| {
            stats.successes += 1;
            if !validate_solution(inst, &sol).is_clean() {
                stats.invalid_outputs += 1;
                return;
            }
            let tight = sol.tight_cost(inst);
            if best.as_ref().is_none_or(|(b, _)| tight < *b) {
                stats.best_nominal = Some(sol.nominal_cost(inst.objective));
                stats.best_tight = Some(tight);
                stats.best_profile = Some(profile.radii.clone());
                best = Some((tight, sol));
            }
        };
        match cfg.solver {
            Solver::Uniform => {
                for k_large in 0..=k {
                    let stream = position as u64 * (k as u64 + 1) + k_large as u64;
                    let mut guesser = seeded_guesser(cfg.seed, stream);
                    for _ in 0..cfg.budget {
                        stats.iterations += 1;
                        let report = uniform_iteration(inst, &profile.radii, k_large, &mut guesser)?;
                        if let Some(sol) = report.clustering {
                            consider(sol, &mut stats);
                        }
                    }
                }
            }
            Solver::NonUniform(rule) => {
                let mut guesser = seeded_guesser(cfg.seed, position as u64);
                for _ in 0..cfg.budget {
                    stats.iterations += 1;
                    let report = nonuniform_iteration(inst, &profile.radii, rule, &mut guesser)?;
                    if let Some(failure) = &report.failure {
                        if failure.is_violation() {
                            warn!("iteration aborted: {failure:?}");
                            stats.violations += 1;
                        }
                    }
                    if let Some(sol) = report.clustering {
                        consider(sol, &mut stats);
                    }
                }
            }
        }
        if stats.successes > before {
            debug!(
                "profile {:?} succeeded after scanning {} profiles",
                profile.radii, stats.profiles_scanned
            );
            break;
        }
    }
    Ok(SolveOutcome {
        best: best.map(|(_, sol)| sol),
        stats,
    })
}

const COVER_SEARCH_LIMIT: usize = 200_000;

/// Whether balls with the given radii, centered at input points, can cover
/// every point. Capacities are ignored. `None` when the search visits more
/// than `limit` nodes.
pub fn ball_cover_exists(metric: &MetricSpace, radii: &[f64], limit: usize) -> Option<bool> {
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut covered = vec![false; metric.len()];
    let mut used = vec![false; sorted.len()];
    let mut budget = limit;
    cover_search(metric, &sorted, &mut used, &mut covered, &mut budget)
}

fn cover_search(
    metric: &MetricSpace,
    radii: &[f64],
    used: &mut [bool],
    covered: &mut [bool],
    budget: &mut usize,
) -> Option<bool> {
    let Some(p) = covered.iter().position(|&c| !c) else {
        return Some(true);
    };
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let mut unknown = false;
    for j in 0..radii.len() {
        // Equal radii are interchangeable: only try the first unused one.
        if used[j] || (j > 0 && radii[j] == radii[j - 1] && !used[j - 1]) {
            continue;
        }
        used[j] = true;
        for c in 0..metric.len() {
            if metric.d(c, p) > radii[j] {
                continue;
            }
            let newly: Vec<usize> = (0..metric.len())
                .filter(|&q| !covered[q] && metric.d(c, q) <= radii[j])
                .collect();
            for &q in &newly {
                covered[q] = true;
            }
            let found = cover_search(metric, radii, used, covered, budget);
            for &q in &newly {
                covered[q] = false;
            }
            match found {
                Some(true) => {
                    used[j] = false;
                    return Some(true);
                }
                None => unknown = true,
                Some(false) => {}
            }
        }
        used[j] = false;
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

/// Whether distinct centers can be chosen for the given radii so that every
/// point is assigned within its center's radius without exceeding any
/// capacity. `None` when more than `limit` center choices are visited.
pub fn capacitated_cover_exists(inst: &Instance, radii: &[f64], limit: usize) -> Option<bool> {
    let n = inst.n();
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let words = n.div_ceil(64);
    let mut full = vec![u64::MAX; words];
    if !n.is_multiple_of(64) {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    // Ball bitsets per slot and center.
    let masks: Vec<Vec<Vec<u64>>> = sorted
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            if j > 0 && sorted[j - 1] == r {
                return Vec::new();
            }
            (0..n)
                .map(|c| {
                    let mut m = vec![0u64; words];
                    for q in inst.metric.ball(c, r) {
                        m[q / 64] |= 1 << (q % 64);
                    }
                    m
                })
                .collect()
        })
        .collect();
    let mut search = CapacitySearch {
        inst,
        radii: &sorted,
        masks,
        full,
        max_cap: inst.capacities.iter().copied().max().unwrap_or(0),
        budget: limit,
    };
    let mut centers = Vec::with_capacity(sorted.len());
    let covered = vec![0u64; words];
    search.descend(&mut centers, &covered, 0)
}

struct CapacitySearch<'a> {
    inst: &'a Instance,
    radii: &'a [f64],
    /// Indexed by the first slot of each run of equal radii.
    masks: Vec<Vec<Vec<u64>>>,
    full: Vec<u64>,
    max_cap: u64,
    budget: usize,
}

impl CapacitySearch<'_> {
    fn mask(&self, j: usize, c: usize) -> &[u64] {
        let mut first = j;
        while first > 0 && self.radii[first - 1] == self.radii[j] {
            first -= 1;
        }
        &self.masks[first][c]
    }

    fn descend(&mut self, centers: &mut Vec<usize>, covered: &[u64], capacity: u64) -> Option<bool> {
        let n = self.inst.n() as u64;
        let j = centers.len();
        let k = self.radii.len();
        if capacity.saturating_add(self.max_cap.saturating_mul((k - j) as u64)) < n {
            return Some(false);
        }
        if j == k {
            if covered != self.full.as_slice() {
                return Some(false);
            }
            let metric = &self.inst.metric;
            let problem = AssignmentProblem {
                point_count: self.inst.n(),
                sink_count: k,
                admissible: (0..self.inst.n())
                    .map(|p| (0..k).filter(|&s| metric.d(centers[s], p) <= self.radii[s]).collect())
                    .collect(),
                sink_caps: centers.iter().map(|&c| self.inst.capacities[c]).collect(),
            };
            return Some(feasible_assignment(&problem).is_some());
        }
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        // Equal radii are interchangeable: keep their centers increasing.
        let from = if j > 0 && self.radii[j - 1] == self.radii[j] { centers[j - 1] + 1 } else { 0 };
        let mut unknown = false;
        for c in from..self.inst.n() {
            if centers.contains(&c) {
                continue;
            }
            let next: Vec<u64> = covered.iter().zip(self.mask(j, c)).map(|(a, b)| a | b).collect();
            centers.push(c);
            let found = self.descend(centers, &next, capacity + self.inst.capacities[c]);
            centers.pop();
            match found {
                Some(true) => return Some(true),
                None => unknown = true,
                Some(false) => {}
            }
        }
        if unknown {
            None
        } else {
            Some(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, Objective};

    fn line(xs: &[f64], caps: Vec<u64>, k: usize) -> Instance {
        let pts = xs.iter().map(|&x| vec![x]).collect();
        Instance::euclidean(pts, caps, k, Objective::Sum).unwrap()
    }

    #[test]
    fn zero_budget_is_rejected() {
        let inst = line(&[0.0], vec![1], 1);
        assert!(matches!(run_uniform(&inst, 0.1, 0, 0), Err(Error::Param(_))));
    }

    #[test]
    fn singleton_costs_nothing() {
        let inst = line(&[0.0], vec![1], 1);
        let out = run_uniform(&inst, 0.1, 5, 0).unwrap();
        assert_eq!(evaluate(&inst, &out.best.unwrap(), true).unwrap(), 0.0);
        let out = run_nonuniform(&inst, 0.1, RadiusRule::default(), 5, 0).unwrap();
        assert_eq!(evaluate(&inst, &out.best.unwrap(), true).unwrap(), 0.0);
    }

    #[test]
    fn runs_are_deterministic() {
        let inst = line(&[0.0, 0.3, 0.5, 9.0, 9.4, 9.9], vec![3; 6], 2);
        let a = run_uniform(&inst, 0.2, 50, 11).unwrap();
        let b = run_uniform(&inst, 0.2, 50, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.best.is_some());
    }

    #[test]
    fn cover_check_matches_small_cases() {
        let inst = line(&[0.0, 1.0, 10.0, 11.0], vec![4; 4], 2);
        assert_eq!(ball_cover_exists(&inst.metric, &[1.0, 1.0], 1000), Some(true));
        assert_eq!(ball_cover_exists(&inst.metric, &[1.0, 0.5], 1000), Some(false));
        assert_eq!(ball_cover_exists(&inst.metric, &[11.0, 0.0], 1000), Some(true));
        assert_eq!(ball_cover_exists(&inst.metric, &[1.0, 1.0], 0), None);
    }

    #[test]
    fn capacitated_check_sees_capacity_deficits() {
        // One big ball covers everything but holds only 3 of the 4 points.
        let inst = line(&[0.0, 1.0, 10.0, 11.0], vec![3; 4], 2);
        assert_eq!(ball_cover_exists(&inst.metric, &[11.0, 0.0], 1000), Some(true));
        assert_eq!(capacitated_cover_exists(&inst, &[11.0, 0.0], 1000), Some(true));
        assert_eq!(capacitated_cover_exists(&inst, &[0.0, 0.5], 1000), Some(false));
        let tight = line(&[0.0, 1.0, 10.0, 11.0], vec![2, 1, 2, 1], 2);
        assert_eq!(capacitated_cover_exists(&tight, &[1.0, 1.0], 1000), Some(true));
        assert_eq!(capacitated_cover_exists(&tight, &[11.0, 0.0], 1000), Some(false));
        assert_eq!(capacitated_cover_exists(&tight, &[1.0, 1.0], 0), None);
    }

    #[test]
    fn uniform_factor_matches_norm() {
        let inst = line(&[0.0, 1.0], vec![2; 2], 1);
        assert_eq!(Solver::Uniform.factor(&inst), 3.0);
        let l2 = inst.with_objective(Objective::Lp(2.0));
        assert!((Solver::Uniform.factor(&l2) - 3.0).abs() < 1e-12);
        let l3 = l2.with_objective(Objective::Lp(3.0));
        assert!((Solver::Uniform.factor(&l3) - 33f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }
}
