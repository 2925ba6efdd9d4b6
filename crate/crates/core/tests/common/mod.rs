//! Independent brute-force references shared by the integration tests.
//! Nothing here calls into the solvers' own search code.

#![allow(dead_code)]

use capradii::flow::{AssignmentProblem, BipartiteGraph};
use capradii::gen::VcGraph;
use capradii::guess::seeded_rng;
use capradii::{Instance, Objective};
use rand::Rng;

/// Optimal cost by enumerating every ordered choice of `k` distinct centers
/// and every map from points to clusters. Exponential; keep `n <= 8`.
pub fn full_enumeration_opt(inst: &Instance) -> Option<f64> {
    let n = inst.n();
    let k = inst.k;
    let mut best: Option<f64> = None;
    let mut centers = Vec::new();
    center_sets(n, k, 0, &mut centers, &mut |centers| {
        let total = (k as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut sizes = vec![0u64; k];
            let mut radii = vec![0.0f64; k];
            for p in 0..n {
                let j = (c % k as u64) as usize;
                c /= k as u64;
                sizes[j] += 1;
                radii[j] = radii[j].max(inst.metric.d(centers[j], p));
            }
            if (0..k).all(|j| sizes[j] <= inst.capacities[centers[j]]) {
                let cost = inst.objective.aggregate(&radii);
                if best.is_none_or(|b| cost < b) {
                    best = Some(cost);
                }
            }
        }
    });
    best
}

/// Calls `f` on every increasing `k`-subset of `0..n` (order of centers does
/// not change the optimum).
fn center_sets(n: usize, k: usize, from: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if acc.len() == k {
        f(acc);
        return;
    }
    for c in from..n {
        acc.push(c);
        center_sets(n, k, c + 1, acc, f);
        acc.pop();
    }
}

/// Maximum matching size by trying every choice for every left vertex.
pub fn brute_matching(g: &BipartiteGraph) -> usize {
    fn go(g: &BipartiteGraph, left: usize, used: &mut Vec<bool>) -> usize {
        if left == g.left_count {
            return 0;
        }
        let mut best = go(g, left + 1, used);
        for &r in &g.adjacency[left] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(g, left + 1, used));
                used[r] = false;
            }
        }
        best
    }
    go(g, 0, &mut vec![false; g.right_count])
}

/// Whether some map of points to admissible sinks respects every cap.
pub fn brute_assignment_exists(p: &AssignmentProblem) -> bool {
    fn go(p: &AssignmentProblem, point: usize, load: &mut Vec<u64>) -> bool {
        if point == p.point_count {
            return true;
        }
        for &s in &p.admissible[point] {
            if load[s] < p.sink_caps[s] {
                load[s] += 1;
                if go(p, point + 1, load) {
                    return true;
                }
                load[s] -= 1;
            }
        }
        false
    }
    go(p, 0, &mut vec![0; p.sink_count])
}

pub fn min_vertex_cover(g: &VcGraph) -> usize {
    let n = g.vertex_count;
    (0u32..1 << n)
        .filter(|mask| g.edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

/// Random points in the plane with random capacities, rescaled until the
/// `k` largest capacities cover `n`.
pub fn random_instance(seed: u64, n: usize, k: usize, max_cap: u64, objective: Objective) -> Instance {
    let mut rng = seeded_rng(seed, 99);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.gen_range(0..20) as f64 * 0.5, rng.gen_range(0..20) as f64 * 0.5])
        .collect();
    let mut caps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=max_cap)).collect();
    loop {
        let mut sorted = caps.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.iter().take(k).sum::<u64>() >= n as u64 {
            break;
        }
        let i = rng.gen_range(0..n);
        caps[i] += 1;
    }
    Instance::euclidean(pts, caps, k, objective).unwrap()
}

pub fn line(xs: &[f64], caps: Vec<u64>, k: usize) -> Instance {
    Instance::euclidean(xs.iter().map(|&x| vec![x]).collect(), caps, k, Objective::Sum).unwrap()
}
