//! Bipartite matching and capacitated assignment feasibility.
//!
//! Both routines explore admissible sets in ascending index order, so their
//! outputs are reproducible for a given input.

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left_count: usize,
    pub right_count: usize,
    /// Admissible right vertices per left vertex.
    pub adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left_count: usize, right_count: usize) -> Self {
        BipartiteGraph {
            left_count,
            right_count,
            adjacency: vec![Vec::new(); left_count],
        }
    }

    pub fn add_edge(&mut self, left: usize, right: usize) {
        debug_assert!(left < self.left_count && right < self.right_count);
        self.adjacency[left].push(right);
    }
}

/// A maximum-cardinality matching as a partial map left -> right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left_to_right.iter().flatten().count()
    }

    pub fn saturates_left(&self) -> bool {
        self.left_to_right.iter().all(Option::is_some)
    }
}

const UNSEEN: usize = usize::MAX;

/// Hopcroft–Karp: repeated BFS layering from free left vertices followed by
/// vertex-disjoint shortest augmenting paths.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let mut adjacency = g.adjacency.clone();
    for adj in &mut adjacency {
        adj.sort_unstable();
        adj.dedup();
    }
    let mut mate_left = vec![UNSEEN; g.left_count];
    let mut mate_right = vec![UNSEEN; g.right_count];
    let mut layer = vec![UNSEEN; g.left_count];
    let mut queue = VecDeque::new();
    loop {
        queue.clear();
        for (u, l) in layer.iter_mut().enumerate() {
            if mate_left[u] == UNSEEN {
                *l = 0;
                queue.push_back(u);
            } else {
                *l = UNSEEN;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                let w = mate_right[v];
                if w == UNSEEN {
                    found = true;
                } else if layer[w] == UNSEEN {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; g.left_count];
        for u in 0..g.left_count {
            if mate_left[u] == UNSEEN {
                augment(
                    u,
                    &adjacency,
                    &mut mate_left,
                    &mut mate_right,
                    &mut layer,
                    &mut cursor,
                );
            }
        }
    }
    Matching {
        left_to_right: mate_left
            .into_iter()
            .map(|v| (v != UNSEEN).then_some(v))
            .collect(),
    }
}

fn augment(
    u: usize,
    adjacency: &[Vec<usize>],
    mate_left: &mut [usize],
    mate_right: &mut [usize],
    layer: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[u] < adjacency[u].len() {
        let v = adjacency[u][cursor[u]];
        cursor[u] += 1;
        let w = mate_right[v];
        let advance = w == UNSEEN
            || (layer[w] == layer[u] + 1
                && augment(w, adjacency, mate_left, mate_right, layer, cursor));
        if advance {
            mate_left[u] = v;
            mate_right[v] = u;
            return true;
        }
    }
    layer[u] = UNSEEN;
    false
}

/// Assign every point to one admissible sink without exceeding sink caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentProblem {
    pub point_count: usize,
    pub sink_count: usize,
    pub admissible: Vec<Vec<usize>>,
    pub sink_caps: Vec<u64>,
}

/// Returns a sink for every point, or `None` when the max-flow value of the
/// source -> points -> sinks -> target network falls short of `point_count`.
pub fn feasible_assignment(p: &AssignmentProblem) -> Option<Vec<usize>> {
    debug_assert_eq!(p.admissible.len(), p.point_count);
    debug_assert_eq!(p.sink_caps.len(), p.sink_count);
    if p.admissible.iter().any(Vec::is_empty) {
        return None;
    }
    let total: u128 = p.sink_caps.iter().map(|&c| c as u128).sum();
    if total < p.point_count as u128 {
        return None;
    }
    let source = 0;
    let target = 1;
    let point_node = |i: usize| 2 + i;
    let sink_node = |j: usize| 2 + p.point_count + j;
    let mut net = FlowNetwork::new(2 + p.point_count + p.sink_count);
    let mut point_arcs = Vec::with_capacity(p.point_count);
    for (i, adm) in p.admissible.iter().enumerate() {
        net.add_arc(source, point_node(i), 1);
        let mut sorted = adm.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let arcs: Vec<(usize, usize)> = sorted
            .into_iter()
            .map(|j| (j, net.add_arc(point_node(i), sink_node(j), 1)))
            .collect();
        point_arcs.push(arcs);
    }
    for (j, &cap) in p.sink_caps.iter().enumerate() {
        let cap = cap.min(p.point_count as u64);
        if cap > 0 {
            net.add_arc(sink_node(j), target, cap);
        }
    }
    if net.max_flow(source, target) < p.point_count as u64 {
        return None;
    }
    let assignment = point_arcs
        .iter()
        .map(|arcs| {
            arcs.iter()
                .find(|&&(_, a)| net.flow_on(a) > 0)
                .map(|&(j, _)| j)
                .expect("saturated point carries one unit")
        })
        .collect();
    Some(assignment)
}

/// Dinic's algorithm over an adjacency-list residual graph.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    original: Vec<u64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            original: Vec::new(),
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.to.len();
        self.head[from].push(id);
        self.to.push(to);
        self.cap.push(cap);
        self.original.push(cap);
        self.head[to].push(id + 1);
        self.to.push(from);
        self.cap.push(0);
        self.original.push(0);
        id
    }

    fn flow_on(&self, arc: usize) -> u64 {
        self.original[arc] - self.cap[arc]
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let nodes = self.head.len();
        let mut total = 0;
        let mut level = vec![UNSEEN; nodes];
        let mut queue = VecDeque::new();
        loop {
            level.fill(UNSEEN);
            level[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &a in &self.head[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && level[v] == UNSEEN {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == UNSEEN {
                return total;
            }
            let mut cursor = vec![0usize; nodes];
            loop {
                let pushed = self.push(s, t, u64::MAX, &level, &mut cursor);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn push(&mut self, u: usize, t: usize, limit: u64, level: &[usize], cursor: &mut [usize]) -> u64 {
        if u == t {
            return limit;
        }
        while cursor[u] < self.head[u].len() {
            let a = self.head[u][cursor[u]];
            let v = self.to[a];
            if self.cap[a] > 0 && level[v] == level[u] + 1 {
                let pushed = self.push(v, t, limit.min(self.cap[a]), level, cursor);
                if pushed > 0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        0
    }
}
