//! Instance generators: uniform blob families and the vertex-cover
//! gadget.
//!
//! The gadget maps a graph `G` on `n` vertices (`3 | n`) with maximum degree
//! `d` to a clustering instance on the nodes of an auxiliary graph `H`:
//!
//! - `p_v` per vertex, capacity `2d+1`, adjacent to `p★`;
//! - `d` points `Q_v` per vertex, capacity 0, each adjacent to `p_v` and `p★`;
//! - `p_e` per edge `uv`, capacity 0, adjacent to `p_u` and `p_v`;
//! - `p★`, capacity `n(d+1)/3 + 1`;
//!
//! with shortest-path distances in `H` and `k = 2n/3 + 1`. A vertex cover of
//! size `2n/3` yields cost `k` (all radii 1); larger covers force cost above
//! `k`.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::guess::seeded_rng;
use crate::model::{Clustering, Instance, MetricSpace, Objective};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl VcGraph {
    /// Rejects loops, duplicate edges and out-of-range endpoints. Edges are
    /// stored as given.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::param("graph needs at least one vertex"));
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::param(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::param(format!("loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::param(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(VcGraph {
            vertex_count,
            edges,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        VcGraph {
            vertex_count: n,
            edges,
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_vertex_cover(&self, cover: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|(u, v)| cover.contains(u) || cover.contains(v))
    }
}

/// Where each gadget node lives among the instance's point ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionLayout {
    pub vertex_points: Vec<usize>,
    pub q_blocks: Vec<Vec<usize>>,
    pub edge_points: Vec<usize>,
    pub star: usize,
    /// Edges of the auxiliary graph `H`.
    pub gadget_edges: Vec<(usize, usize)>,
    pub degree: usize,
    pub k: usize,
}

/// Builds the gadget instance (L1 objective). Ids: `p_v` first, then the
/// `Q_v` blocks, then `p_e`, then `p★`.
pub fn reduce_vc(g: &VcGraph) -> Result<(Instance, ReductionLayout)> {
    let n = g.vertex_count;
    if !n.is_multiple_of(3) {
        return Err(Error::param(format!(
            "vertex count {n} is not divisible by 3"
        )));
    }
    let d = g.max_degree();
    let vertex_points: Vec<usize> = (0..n).collect();
    let q_blocks: Vec<Vec<usize>> = (0..n).map(|v| (n + v * d..n + (v + 1) * d).collect()).collect();
    let edge_base = n + n * d;
    let edge_points: Vec<usize> = (0..g.edges.len()).map(|e| edge_base + e).collect();
    let star = edge_base + g.edges.len();
    let total = star + 1;

    let mut gadget_edges = Vec::new();
    for v in 0..n {
        gadget_edges.push((vertex_points[v], star));
        for &w in &q_blocks[v] {
            gadget_edges.push((w, vertex_points[v]));
            gadget_edges.push((w, star));
        }
    }
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        gadget_edges.push((edge_points[e], vertex_points[u]));
        gadget_edges.push((edge_points[e], vertex_points[v]));
    }

    let mut capacities = vec![0u64; total];
    for &p in &vertex_points {
        capacities[p] = 2 * d as u64 + 1;
    }
    capacities[star] = (n * (d + 1) / 3 + 1) as u64;
    let k = 2 * n / 3 + 1;
    let metric = shortest_path_metric(&gadget_edges, total)?;
    let inst = Instance::new(metric, capacities, k, Objective::Sum)?;
    Ok((
        inst,
        ReductionLayout {
            vertex_points,
            q_blocks,
            edge_points,
            star,
            gadget_edges,
            degree: d,
            k,
        },
    ))
}

/// All-pairs hop distances of an unweighted undirected graph.
pub fn shortest_path_metric(edges: &[(usize, usize)], node_count: usize) -> Result<MetricSpace> {
    let mut adj = vec![Vec::new(); node_count];
    for &(a, b) in edges {
        if a >= node_count || b >= node_count {
            return Err(Error::param(format!("edge ({a}, {b}) out of range")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut rows = Vec::with_capacity(node_count);
    let mut queue = VecDeque::new();
    for s in 0..node_count {
        let mut dist = vec![usize::MAX; node_count];
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(t) = dist.iter().position(|&x| x == usize::MAX) {
            return Err(Error::param(format!("graph is disconnected: {t} unreachable from {s}")));
        }
        rows.push(dist.into_iter().map(|x| x as f64).collect());
    }
    MetricSpace::from_matrix(rows)
}

/// The radius-1 solution built from a vertex cover of size at most `2n/3`:
/// each cover vertex serves itself, its `Q_v` block and the edges it is the
/// lowest-id cover endpoint of; `p★` serves itself and every other vertex
/// with its block. Smaller covers are padded with the lowest unused vertices.
pub fn completeness_witness(g: &VcGraph, layout: &ReductionLayout, cover: &[usize]) -> Result<Clustering> {
    let n = g.vertex_count;
    if !g.is_vertex_cover(cover) {
        return Err(Error::param("not a vertex cover"));
    }
    let mut in_cover = vec![false; n];
    for &v in cover {
        in_cover[v] = true;
    }
    let target = 2 * n / 3;
    let mut chosen = in_cover.iter().filter(|&&c| c).count();
    if chosen > target {
        return Err(Error::param(format!("cover has {chosen} vertices, more than {target}")));
    }
    for flag in in_cover.iter_mut() {
        if chosen == target {
            break;
        }
        if !*flag {
            *flag = true;
            chosen += 1;
        }
    }
    let cover_vertices: Vec<usize> = (0..n).filter(|&v| in_cover[v]).collect();
    let mut centers = Vec::new();
    let mut members = Vec::new();
    for &v in &cover_vertices {
        let p = layout.vertex_points[v];
        let mut cluster = vec![p];
        cluster.extend(&layout.q_blocks[v]);
        for (e, &(a, b)) in g.edges.iter().enumerate() {
            let owner = if in_cover[a.min(b)] { a.min(b) } else { a.max(b) };
            if owner == v {
                cluster.push(layout.edge_points[e]);
            }
        }
        centers.push(p);
        members.push(cluster);
    }
    let mut star_cluster = vec![layout.star];
    for v in (0..n).filter(|&v| !in_cover[v]) {
        star_cluster.push(layout.vertex_points[v]);
        star_cluster.extend(&layout.q_blocks[v]);
    }
    centers.push(layout.star);
    members.push(star_cluster);
    let k = centers.len();
    Ok(Clustering {
        centers,
        members,
        nominal_radii: vec![1.0; k],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityLaw {
    Constant(u64),
    /// Uniform integer in `lo..=hi`.
    Range(u64, u64),
}

/// Points drawn uniformly from balls of radius `spread` around each blob
/// center, with capacities from `law`. When the `k` largest capacities do
/// not add up to `n`, all capacities are multiplied by the smallest integer
/// that makes them do so.
pub fn gen_blobs(
    blob_centers: &[Vec<f64>],
    blob_sizes: &[usize],
    spread: f64,
    law: CapacityLaw,
    k: usize,
    seed: u64,
) -> Result<Instance> {
    if blob_centers.len() != blob_sizes.len() {
        return Err(Error::param("one size per blob center is required"));
    }
    if blob_sizes.contains(&0) {
        return Err(Error::param("blob sizes must be at least 1"));
    }
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(Error::param(format!("spread must be non-negative, got {spread}")));
    }
    if let CapacityLaw::Range(lo, hi) = law {
        if lo > hi {
            return Err(Error::param(format!("empty capacity range {lo}..={hi}")));
        }
    }
    let dim = blob_centers.first().map_or(0, Vec::len);
    let mut rng = seeded_rng(seed, 0);
    let mut points = Vec::new();
    for (center, &size) in blob_centers.iter().zip(blob_sizes) {
        for _ in 0..size {
            let offset = loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break v;
                }
            };
            points.push(
                center
                    .iter()
                    .zip(&offset)
                    .map(|(c, o)| c + spread * o)
                    .collect::<Vec<f64>>(),
            );
        }
    }
    let n = points.len();
    let mut capacities: Vec<u64> = (0..n)
        .map(|_| match law {
            CapacityLaw::Constant(u) => u,
            CapacityLaw::Range(lo, hi) => rng.gen_range(lo..=hi),
        })
        .collect();
    let mut inst = Instance::euclidean(points, capacities.clone(), k, Objective::Sum)?;
    let top = inst.top_k_capacity();
    if top < n as u128 {
        if top == 0 {
            return Err(Error::param("all capacities are zero"));
        }
        let scale = (n as u128).div_ceil(top) as u64;
        for c in &mut capacities {
            *c *= scale;
        }
        inst.capacities = capacities;
    }
    Ok(inst)
}
