mod common;

use std::collections::VecDeque;

use capradii::format::write_instance;
use capradii::gen::{completeness_witness, gen_blobs, reduce_vc, shortest_path_metric, CapacityLaw, VcGraph};
use capradii::model::{evaluate, validate_instance, validate_solution};
use capradii::oracle::optimal;
use proptest::prelude::*;

/// Plain BFS from one node, written separately from the library's.
fn hops(adj: &[Vec<usize>], from: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[test]
fn triangle_gadget_matches_bfs() {
    let g = VcGraph::complete(3);
    let (inst, layout) = reduce_vc(&g).unwrap();
    assert_eq!(inst.n(), 13);
    assert_eq!(inst.k, 3);
    let mut adj = vec![Vec::new(); inst.n()];
    for &(a, b) in &layout.gadget_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in 0..inst.n() {
        let d = hops(&adj, a);
        for (b, &hops_ab) in d.iter().enumerate() {
            assert_eq!(inst.metric.d(a, b), hops_ab as f64);
        }
    }
    // Q_v to p_e of an incident edge goes through p_v.
    let (u, _) = g.edges[0];
    assert_eq!(inst.metric.d(layout.q_blocks[u][0], layout.edge_points[0]), 2.0);
    assert_eq!(inst.metric.d(layout.edge_points[0], layout.star), 2.0);
}

#[test]
fn k6_gadget_shape_and_distances() {
    let g = VcGraph::complete(6);
    let (inst, layout) = reduce_vc(&g).unwrap();
    assert_eq!(inst.n(), 52);
    assert_eq!(inst.k, 5);
    assert_eq!(inst.capacities[layout.vertex_points[3]], 11);
    assert_eq!(inst.capacities[layout.star], 13);
    let (a, b) = g.edges[0];
    let other = (0..6).find(|&v| v != a && v != b).unwrap();
    assert_eq!(inst.metric.d(layout.edge_points[0], layout.vertex_points[other]), 3.0);
}

#[test]
fn small_metrics() {
    let path = shortest_path_metric(&[(0, 1), (1, 2)], 3).unwrap();
    assert_eq!(path.d(0, 2), 2.0);
    let star = shortest_path_metric(&[(0, 1), (0, 2), (0, 3)], 4).unwrap();
    assert_eq!(star.d(2, 3), 2.0);
    assert!(shortest_path_metric(&[(0, 1)], 3).is_err());
}

#[test]
fn reduction_rejects_bad_vertex_counts() {
    assert!(reduce_vc(&VcGraph::complete(4)).is_err());
}

#[test]
fn completeness_on_small_graphs() {
    // Paths and cycles on 6 vertices have covers of size 3 <= 2n/3.
    let path = VcGraph::new(6, (0..5).map(|v| (v, v + 1)).collect()).unwrap();
    let cycle = VcGraph::new(6, (0..6).map(|v| (v, (v + 1) % 6)).collect()).unwrap();
    for (g, cover) in [(path, vec![1, 3, 4]), (cycle, vec![0, 2, 4])] {
        let (inst, layout) = reduce_vc(&g).unwrap();
        let sol = completeness_witness(&g, &layout, &cover).unwrap();
        assert!(validate_solution(&inst, &sol).is_clean(), "{}", validate_solution(&inst, &sol));
        assert_eq!(evaluate(&inst, &sol, false).unwrap(), inst.k as f64);
    }
}

#[test]
fn soundness_gap_at_desk_scale() {
    // K6 needs a cover larger than 2n/3; K3 has one that fits.
    for g in [VcGraph::complete(6), VcGraph::complete(3)] {
        let n = g.vertex_count as f64;
        let d = g.max_degree() as f64;
        let vc = common::min_vertex_cover(&g) as f64;
        let (inst, _) = reduce_vc(&g).unwrap();
        let opt = optimal(&inst).unwrap().opt_cost;
        let k = inst.k as f64;
        if vc > 2.0 * n / 3.0 {
            let eps = vc / (2.0 * n / 3.0) - 1.0;
            assert!(opt >= k * (1.0 + eps / (2.0 * d)) - 1e-9, "OPT {opt}");
        } else {
            assert!(opt <= k);
        }
    }
}

#[test]
fn spread_zero_gives_two_locations() {
    let inst = gen_blobs(&[vec![0.0, 0.0], vec![4.0, 1.0]], &[3, 4], 0.0, CapacityLaw::Constant(7), 2, 1).unwrap();
    let coords = inst.coords.clone().unwrap();
    let mut distinct = coords.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    assert_eq!(distinct.len(), 2);
}

#[test]
fn capacities_are_rescaled_to_feasibility() {
    let inst = gen_blobs(&[vec![0.0]], &[10], 1.0, CapacityLaw::Constant(2), 2, 3).unwrap();
    assert!(validate_instance(&inst).is_clean());
    // Top-2 capacity 4 falls short of 10, so everything triples.
    assert_eq!(inst.capacities, vec![6; 10]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_blob_fits_its_diameter(seed in 0u64..1000, size in 1usize..9, spread in 0.0..3.0f64) {
        let inst = gen_blobs(&[vec![1.0, -1.0]], &[size], spread, CapacityLaw::Constant(size as u64), 1, seed).unwrap();
        prop_assert!(optimal(&inst).unwrap().opt_cost <= 2.0 * spread + 1e-12);
    }

    #[test]
    fn generation_is_reproducible(seed in any::<u64>(), lo in 0u64..5, extra in 0u64..5) {
        let make = || gen_blobs(&[vec![0.0, 0.0, 0.0], vec![5.0, 5.0, 5.0]], &[4, 6], 1.5, CapacityLaw::Range(lo, lo + extra), 3, seed);
        let (a, b) = (make(), make());
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(write_instance(&a), write_instance(&b)),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }
}
