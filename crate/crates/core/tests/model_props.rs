mod common;

use capradii::model::{evaluate, validate_instance, validate_solution, SolutionIssue};
use capradii::{Clustering, Instance, MetricSpace, Objective};
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-50.0..50.0f64, 2), 1..12)
}

#[test]
fn triangle_violation_is_reported_with_its_triple() {
    let m = MetricSpace::from_matrix(vec![
        vec![0.0, 1.0, 5.0],
        vec![1.0, 0.0, 1.0],
        vec![5.0, 1.0, 0.0],
    ])
    .unwrap();
    let inst = Instance::new(m, vec![3; 3], 1, Objective::Sum).unwrap();
    let report = validate_instance(&inst);
    assert!(report.to_string().contains("triangle violation (0,1,2)"), "{report}");
}

#[test]
fn capacity_deficit_message() {
    let inst = common::line(&[0.0, 1.0], vec![1, 0], 1);
    assert_eq!(validate_instance(&inst).to_string(), "infeasible: top-1 capacity 1 < 2");
}

#[test]
fn hand_built_solutions() {
    let inst = common::line(&[0.0, 1.0, 5.0, 6.0], vec![2; 4], 2);
    let good = Clustering {
        centers: vec![0, 3],
        members: vec![vec![0, 1], vec![2, 3]],
        nominal_radii: vec![1.0, 1.0],
    };
    assert!(validate_solution(&inst, &good).is_clean());
    assert_eq!(evaluate(&inst, &good, true).unwrap(), 2.0);

    let mut twin = good.clone();
    twin.centers = vec![0, 0];
    assert!(validate_solution(&inst, &twin).to_string().contains("centers not distinct"));

    let crowded = Clustering {
        centers: vec![0, 3],
        members: vec![vec![0, 1, 2], vec![3]],
        nominal_radii: vec![5.0, 0.0],
    };
    let report = validate_solution(&inst, &crowded);
    assert!(report
        .issues
        .contains(&SolutionIssue::CapacityExceeded { cluster: 0, size: 3, capacity: 2 }));
    assert!(report.to_string().contains("capacity exceeded at 0"));
}

#[test]
fn lp_cost_is_a_norm() {
    assert_eq!(Objective::Lp(2.0).aggregate(&[3.0, 4.0]), 5.0);
    assert_eq!(Objective::Sum.aggregate(&[1.0, 1.0]), 2.0);
}

proptest! {
    #[test]
    fn euclidean_metrics_are_valid(pts in points()) {
        let n = pts.len();
        let inst = Instance::euclidean(pts, vec![n as u64; n], 1, Objective::Sum).unwrap();
        prop_assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn singletons_cost_nothing(pts in points()) {
        let n = pts.len();
        let inst = Instance::euclidean(pts, vec![1; n], n, Objective::Lp(3.0)).unwrap();
        let sol = Clustering {
            centers: (0..n).collect(),
            members: (0..n).map(|p| vec![p]).collect(),
            nominal_radii: vec![0.0; n],
        };
        prop_assert!(validate_solution(&inst, &sol).is_clean());
        prop_assert_eq!(evaluate(&inst, &sol, true).unwrap(), 0.0);
    }

    #[test]
    fn tightening_never_raises_cost(pts in points(), p in 1.0..4.0f64) {
        let n = pts.len();
        let inst = Instance::euclidean(pts, vec![n as u64; n], 1, Objective::Lp(p)).unwrap();
        let radius = inst.metric.row(0).iter().copied().fold(0.0, f64::max);
        let sol = Clustering {
            centers: vec![0],
            members: vec![(0..n).collect()],
            nominal_radii: vec![radius + 1.0],
        };
        prop_assert!(validate_solution(&inst, &sol).is_clean());
        let tight = evaluate(&inst, &sol, true).unwrap();
        let nominal = evaluate(&inst, &sol, false).unwrap();
        prop_assert!(tight <= nominal);
        prop_assert!((tight - radius).abs() < 1e-12);
    }
}
