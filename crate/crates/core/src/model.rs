//! Instances, solutions and the objective.

use std::fmt;

use crate::error::{Error, Result};

/// A finite metric stored as a dense row-major distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Builds a metric from explicit rows. Only the shape and finiteness are
    /// checked here; the metric axioms are reported by [`validate_instance`].
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::param(format!(
                    "distance row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|d| !d.is_finite()) {
                return Err(Error::param(format!("distance row {i} contains {bad}")));
            }
            dist.extend(row);
        }
        Ok(MetricSpace { n, dist })
    }

    /// Euclidean distances between the given coordinate vectors.
    pub fn euclidean(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let dim = points.first().map_or(0, Vec::len);
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::param(format!(
                "point {i} has {} coordinates, expected {dim}",
                points[i].len()
            )));
        }
        let mut dist = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let d = points[a]
                    .iter()
                    .zip(&points[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                dist[a * n + b] = d;
                dist[b * n + a] = d;
            }
        }
        Ok(MetricSpace { n, dist })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.dist[a * self.n..(a + 1) * self.n]
    }

    /// Points of the closed ball `B(center, radius)`, ascending.
    pub fn ball(&self, center: usize, radius: f64) -> Vec<usize> {
        self.row(center)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Distinct distances from `center` in ascending order (always starts at 0).
    pub fn distinct_distances_from(&self, center: usize) -> Vec<f64> {
        let mut ds = self.row(center).to_vec();
        ds.push(0.0);
        sort_dedup(&mut ds);
        ds
    }

    /// Distinct pairwise distances in ascending order, including 0.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut ds = self.dist.clone();
        ds.push(0.0);
        sort_dedup(&mut ds);
        ds
    }
}

fn sort_dedup(values: &mut Vec<f64>) {
    values.sort_by(f64::total_cmp);
    values.dedup();
}

/// Aggregation of cluster radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Sum of radii.
    Sum,
    /// `(Σ r_j^p)^{1/p}` for a real `p > 1`.
    Lp(f64),
}

impl Objective {
    /// `p = 1` collapses to [`Objective::Sum`].
    pub fn from_p(p: f64) -> Result<Self> {
        if p < 1.0 || !p.is_finite() {
            return Err(Error::param(format!("norm exponent must be a real >= 1, got {p}")));
        }
        Ok(if p == 1.0 { Objective::Sum } else { Objective::Lp(p) })
    }

    pub fn p(self) -> f64 {
        match self {
            Objective::Sum => 1.0,
            Objective::Lp(p) => p,
        }
    }

    /// Contribution of one radius before the outer root is taken.
    #[inline]
    pub fn power(self, r: f64) -> f64 {
        match self {
            Objective::Sum => r,
            Objective::Lp(p) => r.powf(p),
        }
    }

    #[inline]
    pub fn root(self, s: f64) -> f64 {
        match self {
            Objective::Sum => s,
            Objective::Lp(p) => s.powf(1.0 / p),
        }
    }

    /// Objective value of a radii vector. Terms are accumulated in ascending
    /// order so the value does not depend on cluster labelling.
    pub fn aggregate(self, radii: &[f64]) -> f64 {
        let mut sorted = radii.to_vec();
        sorted.sort_by(f64::total_cmp);
        self.root(sorted.iter().map(|&r| self.power(r)).sum())
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Sum => f.write_str("L1"),
            Objective::Lp(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("l1") {
            return Ok(Objective::Sum);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::param(format!("cannot parse norm `{s}`")))?;
        Objective::from_p(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub metric: MetricSpace,
    pub capacities: Vec<u64>,
    pub k: usize,
    pub objective: Objective,
    /// Coordinates when the instance was ingested as Euclidean points.
    pub coords: Option<Vec<Vec<f64>>>,
}

impl Instance {
    pub fn new(
        metric: MetricSpace,
        capacities: Vec<u64>,
        k: usize,
        objective: Objective,
    ) -> Result<Self> {
        let n = metric.len();
        if capacities.len() != n {
            return Err(Error::param(format!(
                "{} capacities given for {n} points",
                capacities.len()
            )));
        }
        if k == 0 || k > n {
            return Err(Error::param(format!("k must lie in 1..={n}, got {k}")));
        }
        Ok(Instance {
            metric,
            capacities,
            k,
            objective,
            coords: None,
        })
    }

    pub fn euclidean(
        points: Vec<Vec<f64>>,
        capacities: Vec<u64>,
        k: usize,
        objective: Objective,
    ) -> Result<Self> {
        let metric = MetricSpace::euclidean(&points)?;
        let mut inst = Instance::new(metric, capacities, k, objective)?;
        inst.coords = Some(points);
        Ok(inst)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.metric.len()
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    /// The common capacity when every point has the same one.
    pub fn uniform_capacity(&self) -> Option<u64> {
        let first = *self.capacities.first()?;
        self.capacities.iter().all(|&c| c == first).then_some(first)
    }

    /// Sum of the `k` largest capacities.
    pub fn top_k_capacity(&self) -> u128 {
        let mut caps = self.capacities.clone();
        caps.sort_unstable_by(|a, b| b.cmp(a));
        caps.iter().take(self.k).map(|&c| c as u128).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: usize, radius: f64) -> Self {
        Ball { center, radius }
    }

    #[inline]
    pub fn contains(&self, metric: &MetricSpace, p: usize) -> bool {
        metric.d(self.center, p) <= self.radius
    }
}

/// `k` clusters: center, member set and the radius the producer promised.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub centers: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub nominal_radii: Vec<f64>,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Largest member distance per cluster (0 for empty clusters).
    pub fn tight_radii(&self, metric: &MetricSpace) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.members)
            .map(|(&c, ms)| ms.iter().map(|&p| metric.d(c, p)).fold(0.0, f64::max))
            .collect()
    }

    pub fn nominal_cost(&self, objective: Objective) -> f64 {
        objective.aggregate(&self.nominal_radii)
    }

    pub fn tight_cost(&self, inst: &Instance) -> f64 {
        inst.objective.aggregate(&self.tight_radii(&inst.metric))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceIssue {
    Asymmetric { a: usize, b: usize },
    NonzeroDiagonal { a: usize },
    Negative { a: usize, b: usize },
    Triangle { a: usize, b: usize, c: usize },
    CapacityDeficit { k: usize, top: u128, n: usize },
}

impl fmt::Display for InstanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceIssue::Asymmetric { a, b } => write!(f, "asymmetric: d({a},{b}) != d({b},{a})"),
            InstanceIssue::NonzeroDiagonal { a } => write!(f, "nonzero diagonal: d({a},{a}) != 0"),
            InstanceIssue::Negative { a, b } => write!(f, "negative distance d({a},{b})"),
            InstanceIssue::Triangle { a, b, c } => {
                write!(f, "triangle violation ({a},{b},{c}): d({a},{c}) > d({a},{b}) + d({b},{c})")
            }
            InstanceIssue::CapacityDeficit { k, top, n } => {
                write!(f, "infeasible: top-{k} capacity {top} < {n}")
            }
        }
    }
}

/// Report-style result of [`validate_instance`]. Long lists of metric
/// violations are truncated; `truncated` counts what was dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InstanceReport {
    pub issues: Vec<InstanceIssue>,
    pub truncated: usize,
}

impl InstanceReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn is_infeasible(&self) -> bool {
        self.issues
            .iter()
            .any(|i| matches!(i, InstanceIssue::CapacityDeficit { .. }))
    }

    fn push(&mut self, issue: InstanceIssue) {
        const LIMIT: usize = 32;
        if self.issues.len() < LIMIT {
            self.issues.push(issue);
        } else {
            self.truncated += 1;
        }
    }
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        if self.truncated > 0 {
            write!(f, "; ... and {} more", self.truncated)?;
        }
        Ok(())
    }
}

/// Relative slack allowed when checking the metric axioms on float input.
const AXIOM_TOLERANCE: f64 = 1e-9;

pub fn validate_instance(inst: &Instance) -> InstanceReport {
    let m = &inst.metric;
    let n = m.len();
    let mut report = InstanceReport::default();
    let slack = AXIOM_TOLERANCE * m.diameter().max(1.0);
    for a in 0..n {
        if m.d(a, a) != 0.0 {
            report.push(InstanceIssue::NonzeroDiagonal { a });
        }
        for b in 0..n {
            if m.d(a, b) < 0.0 {
                report.push(InstanceIssue::Negative { a, b });
            }
            if b > a && (m.d(a, b) - m.d(b, a)).abs() > slack {
                report.push(InstanceIssue::Asymmetric { a, b });
            }
        }
    }
    for a in 0..n {
        for c in 0..n {
            let direct = m.d(a, c);
            for b in 0..n {
                if direct > m.d(a, b) + m.d(b, c) + slack {
                    report.push(InstanceIssue::Triangle { a, b, c });
                }
            }
        }
    }
    let top = inst.top_k_capacity();
    if top < n as u128 {
        report.push(InstanceIssue::CapacityDeficit { k: inst.k, top, n });
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionIssue {
    WrongClusterCount { expected: usize, found: usize },
    ShapeMismatch,
    CenterOutOfRange { cluster: usize },
    CentersNotDistinct { first: usize, second: usize },
    MemberOutOfRange { cluster: usize, point: usize },
    DuplicateAssignment { point: usize },
    Unassigned { point: usize },
    CapacityExceeded { cluster: usize, size: usize, capacity: u64 },
    RadiusExceeded { cluster: usize, actual: f64, nominal: f64 },
    NegativeRadius { cluster: usize },
}

impl fmt::Display for SolutionIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SolutionIssue::*;
        match self {
            WrongClusterCount { expected, found } => {
                write!(f, "expected {expected} clusters, found {found}")
            }
            ShapeMismatch => f.write_str("centers, member sets and radii differ in length"),
            CenterOutOfRange { cluster } => write!(f, "center of cluster {cluster} out of range"),
            CentersNotDistinct { first, second } => {
                write!(f, "centers not distinct: clusters {first} and {second}")
            }
            MemberOutOfRange { cluster, point } => {
                write!(f, "member {point} of cluster {cluster} out of range")
            }
            DuplicateAssignment { point } => write!(f, "point {point} assigned more than once"),
            Unassigned { point } => write!(f, "point {point} unassigned"),
            CapacityExceeded {
                cluster,
                size,
                capacity,
            } => write!(f, "capacity exceeded at {cluster}: {size} > {capacity}"),
            RadiusExceeded {
                cluster,
                actual,
                nominal,
            } => write!(f, "radius exceeded at {cluster}: {actual} > {nominal}"),
            NegativeRadius { cluster } => write!(f, "negative radius at {cluster}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionReport {
    pub issues: Vec<SolutionIssue>,
}

impl SolutionReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for SolutionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks the four clustering invariants: distinct centers, partition,
/// capacities and radius consistency.
pub fn validate_solution(inst: &Instance, sol: &Clustering) -> SolutionReport {
    use SolutionIssue::*;
    let n = inst.n();
    let mut issues = Vec::new();
    if sol.centers.len() != sol.members.len() || sol.centers.len() != sol.nominal_radii.len() {
        issues.push(ShapeMismatch);
        return SolutionReport { issues };
    }
    if sol.len() != inst.k {
        issues.push(WrongClusterCount {
            expected: inst.k,
            found: sol.len(),
        });
    }
    let mut center_of = vec![None; n];
    for (j, &c) in sol.centers.iter().enumerate() {
        if c >= n {
            issues.push(CenterOutOfRange { cluster: j });
            continue;
        }
        match center_of[c] {
            Some(first) => issues.push(CentersNotDistinct { first, second: j }),
            None => center_of[c] = Some(j),
        }
    }
    let mut seen = vec![false; n];
    for (j, ms) in sol.members.iter().enumerate() {
        let c = sol.centers[j];
        let r = sol.nominal_radii[j];
        if r < 0.0 || r.is_nan() {
            issues.push(NegativeRadius { cluster: j });
        }
        let mut actual: f64 = 0.0;
        for &p in ms {
            if p >= n {
                issues.push(MemberOutOfRange { cluster: j, point: p });
                continue;
            }
            if std::mem::replace(&mut seen[p], true) {
                issues.push(DuplicateAssignment { point: p });
            }
            if c < n {
                actual = actual.max(inst.metric.d(c, p));
            }
        }
        if c < n {
            let capacity = inst.capacities[c];
            if ms.len() as u64 > capacity {
                issues.push(CapacityExceeded {
                    cluster: j,
                    size: ms.len(),
                    capacity,
                });
            }
        }
        if actual > r {
            issues.push(RadiusExceeded {
                cluster: j,
                actual,
                nominal: r,
            });
        }
    }
    for (p, &s) in seen.iter().enumerate() {
        if !s {
            issues.push(Unassigned { point: p });
        }
    }
    SolutionReport { issues }
}

/// Objective value of a valid solution. With `tighten`, each radius is the
/// actual largest member distance instead of the promised one.
pub fn evaluate(inst: &Instance, sol: &Clustering, tighten: bool) -> Result<f64> {
    let report = validate_solution(inst, sol);
    if !report.is_clean() {
        return Err(Error::InvalidSolution(report));
    }
    Ok(if tighten {
        sol.tight_cost(inst)
    } else {
        sol.nominal_cost(inst.objective)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64], caps: Vec<u64>, k: usize) -> Instance {
        let pts = xs.iter().map(|&x| vec![x]).collect();
        Instance::euclidean(pts, caps, k, Objective::Sum).unwrap()
    }

    #[test]
    fn singleton_instance_is_valid() {
        let inst = line(&[0.0], vec![1], 1);
        assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn capacity_deficit_is_reported() {
        let inst = line(&[0.0, 1.0], vec![1, 0], 1);
        let report = validate_instance(&inst);
        assert!(report.is_infeasible());
        assert_eq!(report.to_string(), "infeasible: top-1 capacity 1 < 2");
    }

    #[test]
    fn triangle_violation_lists_the_triple() {
        let metric = MetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        let inst = Instance::new(metric, vec![3, 3, 3], 1, Objective::Sum).unwrap();
        let report = validate_instance(&inst);
        assert!(report
            .issues
            .contains(&InstanceIssue::Triangle { a: 0, b: 1, c: 2 }));
    }

    #[test]
    fn asymmetry_is_reported() {
        let metric = MetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let inst = Instance::new(metric, vec![2, 2], 1, Objective::Sum).unwrap();
        assert!(validate_instance(&inst)
            .issues
            .contains(&InstanceIssue::Asymmetric { a: 0, b: 1 }));
    }

    #[test]
    fn evaluate_sums_tight_radii() {
        let inst = line(&[0.0, 1.0, 10.0, 11.0], vec![2; 4], 2);
        let sol = Clustering {
            centers: vec![0, 2],
            members: vec![vec![0, 1], vec![2, 3]],
            nominal_radii: vec![2.0, 1.5],
        };
        assert_eq!(evaluate(&inst, &sol, true).unwrap(), 2.0);
        assert_eq!(evaluate(&inst, &sol, false).unwrap(), 3.5);
    }

    #[test]
    fn evaluate_l2_of_three_four() {
        let inst = line(&[0.0, 3.0, 100.0, 104.0], vec![2; 4], 2).with_objective(Objective::Lp(2.0));
        let sol = Clustering {
            centers: vec![0, 2],
            members: vec![vec![0, 1], vec![2, 3]],
            nominal_radii: vec![3.0, 4.0],
        };
        assert!((evaluate(&inst, &sol, false).unwrap() - 5.0).abs() < 1e-12);
        assert!((evaluate(&inst, &sol, true).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_clusters_cost_nothing() {
        let inst = line(&[0.0, 4.0, 9.0], vec![1; 3], 3);
        let sol = Clustering {
            centers: vec![0, 1, 2],
            members: vec![vec![0], vec![1], vec![2]],
            nominal_radii: vec![0.0; 3],
        };
        assert_eq!(evaluate(&inst, &sol, true).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_centers_and_capacity_are_flagged() {
        let inst = line(&[0.0, 1.0, 2.0], vec![1, 2, 1], 2);
        let dup = Clustering {
            centers: vec![1, 1],
            members: vec![vec![0, 1], vec![2]],
            nominal_radii: vec![1.0, 1.0],
        };
        let report = validate_solution(&inst, &dup);
        assert!(report.to_string().contains("centers not distinct"));

        let over = Clustering {
            centers: vec![0, 1],
            members: vec![vec![0, 1], vec![2]],
            nominal_radii: vec![1.0, 1.0],
        };
        let report = validate_solution(&inst, &over);
        assert!(report.issues.contains(&SolutionIssue::CapacityExceeded {
            cluster: 0,
            size: 2,
            capacity: 1
        }));
        assert!(report.to_string().contains("capacity exceeded at 0"));
    }

    #[test]
    fn empty_clusters_are_legal() {
        let inst = line(&[0.0, 1.0], vec![2, 0], 2);
        let sol = Clustering {
            centers: vec![0, 1],
            members: vec![vec![0, 1], vec![]],
            nominal_radii: vec![1.0, 0.0],
        };
        assert!(validate_solution(&inst, &sol).is_clean());
        assert_eq!(evaluate(&inst, &sol, true).unwrap(), 1.0);
    }

    #[test]
    fn unassigned_and_radius_violations() {
        let inst = line(&[0.0, 1.0, 5.0], vec![3; 3], 1);
        let sol = Clustering {
            centers: vec![0],
            members: vec![vec![0, 2]],
            nominal_radii: vec![1.0],
        };
        let report = validate_solution(&inst, &sol);
        assert!(report.issues.contains(&SolutionIssue::Unassigned { point: 1 }));
        assert!(matches!(
            report.issues[0],
            SolutionIssue::RadiusExceeded { cluster: 0, .. }
        ));
        assert!(evaluate(&inst, &sol, true).is_err());
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("L1".parse::<Objective>().unwrap(), Objective::Sum);
        assert_eq!("1".parse::<Objective>().unwrap(), Objective::Sum);
        assert_eq!("2".parse::<Objective>().unwrap(), Objective::Lp(2.0));
        assert!("0.5".parse::<Objective>().is_err());
    }
}
