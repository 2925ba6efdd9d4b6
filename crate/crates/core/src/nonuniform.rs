//! Arbitrary capacities: the three-family ball construction.
//!
//! Every cluster index is in one of four states: covered by a ball of the
//! covering family, the grown family, the reserved family, or not yet
//! placed. An iteration first covers all points with covering balls
//! `B(x, 3r_j)` around high-capacity points, then places every remaining
//! index, largest radius first, by either growing around a nearby placed
//! ball or carving out a reserved ball that keeps a private point set `C_j`.
//! Placing a ball can instead "pin" the candidate point as an exact center,
//! which restarts the covering phase around the pinned set.
//!
//! The radii used when growing and in the final output depend on a
//! [`RadiusRule`]; the trade-off rule with `α = (1+√13)/6` gives the factor
//! `4+√13`.

use crate::error::{Error, Result};
use crate::flow::{feasible_assignment, AssignmentProblem};
use crate::guess::Guesser;
use crate::model::{Ball, Clustering, Instance};

/// How far balls are grown.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusRule {
    /// Grown balls `5r`, extensions and output `9r`.
    Base,
    /// Parameterised growth with `α ∈ (0, 1]`.
    Tradeoff { alpha: f64 },
}

/// `(1+√13)/6`, where both arms of [`tradeoff_bound`] meet.
pub fn optimal_alpha() -> f64 {
    (1.0 + 13f64.sqrt()) / 6.0
}

/// `max(3(1+2α), 5+2/α)`.
pub fn tradeoff_bound(alpha: f64) -> f64 {
    (3.0 * (1.0 + 2.0 * alpha)).max(5.0 + 2.0 / alpha)
}

impl Default for RadiusRule {
    fn default() -> Self {
        RadiusRule::Tradeoff {
            alpha: optimal_alpha(),
        }
    }
}

impl RadiusRule {
    pub fn tradeoff(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(RadiusRule::Tradeoff { alpha })
        } else {
            Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")))
        }
    }

    /// Worst-case ratio between output and profile cost.
    pub fn factor(self) -> f64 {
        match self {
            RadiusRule::Base => 9.0,
            RadiusRule::Tradeoff { alpha } => tradeoff_bound(alpha),
        }
    }

    /// Whether an unplaced index with radius `r` may grow around a placed
    /// ball of radius `ball_radius`.
    fn may_grow(self, r: f64, ball_radius: f64) -> bool {
        match self {
            RadiusRule::Base => r >= ball_radius,
            RadiusRule::Tradeoff { alpha } => r >= alpha * ball_radius,
        }
    }

    fn grown_radius(self, r: f64, ball_radius: f64) -> f64 {
        match self {
            RadiusRule::Base => 5.0 * r,
            RadiusRule::Tradeoff { .. } => 2.0 * ball_radius + 3.0 * r,
        }
    }

    /// Radius of the region around a placed ball that must contain any
    /// optimal ball it meets; also the output radius of that family.
    fn reach(self, family: Family, r: f64) -> f64 {
        match (self, family) {
            (RadiusRule::Base, _) => 9.0 * r,
            (RadiusRule::Tradeoff { alpha }, Family::Cover) => 3.0 * (1.0 + 2.0 * alpha) * r,
            (RadiusRule::Tradeoff { alpha }, _) => (5.0 + 2.0 / alpha) * r,
        }
    }

    /// Upper bound on a stored grown-ball radius, as a multiple of `r`.
    fn grown_cap(self) -> f64 {
        match self {
            RadiusRule::Base => 5.0,
            RadiusRule::Tradeoff { alpha } => 5f64.max(3.0 + 2.0 / alpha),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Cover,
    Grown,
    Reserved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Placed(Family),
    /// The point was pinned as the exact center of this index.
    Restarted(usize),
}

/// Why an iteration produced nothing. The last two variants mean a bug, not
/// a bad guess.
#[derive(Clone, Debug, PartialEq)]
pub enum NonUniformFailure {
    /// An uncovered point remained with every index placed.
    OutOfIndices,
    /// A center had to be chosen from an empty candidate set.
    NoCandidate,
    /// The output balls admit no capacity-respecting assignment.
    Infeasible,
    Guard(String),
    Invariant(String),
}

impl NonUniformFailure {
    pub fn is_violation(&self) -> bool {
        matches!(self, NonUniformFailure::Guard(_) | NonUniformFailure::Invariant(_))
    }
}

type Step<T> = std::result::Result<T, NonUniformFailure>;

/// Per-iteration counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IterationStats {
    pub insert_calls: usize,
    pub restarts: usize,
    pub update_calls: usize,
    /// Most loop turns taken by a single placement of a reserved ball.
    pub max_update_turns: usize,
    /// State transitions after which the invariants were checked.
    pub checked_transitions: usize,
}

/// The live state of one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct NonUniformState {
    pub family: Vec<Option<Family>>,
    pub centers: Vec<Option<usize>>,
    /// Radius of the stored ball per placed index.
    pub radii: Vec<f64>,
    /// Private point sets of reserved balls.
    pub reserved: Vec<Vec<usize>>,
    /// Indices whose center is pinned.
    pub pinned: Vec<bool>,
}

impl NonUniformState {
    pub fn new(k: usize) -> Self {
        NonUniformState {
            family: vec![None; k],
            centers: vec![None; k],
            radii: vec![0.0; k],
            reserved: vec![Vec::new(); k],
            pinned: vec![false; k],
        }
    }

    pub fn members(&self, family: Family) -> Vec<usize> {
        (0..self.family.len())
            .filter(|&i| self.family[i] == Some(family))
            .collect()
    }

    pub fn unplaced(&self) -> Vec<usize> {
        (0..self.family.len())
            .filter(|&i| self.family[i].is_none())
            .collect()
    }

    /// Centers of placed indices, as a point mask.
    fn center_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for (f, c) in self.family.iter().zip(&self.centers) {
            if let (Some(_), Some(c)) = (f, c) {
                mask[*c] = true;
            }
        }
        mask
    }

    fn place(&mut self, j: usize, family: Family, center: usize, radius: f64) {
        self.family[j] = Some(family);
        self.centers[j] = Some(center);
        self.radii[j] = radius;
        self.reserved[j].clear();
    }
}

/// One iteration in progress: the instance, the guessed radii and the state.
pub struct NonUniformRun<'a> {
    inst: &'a Instance,
    profile: &'a [f64],
    rule: RadiusRule,
    pub state: NonUniformState,
    pub stats: IterationStats,
}

const SLACK: f64 = 1e-9;

fn within(actual: f64, bound: f64) -> bool {
    actual <= bound * (1.0 + SLACK)
}

impl<'a> NonUniformRun<'a> {
    pub fn new(inst: &'a Instance, profile: &'a [f64], rule: RadiusRule) -> Result<Self> {
        if profile.len() != inst.k {
            return Err(Error::param(format!(
                "profile has {} radii, expected {}",
                profile.len(),
                inst.k
            )));
        }
        if let RadiusRule::Tradeoff { alpha } = rule {
            RadiusRule::tradeoff(alpha)?;
        }
        Ok(NonUniformRun {
            inst,
            profile,
            rule,
            state: NonUniformState::new(inst.k),
            stats: IterationStats::default(),
        })
    }

    fn k(&self) -> usize {
        self.inst.k
    }

    pub fn insert_limit(&self) -> usize {
        let k = self.k();
        2 * k * (k + 1) + k
    }

    /// Highest-capacity point among `candidates`, lowest id on ties.
    fn best_capacity(&self, candidates: impl Iterator<Item = usize>) -> Option<usize> {
        let caps = &self.inst.capacities;
        candidates.fold(None, |best, p| match best {
            Some(b) if caps[b] >= caps[p] => Some(b),
            _ => Some(p),
        })
    }

    /// Highest-capacity point within `radius` of `around` that is not a
    /// center of a placed index.
    fn best_free_point(&self, around: usize, radius: f64) -> Option<usize> {
        let taken = self.state.center_mask(self.inst.n());
        let metric = &self.inst.metric;
        self.best_capacity((0..self.inst.n()).filter(|&p| !taken[p] && metric.d(around, p) <= radius))
    }

    /// Places `B(p, r)` for index `j` into `family`, or pins `p` as the exact
    /// center of a random unpinned index and resets everything else.
    pub fn insert_ball(
        &mut self,
        p: usize,
        j: usize,
        r: f64,
        family: Family,
        guesser: &mut dyn Guesser,
    ) -> Step<InsertOutcome> {
        self.stats.insert_calls += 1;
        if self.state.center_mask(self.inst.n())[p] {
            return Err(NonUniformFailure::Invariant(format!(
                "point {p} is already a center"
            )));
        }
        let outcome = if guesser.coin() {
            self.state.place(j, family, p, r);
            InsertOutcome::Placed(family)
        } else {
            let free: Vec<usize> = (0..self.k()).filter(|&i| !self.state.pinned[i]).collect();
            if free.is_empty() {
                return Err(NonUniformFailure::Invariant("every index is pinned".into()));
            }
            let h = free[guesser.below(free.len())];
            self.stats.restarts += 1;
            self.state.centers[h] = Some(p);
            self.state.pinned[h] = true;
            for i in 0..self.k() {
                if self.state.pinned[i] {
                    let c = self.state.centers[i].expect("pinned index has a center");
                    self.state.place(i, Family::Cover, c, self.profile[i]);
                } else {
                    self.state.family[i] = None;
                    self.state.reserved[i].clear();
                }
            }
            InsertOutcome::Restarted(h)
        };
        self.check()?;
        Ok(outcome)
    }

    /// Places index `j` (unplaced) whose optimal ball is believed to lie in
    /// `candidates`: repeatedly picks the center that can serve the most of
    /// the candidates and guesses which other indices interfere.
    pub fn update_balls(
        &mut self,
        j: usize,
        mut candidates: Vec<bool>,
        guesser: &mut dyn Guesser,
    ) -> Step<InsertOutcome> {
        self.stats.update_calls += 1;
        let inst = self.inst;
        let n = inst.n();
        let metric = &inst.metric;
        let r_j = self.profile[j];
        let mut open: Vec<usize> = (0..self.k())
            .filter(|&i| matches!(self.state.family[i], None | Some(Family::Reserved)))
            .collect();
        let mut turns = 0;
        loop {
            turns += 1;
            self.stats.max_update_turns = self.stats.max_update_turns.max(turns);
            if turns > self.k() {
                return Err(NonUniformFailure::Guard(format!(
                    "placement of index {j} took more than {} turns",
                    self.k()
                )));
            }
            let taken = self.state.center_mask(n);
            let caps = &inst.capacities;
            let served = |x: usize| {
                let inside = (0..n)
                    .filter(|&p| candidates[p] && metric.d(x, p) <= r_j)
                    .count() as u64;
                caps[x].min(inside)
            };
            let Some(x) = (0..n)
                .filter(|&x| !taken[x])
                .map(|x| (served(x), x))
                .fold(None, |best: Option<(u64, usize)>, cur| match best {
                    Some(b) if b.0 >= cur.0 => Some(b),
                    _ => Some(cur),
                })
                .map(|(_, x)| x)
            else {
                return Err(NonUniformFailure::NoCandidate);
            };
            let private: Vec<usize> = (0..n)
                .filter(|&p| candidates[p] && metric.d(x, p) <= r_j)
                .collect();
            let interfering = guesser.subset(&open);
            if interfering.is_empty() {
                let outcome = self.insert_ball(x, j, r_j, Family::Reserved, guesser)?;
                if outcome == InsertOutcome::Placed(Family::Reserved) {
                    self.state.reserved[j] = private;
                    self.check()?;
                }
                return Ok(outcome);
            }
            if let Some(&t) = interfering.iter().find(|&&t| self.profile[t] > r_j) {
                let r_t = self.profile[t];
                let y = self
                    .best_free_point(x, r_j + r_t)
                    .ok_or(NonUniformFailure::NoCandidate)?;
                return self.insert_ball(y, t, 5.0 * r_t, Family::Grown, guesser);
            }
            if guesser.coin() {
                return self.insert_ball(x, j, 5.0 * r_j, Family::Grown, guesser);
            }
            open.retain(|i| !interfering.contains(i));
            for (p, c) in candidates.iter_mut().enumerate() {
                if metric.d(x, p) <= 3.0 * r_j {
                    *c = false;
                }
            }
        }
    }

    /// Covering phase: until the covering balls contain every point, guess
    /// the index of the lowest uncovered point and cover it.
    fn cover(&mut self, guesser: &mut dyn Guesser) -> Step<Option<InsertOutcome>> {
        let inst = self.inst;
        let metric = &inst.metric;
        loop {
            let covering = self.state.members(Family::Cover);
            let uncovered = (0..self.inst.n()).find(|&p| {
                covering.iter().all(|&i| {
                    metric.d(self.state.centers[i].expect("placed"), p) > self.state.radii[i]
                })
            });
            let Some(p) = uncovered else {
                return Ok(None);
            };
            let unplaced = self.state.unplaced();
            if unplaced.is_empty() {
                return Err(NonUniformFailure::OutOfIndices);
            }
            let j = unplaced[guesser.below(unplaced.len())];
            let x = self
                .best_free_point(p, self.profile[j])
                .ok_or(NonUniformFailure::NoCandidate)?;
            let outcome = self.insert_ball(x, j, 3.0 * self.profile[j], Family::Cover, guesser)?;
            if let InsertOutcome::Restarted(_) = outcome {
                return Ok(Some(outcome));
            }
        }
    }

    /// Places one unplaced index: the one with the largest radius.
    fn place_next(&mut self, j: usize, guesser: &mut dyn Guesser) -> Step<InsertOutcome> {
        let inst = self.inst;
        let n = inst.n();
        let metric = &inst.metric;
        let r_j = self.profile[j];
        let mut near: Vec<usize> = self.state.members(Family::Cover);
        near.extend(self.state.members(Family::Grown));
        near.sort_unstable();
        let touching = guesser.subset(&near);
        if let Some(&h) = touching
            .iter()
            .find(|&&h| self.rule.may_grow(r_j, self.state.radii[h]))
        {
            let c_h = self.state.centers[h].expect("placed");
            let rad_h = self.state.radii[h];
            let x = self
                .best_free_point(c_h, rad_h + r_j)
                .ok_or(NonUniformFailure::NoCandidate)?;
            let r = self.rule.grown_radius(r_j, rad_h);
            return self.insert_ball(x, j, r, Family::Grown, guesser);
        }
        let mut candidates = vec![true; n];
        for &h in &touching {
            let c_h = self.state.centers[h].expect("placed");
            let reach = self.rule.reach(self.state.family[h].expect("placed"), self.profile[h]);
            for (p, c) in candidates.iter_mut().enumerate() {
                *c &= metric.d(c_h, p) <= reach;
            }
        }
        for &i in near.iter().filter(|i| !touching.contains(i)) {
            let ball = Ball::new(self.state.centers[i].expect("placed"), self.state.radii[i]);
            for (p, c) in candidates.iter_mut().enumerate() {
                *c &= !ball.contains(metric, p);
            }
        }
        for i in self.state.members(Family::Reserved) {
            for &p in &self.state.reserved[i] {
                candidates[p] = false;
            }
        }
        self.update_balls(j, candidates, guesser)
    }

    /// Runs the iteration to completion and returns the output balls, one
    /// per index.
    pub fn run(&mut self, guesser: &mut dyn Guesser) -> Step<Vec<Ball>> {
        'restart: loop {
            if self.cover(guesser)?.is_some() {
                continue 'restart;
            }
            loop {
                let unplaced = self.state.unplaced();
                // Largest radius first, lowest index on ties.
                let Some(&j) = unplaced.iter().fold(None, |best: Option<&usize>, i| match best {
                    Some(b) if self.profile[*b] >= self.profile[*i] => Some(b),
                    _ => Some(i),
                }) else {
                    break 'restart;
                };
                if let InsertOutcome::Restarted(_) = self.place_next(j, guesser)? {
                    continue 'restart;
                }
            }
        }
        Ok(self.output_balls())
    }

    /// The balls reported at the end: covering and grown balls are widened
    /// by the rule, reserved balls keep their radius.
    pub fn output_balls(&self) -> Vec<Ball> {
        (0..self.k())
            .map(|i| {
                let c = self.state.centers[i].expect("every index placed");
                let radius = match self.state.family[i].expect("every index placed") {
                    Family::Reserved => self.state.radii[i],
                    f => self.rule.reach(f, self.profile[i]),
                };
                Ball::new(c, radius)
            })
            .collect()
    }

    /// Verifies every assertable invariant of the current state.
    pub fn check(&mut self) -> Step<()> {
        self.stats.checked_transitions += 1;
        let violation = |msg: String| Err(NonUniformFailure::Invariant(msg));
        let s = &self.state;
        let n = self.inst.n();
        let metric = &self.inst.metric;
        let mut owner = vec![None; n];
        for i in 0..self.k() {
            if s.pinned[i] && s.family[i] != Some(Family::Cover) {
                return violation(format!("pinned index {i} is not a covering ball"));
            }
            let Some(family) = s.family[i] else {
                continue;
            };
            let c = s.centers[i].expect("placed index has a center");
            if let Some(other) = owner[c].replace(i) {
                return violation(format!("indices {other} and {i} share center {c}"));
            }
            let r = self.profile[i];
            let radius = s.radii[i];
            let ok = match family {
                Family::Cover if s.pinned[i] => radius == r,
                Family::Cover => within(radius, 3.0 * r),
                Family::Grown => within(radius, self.rule.grown_cap() * r),
                Family::Reserved => within(radius, r),
            };
            if !ok {
                return violation(format!("index {i} has radius {radius} above its cap"));
            }
            if family != Family::Reserved && !s.reserved[i].is_empty() {
                return violation(format!("index {i} keeps a private set outside the reserved family"));
            }
        }
        let mut claimed = vec![false; n];
        for i in s.members(Family::Reserved) {
            let c = s.centers[i].expect("placed");
            for &p in &s.reserved[i] {
                if std::mem::replace(&mut claimed[p], true) {
                    return violation(format!("point {p} is private to two reserved balls"));
                }
                if metric.d(c, p) > s.radii[i] {
                    return violation(format!("private point {p} lies outside ball {i}"));
                }
            }
        }
        let grown_min = s
            .members(Family::Grown)
            .into_iter()
            .map(|i| self.profile[i])
            .fold(f64::INFINITY, f64::min);
        if let Some(i) = s.unplaced().into_iter().find(|&i| self.profile[i] > grown_min) {
            return violation(format!(
                "unplaced index {i} has a larger radius than a grown ball"
            ));
        }
        if self.stats.insert_calls > self.insert_limit() {
            return Err(NonUniformFailure::Guard(format!(
                "{} ball insertions exceed the limit {}",
                self.stats.insert_calls,
                self.insert_limit()
            )));
        }
        if self.stats.restarts > self.k() {
            return Err(NonUniformFailure::Guard(format!(
                "{} restarts exceed k = {}",
                self.stats.restarts,
                self.k()
            )));
        }
        Ok(())
    }
}

/// Assigns every point to a ball containing it without exceeding the
/// capacity of the ball's center.
pub fn extract_assignment(inst: &Instance, balls: &[Ball]) -> Option<Clustering> {
    let n = inst.n();
    let admissible = (0..n)
        .map(|p| {
            (0..balls.len())
                .filter(|&j| balls[j].contains(&inst.metric, p))
                .collect()
        })
        .collect();
    let assignment = feasible_assignment(&AssignmentProblem {
        point_count: n,
        sink_count: balls.len(),
        admissible,
        sink_caps: balls.iter().map(|b| inst.capacities[b.center]).collect(),
    })?;
    let mut members = vec![Vec::new(); balls.len()];
    for (p, j) in assignment.into_iter().enumerate() {
        members[j].push(p);
    }
    Some(Clustering {
        centers: balls.iter().map(|b| b.center).collect(),
        members,
        nominal_radii: balls.iter().map(|b| b.radius).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonUniformReport {
    pub clustering: Option<Clustering>,
    pub failure: Option<NonUniformFailure>,
    pub stats: IterationStats,
}

/// One randomized iteration for arbitrary capacities.
pub fn nonuniform_iteration(
    inst: &Instance,
    profile: &[f64],
    rule: RadiusRule,
    guesser: &mut dyn Guesser,
) -> Result<NonUniformReport> {
    let mut run = NonUniformRun::new(inst, profile, rule)?;
    let outcome = run.run(guesser).and_then(|balls| {
        extract_assignment(inst, &balls).ok_or(NonUniformFailure::Infeasible)
    });
    Ok(match outcome {
        Ok(clustering) => NonUniformReport {
            clustering: Some(clustering),
            failure: None,
            stats: run.stats,
        },
        Err(failure) => NonUniformReport {
            clustering: None,
            failure: Some(failure),
            stats: run.stats,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guess::{seeded_guesser, ScriptedGuesser};
    use crate::model::{evaluate, validate_solution, Objective};

    fn line(xs: &[f64], caps: Vec<u64>, k: usize) -> Instance {
        let pts = xs.iter().map(|&x| vec![x]).collect();
        Instance::euclidean(pts, caps, k, Objective::Sum).unwrap()
    }

    #[test]
    fn optimal_alpha_balances_the_arms() {
        let a = optimal_alpha();
        assert!((3.0 * (1.0 + 2.0 * a) - (5.0 + 2.0 / a)).abs() < 1e-9);
        assert!((tradeoff_bound(a) - (4.0 + 13f64.sqrt())).abs() < 1e-9);
        assert!(tradeoff_bound(a - 0.05) > tradeoff_bound(a));
        assert!(tradeoff_bound(a + 0.05) > tradeoff_bound(a));
    }

    #[test]
    fn alpha_one_keeps_factor_nine() {
        assert_eq!(RadiusRule::tradeoff(1.0).unwrap().factor(), 9.0);
        assert_eq!(RadiusRule::Base.factor(), 9.0);
        assert!(RadiusRule::tradeoff(0.0).is_err());
        assert!(RadiusRule::tradeoff(1.5).is_err());
    }

    #[test]
    fn fresh_insert_places_a_covering_ball() {
        let inst = line(&[0.0, 1.0, 2.0], vec![3; 3], 2);
        let profile = [1.0, 1.0];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new().coins([true]);
        let out = run.insert_ball(1, 0, 3.0, Family::Cover, &mut g).unwrap();
        assert_eq!(out, InsertOutcome::Placed(Family::Cover));
        assert_eq!(run.state.members(Family::Cover), vec![0]);
        assert_eq!(run.state.unplaced(), vec![1]);
    }

    #[test]
    fn two_pins_reset_the_other_families() {
        let inst = line(&[0.0, 1.0, 2.0, 3.0], vec![4; 4], 3);
        let profile = [1.0, 1.0, 1.0];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new().coins([true, false, false]).indices([0, 1]);
        run.insert_ball(0, 2, 3.0, Family::Cover, &mut g).unwrap();
        assert_eq!(
            run.insert_ball(1, 1, 1.0, Family::Reserved, &mut g).unwrap(),
            InsertOutcome::Restarted(0)
        );
        // pinned {0}; the next pin picks among {1, 2} -> index 2.
        assert_eq!(
            run.insert_ball(3, 1, 1.0, Family::Grown, &mut g).unwrap(),
            InsertOutcome::Restarted(2)
        );
        assert_eq!(run.state.pinned, vec![true, false, true]);
        assert!(run.state.members(Family::Grown).is_empty());
        assert!(run.state.members(Family::Reserved).is_empty());
        assert_eq!(run.state.members(Family::Cover), vec![0, 2]);
        assert_eq!(run.state.radii[2], 1.0);
    }

    #[test]
    fn inserting_at_a_center_is_a_violation() {
        let inst = line(&[0.0, 1.0], vec![2; 2], 2);
        let profile = [1.0, 1.0];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new().coins([true]);
        run.insert_ball(0, 0, 3.0, Family::Cover, &mut g).unwrap();
        let err = run.insert_ball(0, 1, 3.0, Family::Cover, &mut g).unwrap_err();
        assert!(err.is_violation());
    }

    #[test]
    fn empty_guess_reserves_the_ball() {
        // Index 0 covers everything from point 0; index 1 then becomes a
        // reserved ball around the best point of its candidate set.
        let inst = line(&[0.0, 1.0, 2.0], vec![3, 1, 1], 2);
        let profile = [1.0, 0.5];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new()
            .coins([true, true])
            .indices([0])
            .subsets([vec![], vec![]]);
        run.cover(&mut g).unwrap();
        let out = run.place_next(1, &mut g).unwrap();
        assert_eq!(out, InsertOutcome::Placed(Family::Reserved));
        // candidates exclude the untouched covering ball B(0, 3) = everything,
        // so the private set is empty.
        assert!(run.state.reserved[1].is_empty());
    }

    #[test]
    fn reserved_ball_keeps_its_private_points() {
        let inst = line(&[0.0, 10.0, 10.5], vec![1, 2, 2], 2);
        let profile = [0.5, 0.5];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new().coins([true]).subsets([vec![]]);
        let candidates = vec![false, true, true];
        let out = run.update_balls(0, candidates, &mut g).unwrap();
        assert_eq!(out, InsertOutcome::Placed(Family::Reserved));
        // point 1 serves min(2, 2) = 2, the first maximiser
        assert_eq!(run.state.centers[0], Some(1));
        assert_eq!(run.state.reserved[0], vec![1, 2]);
    }

    #[test]
    fn larger_interfering_index_is_grown() {
        let inst = line(&[0.0, 1.0, 2.0, 3.0], vec![2, 2, 3, 2], 2);
        let profile = [2.0, 0.5];
        let mut run = NonUniformRun::new(&inst, &profile, RadiusRule::Base).unwrap();
        let mut g = ScriptedGuesser::new().coins([true, true]);
        run.insert_ball(0, 0, 2.0, Family::Reserved, &mut g).unwrap();
        run.state.reserved[0] = vec![0];
        g = g.subsets([vec![0]]);
        let out = run.update_balls(1, vec![false, true, true, true], &mut g).unwrap();
        assert_eq!(out, InsertOutcome::Placed(Family::Grown));
        assert_eq!(run.state.family[0], Some(Family::Grown));
        assert_eq!(run.state.radii[0], 10.0);
        let y = run.state.centers[0].unwrap();
        assert!(y != 0 && inst.metric.d(y, 1) <= 2.5);
        assert!(run.state.reserved[0].is_empty());
    }

    #[test]
    fn extraction_with_optimal_balls_matches_opt() {
        let inst = line(&[0.0, 1.0, 2.0, 10.0], vec![3, 3, 3, 1], 2);
        let balls = [Ball::new(1, 1.0), Ball::new(3, 0.0)];
        let sol = extract_assignment(&inst, &balls).unwrap();
        assert_eq!(evaluate(&inst, &sol, true).unwrap(), 1.0);
        assert!(extract_assignment(&inst, &[Ball::new(1, 1.0), Ball::new(2, 0.5)]).is_none());
    }

    #[test]
    fn coincident_points_cost_nothing() {
        let inst = line(&[4.0; 4], vec![1, 1, 2, 3], 2);
        let profile = [0.0, 0.0];
        for seed in 0..200 {
            let mut g = seeded_guesser(seed, 0);
            let r = nonuniform_iteration(&inst, &profile, RadiusRule::default(), &mut g).unwrap();
            if let Some(sol) = r.clustering {
                assert_eq!(evaluate(&inst, &sol, false).unwrap(), 0.0);
                return;
            }
        }
        panic!("no success in 200 iterations");
    }

    #[test]
    fn random_iterations_never_violate_anything() {
        let xs: Vec<f64> = (0..10).map(|i| (i * 7 % 10) as f64 * 0.9).collect();
        let caps: Vec<u64> = (0..10).map(|i| 1 + (i * 3 % 5) as u64).collect();
        let inst = line(&xs, caps, 3);
        let profile = [2.0, 1.0, 1.0];
        for rule in [RadiusRule::Base, RadiusRule::default()] {
            for seed in 0..300 {
                let mut g = seeded_guesser(seed, 1);
                let r = nonuniform_iteration(&inst, &profile, rule, &mut g).unwrap();
                if let Some(f) = &r.failure {
                    assert!(!f.is_violation(), "{f:?}");
                }
                assert!(r.stats.max_update_turns <= 3);
                if let Some(sol) = r.clustering {
                    assert!(validate_solution(&inst, &sol).is_clean());
                }
            }
        }
    }
}
