//! Candidate radii profiles.
//!
//! A profile is a guessed radius per cluster index. The emitted family is
//! guaranteed to contain, for the unknown optimal radii `r*`, a profile `r`
//! with `r_j >= r*_j` for every `j` and `Σ r_j <= (1+ε) Σ r*_j`.
//!
//! Construction: every distinct pairwise distance `R` (including 0) is tried
//! as the largest optimal radius. Each coordinate then ranges over the grid
//! `{0} ∪ {(εR/k)(1+ε)^t < R : t = 0, 1, ...} ∪ {R}` and only tuples whose
//! maximum equals `R` are emitted. Since the largest optimal radius is itself
//! a distance, the dominating tuple takes it exactly; every other coordinate
//! loses at most a factor `1+ε` or an additive `εR/k`. Tuples for different
//! `R` have different maxima, so the family has no duplicates.

use crate::error::{Error, Result};
use crate::model::{Instance, Objective};

#[derive(Clone, Debug, PartialEq)]
pub struct RadiiProfile {
    pub radii: Vec<f64>,
}

impl RadiiProfile {
    pub fn new(radii: Vec<f64>) -> Self {
        RadiiProfile { radii }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn value(&self, objective: Objective) -> f64 {
        objective.aggregate(&self.radii)
    }

    /// Coordinate-wise `self >= other`.
    pub fn dominates(&self, other: &[f64]) -> bool {
        self.radii.len() == other.len() && self.radii.iter().zip(other).all(|(a, b)| a >= b)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("eps must be a positive real, got {eps}")))
    }
}

/// The per-scale grid, ascending, ending with `scale` itself.
pub fn scale_grid(scale: f64, k: usize, eps: f64) -> Vec<f64> {
    if scale == 0.0 {
        return vec![0.0];
    }
    let steps = ((k as f64 / eps).ln() / eps.ln_1p()).ceil().max(0.0) as i32;
    let base = eps * scale / k as f64;
    let mut grid = vec![0.0];
    grid.extend(
        (0..=steps)
            .map(|t| base * (1.0 + eps).powi(t))
            .filter(|&g| g < scale),
    );
    grid.push(scale);
    grid
}

/// Lazily enumerates the profile family. Order: scales ascending, then
/// tuples lexicographically by grid position.
pub fn enumerate_profiles(inst: &Instance, eps: f64) -> Result<ProfileIter> {
    check_eps(eps)?;
    Ok(ProfileIter {
        scales: inst.metric.distinct_distances(),
        next_scale: 0,
        k: inst.k,
        eps,
        grid: Vec::new(),
        odometer: Vec::new(),
    })
}

/// Number of profiles [`enumerate_profiles`] yields, computed per scale
/// without materialising any tuple.
pub fn profile_count(inst: &Instance, eps: f64) -> Result<u128> {
    check_eps(eps)?;
    let k = inst.k as u32;
    Ok(inst
        .metric
        .distinct_distances()
        .into_iter()
        .map(|scale| {
            let g = scale_grid(scale, inst.k, eps).len() as u128;
            g.pow(k) - (g - 1).pow(k)
        })
        .sum())
}

pub struct ProfileIter {
    scales: Vec<f64>,
    next_scale: usize,
    k: usize,
    eps: f64,
    grid: Vec<f64>,
    /// Grid positions of the current tuple; empty when a new scale is due.
    odometer: Vec<usize>,
}

impl ProfileIter {
    fn advance(&mut self) -> bool {
        let top = self.grid.len() - 1;
        for slot in self.odometer.iter_mut().rev() {
            if *slot < top {
                *slot += 1;
                return true;
            }
            *slot = 0;
        }
        false
    }
}

impl Iterator for ProfileIter {
    type Item = RadiiProfile;

    fn next(&mut self) -> Option<RadiiProfile> {
        loop {
            if self.odometer.is_empty() {
                let &scale = self.scales.get(self.next_scale)?;
                self.next_scale += 1;
                self.grid = scale_grid(scale, self.k, self.eps);
                self.odometer = vec![0; self.k];
            } else if !self.advance() {
                self.odometer.clear();
                continue;
            }
            let top = self.grid.len() - 1;
            if self.odometer.contains(&top) {
                return Some(RadiiProfile::new(
                    self.odometer.iter().map(|&i| self.grid[i]).collect(),
                ));
            }
        }
    }
}
