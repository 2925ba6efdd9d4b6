//! Browser demo: generate a blob instance, cluster it, compare against the
//! exact optimum, and plot the radius trade-off curve.
//!
//! [`Demo`] keeps the current instance and clustering on the Rust side; the
//! page reads flat arrays back for drawing.

use capradii::driver::{solve, SolveConfig, Solver};
use capradii::gen::{gen_blobs, CapacityLaw};
use capradii::guess::{seeded_guesser, Guesser};
use capradii::nonuniform::{optimal_alpha, tradeoff_bound, RadiusRule};
use capradii::oracle::{optimal_with, OracleConfig};
use capradii::{Clustering, Instance};
use wasm_bindgen::prelude::*;

/// Keeps the page responsive: larger searches are refused.
const ORACLE_CEILING: u128 = 20_000_000;

#[wasm_bindgen]
#[derive(Default)]
pub struct Demo {
    instance: Option<Instance>,
    clustering: Option<Clustering>,
}

/// Blob centers spread evenly on a circle of radius 40 around (50, 50).
fn blob_centers(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / count as f64;
            vec![50.0 + 40.0 * t.cos(), 50.0 + 40.0 * t.sin()]
        })
        .collect()
}

impl Demo {
    #[allow(clippy::too_many_arguments)]
    pub fn try_generate(&mut self, blobs: usize, per_blob: usize, spread: f64, cap_lo: u64, cap_hi: u64, k: usize, seed: u64) -> Result<(), String> {
        if blobs == 0 || per_blob == 0 {
            return Err("need at least one blob with one point".into());
        }
        // Jitter blob sizes a little so capacities matter.
        let mut g = seeded_guesser(seed, 1);
        let sizes: Vec<usize> = (0..blobs).map(|_| (per_blob / 2).max(1) + g.below(per_blob + 1)).collect();
        let law = if cap_lo == cap_hi {
            CapacityLaw::Constant(cap_lo)
        } else {
            CapacityLaw::Range(cap_lo.min(cap_hi), cap_lo.max(cap_hi))
        };
        let inst = gen_blobs(&blob_centers(blobs), &sizes, spread, law, k, seed).map_err(|e| e.to_string())?;
        self.instance = Some(inst);
        self.clustering = None;
        Ok(())
    }

    pub fn try_solve(&mut self, solver: &str, alpha: f64, eps: f64, budget: u64, seed: u64) -> Result<String, String> {
        let inst = self.instance.as_ref().ok_or("generate an instance first")?;
        let solver = match solver {
            "uniform" => Solver::Uniform,
            "base" => Solver::NonUniform(RadiusRule::Base),
            _ => Solver::NonUniform(RadiusRule::tradeoff(alpha).map_err(|e| e.to_string())?),
        };
        let out = solve(inst, &SolveConfig::new(solver, eps, budget, seed)).map_err(|e| e.to_string())?;
        let s = &out.stats;
        let summary = match &out.best {
            Some(sol) => format!(
                "cost {:.4} (nominal {:.4}, guarantee x{:.3}); {} of {} iterations succeeded over {} profiles",
                sol.tight_cost(inst),
                s.best_nominal.unwrap_or(f64::NAN),
                solver.factor(inst),
                s.successes,
                s.iterations,
                s.profiles_scanned,
            ),
            None => format!("no success in {} iterations; raise the budget", s.iterations),
        };
        self.clustering = out.best;
        Ok(summary)
    }

    pub fn try_optimum(&self) -> Result<f64, String> {
        let inst = self.instance.as_ref().ok_or("generate an instance first")?;
        optimal_with(inst, &OracleConfig { ceiling: ORACLE_CEILING })
            .map(|r| r.opt_cost)
            .map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo::default()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn generate(&mut self, blobs: usize, per_blob: usize, spread: f64, cap_lo: u32, cap_hi: u32, k: usize, seed: u32) -> Result<(), JsError> {
        self.try_generate(blobs, per_blob, spread, cap_lo.into(), cap_hi.into(), k, seed.into())
            .map_err(|e| JsError::new(&e))
    }

    /// `uniform`, `base`, or anything else for the trade-off rule with `alpha`.
    pub fn solve(&mut self, solver: &str, alpha: f64, eps: f64, budget: u32, seed: u32) -> Result<String, JsError> {
        self.try_solve(solver, alpha, eps, budget.into(), seed.into())
            .map_err(|e| JsError::new(&e))
    }

    pub fn optimum(&self) -> Result<f64, JsError> {
        self.try_optimum().map_err(|e| JsError::new(&e))
    }

    /// Interleaved `x, y` coordinates.
    pub fn points(&self) -> Vec<f64> {
        self.instance
            .as_ref()
            .and_then(|i| i.coords.as_ref())
            .map(|c| c.iter().flat_map(|p| [p[0], p[1]]).collect())
            .unwrap_or_default()
    }

    pub fn capacities(&self) -> Vec<u32> {
        self.instance
            .as_ref()
            .map(|i| i.capacities.iter().map(|&c| c.min(u32::MAX as u64) as u32).collect())
            .unwrap_or_default()
    }

    /// Cluster index per point, or -1 before a successful solve.
    pub fn labels(&self) -> Vec<i32> {
        let n = self.instance.as_ref().map_or(0, Instance::n);
        let mut labels = vec![-1; n];
        if let Some(sol) = &self.clustering {
            for (j, members) in sol.members.iter().enumerate() {
                for &p in members {
                    labels[p] = j as i32;
                }
            }
        }
        labels
    }

    pub fn centers(&self) -> Vec<u32> {
        self.clustering
            .as_ref()
            .map(|s| s.centers.iter().map(|&c| c as u32).collect())
            .unwrap_or_default()
    }

    /// Tight radius per cluster.
    pub fn radii(&self) -> Vec<f64> {
        match (&self.instance, &self.clustering) {
            (Some(inst), Some(sol)) => sol.tight_radii(&inst.metric),
            _ => Vec::new(),
        }
    }
}

/// Samples of `(alpha, max(3(1+2α), 5+2/α))` over `[lo, 1]`, interleaved.
#[wasm_bindgen]
pub fn alpha_curve(lo: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples)
        .flat_map(|i| {
            let a = lo + (1.0 - lo) * i as f64 / (samples - 1) as f64;
            [a, tradeoff_bound(a)]
        })
        .collect()
}

#[wasm_bindgen]
pub fn best_alpha() -> f64 {
    optimal_alpha()
}
