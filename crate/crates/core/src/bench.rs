//! Config-driven sweeps that check approximation ratios against the oracle.
//!
//! A config is a sequence of cells separated by blank lines; each line of a
//! cell is `key = value` and `#` starts a comment:
//!
//! ```text
//! id = two-blobs
//! blobs = 0,0; 10,0      # or: instance = path/to/file
//! sizes = 5,5
//! spread = 0.5
//! caps = const:5         # or: range:1:10
//! k = 2
//! gen_seed = 7
//! solver = uniform       # uniform | nonuniform | base
//! eps = 0.1
//! alpha = 0.7676
//! budget = 2000
//! seed = 1
//! p = 2                  # objective override
//! oracle = true
//! ceiling = 100000000
//! bound = 3.3
//! ```

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::driver::{solve, SolveConfig, Solver};
use crate::error::{Error, Result};
use crate::format::parse_instance;
use crate::gen::{gen_blobs, CapacityLaw};
use crate::model::{validate_solution, Instance, Objective};
use crate::nonuniform::{optimal_alpha, RadiusRule};
use crate::oracle::{optimal_with, OracleConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum CellSource {
    File(PathBuf),
    Blobs {
        centers: Vec<Vec<f64>>,
        sizes: Vec<usize>,
        spread: f64,
        law: CapacityLaw,
        k: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Uniform,
    NonUniform,
    Base,
}

impl SolverKind {
    fn name(self) -> &'static str {
        match self {
            SolverKind::Uniform => "uniform",
            SolverKind::NonUniform => "nonuniform",
            SolverKind::Base => "base",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchCell {
    pub id: String,
    pub source: CellSource,
    pub solver: SolverKind,
    pub eps: f64,
    pub alpha: f64,
    pub budget: u64,
    pub seed: u64,
    pub objective: Option<Objective>,
    pub oracle: bool,
    pub ceiling: u128,
    pub bound: Option<f64>,
}

fn parse_list<T: std::str::FromStr>(line: usize, value: &str, what: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("cannot parse {what} `{}`", t.trim())))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(line: usize, value: &str, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{key}` value `{value}`")))
}

fn parse_law(line: usize, value: &str) -> Result<CapacityLaw> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        ["const", u] => Ok(CapacityLaw::Constant(parse_value(line, u, "caps")?)),
        ["range", lo, hi] => Ok(CapacityLaw::Range(
            parse_value(line, lo, "caps")?,
            parse_value(line, hi, "caps")?,
        )),
        _ => Err(Error::parse(line, format!("caps must be `const:U` or `range:LO:HI`, got `{value}`"))),
    }
}

/// Parses a config. Relative instance paths are resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<Vec<BenchCell>> {
    let mut cells = Vec::new();
    let mut block: Vec<(usize, String, String)> = Vec::new();
    let lines = text.lines().map(Some).chain(std::iter::once(None));
    for (i, line) in lines.enumerate() {
        let content = line.map(|l| l.split('#').next().unwrap_or("").trim());
        match content {
            Some("") if line.is_some_and(|l| !l.trim().is_empty()) => {}
            Some("") | None => {
                if !block.is_empty() {
                    cells.push(build_cell(&block, base)?);
                    block.clear();
                }
            }
            Some(c) => {
                let Some((key, value)) = c.split_once('=') else {
                    return Err(Error::parse(i + 1, format!("expected `key = value`, got `{c}`")));
                };
                block.push((i + 1, key.trim().to_string(), value.trim().to_string()));
            }
        }
    }
    Ok(cells)
}

fn build_cell(block: &[(usize, String, String)], base: &Path) -> Result<BenchCell> {
    let first_line = block[0].0;
    let mut id = None;
    let mut instance = None;
    let (mut centers, mut sizes, mut spread, mut law, mut k, mut gen_seed) =
        (None, None, 0.0, None, None, 0u64);
    let mut cell = BenchCell {
        id: String::new(),
        source: CellSource::File(PathBuf::new()),
        solver: SolverKind::NonUniform,
        eps: 0.1,
        alpha: optimal_alpha(),
        budget: 1000,
        seed: 0,
        objective: None,
        oracle: false,
        ceiling: OracleConfig::default().ceiling,
        bound: None,
    };
    for (line, key, value) in block {
        let line = *line;
        match key.as_str() {
            "id" => id = Some(value.clone()),
            "instance" => instance = Some(base.join(value)),
            "blobs" => {
                centers = Some(
                    value
                        .split(';')
                        .map(|c| parse_list::<f64>(line, c, "coordinate"))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "sizes" => sizes = Some(parse_list::<usize>(line, value, "size")?),
            "spread" => spread = parse_value(line, value, key)?,
            "caps" => law = Some(parse_law(line, value)?),
            "k" => k = Some(parse_value::<usize>(line, value, key)?),
            "gen_seed" => gen_seed = parse_value(line, value, key)?,
            "solver" => {
                cell.solver = match value.as_str() {
                    "uniform" => SolverKind::Uniform,
                    "nonuniform" => SolverKind::NonUniform,
                    "base" => SolverKind::Base,
                    other => return Err(Error::parse(line, format!("unknown solver `{other}`"))),
                }
            }
            "eps" => cell.eps = parse_value(line, value, key)?,
            "alpha" => cell.alpha = parse_value(line, value, key)?,
            "budget" => cell.budget = parse_value(line, value, key)?,
            "seed" => cell.seed = parse_value(line, value, key)?,
            "p" => {
                cell.objective =
                    Some(value.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?)
            }
            "oracle" => cell.oracle = parse_value(line, value, key)?,
            "ceiling" => cell.ceiling = parse_value(line, value, key)?,
            "bound" => cell.bound = Some(parse_value(line, value, key)?),
            other => return Err(Error::parse(line, format!("unknown key `{other}`"))),
        }
    }
    cell.id = id.ok_or_else(|| Error::parse(first_line, "cell has no `id`"))?;
    cell.source = match (instance, centers) {
        (Some(path), None) => CellSource::File(path),
        (None, Some(centers)) => CellSource::Blobs {
            sizes: sizes.ok_or_else(|| Error::parse(first_line, "blob cell needs `sizes`"))?,
            law: law.ok_or_else(|| Error::parse(first_line, "blob cell needs `caps`"))?,
            k: k.ok_or_else(|| Error::parse(first_line, "blob cell needs `k`"))?,
            centers,
            spread,
            seed: gen_seed,
        },
        _ => {
            return Err(Error::parse(
                first_line,
                "cell needs exactly one of `instance` or `blobs`",
            ))
        }
    };
    Ok(cell)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub solver: String,
    pub eps: f64,
    pub alpha: Option<f64>,
    pub budget: u64,
    pub seed: u64,
    pub best_cost: Option<f64>,
    pub oracle_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub iterations: u64,
    pub successes: u64,
    pub wall_ms: Option<u128>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// One message per breached cell; non-empty means the sweep failed.
    pub violations: Vec<String>,
}

pub const CSV_COLUMNS: [&str; 12] = [
    "instance",
    "solver",
    "eps",
    "alpha",
    "budget",
    "seed",
    "best_cost",
    "oracle_cost",
    "ratio",
    "iterations",
    "successes",
    "wall_ms",
];

impl BenchReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::param(format!("csv: {e}"));
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.instance.clone(),
                r.solver.clone(),
                r.eps.to_string(),
                opt(r.alpha),
                r.budget.to_string(),
                r.seed.to_string(),
                opt(r.best_cost),
                opt(r.oracle_cost),
                opt(r.ratio),
                r.iterations.to_string(),
                r.successes.to_string(),
                r.wall_ms.map(|t| t.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::param(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn load(cell: &BenchCell) -> Result<Instance> {
    let inst = match &cell.source {
        CellSource::File(path) => parse_instance(&std::fs::read_to_string(path)?)?,
        CellSource::Blobs {
            centers,
            sizes,
            spread,
            law,
            k,
            seed,
        } => gen_blobs(centers, sizes, *spread, *law, *k, *seed)?,
    };
    Ok(match cell.objective {
        Some(obj) => inst.with_objective(obj),
        None => inst,
    })
}

/// Runs one cell; `Err` only for unusable input, breaches go into the
/// returned messages.
pub fn run_cell(cell: &BenchCell, timing: bool) -> Result<(BenchRow, Vec<String>)> {
    let inst = load(cell)?;
    let solver = match cell.solver {
        SolverKind::Uniform => Solver::Uniform,
        SolverKind::NonUniform => Solver::NonUniform(RadiusRule::tradeoff(cell.alpha)?),
        SolverKind::Base => Solver::NonUniform(RadiusRule::Base),
    };
    let start = Instant::now();
    let out = solve(&inst, &SolveConfig::new(solver, cell.eps, cell.budget, cell.seed))?;
    let wall_ms = start.elapsed().as_millis();
    let mut violations = Vec::new();
    let id = &cell.id;
    if out.stats.invalid_outputs > 0 || out.stats.violations > 0 {
        violations.push(format!(
            "{id}: {} invalid outputs, {} aborted iterations",
            out.stats.invalid_outputs, out.stats.violations
        ));
    }
    let best_cost = match &out.best {
        Some(sol) => {
            let report = validate_solution(&inst, sol);
            if !report.is_clean() {
                violations.push(format!("{id}: {report}"));
            }
            Some(sol.tight_cost(&inst))
        }
        None => {
            violations.push(format!("{id}: no solution found"));
            None
        }
    };
    let oracle_cost = if cell.oracle {
        Some(optimal_with(&inst, &OracleConfig { ceiling: cell.ceiling })?.opt_cost)
    } else {
        None
    };
    let ratio = match (best_cost, oracle_cost) {
        (Some(b), Some(o)) if o > 0.0 => Some(b / o),
        (Some(b), Some(_)) => Some(if b > 0.0 { f64::INFINITY } else { 1.0 }),
        _ => None,
    };
    if let Some(r) = ratio {
        if r < 1.0 - 1e-9 {
            violations.push(format!("{id}: ratio {r} below 1, the oracle is wrong"));
        }
        if let Some(bound) = cell.bound {
            if r > bound {
                violations.push(format!("{id}: ratio {r} exceeds bound {bound}"));
            }
        }
    }
    let row = BenchRow {
        instance: id.clone(),
        solver: cell.solver.name().to_string(),
        eps: cell.eps,
        alpha: (cell.solver == SolverKind::NonUniform).then_some(cell.alpha),
        budget: cell.budget,
        seed: cell.seed,
        best_cost,
        oracle_cost,
        ratio,
        iterations: out.stats.iterations,
        successes: out.stats.successes,
        wall_ms: timing.then_some(wall_ms),
    };
    Ok((row, violations))
}

/// Runs every cell, in parallel when available; rows keep config order.
pub fn run_bench(cells: &[BenchCell], timing: bool) -> Result<BenchReport> {
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        cells.par_iter().map(|c| run_cell(c, timing)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = cells.iter().map(|c| run_cell(c, timing)).collect();
    let mut report = BenchReport::default();
    for r in results {
        let (row, violations) = r?;
        report.rows.push(row);
        report.violations.extend(violations);
    }
    Ok(report)
}
