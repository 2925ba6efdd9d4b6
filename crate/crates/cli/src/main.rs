//! `capradii`: solvers, oracle, generators and benchmark sweeps.
//!
//! Exit status: 0 on success, 1 when a solution or bound check fails (or no
//! solution was found), 2 on bad usage or unreadable input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use capradii::bench::{parse_config, run_bench};
use capradii::driver::{solve, SolveConfig, SolveOutcome, Solver};
use capradii::format::{parse_graph, parse_instance, parse_solution, write_instance, write_solution};
use capradii::gen::{gen_blobs, reduce_vc, CapacityLaw};
use capradii::model::{evaluate, validate_instance, validate_solution};
use capradii::nonuniform::{optimal_alpha, RadiusRule};
use capradii::oracle::{optimal_with, OracleConfig};
use capradii::profiles::{enumerate_profiles, profile_count};
use capradii::{Instance, Objective};
use clap::{Args, Parser, Subcommand};
use log::info;

#[derive(Parser)]
#[command(name = "capradii", version, about = "Capacitated sum-of-radii clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized approximation for arbitrary capacities.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Radius trade-off parameter in (0, 1].
        #[arg(long, conflicts_with = "base")]
        alpha: Option<f64>,
        /// Use the plain factor-9 radius rule.
        #[arg(long)]
        base: bool,
    },
    /// Randomized approximation for uniform capacities.
    SolveUniform {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact optimum by exhaustive search.
    Oracle {
        #[command(flatten)]
        io: InstanceIo,
        /// Refuse searches estimated above this many feasibility checks.
        #[arg(long, default_value_t = OracleConfig::default().ceiling)]
        ceiling: u128,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// List (or count) the candidate radii profiles of an instance.
    Profiles {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Print only the number of profiles.
        #[arg(long)]
        count: bool,
    },
    /// Validate a solution against an instance.
    Check {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a benchmark config and write CSV.
    Bench {
        config: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the wall_ms column (makes the CSV machine-dependent).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Vertex-cover hardness gadget from a graph file.
    Vc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Points sampled around blob centers.
    Blobs {
        /// Blob centers, e.g. `0,0;10,0`.
        #[arg(long)]
        centers: String,
        /// Points per blob, e.g. `5,5`.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        /// `const:U` or `range:LO:HI`.
        #[arg(long)]
        caps: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<Objective>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InstanceIo {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Objective override: `L1` or a real p >= 1.
    #[arg(long)]
    p: Option<Objective>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    io: InstanceIo,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Iterations per radii profile.
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure of a check rather than of the invocation.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn violation(msg: impl Into<String>) -> anyhow::Error {
    Violation(msg.into()).into()
}

fn read_instance(path: &Path, p: Option<Objective>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match p {
        Some(obj) => inst.with_objective(obj),
        None => inst,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_solver(run: &RunArgs, solver: Solver) -> Result<()> {
    let inst = read_instance(&run.io.input, run.io.p)?;
    let out = solve(&inst, &SolveConfig::new(solver, run.eps, run.budget, run.seed))?;
    print!("{}", report(&inst, solver, &out));
    let best = out
        .best
        .ok_or_else(|| violation("no iteration succeeded; raise --budget or try another --seed"))?;
    write_file(&run.io.out, &write_solution(&best))
}

fn report(inst: &Instance, solver: Solver, out: &SolveOutcome) -> String {
    let s = &out.stats;
    let mut r = String::new();
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
    writeln!(r, "points: {}", inst.n()).unwrap();
    writeln!(r, "clusters: {}", inst.k).unwrap();
    writeln!(r, "objective: {}", inst.objective).unwrap();
    writeln!(r, "guarantee_factor: {}", solver.factor(inst)).unwrap();
    writeln!(r, "profiles_total: {}", s.profiles_total).unwrap();
    writeln!(r, "profiles_scanned: {}", s.profiles_scanned).unwrap();
    writeln!(r, "profiles_skipped: {}", s.profiles_skipped).unwrap();
    writeln!(r, "iterations: {}", s.iterations).unwrap();
    writeln!(r, "successes: {}", s.successes).unwrap();
    writeln!(r, "invalid_outputs: {}", s.invalid_outputs).unwrap();
    writeln!(r, "aborted_iterations: {}", s.violations).unwrap();
    writeln!(r, "best_nominal_cost: {}", opt(s.best_nominal)).unwrap();
    writeln!(r, "best_cost: {}", opt(s.best_tight)).unwrap();
    if let Some(p) = &s.best_profile {
        let radii: Vec<String> = p.iter().map(f64::to_string).collect();
        writeln!(r, "best_profile: {}", radii.join(" ")).unwrap();
    }
    r
}

fn parse_blob_centers(spec: &str) -> Result<Vec<Vec<f64>>> {
    spec.split(';')
        .map(|c| {
            c.split(',')
                .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad coordinate `{x}`")))
                .collect()
        })
        .collect()
}

fn parse_law(spec: &str) -> Result<CapacityLaw> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["const", u] => Ok(CapacityLaw::Constant(u.parse()?)),
        ["range", lo, hi] => Ok(CapacityLaw::Range(lo.parse()?, hi.parse()?)),
        _ => Err(anyhow!("--caps must be `const:U` or `range:LO:HI`, got `{spec}`")),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { run, alpha, base } => {
            let rule = if base {
                RadiusRule::Base
            } else {
                RadiusRule::tradeoff(alpha.unwrap_or_else(optimal_alpha))?
            };
            run_solver(&run, Solver::NonUniform(rule))
        }
        Command::SolveUniform { run } => run_solver(&run, Solver::Uniform),
        Command::Oracle { io, ceiling } => {
            let inst = read_instance(&io.input, io.p)?;
            let res = optimal_with(&inst, &OracleConfig { ceiling })?;
            println!("opt_cost: {}", res.opt_cost);
            println!("feasibility_checks: {}", res.checks);
            write_file(&io.out, &write_solution(&res.witness))
        }
        Command::Gen(GenCommand::Vc { graph, out }) => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let g = parse_graph(&text).with_context(|| format!("parsing {}", graph.display()))?;
            let (inst, layout) = reduce_vc(&g)?;
            info!("gadget star point {}, k = {}", layout.star, layout.k);
            write_file(&out, &write_instance(&inst))
        }
        Command::Gen(GenCommand::Blobs {
            centers,
            sizes,
            spread,
            caps,
            k,
            seed,
            p,
            out,
        }) => {
            let centers = parse_blob_centers(&centers)?;
            let sizes = sizes
                .split(',')
                .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad size `{s}`")))
                .collect::<Result<Vec<_>>>()?;
            let mut inst = gen_blobs(&centers, &sizes, spread, parse_law(&caps)?, k, seed)?;
            if let Some(obj) = p {
                inst = inst.with_objective(obj);
            }
            write_file(&out, &write_instance(&inst))
        }
        Command::Profiles { input, eps, count } => {
            let inst = read_instance(&input, None)?;
            if count {
                println!("{}", profile_count(&inst, eps)?);
            } else {
                for p in enumerate_profiles(&inst, eps)? {
                    let radii: Vec<String> = p.radii.iter().map(f64::to_string).collect();
                    println!("{}", radii.join(" "));
                }
            }
            Ok(())
        }
        Command::Check { solution, input } => {
            let inst = read_instance(&input, None)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let sol = parse_solution(&text).with_context(|| format!("parsing {}", solution.display()))?;
            let inst_report = validate_instance(&inst);
            if !inst_report.is_clean() {
                println!("instance: {inst_report}");
            }
            let report = validate_solution(&inst, &sol);
            println!("solution: {report}");
            if !report.is_clean() {
                return Err(violation("solution failed validation"));
            }
            println!("nominal_cost: {}", evaluate(&inst, &sol, false)?);
            println!("tight_cost: {}", evaluate(&inst, &sol, true)?);
            Ok(())
        }
        Command::Bench { config, out, timing } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let cells = parse_config(&text, base).with_context(|| format!("parsing {}", config.display()))?;
            let report = run_bench(&cells, timing)?;
            let csv = report.to_csv()?;
            match out {
                Some(path) => write_file(&path, &csv)?,
                None => print!("{csv}"),
            }
            if report.violations.is_empty() {
                Ok(())
            } else {
                for v in &report.violations {
                    eprintln!("violation: {v}");
                }
                Err(violation(format!("{} cell check(s) failed", report.violations.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Violation>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
