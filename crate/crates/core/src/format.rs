//! Text formats for instances, solutions and graphs.
//!
//! Instance:
//!
//! ```text
//! capradii-instance v1
//! n k p            # p is `L1` or a real >= 1
//! U_0 ... U_{n-1}  # may span several lines
//! matrix           # followed by n rows of n reals
//! euclidean D      # ... or by n rows of D coordinates
//! ```
//!
//! Solution: `capradii-solution v1`, then one line per cluster:
//! `center radius member-count member-ids...`.
//!
//! Graph: `n m`, then `m` lines `u v` (0-indexed).
//!
//! Blank lines and `#` comments are ignored everywhere. Reals are written in
//! their shortest round-trip form.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gen::VcGraph;
use crate::model::{Clustering, Instance, MetricSpace, Objective};

pub const INSTANCE_HEADER: &str = "capradii-instance v1";
pub const SOLUTION_HEADER: &str = "capradii-solution v1";

type TokenLines<'a> = Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>;

/// Tokens of the non-empty lines, with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<TokenLines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
                .filter(|(_, t)| !t.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last_line: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((line, toks)) => {
                self.last_line = line;
                Ok((line, toks))
            }
            None => Err(Error::parse(self.last_line + 1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }
}

fn number<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {what} `{tok}`")))
}

fn expect_len(line: usize, toks: &[&str], n: usize, what: &str) -> Result<()> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(Error::parse(line, format!("expected {n} {what}, found {}", toks.len())))
    }
}

fn header(lines: &mut Lines<'_>, expected: &str) -> Result<()> {
    let (line, toks) = lines.next("header")?;
    if toks.join(" ") != expected {
        return Err(Error::parse(line, format!("expected header `{expected}`")));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    header(&mut lines, INSTANCE_HEADER)?;
    let (line, toks) = lines.next("`n k p`")?;
    expect_len(line, &toks, 3, "fields in `n k p`")?;
    let n: usize = number(line, toks[0], "point count")?;
    let k: usize = number(line, toks[1], "cluster count")?;
    let objective = Objective::from_str(toks[2]).map_err(|e| Error::parse(line, e.to_string()))?;

    let mut capacities = Vec::with_capacity(n);
    while capacities.len() < n {
        let (line, toks) = lines.next("capacities")?;
        if capacities.len() + toks.len() > n {
            return Err(Error::parse(line, format!("more than {n} capacities")));
        }
        for t in toks {
            capacities.push(number::<u64>(line, t, "capacity")?);
        }
    }

    let (line, toks) = lines.next("`matrix` or `euclidean D`")?;
    let shape = |line| Error::parse(line, "expected `matrix` or `euclidean D`");
    let (metric, coords) = match toks.as_slice() {
        ["matrix"] => {
            let mut rows = Vec::with_capacity(n);
            for _ in 0..n {
                let (line, toks) = lines.next("distance row")?;
                expect_len(line, &toks, n, "distances")?;
                rows.push(
                    toks.iter()
                        .map(|t| number::<f64>(line, t, "distance"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            (MetricSpace::from_matrix(rows).map_err(|e| Error::parse(line, e.to_string()))?, None)
        }
        ["euclidean", dim] => {
            let dim: usize = number(line, dim, "dimension")?;
            let mut pts = Vec::with_capacity(n);
            for _ in 0..n {
                let (line, toks) = lines.next("coordinate row")?;
                expect_len(line, &toks, dim, "coordinates")?;
                pts.push(
                    toks.iter()
                        .map(|t| number::<f64>(line, t, "coordinate"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            (MetricSpace::euclidean(&pts).map_err(|e| Error::parse(line, e.to_string()))?, Some(pts))
        }
        _ => return Err(shape(line)),
    };
    if !lines.is_done() {
        let (line, _) = lines.next("")?;
        return Err(Error::parse(line, "trailing content"));
    }
    let mut inst = Instance::new(metric, capacities, k, objective).map_err(|e| Error::parse(2, e.to_string()))?;
    inst.coords = coords;
    Ok(inst)
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Euclidean instances keep their coordinates; others are written as a
/// matrix.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let n = inst.n();
    writeln!(out, "{INSTANCE_HEADER}").unwrap();
    writeln!(out, "{n} {} {}", inst.k, inst.objective).unwrap();
    writeln!(out, "{}", join(&inst.capacities)).unwrap();
    match &inst.coords {
        Some(pts) => {
            writeln!(out, "euclidean {}", pts.first().map_or(0, Vec::len)).unwrap();
            for p in pts {
                writeln!(out, "{}", join(p)).unwrap();
            }
        }
        None => {
            writeln!(out, "matrix").unwrap();
            for a in 0..n {
                writeln!(out, "{}", join(inst.metric.row(a))).unwrap();
            }
        }
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Clustering> {
    let mut lines = Lines::new(text);
    header(&mut lines, SOLUTION_HEADER)?;
    let mut sol = Clustering {
        centers: Vec::new(),
        members: Vec::new(),
        nominal_radii: Vec::new(),
    };
    while !lines.is_done() {
        let (line, toks) = lines.next("cluster")?;
        if toks.len() < 3 {
            return Err(Error::parse(line, "expected `center radius member-count member-ids...`"));
        }
        let count: usize = number(line, toks[2], "member count")?;
        expect_len(line, &toks[3..], count, "member ids")?;
        sol.centers.push(number(line, toks[0], "center")?);
        sol.nominal_radii.push(number(line, toks[1], "radius")?);
        sol.members.push(
            toks[3..]
                .iter()
                .map(|t| number(line, t, "member id"))
                .collect::<Result<Vec<usize>>>()?,
        );
    }
    Ok(sol)
}

pub fn write_solution(sol: &Clustering) -> String {
    let mut out = String::new();
    writeln!(out, "{SOLUTION_HEADER}").unwrap();
    for j in 0..sol.len() {
        let ms = &sol.members[j];
        if ms.is_empty() {
            writeln!(out, "{} {} 0", sol.centers[j], sol.nominal_radii[j]).unwrap();
        } else {
            writeln!(out, "{} {} {} {}", sol.centers[j], sol.nominal_radii[j], ms.len(), join(ms)).unwrap();
        }
    }
    out
}

pub fn parse_graph(text: &str) -> Result<VcGraph> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.next("`n m`")?;
    expect_len(line, &toks, 2, "fields in `n m`")?;
    let n: usize = number(line, toks[0], "vertex count")?;
    let m: usize = number(line, toks[1], "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, toks) = lines.next("edge")?;
        expect_len(line, &toks, 2, "endpoints")?;
        edges.push((number(line, toks[0], "vertex")?, number(line, toks[1], "vertex")?));
    }
    if !lines.is_done() {
        let (line, _) = lines.next("")?;
        return Err(Error::parse(line, "trailing content"));
    }
    VcGraph::new(n, edges).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn write_graph(g: &VcGraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count, g.edges.len());
    for (u, v) in &g.edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
