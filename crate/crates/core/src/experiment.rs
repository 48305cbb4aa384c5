//! Random-DAG benchmark: d-separation against exact inference on the
//! two-clause program
//!
//! ```text
//! random p/1.
//! 0.5 :: p(X) :- n(X).
//! 0.5 :: p(Y) :- p(X), n(X), n(Y), e(X,Y).
//! ```
//!
//! over graphs with nodes `1..=S` where each pair `i < j` is an edge with
//! probability `1/sqrt(S)`.
//!
//! Randomness comes from ChaCha8 seeded with the run seed. Graph `g` of size
//! `S` reads stream `S << 16 | g`; the query pairs of size `S` read stream
//! `S << 16 | 0xffff`. Each pair draws `a` uniformly from the even numbers in
//! `[2, S]`, then `b` uniformly from the remaining even numbers. Pairs are
//! shared by all graphs of one size and may repeat.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deadline::Deadline;
use crate::dsep::{d_connected, ObservationSet};
use crate::error::{Error, Result};
use crate::grounding::{GroundingOptions, Instance};
use crate::oracle::{Oracle, DEFAULT_GUARD};
use crate::syntax::{
    database_from_facts, parse_program, GroundAtom, ParameterAssignment, ProgramStructure,
};

pub const BENCH_PROGRAM: &str = "random p/1.\n\
    0.5 :: p(X) :- n(X).\n\
    0.5 :: p(Y) :- p(X), n(X), n(Y), e(X,Y).\n";

pub const PAIR_SAMPLING: &str =
    "a uniform over even numbers in [2,S], b uniform over the remaining even numbers; pairs shared by all graphs of a size";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dsep,
    Oracle,
    Both,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dsep" => Ok(Mode::Dsep),
            "oracle" => Ok(Mode::Oracle),
            "both" => Ok(Mode::Both),
            _ => Err(format!(
                "unknown mode `{s}` (expected dsep, oracle or both)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dsep => "dsep",
            Mode::Oracle => "oracle",
            Mode::Both => "both",
        })
    }
}

/// Observation set of a benchmark query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Nothing observed.
    Empty,
    /// Every `p(i)` with `i` odd observed.
    Odd,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Empty => "empty",
            Regime::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub graphs_per_size: usize,
    pub queries_per_size: usize,
    pub seed: u64,
    pub timeout: Duration,
    pub mode: Mode,
    pub guard: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: (1..=20).map(|i| 5 * i).collect(),
            graphs_per_size: 5,
            queries_per_size: 10,
            seed: 0,
            timeout: Duration::from_secs(10),
            mode: Mode::Dsep,
            guard: DEFAULT_GUARD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRecord {
    #[serde(rename = "S")]
    pub size: usize,
    pub graph: usize,
    pub a: usize,
    pub b: usize,
    pub regime: Regime,
    /// `dsep` or `oracle`.
    pub mode: &'static str,
    /// `separated`, `connected`, `independent`, `dependent`,
    /// `guard-exceeded` or `timeout`.
    pub verdict: String,
    pub micros: u128,
    pub timeout: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "S")]
    pub size: usize,
    pub mode: &'static str,
    pub regime: Regime,
    pub median_us: u128,
    pub max_us: u128,
    pub timeouts: usize,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Edges `(i, j)`, `1 <= i < j <= size`, each present with probability
/// `1/sqrt(size)`.
pub fn gen_random_dag(size: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let p = 1.0 / (size as f64).sqrt();
    let mut edges = Vec::new();
    for i in 1..=size {
        for j in i + 1..=size {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Graph `graph` of the given size for a run seed.
pub fn bench_graph(seed: u64, size: usize, graph: usize) -> Vec<(usize, usize)> {
    gen_random_dag(
        size,
        &mut stream_rng(seed, (size as u64) << 16 | graph as u64),
    )
}

/// The query pairs of one size. Empty when fewer than two even numbers fit.
pub fn query_pairs(seed: u64, size: usize, count: usize) -> Vec<(usize, usize)> {
    let evens: Vec<usize> = (2..=size).step_by(2).collect();
    if evens.len() < 2 {
        return Vec::new();
    }
    let mut rng = stream_rng(seed, (size as u64) << 16 | 0xffff);
    (0..count)
        .map(|_| {
            let i = rng.random_range(0..evens.len());
            let mut j = rng.random_range(0..evens.len() - 1);
            if j >= i {
                j += 1;
            }
            (evens[i], evens[j])
        })
        .collect()
}

/// The benchmark program with `n/1` and `e/2` facts for one graph.
pub fn bench_program(
    size: usize,
    edges: &[(usize, usize)],
) -> Result<(ProgramStructure, crate::ExternalDatabase)> {
    let program = parse_program(BENCH_PROGRAM)?;
    let mut facts: Vec<GroundAtom> = (1..=size)
        .map(|i| GroundAtom::new("n", [i as u64]))
        .collect();
    facts.extend(
        edges
            .iter()
            .map(|&(i, j)| GroundAtom::new("e", [i as u64, j as u64])),
    );
    let db = database_from_facts(facts, &program)?;
    Ok((program, db))
}

fn p_atom(i: usize) -> GroundAtom {
    GroundAtom::new("p", [i as u64])
}

struct Cell<'a> {
    size: usize,
    graph: usize,
    a: usize,
    b: usize,
    regime: Regime,
    inst: &'a Instance,
    params: &'a ParameterAssignment,
}

fn run_dsep(cell: &Cell<'_>, obs: &[usize], timeout: Duration) -> Result<BenchRecord> {
    let dag = cell.inst.dag();
    let x = cell.inst.node(&p_atom(cell.a))?;
    let y = cell.inst.node(&p_atom(cell.b))?;
    let deadline = Deadline::after(timeout);
    let start = Instant::now();
    let result = d_connected(dag, x, y, &ObservationSet::new(dag, obs), &deadline);
    let micros = start.elapsed().as_micros();
    let (verdict, timeout) = match result {
        Ok(v) => (v.to_string(), false),
        Err(Error::Timeout) => ("timeout".to_string(), true),
        Err(e) => return Err(e),
    };
    Ok(cell.record("dsep", verdict, micros, timeout))
}

fn run_oracle(
    cell: &Cell<'_>,
    obs: &[usize],
    timeout: Duration,
    guard: usize,
) -> Result<BenchRecord> {
    let x = cell.inst.node(&p_atom(cell.a))?;
    let y = cell.inst.node(&p_atom(cell.b))?;
    let deadline = Deadline::after(timeout);
    let start = Instant::now();
    let result = Oracle::for_instance(cell.inst, cell.params, guard, &deadline)
        .and_then(|o| o.ci_check(x, y, obs));
    let micros = start.elapsed().as_micros();
    let (verdict, timeout) = match result {
        Ok(v) => (v.to_string(), false),
        Err(Error::Timeout) => ("timeout".to_string(), true),
        Err(Error::GuardExceeded { .. }) => ("guard-exceeded".to_string(), false),
        Err(e) => return Err(e),
    };
    Ok(cell.record("oracle", verdict, micros, timeout))
}

impl Cell<'_> {
    fn record(
        &self,
        mode: &'static str,
        verdict: String,
        micros: u128,
        timeout: bool,
    ) -> BenchRecord {
        BenchRecord {
            size: self.size,
            graph: self.graph,
            a: self.a,
            b: self.b,
            regime: self.regime,
            mode,
            verdict,
            micros,
            timeout,
        }
    }
}

/// Runs every (size, graph, pair, regime, mode) cell sequentially. Each
/// graph is grounded once; timings cover the query only.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &size in &cfg.sizes {
        if size == 0 {
            return Err(Error::Other("benchmark sizes must be positive".into()));
        }
        let pairs = query_pairs(cfg.seed, size, cfg.queries_per_size);
        for graph in 0..cfg.graphs_per_size {
            let edges = bench_graph(cfg.seed, size, graph);
            let (program, db) = bench_program(size, &edges)?;
            let inst = Instance::new(&program, &db, GroundingOptions::default())?;
            let params = ParameterAssignment::from_program(&program);
            let odd: Vec<usize> = (1..=size)
                .step_by(2)
                .map(|i| inst.node(&p_atom(i)))
                .collect::<Result<_>>()?;
            for &(a, b) in &pairs {
                for regime in [Regime::Empty, Regime::Odd] {
                    let obs: &[usize] = match regime {
                        Regime::Empty => &[],
                        Regime::Odd => &odd,
                    };
                    let cell = Cell {
                        size,
                        graph,
                        a,
                        b,
                        regime,
                        inst: &inst,
                        params: &params,
                    };
                    if cfg.mode != Mode::Oracle {
                        records.push(run_dsep(&cell, obs, cfg.timeout)?);
                    }
                    if cfg.mode != Mode::Dsep {
                        records.push(run_oracle(&cell, obs, cfg.timeout, cfg.guard)?);
                    }
                }
            }
        }
    }
    Ok(records)
}

fn median(sorted: &[u128]) -> u128 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    }
}

/// Median and maximum time per (size, mode, regime).
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: std::collections::BTreeMap<(usize, &'static str, Regime), Vec<&BenchRecord>> =
        Default::default();
    for r in records {
        groups
            .entry((r.size, r.mode, r.regime))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((size, mode, regime), rs)| {
            let mut t: Vec<u128> = rs.iter().map(|r| r.micros).collect();
            t.sort_unstable();
            SummaryRow {
                size,
                mode,
                regime,
                median_us: median(&t),
                max_us: *t.last().unwrap(),
                timeouts: rs.iter().filter(|r| r.timeout).count(),
            }
        })
        .collect()
}

fn write_rows<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Other(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Other(e.to_string()))
}

/// CSV with header `S,graph,a,b,regime,mode,verdict,micros,timeout`.
pub fn write_records_csv(records: &[BenchRecord], out: impl Write) -> Result<()> {
    write_rows(records, out)
}

/// CSV with header `S,mode,regime,median_us,max_us,timeouts`.
pub fn write_summary_csv(rows: &[SummaryRow], out: impl Write) -> Result<()> {
    write_rows(rows, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_graphs() {
        assert!(bench_graph(1, 1, 0).is_empty());
        for seed in 0..20 {
            assert!(bench_graph(seed, 4, 0).iter().all(|(i, j)| i < j));
        }
    }

    #[test]
    fn graphs_are_reproducible() {
        assert_eq!(bench_graph(7, 30, 2), bench_graph(7, 30, 2));
        assert_ne!(bench_graph(7, 30, 2), bench_graph(7, 30, 3));
    }

    #[test]
    fn pairs_are_distinct_evens() {
        let pairs = query_pairs(3, 20, 10);
        assert_eq!(pairs.len(), 10);
        for (a, b) in pairs {
            assert!(a != b && a % 2 == 0 && b % 2 == 0 && (2..=20).contains(&a) && b <= 20);
        }
        assert!(query_pairs(3, 3, 10).is_empty());
    }

    #[test]
    fn record_count_for_one_size() {
        let cfg = BenchConfig {
            sizes: vec![5],
            ..BenchConfig::default()
        };
        let records = run_bench(&cfg).unwrap();
        assert_eq!(records.len(), 100);
        assert!(records
            .iter()
            .all(|r| r.verdict == "separated" || r.verdict == "connected"));
        let summary = summarize(&records);
        assert_eq!(summary.len(), 2);
        let mut out = Vec::new();
        write_summary_csv(&summary, &mut out).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("S,mode,regime,median_us,max_us,timeouts\n"));
    }

    #[test]
    fn ground_graph_mirrors_edges() {
        let (program, db) = bench_program(3, &[(1, 2)]).unwrap();
        let inst = Instance::new(&program, &db, GroundingOptions::default()).unwrap();
        assert_eq!(inst.ground_variables().len(), 3);
        assert_eq!(inst.graph().edge_count(), 1);
        assert!(inst.fact_defined().iter().all(|f| *f));
    }
}
