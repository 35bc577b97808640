//! Index divisibility graphs inside a window `[1, N]`.
//!
//! Starting from the root 1, a vertex `n` gains the edge `(n, np)` for a
//! prime `p` when
//!
//! * `v_p(n) < v_p(f^n(0))` (type 1), or
//! * `v_p(n) = 0` and `p` is in `D` (type 2).
//!
//! Both conditions are always evaluated, so an edge may carry both types.
//! Only primes with `np <= N` are considered.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, valuation_u64};
use crate::divset::{div_set_window, in_div_set, DivisibilitySetWindow};
use crate::error::{Error, Result};
use crate::orbit::{orbit_mod, valuation_of_term};
use crate::poly::IntPolynomial;
use crate::primes::prime_sieve;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeType {
    pub type1: bool,
    pub type2: bool,
}

impl EdgeType {
    pub const TYPE1: EdgeType = EdgeType { type1: true, type2: false };
    pub const TYPE2: EdgeType = EdgeType { type1: false, type2: true };
    pub const BOTH: EdgeType = EdgeType { type1: true, type2: true };

    pub fn is_classified(self) -> bool {
        self.type1 || self.type2
    }

    /// `"1"`, `"2"`, `"1,2"`, or `""` for an unclassified edge.
    pub fn label(self) -> &'static str {
        match (self.type1, self.type2) {
            (true, true) => "1,2",
            (true, false) => "1",
            (false, true) => "2",
            (false, false) => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: u64,
    pub to: u64,
    pub prime: u64,
    pub kind: EdgeType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivGraph {
    pub f: IntPolynomial,
    pub bound: u64,
    /// Ascending; always contains the root 1.
    pub vertices: Vec<u64>,
    /// Sorted by `(from, prime)`.
    pub edges: Vec<Edge>,
}

impl DivGraph {
    pub fn has_vertex(&self, n: u64) -> bool {
        self.vertices.binary_search(&n).is_ok()
    }

    pub fn edge(&self, from: u64, to: u64) -> Option<&Edge> {
        let i = self.edges.partition_point(|e| (e.from, e.to) < (from, to));
        self.edges.get(i).filter(|e| e.from == from && e.to == to)
    }

    /// `(from, to)` pairs, sorted.
    pub fn edge_pairs(&self) -> Vec<(u64, u64)> {
        self.edges.iter().map(|e| (e.from, e.to)).collect()
    }
}

/// Classifies `(n, np)`; `None` when neither type applies. The type-1 test
/// reads `v_p(f^n(0))` with saturation cap `v_p(n) + 1`.
pub fn classify_edge(
    f: &IntPolynomial,
    n: u64,
    p: u64,
    prime_in_d: impl Fn(u64) -> bool,
) -> Result<Option<EdgeType>> {
    let v = valuation_u64(n, p);
    let type1 = valuation_of_term(f, p, n, v + 1)?.exceeds(v) == Some(true);
    let type2 = v == 0 && prime_in_d(p);
    let kind = EdgeType { type1, type2 };
    Ok(kind.is_classified().then_some(kind))
}

/// Membership and rank of apparition for every prime up to a bound.
struct PrimeTable {
    primes: Vec<u64>,
    in_d: Vec<bool>,
    rank: Vec<Option<u64>>,
}

impl PrimeTable {
    fn new(f: &IntPolynomial, bound: u64) -> Result<Self> {
        let primes = prime_sieve(bound);
        let info: Vec<Result<(bool, Option<u64>)>> = primes
            .par_iter()
            .map(|&p| {
                let rank = orbit_mod(f, p)?.rank_of_apparition();
                Ok((in_div_set(f, p), rank))
            })
            .collect();
        let mut in_d = Vec::with_capacity(primes.len());
        let mut rank = Vec::with_capacity(primes.len());
        for r in info {
            let (m, t) = r?;
            in_d.push(m);
            rank.push(t);
        }
        Ok(PrimeTable { primes, in_d, rank })
    }

    fn index(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    fn in_d(&self, p: u64) -> bool {
        self.index(p).is_some_and(|i| self.in_d[i])
    }

    /// Same result as [`classify_edge`]. When `p ∤ n`, type 1 reduces to
    /// `p | f^n(0)`, i.e. the rank of `p` divides `n`.
    fn classify(&self, f: &IntPolynomial, n: u64, i: usize) -> Result<Option<EdgeType>> {
        let p = self.primes[i];
        if n % p != 0 {
            let type1 = self.rank[i].is_some_and(|t| n % t == 0);
            let kind = EdgeType { type1, type2: self.in_d[i] };
            return Ok(kind.is_classified().then_some(kind));
        }
        classify_edge(f, n, p, |q| self.in_d(q))
    }
}

/// Grows the graph from the root, processing vertices in increasing order.
/// Every edge leads to a larger vertex, so one ordered pass reaches the
/// fixed point.
pub fn build_graph(f: &IntPolynomial, bound: u64) -> Result<DivGraph> {
    if bound == 0 {
        return Err(Error::Precondition("window bound must be at least 1".into()));
    }
    let table = PrimeTable::new(f, bound)?;
    let mut vertices = BTreeSet::from([1u64]);
    let mut queue = BTreeSet::from([1u64]);
    let mut edges = Vec::new();
    while let Some(n) = queue.pop_first() {
        let limit = bound / n;
        let count = table.primes.partition_point(|&p| p <= limit);
        let found: Vec<Result<Option<Edge>>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let p = table.primes[i];
                Ok(table.classify(f, n, i)?.map(|kind| Edge {
                    from: n,
                    to: n * p,
                    prime: p,
                    kind,
                }))
            })
            .collect();
        for edge in found {
            if let Some(edge) = edge? {
                if vertices.insert(edge.to) {
                    queue.insert(edge.to);
                }
                edges.push(edge);
            }
        }
    }
    Ok(DivGraph {
        f: f.clone(),
        bound,
        vertices: vertices.into_iter().collect(),
        edges,
    })
}

/// All pairs `(m, mp)` of window members with `p` prime, sorted.
pub fn reconstruct_from_set(window: &DivisibilitySetWindow) -> Vec<(u64, u64)> {
    let primes = prime_sieve(window.bound);
    let member = window.bitmap();
    let mut pairs = Vec::new();
    for &m in &window.members {
        for &p in primes.iter().take_while(|&&p| p <= window.bound / m) {
            if member[(m * p) as usize] {
                pairs.push((m, m * p));
            }
        }
    }
    pairs
}

/// The path from 1 to `n` that climbs through the prime factors of `n` in
/// increasing order, each prime power completed before the next prime.
pub fn path_to(graph: &DivGraph, n: u64) -> Result<Vec<Edge>> {
    if !graph.has_vertex(n) {
        return Err(Error::NotAVertex(n));
    }
    let mut path = Vec::new();
    let mut m = 1u64;
    for (p, beta) in factorize(n) {
        for _ in 0..beta {
            let edge = graph.edge(m, m * p).ok_or(Error::MissingEdge { from: m, to: m * p })?;
            path.push(*edge);
            m *= p;
        }
    }
    Ok(path)
}

/// Survey result for one polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub f: IntPolynomial,
    pub members: usize,
    pub edges: usize,
    pub type1_only: usize,
    pub type2_only: usize,
    pub both: usize,
    /// Edges `(n, np)` between members that are neither type 1 nor type 2.
    pub counterexamples: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub bound: u64,
    pub entries: Vec<SurveyEntry>,
}

impl SurveyReport {
    pub fn counterexample_count(&self) -> usize {
        self.entries.iter().map(|e| e.counterexamples.len()).sum()
    }
}

/// For each `f`: window of `D`, every member pair with prime quotient, and
/// the type of each such pair. Pairs with no type are reported.
pub fn open_question_scan(family: &[IntPolynomial], bound: u64) -> Result<SurveyReport> {
    let entries: Vec<Result<SurveyEntry>> = family.par_iter().map(|f| survey_one(f, bound)).collect();
    Ok(SurveyReport {
        bound,
        entries: entries.into_iter().collect::<Result<_>>()?,
    })
}

fn survey_one(f: &IntPolynomial, bound: u64) -> Result<SurveyEntry> {
    let window = div_set_window(f, bound);
    let pairs = reconstruct_from_set(&window);
    let kinds: Vec<Result<EdgeType>> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let p = n / m;
            Ok(classify_edge(f, m, p, |q| window.contains(q))?.unwrap_or_default())
        })
        .collect();
    let mut entry = SurveyEntry {
        f: f.clone(),
        members: window.members.len(),
        edges: pairs.len(),
        type1_only: 0,
        type2_only: 0,
        both: 0,
        counterexamples: Vec::new(),
    };
    for (&pair, kind) in pairs.iter().zip(kinds) {
        match kind? {
            EdgeType::BOTH => entry.both += 1,
            EdgeType::TYPE1 => entry.type1_only += 1,
            EdgeType::TYPE2 => entry.type2_only += 1,
            _ => entry.counterexamples.push(pair),
        }
    }
    Ok(entry)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    /// JSON record, readable back with [`parse_graph_record`].
    Record,
    /// `from,to,prime,type` rows with a header.
    Csv,
}

pub fn export_graph(graph: &DivGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => {
            let mut out = String::from("digraph D {\n");
            for v in &graph.vertices {
                writeln!(out, "  {v};").expect("writing to a String");
            }
            for e in &graph.edges {
                writeln!(out, "  {} -> {} [type=\"{}\"];", e.from, e.to, e.kind.label()).expect("writing to a String");
            }
            out.push_str("}\n");
            out
        }
        GraphFormat::Record => {
            let mut s = serde_json::to_string_pretty(graph).expect("graph serializes");
            s.push('\n');
            s
        }
        GraphFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["from", "to", "prime", "type"]).expect("writing to memory");
            for e in &graph.edges {
                w.write_record([e.from.to_string(), e.to.to_string(), e.prime.to_string(), e.kind.label().to_string()])
                    .expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV of ASCII fields")
        }
    }
}

/// Reads a graph record and checks its structural invariants.
pub fn parse_graph_record(text: &str) -> Result<DivGraph> {
    let graph: DivGraph = serde_json::from_str(text).map_err(|e| Error::Record(e.to_string()))?;
    let vertex_set: BTreeSet<u64> = graph.vertices.iter().copied().collect();
    if vertex_set.len() != graph.vertices.len() || !graph.vertices.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Record("vertices must be strictly increasing".into()));
    }
    if graph.vertices.first() != Some(&1) {
        return Err(Error::Record("the root 1 must be a vertex".into()));
    }
    let mut incoming: BTreeMap<u64, usize> = BTreeMap::new();
    for e in &graph.edges {
        if e.from.checked_mul(e.prime) != Some(e.to) || !crate::arith::is_prime(e.prime) {
            return Err(Error::Record(format!("edge ({}, {}) is not a prime step", e.from, e.to)));
        }
        if !vertex_set.contains(&e.from) || !vertex_set.contains(&e.to) {
            return Err(Error::Record(format!("edge ({}, {}) leaves the vertex set", e.from, e.to)));
        }
        *incoming.entry(e.to).or_default() += 1;
    }
    if let Some(v) = graph.vertices.iter().skip(1).find(|v| !incoming.contains_key(v)) {
        return Err(Error::Record(format!("vertex {v} has no incoming edge")));
    }
    Ok(graph)
}
