//! The ν-caracol graph: a DAG on vertices 1..=a+3 whose flow polytope the
//! rest of the crate triangulates and counts.
//!
//! Edges, with ν = NE^{ν_1}...NE^{ν_a}:
//!   - ν_i parallel copies of (1, i+2), labelled top to bottom 1..=ν_i,
//!   - the bypasses (i, a+3) for i = 2..=a+1,
//!   - the path (i, i+1) for i = 1..=a+2.
//!
//! Routes (maximal 1 -> n+1 paths) are encoded as triples (j, i, l): initial
//! edge (1, j+1) with multiedge label i, terminal edge (l+1, n+1).

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::path::{LatticePath, PathError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("path error: {0}")]
    Path(#[from] PathError),
    #[error("route ({j},{i},{l}) is not valid for this graph")]
    BadRoute { j: usize, i: usize, l: usize },
}

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Distinguishes parallel copies, top to bottom; 1 for simple edges.
    pub label: usize,
}

#[derive(Debug, Clone)]
pub struct CaracolGraph {
    nu: LatticePath,
    runs: Vec<usize>,
    prefix: Vec<usize>,
    edges: Vec<Edge>,
}

impl CaracolGraph {
    /// Number of vertices is n+1 = a+3.
    pub fn vertex_count(&self) -> usize {
        self.a() + 3
    }

    /// n = a+2, so the sink is vertex n+1.
    pub fn n(&self) -> usize {
        self.a() + 2
    }

    pub fn a(&self) -> usize {
        self.runs.len()
    }

    pub fn b(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Intrinsic dimension of the flow polytope: m - n = a + b.
    pub fn dim(&self) -> usize {
        self.edge_count() - self.n()
    }

    pub fn nu(&self) -> &LatticePath {
        &self.nu
    }

    pub fn runs(&self) -> &[usize] {
        &self.runs
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.v == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.u == v).count()
    }

    pub fn in_edges(&self, v: usize) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&e| self.edges[e].v == v).collect()
    }

    pub fn out_edges(&self, v: usize) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&e| self.edges[e].u == v).collect()
    }

    /// Edge id of the path edge (i, i+1).
    pub fn path_edge(&self, i: usize) -> EdgeId {
        debug_assert!((1..=self.n()).contains(&i));
        i - 1
    }

    /// Edge id of the source multiedge (1, target) with the given label.
    pub fn arc_edge(&self, target: usize, label: usize) -> Option<EdgeId> {
        if target < 3 {
            return None;
        }
        self.edges
            .iter()
            .position(|e| e.u == 1 && e.v == target && e.label == label)
    }

    /// Edge id of the bypass (source, n+1) for 2 <= source <= a+1.
    pub fn bypass_edge(&self, source: usize) -> Option<EdgeId> {
        if !(2..=self.a() + 1).contains(&source) {
            return None;
        }
        self.edges
            .iter()
            .position(|e| e.u == source && e.v == self.n() + 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertex_count(),
            "edges": self.edges,
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "    rankdir=LR;").unwrap();
        for v in 1..=self.vertex_count() {
            writeln!(out, "    {v};").unwrap();
        }
        for e in &self.edges {
            writeln!(out, "    {} -> {} [label=\"{}\"];", e.u, e.v, e.label).unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }
}

/// Build car(ν). The path must be normalized (start with N).
pub fn build_caracol(nu: &LatticePath) -> Result<CaracolGraph, GraphError> {
    let runs = nu.nu_runs()?;
    let a = runs.len();
    let sink = a + 3;
    let mut edges = Vec::new();
    for i in 1..=a + 2 {
        edges.push(Edge { u: i, v: i + 1, label: 1 });
    }
    for (i, &mult) in runs.iter().enumerate() {
        for label in 1..=mult {
            edges.push(Edge { u: 1, v: i + 3, label });
        }
    }
    for i in 2..=a + 1 {
        edges.push(Edge { u: i, v: sink, label: 1 });
    }
    let mut prefix = Vec::with_capacity(a + 1);
    let mut acc = 0;
    prefix.push(0);
    for &r in &runs {
        acc += r;
        prefix.push(acc);
    }
    Ok(CaracolGraph { nu: nu.clone(), runs, prefix, edges })
}

/// A route, canonically keyed by its initial and terminal edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Route {
    /// Initial edge is (1, j+1).
    pub j: usize,
    /// Multiedge label of the initial edge; 1 when j = 1.
    pub i: usize,
    /// Terminal edge is (l+1, n+1).
    pub l: usize,
}

impl Route {
    pub fn new(j: usize, i: usize, l: usize) -> Self {
        Route { j, i, l }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R({},{},{})", self.j, self.i, self.l)
    }
}

impl CaracolGraph {
    pub fn route_is_valid(&self, r: &Route) -> bool {
        let n = self.n();
        if !(1 <= r.j && r.j <= r.l && r.l < n) {
            return false;
        }
        if r.j == 1 {
            r.i == 1
        } else {
            r.j <= self.a() + 1 && r.i >= 1 && r.i <= self.runs[r.j - 2]
        }
    }

    /// All routes, sorted by (j, i, l).
    pub fn routes(&self) -> Vec<Route> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 1..n {
            let mults = if j == 1 { 1 } else { self.runs[j - 2] };
            for i in 1..=mults {
                for l in j..n {
                    out.push(Route::new(j, i, l));
                }
            }
        }
        out
    }

    /// The edge sequence of a route, reconstructed from its key.
    pub fn route_edges(&self, r: &Route) -> Result<Vec<EdgeId>, GraphError> {
        if !self.route_is_valid(r) {
            return Err(GraphError::BadRoute { j: r.j, i: r.i, l: r.l });
        }
        let n = self.n();
        let mut edges = Vec::new();
        if r.j == 1 {
            edges.push(self.path_edge(1));
        } else {
            edges.push(self.arc_edge(r.j + 1, r.i).expect("validated arc"));
        }
        for v in r.j + 1..=r.l {
            edges.push(self.path_edge(v));
        }
        if r.l + 1 == n {
            edges.push(self.path_edge(n));
        } else {
            edges.push(self.bypass_edge(r.l + 1).expect("validated bypass"));
        }
        Ok(edges)
    }

    /// Vertices visited by a route, in order.
    pub fn route_vertices(&self, r: &Route) -> Result<Vec<usize>, GraphError> {
        let edges = self.route_edges(r)?;
        let mut vs = vec![1];
        for e in edges {
            vs.push(self.edges[e].v);
        }
        Ok(vs)
    }

    /// 0/1 flow over all edges carried by a route.
    pub fn route_flow(&self, r: &Route) -> Result<Vec<i64>, GraphError> {
        let mut flow = vec![0i64; self.edge_count()];
        for e in self.route_edges(r)? {
            flow[e] = 1;
        }
        Ok(flow)
    }

    /// Net flow of an edge-indexed vector at each vertex (out minus in).
    pub fn net_flow(&self, flow: &[i64]) -> Vec<i64> {
        let mut net = vec![0i64; self.vertex_count() + 1];
        for (e, &x) in self.edges.iter().zip(flow.iter()) {
            net[e.u] += x;
            net[e.v] -= x;
        }
        net.remove(0);
        net
    }
}

/// The Lidskii target vector (0, u_2, ..., u_n, -(m-n-u_{n+1})) with
/// u_i = indeg(i) - 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InDegreeVector {
    pub entries: Vec<i64>,
}

impl InDegreeVector {
    /// Expansion into simple roots: coefficient of α_j is the j-th prefix
    /// sum of the entries.
    pub fn root_expansion(&self) -> Vec<i64> {
        let mut acc = 0;
        self.entries[..self.entries.len() - 1]
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect()
    }
}

pub fn in_degree_vector(g: &CaracolGraph) -> InDegreeVector {
    let n = g.n();
    let m = g.edge_count() as i64;
    let mut entries = vec![0i64];
    for v in 2..=n {
        entries.push(g.in_degree(v) as i64 - 1);
    }
    let u_sink = g.in_degree(n + 1) as i64 - 1;
    entries.push(-(m - n as i64 - u_sink));
    InDegreeVector { entries }
}
