//! Framings of car(ν), route coherence, and the DKK triangulations.
//!
//! A framing fixes linear orders on the in- and out-edges of every inner
//! vertex. Routes through a shared inner vertex are compared by walking to
//! the first divergence on each side; they are coherent when the incoming
//! and outgoing comparisons agree (ties are coherent). Maximal sets of
//! pairwise coherent routes are the top simplices of a unimodular
//! triangulation of the flow polytope.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caracol::{CaracolGraph, EdgeId, Route};
use crate::enumeration;
use crate::geom::{self, SimplexFrame};

/// Per-vertex in/out edge orders; index 0 is unused, orders are only
/// meaningful for inner vertices 2..=n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Framing {
    pub in_order: Vec<Vec<EdgeId>>,
    pub out_order: Vec<Vec<EdgeId>>,
}

impl Framing {
    fn empty(g: &CaracolGraph) -> Framing {
        let n = g.vertex_count() + 1;
        Framing {
            in_order: vec![Vec::new(); n],
            out_order: vec![Vec::new(); n],
        }
    }

    pub fn position_in(&self, v: usize, e: EdgeId) -> usize {
        self.in_order[v].iter().position(|&x| x == e).expect("edge framed at v")
    }

    pub fn position_out(&self, v: usize, e: EdgeId) -> usize {
        self.out_order[v].iter().position(|&x| x == e).expect("edge framed at v")
    }

    /// Swap the in-edge orders at every vertex, keeping out-edge orders.
    /// Not one of the two named framings; used to probe that other
    /// framings still triangulate.
    pub fn with_reversed_in_orders(&self) -> Framing {
        let mut f = self.clone();
        for order in &mut f.in_order {
            order.reverse();
        }
        f
    }
}

fn sort_by_length_desc_label_asc(g: &CaracolGraph, edges: &mut Vec<EdgeId>) {
    edges.sort_by_key(|&e| {
        let edge = g.edges()[e];
        (std::cmp::Reverse(edge.v - edge.u), edge.label)
    });
}

/// Length framing: longer edges first, ties by increasing multiedge label,
/// on both sides of every inner vertex.
pub fn length_framing(g: &CaracolGraph) -> Framing {
    let mut f = Framing::empty(g);
    for v in 2..=g.n() {
        let mut ins = g.in_edges(v);
        let mut outs = g.out_edges(v);
        sort_by_length_desc_label_asc(g, &mut ins);
        sort_by_length_desc_label_asc(g, &mut outs);
        f.in_order[v] = ins;
        f.out_order[v] = outs;
    }
    f
}

/// Planar framing from the embedding with the path 1..n+1 on the x-axis,
/// source multiedges above it and bypasses below: in-edges top to bottom
/// (decreasing length, labels increasing), out-edges top to bottom
/// (increasing length).
pub fn planar_framing(g: &CaracolGraph) -> Framing {
    let mut f = Framing::empty(g);
    for v in 2..=g.n() {
        let mut ins = g.in_edges(v);
        let mut outs = g.out_edges(v);
        sort_by_length_desc_label_asc(g, &mut ins);
        outs.sort_by_key(|&e| {
            let edge = g.edges()[e];
            (edge.v - edge.u, edge.label)
        });
        f.in_order[v] = ins;
        f.out_order[v] = outs;
    }
    f
}

fn common_suffix_len(a: &[EdgeId], b: &[EdgeId]) -> usize {
    a.iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count()
}

/// Compare the maximal subpaths of two routes ending at v under the
/// in-order induced at their first divergence vertex.
fn compare_in(
    g: &CaracolGraph,
    f: &Framing,
    r_edges: &[EdgeId],
    q_edges: &[EdgeId],
    v_pos_r: usize,
    v_pos_q: usize,
) -> Ordering {
    let rin = &r_edges[..v_pos_r];
    let qin = &q_edges[..v_pos_q];
    let t = common_suffix_len(rin, qin);
    if t == rin.len() && t == qin.len() {
        return Ordering::Equal;
    }
    let er = rin[rin.len() - t - 1];
    let eq = qin[qin.len() - t - 1];
    let j = g.edges()[er].v;
    debug_assert_eq!(j, g.edges()[eq].v);
    f.position_in(j, er).cmp(&f.position_in(j, eq))
}

fn common_prefix_len(a: &[EdgeId], b: &[EdgeId]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

fn compare_out(
    g: &CaracolGraph,
    f: &Framing,
    r_edges: &[EdgeId],
    q_edges: &[EdgeId],
    v_pos_r: usize,
    v_pos_q: usize,
) -> Ordering {
    let rout = &r_edges[v_pos_r..];
    let qout = &q_edges[v_pos_q..];
    let t = common_prefix_len(rout, qout);
    if t == rout.len() && t == qout.len() {
        return Ordering::Equal;
    }
    let er = rout[t];
    let eq = qout[t];
    let j = g.edges()[er].u;
    debug_assert_eq!(j, g.edges()[eq].u);
    f.position_out(j, er).cmp(&f.position_out(j, eq))
}

/// Routes are coherent when at every common inner vertex the incoming and
/// outgoing germ orders do not strictly disagree.
pub fn coherent(g: &CaracolGraph, f: &Framing, r: &Route, q: &Route) -> bool {
    let r_vs = g.route_vertices(r).expect("valid route");
    let q_vs = g.route_vertices(q).expect("valid route");
    let r_edges = g.route_edges(r).expect("valid route");
    let q_edges = g.route_edges(q).expect("valid route");
    let q_set: BTreeSet<usize> = q_vs.iter().copied().collect();
    for (pos_r, &v) in r_vs.iter().enumerate() {
        if v < 2 || v > g.n() || !q_set.contains(&v) {
            continue;
        }
        let pos_q = q_vs.iter().position(|&x| x == v).unwrap();
        let cin = compare_in(g, f, &r_edges, &q_edges, pos_r, pos_q);
        let cout = compare_out(g, f, &r_edges, &q_edges, pos_r, pos_q);
        if cin != Ordering::Equal && cout != Ordering::Equal && cin != cout {
            return false;
        }
    }
    true
}

/// A set of pairwise coherent routes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Clique {
    pub routes: Vec<Route>,
}

impl Clique {
    pub fn new(mut routes: Vec<Route>) -> Self {
        routes.sort();
        Clique { routes }
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self
            .routes
            .iter()
            .map(|r| vec![r.j, r.i, r.l])
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.routes.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// All maximal cliques of the coherence graph, sorted. Bron-Kerbosch with
/// pivoting; route counts here are tiny.
pub fn maximal_cliques(g: &CaracolGraph, f: &Framing) -> Vec<Clique> {
    let routes = g.routes();
    let n = routes.len();
    let mut adj = vec![vec![false; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            if coherent(g, f, &routes[a], &routes[b]) {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    bron_kerbosch(&adj, &mut r, p, Vec::new(), &mut found);
    let mut cliques: Vec<Clique> = found
        .into_iter()
        .map(|ids| Clique::new(ids.into_iter().map(|k| routes[k]).collect()))
        .collect();
    cliques.sort();
    cliques
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let np: Vec<usize> = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx: Vec<usize> = x.iter().copied().filter(|&w| adj[v][w]).collect();
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// The indicator flows of a clique's routes: the vertex set of its simplex.
pub fn simplex_of(g: &CaracolGraph, c: &Clique) -> Vec<Vec<i64>> {
    c.routes
        .iter()
        .map(|r| g.route_flow(r).expect("valid route"))
        .collect()
}

/// Dual graph of a triangulation: nodes are the maximal cliques, edges join
/// cliques whose route sets differ in exactly one route.
#[derive(Debug, Clone, Serialize)]
pub struct DualGraph {
    pub cliques: Vec<Clique>,
    pub edges: BTreeSet<(usize, usize)>,
}

pub fn dual_graph(cliques: &[Clique]) -> DualGraph {
    let mut edges = BTreeSet::new();
    for a in 0..cliques.len() {
        for b in a + 1..cliques.len() {
            let sa: BTreeSet<&Route> = cliques[a].routes.iter().collect();
            let sb: BTreeSet<&Route> = cliques[b].routes.iter().collect();
            if sa.symmetric_difference(&sb).count() == 2 {
                edges.insert((a, b));
            }
        }
    }
    DualGraph {
        cliques: cliques.to_vec(),
        edges,
    }
}

impl DualGraph {
    /// Node labels default to the clique's route triples; callers supply
    /// tree or path labels when a correspondence is wanted.
    pub fn to_dot(&self, name: &str, labels: Option<&[String]>) -> String {
        let mut out = String::new();
        writeln!(out, "graph {name} {{").unwrap();
        for (k, c) in self.cliques.iter().enumerate() {
            let label = labels
                .map(|ls| ls[k].clone())
                .unwrap_or_else(|| c.to_string());
            writeln!(out, "    n{k} [label=\"{label}\"];").unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "    n{a} -- n{b};").unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }

    pub fn to_json(&self, labels: Option<&[String]>) -> serde_json::Value {
        serde_json::json!({
            "nodes": match labels {
                Some(ls) => serde_json::json!(ls),
                None => serde_json::json!(self.cliques.iter().map(|c| c.to_json()).collect::<Vec<_>>()),
            },
            "edges": self.edges.iter().collect::<Vec<_>>(),
        })
    }
}

/// Outcome of the triangulation checker; every failed check carries a
/// human-readable witness.
#[derive(Debug, Default)]
pub struct TriangulationReport {
    pub clique_size_failures: Vec<String>,
    pub unimodularity_failures: Vec<String>,
    pub volume_failure: Option<String>,
    pub pairwise_failures: Vec<String>,
    pub cliques_checked: usize,
}

impl TriangulationReport {
    pub fn pass(&self) -> bool {
        self.clique_size_failures.is_empty()
            && self.unimodularity_failures.is_empty()
            && self.volume_failure.is_none()
            && self.pairwise_failures.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.pass() {
            format!("{} simplices: all checks pass", self.cliques_checked)
        } else {
            let mut lines = Vec::new();
            lines.extend(self.clique_size_failures.iter().cloned());
            lines.extend(self.unimodularity_failures.iter().cloned());
            lines.extend(self.volume_failure.iter().cloned());
            lines.extend(self.pairwise_failures.iter().cloned());
            lines.join("\n")
        }
    }
}

/// Check that a clique set is a unimodular triangulation of the polytope:
/// simplex dimensions, lattice determinants, total volume against the
/// independent Kostant count, and pairwise intersection behaviour (shared
/// vertex sets plus random interior points that must not land in two
/// simplices).
pub fn verify_triangulation(
    g: &CaracolGraph,
    cliques: &[Clique],
    interior_samples_per_pair: usize,
    seed: u64,
) -> TriangulationReport {
    let mut report = TriangulationReport {
        cliques_checked: cliques.len(),
        ..Default::default()
    };
    let d = g.dim();
    let chart_edges = geom::chart_edges(g);
    let charts: Vec<Vec<Vec<i64>>> = cliques
        .iter()
        .map(|c| {
            c.routes
                .iter()
                .map(|r| geom::route_chart(g, &chart_edges, r))
                .collect()
        })
        .collect();

    for (k, c) in cliques.iter().enumerate() {
        if c.len() != d + 1 {
            report
                .clique_size_failures
                .push(format!("clique {k} has {} routes, expected {}", c.len(), d + 1));
        }
    }
    if report.clique_size_failures.is_empty() {
        for (k, pts) in charts.iter().enumerate() {
            let det = geom::simplex_lattice_det(pts);
            if det.abs() != 1 {
                report
                    .unimodularity_failures
                    .push(format!("clique {k} has lattice determinant {det}"));
            }
        }
    }

    let expected = enumeration::kostant(g, &crate::caracol::in_degree_vector(g).entries);
    if cliques.len() as u128 != expected {
        report.volume_failure = Some(format!(
            "{} unimodular simplices but Kostant volume is {expected}",
            cliques.len()
        ));
    }

    // duplicates are never a common proper face
    for a in 0..cliques.len() {
        for b in a + 1..cliques.len() {
            if cliques[a] == cliques[b] {
                report
                    .pairwise_failures
                    .push(format!("cliques {a} and {b} are identical"));
            }
        }
    }

    if report.clique_size_failures.is_empty()
        && report.unimodularity_failures.is_empty()
        && report.pairwise_failures.is_empty()
    {
        let frames: Vec<SimplexFrame> = charts
            .iter()
            .map(|pts| SimplexFrame::new(pts).expect("unimodular simplex"))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_side = interior_samples_per_pair.div_ceil(2);
        'pairs: for a in 0..cliques.len() {
            for b in a + 1..cliques.len() {
                for _ in 0..per_side {
                    for (src, dst) in [(a, b), (b, a)] {
                        let (num, den) = sample_interior(&charts[src], &mut rng);
                        if frames[dst].contains(&num, den) {
                            report.pairwise_failures.push(format!(
                                "interior point of clique {src} lies in clique {dst}"
                            ));
                            continue 'pairs;
                        }
                    }
                }
            }
        }
    }
    report
}

/// A uniform interior rational point of a simplex: Dirichlet weights from
/// sorted integer spacings over a fixed power-of-two denominator.
fn sample_interior(points: &[Vec<i64>], rng: &mut ChaCha8Rng) -> (Vec<i128>, i128) {
    const DEN: i128 = 1 << 32;
    let k = points.len();
    let mut cuts: BTreeSet<i128> = BTreeSet::new();
    while cuts.len() < k - 1 {
        cuts.insert(rng.gen_range(1..DEN as u64 as i128));
    }
    let mut weights = Vec::with_capacity(k);
    let mut prev = 0i128;
    for &c in &cuts {
        weights.push(c - prev);
        prev = c;
    }
    weights.push(DEN - prev);
    let dim = points[0].len();
    let num: Vec<i128> = (0..dim)
        .map(|j| {
            points
                .iter()
                .zip(weights.iter())
                .map(|(p, w)| p[j] as i128 * w)
                .sum()
        })
        .collect();
    (num, DEN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caracol::build_caracol;
    use crate::path::LatticePath;

    fn setup(s: &str) -> CaracolGraph {
        build_caracol(&LatticePath::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn figure_two_framing_orders() {
        let g = setup("NE2NENNE3NE");
        let length = length_framing(&g);
        let planar = planar_framing(&g);
        // vertex 6: in-edges are the three copies of (1,6) then (5,6)
        let expect_in: Vec<EdgeId> = vec![
            g.arc_edge(6, 1).unwrap(),
            g.arc_edge(6, 2).unwrap(),
            g.arc_edge(6, 3).unwrap(),
            g.path_edge(5),
        ];
        assert_eq!(length.in_order[6], expect_in);
        assert_eq!(planar.in_order[6], expect_in);
        // out-edges: length puts the bypass (6,8) first, planar the path (6,7)
        assert_eq!(
            length.out_order[6],
            vec![g.bypass_edge(6).unwrap(), g.path_edge(6)]
        );
        assert_eq!(
            planar.out_order[6],
            vec![g.path_edge(6), g.bypass_edge(6).unwrap()]
        );
    }

    #[test]
    fn single_in_edge_orders() {
        let g = setup("NENEENEE");
        let length = length_framing(&g);
        assert_eq!(length.in_order[2], vec![g.path_edge(1)]);
        assert_eq!(
            length.in_order[3],
            vec![g.arc_edge(3, 1).unwrap(), g.path_edge(2)]
        );
        // nu = NENE: planar out-order at 3 is (3,4) then the bypass (3,5)
        let g = setup("NENE");
        let planar = planar_framing(&g);
        assert_eq!(
            planar.out_order[3],
            vec![g.path_edge(3), g.bypass_edge(3).unwrap()]
        );
    }

    #[test]
    fn first_route_is_coherent_with_everything() {
        let g = setup("NENEENEE");
        let f = length_framing(&g);
        let hub = Route::new(1, 1, 1);
        for r in g.routes() {
            assert!(coherent(&g, &f, &hub, &r), "{r}");
        }
    }

    #[test]
    fn nested_start_end_pattern_is_incoherent_under_length() {
        // j < j' <= l < l' forces incoherence at the length framing
        for s in ["NENEENEE", "NENE", "NE2NEN"] {
            let g = setup(s);
            let f = length_framing(&g);
            for r in g.routes() {
                for q in g.routes() {
                    if r.j < q.j && q.j <= r.l && r.l < q.l {
                        assert!(!coherent(&g, &f, &r, &q), "{s}: {r} vs {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn coherence_is_symmetric_and_reflexive() {
        let g = setup("NENEENEE");
        for f in [length_framing(&g), planar_framing(&g)] {
            for r in g.routes() {
                assert!(coherent(&g, &f, &r, &r));
                for q in g.routes() {
                    assert_eq!(coherent(&g, &f, &r, &q), coherent(&g, &f, &q, &r));
                }
            }
        }
    }

    #[test]
    fn clique_counts() {
        let g = setup("NENEENEE");
        let length = maximal_cliques(&g, &length_framing(&g));
        assert_eq!(length.len(), 7);
        assert!(length.iter().all(|c| c.len() == 9));
        let planar = maximal_cliques(&g, &planar_framing(&g));
        assert_eq!(planar.len(), 7);
        assert!(planar.iter().all(|c| c.len() == 9));
        assert_ne!(length, planar);

        let g = setup("N");
        let cliques = maximal_cliques(&g, &length_framing(&g));
        assert_eq!(cliques.len(), 1);
        assert_eq!(cliques[0].len(), 2);
    }

    #[test]
    fn other_framings_still_triangulate() {
        // a framing with reversed in-orders is neither length nor planar,
        // yet the number of maximal cliques is forced by the volume
        let g = setup("NENEENEE");
        let weird = length_framing(&g).with_reversed_in_orders();
        let cliques = maximal_cliques(&g, &weird);
        assert_eq!(cliques.len(), 7);
        assert!(cliques.iter().all(|c| c.len() == 9));
        assert_ne!(cliques, maximal_cliques(&g, &length_framing(&g)));
        let report = verify_triangulation(&g, &cliques, 50, 7);
        assert!(report.pass(), "{}", report.summary());
    }

    #[test]
    fn simplex_flows_conserve_and_are_unimodular() {
        let g = setup("N");
        let cliques = maximal_cliques(&g, &length_framing(&g));
        let flows = simplex_of(&g, &cliques[0]);
        assert_eq!(flows.len(), 2);
        for flow in &flows {
            assert!(flow.iter().all(|&x| x == 0 || x == 1));
            let net = g.net_flow(flow);
            assert_eq!(net[0], 1);
            assert_eq!(*net.last().unwrap(), -1);
        }
        let g = setup("NENEENEE");
        let chart = geom::chart_edges(&g);
        for f in [length_framing(&g), planar_framing(&g)] {
            for c in maximal_cliques(&g, &f) {
                let pts: Vec<Vec<i64>> = c
                    .routes
                    .iter()
                    .map(|r| geom::route_chart(&g, &chart, r))
                    .collect();
                assert_eq!(geom::simplex_lattice_det(&pts).abs(), 1);
            }
        }
    }

    #[test]
    fn dual_graph_shapes() {
        let g = setup("NENEENEE");
        let length = dual_graph(&maximal_cliques(&g, &length_framing(&g)));
        assert_eq!(length.cliques.len(), 7);
        assert_eq!(length.edges.len(), 8);
        let planar = dual_graph(&maximal_cliques(&g, &planar_framing(&g)));
        assert_eq!(planar.edges.len(), 8);

        let g = setup("N");
        let single = dual_graph(&maximal_cliques(&g, &length_framing(&g)));
        assert_eq!((single.cliques.len(), single.edges.len()), (1, 0));
    }

    #[test]
    fn verifier_passes_both_framings() {
        let g = setup("NENEENEE");
        for f in [length_framing(&g), planar_framing(&g)] {
            let cliques = maximal_cliques(&g, &f);
            let report = verify_triangulation(&g, &cliques, 1000, 42);
            assert!(report.pass(), "{}", report.summary());
        }
    }

    #[test]
    fn verifier_designed_failures() {
        let g = setup("NENEENEE");
        let cliques = maximal_cliques(&g, &length_framing(&g));

        let mut dropped = cliques.clone();
        dropped.pop();
        let report = verify_triangulation(&g, &dropped, 20, 1);
        assert!(report.volume_failure.is_some());

        let mut duplicated = cliques.clone();
        duplicated.push(duplicated[0].clone());
        let report = verify_triangulation(&g, &duplicated, 20, 1);
        assert!(!report.pairwise_failures.is_empty());
    }

    #[test]
    fn dot_and_json_output() {
        let g = setup("NENE");
        let dual = dual_graph(&maximal_cliques(&g, &planar_framing(&g)));
        let dot = dual.to_dot("dual", None);
        assert!(dot.starts_with("graph dual {"));
        let js = dual.to_json(Some(&["x".into(), "y".into()]));
        assert_eq!(js["nodes"][0], "x");
    }
}
