//! The bijections tying routes, cliques, and ν-Catalan objects together:
//! routes <-> arcs on the node line of EνN, routes <-> lattice points above
//! ν (once through arcs, once through bounded faces of the embedding),
//! length cliques <-> (I,J̄)-trees and ν-trees, planar cliques <-> ν-Dyck
//! paths, and gravity diagrams <-> ν-Dyck paths.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::caracol::{CaracolGraph, EdgeId, Route};
use crate::framing::Clique;
use crate::path::{LatticePath, LatticePoint, Step};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("arc ({0}, {1}) is not realizable for this path")]
    BadArc(usize, usize),
    #[error("point {0} is not a lattice point weakly above the path")]
    PointOutside(LatticePoint),
    #[error("route set does not map to an increasing non-crossing tree")]
    NotATree,
    #[error("point set is not the point set of a monotone lattice path")]
    NotAPath,
    #[error("rotation preconditions violated at {0}")]
    BadRotation(LatticePoint),
    #[error("malformed gravity diagram: {0}")]
    BadDiagram(String),
}

/// Node line of the extended path EνN: positions 1..=k carry the steps,
/// E nodes get plain labels E_0..E_b left to right, N nodes N_0..N_a, and
/// every E node also gets the refined label (j, i) marking it as the i-th
/// step before the j-th N node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IJEncoding {
    pub k: usize,
    /// step at each position 1..=k (index 0 unused)
    pub kinds: Vec<Option<Step>>,
    /// plain E index or N index per position
    pub plain: Vec<usize>,
    /// refined (j, i) for E positions
    pub refined: Vec<Option<(usize, usize)>>,
}

impl IJEncoding {
    pub fn i_positions(&self) -> Vec<usize> {
        (1..=self.k)
            .filter(|&p| self.kinds[p] == Some(Step::E))
            .collect()
    }

    pub fn jbar_positions(&self) -> Vec<usize> {
        (1..=self.k)
            .filter(|&p| self.kinds[p] == Some(Step::N))
            .collect()
    }

    pub fn position_of_refined(&self, j: usize, i: usize) -> Option<usize> {
        (1..=self.k).find(|&p| self.refined[p] == Some((j, i)))
    }

    pub fn position_of_nth_north(&self, l: usize) -> Option<usize> {
        (1..=self.k).find(|&p| self.kinds[p] == Some(Step::N) && self.plain[p] + 1 == l + 1 && self.plain[p] == l)
    }
}

/// Label the node line of EνN.
pub fn ij_encoding(nu: &LatticePath) -> IJEncoding {
    let mut steps = vec![Step::E];
    steps.extend_from_slice(nu.steps());
    steps.push(Step::N);
    let k = steps.len();
    let mut kinds = vec![None; k + 1];
    let mut plain = vec![0usize; k + 1];
    let mut refined = vec![None; k + 1];
    let (mut e_seen, mut n_seen) = (0usize, 0usize);
    for (idx, &s) in steps.iter().enumerate() {
        let pos = idx + 1;
        kinds[pos] = Some(s);
        match s {
            Step::E => {
                plain[pos] = e_seen;
                e_seen += 1;
            }
            Step::N => {
                plain[pos] = n_seen;
                n_seen += 1;
            }
        }
    }
    // refined E labels: walk back from each N over its preceding E run
    let mut next_n = 1usize;
    let mut run_start = 1usize;
    for pos in 1..=k {
        if kinds[pos] == Some(Step::N) {
            let mut dist = 1usize;
            for e_pos in (run_start..pos).rev() {
                refined[e_pos] = Some((next_n, dist));
                dist += 1;
            }
            next_n += 1;
            run_start = pos + 1;
        }
    }
    IJEncoding { k, kinds, plain, refined }
}

/// An arc of the node line, tail at an E node, head at an N node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

/// Route to arc: R(j,i,l) becomes (E_{j,i}, N_l).
pub fn phi(enc: &IJEncoding, r: &Route) -> Arc {
    let tail = enc
        .position_of_refined(r.j, r.i)
        .expect("valid route has a refined E label");
    let head = enc
        .jbar_positions()
        .into_iter()
        .find(|&p| enc.plain[p] + 1 == r.l + 1 && enc.plain[p] == r.l)
        .expect("valid route has an N label");
    Arc { tail, head }
}

/// Arc to route; rejects arcs whose tail/head labels do not form a route.
pub fn phi_inv(enc: &IJEncoding, arc: &Arc) -> Result<Route, MapError> {
    if arc.tail >= arc.head || arc.tail < 1 || arc.head > enc.k {
        return Err(MapError::BadArc(arc.tail, arc.head));
    }
    let (Some(Step::E), Some(Step::N)) = (enc.kinds[arc.tail], enc.kinds[arc.head]) else {
        return Err(MapError::BadArc(arc.tail, arc.head));
    };
    let (j, i) = enc.refined[arc.tail].ok_or(MapError::BadArc(arc.tail, arc.head))?;
    let l = enc.plain[arc.head];
    if l < j {
        return Err(MapError::BadArc(arc.tail, arc.head));
    }
    Ok(Route::new(j, i, l))
}

/// Plain coordinates of an arc: (E index, N index).
pub fn gamma(enc: &IJEncoding, arc: &Arc) -> LatticePoint {
    LatticePoint::new(enc.plain[arc.tail], enc.plain[arc.head])
}

/// Route to lattice point through the arc picture: θ = γ∘φ.
pub fn theta(enc: &IJEncoding, r: &Route) -> LatticePoint {
    gamma(enc, &phi(enc, r))
}

/// One bounded face of the fixed planar embedding (path on the x-axis,
/// source multiedges above, bypasses below).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub above_axis: bool,
    /// bottom-to-top rank for faces above the axis, bypass source vertex
    /// for faces below
    pub index: usize,
    pub boundary: Vec<EdgeId>,
}

/// The a+b bounded faces: one under each source multiedge (ranked bottom
/// to top by length, ties by label from below) and one above each bypass.
pub fn bounded_faces(g: &CaracolGraph) -> Vec<Face> {
    let mut faces = Vec::new();
    let mut arcs: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| g.edges()[e].u == 1 && g.edges()[e].v >= 3)
        .collect();
    arcs.sort_by_key(|&e| {
        let edge = g.edges()[e];
        (edge.v, std::cmp::Reverse(edge.label))
    });
    for (idx, &arc) in arcs.iter().enumerate() {
        let rank = idx + 1;
        let mut boundary = vec![arc];
        if idx == 0 {
            for v in 1..g.edges()[arc].v {
                boundary.push(g.path_edge(v));
            }
        } else {
            let below = arcs[idx - 1];
            boundary.push(below);
            for v in g.edges()[below].v..g.edges()[arc].v {
                boundary.push(g.path_edge(v));
            }
        }
        faces.push(Face { above_axis: true, index: rank, boundary });
    }
    for source in 2..=g.a() + 1 {
        let bypass = g.bypass_edge(source).expect("bypass exists");
        let mut boundary = vec![bypass, g.path_edge(source)];
        if source + 1 <= g.a() + 1 {
            boundary.push(g.bypass_edge(source + 1).expect("bypass exists"));
        } else {
            for v in source + 1..=g.n() {
                boundary.push(g.path_edge(v));
            }
        }
        faces.push(Face { above_axis: false, index: source, boundary });
    }
    faces
}

/// Rank of a route's initial edge among the source multiedges, bottom to
/// top; 0 when the route starts on the axis.
fn initial_arc_rank(g: &CaracolGraph, r: &Route) -> usize {
    if r.j == 1 {
        return 0;
    }
    let e = g.arc_edge(r.j + 1, r.i).expect("valid route");
    let edge = g.edges()[e];
    let mut rank = 0;
    for other in g.edges() {
        if other.u == 1
            && other.v >= 3
            && (other.v, std::cmp::Reverse(other.label)) <= (edge.v, std::cmp::Reverse(edge.label))
        {
            rank += 1;
        }
    }
    rank
}

/// Does the face lie below the route's curve? A face above the axis does
/// iff it sits under the route's initial multiedge; a face below the axis
/// does iff the route's terminal edge leaves from a vertex beyond it.
pub fn face_below_route(g: &CaracolGraph, face: &Face, r: &Route) -> bool {
    if face.above_axis {
        initial_arc_rank(g, r) >= face.index
    } else {
        face.index <= r.l
    }
}

/// Route to lattice point by counting bounded faces of the embedding below
/// the route, separately above and below the axis.
pub fn psi(g: &CaracolGraph, r: &Route) -> LatticePoint {
    let faces = bounded_faces(g);
    let x = faces
        .iter()
        .filter(|f| f.above_axis && face_below_route(g, f, r))
        .count();
    let y = faces
        .iter()
        .filter(|f| !f.above_axis && face_below_route(g, f, r))
        .count();
    LatticePoint::new(x, y)
}

/// Inverse of ψ, by inverting the face-count map over all routes.
pub fn psi_inv(g: &CaracolGraph, p: LatticePoint) -> Result<Route, MapError> {
    g.routes()
        .into_iter()
        .find(|r| psi(g, r) == p)
        .ok_or(MapError::PointOutside(p))
}

/// Compatibility mode for lattice points above ν.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncompatMode {
    /// strictly SW/NE pairs whose spanning rectangle stays above ν
    NuTree,
    /// strictly increasing x with strictly decreasing y
    Planar,
}

/// The lattice points weakly above ν in the bounding rectangle, row by row.
pub fn points_above(nu: &LatticePath) -> Vec<LatticePoint> {
    let prefix = nu.prefix_sums();
    let mut pts = Vec::new();
    for (y, &cap) in prefix.iter().enumerate() {
        for x in 0..=cap {
            pts.push(LatticePoint::new(x, y));
        }
    }
    pts
}

pub fn is_above(nu: &LatticePath, p: LatticePoint) -> bool {
    p.y <= nu.north_count() && p.x <= nu.prefix_sums()[p.y]
}

pub fn incompatible(nu: &LatticePath, p: LatticePoint, q: LatticePoint, mode: IncompatMode) -> bool {
    let (sw, ne) = if (p.x, p.y) <= (q.x, q.y) { (p, q) } else { (q, p) };
    match mode {
        IncompatMode::Planar => {
            (p.x < q.x && p.y > q.y) || (q.x < p.x && q.y > p.y)
        }
        IncompatMode::NuTree => {
            sw.x < ne.x
                && sw.y < ne.y
                && is_above(nu, LatticePoint::new(ne.x, sw.y))
        }
    }
}

/// An increasing, non-crossing, maximal arc set on the node line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IJTree {
    pub arcs: BTreeSet<Arc>,
}

impl IJTree {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.arcs.iter().map(|a| vec![a.tail, a.head]).collect::<Vec<_>>())
    }
}

pub fn arcs_cross(a: &Arc, b: &Arc) -> bool {
    let (first, second) = if a.tail <= b.tail { (a, b) } else { (b, a) };
    first.tail < second.tail && second.tail < first.head && first.head < second.head
}

/// Length-framed clique to (I,J̄)-tree through φ. Validates the tree
/// axioms: increasing arcs, pairwise non-crossing, full tree size.
pub fn clique_to_ijtree(enc: &IJEncoding, c: &Clique) -> Result<IJTree, MapError> {
    let arcs: BTreeSet<Arc> = c.routes.iter().map(|r| phi(enc, r)).collect();
    let expected = enc.i_positions().len() + enc.jbar_positions().len() - 1;
    if arcs.len() != expected {
        return Err(MapError::NotATree);
    }
    let list: Vec<&Arc> = arcs.iter().collect();
    for (i, a) in list.iter().enumerate() {
        if a.tail >= a.head {
            return Err(MapError::NotATree);
        }
        for b in &list[i + 1..] {
            if arcs_cross(a, b) {
                return Err(MapError::NotATree);
            }
        }
    }
    Ok(IJTree { arcs })
}

/// A maximal set of pairwise ν-compatible lattice points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NuTree {
    pub points: BTreeSet<(usize, usize)>,
}

impl NuTree {
    pub fn from_points(points: impl IntoIterator<Item = LatticePoint>) -> Self {
        NuTree {
            points: points.into_iter().map(|p| (p.x, p.y)).collect(),
        }
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(&(p.x, p.y))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.points.iter().collect::<Vec<_>>())
    }
}

/// Check maximal ν-compatibility plus the rooted-tree property: every
/// point except (0,a) has a point above it in its column or a point to
/// its left in its row, never both.
pub fn validate_nutree(nu: &LatticePath, t: &NuTree) -> Result<(), MapError> {
    let a = nu.north_count();
    let b = nu.east_count();
    let pts: Vec<LatticePoint> = t.points.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect();
    for p in &pts {
        if !is_above(nu, *p) {
            return Err(MapError::PointOutside(*p));
        }
    }
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            if incompatible(nu, *p, *q, IncompatMode::NuTree) {
                return Err(MapError::NotATree);
            }
        }
    }
    if pts.len() != a + b + 1 || !t.contains(LatticePoint::new(0, a)) {
        return Err(MapError::NotATree);
    }
    for candidate in points_above(nu) {
        if !t.contains(candidate)
            && pts
                .iter()
                .all(|p| !incompatible(nu, *p, candidate, IncompatMode::NuTree))
        {
            return Err(MapError::NotATree);
        }
    }
    for p in &pts {
        if (p.x, p.y) == (0, a) {
            continue;
        }
        let above = pts.iter().any(|q| q.x == p.x && q.y > p.y);
        let left = pts.iter().any(|q| q.y == p.y && q.x < p.x);
        if above == left {
            return Err(MapError::NotATree);
        }
    }
    Ok(())
}

/// Length-framed clique to ν-tree through θ.
pub fn clique_to_nutree(enc: &IJEncoding, nu: &LatticePath, c: &Clique) -> Result<NuTree, MapError> {
    let t = NuTree::from_points(c.routes.iter().map(|r| theta(enc, r)));
    validate_nutree(nu, &t)?;
    Ok(t)
}

/// Rotation at r: p sits above r in its column, q right of r in its row,
/// and r is replaced by the opposite rectangle corner. The result must be
/// a ν-tree again, which pins p and q to the nearest such points.
pub fn nutree_rotate(
    nu: &LatticePath,
    t: &NuTree,
    r: LatticePoint,
    p: LatticePoint,
    q: LatticePoint,
) -> Result<NuTree, MapError> {
    for pt in [r, p, q] {
        if !t.contains(pt) {
            return Err(MapError::BadRotation(pt));
        }
    }
    let ok = (p.x == r.x && p.y > r.y && q.y == r.y && q.x > r.x)
        || (q.x == r.x && q.y > r.y && p.y == r.y && p.x > r.x);
    if !ok {
        return Err(MapError::BadRotation(r));
    }
    let (above, right) = if p.x == r.x { (p, q) } else { (q, p) };
    let corner = (right.x, above.y);
    let mut points = t.points.clone();
    points.remove(&(r.x, r.y));
    points.insert(corner);
    let rotated = NuTree { points };
    validate_nutree(nu, &rotated).map_err(|_| MapError::BadRotation(r))?;
    Ok(rotated)
}

/// All canonical rotations of a ν-tree: for each point with both a nearest
/// point above in its column and a nearest point right in its row.
pub fn nutree_rotations(nu: &LatticePath, t: &NuTree) -> Vec<(LatticePoint, NuTree)> {
    let pts: Vec<LatticePoint> = t.points.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect();
    let mut out = Vec::new();
    for r in &pts {
        let above = pts
            .iter()
            .filter(|q| q.x == r.x && q.y > r.y)
            .min_by_key(|q| q.y);
        let right = pts
            .iter()
            .filter(|q| q.y == r.y && q.x > r.x)
            .min_by_key(|q| q.x);
        if let (Some(&p), Some(&q)) = (above, right) {
            let rotated = nutree_rotate(nu, t, *r, p, q).expect("nearest corners rotate");
            out.push((*r, rotated));
        }
    }
    out
}

/// The ν-tree of a ν-Dyck path by right flushing: rows are filled bottom
/// to top with as many points as the path has on that height, at the
/// rightmost columns not blocked by a previously placed non-leftmost point.
pub fn right_flushing(nu: &LatticePath, mu: &LatticePath) -> NuTree {
    let prefix = nu.prefix_sums();
    let runs = mu.east_runs();
    let mut forbidden: BTreeSet<usize> = BTreeSet::new();
    let mut points = BTreeSet::new();
    for (y, &run) in runs.iter().enumerate() {
        let want = run + 1;
        let mut placed = Vec::new();
        for x in (0..=prefix[y]).rev() {
            if placed.len() == want {
                break;
            }
            if !forbidden.contains(&x) {
                placed.push(x);
            }
        }
        assert_eq!(placed.len(), want, "flushing always fits");
        for &x in &placed {
            points.insert((x, y));
        }
        let leftmost = *placed.iter().min().unwrap();
        for &x in &placed {
            if x != leftmost {
                forbidden.insert(x);
            }
        }
    }
    NuTree { points }
}

/// Inverse of right flushing: the path whose height-y run is one less than
/// the tree's row-y point count.
pub fn path_of_nutree(t: &NuTree) -> Result<LatticePath, MapError> {
    let a = t.points.iter().map(|&(_, y)| y).max().ok_or(MapError::NotAPath)?;
    let mut counts = vec![0usize; a + 1];
    for &(_, y) in &t.points {
        counts[y] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(MapError::NotAPath);
    }
    let mut steps = Vec::new();
    for (y, &c) in counts.iter().enumerate() {
        if y > 0 {
            steps.push(Step::N);
        }
        steps.extend(std::iter::repeat(Step::E).take(c - 1));
    }
    Ok(LatticePath::new(steps))
}

/// Planar-framed clique to ν-Dyck path: the ψ-images must chain into a
/// monotone staircase.
pub fn clique_to_dyckpath(g: &CaracolGraph, c: &Clique) -> Result<LatticePath, MapError> {
    let mut pts: Vec<LatticePoint> = c.routes.iter().map(|r| psi(g, r)).collect();
    pts.sort_by_key(|p| (p.x, p.y));
    let mut steps = Vec::new();
    for w in pts.windows(2) {
        match (w[1].x - w[0].x, w[1].y as i64 - w[0].y as i64) {
            (1, 0) => steps.push(Step::E),
            (0, 1) => steps.push(Step::N),
            _ => return Err(MapError::NotAPath),
        }
    }
    if pts.first() != Some(&LatticePoint::new(0, 0)) {
        return Err(MapError::NotAPath);
    }
    Ok(LatticePath::new(steps))
}

/// In-degree gravity diagram in canonical form: per grid column the number
/// of dots on its proper segment (0 for a trivial singleton column).
/// Segments are right-justified in the unrotated picture and weakly
/// shorten left to right here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GravityDiagram {
    pub segment_dots: Vec<usize>,
}

impl GravityDiagram {
    pub fn validate(&self, nu: &LatticePath) -> Result<(), MapError> {
        let a = nu.north_count();
        let b = nu.east_count();
        if self.segment_dots.len() != b {
            return Err(MapError::BadDiagram(format!(
                "expected {b} columns, got {}",
                self.segment_dots.len()
            )));
        }
        let prefix = nu.prefix_sums();
        let col_height = |x: usize| (0..=a).find(|&y| prefix[y] > x).expect("x < b");
        for (x, &s) in self.segment_dots.iter().enumerate() {
            if s == 1 {
                return Err(MapError::BadDiagram(format!(
                    "column {x} has a length-one proper segment"
                )));
            }
            if s > a + 1 - col_height(x) {
                return Err(MapError::BadDiagram(format!(
                    "segment in column {x} exceeds the dots above the path"
                )));
            }
        }
        for w in self.segment_dots.windows(2) {
            if w[1] > w[0] {
                return Err(MapError::BadDiagram(
                    "segments must weakly shorten left to right".into(),
                ));
            }
        }
        Ok(())
    }

    /// The unrotated picture: rows of dots under the column counts of ν,
    /// '*' marking dots on proper segments.
    pub fn ascii_art(&self, nu: &LatticePath) -> String {
        let a = nu.north_count();
        let b = nu.east_count();
        let prefix = nu.prefix_sums();
        let mut out = String::new();
        for row in 1..=b {
            let seg = self
                .segment_dots
                .get(row - 1)
                .copied()
                .unwrap_or(0);
            for col in 0..a {
                // column of α_{col+3} holds prefix[col+1] dots
                let dots = prefix[col + 1];
                let on_segment = seg >= 2 && col >= a - seg + 1;
                let ch = if dots >= row {
                    if on_segment || (seg >= 2 && a - col <= seg - 1) { '*' } else { 'o' }
                } else {
                    ' '
                };
                out.push(ch);
                out.push(' ');
            }
            out.push('\n');
        }
        let _ = write!(out, "");
        out
    }
}

/// ν-Dyck path to gravity diagram: the proper segment over column x covers
/// the dots strictly above the path, provided there are at least two.
pub fn gravity_from_dyck(nu: &LatticePath, mu: &LatticePath) -> GravityDiagram {
    let a = nu.north_count();
    let b = nu.east_count();
    let prefix_mu = mu.prefix_sums();
    let col_height = |x: usize| (0..=a).find(|&y| prefix_mu[y] > x).expect("x < b");
    let segment_dots = (0..b)
        .map(|x| {
            let v = a + 1 - col_height(x);
            if v >= 2 {
                v
            } else {
                0
            }
        })
        .collect();
    GravityDiagram { segment_dots }
}

/// Gravity diagram back to the ν-Dyck path it separates.
pub fn dyck_from_gravity(nu: &LatticePath, d: &GravityDiagram) -> Result<LatticePath, MapError> {
    d.validate(nu)?;
    let a = nu.north_count();
    let b = nu.east_count();
    let heights: Vec<usize> = d
        .segment_dots
        .iter()
        .map(|&s| a + 1 - s.max(1))
        .collect();
    let mut steps = Vec::new();
    let mut h = 0usize;
    for x in 0..b {
        for _ in h..heights[x] {
            steps.push(Step::N);
        }
        h = heights[x];
        steps.push(Step::E);
    }
    for _ in h..a {
        steps.push(Step::N);
    }
    Ok(LatticePath::new(steps))
}

/// Points that the length framing forces into every simplex: the root
/// (0,a), the valleys of ν, the initial point of each leading N step, and
/// the terminal point of each trailing E step.
pub fn length_always_points(nu: &LatticePath) -> BTreeSet<(usize, usize)> {
    let a = nu.north_count();
    let b = nu.east_count();
    let mut out: BTreeSet<(usize, usize)> = BTreeSet::new();
    out.insert((0, a));
    for v in nu.valleys() {
        out.insert((v.x, v.y));
    }
    let leading = nu.steps().iter().take_while(|s| **s == Step::N).count();
    for y in 0..leading {
        out.insert((0, y));
    }
    let trailing = nu.steps().iter().rev().take_while(|s| **s == Step::E).count();
    for t in 0..trailing {
        out.insert((b - t, a));
    }
    out
}

/// Points the planar framing forces into every simplex: the lattice points
/// of the leading N steps and of the trailing E steps of ν.
pub fn planar_always_points(nu: &LatticePath) -> BTreeSet<(usize, usize)> {
    let a = nu.north_count();
    let b = nu.east_count();
    let mut out: BTreeSet<(usize, usize)> = BTreeSet::new();
    let leading = nu.steps().iter().take_while(|s| **s == Step::N).count();
    for y in 0..=leading {
        out.insert((0, y));
    }
    let trailing = nu.steps().iter().rev().take_while(|s| **s == Step::E).count();
    for t in 0..=trailing {
        out.insert((b - t, a));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caracol::build_caracol;
    use crate::framing::{length_framing, maximal_cliques, planar_framing};

    fn p(s: &str) -> LatticePath {
        LatticePath::parse(s).unwrap()
    }

    #[test]
    fn encoding_positions() {
        let enc = ij_encoding(&p("NENEENEE"));
        assert_eq!(enc.k, 10);
        assert_eq!(enc.i_positions(), vec![1, 3, 5, 6, 8, 9]);
        assert_eq!(enc.jbar_positions(), vec![2, 4, 7, 10]);

        let enc = ij_encoding(&p("N"));
        assert_eq!(enc.k, 3);
        assert_eq!(enc.i_positions(), vec![1]);
        assert_eq!(enc.jbar_positions(), vec![2, 3]);

        let enc = ij_encoding(&p("NENE"));
        assert_eq!(enc.i_positions(), vec![1, 3, 5]);
        assert_eq!(enc.jbar_positions(), vec![2, 4, 6]);
    }

    #[test]
    fn refined_labels() {
        // EνN for ν = NENEENEE: positions 5 and 6 are the run before the
        // third N, distances 2 and 1
        let enc = ij_encoding(&p("NENEENEE"));
        assert_eq!(enc.refined[1], Some((1, 1)));
        assert_eq!(enc.refined[5], Some((3, 2)));
        assert_eq!(enc.refined[6], Some((3, 1)));
        assert_eq!(enc.refined[8], Some((4, 2)));
        assert_eq!(enc.refined[9], Some((4, 1)));
    }

    #[test]
    fn phi_round_trip_everywhere() {
        for s in ["N", "NENE", "NEN", "NENEENEE", "NE2NEN"] {
            let nu = p(s);
            let g = build_caracol(&nu).unwrap();
            let enc = ij_encoding(&nu);
            for r in g.routes() {
                let arc = phi(&enc, &r);
                assert!(arc.tail < arc.head);
                assert_eq!(phi_inv(&enc, &arc).unwrap(), r, "{s} {r}");
            }
        }
    }

    #[test]
    fn theta_is_a_bijection_onto_points_above() {
        for s in ["N", "NENE", "NEN", "NENEENEE", "NE2NEN", "NNEEN"] {
            let nu = p(s);
            let g = build_caracol(&nu).unwrap();
            let enc = ij_encoding(&nu);
            let image: BTreeSet<(usize, usize)> = g
                .routes()
                .iter()
                .map(|r| {
                    let pt = theta(&enc, r);
                    (pt.x, pt.y)
                })
                .collect();
            let expected: BTreeSet<(usize, usize)> = points_above(&nu)
                .into_iter()
                .map(|pt| (pt.x, pt.y))
                .collect();
            assert_eq!(image.len(), g.routes().len(), "injective for {s}");
            assert_eq!(image, expected, "surjective for {s}");
        }
        assert_eq!(points_above(&p("NENEENEE")).len(), 13);
    }

    #[test]
    fn psi_matches_theta_here() {
        // the face-count map and the arc map agree on caracol graphs; both
        // are kept because they are defined by different constructions
        for s in ["N", "NENE", "NEN", "NENEENEE", "NE2NEN"] {
            let nu = p(s);
            let g = build_caracol(&nu).unwrap();
            let enc = ij_encoding(&nu);
            for r in g.routes() {
                assert_eq!(psi(&g, &r), theta(&enc, &r), "{s} {r}");
            }
        }
    }

    #[test]
    fn psi_base_cases() {
        let g = build_caracol(&p("NENEENEE")).unwrap();
        // the all-axis start (1,2)... route has nothing below it
        assert_eq!(psi(&g, &Route::new(1, 1, 1)), LatticePoint::new(0, 0));
        let faces = bounded_faces(&g);
        assert_eq!(faces.len(), g.dim());
        assert_eq!(faces.iter().filter(|f| f.above_axis).count(), g.b());
        // ψ inverts cleanly
        for r in g.routes() {
            assert_eq!(psi_inv(&g, psi(&g, &r)).unwrap(), r);
        }
        assert!(psi_inv(&g, LatticePoint::new(5, 0)).is_err());
    }

    #[test]
    fn length_cliques_are_ij_trees_and_nu_trees() {
        let nu = p("NENEENEE");
        let g = build_caracol(&nu).unwrap();
        let enc = ij_encoding(&nu);
        let cliques = maximal_cliques(&g, &length_framing(&g));
        let mut trees = BTreeSet::new();
        for c in &cliques {
            let tree = clique_to_ijtree(&enc, c).unwrap();
            assert_eq!(tree.arcs.len(), 9);
            trees.insert(tree);
            let nut = clique_to_nutree(&enc, &nu, c).unwrap();
            assert!(nut.contains(LatticePoint::new(0, 3)));
        }
        assert_eq!(trees.len(), 7);
    }

    #[test]
    fn ij_trees_match_brute_force_maximal_noncrossing_sets() {
        for s in ["NENE", "NEN", "NENEE"] {
            let nu = p(s);
            let g = build_caracol(&nu).unwrap();
            let enc = ij_encoding(&nu);
            // brute force: all increasing arcs, maximal non-crossing subsets
            let arcs: Vec<Arc> = g.routes().iter().map(|r| phi(&enc, r)).collect();
            let n = arcs.len();
            let mut maximal = BTreeSet::new();
            for mask in 0u32..(1 << n) {
                let chosen: Vec<&Arc> =
                    (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| &arcs[k]).collect();
                let ok = chosen
                    .iter()
                    .enumerate()
                    .all(|(i, a)| chosen[i + 1..].iter().all(|b| !arcs_cross(a, b)));
                if !ok {
                    continue;
                }
                let extendable = (0..n).any(|k| {
                    mask >> k & 1 == 0 && chosen.iter().all(|a| !arcs_cross(a, &arcs[k]))
                });
                if !extendable {
                    maximal.insert(
                        chosen.iter().map(|a| **a).collect::<BTreeSet<Arc>>(),
                    );
                }
            }
            let from_cliques: BTreeSet<BTreeSet<Arc>> =
                maximal_cliques(&g, &length_framing(&g))
                    .iter()
                    .map(|c| clique_to_ijtree(&enc, c).unwrap().arcs)
                    .collect();
            assert_eq!(from_cliques, maximal, "tree sets for {s}");
        }
    }

    #[test]
    fn figure_three_rotation() {
        let nu = p("NENEENEE");
        let t = NuTree {
            points: [(0, 3), (2, 2), (1, 3), (0, 0), (1, 1), (1, 2), (3, 2), (4, 3), (5, 3)]
                .into_iter()
                .collect(),
        };
        validate_nutree(&nu, &t).unwrap();
        let rotations = nutree_rotations(&nu, &t);
        assert_eq!(rotations.len(), 1);
        let (r, rotated) = &rotations[0];
        assert_eq!(*r, LatticePoint::new(1, 2));
        assert!(rotated.contains(LatticePoint::new(2, 3)));
        assert!(!rotated.contains(LatticePoint::new(1, 2)));
        // the explicit interface with chosen p and q
        let manual = nutree_rotate(
            &nu,
            &t,
            LatticePoint::new(1, 2),
            LatticePoint::new(1, 3),
            LatticePoint::new(2, 2),
        )
        .unwrap();
        assert_eq!(manual, *rotated);
        // a non-corner triple is rejected
        assert!(nutree_rotate(
            &nu,
            &t,
            LatticePoint::new(0, 0),
            LatticePoint::new(1, 1),
            LatticePoint::new(0, 3)
        )
        .is_err());
    }

    #[test]
    fn flushing_round_trip_and_rotation_lattice() {
        use crate::lattice::tamari_lattice;
        for s in ["NENE", "NENEENEE", "NEN", "NNEE"] {
            let nu = p(s);
            for mu in crate::path::nu_dyck_paths(&nu) {
                let t = right_flushing(&nu, &mu);
                validate_nutree(&nu, &t).unwrap();
                assert_eq!(path_of_nutree(&t).unwrap(), mu, "{s} / {mu}");
            }
            // rotation closure from the flushed minimum equals the tamari
            // cover relation transported along the flushing bijection
            let tam = tamari_lattice(&nu);
            for mu in crate::path::nu_dyck_paths(&nu) {
                let t = right_flushing(&nu, &mu);
                let rotated_paths: BTreeSet<String> = nutree_rotations(&nu, &t)
                    .into_iter()
                    .map(|(_, t2)| path_of_nutree(&t2).unwrap().to_string())
                    .collect();
                let mu_idx = tam.index_of(&mu.to_string()).unwrap();
                let covers_up: BTreeSet<String> = tam
                    .covers
                    .iter()
                    .filter(|&&(l, _)| l == mu_idx)
                    .map(|&(_, u)| tam.elements[u].clone())
                    .collect();
                assert_eq!(rotated_paths, covers_up, "{s} at {mu}");
            }
        }
    }

    #[test]
    fn planar_cliques_are_dyck_paths() {
        let nu = p("NENEENEE");
        let g = build_caracol(&nu).unwrap();
        let cliques = maximal_cliques(&g, &planar_framing(&g));
        let mut images = BTreeSet::new();
        for c in &cliques {
            let mu = clique_to_dyckpath(&g, c).unwrap();
            assert!(mu.weakly_above(&nu));
            assert_eq!(c.routes.len(), 9);
            images.insert(mu.to_string());
        }
        assert_eq!(images.len(), 7);
        // the all-boundary clique maps to the top path
        assert!(images.contains("NNNEEEEE"));
    }

    #[test]
    fn incompatibility_modes() {
        let nu = p("NENEENEE");
        assert!(incompatible(
            &nu,
            LatticePoint::new(1, 2),
            LatticePoint::new(2, 1),
            IncompatMode::Planar
        ));
        assert!(!incompatible(
            &nu,
            LatticePoint::new(1, 1),
            LatticePoint::new(1, 2),
            IncompatMode::Planar
        ));
        // strictly SW/NE but the rectangle dips below ν: compatible
        let nu2 = p("NEN");
        assert!(!incompatible(
            &nu2,
            LatticePoint::new(0, 0),
            LatticePoint::new(1, 1),
            IncompatMode::NuTree
        ));
        assert!(incompatible(
            &nu2,
            LatticePoint::new(0, 1),
            LatticePoint::new(1, 2),
            IncompatMode::NuTree
        ));
    }

    #[test]
    fn gravity_round_trip_and_goldens() {
        let nu = p("NE2NENNE3NE");
        // no proper segments: the separating path is ν itself
        let bottom = GravityDiagram { segment_dots: vec![0; 7] };
        assert_eq!(dyck_from_gravity(&nu, &bottom).unwrap(), nu);
        // all columns fully segmented: the top path
        let a = nu.north_count();
        let prefix = nu.prefix_sums();
        let col_height = |x: usize| (0..=a).find(|&y| prefix[y] > x).unwrap();
        let full: Vec<usize> = (0..7).map(|x| a + 1 - col_height(x)).collect();
        let top = dyck_from_gravity(&nu, &GravityDiagram { segment_dots: full }).unwrap();
        assert_eq!(top, p("N5E7"));
        // the worked diagram with segment profile (5,3,2,2,0,0,0)
        let d = GravityDiagram { segment_dots: vec![5, 3, 2, 2, 0, 0, 0] };
        let mu = dyck_from_gravity(&nu, &d).unwrap();
        assert_eq!(mu, p("NENNENEENE3"));
        assert_eq!(gravity_from_dyck(&nu, &mu), d);
        // round trip across every dyck path
        for mu in crate::path::nu_dyck_paths(&nu).into_iter().take(40) {
            let d = gravity_from_dyck(&nu, &mu);
            d.validate(&nu).unwrap();
            assert_eq!(dyck_from_gravity(&nu, &d).unwrap(), mu);
        }
        // malformed: segment longer than the dot column
        let bad = GravityDiagram { segment_dots: vec![6, 0, 0, 0, 0, 0, 0] };
        assert!(bad.validate(&nu).is_err());
        // malformed: lengthening left to right
        let bad = GravityDiagram { segment_dots: vec![0, 2, 0, 0, 0, 0, 0] };
        assert!(bad.validate(&nu).is_err());
    }

    #[test]
    fn always_point_characterizations() {
        let nu = p("NENEENEE");
        let g = build_caracol(&nu).unwrap();
        let enc = ij_encoding(&nu);
        let length_cliques = maximal_cliques(&g, &length_framing(&g));
        let mut in_all: BTreeSet<(usize, usize)> = points_above(&nu)
            .into_iter()
            .map(|pt| (pt.x, pt.y))
            .collect();
        for c in &length_cliques {
            let pts: BTreeSet<(usize, usize)> = c
                .routes
                .iter()
                .map(|r| {
                    let pt = theta(&enc, r);
                    (pt.x, pt.y)
                })
                .collect();
            in_all = in_all.intersection(&pts).copied().collect();
        }
        assert_eq!(in_all, length_always_points(&nu));
        assert_eq!(in_all.len(), 6);

        let planar_cliques = maximal_cliques(&g, &planar_framing(&g));
        let mut in_all: BTreeSet<(usize, usize)> = points_above(&nu)
            .into_iter()
            .map(|pt| (pt.x, pt.y))
            .collect();
        for c in &planar_cliques {
            let pts: BTreeSet<(usize, usize)> =
                c.routes.iter().map(|r| {
                    let pt = psi(&g, r);
                    (pt.x, pt.y)
                }).collect();
            in_all = in_all.intersection(&pts).copied().collect();
        }
        assert_eq!(in_all, planar_always_points(&nu));
        assert_eq!(in_all.len(), 5);
    }

    #[test]
    fn ascii_art_renders() {
        let nu = p("NE2NENNE3NE");
        let d = GravityDiagram { segment_dots: vec![5, 3, 2, 2, 0, 0, 0] };
        let art = d.ascii_art(&nu);
        assert_eq!(art.lines().count(), 7);
        assert!(art.contains('*'));
        assert!(art.contains('o'));
    }
}
