//! Every count the crate can cross-check: the determinant formula, the
//! Kostant partition function and Lidskii volume, gravity diagrams, the
//! Narayana valley tally, h* by shelling and by Ehrhart dilation, the
//! Pitman-Stanley lattice-point count, and facet counts (closed formula
//! plus an exact geometric oracle).

use serde::Serialize;
use thiserror::Error;

use crate::caracol::{in_degree_vector, CaracolGraph};
use crate::geom;
use crate::lattice::young_ideal;
use crate::path::{nu_dyck_paths, LatticePath, Step};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("a and b must be coprime and positive")]
    NotCoprime,
    #[error("h-vector disagreement: {0}")]
    HStarDisagreement(String),
    #[error("negative h* coefficient {0} at index {1}")]
    NegativeHStar(i128, usize),
}

fn binomial(n: i64, r: i64) -> i128 {
    if r < 0 || r > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for k in 0..r {
        acc = acc * (n - k) as i128 / (k + 1) as i128;
    }
    acc
}

/// Number of ν-Dyck paths by the Gessel-Viennot determinant
/// det( C(1 + ν_1 + ... + ν_{a-j}, 1 + j - i) ), 1 <= i,j <= a-1.
pub fn cat_determinant(nu: &LatticePath) -> u128 {
    let runs = nu.nu_runs().expect("normalized path");
    let a = runs.len();
    if a <= 1 {
        return 1;
    }
    let prefix = nu.prefix_sums();
    let m: Vec<Vec<i128>> = (1..a)
        .map(|i| {
            (1..a)
                .map(|j| binomial(1 + prefix[a - j] as i64, 1 + j as i64 - i as i64))
                .collect()
        })
        .collect();
    let det = geom::det_bareiss(m);
    assert!(det >= 0, "path counts are nonnegative");
    det as u128
}

/// The lowest path from (0,0) to (b,a) weakly above the line y = (a/b)x,
/// for coprime a, b. Its Dyck paths are counted by C(a+b, a) / (a+b).
pub fn rational_path(a: usize, b: usize) -> Result<LatticePath, EnumError> {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    if a == 0 || b == 0 || gcd(a, b) != 1 {
        return Err(EnumError::NotCoprime);
    }
    // height over column x is ceil(a(x+1)/b)
    let mut steps = Vec::new();
    let mut height = 0usize;
    for x in 0..b {
        let h = (a * (x + 1)).div_ceil(b);
        for _ in height..h {
            steps.push(Step::N);
        }
        height = h;
        steps.push(Step::E);
    }
    for _ in height..a {
        steps.push(Step::N);
    }
    Ok(LatticePath::new(steps))
}

/// Kostant partition function of car(ν) at an integer vector v indexed by
/// the vertices: the number of ways to write v as a nonnegative integer
/// combination of the edge roots e_u - e_v, with parallel copies counted
/// as distinct coordinates. Depth-first over vertices in topological
/// order; the out-flow demanded at each vertex is its v-entry plus what
/// already arrived.
pub fn kostant(g: &CaracolGraph, v: &[i64]) -> u128 {
    assert_eq!(v.len(), g.vertex_count());
    assert_eq!(v.iter().sum::<i64>(), 0, "target must balance");
    let out_edges: Vec<Vec<usize>> = (0..=g.n())
        .map(|u| if u == 0 { Vec::new() } else { g.out_edges(u) })
        .collect();
    let targets: Vec<usize> = g.edges().iter().map(|e| e.v).collect();
    let mut inflow = vec![0i64; g.vertex_count() + 1];

    fn distribute(
        outs: &[usize],
        idx: usize,
        remaining: i64,
        targets: &[usize],
        out_edges: &[Vec<usize>],
        v: &[i64],
        inflow: &mut Vec<i64>,
        u: usize,
        n: usize,
    ) -> u128 {
        if idx + 1 == outs.len() {
            let t = targets[outs[idx]];
            inflow[t] += remaining;
            let total = next_vertex(u + 1, targets, out_edges, v, inflow, n);
            inflow[t] -= remaining;
            return total;
        }
        let mut total = 0u128;
        let t = targets[outs[idx]];
        for x in 0..=remaining {
            inflow[t] += x;
            total += distribute(outs, idx + 1, remaining - x, targets, out_edges, v, inflow, u, n);
            inflow[t] -= x;
        }
        total
    }

    fn next_vertex(
        u: usize,
        targets: &[usize],
        out_edges: &[Vec<usize>],
        v: &[i64],
        inflow: &mut Vec<i64>,
        n: usize,
    ) -> u128 {
        if u > n {
            return 1;
        }
        let demand = v[u - 1] + inflow[u];
        if demand < 0 {
            return 0;
        }
        if out_edges[u].is_empty() {
            return if demand == 0 {
                next_vertex(u + 1, targets, out_edges, v, inflow, n)
            } else {
                0
            };
        }
        distribute(&out_edges[u], 0, demand, targets, out_edges, v, inflow, u, n)
    }

    next_vertex(1, &targets, &out_edges, v, &mut inflow, g.n())
}

/// Normalized volume of the flow polytope via the Lidskii formula.
pub fn volume_lidskii(g: &CaracolGraph) -> u128 {
    kostant(g, &in_degree_vector(g).entries)
}

/// Number of in-degree gravity diagrams, enumerated directly in canonical
/// form: per grid column a proper-segment dot count that is 0 or at least
/// 2, weakly decreasing left to right, bounded by the room above ν.
pub fn gravity_count(nu: &LatticePath) -> u128 {
    let a = nu.north_count();
    let b = nu.east_count();
    let prefix = nu.prefix_sums();
    // height of ν over column x
    let col_height = |x: usize| (0..=a).find(|&y| prefix[y] > x).expect("x < b");
    let caps: Vec<usize> = (0..b).map(|x| a + 1 - col_height(x)).collect();
    fn rec(x: usize, prev: usize, caps: &[usize]) -> u128 {
        if x == caps.len() {
            return 1;
        }
        let mut total = 0u128;
        // 0 encodes the trivial singleton column
        for s in (0..=caps[x].min(prev)).rev() {
            if s == 1 {
                continue;
            }
            let next_prev = if s == 0 { 0 } else { s };
            total += rec(x + 1, next_prev, caps);
        }
        total
    }
    rec(0, usize::MAX, &caps)
}

/// Valley tally: entry i counts ν-Dyck paths with exactly i valleys,
/// padded to the h* length a+b+1.
pub fn narayana(nu: &LatticePath) -> Vec<u128> {
    let d = nu.north_count() + nu.east_count();
    let mut tally = vec![0u128; d + 1];
    for path in nu_dyck_paths(nu) {
        tally[path.valley_count()] += 1;
    }
    tally
}

/// h*-vector with nonnegative entries indexed 0..=a+b.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HStarVector {
    pub coefficients: Vec<u128>,
}

impl HStarVector {
    pub fn sum(&self) -> u128 {
        self.coefficients.iter().sum()
    }
}

/// h-vector of the planar triangulation from a literal shelling
/// computation: facets (keyed by their vertex sets, the lattice-point sets
/// of the paths) are ordered by a linear extension of the containment
/// order on the partitions NW of the paths, the shelling condition is
/// checked, and the restriction set of each facet collects the vertices
/// whose removal lands in an earlier facet. Several extensions are run
/// and must all agree with the valley tally.
pub fn hstar_shelling(nu: &LatticePath) -> Result<HStarVector, EnumError> {
    use std::collections::BTreeSet;
    let paths = nu_dyck_paths(nu);
    let d = nu.north_count() + nu.east_count();
    // young_ideal is built over nu_dyck_paths in the same order, with ν at
    // the bottom; partition containment runs the other way
    let young = young_ideal(nu);
    let n = paths.len();
    let covers_incl: Vec<(usize, usize)> = young.covers.iter().map(|&(l, u)| (u, l)).collect();
    let extensions = linear_extensions_of_covers(n, &covers_incl, 3);
    let expected = narayana(nu);
    let mut result = None;
    for ext in &extensions {
        let facets: Vec<BTreeSet<(usize, usize)>> = ext
            .iter()
            .map(|&k| {
                paths[k]
                    .lattice_points()
                    .into_iter()
                    .map(|p| (p.x, p.y))
                    .collect()
            })
            .collect();
        for j in 1..facets.len() {
            for i in 0..j {
                let meet: BTreeSet<(usize, usize)> =
                    facets[i].intersection(&facets[j]).copied().collect();
                let witnessed = (0..j).any(|k| {
                    facets[k].intersection(&facets[j]).count() == facets[j].len() - 1
                        && meet.is_subset(&facets[k])
                });
                if !witnessed {
                    return Err(EnumError::HStarDisagreement(format!(
                        "order is not a shelling at facets {i}, {j}"
                    )));
                }
            }
        }
        let mut tally = vec![0u128; d + 1];
        for j in 0..facets.len() {
            let mut restriction = BTreeSet::new();
            for fi in facets.iter().take(j) {
                let diff: Vec<_> = facets[j].difference(fi).copied().collect();
                if diff.len() == 1 {
                    restriction.insert(diff[0]);
                }
            }
            tally[restriction.len()] += 1;
        }
        if tally != expected {
            return Err(EnumError::HStarDisagreement(format!(
                "restriction tally {tally:?} differs from valley tally {expected:?}"
            )));
        }
        result = Some(tally);
    }
    Ok(HStarVector {
        coefficients: result.expect("at least one extension"),
    })
}

/// All linear extensions of a cover relation on 0..n, lexicographically by
/// the enumeration order, truncated to `limit` (0 means no limit).
pub fn linear_extensions_of_covers(
    n: usize,
    covers: &[(usize, usize)],
    limit: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut indeg = vec![0usize; n];
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(l, u) in covers {
        indeg[u] += 1;
        above[l].push(u);
    }
    let mut current = Vec::with_capacity(n);
    let mut ready: Vec<bool> = indeg.iter().map(|&d| d == 0).collect();
    fn rec(
        n: usize,
        above: &[Vec<usize>],
        indeg: &mut Vec<usize>,
        ready: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if limit > 0 && out.len() >= limit {
            return;
        }
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !ready[v] {
                continue;
            }
            ready[v] = false;
            current.push(v);
            for &u in &above[v] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    ready[u] = true;
                }
            }
            rec(n, above, indeg, ready, current, out, limit);
            for &u in &above[v] {
                if indeg[u] == 0 {
                    ready[u] = false;
                }
                indeg[u] += 1;
            }
            current.pop();
            ready[v] = true;
            if limit > 0 && out.len() >= limit {
                return;
            }
        }
    }
    rec(n, &above, &mut indeg, &mut ready, &mut current, &mut out, limit);
    out
}

/// h* from exact dilation counts: E(t) = K(t(e_1 - e_{n+1})) for
/// t = 0..=d, inverted through the binomial transform. The arithmetic is
/// exact 128-bit and every intermediate is checked.
pub fn hstar_ehrhart_oracle(g: &CaracolGraph) -> Result<HStarVector, EnumError> {
    let d = g.dim();
    let mut target = vec![0i64; g.vertex_count()];
    let mut dilates = Vec::with_capacity(d + 1);
    for t in 0..=d as i64 {
        target[0] = t;
        *target.last_mut().unwrap() = -t;
        dilates.push(kostant(g, &target) as i128);
    }
    let mut coefficients = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut h: i128 = 0;
        for j in 0..=i {
            let sign = if (i - j) % 2 == 0 { 1 } else { -1 };
            h = h
                .checked_add(sign * binomial(d as i64 + 1, (i - j) as i64) * dilates[j])
                .expect("no overflow at desk scale");
        }
        if h < 0 {
            return Err(EnumError::NegativeHStar(h, i));
        }
        coefficients.push(h as u128);
    }
    Ok(HStarVector { coefficients })
}

/// f-vector of the clique complex of a coherence graph given as an
/// adjacency matrix: entry k counts cliques with k vertices (entry 0 is
/// the empty face).
pub fn clique_complex_f_vector(adj: &[Vec<bool>]) -> Vec<u128> {
    let n = adj.len();
    let mut f = vec![0u128; n + 1];
    f[0] = 1;
    fn rec(adj: &[Vec<bool>], members: &mut Vec<usize>, start: usize, f: &mut Vec<u128>) {
        for v in start..adj.len() {
            if members.iter().all(|&u| adj[u][v]) {
                members.push(v);
                f[members.len()] += 1;
                rec(adj, members, v + 1, f);
                members.pop();
            }
        }
    }
    rec(adj, &mut Vec::new(), 0, &mut f);
    let top = f.iter().rposition(|&c| c > 0).unwrap_or(0);
    f.truncate(top + 1);
    f
}

/// h-vector of a simplicial complex from its f-vector; `f[k]` counts faces
/// with k vertices. Returns h_0..h_D where D is the facet vertex count.
pub fn h_from_f(f: &[u128]) -> Result<Vec<i128>, EnumError> {
    let cap = f.len() - 1; // vertices per facet
    let mut h = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let mut acc: i128 = 0;
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
            acc += sign * binomial((cap - i) as i64, (k - i) as i64) * f[i] as i128;
        }
        h.push(acc);
    }
    Ok(h)
}

/// Lattice points of the slice of the Pitman-Stanley polytope carrying the
/// path count: y in Z^a, y >= 0, prefix sums bounded by those of ν, total
/// equal to b. Computed by a prefix-sum DP.
pub fn pitman_stanley_points(nu: &LatticePath) -> u128 {
    let runs = nu.nu_runs().expect("normalized path");
    let b = nu.east_count();
    let prefix = nu.prefix_sums();
    let mut ways = vec![0u128; b + 1];
    ways[0] = 1;
    for k in 1..=runs.len() {
        let cap = prefix[k];
        let mut next = vec![0u128; b + 1];
        for s in 0..=cap {
            // y_k = s - (previous prefix) ranges over everything below s
            let total: u128 = (0..=s).map(|p| ways[p]).sum();
            next[s] = total;
        }
        ways = next;
    }
    ways[b]
}

/// Facet count of the flow polytope by the peak formula a + b + peak(ν).
pub fn facet_count(nu: &LatticePath) -> usize {
    nu.north_count() + nu.east_count() + nu.peak_count()
}

/// Facet count by exact enumeration of supporting hyperplanes of the
/// vertex set in the chart coordinates.
pub fn facet_count_geometric(g: &CaracolGraph) -> usize {
    let chart = geom::chart_edges(g);
    let points: Vec<Vec<i64>> = g
        .routes()
        .iter()
        .map(|r| geom::route_chart(g, &chart, r))
        .collect();
    geom::enumerate_facets(&points).len()
}
