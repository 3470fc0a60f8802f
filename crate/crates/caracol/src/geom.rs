//! Exact integer geometry on the flow polytope.
//!
//! The polytope lives in edge space; conservation makes the path-edge
//! coordinates dependent, so the chart projects each flow to its values on
//! the non-tree edges (source multiedges, then bypasses). The chart is a
//! lattice-preserving bijection onto a full-dimensional polytope in Z^d,
//! d = a+b, which keeps every determinant and facet computation integral.

use std::collections::BTreeSet;

use crate::caracol::{CaracolGraph, EdgeId, Route};

/// Non-tree edges in a fixed order: source multiedges as listed by the
/// graph, then bypasses by source vertex.
pub fn chart_edges(g: &CaracolGraph) -> Vec<EdgeId> {
    let mut ids = Vec::with_capacity(g.dim());
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.u == 1 && edge.v >= 3 {
            ids.push(e);
        }
    }
    for source in 2..=g.a() + 1 {
        ids.push(g.bypass_edge(source).expect("bypass exists"));
    }
    debug_assert_eq!(ids.len(), g.dim());
    ids
}

/// A route's 0/1 coordinates in the chart.
pub fn route_chart(g: &CaracolGraph, chart: &[EdgeId], r: &Route) -> Vec<i64> {
    let edges: BTreeSet<EdgeId> = g.route_edges(r).expect("valid route").into_iter().collect();
    chart
        .iter()
        .map(|e| if edges.contains(e) { 1 } else { 0 })
        .collect()
}

/// Fraction-free determinant (Bareiss). Exact for integer input.
pub fn det_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r][k] != 0);
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Determinant of the difference lattice spanned by a simplex's vertices.
/// +-1 certifies unimodularity.
pub fn simplex_lattice_det(points: &[Vec<i64>]) -> i128 {
    let d = points.len() - 1;
    let m: Vec<Vec<i128>> = (1..=d)
        .map(|i| {
            (0..d)
                .map(|j| (points[i][j] - points[0][j]) as i128)
                .collect()
        })
        .collect();
    det_bareiss(m)
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(points: &[Vec<i64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let d = points[0].len();
    let mut rows: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| (0..d).map(|j| (p[j] - points[0][j]) as i128).collect())
        .collect();
    // integer row echelon, pivoting without division
    let mut rank = 0;
    for col in 0..d {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pr = &head[rank];
        for row in tail {
            if row[col] != 0 {
                let (a, b) = (pr[col], row[col]);
                for j in 0..d {
                    row[j] = row[j] * a - pr[j] * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A supporting hyperplane normal * x = offset with primitive integer data,
/// sign-normalized so that the polytope satisfies normal * x <= offset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<i128>,
    pub offset: i128,
}

/// Facets of conv(points) by exhausting hyperplanes spanned by d-subsets.
/// Exact and intended for small vertex sets; `points` must affinely span
/// the full ambient dimension.
pub fn enumerate_facets(points: &[Vec<i64>]) -> Vec<Facet> {
    let d = points[0].len();
    assert_eq!(affine_rank(points), d, "points must be full-dimensional");
    let mut facets: BTreeSet<Facet> = BTreeSet::new();
    let n = points.len();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if let Some(f) = hyperplane_through(points, &subset) {
            let mut pos = false;
            let mut neg = false;
            for p in points {
                let val: i128 = f
                    .normal
                    .iter()
                    .zip(p.iter())
                    .map(|(n, x)| n * (*x as i128))
                    .sum();
                if val > f.offset {
                    pos = true;
                } else if val < f.offset {
                    neg = true;
                }
                if pos && neg {
                    break;
                }
            }
            if !(pos && neg) {
                let f = if pos {
                    Facet {
                        normal: f.normal.iter().map(|x| -x).collect(),
                        offset: -f.offset,
                    }
                } else {
                    f
                };
                facets.insert(f);
            }
        }
        // next d-subset of 0..n in lexicographic order
        let mut k = d;
        loop {
            if k == 0 {
                return facets.into_iter().collect();
            }
            k -= 1;
            if subset[k] + 1 <= n - (d - k) {
                subset[k] += 1;
                for j in k + 1..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Hyperplane through d affinely independent points, None if degenerate.
/// The normal is the generalized cross product of the difference vectors,
/// reduced to primitive form with a canonical sign.
fn hyperplane_through(points: &[Vec<i64>], subset: &[usize]) -> Option<Facet> {
    let d = points[0].len();
    let base = &points[subset[0]];
    let rows: Vec<Vec<i128>> = subset[1..]
        .iter()
        .map(|&i| {
            (0..d)
                .map(|j| (points[i][j] - base[j]) as i128)
                .collect()
        })
        .collect();
    // normal_j = (-1)^j * minor_j of the (d-1) x d matrix of differences
    let mut normal = vec![0i128; d];
    for j in 0..d {
        let minor: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let m = det_bareiss(minor);
        normal[j] = if j % 2 == 0 { m } else { -m };
    }
    if normal.iter().all(|&x| x == 0) {
        return None;
    }
    let mut g = 0i128;
    for &x in &normal {
        g = gcd(g, x);
    }
    let mut normal: Vec<i128> = normal.iter().map(|x| x / g).collect();
    let mut offset: i128 = normal
        .iter()
        .zip(base.iter())
        .map(|(n, x)| n * (*x as i128))
        .sum();
    // canonical sign: first nonzero coordinate positive (flipped later if
    // the polytope lies on the positive side)
    if normal.iter().find(|&&x| x != 0).map(|&x| x < 0) == Some(true) {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    Some(Facet { normal, offset })
}

/// Barycentric-coordinate machinery for one unimodular simplex: because the
/// difference matrix has determinant +-1 its inverse is integral, so
/// membership tests on rational points stay in integer arithmetic.
#[derive(Debug, Clone)]
pub struct SimplexFrame {
    base: Vec<i64>,
    inverse: Vec<Vec<i128>>, // row i gives lambda_i as an integer functional
}

impl SimplexFrame {
    pub fn new(points: &[Vec<i64>]) -> Option<SimplexFrame> {
        let d = points.len() - 1;
        let m: Vec<Vec<i128>> = (0..d)
            .map(|row| {
                (0..d)
                    .map(|col| (points[col + 1][row] - points[0][row]) as i128)
                    .collect()
            })
            .collect();
        let det = det_bareiss(m.clone());
        if det.abs() != 1 {
            return None;
        }
        // adjugate / det gives the exact inverse
        let mut inverse = vec![vec![0i128; d]; d];
        for i in 0..d {
            for j in 0..d {
                let minor: Vec<Vec<i128>> = (0..d)
                    .filter(|&r| r != j)
                    .map(|r| (0..d).filter(|&c| c != i).map(|c| m[r][c]).collect())
                    .collect();
                let cof = det_bareiss(minor);
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                inverse[i][j] = sign * cof / det;
            }
        }
        Some(SimplexFrame {
            base: points[0].clone(),
            inverse,
        })
    }

    /// Barycentric numerators (lambda_1.., and 1 - sum as the last entry)
    /// of the rational point `num / den`. All entries >= 0 iff the point is
    /// in the closed simplex; all > 0 iff interior.
    pub fn barycentric_numerators(&self, num: &[i128], den: i128) -> Vec<i128> {
        let d = self.inverse.len();
        let shifted: Vec<i128> = (0..d)
            .map(|j| num[j] - self.base[j] as i128 * den)
            .collect();
        let mut out: Vec<i128> = self
            .inverse
            .iter()
            .map(|row| row.iter().zip(shifted.iter()).map(|(a, b)| a * b).sum())
            .collect();
        let rest = den - out.iter().sum::<i128>();
        out.push(rest);
        out
    }

    pub fn contains(&self, num: &[i128], den: i128) -> bool {
        self.barycentric_numerators(num, den)
            .iter()
            .all(|&x| x >= 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_small() {
        assert_eq!(det_bareiss(vec![]), 1);
        assert_eq!(det_bareiss(vec![vec![5]]), 5);
        assert_eq!(det_bareiss(vec![vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(
            det_bareiss(vec![vec![0, 1, 2], vec![1, 0, 3], vec![4, 5, 6]]),
            16
        );
        assert_eq!(
            det_bareiss(vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]),
            24
        );
    }

    #[test]
    fn unit_cube_facets() {
        let pts: Vec<Vec<i64>> = (0..8)
            .map(|k| vec![k & 1, (k >> 1) & 1, (k >> 2) & 1])
            .collect();
        let facets = enumerate_facets(&pts);
        assert_eq!(facets.len(), 6);
    }

    #[test]
    fn simplex_facets_and_frame() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
        assert_eq!(enumerate_facets(&pts).len(), 3);
        let frame = SimplexFrame::new(&pts).unwrap();
        // centroid (1/3, 1/3) is interior
        assert!(frame
            .barycentric_numerators(&[1, 1], 3)
            .iter()
            .all(|&x| x > 0));
        // (1, 1) is outside
        assert!(!frame.contains(&[1, 1], 1));
        // boundary midpoint (1/2, 1/2)
        assert!(frame.contains(&[1, 1], 2));
    }

    #[test]
    fn affine_rank_cases() {
        assert_eq!(affine_rank(&[vec![0, 0], vec![1, 1], vec![2, 2]]), 1);
        assert_eq!(affine_rank(&[vec![0, 0], vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(affine_rank(&[vec![3, 4]]), 0);
    }

    #[test]
    fn segment_has_two_facets() {
        let pts = vec![vec![0], vec![2], vec![1]];
        assert_eq!(enumerate_facets(&pts).len(), 2);
    }
}
