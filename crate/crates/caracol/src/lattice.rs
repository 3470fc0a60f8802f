//! Explicit finite posets given by cover edges, and the two lattice
//! structures on ν-Dyck paths.
//!
//! Both lattices are realized on the same element set with ν as the unique
//! minimum and N^aE^b as the unique maximum. Tamari covers come from
//! rotations at valleys; Young-ideal covers swap one EN factor to NE, so
//! each edge moves exactly one lattice point of the path.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::path::{nu_dyck_paths, tamari_rotate, LatticePath, Step};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("cover index {0} out of range")]
    BadIndex(usize),
    #[error("cover relation contains a cycle")]
    Cyclic,
    #[error("cover ({0}, {1}) is transitively implied")]
    NotIrreducible(usize, usize),
}

/// A finite poset presented by its Hasse diagram: opaque element labels and
/// cover edges (lower, upper).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteLattice {
    pub elements: Vec<String>,
    pub covers: BTreeSet<(usize, usize)>,
}

impl FiniteLattice {
    pub fn new(
        elements: Vec<String>,
        covers: BTreeSet<(usize, usize)>,
    ) -> Result<Self, LatticeError> {
        let lat = FiniteLattice { elements, covers };
        lat.validate()?;
        Ok(lat)
    }

    /// Check acyclicity and that no cover edge is transitively implied.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let n = self.elements.len();
        for &(l, u) in &self.covers {
            if l >= n || u >= n {
                return Err(LatticeError::BadIndex(l.max(u)));
            }
        }
        let order = self.topological_order().ok_or(LatticeError::Cyclic)?;
        let mut pos = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        // reachability along >= 2 edges must not reproduce a cover
        let adj: HashMap<usize, Vec<usize>> = {
            let mut m: HashMap<usize, Vec<usize>> = HashMap::new();
            for &(l, u) in &self.covers {
                m.entry(l).or_default().push(u);
            }
            m
        };
        for &(l, u) in &self.covers {
            let mut stack: Vec<usize> = adj.get(&l).cloned().unwrap_or_default();
            stack.retain(|&v| v != u);
            let mut seen = BTreeSet::new();
            while let Some(v) = stack.pop() {
                if !seen.insert(v) || pos[v] > pos[u] {
                    continue;
                }
                if v == u {
                    return Err(LatticeError::NotIrreducible(l, u));
                }
                if let Some(next) = adj.get(&v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        Ok(())
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.elements.len();
        let mut indeg = vec![0usize; n];
        for &(_, u) in &self.covers {
            indeg[u] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &(l, u) in &self.covers {
                if l == v {
                    indeg[u] -= 1;
                    if indeg[u] == 0 {
                        queue.push(u);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }

    /// The unique minimal element, if unique.
    pub fn minimum(&self) -> Option<usize> {
        let uppers: BTreeSet<usize> = self.covers.iter().map(|&(_, u)| u).collect();
        let mins: Vec<usize> = (0..self.len()).filter(|v| !uppers.contains(v)).collect();
        (mins.len() == 1).then(|| mins[0])
    }

    /// The unique maximal element, if unique.
    pub fn maximum(&self) -> Option<usize> {
        let lowers: BTreeSet<usize> = self.covers.iter().map(|&(l, _)| l).collect();
        let maxs: Vec<usize> = (0..self.len()).filter(|v| !lowers.contains(v)).collect();
        (maxs.len() == 1).then(|| maxs[0])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Cover edges as unordered label pairs.
    pub fn undirected_label_edges(&self) -> BTreeSet<(String, String)> {
        self.covers
            .iter()
            .map(|&(l, u)| {
                let (a, b) = (self.elements[l].clone(), self.elements[u].clone());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "elements": self.elements,
            "covers": self.covers.iter().collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "    rankdir=BT;").unwrap();
        for (k, label) in self.elements.iter().enumerate() {
            writeln!(out, "    n{k} [label=\"{label}\"];").unwrap();
        }
        for &(l, u) in &self.covers {
            writeln!(out, "    n{l} -> n{u};").unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }

    /// Undirected graph isomorphism by degree-refined backtracking.
    /// Intended for the desk-scale instances this crate works with.
    pub fn is_graph_isomorphic(&self, other: &FiniteLattice) -> bool {
        undirected_isomorphic(
            self.len(),
            &self.undirected_edges(),
            other.len(),
            &other.undirected_edges(),
        )
    }

    fn undirected_edges(&self) -> BTreeSet<(usize, usize)> {
        self.covers
            .iter()
            .map(|&(l, u)| (l.min(u), l.max(u)))
            .collect()
    }
}

fn undirected_isomorphic(
    n1: usize,
    e1: &BTreeSet<(usize, usize)>,
    n2: usize,
    e2: &BTreeSet<(usize, usize)>,
) -> bool {
    if n1 != n2 || e1.len() != e2.len() {
        return false;
    }
    let adj = |n: usize, es: &BTreeSet<(usize, usize)>| {
        let mut m = vec![vec![false; n]; n];
        for &(a, b) in es {
            m[a][b] = true;
            m[b][a] = true;
        }
        m
    };
    let a1 = adj(n1, e1);
    let a2 = adj(n2, e2);
    let deg = |m: &Vec<Vec<bool>>| -> Vec<usize> {
        m.iter().map(|row| row.iter().filter(|x| **x).count()).collect()
    };
    let d1 = deg(&a1);
    let d2 = deg(&a2);
    {
        let mut s1 = d1.clone();
        let mut s2 = d2.clone();
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return false;
        }
    }
    // map vertices of graph 1 in decreasing-degree order
    let mut order: Vec<usize> = (0..n1).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(d1[v]));
    let mut mapping = vec![usize::MAX; n1];
    let mut used = vec![false; n2];
    fn rec(
        k: usize,
        order: &[usize],
        a1: &[Vec<bool>],
        a2: &[Vec<bool>],
        d1: &[usize],
        d2: &[usize],
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for w in 0..a2.len() {
            if used[w] || d1[v] != d2[w] {
                continue;
            }
            let consistent = order[..k].iter().all(|&u| a1[v][u] == a2[w][mapping[u]]);
            if consistent {
                mapping[v] = w;
                used[w] = true;
                if rec(k + 1, order, a1, a2, d1, d2, mapping, used) {
                    return true;
                }
                used[w] = false;
                mapping[v] = usize::MAX;
            }
        }
        false
    }
    rec(0, &order, &a1, &a2, &d1, &d2, &mut mapping, &mut used)
}

/// The rotation order on ν-Dyck paths: covers are rotations at valleys.
/// Minimum ν, maximum N^aE^b.
pub fn tamari_lattice(nu: &LatticePath) -> FiniteLattice {
    let paths = nu_dyck_paths(nu);
    let index: BTreeMap<String, usize> = paths
        .iter()
        .enumerate()
        .map(|(k, p)| (p.to_string(), k))
        .collect();
    let mut covers = BTreeSet::new();
    for (k, mu) in paths.iter().enumerate() {
        for valley in mu.valleys() {
            let rotated = tamari_rotate(nu, mu, valley).expect("valley admits a rotation");
            let up = index[&rotated.to_string()];
            covers.insert((k, up));
        }
    }
    FiniteLattice::new(paths.iter().map(|p| p.to_string()).collect(), covers)
        .expect("rotation covers form a Hasse diagram")
}

/// The NE-swap order on ν-Dyck paths, isomorphic to the ideal of partitions
/// contained in λ(ν). Oriented with ν as the minimum: going up swaps one
/// EN factor to NE, removing a box from the partition NW of the path.
pub fn young_ideal(nu: &LatticePath) -> FiniteLattice {
    let paths = nu_dyck_paths(nu);
    let index: BTreeMap<String, usize> = paths
        .iter()
        .enumerate()
        .map(|(k, p)| (p.to_string(), k))
        .collect();
    let mut covers = BTreeSet::new();
    for (k, mu) in paths.iter().enumerate() {
        let steps = mu.steps();
        for t in 0..steps.len().saturating_sub(1) {
            if steps[t] == Step::E && steps[t + 1] == Step::N {
                let mut raised = steps.to_vec();
                raised.swap(t, t + 1);
                let raised = LatticePath::new(raised);
                let up = index[&raised.to_string()];
                covers.insert((k, up));
            }
        }
    }
    FiniteLattice::new(paths.iter().map(|p| p.to_string()).collect(), covers)
        .expect("swap covers form a Hasse diagram")
}
