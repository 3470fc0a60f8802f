//! Lattice paths over the alphabet {N, E} and their statistics.
//!
//! A path ν from (0,0) to (b,a) bounds the family of ν-Dyck paths: the
//! lattice paths with the same endpoints that stay weakly above ν. Both
//! the rotation order (Tamari) and the NE-swap order (Young ideal) live
//! on that set; see [`crate::lattice`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

// E before N so that derived path ordering agrees with the word's
// lexicographic (ASCII) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    E,
    N,
}

/// A point of the grid, 0-based: x is the column, y the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: usize,
    pub y: usize,
}

impl LatticePoint {
    pub fn new(x: usize, y: usize) -> Self {
        LatticePoint { x, y }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("empty path text")]
    Empty,
    #[error("invalid character {ch:?} at position {pos}")]
    BadChar { pos: usize, ch: char },
    #[error("digit at position {pos} has no preceding step letter")]
    DanglingDigit { pos: usize },
    #[error("path does not start with an N step")]
    NotNormalized,
    #[error("point {0} does not lie on the path")]
    PointNotOnPath(LatticePoint),
    #[error("point {0} is not a valley of the path")]
    NotAValley(LatticePoint),
    #[error("paths have different endpoints")]
    EndpointMismatch,
}

/// A word over {N, E}, stored step by step.
///
/// Run-length exponents are only a parsing convenience; the explicit word
/// is kept because a ν-Dyck path need not start with N even when ν does.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePath {
    steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(steps: Vec<Step>) -> Self {
        LatticePath { steps }
    }

    /// Parse a path word. Case-insensitive; a digit run repeats the single
    /// preceding step letter, so "NE2NE" means NEENE and "N3" means NNN.
    pub fn parse(text: &str) -> Result<Self, PathError> {
        if text.is_empty() {
            return Err(PathError::Empty);
        }
        let mut steps = Vec::new();
        let mut last: Option<Step> = None;
        let mut chars = text.char_indices().peekable();
        while let Some((pos, ch)) = chars.next() {
            match ch {
                'N' | 'n' => {
                    steps.push(Step::N);
                    last = Some(Step::N);
                }
                'E' | 'e' => {
                    steps.push(Step::E);
                    last = Some(Step::E);
                }
                '0'..='9' => {
                    let step = last.ok_or(PathError::DanglingDigit { pos })?;
                    let mut count = ch.to_digit(10).unwrap() as usize;
                    while let Some(&(_, d)) = chars.peek() {
                        if let Some(v) = d.to_digit(10) {
                            count = count * 10 + v as usize;
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    // the letter itself already contributed one copy
                    steps.pop();
                    steps.extend(std::iter::repeat(step).take(count));
                    last = None;
                }
                _ => return Err(PathError::BadChar { pos, ch }),
            }
        }
        Ok(LatticePath { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of N steps (the height a).
    pub fn north_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == Step::N).count()
    }

    /// Number of E steps (the width b).
    pub fn east_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == Step::E).count()
    }

    pub fn is_normalized(&self) -> bool {
        self.steps.first() == Some(&Step::N)
    }

    /// Prepend one N step unless the path already starts with one.
    /// The empty path normalizes to the single step N.
    pub fn normalize(&self) -> LatticePath {
        if self.is_normalized() {
            self.clone()
        } else {
            let mut steps = Vec::with_capacity(self.steps.len() + 1);
            steps.push(Step::N);
            steps.extend_from_slice(&self.steps);
            LatticePath { steps }
        }
    }

    /// E-run lengths between consecutive N steps, indexed by height 0..=a.
    /// Entry 0 counts E steps before the first N.
    pub fn east_runs(&self) -> Vec<usize> {
        let mut runs = vec![0usize];
        for s in &self.steps {
            match s {
                Step::N => runs.push(0),
                Step::E => *runs.last_mut().unwrap() += 1,
            }
        }
        runs
    }

    /// The runs ν_1..ν_a of a normalized path ν = NE^{ν_1}...NE^{ν_a}.
    pub fn nu_runs(&self) -> Result<Vec<usize>, PathError> {
        if !self.is_normalized() {
            return Err(PathError::NotNormalized);
        }
        Ok(self.east_runs()[1..].to_vec())
    }

    /// prefix(y) = number of E steps at heights <= y; the x-coordinate at
    /// which the path leaves height y. Length a+1, prefix(a) = b.
    pub fn prefix_sums(&self) -> Vec<usize> {
        let runs = self.east_runs();
        let mut acc = 0;
        runs.iter()
            .map(|r| {
                acc += r;
                acc
            })
            .collect()
    }

    /// The a+b+1 lattice points visited, in traversal order.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let mut pts = vec![LatticePoint::new(0, 0)];
        let (mut x, mut y) = (0, 0);
        for s in &self.steps {
            match s {
                Step::N => y += 1,
                Step::E => x += 1,
            }
            pts.push(LatticePoint::new(x, y));
        }
        pts
    }

    pub fn contains_point(&self, p: LatticePoint) -> bool {
        self.lattice_points().contains(&p)
    }

    /// Weak dominance: same endpoints and at every height this path has
    /// moved at most as far east as `other`.
    pub fn weakly_above(&self, other: &LatticePath) -> bool {
        if self.north_count() != other.north_count() || self.east_count() != other.east_count() {
            return false;
        }
        self.prefix_sums()
            .iter()
            .zip(other.prefix_sums().iter())
            .all(|(s, o)| s <= o)
    }

    /// Valleys: points at the end of an E step immediately followed by N.
    pub fn valleys(&self) -> Vec<LatticePoint> {
        let pts = self.lattice_points();
        self.steps
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w == &[Step::E, Step::N])
            .map(|(k, _)| pts[k + 1])
            .collect()
    }

    /// (valley count, peak count) = (#EN factors, #NE factors).
    pub fn stats(&self) -> (usize, usize) {
        let valleys = self
            .steps
            .windows(2)
            .filter(|w| w == &[Step::E, Step::N])
            .count();
        let peaks = self
            .steps
            .windows(2)
            .filter(|w| w == &[Step::N, Step::E])
            .count();
        (valleys, peaks)
    }

    pub fn peak_count(&self) -> usize {
        self.stats().1
    }

    pub fn valley_count(&self) -> usize {
        self.stats().0
    }

    /// Partition λ whose Young diagram is the region NW of the path inside
    /// the bounding rectangle: λ_k = prefix(a-k) for k = 1..a.
    pub fn partition(&self) -> Partition {
        let prefix = self.prefix_sums();
        let a = self.north_count();
        let parts = (1..=a).map(|k| prefix[a - k]).collect();
        Partition { parts }
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "(empty)");
        }
        for s in &self.steps {
            match s {
                Step::N => write!(f, "N")?,
                Step::E => write!(f, "E")?,
            }
        }
        Ok(())
    }
}

/// Weakly decreasing parts, trailing zeros kept so the length is always a.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<usize>,
}

impl Partition {
    pub fn contains(&self, other: &Partition) -> bool {
        other
            .parts
            .iter()
            .enumerate()
            .all(|(k, &p)| p == 0 || (k < self.parts.len() && self.parts[k] >= p))
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trimmed: Vec<String> = self
            .parts
            .iter()
            .filter(|p| **p > 0)
            .map(|p| p.to_string())
            .collect();
        if trimmed.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "({})", trimmed.join(","))
        }
    }
}

/// All ν-Dyck paths: paths from (0,0) to (b,a) weakly above ν, generated by
/// run profiles with prefix sums bounded by those of ν. Sorted by word.
pub fn nu_dyck_paths(nu: &LatticePath) -> Vec<LatticePath> {
    let a = nu.north_count();
    let b = nu.east_count();
    let caps = nu.prefix_sums();
    let mut out = Vec::new();
    let mut runs = vec![0usize; a + 1];
    fn rec(
        height: usize,
        placed: usize,
        a: usize,
        b: usize,
        caps: &[usize],
        runs: &mut Vec<usize>,
        out: &mut Vec<LatticePath>,
    ) {
        if height == a {
            runs[a] = b - placed;
            let mut steps = Vec::with_capacity(a + b);
            for (h, &r) in runs.iter().enumerate() {
                if h > 0 {
                    steps.push(Step::N);
                }
                steps.extend(std::iter::repeat(Step::E).take(r));
            }
            out.push(LatticePath::new(steps));
            return;
        }
        for r in 0..=(caps[height] - placed) {
            runs[height] = r;
            rec(height + 1, placed + r, a, b, caps, runs, out);
        }
    }
    rec(0, 0, a, b, &caps, &mut runs, &mut out);
    out.sort();
    out
}

/// Maximum number of east steps that can be appended at p while staying
/// weakly above ν: prefix_ν(y) - x.
pub fn horiz(nu: &LatticePath, mu: &LatticePath, p: LatticePoint) -> Result<usize, PathError> {
    if !mu.contains_point(p) {
        return Err(PathError::PointNotOnPath(p));
    }
    Ok(nu.prefix_sums()[p.y] - p.x)
}

/// Rotation at a valley p of μ: q is the first point after p with
/// horiz_ν(q) = horiz_ν(p); the east step before p and the subpath μ[p,q]
/// are exchanged. Produces the upper cover of μ in the rotation order.
pub fn tamari_rotate(
    nu: &LatticePath,
    mu: &LatticePath,
    p: LatticePoint,
) -> Result<LatticePath, PathError> {
    let pts = mu.lattice_points();
    let idx = pts
        .iter()
        .position(|&q| q == p)
        .ok_or(PathError::PointNotOnPath(p))?;
    let steps = mu.steps();
    let is_valley =
        idx > 0 && idx < steps.len() && steps[idx - 1] == Step::E && steps[idx] == Step::N;
    if !is_valley {
        return Err(PathError::NotAValley(p));
    }
    let target = horiz(nu, mu, p)?;
    let q_idx = (idx + 1..pts.len())
        .find(|&k| nu.prefix_sums()[pts[k].y] - pts[k].x == target)
        .expect("the endpoint always has horiz 0");
    let mut out = Vec::with_capacity(steps.len());
    out.extend_from_slice(&steps[..idx - 1]);
    out.extend_from_slice(&steps[idx..q_idx]);
    out.push(Step::E);
    out.extend_from_slice(&steps[q_idx..]);
    Ok(LatticePath::new(out))
}
