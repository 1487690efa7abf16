//! Finite metric spaces, subsets of a common ambient space, diameters and
//! (oriented) Hausdorff distances.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tol::{Tol, DEFAULT_EPS};

/// A finite metric space stored as a dense, row-major distance matrix.
///
/// Values are immutable after construction. [`FiniteMetricSpace::new`]
/// rejects pseudometrics; [`FiniteMetricSpace::pseudometric`] accepts
/// zero off-diagonal entries and exists only so that zero-distance gluing
/// can be exercised through ultrametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    tol: Tol,
    pseudo: bool,
}

impl FiniteMetricSpace {
    /// Validates and builds a true metric space.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        Self::build(labels, matrix, eps, false)
    }

    /// Like [`new`](Self::new) but with the default tolerance.
    pub fn from_matrix(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(labels, matrix, DEFAULT_EPS)
    }

    /// Builds a pseudometric space: off-diagonal zero distances are allowed,
    /// every other invariant is still checked.
    pub fn pseudometric(labels: Vec<String>, matrix: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        Self::build(labels, matrix, eps, true)
    }

    /// The canonical one-point space.
    pub fn one_point() -> Self {
        FiniteMetricSpace {
            labels: vec!["*".to_string()],
            dist: vec![0.0],
            tol: Tol::default(),
            pseudo: false,
        }
    }

    /// Points `0, 1, ..., n-1` labelled `p0, p1, ...`, with distances taken
    /// from `f(i, j)` for `i < j`.
    pub fn from_fn(n: usize, eps: f64, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut matrix = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                matrix[i][j] = d;
                matrix[j][i] = d;
            }
        }
        Self::new(default_labels(n), matrix, eps)
    }

    /// Points on the real line with the absolute-difference metric.
    pub fn on_line(coords: &[f64], eps: f64) -> Result<Self> {
        Self::from_fn(coords.len(), eps, |i, j| (coords[i] - coords[j]).abs())
    }

    /// The `side^dim` patch `{0, ..., side-1}^dim` of the integer lattice
    /// with the sup-norm metric.
    pub fn sup_norm_grid(side: usize, dim: usize, eps: f64) -> Result<Self> {
        let pts = lattice_points(side, dim);
        let n = pts.len();
        let mut labels = Vec::with_capacity(n);
        for p in &pts {
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            labels.push(format!("({})", coords.join(",")));
        }
        let mut matrix = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] = sup_dist(&pts[i], &pts[j]);
            }
        }
        Self::new(labels, matrix, eps)
    }

    fn build(labels: Vec<String>, matrix: Vec<Vec<f64>>, eps: f64, pseudo: bool) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if matrix.len() != n {
            return Err(Error::DimensionMismatch { labels: n, rows: matrix.len() });
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::RaggedMatrix { row, len: r.len(), expected: n });
            }
        }
        let tol = Tol(eps);
        let lab = |i: usize| labels[i].clone();
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { a: lab(i), b: lab(j) });
                }
                if v < 0.0 {
                    return Err(Error::NegativeDistance { a: lab(i), b: lab(j), value: v });
                }
            }
            if matrix[i][i] != 0.0 {
                return Err(Error::NonzeroDiagonal { label: lab(i), value: matrix[i][i] });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (ab, ba) = (matrix[i][j], matrix[j][i]);
                if !tol.eq(ab, ba) {
                    return Err(Error::AsymmetricMatrix { a: lab(i), b: lab(j), ab, ba });
                }
                if !pseudo && ab <= eps {
                    return Err(Error::DuplicatePoint { a: lab(i), b: lab(j), value: ab });
                }
            }
        }
        // Upper triangle is authoritative.
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                dist[i * n + j] = matrix[i][j];
                dist[j * n + i] = matrix[i][j];
            }
        }
        for a in 0..n {
            for c in (a + 1)..n {
                let ac = dist[a * n + c];
                for b in 0..n {
                    if b == a || b == c {
                        continue;
                    }
                    let (ab, bc) = (dist[a * n + b], dist[b * n + c]);
                    if tol.gt(ac, ab + bc) {
                        return Err(Error::TriangleViolation {
                            a: lab(a),
                            b: lab(b),
                            c: lab(c),
                            ab,
                            bc,
                            ac,
                        });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist, tol, pseudo })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: spaces have at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn eps(&self) -> f64 {
        self.tol.0
    }

    /// True when the space was built through [`pseudometric`](Self::pseudometric).
    pub fn is_pseudometric(&self) -> bool {
        self.pseudo
    }

    /// The distance matrix as nested rows.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance from `i` to any other point.
    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    /// The whole space viewed as a subset of itself.
    pub fn full(&self) -> SubsetRef<'_> {
        SubsetRef { space: self, members: (0..self.len()).collect() }
    }

    pub fn subset(&self, members: impl IntoIterator<Item = usize>) -> Result<SubsetRef<'_>> {
        SubsetRef::new(self, members)
    }

    /// Subset selected by labels.
    pub fn subset_by_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetRef<'_>> {
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            idx.push(self.index_of(l).ok_or_else(|| Error::UnknownVertex(l.to_string()))?);
        }
        SubsetRef::new(self, idx)
    }

    /// The induced metric space on `members` (labels preserved).
    pub fn restrict(&self, members: &[usize]) -> Result<FiniteMetricSpace> {
        for &m in members {
            if m >= self.len() {
                return Err(Error::IndexOutOfRange { index: m, len: self.len() });
            }
        }
        let labels = members.iter().map(|&m| self.labels[m].clone()).collect();
        let matrix = members
            .iter()
            .map(|&a| members.iter().map(|&b| self.d(a, b)).collect())
            .collect();
        Self::build(labels, matrix, self.eps(), self.pseudo)
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn lattice_points(side: usize, dim: usize) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(pts.len() * side);
        for p in &pts {
            for c in 0..side as i64 {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

fn sup_dist(a: &[i64], b: &[i64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0) as f64
}

/// A nonempty set of point indices inside a [`FiniteMetricSpace`].
#[derive(Debug, Clone)]
pub struct SubsetRef<'a> {
    space: &'a FiniteMetricSpace,
    members: Vec<usize>,
}

impl<'a> SubsetRef<'a> {
    pub fn new(space: &'a FiniteMetricSpace, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&m) = members.iter().find(|&&m| m >= space.len()) {
            return Err(Error::IndexOutOfRange { index: m, len: space.len() });
        }
        Ok(SubsetRef { space, members })
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for &a in &self.members {
            for &b in &self.members {
                best = best.max(self.space.d(a, b));
            }
        }
        best
    }

    /// `|pA| = min_{a in A} |pa|`.
    pub fn distance_from(&self, p: usize) -> f64 {
        self.members
            .iter()
            .map(|&a| self.space.d(p, a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_subset_of(&self, other: &SubsetRef<'_>) -> bool {
        std::ptr::eq(self.space, other.space)
            && self.members.iter().all(|m| other.members.binary_search(m).is_ok())
    }
}

fn same_ambient(a: &SubsetRef<'_>, b: &SubsetRef<'_>) -> Result<()> {
    if std::ptr::eq(a.space, b.space) {
        Ok(())
    } else {
        Err(Error::DifferentAmbient)
    }
}

/// `sup_{a in A} |aB|` over index sets of one space. An empty `A` gives 0.
pub fn oriented_hausdorff_indices(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if b.is_empty() {
        return Err(Error::EmptyTarget);
    }
    for &i in a.iter().chain(b) {
        if i >= space.len() {
            return Err(Error::IndexOutOfRange { index: i, len: space.len() });
        }
    }
    let mut worst: f64 = 0.0;
    for &p in a {
        let near = b.iter().map(|&q| space.d(p, q)).fold(f64::INFINITY, f64::min);
        worst = worst.max(near);
    }
    Ok(worst)
}

/// Oriented Hausdorff distance from `a` (or the empty set, when `None`) to `b`.
pub fn oriented_hausdorff(a: Option<&SubsetRef<'_>>, b: &SubsetRef<'_>) -> Result<f64> {
    match a {
        None => Ok(0.0),
        Some(a) => {
            same_ambient(a, b)?;
            oriented_hausdorff_indices(a.space, &a.members, &b.members)
        }
    }
}

/// Hausdorff distance between two subsets of the same ambient space.
pub fn hausdorff(a: &SubsetRef<'_>, b: &SubsetRef<'_>) -> Result<f64> {
    same_ambient(a, b)?;
    let ab = oriented_hausdorff_indices(a.space, &a.members, &b.members)?;
    let ba = oriented_hausdorff_indices(a.space, &b.members, &a.members)?;
    Ok(ab.max(ba))
}
