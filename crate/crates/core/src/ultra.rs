//! Dotted lines, the minimax (bottleneck) pseudometric, and the
//! ultrametrization quotient `U(X)`.
//!
//! The minimax distance between two points is the largest edge on the path
//! joining them in a minimum spanning tree. We run Kruskal over the sorted
//! pairs; when two components merge at height `h`, every cross pair gets
//! `u = h`. The merge sequence is the single-linkage dendrogram.

use std::collections::VecDeque;

use crate::correspondence::{gh_exact, Budget};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn sets(&self) -> usize {
        self.sets
    }
}

/// A finite sequence of points; consecutive points are its steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DottedLine {
    points: Vec<usize>,
}

impl DottedLine {
    pub fn new(points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(DottedLine { points })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }
}

/// Ultrametric length: the longest step of the line.
pub fn dotted_length(line: &DottedLine, x: &FiniteMetricSpace) -> Result<f64> {
    if let Some(&bad) = line.points.iter().find(|&&p| p >= x.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: x.len() });
    }
    Ok(line
        .points
        .windows(2)
        .map(|w| x.d(w[0], w[1]))
        .fold(0.0, f64::max))
}

/// One agglomeration step: clusters containing `a` and `b` merge at `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

fn sorted_pairs(x: &FiniteMetricSpace) -> Vec<(f64, usize, usize)> {
    let n = x.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((x.d(i, j), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    edges
}

/// Minimax matrix together with the single-linkage merge sequence.
pub fn single_linkage(x: &FiniteMetricSpace) -> (Vec<Vec<f64>>, Vec<Merge>) {
    let n = x.len();
    let mut u = vec![vec![0.0; n]; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut uf = UnionFind::new(n);
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for (h, i, j) in sorted_pairs(x) {
        let (ri, rj) = (uf.find(i), uf.find(j));
        if ri == rj {
            continue;
        }
        for &p in &members[ri] {
            for &q in &members[rj] {
                u[p][q] = h;
                u[q][p] = h;
            }
        }
        uf.union(ri, rj);
        let root = uf.find(ri);
        let other = if root == ri { rj } else { ri };
        let moved = std::mem::take(&mut members[other]);
        members[root].extend(moved);
        merges.push(Merge { a: i, b: j, height: h, size: members[root].len() });
        if merges.len() + 1 == n {
            break;
        }
    }
    (u, merges)
}

/// `|xy|_u`: the minimal ultrametric length over dotted lines from x to y.
pub fn minimax_matrix(x: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    single_linkage(x).0
}

/// Result of ultrametrizing a finite (pseudo)metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricResult {
    /// Minimax distances between the original points.
    pub u_matrix: Vec<Vec<f64>>,
    /// Points grouped by zero minimax distance, each class sorted,
    /// classes ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Point index to class index.
    pub projection: Vec<usize>,
    /// `U(X)`: classes with the minimax distance between representatives.
    pub quotient: FiniteMetricSpace,
    /// Single-linkage merges in nondecreasing height.
    pub merges: Vec<Merge>,
}

impl UltrametricResult {
    pub fn diameter(&self) -> f64 {
        self.quotient.diameter()
    }
}

pub fn ultrametrize(x: &FiniteMetricSpace) -> UltrametricResult {
    let (u, merges) = single_linkage(x);
    let n = x.len();
    let eps = x.eps();
    let mut projection = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if projection[i] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let class: Vec<usize> = (i..n).filter(|&j| projection[j] == usize::MAX && u[i][j] <= eps).collect();
        for &j in &class {
            projection[j] = c;
        }
        classes.push(class);
    }
    let labels = classes
        .iter()
        .map(|c| {
            if c.len() == 1 {
                x.label(c[0]).to_string()
            } else {
                let names: Vec<&str> = c.iter().map(|&j| x.label(j)).collect();
                format!("{{{}}}", names.join(","))
            }
        })
        .collect();
    let matrix = classes
        .iter()
        .map(|a| classes.iter().map(|b| u[a[0]][b[0]]).collect())
        .collect();
    let quotient = FiniteMetricSpace::new(labels, matrix, eps)
        .expect("minimax distances between distinct classes form an ultrametric");
    UltrametricResult { u_matrix: u, classes, projection, quotient, merges }
}

/// `d_GH(U(X), U(Y))`, a certified lower bound for `d_GH(X, Y)`.
pub fn gh_lower_ultra(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: Budget) -> Result<f64> {
    let ux = ultrametrize(x);
    let uy = ultrametrize(y);
    Ok(gh_exact(&ux.quotient, &uy.quotient, budget)?.value)
}

/// `diam U(X) / 2`: the distance from X to path-connected spaces.
pub fn connectivity_defect(x: &FiniteMetricSpace) -> f64 {
    ultrametrize(x).diameter() / 2.0
}

/// Is the graph with edges `{ d <= t }` connected? Breadth-first search,
/// independent of the minimax computation.
pub fn threshold_connected(x: &FiniteMetricSpace, t: f64) -> bool {
    let n = x.len();
    let tol = x.tol();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(p) = queue.pop_front() {
        for q in 0..n {
            if !seen[q] && tol.le(x.d(p, q), t) {
                seen[q] = true;
                count += 1;
                queue.push_back(q);
            }
        }
    }
    count == n
}

/// Does `m` satisfy `m(x,z) <= max(m(x,y), m(y,z))` within `eps`?
pub fn is_ultrametric(m: &[Vec<f64>], eps: f64) -> bool {
    let n = m.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m[a][c] <= m[a][b].max(m[b][c]) + eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_EPS;

    fn tri() -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(3, DEFAULT_EPS, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (1, 2) => 2.0,
            _ => 3.0,
        })
        .unwrap()
    }

    fn clusters() -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&[0.0, 0.5, 10.0, 10.5], DEFAULT_EPS).unwrap()
    }

    #[test]
    fn dotted_lengths() {
        let x = tri();
        assert_eq!(dotted_length(&DottedLine::new(vec![0]).unwrap(), &x).unwrap(), 0.0);
        assert_eq!(dotted_length(&DottedLine::new(vec![0, 1, 2]).unwrap(), &x).unwrap(), 2.0);
        assert_eq!(dotted_length(&DottedLine::new(vec![0, 2]).unwrap(), &x).unwrap(), 3.0);
        assert!(matches!(
            dotted_length(&DottedLine::new(vec![0, 7]).unwrap(), &x),
            Err(Error::IndexOutOfRange { index: 7, len: 3 })
        ));
        assert!(DottedLine::new(vec![]).is_err());
    }

    #[test]
    fn minimax_on_triangle() {
        let u = minimax_matrix(&tri());
        assert_eq!(u[0][1], 1.0);
        assert_eq!(u[1][2], 2.0);
        assert_eq!(u[0][2], 2.0);
    }

    #[test]
    fn ultrametric_input_is_a_fixed_point() {
        let x = FiniteMetricSpace::from_fn(4, DEFAULT_EPS, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (2, 3) => 2.0,
            _ => 5.0,
        })
        .unwrap();
        assert_eq!(minimax_matrix(&x), x.matrix());
    }

    #[test]
    fn sup_norm_patch_is_a_unit_simplex() {
        let g = FiniteMetricSpace::sup_norm_grid(5, 2, DEFAULT_EPS).unwrap();
        let u = minimax_matrix(&g);
        for (i, row) in u.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn ultrametrize_examples() {
        let p = ultrametrize(&FiniteMetricSpace::one_point());
        assert_eq!(p.classes, vec![vec![0]]);
        assert_eq!(p.quotient.len(), 1);

        let coords: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let net = FiniteMetricSpace::on_line(&coords, DEFAULT_EPS).unwrap();
        let r = ultrametrize(&net);
        assert_eq!(r.quotient.len(), 11);
        for i in 0..11 {
            for j in 0..11 {
                if i != j {
                    assert!((r.u_matrix[i][j] - 0.1).abs() < 1e-12);
                }
            }
        }

        let c = ultrametrize(&clusters());
        assert_eq!(c.u_matrix[0][1], 0.5);
        assert_eq!(c.u_matrix[2][3], 0.5);
        assert_eq!(c.u_matrix[0][3], 9.5);
        assert_eq!(c.u_matrix[1][2], 9.5);
        assert_eq!(c.merges.len(), 3);
        assert_eq!(c.merges.last().unwrap().height, 9.5);
        assert_eq!(c.merges.last().unwrap().size, 4);
    }

    #[test]
    fn zero_distance_points_are_glued() {
        let x = FiniteMetricSpace::pseudometric(
            vec!["a".into(), "a2".into(), "b".into()],
            vec![vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]],
            DEFAULT_EPS,
        )
        .unwrap();
        let r = ultrametrize(&x);
        assert_eq!(r.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(r.projection, vec![0, 0, 1]);
        assert_eq!(r.quotient.label(0), "{a,a2}");
        assert_eq!(r.quotient.d(0, 1), 2.0);
    }

    #[test]
    fn connectivity_defect_examples() {
        assert_eq!(connectivity_defect(&FiniteMetricSpace::one_point()), 0.0);
        assert_eq!(connectivity_defect(&clusters()), 4.75);
        let coords: Vec<f64> = (0..=10).map(f64::from).collect();
        let net = FiniteMetricSpace::on_line(&coords, DEFAULT_EPS).unwrap();
        assert_eq!(connectivity_defect(&net), 0.5);
    }

    #[test]
    fn threshold_connectivity_examples() {
        let c = clusters();
        assert!(threshold_connected(&c, c.diameter()));
        assert!(!threshold_connected(&c, 9.4));
        assert!(threshold_connected(&c, 9.5));
        assert!(threshold_connected(&FiniteMetricSpace::one_point(), 0.0));
    }

    #[test]
    fn lower_ultra_examples() {
        let b = Budget::default();
        let x = clusters();
        assert_eq!(gh_lower_ultra(&x, &x, b).unwrap(), 0.0);
        let flat = FiniteMetricSpace::pseudometric(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            DEFAULT_EPS,
        )
        .unwrap();
        assert_eq!(gh_lower_ultra(&flat, &x, b).unwrap(), ultrametrize(&x).diameter() / 2.0);
    }

    #[test]
    fn union_find_counts_sets() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        assert!(uf.union(2, 3));
        assert_eq!(uf.sets(), 2);
        assert!(uf.union(0, 3));
        assert_eq!(uf.find(2), uf.find(1));
    }
}
