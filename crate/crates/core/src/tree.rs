//! Finite metric trees, points on their edges, and the analysis of a finite
//! subset `X` against the whole tree: Hausdorff distance, the split of
//! `T \ X` into internal and end points, and the report that ties
//! `d_H(X, T)`, the end-point gap and `diam U(X)` together.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspondence::{gh_exact, Budget};
use crate::error::{Error, Result};
use crate::intervals::{oriented_hausdorff_sets, DistanceField, Interval, IntervalUnionSubset};
use crate::metric::FiniteMetricSpace;
use crate::tol::{Tol, DEFAULT_EPS};
use crate::ultra::{ultrametrize, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// An edge-weighted finite tree with its intrinsic path metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    vdist: Vec<f64>,
    tol: Tol,
}

impl MetricTree {
    /// Validates a tree given as vertex labels and `(u, v, length)` edges.
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize, f64)>, eps: f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut uf = UnionFind::new(n);
        let mut list = Vec::with_capacity(edges.len());
        for (k, &(u, v, length)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::IndexOutOfRange { index: w, len: n });
                }
            }
            if !length.is_finite() || length <= eps {
                return Err(Error::NonpositiveLength { edge: k, length });
            }
            if !uf.union(u, v) {
                return Err(Error::Cycle { edge: k });
            }
            adj[u].push((v, k));
            adj[v].push((u, k));
            list.push(Edge { u, v, length });
        }
        if uf.sets() > 1 {
            return Err(Error::Disconnected { components: uf.sets() });
        }
        let mut tree = MetricTree { labels, edges: list, adj, vdist: Vec::new(), tol: Tol(eps) };
        tree.vdist = tree.all_vertex_distances();
        Ok(tree)
    }

    /// Builds a tree from named edges.
    pub fn from_named(labels: Vec<String>, edges: &[(String, String, f64)], eps: f64) -> Result<Self> {
        let find = |name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for (u, v, len) in edges {
            idx.push((find(u)?, find(v)?, *len));
        }
        Self::new(labels, idx, eps)
    }

    /// `[0, length]` as a single edge between `a` and `b`.
    pub fn segment(length: f64) -> Result<Self> {
        Self::new(vec!["a".into(), "b".into()], vec![(0, 1, length)], DEFAULT_EPS)
    }

    /// Center `o` with `legs` leaves `l0, l1, ...` at distance `length`.
    pub fn star(legs: usize, length: f64) -> Result<Self> {
        let mut labels = vec!["o".to_string()];
        labels.extend((0..legs).map(|i| format!("l{i}")));
        let edges = (0..legs).map(|i| (0, i + 1, length)).collect();
        Self::new(labels, edges, DEFAULT_EPS)
    }

    fn all_vertex_distances(&self) -> Vec<f64> {
        let n = self.labels.len();
        let mut d = vec![f64::INFINITY; n * n];
        for s in 0..n {
            d[s * n + s] = 0.0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, e) in &self.adj[v] {
                    if d[s * n + w].is_infinite() {
                        d[s * n + w] = d[s * n + v] + self.edges[e].length;
                        stack.push(w);
                    }
                }
            }
        }
        d
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<Edge> {
        self.edges
            .get(e)
            .copied()
            .ok_or(Error::UnknownEdge { index: e, len: self.edges.len() })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn eps(&self) -> f64 {
        self.tol.0
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: v, len: self.vertex_count() })
        }
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.vdist[a * self.vertex_count() + b]
    }

    pub fn vertex(&self, v: usize) -> Result<TreePoint> {
        self.check_vertex(v)?;
        Ok(TreePoint::Vertex(v))
    }

    /// The point at `offset` from `u` along edge `e`, canonicalized to a
    /// vertex when it lies within `eps` of an endpoint.
    pub fn point_on_edge(&self, e: usize, offset: f64) -> Result<TreePoint> {
        let edge = self.edge(e)?;
        let eps = self.eps();
        if !offset.is_finite() || offset < -eps || offset > edge.length + eps {
            return Err(Error::OffsetOutOfRange { edge: e, offset, length: edge.length });
        }
        Ok(self.point_clamped(e, offset))
    }

    pub(crate) fn point_clamped(&self, e: usize, offset: f64) -> TreePoint {
        let edge = self.edges[e];
        let eps = self.eps();
        if offset <= eps {
            TreePoint::Vertex(edge.u)
        } else if offset >= edge.length - eps {
            TreePoint::Vertex(edge.v)
        } else {
            TreePoint::Edge { edge: e, offset }
        }
    }

    /// Length of the unique path between two points.
    pub fn distance(&self, p: TreePoint, q: TreePoint) -> f64 {
        use TreePoint::*;
        match (p, q) {
            (Vertex(a), Vertex(b)) => self.vertex_distance(a, b),
            (Vertex(a), Edge { edge, offset }) | (Edge { edge, offset }, Vertex(a)) => {
                let e = self.edges[edge];
                (offset + self.vertex_distance(e.u, a)).min(e.length - offset + self.vertex_distance(e.v, a))
            }
            (Edge { edge: e1, offset: o1 }, Edge { edge: e2, offset: o2 }) => {
                if e1 == e2 {
                    return (o1 - o2).abs();
                }
                let (a, b) = (self.edges[e1], self.edges[e2]);
                let ends_p = [(a.u, o1), (a.v, a.length - o1)];
                let ends_q = [(b.u, o2), (b.v, b.length - o2)];
                let mut best = f64::INFINITY;
                for &(x, dx) in &ends_p {
                    for &(y, dy) in &ends_q {
                        best = best.min(dx + self.vertex_distance(x, y) + dy);
                    }
                }
                best
            }
        }
    }

    /// Vertices of degree at most one (`dT`); a lone vertex counts.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) <= 1).collect()
    }

    pub fn describe(&self, p: TreePoint) -> String {
        match p {
            TreePoint::Vertex(v) => self.labels[v].clone(),
            TreePoint::Edge { edge, offset } => format!("e{edge}@{offset}"),
        }
    }

    /// Points at spacing at most `step` along every edge, vertices included.
    pub fn sample(&self, step: f64) -> Vec<TreePoint> {
        IntervalUnionSubset::whole(self).sample(self, step)
    }

    /// Finite metric space on `points` with the tree distance.
    pub fn metric_space(&self, points: &[TreePoint]) -> Result<FiniteMetricSpace> {
        let labels = points.iter().map(|&p| self.describe(p)).collect();
        let matrix = points
            .iter()
            .map(|&p| points.iter().map(|&q| self.distance(p, q)).collect())
            .collect();
        FiniteMetricSpace::new(labels, matrix, self.eps())
    }
}

/// A point of a tree: a vertex or an interior point of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint {
    Vertex(usize),
    Edge { edge: usize, offset: f64 },
}

impl TreePoint {
    fn sort_key(&self) -> (u8, usize, f64) {
        match *self {
            TreePoint::Vertex(v) => (0, v, 0.0),
            TreePoint::Edge { edge, offset } => (1, edge, offset),
        }
    }

    pub fn cmp_key(&self, other: &Self) -> Ordering {
        let (a, b) = (self.sort_key(), other.sort_key());
        a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2))
    }
}

/// Sorts points and drops any within `eps` of an earlier one.
pub(crate) fn dedup_points(tree: &MetricTree, mut pts: Vec<TreePoint>) -> Vec<TreePoint> {
    pts.sort_by(TreePoint::cmp_key);
    let mut out: Vec<TreePoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|&q| tree.distance(p, q) <= tree.eps()) {
            out.push(p);
        }
    }
    out
}

/// A nonempty, canonical finite subset of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSubsetX {
    points: Vec<TreePoint>,
}

impl TreeSubsetX {
    pub fn new(tree: &MetricTree, points: Vec<TreePoint>) -> Result<Self> {
        let mut canon = Vec::with_capacity(points.len());
        for p in points {
            canon.push(match p {
                TreePoint::Vertex(v) => tree.vertex(v)?,
                TreePoint::Edge { edge, offset } => tree.point_on_edge(edge, offset)?,
            });
        }
        let points = dedup_points(tree, canon);
        if points.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(TreeSubsetX { points })
    }

    pub fn points(&self) -> &[TreePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_set(&self, tree: &MetricTree) -> IntervalUnionSubset {
        IntervalUnionSubset::from_points(tree, &self.points).expect("nonempty canonical points")
    }

    /// `(X, tree distance)` as a finite metric space.
    pub fn metric_space(&self, tree: &MetricTree) -> FiniteMetricSpace {
        tree.metric_space(&self.points).expect("distinct tree points form a metric space")
    }
}

/// `d_H(X, T) = sup_{a in T} |aX|`, exact.
pub fn hausdorff_to_tree(tree: &MetricTree, x: &TreeSubsetX) -> f64 {
    let field = DistanceField::new(tree, &x.as_set(tree)).expect("same tree");
    field.sup_over(&IntervalUnionSubset::whole(tree))
}

/// Split of the tree relative to `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Union of all paths between points of `X` (just `X` for one point).
    pub hull: IntervalUnionSubset,
    /// `Int_X T` is `hull \ X`; empty exactly when the hull has no length.
    pub interior_empty: bool,
    /// Closure of `dX T = T \ hull`, `None` when empty.
    pub boundary: Option<IntervalUnionSubset>,
}

impl Classification {
    pub fn boundary_empty(&self) -> bool {
        self.boundary.is_none()
    }
}

pub fn classify(tree: &MetricTree, x: &TreeSubsetX) -> Classification {
    let n = tree.vertex_count();
    let mut at_vertex = vec![0usize; n];
    let mut on_edge: Vec<Vec<f64>> = vec![Vec::new(); tree.edge_count()];
    for &p in x.points() {
        match p {
            TreePoint::Vertex(v) => at_vertex[v] += 1,
            TreePoint::Edge { edge, offset } => on_edge[edge].push(offset),
        }
    }
    let total = x.len();

    // Root at vertex 0; `below[v]` counts X points in the subtree at v,
    // including interiors of edges inside that subtree.
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    let mut visited = vec![false; n];
    visited[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(w, e) in tree.neighbors(v) {
            if !visited[w] {
                visited[w] = true;
                parent_edge[w] = e;
                stack.push(w);
            }
        }
    }
    let mut below = at_vertex.clone();
    for &v in order.iter().rev() {
        let e = parent_edge[v];
        if e != usize::MAX {
            let edge = tree.edges()[e];
            let p = if edge.u == v { edge.v } else { edge.u };
            below[p] += below[v] + on_edge[e].len();
        }
    }

    let mut hull_edges: Vec<Vec<Interval>> = vec![Vec::new(); tree.edge_count()];
    for (e, edge) in tree.edges().iter().enumerate() {
        // The child side of e is the endpoint whose parent edge is e.
        let child = if parent_edge[edge.v] == e { edge.v } else { edge.u };
        let child_count = below[child];
        let parent_count = total - child_count - on_edge[e].len();
        let (cu, cv) = if child == edge.v { (parent_count, child_count) } else { (child_count, parent_count) };
        let inner = &on_edge[e];
        let iv = if cu > 0 && cv > 0 {
            Some(Interval::new(0.0, edge.length))
        } else if !inner.is_empty() {
            let lo = if cu > 0 { 0.0 } else { inner.iter().copied().fold(f64::INFINITY, f64::min) };
            let hi = if cv > 0 { edge.length } else { inner.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
            Some(Interval::new(lo, hi))
        } else {
            None
        };
        hull_edges[e].extend(iv);
    }
    let verts: Vec<usize> = (0..n).filter(|&v| at_vertex[v] > 0).collect();
    let hull = IntervalUnionSubset::canonical(tree, hull_edges, verts).expect("X is nonempty");
    let interior_empty = hull.is_finite_set(tree.eps());
    let boundary = hull.complement_closure(tree);
    Classification { hull, interior_empty, boundary }
}

/// Status of the strict inequality `d_H(X, T) > d_H(dX T -> X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    BoundaryEmpty,
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeReport {
    pub d_h: f64,
    pub boundary_gap: f64,
    pub boundary_empty: bool,
    pub condition: Condition,
    pub u_diam: f64,
    pub verdict_gh_equals_h: bool,
    /// `|u_diam - 2 d_h|`.
    pub identity_residual: f64,
    /// Whether the residual is within `eps`; meaningful when the verdict holds.
    pub identity_holds: bool,
    /// `d_GH(U(X), Delta_1)` from the exact solver, when within budget.
    pub gh_lower: Option<f64>,
}

pub fn tree_report(tree: &MetricTree, x: &TreeSubsetX, budget: Budget) -> TreeReport {
    let tol = tree.tol();
    let d_h = hausdorff_to_tree(tree, x);
    let cls = classify(tree, x);
    let xs = x.as_set(tree);
    let boundary_gap = oriented_hausdorff_sets(tree, cls.boundary.as_ref(), &xs).expect("same tree");
    let condition = if cls.boundary_empty() {
        Condition::BoundaryEmpty
    } else if tol.gt(d_h, boundary_gap) {
        Condition::Holds
    } else {
        Condition::Fails
    };
    let ux = ultrametrize(&x.metric_space(tree));
    let u_diam = ux.diameter();
    let identity_residual = (u_diam - 2.0 * d_h).abs();
    let gh_lower = budget
        .check(ux.quotient.len(), 1)
        .ok()
        .map(|_| gh_exact(&ux.quotient, &FiniteMetricSpace::one_point(), budget).expect("within budget").value);
    TreeReport {
        d_h,
        boundary_gap,
        boundary_empty: cls.boundary_empty(),
        condition,
        u_diam,
        verdict_gh_equals_h: condition != Condition::Fails,
        identity_residual,
        identity_holds: identity_residual <= tol.eps(),
        gh_lower,
    }
}

/// Generators for reproducible (tree, subset) instances.
#[derive(Debug, Clone, PartialEq)]
pub enum ExampleKind {
    /// `[0, length]` with the net `{0, spacing, 2 spacing, ...} U {length}`.
    SegmentWithNet { length: f64, spacing: f64 },
    /// Star with `legs` legs of equal length; `X` = the leaves.
    Star { legs: usize, length: f64 },
    /// A path of `spine` vertices with one pendant leaf per spine vertex;
    /// `X` = all degree-one vertices.
    Caterpillar { spine: usize, spine_length: f64, leg_length: f64 },
    /// Random recursive tree with a random subset.
    RandomTree { vertices: usize, seed: u64 },
}

pub fn make_example(kind: &ExampleKind) -> Result<(MetricTree, TreeSubsetX)> {
    match *kind {
        ExampleKind::SegmentWithNet { length, spacing } => {
            if !(length > DEFAULT_EPS && spacing > DEFAULT_EPS) {
                return Err(Error::BadParams(format!("length {length} and spacing {spacing} must be positive")));
            }
            let t = MetricTree::segment(length)?;
            let steps = (length / spacing).floor() as usize;
            let mut pts: Vec<TreePoint> = (0..=steps).map(|k| t.point_clamped(0, k as f64 * spacing)).collect();
            pts.push(TreePoint::Vertex(1));
            let x = TreeSubsetX::new(&t, pts)?;
            Ok((t, x))
        }
        ExampleKind::Star { legs, length } => {
            if legs == 0 || !(length > DEFAULT_EPS) {
                return Err(Error::BadParams(format!("star needs legs > 0 and positive length, got {legs}, {length}")));
            }
            let t = MetricTree::star(legs, length)?;
            let x = TreeSubsetX::new(&t, (1..=legs).map(TreePoint::Vertex).collect())?;
            Ok((t, x))
        }
        ExampleKind::Caterpillar { spine, spine_length, leg_length } => {
            if spine == 0 || !(spine_length > DEFAULT_EPS && leg_length > DEFAULT_EPS) {
                return Err(Error::BadParams("caterpillar needs a nonempty spine and positive lengths".into()));
            }
            let mut labels: Vec<String> = (0..spine).map(|i| format!("s{i}")).collect();
            labels.extend((0..spine).map(|i| format!("f{i}")));
            let mut edges: Vec<(usize, usize, f64)> = (1..spine).map(|i| (i - 1, i, spine_length)).collect();
            edges.extend((0..spine).map(|i| (i, spine + i, leg_length)));
            let t = MetricTree::new(labels, edges, DEFAULT_EPS)?;
            let x = TreeSubsetX::new(&t, t.boundary().into_iter().map(TreePoint::Vertex).collect())?;
            Ok((t, x))
        }
        ExampleKind::RandomTree { vertices, seed } => {
            if vertices == 0 {
                return Err(Error::BadParams("random tree needs at least one vertex".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(random_instance(&mut rng, vertices))
        }
    }
}

/// Random tree on `n` vertices (lengths in `[0.5, 5]` at 0.1 resolution)
/// and a random finite subset: all leaves half the time, plus random
/// vertices and edge points.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> (MetricTree, TreeSubsetX) {
    let tree = random_tree(rng, n);
    let mut pts = Vec::new();
    if rng.gen_bool(0.5) {
        pts.extend(tree.boundary().into_iter().map(TreePoint::Vertex));
    }
    for v in 0..tree.vertex_count() {
        if rng.gen_bool(0.25) {
            pts.push(TreePoint::Vertex(v));
        }
    }
    if tree.edge_count() > 0 {
        for _ in 0..rng.gen_range(0..=3) {
            let e = rng.gen_range(0..tree.edge_count());
            let len = tree.edges()[e].length;
            pts.push(tree.point_clamped(e, rng.gen_range(0.0..len)));
        }
    }
    if pts.is_empty() {
        pts.push(TreePoint::Vertex(rng.gen_range(0..tree.vertex_count())));
    }
    let x = TreeSubsetX::new(&tree, pts).expect("points lie on the tree");
    (tree, x)
}

pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> MetricTree {
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let edges = (1..n)
        .map(|i| (rng.gen_range(0..i), i, rng.gen_range(5..=50) as f64 / 10.0))
        .collect();
    MetricTree::new(labels, edges, DEFAULT_EPS).expect("recursive attachment yields a tree")
}
