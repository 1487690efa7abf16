//! Closed subsets of a metric tree stored as unions of closed intervals per
//! edge, and the exact distance field to such a subset.
//!
//! Canonical form: on every edge the intervals are sorted, clipped to
//! `[0, length]` and merged when they touch within `eps`. A vertex that
//! belongs to the set appears on *every* incident edge (as an endpoint of
//! some interval, possibly a degenerate `[0, 0]`). Vertices of degree zero
//! live in `isolated`.

use crate::error::{Error, Result};
use crate::tree::{MetricTree, TreePoint};

/// A closed interval `[lo, hi]` of edge offsets; `lo == hi` is a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// A nonempty closed subset of a [`MetricTree`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnionSubset {
    edges: Vec<Vec<Interval>>,
    isolated: Vec<usize>,
}

fn merge_sorted(list: &mut Vec<Interval>, eps: f64) {
    list.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(list.len());
    for iv in list.drain(..) {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi + eps => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    *list = out;
}

impl IntervalUnionSubset {
    /// Builds a canonical subset from raw per-edge intervals and vertices.
    pub fn from_parts(
        tree: &MetricTree,
        intervals: impl IntoIterator<Item = (usize, f64, f64)>,
        vertices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let eps = tree.eps();
        let mut edges = vec![Vec::new(); tree.edge_count()];
        for (e, a, b) in intervals {
            let length = tree.edge(e)?.length;
            if !(a.is_finite() && b.is_finite()) || a > b + eps || a < -eps || b > length + eps {
                return Err(Error::BadInterval { edge: e, a, b, length });
            }
            edges[e].push(Interval::new(a.max(0.0), b.min(length).max(a.max(0.0))));
        }
        let mut verts = Vec::new();
        for v in vertices {
            tree.check_vertex(v)?;
            verts.push(v);
        }
        Self::canonical(tree, edges, verts)
    }

    /// The whole tree.
    pub fn whole(tree: &MetricTree) -> Self {
        let edges = tree.edges().iter().map(|e| vec![Interval::new(0.0, e.length)]).collect();
        let isolated = (0..tree.vertex_count()).filter(|&v| tree.degree(v) == 0).collect();
        IntervalUnionSubset { edges, isolated }
    }

    /// A finite point set as degenerate intervals.
    pub fn from_points(tree: &MetricTree, points: &[TreePoint]) -> Result<Self> {
        let mut edges = vec![Vec::new(); tree.edge_count()];
        let mut verts = Vec::new();
        for &p in points {
            match p {
                TreePoint::Vertex(v) => {
                    tree.check_vertex(v)?;
                    verts.push(v);
                }
                TreePoint::Edge { edge, offset } => {
                    tree.edge(edge)?;
                    edges[edge].push(Interval::point(offset));
                }
            }
        }
        Self::canonical(tree, edges, verts)
    }

    pub(crate) fn canonical(tree: &MetricTree, mut edges: Vec<Vec<Interval>>, vertices: Vec<usize>) -> Result<Self> {
        let eps = tree.eps();
        let mut member = vec![false; tree.vertex_count()];
        for v in vertices {
            member[v] = true;
        }
        for (e, list) in edges.iter_mut().enumerate() {
            let len = tree.edges()[e].length;
            for iv in list.iter_mut() {
                iv.lo = snap(iv.lo.clamp(0.0, len), len, eps);
                iv.hi = snap(iv.hi.clamp(0.0, len), len, eps);
            }
            merge_sorted(list, eps);
            let edge = tree.edges()[e];
            if list.first().is_some_and(|iv| iv.lo == 0.0) {
                member[edge.u] = true;
            }
            if list.last().is_some_and(|iv| iv.hi == len) {
                member[edge.v] = true;
            }
        }
        for (v, &m) in member.iter().enumerate() {
            if !m {
                continue;
            }
            for &(_, e) in tree.neighbors(v) {
                let edge = tree.edges()[e];
                let list = &mut edges[e];
                if edge.u == v && !list.first().is_some_and(|iv| iv.lo == 0.0) {
                    list.insert(0, Interval::point(0.0));
                    merge_sorted(list, eps);
                }
                if edge.v == v && !list.last().is_some_and(|iv| iv.hi == edge.length) {
                    list.push(Interval::point(edge.length));
                    merge_sorted(list, eps);
                }
            }
        }
        let isolated: Vec<usize> = (0..tree.vertex_count())
            .filter(|&v| member[v] && tree.degree(v) == 0)
            .collect();
        if isolated.is_empty() && edges.iter().all(|l| l.is_empty()) {
            return Err(Error::EmptySubset);
        }
        Ok(IntervalUnionSubset { edges, isolated })
    }

    pub(crate) fn check_tree(&self, tree: &MetricTree) -> Result<()> {
        if self.edges.len() != tree.edge_count()
            || self.isolated.iter().any(|&v| v >= tree.vertex_count())
        {
            return Err(Error::DifferentTree);
        }
        Ok(())
    }

    pub fn edge_intervals(&self, e: usize) -> &[Interval] {
        &self.edges[e]
    }

    /// `(edge, lo, hi)` triples in edge order.
    pub fn intervals(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(e, l)| l.iter().map(move |iv| (e, iv.lo, iv.hi)))
    }

    pub fn isolated_vertices(&self) -> &[usize] {
        &self.isolated
    }

    pub fn contains(&self, tree: &MetricTree, p: TreePoint) -> bool {
        let eps = tree.eps();
        match p {
            TreePoint::Vertex(v) => {
                if self.isolated.contains(&v) {
                    return true;
                }
                tree.neighbors(v).iter().any(|&(_, e)| {
                    let edge = tree.edges()[e];
                    let at = if edge.u == v { 0.0 } else { edge.length };
                    self.edges[e].iter().any(|iv| iv.lo - eps <= at && at <= iv.hi + eps)
                })
            }
            TreePoint::Edge { edge, offset } => self.edges[edge]
                .iter()
                .any(|iv| iv.lo - eps <= offset && offset <= iv.hi + eps),
        }
    }

    /// Sum of interval lengths.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().flatten().map(Interval::len).sum()
    }

    /// True when the set is a finite set of points.
    pub fn is_finite_set(&self, eps: f64) -> bool {
        self.edges.iter().flatten().all(|iv| iv.len() <= eps)
    }

    /// Interval endpoints and isolated vertices, as canonical tree points.
    pub fn representative_points(&self, tree: &MetricTree) -> Vec<TreePoint> {
        let mut pts: Vec<TreePoint> = self.isolated.iter().map(|&v| TreePoint::Vertex(v)).collect();
        for (e, lo, hi) in self.intervals() {
            pts.push(tree.point_clamped(e, lo));
            pts.push(tree.point_clamped(e, hi));
        }
        crate::tree::dedup_points(tree, pts)
    }

    /// Points of the set at spacing at most `step` along every interval.
    pub fn sample(&self, tree: &MetricTree, step: f64) -> Vec<TreePoint> {
        let mut pts: Vec<TreePoint> = self.isolated.iter().map(|&v| TreePoint::Vertex(v)).collect();
        for (e, lo, hi) in self.intervals() {
            let k = ((hi - lo) / step).ceil().max(1.0) as usize;
            for i in 0..=k {
                pts.push(tree.point_clamped(e, lo + (hi - lo) * i as f64 / k as f64));
            }
        }
        crate::tree::dedup_points(tree, pts)
    }

    /// Intersection; intervals that miss each other by at most `eps` meet
    /// in a point. Fails with `EmptySubset` if nothing is left.
    pub fn intersect(&self, tree: &MetricTree, other: &Self) -> Result<Self> {
        self.check_tree(tree)?;
        other.check_tree(tree)?;
        let eps = tree.eps();
        let mut edges = vec![Vec::new(); self.edges.len()];
        for (e, out) in edges.iter_mut().enumerate() {
            for a in &self.edges[e] {
                for b in &other.edges[e] {
                    let lo = a.lo.max(b.lo);
                    let hi = a.hi.min(b.hi);
                    if lo <= hi {
                        out.push(Interval::new(lo, hi));
                    } else if lo - hi <= eps {
                        let mid = 0.5 * (lo + hi);
                        out.push(Interval::point(mid));
                    }
                }
            }
        }
        let verts: Vec<usize> = self
            .isolated
            .iter()
            .copied()
            .filter(|v| other.isolated.contains(v))
            .collect();
        Self::canonical(tree, edges, verts)
    }

    /// Closure of the complement `T \ S`, or `None` when it is empty.
    /// Only gaps longer than `eps` count.
    pub fn complement_closure(&self, tree: &MetricTree) -> Option<Self> {
        let eps = tree.eps();
        let mut edges = vec![Vec::new(); self.edges.len()];
        for (e, out) in edges.iter_mut().enumerate() {
            let len = tree.edges()[e].length;
            let mut cursor = 0.0;
            for iv in &self.edges[e] {
                if iv.lo - cursor > eps {
                    out.push(Interval::new(cursor, iv.lo));
                }
                cursor = iv.hi;
            }
            if len - cursor > eps {
                out.push(Interval::new(cursor, len));
            }
        }
        Self::canonical(tree, edges, Vec::new()).ok()
    }
}

fn snap(x: f64, len: f64, eps: f64) -> f64 {
    if x <= eps {
        0.0
    } else if x >= len - eps {
        len
    } else {
        x
    }
}

/// Distance to a closed subset `S`, exact on every point of the tree.
///
/// Along an edge of length `L` with endpoints `u`, `v`, the distance to `S`
/// is the distance to the nearest of finitely many sources on a line: the
/// point `-d(u, S)`, the point `L + d(v, S)`, and the intervals of `S` on
/// that edge. It is piecewise linear with slopes in `{-1, 0, 1}`, and its
/// local maxima sit at midpoints between consecutive sources.
#[derive(Debug, Clone)]
pub struct DistanceField<'t> {
    tree: &'t MetricTree,
    vertex: Vec<f64>,
    sources: Vec<Vec<Interval>>,
}

impl<'t> DistanceField<'t> {
    pub fn new(tree: &'t MetricTree, set: &IntervalUnionSubset) -> Result<Self> {
        set.check_tree(tree)?;
        let n = tree.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        for &v in &set.isolated {
            dist[v] = 0.0;
        }
        for (e, lo, hi) in set.intervals() {
            let edge = tree.edges()[e];
            dist[edge.u] = dist[edge.u].min(lo);
            dist[edge.v] = dist[edge.v].min(edge.length - hi);
        }
        // Dijkstra, quadratic in the vertex count.
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut best = None;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && best.is_none_or(|b: usize| dist[v] < dist[b]) {
                    best = Some(v);
                }
            }
            let Some(v) = best else { break };
            done[v] = true;
            for &(w, e) in tree.neighbors(v) {
                let cand = dist[v] + tree.edges()[e].length;
                if cand < dist[w] {
                    dist[w] = cand;
                }
            }
        }
        let mut sources = Vec::with_capacity(tree.edge_count());
        for (e, edge) in tree.edges().iter().enumerate() {
            let mut list = Vec::with_capacity(set.edges[e].len() + 2);
            list.push(Interval::point(-dist[edge.u]));
            list.extend_from_slice(&set.edges[e]);
            list.push(Interval::point(edge.length + dist[edge.v]));
            merge_sorted(&mut list, 0.0);
            sources.push(list);
        }
        Ok(DistanceField { tree, vertex: dist, sources })
    }

    pub fn at_vertex(&self, v: usize) -> f64 {
        self.vertex[v]
    }

    /// Distance from the point at `s` on edge `e`.
    pub fn at(&self, e: usize, s: f64) -> f64 {
        self.sources[e]
            .iter()
            .map(|iv| if s < iv.lo { iv.lo - s } else if s > iv.hi { s - iv.hi } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn at_point(&self, p: TreePoint) -> f64 {
        match p {
            TreePoint::Vertex(v) => self.vertex[v],
            TreePoint::Edge { edge, offset } => self.at(edge, offset),
        }
    }

    /// Maximum of the field over `[a, b]` on edge `e`.
    pub fn max_on(&self, e: usize, a: f64, b: f64) -> f64 {
        let mut best = self.at(e, a).max(self.at(e, b));
        for w in self.sources[e].windows(2) {
            let mid = 0.5 * (w[0].hi + w[1].lo);
            if a < mid && mid < b {
                best = best.max(self.at(e, mid));
            }
        }
        best
    }

    /// `{ s in [0, L] : field(s) <= r }` on edge `e`, merged.
    pub fn sublevel(&self, e: usize, r: f64) -> Vec<Interval> {
        let len = self.tree.edges()[e].length;
        let mut out: Vec<Interval> = self.sources[e]
            .iter()
            .filter_map(|iv| {
                let lo = (iv.lo - r).max(0.0);
                let hi = (iv.hi + r).min(len);
                (lo <= hi).then_some(Interval::new(lo, hi))
            })
            .collect();
        merge_sorted(&mut out, 0.0);
        out
    }

    /// `sup_{p in from} d(p, S)`.
    pub fn sup_over(&self, from: &IntervalUnionSubset) -> f64 {
        let mut best: f64 = 0.0;
        for &v in &from.isolated {
            best = best.max(self.vertex[v]);
        }
        for (e, lo, hi) in from.intervals() {
            best = best.max(self.max_on(e, lo, hi));
        }
        best
    }
}

/// `sup_{p in from} d(p, to)`; 0 when `from` is `None` (the empty set).
pub fn oriented_hausdorff_sets(
    tree: &MetricTree,
    from: Option<&IntervalUnionSubset>,
    to: &IntervalUnionSubset,
) -> Result<f64> {
    let field = DistanceField::new(tree, to)?;
    match from {
        None => Ok(0.0),
        Some(s) => {
            s.check_tree(tree)?;
            Ok(field.sup_over(s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment() -> MetricTree {
        MetricTree::segment(10.0).unwrap()
    }

    #[test]
    fn canonical_merges_and_snaps() {
        let t = segment();
        let s = IntervalUnionSubset::from_parts(&t, [(0, 3.0, 5.0), (0, 1e-12, 2.0), (0, 2.0, 2.5)], []).unwrap();
        assert_eq!(s.edge_intervals(0), &[Interval::new(0.0, 2.5), Interval::new(3.0, 5.0)]);
        assert!(s.contains(&t, TreePoint::Vertex(0)));
        assert!(!s.contains(&t, TreePoint::Vertex(1)));
        assert!(matches!(
            IntervalUnionSubset::from_parts(&t, [(0, 4.0, 3.0)], []),
            Err(Error::BadInterval { .. })
        ));
        assert!(matches!(
            IntervalUnionSubset::from_parts(&t, [] as [(usize, f64, f64); 0], []),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn vertices_appear_on_all_incident_edges() {
        let t = MetricTree::star(3, 5.0).unwrap();
        let s = IntervalUnionSubset::from_parts(&t, [], [0]).unwrap();
        for e in 0..3 {
            assert_eq!(s.edge_intervals(e), &[Interval::point(0.0)]);
        }
        let one = MetricTree::new(vec!["v".into()], vec![], 1e-9).unwrap();
        let s = IntervalUnionSubset::whole(&one);
        assert_eq!(s.isolated_vertices(), &[0]);
    }

    #[test]
    fn distance_field_on_segment() {
        let t = segment();
        let x = IntervalUnionSubset::from_parts(&t, [(0, 3.0, 3.0)], [0, 1]).unwrap();
        let f = DistanceField::new(&t, &x).unwrap();
        assert_eq!(f.at(0, 6.5), 3.5);
        assert_eq!(f.max_on(0, 0.0, 10.0), 3.5);
        assert_eq!(f.max_on(0, 0.0, 3.0), 1.5);
        assert_eq!(f.sublevel(0, 1.0), vec![Interval::new(0.0, 1.0), Interval::new(2.0, 4.0), Interval::new(9.0, 10.0)]);
    }

    #[test]
    fn complement_closure_of_a_prefix() {
        let t = segment();
        let s = IntervalUnionSubset::from_parts(&t, [(0, 0.0, 3.0)], []).unwrap();
        let c = s.complement_closure(&t).unwrap();
        assert_eq!(c.edge_intervals(0), &[Interval::new(3.0, 10.0)]);
        assert!(IntervalUnionSubset::whole(&t).complement_closure(&t).is_none());
    }

    #[test]
    fn intersection_tolerates_touching_round_off() {
        let t = segment();
        let a = IntervalUnionSubset::from_parts(&t, [(0, 0.0, 4.0)], []).unwrap();
        let b = IntervalUnionSubset::from_parts(&t, [(0, 4.0 + 1e-13, 10.0)], []).unwrap();
        let c = a.intersect(&t, &b).unwrap();
        assert!(c.is_finite_set(1e-9));
        let far = IntervalUnionSubset::from_parts(&t, [(0, 6.0, 10.0)], []).unwrap();
        assert_eq!(a.intersect(&t, &far).unwrap_err(), Error::EmptySubset);
    }
}
