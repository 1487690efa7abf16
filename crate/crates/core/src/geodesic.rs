//! Closed neighborhoods and the canonical Hausdorff geodesic
//! `C_t = B_t(A) ∩ B_{d-t}(B)` between closed subsets of a metric tree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::{oriented_hausdorff_sets, DistanceField, IntervalUnionSubset};
use crate::tree::MetricTree;

/// `B_r(S) = { p : d(p, S) <= r }`.
pub fn neighborhood(tree: &MetricTree, set: &IntervalUnionSubset, r: f64) -> Result<IntervalUnionSubset> {
    if !(r >= 0.0) {
        return Err(Error::BadParams(format!("radius {r} must be nonnegative")));
    }
    let field = DistanceField::new(tree, set)?;
    let edges = (0..tree.edge_count()).map(|e| field.sublevel(e, r)).collect();
    let isolated = set.isolated_vertices().to_vec();
    IntervalUnionSubset::canonical(tree, edges, isolated)
}

/// Exact Hausdorff distance between two closed subsets of the tree.
pub fn hausdorff_subsets(tree: &MetricTree, a: &IntervalUnionSubset, b: &IntervalUnionSubset) -> Result<f64> {
    let ab = oriented_hausdorff_sets(tree, Some(a), b)?;
    let ba = oriented_hausdorff_sets(tree, Some(b), a)?;
    Ok(ab.max(ba))
}

/// The slice `C_t` of the canonical geodesic from `a` to `b`.
pub fn slice(tree: &MetricTree, a: &IntervalUnionSubset, b: &IntervalUnionSubset, t: f64) -> Result<IntervalUnionSubset> {
    let d = hausdorff_subsets(tree, a, b)?;
    slice_at(tree, a, b, d, t)
}

fn slice_at(
    tree: &MetricTree,
    a: &IntervalUnionSubset,
    b: &IntervalUnionSubset,
    d: f64,
    t: f64,
) -> Result<IntervalUnionSubset> {
    let tol = tree.tol();
    if !(t.is_finite() && tol.ge(t, 0.0) && tol.le(t, d)) {
        return Err(Error::OutOfRange { t, d });
    }
    let t = t.clamp(0.0, d);
    let near_a = neighborhood(tree, a, t)?;
    let near_b = neighborhood(tree, b, d - t)?;
    near_a.intersect(tree, &near_b)
}

/// Pairwise Hausdorff distances between slices on a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicCheck {
    pub d: f64,
    pub grid: Vec<f64>,
    pub pairwise: Vec<Vec<f64>>,
    /// `max |pairwise[i][j] - |t_j - t_i||`.
    pub worst_residual: f64,
    pub additive: bool,
}

pub fn verify_geodesic(
    tree: &MetricTree,
    a: &IntervalUnionSubset,
    b: &IntervalUnionSubset,
    grid: &[f64],
) -> Result<GeodesicCheck> {
    let d = hausdorff_subsets(tree, a, b)?;
    let slices = grid
        .iter()
        .map(|&t| slice_at(tree, a, b, d, t))
        .collect::<Result<Vec<_>>>()?;
    let k = grid.len();
    let mut pairwise = vec![vec![0.0; k]; k];
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let h = hausdorff_subsets(tree, &slices[i], &slices[j])?;
            pairwise[i][j] = h;
            pairwise[j][i] = h;
            worst = worst.max((h - (grid[j] - grid[i]).abs()).abs());
        }
    }
    Ok(GeodesicCheck {
        d,
        grid: grid.to_vec(),
        pairwise,
        worst_residual: worst,
        additive: worst <= tree.eps(),
    })
}

/// `n` evenly spaced parameters covering `[0, d]`, endpoints included.
pub fn uniform_grid(d: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| d * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::Interval;
    use crate::tree::TreePoint;

    fn seg() -> MetricTree {
        MetricTree::segment(10.0).unwrap()
    }

    fn ends(t: &MetricTree) -> IntervalUnionSubset {
        IntervalUnionSubset::from_parts(t, [], [0, 1]).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        let t = seg();
        let s = ends(&t);
        assert_eq!(neighborhood(&t, &s, 0.0).unwrap(), s);
        let b2 = neighborhood(&t, &s, 2.0).unwrap();
        assert_eq!(b2.edge_intervals(0), &[Interval::new(0.0, 2.0), Interval::new(8.0, 10.0)]);

        let star = MetricTree::star(3, 5.0).unwrap();
        let center = IntervalUnionSubset::from_parts(&star, [], [0]).unwrap();
        let b3 = neighborhood(&star, &center, 3.0).unwrap();
        for e in 0..3 {
            assert_eq!(b3.edge_intervals(e), &[Interval::new(0.0, 3.0)]);
        }
        assert!(neighborhood(&star, &center, -1.0).is_err());
    }

    #[test]
    fn slices_on_the_segment() {
        let t = seg();
        let a = ends(&t);
        let b = IntervalUnionSubset::whole(&t);
        assert_eq!(hausdorff_subsets(&t, &a, &b).unwrap(), 5.0);
        let c2 = slice(&t, &a, &b, 2.0).unwrap();
        assert_eq!(c2.edge_intervals(0), &[Interval::new(0.0, 2.0), Interval::new(8.0, 10.0)]);
        assert_eq!(slice(&t, &a, &b, 0.0).unwrap(), a);
        assert_eq!(slice(&t, &a, &b, 5.0).unwrap(), b);
        let c4 = slice(&t, &a, &b, 4.0).unwrap();
        assert_eq!(hausdorff_subsets(&t, &c2, &c4).unwrap(), 2.0);
        assert!(matches!(slice(&t, &a, &b, 5.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hausdorff_subsets_examples() {
        let t = seg();
        let p = IntervalUnionSubset::from_points(&t, &[TreePoint::Vertex(0)]).unwrap();
        let w = IntervalUnionSubset::whole(&t);
        assert_eq!(hausdorff_subsets(&t, &p, &w).unwrap(), 10.0);
        assert_eq!(hausdorff_subsets(&t, &w, &w).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_examples() {
        let t = seg();
        let a = ends(&t);
        let b = IntervalUnionSubset::whole(&t);
        let g = verify_geodesic(&t, &a, &b, &[0.0, 1.25, 2.5, 5.0]).unwrap();
        assert!(g.additive, "{g:?}");
        assert_eq!(g.pairwise[0][3], 5.0);
        let g = verify_geodesic(&t, &a, &b, &[0.0, 5.0]).unwrap();
        assert_eq!(g.pairwise[0][1], 5.0);

        let net: Vec<TreePoint> = (0..=10).map(|k| t.point_clamped(0, k as f64)).collect();
        let a = IntervalUnionSubset::from_points(&t, &net).unwrap();
        let g = verify_geodesic(&t, &a, &b, &uniform_grid(0.5, 11)).unwrap();
        assert_eq!(g.d, 0.5);
        assert!(g.additive, "{g:?}");
    }
}
