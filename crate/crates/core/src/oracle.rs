//! Brute-force reference computations used by the verification suite.
//! Nothing here shares code with the fast paths it is compared against.

use crate::metric::FiniteMetricSpace;
use crate::tree::{MetricTree, TreePoint};

/// Minimum distortion over *every* correspondence (all covering subsets of
/// `X x Y`), halved, with the lexicographically smallest minimizing pair
/// list. Returns `None` when `|X| * |Y| > 16`.
pub fn exhaustive_gh(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Option<(f64, Vec<(usize, usize)>)> {
    let (nx, ny) = (x.len(), y.len());
    let cells = nx * ny;
    if cells > 16 {
        return None;
    }
    let all: Vec<(usize, usize)> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    let mut witness: Option<Vec<(usize, usize)>> = None;
    for mask in 1u32..(1u32 << cells) {
        let pairs: Vec<(usize, usize)> = (0..cells).filter(|b| mask >> b & 1 == 1).map(|b| all[b]).collect();
        let covers_x = (0..nx).all(|i| pairs.iter().any(|p| p.0 == i));
        let covers_y = (0..ny).all(|j| pairs.iter().any(|p| p.1 == j));
        if !(covers_x && covers_y) {
            continue;
        }
        let mut dis: f64 = 0.0;
        for a in &pairs {
            for b in &pairs {
                dis = dis.max((x.d(a.0, b.0) - y.d(a.1, b.1)).abs());
            }
        }
        if dis < best || (dis == best && witness.as_ref().is_some_and(|w| pairs < *w)) {
            best = dis;
            witness = Some(pairs);
        }
    }
    witness.map(|w| (best / 2.0, w))
}

/// Minimax distances by enumerating every simple dotted line.
pub fn exhaustive_minimax(x: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    fn walk(x: &FiniteMetricSpace, at: usize, target: usize, worst: f64, used: &mut Vec<bool>, best: &mut f64) {
        if at == target {
            *best = best.min(worst);
            return;
        }
        for next in 0..x.len() {
            if !used[next] {
                used[next] = true;
                walk(x, next, target, worst.max(x.d(at, next)), used, best);
                used[next] = false;
            }
        }
    }
    let n = x.len();
    let mut u = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut used = vec![false; n];
            used[i] = true;
            let mut best = f64::INFINITY;
            walk(x, i, j, 0.0, &mut used, &mut best);
            u[i][j] = best;
        }
    }
    u
}

/// Hausdorff distance between two finite point sets of a tree.
pub fn point_set_hausdorff(tree: &MetricTree, a: &[TreePoint], b: &[TreePoint]) -> f64 {
    let one_way = |from: &[TreePoint], to: &[TreePoint]| {
        from.iter()
            .map(|&p| to.iter().map(|&q| tree.distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Dense-sampling estimate of `sup_{a in T} |aX|`.
pub fn sampled_hausdorff_to_tree(tree: &MetricTree, x: &[TreePoint], step: f64) -> f64 {
    let samples = tree.sample(step);
    samples
        .iter()
        .map(|&p| x.iter().map(|&q| tree.distance(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Dense-sampling estimate of the Hausdorff distance from the cube
/// `[0, side-1]^dim` (sup norm) to its integer points.
pub fn sampled_cube_to_lattice(side: usize, dim: usize, step: f64) -> f64 {
    let top = (side - 1) as f64;
    let per_axis = (top / step).round() as usize;
    let coords: Vec<f64> = (0..=per_axis).map(|k| k as f64 * step).collect();
    let mut worst: f64 = 0.0;
    let mut idx = vec![0usize; dim];
    loop {
        // Nearest lattice point in sup norm is coordinate-wise rounding.
        let d = idx
            .iter()
            .map(|&k| {
                let c = coords[k];
                (c - c.round().clamp(0.0, top)).abs()
            })
            .fold(0.0, f64::max);
        worst = worst.max(d);
        let mut axis = 0;
        loop {
            if axis == dim {
                return worst;
            }
            idx[axis] += 1;
            if idx[axis] <= per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}
