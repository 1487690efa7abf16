//! Correspondences, distortion, and an exact branch-and-bound
//! Gromov-Hausdorff solver for tiny finite spaces.
//!
//! The solver runs in two passes that share the same pair-distortion
//! values, so results are bit-reproducible:
//!
//! 1. **Value.** Every correspondence contains a minimal one with no larger
//!    distortion, and a minimal correspondence is the union of the graph of
//!    a map `f: X -> Y` with the transposed graph of a map `g` defined on
//!    the points of `Y` that `f` misses. The search assigns `f` point by point
//!    (points of the smaller space, in decreasing eccentricity), then patches
//!    the uncovered points. A branch is cut once its running distortion
//!    reaches the incumbent. The incumbent starts from an
//!    eccentricity-matching correspondence, and the search stops early if
//!    the incumbent meets the diameter lower bound.
//! 2. **Witness.** With the optimal distortion `v` known, a depth-first pass
//!    over nonempty target sets `S_0, S_1, ...` (in index order, each set
//!    ordered so that the resulting pair lists come out lexicographically)
//!    returns the first correspondence whose pairs are all `v`-compatible.
//!    That is the lexicographically smallest optimal pair set.

use crate::error::{Error, Result, Side};
use crate::metric::FiniteMetricSpace;

/// A relation between the points of two spaces covering both sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
    left: usize,
    right: usize,
}

impl Correspondence {
    /// Builds a correspondence, sorting and deduplicating the pairs.
    pub fn new(left: usize, right: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut seen_l = vec![false; left];
        let mut seen_r = vec![false; right];
        for &(x, y) in &pairs {
            if x >= left {
                return Err(Error::IndexOutOfRange { index: x, len: left });
            }
            if y >= right {
                return Err(Error::IndexOutOfRange { index: y, len: right });
            }
            seen_l[x] = true;
            seen_r[y] = true;
        }
        if let Some(index) = seen_l.iter().position(|s| !s) {
            return Err(Error::CoverageViolation { side: Side::Left, index });
        }
        if let Some(index) = seen_r.iter().position(|s| !s) {
            return Err(Error::CoverageViolation { side: Side::Right, index });
        }
        Ok(Correspondence { pairs, left, right })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence { pairs: (0..n).map(|i| (i, i)).collect(), left: n, right: n }
    }

    /// The full product `X x Y`.
    pub fn full(left: usize, right: usize) -> Self {
        let pairs = (0..left).flat_map(|x| (0..right).map(move |y| (x, y))).collect();
        Correspondence { pairs, left, right }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.left, self.right)
    }

    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort_unstable();
        Correspondence { pairs, left: self.right, right: self.left }
    }
}

#[inline]
fn pair_cost(x: &FiniteMetricSpace, y: &FiniteMetricSpace, a: (usize, usize), b: (usize, usize)) -> f64 {
    (x.d(a.0, b.0) - y.d(a.1, b.1)).abs()
}

/// `dis R = sup | |xx'| - |yy'| |` over pairs of pairs of `R`.
pub fn distortion(r: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if r.sizes() != (x.len(), y.len()) {
        return Err(Error::SizeMismatch { expected: (x.len(), y.len()), got: r.sizes() });
    }
    Ok(raw_distortion(&r.pairs, x, y))
}

fn raw_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &a) in pairs.iter().enumerate() {
        for &b in &pairs[i + 1..] {
            worst = worst.max(pair_cost(x, y, a, b));
        }
    }
    worst
}

/// Size limit for the exact solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Budget {
    /// Upper bound on `|X| * |Y|`.
    pub max_cells: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_cells: 30 }
    }
}

impl Budget {
    pub fn cells(max_cells: usize) -> Self {
        Budget { max_cells }
    }

    pub fn check(&self, left: usize, right: usize) -> Result<()> {
        let cells = left * right;
        if cells > self.max_cells {
            Err(Error::BudgetExceeded { cells, max_cells: self.max_cells })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GHResult {
    /// Half of the minimal distortion.
    pub value: f64,
    /// Lexicographically smallest correspondence attaining the minimum.
    pub witness: Correspondence,
    pub nodes_explored: u64,
    pub exact: bool,
}

impl GHResult {
    pub fn distortion(&self) -> f64 {
        2.0 * self.value
    }
}

/// `|diam X - diam Y| / 2`, a lower bound for the Gromov-Hausdorff distance.
pub fn gh_lower_diam(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    (x.diameter() - y.diameter()).abs() / 2.0
}

/// Exact Gromov-Hausdorff distance by branch and bound.
pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: Budget) -> Result<GHResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySpace);
    }
    budget.check(x.len(), y.len())?;

    // The value search maps the smaller side into the larger one.
    let (best, nodes1) = if x.len() <= y.len() {
        ValueSearch::run(x, y)
    } else {
        ValueSearch::run(y, x)
    };
    let (pairs, nodes2) = WitnessSearch::run(x, y, best);
    let witness = Correspondence::new(x.len(), y.len(), pairs)?;
    debug_assert_eq!(raw_distortion(witness.pairs(), x, y), best);
    Ok(GHResult { value: best / 2.0, witness, nodes_explored: nodes1 + nodes2, exact: true })
}

/// Eccentricity-matching correspondence used as the initial incumbent.
pub fn nearest_eccentricity_correspondence(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Correspondence {
    let ex: Vec<f64> = (0..x.len()).map(|i| x.eccentricity(i)).collect();
    let ey: Vec<f64> = (0..y.len()).map(|j| y.eccentricity(j)).collect();
    let closest = |target: f64, pool: &[f64]| -> usize {
        let mut best = 0;
        for (k, &v) in pool.iter().enumerate() {
            if (v - target).abs() < (pool[best] - target).abs() {
                best = k;
            }
        }
        best
    };
    let mut pairs = Vec::new();
    let mut covered = vec![false; y.len()];
    for (i, &e) in ex.iter().enumerate() {
        let j = closest(e, &ey);
        covered[j] = true;
        pairs.push((i, j));
    }
    for (j, &e) in ey.iter().enumerate() {
        if !covered[j] {
            pairs.push((closest(e, &ex), j));
        }
    }
    Correspondence::new(x.len(), y.len(), pairs).expect("covers both sides by construction")
}

fn decreasing_eccentricity(x: &FiniteMetricSpace) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x.eccentricity(b).total_cmp(&x.eccentricity(a)).then(a.cmp(&b)));
    order
}

struct ValueSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    order_x: Vec<usize>,
    order_y: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    cover: Vec<u32>,
    best: f64,
    floor: f64,
    nodes: u64,
}

impl<'a> ValueSearch<'a> {
    /// Returns the minimal distortion and the node count; requires `|x| <= |y|`.
    fn run(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace) -> (f64, u64) {
        let seed = nearest_eccentricity_correspondence(x, y);
        let mut s = ValueSearch {
            x,
            y,
            order_x: decreasing_eccentricity(x),
            order_y: decreasing_eccentricity(y),
            pairs: Vec::with_capacity(x.len() + y.len()),
            cover: vec![0; y.len()],
            best: raw_distortion(seed.pairs(), x, y),
            floor: (x.diameter() - y.diameter()).abs(),
            nodes: 0,
        };
        if s.best > s.floor {
            s.assign(0, 0.0);
        }
        (s.best, s.nodes)
    }

    #[inline]
    fn extend_cost(&self, p: (usize, usize), current: f64) -> f64 {
        let mut worst = current;
        for &q in &self.pairs {
            worst = worst.max(pair_cost(self.x, self.y, p, q));
            if worst >= self.best {
                break;
            }
        }
        worst
    }

    fn done(&self) -> bool {
        self.best <= self.floor
    }

    fn assign(&mut self, depth: usize, current: f64) {
        self.nodes += 1;
        if depth == self.order_x.len() {
            let uncovered: Vec<usize> =
                self.order_y.iter().copied().filter(|&j| self.cover[j] == 0).collect();
            self.patch(&uncovered, 0, current);
            return;
        }
        let xi = self.order_x[depth];
        // Cheapest extensions first so good incumbents appear early.
        let mut cands: Vec<(f64, usize)> = (0..self.y.len())
            .map(|yj| (self.extend_cost((xi, yj), current), yj))
            .filter(|&(c, _)| c < self.best)
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, yj) in cands {
            let c = self.extend_cost((xi, yj), current);
            if c >= self.best {
                continue;
            }
            self.pairs.push((xi, yj));
            self.cover[yj] += 1;
            self.assign(depth + 1, c);
            self.cover[yj] -= 1;
            self.pairs.pop();
            if self.done() {
                return;
            }
        }
    }

    fn patch(&mut self, uncovered: &[usize], k: usize, current: f64) {
        self.nodes += 1;
        if k == uncovered.len() {
            if current < self.best {
                self.best = current;
            }
            return;
        }
        let yj = uncovered[k];
        let mut cands: Vec<(f64, usize)> = (0..self.x.len())
            .map(|xi| (self.extend_cost((xi, yj), current), xi))
            .filter(|&(c, _)| c < self.best)
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, xi) in cands {
            let c = self.extend_cost((xi, yj), current);
            if c >= self.best {
                continue;
            }
            self.pairs.push((xi, yj));
            self.patch(uncovered, k + 1, c);
            self.pairs.pop();
            if self.done() {
                return;
            }
        }
    }
}

struct WitnessSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    limit: f64,
    pairs: Vec<(usize, usize)>,
    cover: Vec<u32>,
    nodes: u64,
}

impl<'a> WitnessSearch<'a> {
    fn run(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, limit: f64) -> (Vec<(usize, usize)>, u64) {
        let mut s = WitnessSearch {
            x,
            y,
            limit,
            pairs: Vec::new(),
            cover: vec![0; y.len()],
            nodes: 0,
        };
        let found = s.visit(0);
        assert!(found, "a correspondence at the optimal distortion exists");
        (s.pairs, s.nodes)
    }

    fn compatible(&self, p: (usize, usize)) -> bool {
        self.pairs.iter().all(|&q| pair_cost(self.x, self.y, p, q) <= self.limit)
    }

    /// Every later row still has a candidate and every uncovered column can
    /// still be reached by some later row.
    fn feasible(&self, next_row: usize) -> bool {
        let nx = self.x.len();
        let ny = self.y.len();
        let mut reachable = vec![false; ny];
        for xi in next_row..nx {
            let mut any = false;
            for (yj, r) in reachable.iter_mut().enumerate() {
                if self.compatible((xi, yj)) {
                    any = true;
                    *r = true;
                }
            }
            if !any {
                return false;
            }
        }
        (0..ny).all(|yj| self.cover[yj] > 0 || reachable[yj])
    }

    fn visit(&mut self, xi: usize) -> bool {
        self.nodes += 1;
        let nx = self.x.len();
        if xi == nx {
            return self.cover.iter().all(|&c| c > 0);
        }
        let cands: Vec<usize> = (0..self.y.len()).filter(|&yj| self.compatible((xi, yj))).collect();
        let last = xi + 1 == nx;
        for set in ordered_cliques(&cands, self.y, self.limit, last) {
            for &yj in &set {
                self.pairs.push((xi, yj));
                self.cover[yj] += 1;
            }
            if self.feasible(xi + 1) && self.visit(xi + 1) {
                return true;
            }
            for &yj in &set {
                self.pairs.pop();
                self.cover[yj] -= 1;
            }
        }
        false
    }
}

/// Nonempty subsets of `cands` whose members are pairwise within
/// `limit`, in the order under which sorted pair lists compare
/// lexicographically: element by element, with a proper prefix placed
/// after its extensions unless it closes the whole list (`last`).
fn ordered_cliques(cands: &[usize], y: &FiniteMetricSpace, limit: f64, last: bool) -> Vec<Vec<usize>> {
    fn grow(
        start: usize,
        cur: &mut Vec<usize>,
        cands: &[usize],
        y: &FiniteMetricSpace,
        limit: f64,
        last: bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        for k in start..cands.len() {
            let c = cands[k];
            if cur.iter().any(|&m| y.d(m, c) > limit) {
                continue;
            }
            cur.push(c);
            if last {
                out.push(cur.clone());
            }
            grow(k + 1, cur, cands, y, limit, last, out);
            if !last {
                out.push(cur.clone());
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(0, &mut Vec::new(), cands, y, limit, last, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_EPS;

    fn pair_space(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&[0.0, d], DEFAULT_EPS).unwrap()
    }

    #[test]
    fn correspondence_requires_coverage() {
        assert_eq!(
            Correspondence::new(2, 2, [(0, 0), (0, 1)]).unwrap_err(),
            Error::CoverageViolation { side: Side::Left, index: 1 }
        );
        assert_eq!(
            Correspondence::new(2, 2, [(0, 0), (1, 0)]).unwrap_err(),
            Error::CoverageViolation { side: Side::Right, index: 1 }
        );
    }

    #[test]
    fn distortion_examples() {
        let x = pair_space(2.0);
        let y = pair_space(5.0);
        let bij = Correspondence::new(2, 2, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(distortion(&bij, &x, &y).unwrap(), 3.0);
        assert_eq!(distortion(&Correspondence::full(2, 2), &x, &y).unwrap(), 5.0);
        assert_eq!(distortion(&Correspondence::identity(2), &x, &x).unwrap(), 0.0);
        let p = FiniteMetricSpace::one_point();
        assert_eq!(distortion(&Correspondence::full(2, 1), &x, &p).unwrap(), 2.0);
        assert!(matches!(distortion(&bij, &x, &p), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn ordered_cliques_match_pair_list_order() {
        let y = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0], DEFAULT_EPS).unwrap();
        let inner = ordered_cliques(&[0, 1, 2], &y, 10.0, false);
        assert_eq!(
            inner,
            vec![vec![0, 1, 2], vec![0, 1], vec![0, 2], vec![0], vec![1, 2], vec![1], vec![2]]
        );
        let tail = ordered_cliques(&[0, 1, 2], &y, 10.0, true);
        assert_eq!(
            tail,
            vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![1], vec![1, 2], vec![2]]
        );
        // Distance limit drops non-cliques.
        assert_eq!(ordered_cliques(&[0, 2], &y, 1.0, true), vec![vec![0], vec![2]]);
    }

    #[test]
    fn gh_of_space_with_itself_is_zero() {
        let x = FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0, 7.0], DEFAULT_EPS).unwrap();
        let r = gh_exact(&x, &x, Budget::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness, Correspondence::identity(4));
        assert!(r.exact);
    }

    #[test]
    fn gh_against_one_point() {
        let x = pair_space(4.0);
        let p = FiniteMetricSpace::one_point();
        assert_eq!(gh_exact(&p, &x, Budget::default()).unwrap().value, 2.0);
        let simplex = FiniteMetricSpace::from_fn(3, DEFAULT_EPS, |_, _| 1.0).unwrap();
        assert_eq!(gh_exact(&simplex, &p, Budget::default()).unwrap().value, 0.5);
        let two = gh_exact(&p, &p, Budget::default()).unwrap();
        assert_eq!(two.value, 0.0);
        assert_eq!(two.witness.pairs(), &[(0, 0)]);
    }

    #[test]
    fn gh_two_point_spaces() {
        let r = gh_exact(&pair_space(2.0), &pair_space(5.0), Budget::default()).unwrap();
        assert_eq!(r.value, 1.5);
        // Both bijections attain 3; the identity-shaped one sorts first.
        assert_eq!(r.witness.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn lower_diam_examples() {
        let a = FiniteMetricSpace::on_line(&[0.0, 3.0], DEFAULT_EPS).unwrap();
        let b = FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0], DEFAULT_EPS).unwrap();
        assert_eq!(gh_lower_diam(&a, &b), 0.0);
        assert_eq!(gh_lower_diam(&FiniteMetricSpace::one_point(), &pair_space(4.0)), 2.0);
        let small = pair_space(1.0);
        let big = FiniteMetricSpace::on_line(&[0.0, 3.5, 7.0], DEFAULT_EPS).unwrap();
        assert_eq!(gh_lower_diam(&small, &big), 3.0);
        assert!(gh_exact(&small, &big, Budget::default()).unwrap().value >= 3.0);
    }

    #[test]
    fn budget_is_a_hard_wall() {
        let x = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], DEFAULT_EPS).unwrap();
        assert_eq!(
            gh_exact(&x, &x, Budget::default()).unwrap_err(),
            Error::BudgetExceeded { cells: 36, max_cells: 30 }
        );
        assert!(gh_exact(&x, &x, Budget::cells(36)).is_ok());
    }

    #[test]
    fn transpose_swaps_sides() {
        let r = Correspondence::new(2, 3, [(0, 0), (1, 1), (1, 2)]).unwrap();
        let t = r.transpose();
        assert_eq!(t.sizes(), (3, 2));
        assert_eq!(t.pairs(), &[(0, 0), (1, 1), (2, 1)]);
    }
}
