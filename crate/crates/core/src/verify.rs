//! The randomized verification suite: ten numbered checks run against exact
//! instances and brute-force oracles, with a report per check.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspondence::{gh_exact, Budget};
use crate::geodesic::{hausdorff_subsets, slice, verify_geodesic};
use crate::intervals::IntervalUnionSubset;
use crate::kuratowski::dt_check;
use crate::metric::FiniteMetricSpace;
use crate::oracle::{exhaustive_gh, exhaustive_minimax, sampled_cube_to_lattice, sampled_hausdorff_to_tree};
use crate::tol::DEFAULT_EPS;
use crate::tree::{random_instance, random_tree, tree_report, Condition, MetricTree, TreePoint, TreeSubsetX};
use crate::ultra::{gh_lower_ultra, is_ultrametric, minimax_matrix, ultrametrize};

/// Tolerance stated for the tree identity and geodesic additivity checks.
const TIGHT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Trial counts per randomized check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trials {
    pub delta1: usize,
    pub ultra_pairs: usize,
    pub minimax: usize,
    pub tree: usize,
    pub geodesic: usize,
    pub dt: usize,
    pub gh_triples: usize,
    pub perf: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Trials { delta1: 50, ultra_pairs: 200, minimax: 100, tree: 100, geodesic: 50, dt: 50, gh_triples: 100, perf: 3 }
    }
}

impl Trials {
    /// The same count for every randomized check.
    pub fn uniform(n: usize) -> Self {
        Trials { delta1: n, ultra_pairs: n, minimax: n, tree: n, geodesic: n, dt: n, gh_triples: n, perf: n.max(1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub eps: f64,
    pub seed: u64,
    pub budget: Budget,
    pub format: OutputFormat,
    pub trials: Trials,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eps: DEFAULT_EPS,
            seed: 7,
            budget: Budget::default(),
            format: OutputFormat::Json,
            trials: Trials::default(),
        }
    }
}

impl RunConfig {
    fn rng(&self, id: u8) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRecord {
    pub id: u8,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub runtime_ms: u128,
    pub time_limit_ms: u128,
    pub passed: bool,
    /// The first few failure descriptions.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub eps: f64,
    pub records: Vec<CriterionRecord>,
    pub total_runtime_ms: u128,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check; timing columns last.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "name", "trials", "failures", "worst_residual", "passed", "runtime_ms", "time_limit_ms"])
            .expect("in-memory csv");
        for r in &self.records {
            w.write_record([
                r.id.to_string(),
                r.name.clone(),
                r.trials.to_string(),
                r.failures.to_string(),
                format!("{:e}", r.worst_residual),
                r.passed.to_string(),
                r.runtime_ms.to_string(),
                r.time_limit_ms.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn record(&self, id: u8) -> Option<&CriterionRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

struct Tally {
    trials: usize,
    failures: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { trials: 0, failures: 0, worst: 0.0, notes: Vec::new() }
    }

    /// Records one trial. `residual` feeds the worst-case column.
    fn trial(&mut self, ok: bool, residual: f64, note: impl FnOnce() -> String) {
        self.trials += 1;
        self.failure(ok, residual, note);
    }

    /// An additional assertion inside the current trial.
    fn failure(&mut self, ok: bool, residual: f64, note: impl FnOnce() -> String) {
        if residual.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(residual);
        }
        if !ok {
            self.failures += 1;
            if self.notes.len() < 5 {
                self.notes.push(note());
            }
        }
    }
}

fn timed(id: u8, name: &str, limit_s: u64, f: impl FnOnce(&mut Tally)) -> CriterionRecord {
    let start = Instant::now();
    let mut tally = Tally::new();
    f(&mut tally);
    let runtime_ms = start.elapsed().as_millis();
    let time_limit_ms = limit_s as u128 * 1000;
    let passed = tally.failures == 0 && runtime_ms < time_limit_ms;
    CriterionRecord {
        id,
        name: name.to_string(),
        trials: tally.trials,
        failures: tally.failures,
        worst_residual: tally.worst,
        runtime_ms,
        time_limit_ms,
        passed,
        notes: tally.notes,
    }
}

/// A random metric space on `lo..=hi` points: a shortest-path closure of
/// random integer weights, distinct integer points of the sup-norm plane,
/// or a random ultrametric.
pub fn random_space<R: Rng>(rng: &mut R, lo: usize, hi: usize, eps: f64) -> FiniteMetricSpace {
    let n = rng.gen_range(lo..=hi);
    match rng.gen_range(0..3) {
        0 => {
            let mut d = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = rng.gen_range(1..=9) as f64 / 2.0;
                    d[i][j] = w;
                    d[j][i] = w;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if d[i][k] + d[k][j] < d[i][j] {
                            d[i][j] = d[i][k] + d[k][j];
                        }
                    }
                }
            }
            FiniteMetricSpace::from_fn(n, eps, |i, j| d[i][j]).expect("shortest-path closure is a metric")
        }
        1 => {
            let mut cells: Vec<(i32, i32)> = (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).collect();
            cells.shuffle(rng);
            let pts = &cells[..n];
            FiniteMetricSpace::from_fn(n, eps, |i, j| {
                (pts[i].0 - pts[j].0).abs().max((pts[i].1 - pts[j].1).abs()) as f64
            })
            .expect("distinct lattice points")
        }
        _ => {
            let mut d = vec![vec![0.0; n]; n];
            let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            let mut height = 0.0;
            while clusters.len() > 1 {
                height += rng.gen_range(1..=4) as f64 / 2.0;
                let a = clusters.swap_remove(rng.gen_range(0..clusters.len()));
                let k = rng.gen_range(0..clusters.len());
                for &i in &a {
                    for &j in &clusters[k] {
                        d[i][j] = height;
                        d[j][i] = height;
                    }
                }
                clusters[k].extend(a);
            }
            FiniteMetricSpace::from_fn(n, eps, |i, j| d[i][j]).expect("random ultrametric")
        }
    }
}

fn delta1_identity(cfg: &RunConfig) -> CriterionRecord {
    timed(1, "single point identity", 5, |t| {
        let mut rng = cfg.rng(1);
        let one = FiniteMetricSpace::one_point();
        for _ in 0..cfg.trials.delta1 {
            let x = random_space(&mut rng, 1, 5, cfg.eps);
            let (ab, ba) = match (gh_exact(&one, &x, cfg.budget), gh_exact(&x, &one, cfg.budget)) {
                (Ok(a), Ok(b)) => (a.value, b.value),
                (a, b) => {
                    t.trial(false, f64::NAN, || format!("solver error: {a:?} {b:?}"));
                    continue;
                }
            };
            let r = (2.0 * ab - x.diameter()).abs().max((2.0 * ba - x.diameter()).abs());
            t.trial(r <= cfg.eps, r, || format!("2 gh = {} vs diameter {} on {:?}", 2.0 * ab, x.diameter(), x.matrix()));
        }
    })
}

fn ultra_lower_bound(cfg: &RunConfig) -> CriterionRecord {
    timed(2, "ultrametrization lower bound", 60, |t| {
        let mut rng = cfg.rng(2);
        for _ in 0..cfg.trials.ultra_pairs {
            let x = random_space(&mut rng, 1, 5, cfg.eps);
            let y = random_space(&mut rng, 1, 5, cfg.eps);
            match (gh_exact(&x, &y, cfg.budget), gh_lower_ultra(&x, &y, cfg.budget)) {
                (Ok(g), Ok(l)) => {
                    let gap = (l - g.value).max(0.0);
                    t.trial(g.value >= l - cfg.eps, gap, || format!("gh {} < lower {l}", g.value));
                }
                (a, b) => t.trial(false, f64::NAN, || format!("solver error: {a:?} {b:?}")),
            }
        }
    })
}

fn minimax_oracle(cfg: &RunConfig) -> CriterionRecord {
    timed(3, "minimax oracle", 10, |t| {
        let mut rng = cfg.rng(3);
        for _ in 0..cfg.trials.minimax {
            let x = random_space(&mut rng, 1, 7, cfg.eps);
            let fast = minimax_matrix(&x);
            let slow = exhaustive_minimax(&x);
            let mut worst: f64 = 0.0;
            for (a, b) in fast.iter().flatten().zip(slow.iter().flatten()) {
                worst = worst.max((a - b).abs());
            }
            let exact = fast == slow;
            t.trial(exact, worst, || format!("minimax mismatch on {:?}", x.matrix()));
            t.failure(is_ultrametric(&fast, cfg.eps), 0.0, || format!("strong triangle fails on {fast:?}"));
        }
    })
}

fn tree_identity(cfg: &RunConfig) -> CriterionRecord {
    timed(4, "tree identity", 30, |t| {
        let fixed = [(seg_with(&[0.0, 3.0, 10.0]), 7.0, 3.5), (star_leaves(), 10.0, 5.0)];
        for ((tree, x), u, h) in &fixed {
            let r = tree_report(tree, x, cfg.budget);
            let res = (r.u_diam - u).abs().max((r.d_h - h).abs()).max(r.identity_residual);
            t.trial(
                res <= TIGHT && r.condition != Condition::Fails,
                res,
                || format!("fixed instance gave u_diam {} d_h {}", r.u_diam, r.d_h),
            );
        }
        let mut rng = cfg.rng(4);
        let mut found = 0;
        let mut attempts = 0;
        while found < cfg.trials.tree && attempts < 50 * cfg.trials.tree.max(1) {
            attempts += 1;
            let n = rng.gen_range(2..=8);
            let (tree, x) = random_instance(&mut rng, n);
            let r = tree_report(&tree, &x, cfg.budget);
            if r.condition == Condition::Fails {
                continue;
            }
            found += 1;
            t.trial(r.identity_residual <= TIGHT, r.identity_residual, || {
                format!("u_diam {} vs 2 d_h {} on {:?}", r.u_diam, 2.0 * r.d_h, x.points())
            });
            // Dense sampling never exceeds the exact value and misses it by
            // at most half a step.
            let step = 0.05;
            let est = sampled_hausdorff_to_tree(&tree, x.points(), step);
            let ok = est <= r.d_h + cfg.eps && r.d_h - est <= step / 2.0 + cfg.eps;
            t.failure(ok, 0.0, || format!("sampled d_h {est} vs exact {}", r.d_h));
        }
        if found < cfg.trials.tree {
            t.failure(false, 0.0, || format!("only {found} qualifying instances in {attempts} draws"));
        }
    })
}

fn condition_sharpness(cfg: &RunConfig) -> CriterionRecord {
    timed(5, "condition sharpness", 5, |t| {
        let (tree, x) = seg_with(&[0.0, 3.0]);
        let r = tree_report(&tree, &x, cfg.budget);
        let res = (r.d_h - 7.0).abs().max((r.boundary_gap - 7.0).abs()).max((r.u_diam - 3.0).abs());
        let ok = r.condition == Condition::Fails
            && !r.verdict_gh_equals_h
            && !r.identity_holds
            && res <= cfg.eps
            && (r.u_diam - 2.0 * r.d_h).abs() > cfg.eps;
        t.trial(ok, res, || format!("{r:?}"));
    })
}

fn random_closed_subset<R: Rng>(rng: &mut R, tree: &MetricTree) -> IntervalUnionSubset {
    loop {
        let mut ivs = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let e = rng.gen_range(0..tree.edge_count());
            let ticks = (tree.edges()[e].length * 10.0).round() as u32;
            let a = rng.gen_range(0..=ticks);
            let b = rng.gen_range(a..=ticks);
            ivs.push((e, a as f64 / 10.0, b as f64 / 10.0));
        }
        let verts: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..tree.vertex_count())).collect();
        if ivs.is_empty() && verts.is_empty() {
            continue;
        }
        return IntervalUnionSubset::from_parts(tree, ivs, verts).expect("intervals lie on their edges");
    }
}

fn geodesic_additivity(cfg: &RunConfig) -> CriterionRecord {
    timed(6, "geodesic additivity", 30, |t| {
        let mut rng = cfg.rng(6);
        for _ in 0..cfg.trials.geodesic {
            let n = rng.gen_range(2..=7);
            let tree = random_tree(&mut rng, n);
            let a = if rng.gen_bool(0.5) {
                random_closed_subset(&mut rng, &tree)
            } else {
                random_instance(&mut rng, n).1.as_set(&tree)
            };
            let b = IntervalUnionSubset::whole(&tree);
            let d = hausdorff_subsets(&tree, &a, &b).expect("same tree");
            let mut grid: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..=d)).collect();
            grid.sort_by(f64::total_cmp);
            // Once as drawn, once with both endpoints added.
            let mut closed = grid.clone();
            closed.insert(0, 0.0);
            closed.push(d);
            match (verify_geodesic(&tree, &a, &b, &grid), verify_geodesic(&tree, &a, &b, &closed)) {
                (Ok(g), Ok(h)) => {
                    let worst = g.worst_residual.max(h.worst_residual);
                    t.trial(worst <= TIGHT, worst, || format!("{g:?} / {h:?}"))
                }
                (g, h) => {
                    t.trial(false, f64::NAN, || format!("{g:?} / {h:?}"));
                    continue;
                }
            }
            let c0 = slice(&tree, &a, &b, 0.0).expect("t = 0 is in range");
            let cd = slice(&tree, &a, &b, d).expect("t = d is in range");
            let r0 = hausdorff_subsets(&tree, &c0, &a).expect("same tree");
            let rd = hausdorff_subsets(&tree, &cd, &b).expect("same tree");
            t.failure(c0 == a && cd == b, r0.max(rd), || format!("endpoints not recovered: {c0:?} / {cd:?}"));
        }
    })
}

fn lattice_patch(cfg: &RunConfig) -> CriterionRecord {
    timed(7, "sup-norm lattice patch", 60, |t| {
        let grid = FiniteMetricSpace::sup_norm_grid(5, 2, cfg.eps).expect("lattice is a metric space");
        let u = ultrametrize(&grid);
        let n = grid.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 0.0 } else { 1.0 };
                worst = worst.max((u.u_matrix[i][j] - want).abs());
            }
        }
        t.trial(worst == 0.0, worst, || "u-matrix is not the unit simplex".into());
        match gh_exact(&u.quotient, &FiniteMetricSpace::one_point(), cfg.budget) {
            Ok(g) => {
                let r = (g.value - 0.5).abs();
                t.failure(r <= cfg.eps, r, || format!("gh to a point = {}", g.value));
            }
            Err(e) => t.failure(false, f64::NAN, || format!("{e}")),
        }
        let est = sampled_cube_to_lattice(5, 2, 0.05);
        let r = (est - 0.5).abs();
        t.failure(r < 0.05, r, || format!("dense estimate {est}"));
    })
}

fn dt_complex(cfg: &RunConfig) -> CriterionRecord {
    timed(8, "segment complex", 30, |t| {
        let mut rng = cfg.rng(8);
        for _ in 0..cfg.trials.dt {
            let x = random_space(&mut rng, 2, 6, cfg.eps);
            let du = ultrametrize(&x).diameter();
            for factor in [0.5, 1.0, 2.0] {
                let tt = factor * du;
                let check = match dt_check(&x, tt, tt / 4.0, 0, cfg.budget) {
                    Ok(c) => c,
                    Err(e) => {
                        t.trial(false, f64::NAN, || format!("{e}"));
                        continue;
                    }
                };
                let excess = (check.distortion_bound - tt).max(0.0);
                let ok = check.isometry_residual <= TIGHT
                    && check.distortion_bound <= tt + TIGHT
                    && check.connected == (tt >= du - cfg.eps);
                t.trial(ok, check.isometry_residual.max(excess), || {
                    format!("t = {tt}, diam U = {du}: {check:?}")
                });
                if let Some(g) = check.gh_cross_check {
                    t.failure(g <= tt / 2.0 + cfg.eps, (g - tt / 2.0).max(0.0), || {
                        format!("gh(X, sample) = {g} > t/2 = {}", tt / 2.0)
                    });
                }
            }
        }
    })
}

fn gh_consistency(cfg: &RunConfig) -> CriterionRecord {
    timed(9, "gh self-consistency", 60, |t| {
        let mut rng = cfg.rng(9);
        for _ in 0..cfg.trials.gh_triples {
            let s: Vec<FiniteMetricSpace> = (0..3).map(|_| random_space(&mut rng, 1, 4, cfg.eps)).collect();
            let g = |a: usize, b: usize| gh_exact(&s[a], &s[b], cfg.budget).expect("4 x 4 is within budget");
            let (xy, yz, xz) = (g(0, 1), g(1, 2), g(0, 2));
            let yx = g(1, 0);
            let sym = (xy.value - yx.value).abs();
            let tri = (xz.value - xy.value - yz.value).max(0.0);
            t.trial(sym <= cfg.eps && tri <= cfg.eps, sym.max(tri), || {
                format!("symmetry {sym}, triangle excess {tri}")
            });
            for (a, b, r) in [(0, 1, &xy), (1, 2, &yz), (0, 2, &xz)] {
                if let Some((v, w)) = exhaustive_gh(&s[a], &s[b]) {
                    let res = (v - r.value).abs();
                    t.failure(res <= cfg.eps && w == r.witness.pairs(), res, || {
                        format!("oracle {v} {w:?} vs solver {} {:?}", r.value, r.witness.pairs())
                    });
                }
            }
        }
    })
}

fn performance(cfg: &RunConfig, elapsed_ms: u128) -> CriterionRecord {
    let mut rec = timed(10, "performance gate", 60, |t| {
        let mut rng = cfg.rng(10);
        for _ in 0..cfg.trials.perf {
            // Entries drawn from [1, 2] always satisfy the triangle
            // inequality and leave the search few ties to exploit.
            let mut generic = || {
                let m: Vec<f64> = (0..25).map(|_| rng.gen_range(1.0..2.0)).collect();
                FiniteMetricSpace::from_fn(5, cfg.eps, |i, j| m[i.min(j) * 5 + i.max(j)]).expect("entries in [1, 2]")
            };
            let x = generic();
            let y = generic();
            let start = Instant::now();
            let r = gh_exact(&x, &y, cfg.budget);
            let secs = start.elapsed().as_secs_f64();
            t.trial(r.is_ok() && secs < 60.0, 0.0, || format!("5 x 5 solve took {secs} s: {r:?}"));
        }
    });
    // The whole suite shares a five minute allowance.
    let total = elapsed_ms + rec.runtime_ms;
    if total >= 300_000 {
        rec.failures += 1;
        rec.passed = false;
        rec.notes.push(format!("suite took {total} ms"));
    }
    rec
}

fn seg_with(offsets: &[f64]) -> (MetricTree, TreeSubsetX) {
    let tree = MetricTree::segment(10.0).expect("segment");
    let pts = offsets.iter().map(|&o| tree.point_clamped(0, o)).collect();
    let x = TreeSubsetX::new(&tree, pts).expect("points on the segment");
    (tree, x)
}

fn star_leaves() -> (MetricTree, TreeSubsetX) {
    let tree = MetricTree::star(3, 5.0).expect("star");
    let x = TreeSubsetX::new(&tree, (1..=3).map(TreePoint::Vertex).collect()).expect("leaves");
    (tree, x)
}

/// Runs a single check by number.
pub fn run_criterion(id: u8, cfg: &RunConfig) -> Option<CriterionRecord> {
    Some(match id {
        1 => delta1_identity(cfg),
        2 => ultra_lower_bound(cfg),
        3 => minimax_oracle(cfg),
        4 => tree_identity(cfg),
        5 => condition_sharpness(cfg),
        6 => geodesic_additivity(cfg),
        7 => lattice_patch(cfg),
        8 => dt_complex(cfg),
        9 => gh_consistency(cfg),
        10 => performance(cfg, 0),
        _ => return None,
    })
}

/// Runs all ten checks in order.
pub fn run_all(cfg: &RunConfig) -> VerificationReport {
    let start = Instant::now();
    let mut records: Vec<CriterionRecord> = (1..=9).filter_map(|id| run_criterion(id, cfg)).collect();
    records.push(performance(cfg, start.elapsed().as_millis()));
    let passed = records.iter().all(|r| r.passed);
    VerificationReport {
        seed: cfg.seed,
        eps: cfg.eps,
        records,
        total_runtime_ms: start.elapsed().as_millis(),
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig { trials: Trials::uniform(5), ..RunConfig::default() }
    }

    #[test]
    fn random_spaces_respect_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = random_space(&mut rng, 2, 6, DEFAULT_EPS);
            assert!((2..=6).contains(&x.len()));
        }
    }

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let a = run_all(&small());
        assert!(a.passed, "{}", a.to_json());
        let b = run_all(&small());
        let strip = |r: &VerificationReport| {
            r.records.iter().map(|c| (c.id, c.trials, c.failures, c.worst_residual.to_bits())).collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.to_csv().lines().count(), 11);
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(11, &small()).is_none());
    }
}
