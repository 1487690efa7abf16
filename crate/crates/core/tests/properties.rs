use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ghtree::correspondence::{distortion, gh_exact, gh_lower_diam, Budget};
use ghtree::geodesic::{hausdorff_subsets, slice};
use ghtree::metric::{hausdorff, FiniteMetricSpace};
use ghtree::oracle::{point_set_hausdorff, sampled_hausdorff_to_tree};
use ghtree::tree::{classify, hausdorff_to_tree, random_instance, random_tree, TreePoint};
use ghtree::ultra::{is_ultrametric, minimax_matrix, ultrametrize};
use ghtree::verify::random_space;
use ghtree::{IntervalUnionSubset, DEFAULT_EPS};

const EPS: f64 = DEFAULT_EPS;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_members<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut m: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if m.is_empty() {
        m.push(rng.gen_range(0..n));
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric_on_subsets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_space(&mut r, 1, 7, EPS);
        let (a, b, c) = (random_members(&mut r, x.len()), random_members(&mut r, x.len()), random_members(&mut r, x.len()));
        let (sa, sb, sc) = (x.subset(a).unwrap(), x.subset(b).unwrap(), x.subset(c).unwrap());
        let ab = hausdorff(&sa, &sb).unwrap();
        prop_assert_eq!(ab, hausdorff(&sb, &sa).unwrap());
        prop_assert_eq!(hausdorff(&sa, &sa).unwrap(), 0.0);
        prop_assert!(hausdorff(&sa, &sc).unwrap() <= ab + hausdorff(&sb, &sc).unwrap() + EPS);
        prop_assert!(ab <= x.diameter() + EPS);
    }

    #[test]
    fn gh_bounds_and_witness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_space(&mut r, 1, 5, EPS);
        let y = random_space(&mut r, 1, 5, EPS);
        let g = gh_exact(&x, &y, Budget::default()).unwrap();
        prop_assert!(g.value >= gh_lower_diam(&x, &y) - EPS);
        prop_assert!(g.value <= x.diameter().max(y.diameter()) / 2.0 + EPS);
        prop_assert_eq!(distortion(&g.witness, &x, &y).unwrap(), g.distortion());
        prop_assert_eq!(gh_exact(&x, &x, Budget::default()).unwrap().value, 0.0);
    }

    #[test]
    fn minimax_is_an_idempotent_lower_ultrametric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_space(&mut r, 1, 8, EPS);
        let u = minimax_matrix(&x);
        prop_assert!(is_ultrametric(&u, EPS));
        for i in 0..x.len() {
            for j in 0..x.len() {
                prop_assert!(u[i][j] <= x.d(i, j));
            }
        }
        let q = ultrametrize(&x).quotient;
        prop_assert_eq!(minimax_matrix(&q), q.matrix());
    }

    #[test]
    fn duplicated_points_change_nothing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_space(&mut r, 1, 4, EPS);
        let n = x.len();
        let dup = r.gen_range(0..n);
        let at = |i: usize| if i == n { dup } else { i };
        let mut labels = x.labels().to_vec();
        labels.push("dup".into());
        let m = (0..=n).map(|i| (0..=n).map(|j| x.d(at(i), at(j))).collect()).collect();
        let xp = FiniteMetricSpace::pseudometric(labels, m, EPS).unwrap();
        prop_assert!(FiniteMetricSpace::from_fn(n + 1, EPS, |i, j| x.d(at(i), at(j))).is_err());
        let u = ultrametrize(&xp);
        prop_assert_eq!(u.quotient.len(), ultrametrize(&x).quotient.len());
        prop_assert_eq!(u.diameter(), ultrametrize(&x).diameter());
        prop_assert_eq!(gh_exact(&x, &xp, Budget::default()).unwrap().value, 0.0);
    }

    #[test]
    fn tree_metric_satisfies_four_point_condition(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let t = random_tree(&mut r, n);
        let pts = t.sample(0.7);
        let pick: Vec<TreePoint> = (0..4).map(|_| pts[r.gen_range(0..pts.len())]).collect();
        let d = |i: usize, j: usize| t.distance(pick[i], pick[j]);
        let mut sums = [d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
        sums.sort_by(f64::total_cmp);
        prop_assert!((sums[2] - sums[1]).abs() <= 1e-9);
    }

    #[test]
    fn hausdorff_to_tree_matches_dense_sampling(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let (t, x) = random_instance(&mut r, n);
        let exact = hausdorff_to_tree(&t, &x);
        let step = 0.02;
        let est = sampled_hausdorff_to_tree(&t, x.points(), step);
        prop_assert!(est <= exact + EPS);
        prop_assert!(exact - est <= step / 2.0 + EPS, "exact {} sampled {}", exact, est);
    }

    #[test]
    fn classification_matches_the_path_oracle(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let (t, x) = random_instance(&mut r, n);
        let c = classify(&t, &x);
        let xs = x.points();
        for p in t.sample(0.3) {
            let on_path = xs.iter().any(|&a| {
                xs.iter().any(|&b| (t.distance(a, p) + t.distance(p, b) - t.distance(a, b)).abs() <= 1e-9)
            });
            prop_assert_eq!(c.hull.contains(&t, p), on_path, "at {}", t.describe(p));
            let in_boundary = c.boundary.as_ref().is_some_and(|b| b.contains(&t, p));
            prop_assert!(on_path || in_boundary);
        }
        for &p in xs {
            prop_assert!(c.hull.contains(&t, p));
        }
    }

    #[test]
    fn slices_sit_at_the_right_distances(seed in any::<u64>(), n in 2usize..8, frac in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let (t, x) = random_instance(&mut r, n);
        let a = x.as_set(&t);
        let b = IntervalUnionSubset::whole(&t);
        let d = hausdorff_subsets(&t, &a, &b).unwrap();
        let s = frac * d;
        let c = slice(&t, &a, &b, s).unwrap();
        prop_assert!((hausdorff_subsets(&t, &a, &c).unwrap() - s).abs() <= 1e-9);
        prop_assert!((hausdorff_subsets(&t, &c, &b).unwrap() - (d - s)).abs() <= 1e-9);
        // Dense sampling of both sets brackets the exact value.
        let step = 0.05;
        let est = point_set_hausdorff(&t, &c.sample(&t, step), &a.sample(&t, step));
        prop_assert!((est - s).abs() <= step + 1e-9, "exact {} sampled {}", s, est);
    }
}
