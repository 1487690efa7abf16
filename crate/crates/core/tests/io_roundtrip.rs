use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ghtree::io::{
    intervals_to_doc, load_intervals, load_space, load_subset, load_tree, parse_inputs, space_to_doc, subset_to_doc,
    to_pretty, tree_to_doc, Document,
};
use ghtree::tree::random_instance;
use ghtree::verify::random_space;
use ghtree::{neighborhood, DEFAULT_EPS};

fn write(dir: &tempfile::TempDir, name: &str, text: String) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spaces_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_space(&mut rng, 1, 7, DEFAULT_EPS);
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "x.json", to_pretty(&space_to_doc(&x)));
        prop_assert_eq!(&load_space(&p, DEFAULT_EPS).unwrap(), &x);
        prop_assert!(matches!(parse_inputs(&p, DEFAULT_EPS).unwrap(), Document::Space(y) if y == x));
    }

    #[test]
    fn trees_subsets_and_intervals_round_trip(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t, x) = random_instance(&mut rng, n);
        let dir = tempfile::tempdir().unwrap();
        let tp = write(&dir, "t.json", to_pretty(&tree_to_doc(&t)));
        let t2 = load_tree(&tp, DEFAULT_EPS).unwrap();
        prop_assert_eq!(&t2, &t);
        let xp = write(&dir, "x.json", to_pretty(&subset_to_doc(&t, &x)));
        prop_assert_eq!(&load_subset(&xp, &t2).unwrap(), &x);

        let set = neighborhood(&t, &x.as_set(&t), rng.gen_range(0.0..2.0)).unwrap();
        let ip = write(&dir, "i.json", to_pretty(&intervals_to_doc(&t, &set)));
        prop_assert_eq!(&load_intervals(&ip, &t2).unwrap(), &set);
    }
}

#[test]
fn lone_vertex_tree_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tp = write(&dir, "t.json", r#"{"vertices": ["solo"], "edges": []}"#.into());
    let t = load_tree(&tp, DEFAULT_EPS).unwrap();
    let ip = write(&dir, "i.json", r#"{"edge_intervals": [], "vertices": ["solo"]}"#.into());
    let set = load_intervals(&ip, &t).unwrap();
    assert_eq!(set.isolated_vertices(), &[0]);
    let again = write(&dir, "j.json", to_pretty(&intervals_to_doc(&t, &set)));
    assert_eq!(load_intervals(&again, &t).unwrap(), set);
}
