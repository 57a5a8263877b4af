use martingale::oracle::{block_edges, brute_force_leftmost, certify_exhaustive, certify_random};
use martingale::{interior, is_top_down_crossing, leftmost_crossing};
use proptest::prelude::*;
use randomness::{WeightField, WeightModel};
use wedge::{WedgeFunction, WedgeGraph};

fn custom(values: &[f64]) -> WedgeGraph {
    let f = WedgeFunction::Custom { values: values.to_vec() };
    WedgeGraph::build(&f, values.len() - 1).unwrap()
}

#[test]
fn exhaustive_small_blocks() {
    let shapes: [(&[f64], usize, usize); 7] = [
        (&[0.0, 2.5, 2.5, 2.5], 1, 3),
        (&[0.0, 1.5, 2.5, 3.5], 1, 3),
        (&[0.0, 1.2, 1.7, 1.9, 1.95, 1.99], 1, 5),
        (&[0.0, 4.5, 4.5], 1, 2),
        (&[0.0, 0.5, 2.5, 2.7], 1, 3),
        (&[0.0, 1.5, 3.5, 3.6], 1, 3),
        (&[0.0, 0.4, 0.8, 1.3, 2.1, 2.2], 2, 5),
    ];
    for (values, lo, hi) in shapes {
        let g = custom(values);
        let edges = block_edges(&g, lo, hi).len();
        assert!(edges <= 14, "{values:?} has {edges} edges");
        let c = certify_exhaustive(&g, lo, hi).unwrap();
        assert_eq!(c.configs, 1 << edges);
        assert!(c.with_crossing > 0);
        assert!(c.clean(), "{values:?}: {c:?}");
    }
}

#[test]
fn exhaustive_on_log_wedge_blocks() {
    // Blocks of the a = 2 wedge where the height changes inside the block.
    let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 0.0).unwrap(), 12).unwrap();
    for (lo, hi) in [(1, 3), (2, 4), (0, 2)] {
        if block_edges(&g, lo, hi).len() <= 14 {
            let c = certify_exhaustive(&g, lo, hi).unwrap();
            assert!(c.clean(), "{lo}..={hi}: {c:?}");
        }
    }
}

#[test]
fn random_five_by_four_blocks() {
    let g = custom(&[0.0, 3.5, 3.5, 3.5, 3.5, 3.5]);
    let mut total = 0;
    for (p, seed) in [(0.5, 1), (0.6, 2), (0.7, 3)] {
        let c = certify_random(&g, 1, 5, p, 3400, seed).unwrap();
        assert!(c.clean(), "p = {p}: {c:?}");
        assert!(c.with_crossing > 100);
        total += c.configs;
    }
    assert!(total >= 10_000);
}

#[test]
fn all_open_block_gives_the_left_side() {
    let g = custom(&[0.0, 2.5, 2.5, 2.5]);
    let f = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
    let b = brute_force_leftmost(&g, &f, 1, 3).unwrap().unwrap();
    let xs: Vec<usize> = b.path.iter().map(|&v| g.coords(v).0).collect();
    assert_eq!(xs, vec![1, 1, 1]);
    assert_eq!(leftmost_crossing(&g, &f, 1, 3).unwrap(), b.path);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wall_follower_output_is_a_crossing(seed in any::<u64>(), p in 0.3f64..0.9, width in 2usize..7) {
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.5, 1.0).unwrap(), 40).unwrap();
        let lo = 30 - width;
        let field = WeightField::sample(&WeightModel::constant(p), &g, seed, 0);
        if let Ok(path) = leftmost_crossing(&g, &field, lo, 30) {
            prop_assert!(is_top_down_crossing(&g, &field, lo, 30, &path));
            let int = interior(&g, lo, &path).unwrap();
            prop_assert!(int.faces >= 0);
            prop_assert!(int.measure >= int.faces as f64 - 1e-9);
        }
    }
}
