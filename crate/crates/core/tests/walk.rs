mod common;

use std::collections::HashMap;

use grouplaw::law::{evaluate_word, parse_expr, parse_law};
use grouplaw::walk::{estimate_curve, run_walk, stream, walk_endpoint, word_path};
use grouplaw::{Element, GeneratingSet, Group};
use rand::Rng;

#[test]
fn consecutive_path_points_differ_by_an_atom() {
    for name in ["heisenberg(2)", "wreath(cyclic(2), lattice(1))", "sym(4)", "free(2)", "companion-semidirect(3)"] {
        let g = Group::parse(name).unwrap();
        let s = GeneratingSet::standard(&g, true).unwrap();
        for t in 0..200 {
            let mut rng = stream(5, 0, t, 0);
            let expr = common::random_expr(&mut rng, 3, 3);
            let steps = rng.random_range(1..=12);
            let traces: Vec<_> = (0..3).map(|v| run_walk(&g, &s, steps, &mut stream(5, steps, t, v + 1)).unwrap()).collect();
            let path = word_path(&g, &expr.word(), &traces).unwrap();
            assert_eq!(path.points.len(), expr.word().len() * steps as usize + 1);
            for pair in path.points.windows(2) {
                let step = g.multiply(&g.inverse(&pair[0]).unwrap(), &pair[1]).unwrap();
                assert!(s.atoms().contains(&step), "{name}: step {step} is not an atom");
            }
        }
    }
}

fn distribution(samples: impl Iterator<Item = Element>, trials: u64) -> HashMap<String, f64> {
    let mut counts = HashMap::new();
    for x in samples {
        *counts.entry(x.encode()).or_insert(0.0) += 1.0 / trials as f64;
    }
    counts
}

#[test]
fn simple_product_is_distributed_like_a_longer_walk() {
    let g = Group::parse("sym(4)").unwrap();
    let s = GeneratingSet::standard(&g, true).unwrap();
    let word = parse_expr("x3^-1 x1 x4").unwrap().word();
    let (n, trials) = (1u64, 100_000u64);
    let product = distribution(
        (0..trials).map(|t| {
            let xs: Vec<_> = (0..4).map(|v| walk_endpoint(&g, &s, n, &mut stream(8, n, t, v)).unwrap()).collect();
            g.canonicalize(&evaluate_word(&word, &g, &xs).unwrap()).unwrap()
        }),
        trials,
    );
    let direct = distribution(
        (0..trials).map(|t| g.canonicalize(&walk_endpoint(&g, &s, 3 * n, &mut stream(9, 3 * n, t, 0)).unwrap()).unwrap()),
        trials,
    );
    let keys: std::collections::HashSet<_> = product.keys().chain(direct.keys()).collect();
    let tv: f64 = keys.iter().map(|k| (product.get(*k).unwrap_or(&0.0) - direct.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>() / 2.0;
    assert!(tv < 0.05, "total variation {tv}");
    let from_uniform: f64 = 0.5 * (direct.values().map(|p| (p - 1.0 / 24.0).abs()).sum::<f64>() + (24 - direct.len()) as f64 / 24.0);
    assert!(from_uniform > 0.1, "walk already mixed: {from_uniform}");
    let identity = g.identity().encode();
    let (p, q) = (product.get(&identity).unwrap_or(&0.0), direct.get(&identity).unwrap_or(&0.0));
    assert!((p - q).abs() < 0.01, "return probabilities {p} vs {q}");
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let g = Group::parse("wreath(cyclic(2), dihedral-infinite)").unwrap();
    let s = GeneratingSet::standard(&g, true).unwrap();
    let law = parse_law("[x1^2, x2^2]").unwrap();
    let run = || estimate_curve(&g, &s, &law, &[20, 60], 1500, 4).unwrap();
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(run);
    assert_eq!(pool(3).install(run), one);
    assert_eq!(pool(8).install(run), one);
}
