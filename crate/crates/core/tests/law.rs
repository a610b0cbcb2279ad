mod common;

use grouplaw::exact::FiniteGroupTable;
use grouplaw::kernel::FreeWord;
use grouplaw::law::{evaluate_word, parse_expr, LawExpr};
use grouplaw::walk::stream;
use grouplaw::Group;
use proptest::prelude::*;
use rand::Rng;

/// Repeated passes deleting adjacent `x x⁻¹` pairs until none remain.
fn naive_reduce(mut letters: Vec<i32>) -> Vec<i32> {
    loop {
        let Some(i) = letters.windows(2).position(|w| w[0] == -w[1]) else {
            return letters;
        };
        letters.drain(i..i + 2);
    }
}

fn signed(w: &FreeWord) -> Vec<i32> {
    w.letters().iter().map(|l| l.signed()).collect()
}

fn letter_strategy() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![-3..=-1i32, 1..=3i32], 0..40)
}

fn expr_strategy() -> impl Strategy<Value = LawExpr> {
    (any::<u64>(), 1..=4u32, 1..=4u32).prop_map(|(seed, vars, depth)| common::random_expr(&mut stream(seed, 0, 0, 0), vars, depth))
}

#[test]
fn evaluate_agrees_with_flattened_word() {
    let models: Vec<(Group, FiniteGroupTable<i64>)> = ["sym(4)", "quaternion", "extraspecial3", "dihedral(5)"]
        .iter()
        .map(|g| (Group::parse(g).unwrap(), FiniteGroupTable::parse(g).unwrap()))
        .collect();
    for t in 0..200 {
        let mut rng = stream(11, 0, t, 0);
        let expr = common::random_expr(&mut rng, 4, 4);
        let (g, table) = &models[t as usize % models.len()];
        let xs: Vec<_> = (0..4).map(|_| table.element(rng.random_range(0..table.order() as u32)).clone()).collect();
        let direct = expr.evaluate(g, &xs).unwrap();
        let via_word = evaluate_word(&expr.word(), g, &xs).unwrap();
        assert_eq!(g.canonicalize(&direct).unwrap(), g.canonicalize(&via_word).unwrap(), "{expr} on {}", g.name());
    }
}

proptest! {
    #[test]
    fn free_reduction_is_confluent(u in letter_strategy(), v in letter_strategy()) {
        let (ru, rv) = (FreeWord::from_signed(&u), FreeWord::from_signed(&v));
        let joined: Vec<i32> = u.iter().chain(&v).copied().collect();
        let whole = FreeWord::from_signed(&joined);
        prop_assert_eq!(&ru.mul(&rv), &whole);
        prop_assert_eq!(signed(&whole), naive_reduce(joined));
        prop_assert!(whole.is_reduced());
    }

    #[test]
    fn degrees_survive_flattening(e in expr_strategy()) {
        let rank = e.num_vars() as usize;
        prop_assert_eq!(e.word().exponent_sums(rank), e.degrees());
    }

    #[test]
    fn commutators_are_balanced(a in expr_strategy(), b in expr_strategy(), shift in 0..3u32) {
        prop_assert!(a.clone().comm(b.rename(shift)).is_balanced());
    }

    #[test]
    fn printed_expressions_parse_back(e in expr_strategy()) {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(back.word(), e.word(), "{}", text);
    }
}
