#![allow(dead_code)]

use grouplaw::LawExpr;
use rand::Rng;

/// A random law tree on variables `1..=vars` with at most `depth` levels.
pub fn random_expr<R: Rng>(rng: &mut R, vars: u32, depth: u32) -> LawExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return LawExpr::Var(rng.random_range(1..=vars));
    }
    let sub = |rng: &mut R| random_expr(rng, vars, depth - 1);
    match rng.random_range(0..5u8) {
        0 => sub(rng).inv(),
        1 => sub(rng).pow(rng.random_range(-3..=3)),
        2 => sub(rng).mul(sub(rng)),
        3 => sub(rng).comm(sub(rng)),
        _ => sub(rng).conj(sub(rng)),
    }
}

/// Finite groups used for exact comparisons; all nonabelian.
pub const NONABELIAN_FINITE: [&str; 12] = [
    "sym(3)",
    "sym(4)",
    "sym(5)",
    "sym(6)",
    "quaternion",
    "extraspecial3",
    "dihedral(8)",
    "wreath(cyclic(2), cyclic(3))",
    "quotient(heisenberg(2), 3)",
    "quotient(companion-semidirect(3), 2)",
    "quotient(heisenberg-semidirect(2), 4)",
    "product(quaternion, dihedral(4))",
];
