//! Acceptance criteria 1-12. Run with `cargo test -p grouplaw --test acceptance`.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

mod common;

use std::time::Instant;

use grouplaw::exact::{exact_law_probability, quotient_family_infimum, ExactProbability, FiniteGroupTable};
use grouplaw::geometry::{
    ball_enumerate, loop_intersection_prob, occupation_profile, product_ball_set, random_sparse_system,
    sparse_system_hit_prob, BALL_BUDGET,
};
use grouplaw::harness::{run_experiment, ExperimentConfig, ExperimentKind};
use grouplaw::identity::{conditional_check, perturb, shipped_claims, verify_free_identity, ClaimKind, SearchMode};
use grouplaw::kernel::GroupDescriptor;
use grouplaw::law::parse_law;
use grouplaw::walk::{estimate_law, run_walk, stream, word_path, Estimate};
use grouplaw::{Element, GeneratingSet, Group, Result};
use rand::Rng;

const SEED: u64 = 20240611;

type Outcome = Result<(bool, String)>;

fn show(e: &Estimate) -> String {
    format!("{:.4} [{:.4}, {:.4}]", e.p_hat, e.ci_lo, e.ci_hi)
}

fn standard_estimate(group: &str, law: &str, steps: u64, trials: u64) -> Result<Estimate> {
    let g = Group::parse(group)?;
    let s = GeneratingSet::standard(&g, true)?;
    estimate_law(&g, &s, &parse_law(law)?, steps, trials, SEED)
}

fn exact_suite() -> Outcome {
    let comm = parse_law("[x1,x2]")?;
    let table = |g: &str| FiniteGroupTable::<i64>::parse(g);
    let s3 = exact_law_probability(&table("sym(3)")?, &comm)?;
    let q8 = exact_law_probability(&table("quaternion")?, &comm)?;
    let d4 = exact_law_probability(&table("dihedral(4)")?, &parse_law("x1^2")?)?;
    let mut ok = s3 == ExactProbability::new(1, 2) && q8 == ExactProbability::new(5, 8) && d4 == ExactProbability::new(3, 4);
    let threshold = ExactProbability::new(5, 8);
    let names = common::NONABELIAN_FINITE.iter().map(|s| s.to_string()).chain((3..=49).map(|m| format!("dihedral({m})")));
    let mut checked = 0;
    let mut worst = ExactProbability::new(0, 1);
    for name in names {
        let t = table(&name)?;
        let p = exact_law_probability(&t, &comm)?;
        if t.is_abelian() || p > threshold {
            ok = false;
        }
        if p > worst {
            worst = p;
        }
        checked += 1;
    }
    Ok((ok, format!("Sym(3) = {s3}, Q8 = {q8}, D4 x^2 = {d4}; max over {checked} nonabelian groups = {worst}")))
}

fn dihedral_square() -> Outcome {
    let e = standard_estimate("dihedral-infinite", "x1^2", 400, 10_000)?;
    let points = quotient_family_infimum((3..=49).map(GroupDescriptor::Dihedral), &parse_law("x1^2")?, usize::MAX)?;
    let inf = points.last().expect("nonempty family").running_inf.to_f64();
    let ok = (0.45..=0.55).contains(&e.p_hat) && (inf - e.p_hat).abs() <= 0.02;
    Ok((ok, format!("p_hat = {}, family infimum = {inf:.4}", show(&e))))
}

fn sixth_power() -> Outcome {
    let e = standard_estimate("companion-semidirect(6)", "x1^6", 400, 10_000)?;
    let g = Group::parse("companion-semidirect(6)")?;
    let mut rng = stream(SEED, 0, 0, 3);
    let mut nontrivial = 0;
    for _ in 0..100 {
        let v: Vec<i64> = loop {
            let v: Vec<i64> = (0..5).map(|_| rng.random_range(-50..=50)).collect();
            if v.iter().any(|&c| c != 0) {
                break v;
            }
        };
        nontrivial += u32::from(!g.is_identity(&g.pow(&Element::semidirect(v, 0), 6)?));
    }
    let ok = (e.p_hat - 1.0 / 3.0).abs() <= 0.05 && nontrivial == 100;
    Ok((ok, format!("p_hat = {}, (v,0)^6 != 1 for {nontrivial}/100", show(&e))))
}

fn loop_intersections() -> Outcome {
    let w = parse_law("[x1,x2]")?;
    let offsets: Vec<Vec<i64>> = [5, 10, 20, 40].iter().map(|&k| vec![k, 0, 0, 0, 0]).collect();
    let est = loop_intersection_prob(&w, &w, 5, 200, &offsets, 20_000, SEED)?;
    let ok = est.windows(2).all(|p| p[0].above(&p[1])) && est[3].p_hat <= est[0].p_hat / 2.0;
    let detail = est.iter().map(show).collect::<Vec<_>>().join(", ");
    Ok((ok, format!("k = 5, 10, 20, 40: {detail}")))
}

fn metabelian_shift() -> Outcome {
    let g = Group::parse("wreath(free(2), lattice(5))")?;
    let law = parse_law("[[x1,x2],[x3,x4]]")?;
    let s0 = GeneratingSet::shifted_wreath_generators(&g, 0)?;
    let s50 = GeneratingSet::shifted_wreath_generators(&g, 50)?;
    let e0 = estimate_law(&g, &s0, &law, 200, 2000, SEED)?;
    let e50 = estimate_law(&g, &s50, &law, 200, 2000, SEED)?;
    let ok = s50.len() == 160 && e50.p_hat >= 0.9 && e50.p_hat >= e0.p_hat + 0.1;
    Ok((ok, format!("|S| = {}, k=0: {}, k=50: {}", s50.len(), show(&e0), show(&e50))))
}

fn heisenberg() -> Outcome {
    let e = standard_estimate("heisenberg-semidirect(2)", "[x1^2, x2]", 400, 10_000)?;
    Ok((e.p_hat >= 0.45, format!("p_hat = {}", show(&e))))
}

fn self_commutator() -> Outcome {
    let e = standard_estimate("wreath(cyclic(2), dihedral-infinite)", "[x1^2, x2^2]", 400, 10_000)?;
    Ok((e.p_hat >= 0.20, format!("p_hat = {}", show(&e))))
}

fn occupation() -> Outcome {
    let g = Group::parse("lattice(5)")?;
    let s = GeneratingSet::standard(&g, true)?;
    let radii: Vec<u32> = (1..=8).collect();
    let p = occupation_profile(&g, &s, &parse_law("[x1,x2]")?, 200, &radii, 2000, SEED, false)?;
    let slope = p.slope().unwrap_or(f64::NAN);
    Ok((slope <= 3.0, format!("slope = {slope:.3}")))
}

fn identity_suite() -> Outcome {
    let claims = shipped_claims();
    let named: Vec<_> = ["three-cubes-commutator", "commutator-product-right", "commutator-product-left"]
        .iter()
        .map(|n| claims.iter().find(|c| c.name == *n).expect("shipped identity"))
        .collect();
    let mut ok = true;
    for c in &named {
        ok &= verify_free_identity(c)?;
    }
    let mut rng = stream(SEED, 0, 0, 9);
    let mut survivors = 0;
    for i in 0..20 {
        survivors += u32::from(verify_free_identity(&perturb(named[i % named.len()], &mut rng))?);
    }
    ok &= survivors == 0;

    let extraspecial = FiniteGroupTable::<i64>::parse("extraspecial3")?;
    let sampled: Vec<_> = ["sym(4)", "dihedral(8)", "quaternion"]
        .iter()
        .map(|g| FiniteGroupTable::<i64>::parse(g))
        .collect::<Result<_>>()?;
    let mut searches = 0;
    let mut failures = Vec::new();
    for c in claims.iter().filter(|c| c.kind == ClaimKind::Conditional) {
        if conditional_check(c, &extraspecial, SearchMode::Exhaustive)?.is_some() {
            failures.push(format!("{}@extraspecial3", c.name));
        }
        for t in &sampled {
            if conditional_check(c, t, SearchMode::Sampled { trials: 100_000, seed: SEED })?.is_some() {
                failures.push(format!("{}@{}", c.name, t.name()));
            }
        }
        searches += 1 + sampled.len();
    }
    ok &= failures.is_empty();
    Ok((ok, format!("{} identities hold, {survivors}/20 perturbations survive, {searches} searches, counterexamples: {failures:?}", named.len())))
}

fn balls() -> Outcome {
    let g = Group::parse("product(wreath(cyclic(2), lattice(1)), sym(4))")?;
    let factor = &g.product_parts().expect("product")[0];
    let s = GeneratingSet::switch_move_switch(factor, false)?;
    let law = parse_law("[[x1,x2],[x3,x4]]")?;
    let t1 = product_ball_set(&g, &s)?;
    let t2 = product_ball_set(&g, &s.power(factor, 2)?)?;
    let e1 = ball_enumerate(&g, &t1, 6, BALL_BUDGET)?.estimate(&g, &law, 10_000, SEED)?;
    let e2 = ball_enumerate(&g, &t2, 3, BALL_BUDGET)?.estimate(&g, &law, 10_000, SEED)?;
    Ok((e2.above(&e1), format!("S at radius 6: {}, S^2 at radius 3: {}", show(&e1), show(&e2))))
}

fn sparse() -> Outcome {
    let mut violations = 0;
    let mut shapes_ok = true;
    for i in 0..100 {
        let sys = random_sparse_system(SEED.wrapping_add(i));
        shapes_ok &= sys.num_rows() <= 12 && [2, 3, 5].contains(&sys.modulus()) && sys.k() <= 3;
        violations += u32::from(!sparse_system_hit_prob(&sys, 20_000, SEED)?.bound_satisfied);
    }
    Ok((violations == 0 && shapes_ok, format!("{violations}/100 instances violate the bound")))
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(f)
}

fn determinism() -> Result<bool> {
    let run = || -> Result<(Estimate, Vec<Estimate>, Vec<f64>, String)> {
        let e = standard_estimate("heisenberg-semidirect(2)", "[x1^2, x2]", 100, 3000)?;
        let w = parse_law("[x1,x2]")?;
        let loops = loop_intersection_prob(&w, &w, 5, 50, &[vec![3, 0, 0, 0, 0]], 500, SEED)?;
        let g = Group::parse("lattice(5)")?;
        let s = GeneratingSet::standard(&g, true)?;
        let occ = occupation_profile(&g, &s, &w, 50, &[1, 2, 4], 300, SEED, false)?;
        let mut cfg = ExperimentConfig::new(ExperimentKind::Estimate);
        for (k, v) in [("group", "dihedral-infinite"), ("law", "x1^2"), ("walk.trials", "2000"), ("walk.grid", "50,100")] {
            cfg.set(k, v)?;
        }
        let report = run_experiment(&cfg)?.results_jsonl();
        Ok((e, loops, occ.mean_counts, report))
    };
    let base = with_threads(1, run)?;
    for n in [2, 4] {
        if with_threads(n, run)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

fn endpoint_identity() -> Result<(u32, u32)> {
    let groups = [
        "dihedral-infinite",
        "heisenberg(2)",
        "wreath(cyclic(2), lattice(1))",
        "free(2)",
        "sym(4)",
        "lattice(3)",
        "companion-semidirect(3)",
        "heisenberg-semidirect(2)",
    ];
    let groups: Vec<(Group, GeneratingSet)> = groups
        .iter()
        .map(|g| -> Result<_> {
            let g = Group::parse(g)?;
            let s = GeneratingSet::standard(&g, true)?;
            Ok((g, s))
        })
        .collect::<Result<_>>()?;
    let mut mismatches = 0;
    let mut cases = 0;
    for t in 0..10_000u64 {
        let mut rng = stream(SEED, 1, t, 0);
        let (g, s) = &groups[rng.random_range(0..groups.len())];
        let vars = rng.random_range(1..=3);
        let expr = common::random_expr(&mut rng, vars, 3);
        let steps = rng.random_range(0..=15);
        let d = expr.num_vars() as u64;
        let traces = (0..d).map(|v| run_walk(g, s, steps, &mut stream(SEED, steps, t, v + 1))).collect::<Result<Vec<_>>>()?;
        let endpoints: Vec<_> = traces.iter().map(|tr| tr.last().expect("nonempty").clone()).collect();
        let path = word_path(g, &expr.word(), &traces)?;
        let direct = expr.evaluate(g, &endpoints)?;
        mismatches += u32::from(g.canonicalize(path.endpoint())? != g.canonicalize(&direct)?);
        cases += 1;
    }
    Ok((cases, mismatches))
}

fn coverage() -> Result<(u32, u32, Vec<String>)> {
    let cases = [("sym(3)", "[x1,x2]"), ("quaternion", "[x1,x2]"), ("dihedral(4)", "x1^2"), ("sym(4)", "[x1,x2]")];
    let (mut covered, mut total) = (0, 0);
    let mut per_case = Vec::new();
    for (group, law) in cases {
        let law = parse_law(law)?;
        let p = exact_law_probability(&FiniteGroupTable::<i64>::parse(group)?, &law)?.to_f64();
        let g = Group::parse(group)?;
        let s = GeneratingSet::standard(&g, true)?;
        let mut hits = 0;
        for rep in 0..200u64 {
            hits += u32::from(estimate_law(&g, &s, &law, 100, 500, SEED.wrapping_add(rep))?.covers(p));
        }
        per_case.push(format!("{group} {hits}/200"));
        covered += hits;
        total += 200;
    }
    Ok((covered, total, per_case))
}

fn engine_properties() -> Outcome {
    let deterministic = determinism()?;
    let (cases, mismatches) = endpoint_identity()?;
    let (covered, total, per_case) = coverage()?;
    let rate = f64::from(covered) / f64::from(total);
    let ok = deterministic && mismatches == 0 && rate >= 0.93;
    Ok((
        ok,
        format!(
            "thread-count determinism {deterministic}; endpoint identity {mismatches} mismatches in {cases}; CI coverage {:.1}% ({})",
            100.0 * rate,
            per_case.join(", ")
        ),
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("exact-finite-suite", exact_suite),
        ("dihedral-square", dihedral_square),
        ("power-law-non-positivity", sixth_power),
        ("loop-intersections", loop_intersections),
        ("metabelian-non-gap", metabelian_shift),
        ("heisenberg-commutator-power", heisenberg),
        ("self-commutator", self_commutator),
        ("occupation-measure", occupation),
        ("identity-suite", identity_suite),
        ("uniform-on-balls", balls),
        ("sparse-system-bound", sparse),
        ("engine-properties", engine_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += u32::from(!ok);
        let secs = start.elapsed().as_secs_f64();
        println!("{} {:>2} {name} ({secs:.1} s): {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
