use rand::Rng;
use serde::Serialize;

use crate::exact::quotient_family_infimum;
use crate::geometry::{
    ball_enumerate, loop_intersection_prob, occupation_profile, product_ball_set, random_sparse_system,
    sparse_system_hit_prob, BALL_BUDGET,
};
use crate::identity::{perturb, shipped_claims, shipped_models, verify_free_identity, verify_manifest, ClaimKind};
use crate::kernel::{cyclotomic_action_matrix, totient, GroupDescriptor, IntMatrix};
use crate::law::{parse_law, LawExpr};
use crate::walk::{estimate_law, stream, Estimate};
use crate::{Element, Error, GeneratingSet, Group, Result};

/// Bundle ids accepted by [`reproduce`].
pub const SECTIONS: [&str; 8] = ["5.1", "5.3", "6", "7", "8", "9.1", "10", "11"];

/// One thresholded measurement of a bundle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub section: String,
    pub check: String,
    pub value: f64,
    pub threshold: String,
    pub passed: bool,
    pub detail: String,
}

struct Bundle {
    section: &'static str,
    seed: u64,
    checks: Vec<Check>,
}

impl Bundle {
    fn check(&mut self, name: &str, value: f64, threshold: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            section: self.section.to_string(),
            check: name.to_string(),
            value,
            threshold: threshold.to_string(),
            passed,
            detail,
        });
    }

    fn estimate(&self, group: &str, law: &str, steps: u64, trials: u64) -> Result<Estimate> {
        let g = Group::parse(group)?;
        let s = GeneratingSet::standard(&g, true)?;
        estimate_law(&g, &s, &parse_law(law)?, steps, trials, self.seed)
    }
}

fn show(e: &Estimate) -> String {
    format!("{}/{} = {:.4} [{:.4}, {:.4}]", e.successes, e.trials, e.p_hat, e.ci_lo, e.ci_hi)
}

/// Runs the pre-registered experiments of bundle `section`.
pub fn reproduce(section: &str, seed: u64) -> Result<Vec<Check>> {
    let Some(&section) = SECTIONS.iter().find(|s| **s == section) else {
        return Err(Error::Argument(format!("unknown section '{section}', expected one of {}", SECTIONS.join(", "))));
    };
    let mut b = Bundle { section, seed, checks: Vec::new() };
    match section {
        "5.1" => dihedral_and_power(&mut b)?,
        "5.3" => identities(&mut b)?,
        "6" => loops_and_metabelian(&mut b)?,
        "7" => cyclotomic(&mut b)?,
        "8" => {
            let e = b.estimate("heisenberg-semidirect(2)", "[x1^2, x2]", 400, 10_000)?;
            b.check("heisenberg-commutator-square", e.p_hat, "p_hat >= 0.45", e.p_hat >= 0.45, show(&e));
        }
        "9.1" => self_commutator_and_sparse(&mut b)?,
        "10" => {
            let g = Group::parse("lattice(5)")?;
            let s = GeneratingSet::standard(&g, true)?;
            let radii: Vec<u32> = (1..=8).collect();
            let p = occupation_profile(&g, &s, &parse_law("[x1,x2]")?, 200, &radii, 2000, seed, false)?;
            let slope = p.slope().unwrap_or(f64::NAN);
            b.check("occupation-slope", slope, "slope <= 3", slope <= 3.0, format!("means {:?}", p.mean_counts));
        }
        "11" => balls(&mut b)?,
        _ => unreachable!("section ids are checked above"),
    }
    Ok(b.checks)
}

fn dihedral_and_power(b: &mut Bundle) -> Result<()> {
    let e = b.estimate("dihedral-infinite", "x1^2", 400, 10_000)?;
    let ok = (0.45..=0.55).contains(&e.p_hat);
    b.check("dihedral-square", e.p_hat, "0.45 <= p_hat <= 0.55", ok, show(&e));

    let family = (3..=49).map(GroupDescriptor::Dihedral);
    let points = quotient_family_infimum(family, &parse_law("x1^2")?, usize::MAX)?;
    let inf = points.last().expect("nonempty family").running_inf.clone();
    let gap = (inf.to_f64() - e.p_hat).abs();
    b.check("dihedral-family-infimum", inf.to_f64(), "|inf - p_hat| <= 0.02", gap <= 0.02, format!("inf = {inf}"));

    let e = b.estimate("companion-semidirect(6)", "x1^6", 400, 10_000)?;
    let gap = (e.p_hat - 1.0 / 3.0).abs();
    b.check("power-sixth", e.p_hat, "|p_hat - 1/3| <= 0.05", gap <= 0.05, show(&e));

    let g = Group::parse("companion-semidirect(6)")?;
    let mut rng = stream(b.seed, 0, 0, 0);
    let mut nontrivial = 0;
    let mut sampled = 0;
    while sampled < 100 {
        let v: Vec<i64> = (0..5).map(|_| rng.random_range(-50..=50)).collect();
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        sampled += 1;
        let x = Element::semidirect(v, 0);
        nontrivial += u32::from(!g.is_identity(&g.pow(&x, 6)?));
    }
    b.check("power-sixth-not-virtual", f64::from(nontrivial), "all 100 sampled (v,0) have (v,0)^6 != 1", nontrivial == 100, String::new());
    Ok(())
}

fn identities(b: &mut Bundle) -> Result<()> {
    let claims = shipped_claims();
    let unconditional: Vec<_> = claims.iter().filter(|c| c.kind == ClaimKind::Unconditional).collect();
    let held = unconditional.iter().map(|c| verify_free_identity(c)).collect::<Result<Vec<_>>>()?;
    let ok = held.iter().filter(|&&h| h).count();
    b.check("unconditional-identities", ok as f64, "all hold in the free group", ok == held.len(), format!("{ok}/{}", held.len()));

    let mut rng = stream(b.seed, 0, 0, 1);
    let mut survived = Vec::new();
    for i in 0..20 {
        let p = perturb(unconditional[i % unconditional.len()], &mut rng);
        if verify_free_identity(&p)? {
            survived.push(p.to_string());
        }
    }
    b.check("perturbed-identities-fail", (20 - survived.len()) as f64, "all 20 perturbations fail", survived.is_empty(), survived.join("; "));

    let conditional: Vec<_> = claims.into_iter().filter(|c| c.kind == ClaimKind::Conditional).collect();
    let models = shipped_models::<i64>()?;
    for r in verify_manifest(&conditional, &models, 100_000, b.seed)? {
        let detail = format!("{} ({})", r.model, r.mode) + &r.counterexample.map(|c| format!(": {c}")).unwrap_or_default();
        b.check(&format!("{}@{}", r.name, r.model), f64::from(u8::from(r.verified)), "no counterexample", r.verified, detail);
    }
    Ok(())
}

fn loops_and_metabelian(b: &mut Bundle) -> Result<()> {
    let w = parse_law("[x1,x2]")?;
    let ks = [5i64, 10, 20, 40];
    let offsets: Vec<Vec<i64>> = ks.iter().map(|&k| vec![k, 0, 0, 0, 0]).collect();
    let est = loop_intersection_prob(&w, &w, 5, 200, &offsets, 20_000, b.seed)?;
    let decreasing = est.windows(2).all(|p| p[0].above(&p[1]));
    let halved = est[3].p_hat <= est[0].p_hat / 2.0;
    let detail = ks.iter().zip(&est).map(|(k, e)| format!("k={k}: {}", show(e))).collect::<Vec<_>>().join("; ");
    b.check(
        "loop-intersection-decay",
        est[3].p_hat / est[0].p_hat,
        "strictly decreasing beyond CI and p(40) <= p(5)/2",
        decreasing && halved,
        detail,
    );

    let g = Group::parse("wreath(free(2), lattice(5))")?;
    let law = parse_law("[[x1,x2],[x3,x4]]")?;
    let at = |k| -> Result<Estimate> {
        estimate_law(&g, &GeneratingSet::shifted_wreath_generators(&g, k)?, &law, 200, 2000, b.seed)
    };
    let (e0, e50) = (at(0)?, at(50)?);
    b.check("metabelian-shift-50", e50.p_hat, "p_hat(50) >= 0.9", e50.p_hat >= 0.9, show(&e50));
    b.check(
        "metabelian-shift-gain",
        e50.p_hat - e0.p_hat,
        "p_hat(50) >= p_hat(0) + 0.1",
        e50.p_hat >= e0.p_hat + 0.1,
        format!("k=0: {}", show(&e0)),
    );
    Ok(())
}

/// Polynomials with coefficients in `{-1, 0, 1}` and degree below `n`.
fn small_polys(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..3u32.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let c = i64::from(code % 3) - 1;
                code /= 3;
                c
            })
            .collect()
    })
}

fn cyclotomic(b: &mut Bundle) -> Result<()> {
    for m in [5u64, 6] {
        let g = Group::parse(&format!("cyclotomic-semidirect({m})"))?;
        let s = GeneratingSet::rotations(&g)?;
        let e = estimate_law(&g, &s, &LawExpr::Var(1).pow(m as i64), 400, 10_000, b.seed)?;
        let bound = totient(m) as f64 / m as f64;
        let threshold = format!("ci_hi >= phi(m)/m = {bound:.4}");
        b.check(&format!("cyclotomic-power-{m}"), e.p_hat, &threshold, e.ci_hi >= bound, show(&e));
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for m in [5u64, 6, 8, 12] {
        let a: IntMatrix<i64> = cyclotomic_action_matrix(m)?;
        for f in small_polys(a.rows()) {
            let fa = a.eval_poly(&f)?;
            let zero_poly = f.iter().all(|&c| c == 0);
            if fa.is_zero() != zero_poly || (!zero_poly && fa.determinant()? == 0) {
                violations.push(format!("m={m}, f={f:?}"));
            }
            checked += 1;
        }
    }
    b.check(
        "cyclotomic-zero-or-invertible",
        checked as f64,
        "f(A) = 0 iff f = 0, otherwise det f(A) != 0",
        violations.is_empty(),
        violations.join("; "),
    );
    Ok(())
}

fn self_commutator_and_sparse(b: &mut Bundle) -> Result<()> {
    let e = b.estimate("wreath(cyclic(2), dihedral-infinite)", "[x1^2, x2^2]", 400, 10_000)?;
    b.check("self-commutator-squares", e.p_hat, "p_hat >= 0.20", e.p_hat >= 0.20, show(&e));

    let mut violated = Vec::new();
    for i in 0..100 {
        let sys = random_sparse_system(b.seed.wrapping_add(i));
        let r = sparse_system_hit_prob(&sys, 20_000, b.seed)?;
        if !r.bound_satisfied {
            violated.push(format!("instance {i}: {} > {:.4}", show(&r.estimate), r.bound));
        }
    }
    b.check("sparse-system-bound", (100 - violated.len()) as f64, "all 100 instances within bound", violated.is_empty(), violated.join("; "));
    Ok(())
}

fn balls(b: &mut Bundle) -> Result<()> {
    let g = Group::parse("product(wreath(cyclic(2), lattice(1)), sym(4))")?;
    let factor = &g.product_parts().expect("product")[0];
    let s = GeneratingSet::switch_move_switch(factor, false)?;
    let law = parse_law("[[x1,x2],[x3,x4]]")?;
    let r = 3;
    let t1 = product_ball_set(&g, &s)?;
    let t2 = product_ball_set(&g, &s.power(factor, 2)?)?;
    let e1 = ball_enumerate(&g, &t1, 2 * r, BALL_BUDGET)?.estimate(&g, &law, 10_000, b.seed)?;
    let e2 = ball_enumerate(&g, &t2, r, BALL_BUDGET)?.estimate(&g, &law, 10_000, b.seed)?;
    b.check(
        "ball-square-increases",
        e2.p_hat - e1.p_hat,
        "estimate with S^2 at radius r above estimate with S at radius 2r",
        e2.above(&e1),
        format!("S: {}; S^2: {}", show(&e1), show(&e2)),
    );
    Ok(())
}
