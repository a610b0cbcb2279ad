use grouplaw::identity::{
    conditional_check, perturb, shipped_claims, shipped_models, verify_free_identity, verify_manifest, ClaimKind,
    SearchMode,
};
use grouplaw::walk::stream;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn perturbed_identities_fail(seed in any::<u64>()) {
        let claims: Vec<_> = shipped_claims().into_iter().filter(|c| c.kind == ClaimKind::Unconditional).collect();
        let mut rng = stream(seed, 0, 0, 0);
        let original = &claims[(seed % claims.len() as u64) as usize];
        let p = perturb(original, &mut rng);
        prop_assert!(!verify_free_identity(&p).unwrap(), "{} survived as {}", original.name, p);
    }
}

#[test]
fn cube_consequences_hold_on_every_model() {
    let names = ["commuting-conjugate-cube", "commuting-conjugate-engel", "commuting-conjugate-inverse"];
    let claims: Vec<_> = shipped_claims().into_iter().filter(|c| names.contains(&c.name.as_str())).collect();
    assert_eq!(claims.len(), 3);
    for t in shipped_models::<i64>().unwrap() {
        for c in &claims {
            assert!(conditional_check(c, &t, SearchMode::Exhaustive).unwrap().is_none(), "{} on {}", c.name, t.name());
        }
    }
}

#[test]
fn every_manifest_claim_is_verified() {
    let results = verify_manifest(&shipped_claims(), &shipped_models::<i64>().unwrap(), 20_000, 1).unwrap();
    assert!(results.iter().any(|r| r.mode == "reduction"));
    for r in &results {
        assert!(r.verified, "{} on {}: {:?}", r.name, r.model, r.counterexample);
    }
}

#[test]
fn hypotheses_are_needed() {
    let models = shipped_models::<i64>().unwrap();
    let cube = shipped_claims().into_iter().find(|c| c.name == "commuting-conjugate-cube").unwrap();
    for i in 0..cube.hypotheses.len() {
        let weakened = cube.without_hypothesis(i);
        let exposed = models.iter().any(|t| conditional_check(&weakened, t, SearchMode::Exhaustive).unwrap().is_some());
        assert!(exposed, "dropping hypothesis {i} of {}", cube.name);
    }
}
