use grouplaw::harness::{reproduce, run_and_write, run_experiment, ExperimentConfig, ExperimentKind, SECTIONS};
use grouplaw::Error;

fn config(kind: ExperimentKind, pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn sample_configs() -> Vec<ExperimentConfig> {
    vec![
        config(ExperimentKind::Estimate, &[("group", "heisenberg(2)"), ("law", "[x1,x2]"), ("walk.trials", "500"), ("walk.grid", "20,40")]),
        config(ExperimentKind::Exact, &[("law", "x1^2"), ("exact.family", "dihedral(3), dihedral(4), sym(3)")]),
        config(ExperimentKind::Intersect, &[("law", "[x1,x2]"), ("walk.steps", "40"), ("walk.trials", "300"), ("intersect.offsets", "2,4")]),
        config(ExperimentKind::Occupation, &[("group", "lattice(3)"), ("law", "[x1,x2]"), ("walk.steps", "30"), ("walk.trials", "200"), ("occupation.radii", "1,2,3")]),
        config(ExperimentKind::Ball, &[("group", "wreath(cyclic(2), lattice(1))"), ("generators", "switch-move-switch"), ("ball.radius", "3"), ("law", "[x1,x2]"), ("walk.trials", "500")]),
        config(ExperimentKind::Verify, &[("verify.samples", "1000")]),
    ]
}

#[test]
fn echoed_configs_reproduce_reports() {
    for cfg in sample_configs() {
        let first = run_experiment(&cfg).unwrap();
        let echoed = ExperimentConfig::parse(first.provenance["config"].as_str().unwrap()).unwrap();
        assert_eq!(echoed, cfg);
        let second = run_experiment(&echoed).unwrap();
        assert_eq!(second.results_jsonl(), first.results_jsonl(), "{}", cfg.kind);
        assert_eq!(second.summary_csv().unwrap(), first.summary_csv().unwrap());
        assert_eq!(second.provenance_json(), first.provenance_json());
    }
}

#[test]
fn written_reports_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let mut cfg = sample_configs().remove(0);
        cfg.set("threads", threads).unwrap();
        cfg.output_dir = Some(out.clone());
        run_and_write(&cfg).unwrap();
        outputs.push(std::fs::read_to_string(out.join("results.jsonl")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn unknown_sections_and_keys_are_rejected() {
    assert!(matches!(reproduce("4.2", 0), Err(Error::Argument(_))));
    assert!(SECTIONS.contains(&"9.1"));
    assert!(matches!(ExperimentConfig::parse("kind = estimate\nwalk.stpes = 3\n"), Err(Error::Config { line: 2, .. })));
    let missing_law = config(ExperimentKind::Estimate, &[("group", "lattice(2)")]);
    assert!(run_experiment(&missing_law).is_err());
}
