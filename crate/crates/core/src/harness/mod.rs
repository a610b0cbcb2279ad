//! Experiment configuration, dispatch and report files.

mod config;
mod report;
mod reproduce;

use std::path::Path;

use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind, GeneratorChoice};
pub use report::{write_atomic, Report, PROVENANCE_FILE, RESULTS_FILE, SUMMARY_FILE};
pub use reproduce::{reproduce, Check, SECTIONS};

use crate::exact::quotient_family_infimum;
use crate::geometry::{ball_enumerate, loop_intersection_prob, occupation_profile};
use crate::identity::{parse_manifest, shipped_claims, shipped_models, verify_manifest, IdentityClaim};
use crate::kernel::GroupDescriptor;
use crate::law::{parse_law, LawExpr};
use crate::walk::{estimate_curve, Estimate};
use crate::{Error, GeneratingSet, Group, Result};

fn estimate_record(e: &Estimate) -> Value {
    json!({
        "successes": e.successes,
        "trials": e.trials,
        "p_hat": e.p_hat,
        "ci_lo": e.ci_lo,
        "ci_hi": e.ci_hi,
        "seed": e.seed,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn load_claims(cfg: &ExperimentConfig) -> Result<Vec<IdentityClaim>> {
    match &cfg.manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_manifest(&text)
        }
        None => Ok(shipped_claims()),
    }
}

fn group_and_set(cfg: &ExperimentConfig) -> Result<(Group, GeneratingSet)> {
    let g = Group::parse(cfg.require_group()?)?;
    let s = cfg.generators.build(&g, cfg.walk.lazy)?;
    Ok((g, s))
}

fn offsets(cfg: &ExperimentConfig) -> Result<Vec<Vec<i64>>> {
    if cfg.intersect_dim == 0 {
        return Err(Error::Argument("intersect.dim must be positive".into()));
    }
    Ok(cfg
        .offsets
        .iter()
        .map(|&k| {
            let mut v = vec![0; cfg.intersect_dim];
            v[0] = k;
            v
        })
        .collect())
}

/// Checks a config without running it: texts parse, generating sets build
/// and parameters are in range.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.walk.trials == 0 {
        return Err(Error::Argument("walk.trials must be positive".into()));
    }
    if cfg.threads == Some(0) {
        return Err(Error::Argument("threads must be positive".into()));
    }
    match cfg.kind {
        ExperimentKind::Estimate => {
            group_and_set(cfg)?;
            parse_law(cfg.require_law()?)?;
            if cfg.grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Argument("walk.grid must be strictly increasing".into()));
            }
        }
        ExperimentKind::Exact => {
            parse_law(cfg.require_law()?)?;
            if cfg.family.is_empty() {
                cfg.require_group()?.parse::<GroupDescriptor>()?;
            }
            for g in &cfg.family {
                g.parse::<GroupDescriptor>()?;
            }
        }
        ExperimentKind::Intersect => {
            parse_law(cfg.require_law()?)?;
            if let Some(l) = &cfg.law2 {
                parse_law(l)?;
            }
            offsets(cfg)?;
        }
        ExperimentKind::Occupation => {
            group_and_set(cfg)?;
            parse_law(cfg.require_law()?)?;
            if cfg.radii.is_empty() || cfg.radii.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Argument("occupation.radii must be nonempty and strictly increasing".into()));
            }
        }
        ExperimentKind::Ball => {
            group_and_set(cfg)?;
            if let Some(l) = &cfg.law {
                parse_law(l)?;
            }
        }
        ExperimentKind::Verify => {
            load_claims(cfg)?;
        }
        ExperimentKind::Reproduce => {
            let s = cfg.section.as_deref().ok_or_else(|| Error::Argument("reproduce needs 'reproduce.section'".into()))?;
            if !SECTIONS.contains(&s) {
                return Err(Error::Argument(format!("unknown section '{s}', expected one of {}", SECTIONS.join(", "))));
            }
        }
    }
    Ok(())
}

/// Runs one experiment in the current thread pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    validate(cfg)?;
    let seed = cfg.seed();
    let mut report = match cfg.kind {
        ExperimentKind::Estimate => {
            let (g, s) = group_and_set(cfg)?;
            let law = parse_law(cfg.require_law()?)?;
            let grid = if cfg.grid.is_empty() { vec![cfg.walk.steps] } else { cfg.grid.clone() };
            let mut r = Report::new(&["group", "law", "steps", "trials", "p_hat", "ci_lo", "ci_hi"]);
            for p in estimate_curve(&g, &s, &law, &grid, cfg.walk.trials, seed)? {
                let base = json!({
                    "group": g.name(),
                    "law": law.to_string(),
                    "generators": cfg.generators.to_string(),
                    "steps": p.steps,
                    "running_max": p.running_max,
                    "running_min": p.running_min,
                });
                r.push(merge(base, estimate_record(&p.estimate)))?;
            }
            r
        }
        ExperimentKind::Exact => {
            let law = parse_law(cfg.require_law()?)?;
            let names = if cfg.family.is_empty() { vec![cfg.require_group()?.to_string()] } else { cfg.family.clone() };
            let family = names.iter().map(|n| n.parse::<GroupDescriptor>()).collect::<Result<Vec<_>, _>>()?;
            let mut r = Report::new(&["group", "order", "probability", "value", "running_inf"]);
            for p in quotient_family_infimum(family, &law, usize::MAX)? {
                r.push(json!({
                    "group": p.group,
                    "law": law.to_string(),
                    "order": p.order,
                    "probability": p.probability.to_string(),
                    "value": p.probability.to_f64(),
                    "running_inf": p.running_inf.to_string(),
                }))?;
            }
            r
        }
        ExperimentKind::Intersect => {
            let w1 = parse_law(cfg.require_law()?)?;
            let w2 = match &cfg.law2 {
                Some(l) => parse_law(l)?,
                None => w1.clone(),
            };
            let est = loop_intersection_prob(&w1, &w2, cfg.intersect_dim, cfg.walk.steps, &offsets(cfg)?, cfg.walk.trials, seed)?;
            let mut r = Report::new(&["offset", "n", "p_hat", "ci_lo", "ci_hi"]);
            for (k, e) in cfg.offsets.iter().zip(&est) {
                let base = json!({"offset": k, "n": cfg.walk.steps, "dim": cfg.intersect_dim, "law": w1.to_string(), "law2": w2.to_string()});
                r.push(merge(base, estimate_record(e)))?;
            }
            r
        }
        ExperimentKind::Occupation => {
            let (g, s) = group_and_set(cfg)?;
            let law = parse_law(cfg.require_law()?)?;
            let p = occupation_profile(&g, &s, &law, cfg.walk.steps, &cfg.radii, cfg.walk.trials, seed, cfg.distinct)?;
            let mut r = Report::new(&["r", "mean", "stderr", "slope"]);
            for i in 0..p.radii.len() {
                r.push(json!({"r": p.radii[i], "mean": p.mean_counts[i], "stderr": p.stderr[i], "trials": p.trials, "distinct": p.distinct}))?;
            }
            r.push(json!({"slope": p.slope()}))?;
            r
        }
        ExperimentKind::Ball => {
            let (g, s) = group_and_set(cfg)?;
            let ball = ball_enumerate(&g, &s, cfg.ball_radius, cfg.ball_budget)?;
            let mut r = Report::new(&["r", "size", "sphere", "law", "p_hat", "ci_lo", "ci_hi"]);
            let growth = ball.growth();
            for (i, &size) in growth.iter().enumerate() {
                let sphere = size - if i == 0 { 0 } else { growth[i - 1] };
                r.push(json!({"r": i, "size": size, "sphere": sphere}))?;
            }
            if let Some(l) = &cfg.law {
                let law: LawExpr = parse_law(l)?;
                let e = ball.estimate(&g, &law, cfg.walk.trials, seed)?;
                r.push(merge(json!({"law": law.to_string(), "radius": cfg.ball_radius}), estimate_record(&e)))?;
            }
            r
        }
        ExperimentKind::Verify => {
            let claims = load_claims(cfg)?;
            let results = verify_manifest(&claims, &shipped_models::<i64>()?, cfg.samples, seed)?;
            let mut r = Report::new(&["name", "kind", "model", "mode", "verified", "counterexample"]);
            r.passed = Some(results.iter().all(|c| c.verified));
            for c in results {
                r.push(c)?;
            }
            r
        }
        ExperimentKind::Reproduce => {
            let section = cfg.section.as_deref().expect("validated");
            let checks = reproduce(section, seed)?;
            let mut r = Report::new(&["section", "check", "value", "threshold", "passed"]);
            r.passed = Some(checks.iter().all(|c| c.passed));
            for c in checks {
                r.push(c)?;
            }
            r
        }
    };
    report.provenance.insert("kind".into(), json!(cfg.kind.name()));
    report.provenance.insert("seed".into(), json!(seed));
    report.provenance.insert("config".into(), json!(cfg.to_text()));
    report.provenance.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    Ok(report)
}

/// Runs `cfg` on a pool of `cfg.threads` workers (or the global pool) and
/// writes the report into `cfg.output_dir`, if set.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<Report> {
    let report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?
            .install(|| run_experiment(cfg))?,
        None => run_experiment(cfg)?,
    };
    if let Some(dir) = &cfg.output_dir {
        report.write(Path::new(dir))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn exact_report() {
        let r = run_experiment(&cfg("kind = exact\ngroup = sym(3)\nlaw = [x1,x2]\n")).unwrap();
        assert_eq!(r.records[0]["probability"], "1/2");
        assert!(r.summary_csv().unwrap().contains("sym(3),6,1/2,0.5,1/2"));
    }

    #[test]
    fn exact_family_report() {
        let r = run_experiment(&cfg("kind = exact\nlaw = x1^2\nexact.family = dihedral(3), dihedral(4), dihedral(5)\n")).unwrap();
        let inf: Vec<_> = r.records.iter().map(|x| x["running_inf"].as_str().unwrap().to_string()).collect();
        assert_eq!(inf, ["2/3", "2/3", "3/5"]);
    }

    #[test]
    fn estimate_report_is_reproducible() {
        let text = "kind = estimate\ngroup = dihedral-infinite\nlaw = x1^2\nwalk.steps = 50\nwalk.trials = 500\nwalk.seed = 7\n";
        let a = run_experiment(&cfg(text)).unwrap();
        let echoed = cfg(a.provenance["config"].as_str().unwrap());
        let b = run_experiment(&echoed).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.results_jsonl(), b.results_jsonl());
    }

    #[test]
    fn ball_and_occupation_reports() {
        let r = run_experiment(&cfg("kind = ball\ngroup = lattice(1)\nball.radius = 3\nwalk.lazy = false\n")).unwrap();
        assert_eq!(r.records.last().unwrap()["size"], 7);
        let e = run_experiment(&cfg("kind = ball\ngroup = lattice(2)\nball.radius = 3\nball.budget = 10\n"));
        assert!(matches!(e, Err(Error::Budget { .. })));
        let r = run_experiment(&cfg("kind = occupation\ngroup = lattice(3)\nlaw = [x1,x2]\nwalk.steps = 20\nwalk.trials = 50\noccupation.radii = 1,2,4\n")).unwrap();
        assert_eq!(r.records.len(), 4);
    }

    #[test]
    fn validation_errors() {
        assert!(validate(&cfg("kind = estimate\nlaw = x1\n")).is_err());
        let e = validate(&cfg("kind = estimate\ngroup = z(1)\nlaw = x1 x3\n")).unwrap_err();
        assert!(matches!(e, Error::Law(_)));
        assert!(validate(&cfg("kind = reproduce\nreproduce.section = 4\n")).is_err());
        assert!(validate(&cfg("kind = reproduce\nreproduce.section = 8\n")).is_ok());
        assert!(validate(&cfg("kind = occupation\ngroup = z(1)\nlaw = [x1,x2]\noccupation.radii = 2,1\n")).is_err());
    }
}
