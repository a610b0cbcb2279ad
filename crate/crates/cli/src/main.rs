use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use grouplaw::harness::{run_and_write, validate, ExperimentConfig, ExperimentKind, Report};

/// Probabilities of group laws on explicit groups.
#[derive(Parser, Debug)]
#[command(name = "grouplaw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate of a law under a random-walk measure.
    Estimate(Common),
    /// Exact probability of a law on finite groups.
    Exact(Common),
    /// Loop-intersection probabilities of word paths in a lattice.
    Intersect(Common),
    /// Occupation profile of a word path.
    Occupation(Common),
    /// Ball enumeration and uniform-on-ball estimates.
    Ball(Common),
    /// Check an identity manifest.
    Verify(Common),
    /// Run a pre-registered experiment bundle.
    Reproduce {
        /// Bundle id; overrides `reproduce.section`.
        section: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `walk.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides GROUPLAW_THREADS and the config.
    #[arg(long)]
    threads: Option<usize>,
    /// Report directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` settings applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Validate the config and print it without running.
    #[arg(long)]
    dry_run: bool,
}

/// Flag, then environment, then config; `None` means all logical cores.
fn resolve_threads(flag: Option<usize>, env: Option<&str>, config: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(v) = env.map(str::trim).filter(|v| !v.is_empty()) {
        let n: usize = v.parse().with_context(|| format!("GROUPLAW_THREADS={v} is not a number"))?;
        return Ok(Some(n));
    }
    Ok(config)
}

fn build_config(kind: ExperimentKind, common: &Common, section: Option<String>) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?;
            if cfg.kind != kind {
                bail!("{} describes a '{}' experiment, not '{}'", path.display(), cfg.kind, kind);
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    for s in &common.sets {
        let (k, v) = s.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got '{s}'"))?;
        if k.trim() == "kind" {
            bail!("the experiment kind is given by the subcommand");
        }
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = common.seed {
        cfg.walk.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    if section.is_some() {
        cfg.section = section;
    }
    let env = std::env::var("GROUPLAW_THREADS").ok();
    cfg.threads = resolve_threads(common.threads, env.as_deref(), cfg.threads)?;
    Ok(cfg)
}

fn print_report(report: &Report, kind: ExperimentKind) -> anyhow::Result<()> {
    if kind == ExperimentKind::Reproduce {
        for r in &report.records {
            let ok = r["passed"].as_bool().unwrap_or(false);
            println!(
                "{} [{}] {}: {} ({}) {}",
                if ok { "PASS" } else { "FAIL" },
                r["section"].as_str().unwrap_or(""),
                r["check"].as_str().unwrap_or(""),
                r["value"],
                r["threshold"].as_str().unwrap_or(""),
                r["detail"].as_str().unwrap_or(""),
            );
        }
    } else {
        print!("{}", report.summary_csv()?);
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (kind, common, section) = match cli.command {
        Command::Estimate(c) => (ExperimentKind::Estimate, c, None),
        Command::Exact(c) => (ExperimentKind::Exact, c, None),
        Command::Intersect(c) => (ExperimentKind::Intersect, c, None),
        Command::Occupation(c) => (ExperimentKind::Occupation, c, None),
        Command::Ball(c) => (ExperimentKind::Ball, c, None),
        Command::Verify(c) => (ExperimentKind::Verify, c, None),
        Command::Reproduce { section, common } => (ExperimentKind::Reproduce, common, section),
    };
    let cfg = build_config(kind, &common, section)?;
    validate(&cfg)?;
    if common.dry_run {
        print!("{}", cfg.to_text());
        eprintln!("config ok");
        return Ok(());
    }
    let report = run_and_write(&cfg)?;
    print_report(&report, kind)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_precedence() {
        assert_eq!(resolve_threads(Some(2), Some("3"), Some(4)).unwrap(), Some(2));
        assert_eq!(resolve_threads(None, Some("3"), Some(4)).unwrap(), Some(3));
        assert_eq!(resolve_threads(None, None, Some(4)).unwrap(), Some(4));
        assert_eq!(resolve_threads(None, Some(" "), None).unwrap(), None);
        assert!(resolve_threads(None, Some("many"), None).is_err());
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
