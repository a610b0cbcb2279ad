use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::geometry::product_ball_set;
use crate::kernel::{GeneratingSet, GroupHandle};
use crate::scalar::Coord;
use crate::walk::WalkConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Estimate,
    Exact,
    Intersect,
    Occupation,
    Ball,
    Verify,
    Reproduce,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Estimate,
        ExperimentKind::Exact,
        ExperimentKind::Intersect,
        ExperimentKind::Occupation,
        ExperimentKind::Ball,
        ExperimentKind::Verify,
        ExperimentKind::Reproduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Exact => "exact",
            ExperimentKind::Intersect => "intersect",
            ExperimentKind::Occupation => "occupation",
            ExperimentKind::Ball => "ball",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Reproduce => "reproduce",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown experiment kind '{s}'")))
    }
}

/// How walk steps are drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorChoice {
    Standard,
    SwitchMoveSwitch,
    /// The 160-atom set with the second lamp at `k e₁`.
    Shifted(u64),
    Rotations,
    /// All products of `r` atoms of the inner set.
    Power(Box<GeneratorChoice>, u32),
    /// `(S × {1}) ∪ ({1} × H)` with `S` from the inner set.
    ProductBall(Box<GeneratorChoice>),
}

impl GeneratorChoice {
    /// Builds the set. `lazy` adds the identity to the standard and
    /// switch-move-switch sets.
    pub fn build<C: Coord>(&self, group: &GroupHandle<C>, lazy: bool) -> Result<GeneratingSet<C>> {
        Ok(match self {
            GeneratorChoice::Standard => GeneratingSet::standard(group, lazy)?,
            GeneratorChoice::SwitchMoveSwitch => GeneratingSet::switch_move_switch(group, lazy)?,
            GeneratorChoice::Shifted(k) => GeneratingSet::shifted_wreath_generators(group, *k)?,
            GeneratorChoice::Rotations => GeneratingSet::rotations(group)?,
            GeneratorChoice::Power(inner, r) => inner.build(group, lazy)?.power(group, *r)?,
            GeneratorChoice::ProductBall(inner) => {
                let factor = group
                    .product_parts()
                    .and_then(|p| p.first())
                    .ok_or_else(|| Error::Argument(format!("{group} is not a product")))?;
                product_ball_set(group, &inner.build(factor, lazy)?)?
            }
        })
    }
}

impl fmt::Display for GeneratorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorChoice::Standard => write!(f, "standard"),
            GeneratorChoice::SwitchMoveSwitch => write!(f, "switch-move-switch"),
            GeneratorChoice::Shifted(k) => write!(f, "shifted({k})"),
            GeneratorChoice::Rotations => write!(f, "rotations"),
            GeneratorChoice::Power(inner, r) => write!(f, "power({inner}, {r})"),
            GeneratorChoice::ProductBall(inner) => write!(f, "product-ball({inner})"),
        }
    }
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

impl FromStr for GeneratorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Argument(format!("unknown generating set '{s}'"));
        match s {
            "standard" => return Ok(GeneratorChoice::Standard),
            "switch-move-switch" => return Ok(GeneratorChoice::SwitchMoveSwitch),
            "rotations" => return Ok(GeneratorChoice::Rotations),
            _ => {}
        }
        if let Some(arg) = call(s, "shifted") {
            return arg.parse().map(GeneratorChoice::Shifted).map_err(|_| bad());
        }
        if let Some(arg) = call(s, "product-ball") {
            return Ok(GeneratorChoice::ProductBall(Box::new(arg.parse()?)));
        }
        if let Some(arg) = call(s, "power") {
            let (inner, r) = arg.rsplit_once(',').ok_or_else(bad)?;
            let r = r.trim().parse().map_err(|_| bad())?;
            return Ok(GeneratorChoice::Power(Box::new(inner.parse()?), r));
        }
        Err(bad())
    }
}

/// One experiment, read from `key = value` lines. Keys:
///
/// ```text
/// kind                 estimate | exact | intersect | occupation | ball | verify | reproduce
/// group                group descriptor
/// law                  law text
/// generators           standard | switch-move-switch | shifted(k) | rotations
///                      | power(<set>, r) | product-ball(<set>)
/// threads              worker threads
/// output.dir           report directory
/// walk.steps           walk length n
/// walk.trials          Monte Carlo trials
/// walk.seed            seed (default 0)
/// walk.lazy            true | false
/// walk.grid            comma-separated step counts (estimate)
/// exact.family         comma-separated group descriptors (exact)
/// intersect.dim        lattice dimension
/// intersect.offsets    comma-separated k, the offsets are k e₁
/// intersect.law2       second law (defaults to law)
/// occupation.radii     comma-separated increasing radii
/// occupation.distinct  count distinct vertices instead of time points
/// ball.radius          ball radius
/// ball.budget          element budget
/// verify.manifest      manifest path (defaults to the shipped one)
/// verify.samples       sampled tuples per model
/// reproduce.section    bundle id
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub group: Option<String>,
    pub law: Option<String>,
    pub generators: GeneratorChoice,
    pub threads: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub walk: WalkConfig,
    pub grid: Vec<u64>,
    pub family: Vec<String>,
    pub intersect_dim: usize,
    pub offsets: Vec<i64>,
    pub law2: Option<String>,
    pub radii: Vec<u32>,
    pub distinct: bool,
    pub ball_radius: u32,
    pub ball_budget: usize,
    pub manifest: Option<PathBuf>,
    pub samples: u64,
    pub section: Option<String>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            group: None,
            law: None,
            generators: GeneratorChoice::Standard,
            threads: None,
            output_dir: None,
            walk: WalkConfig::default(),
            grid: Vec::new(),
            family: Vec::new(),
            intersect_dim: 5,
            offsets: vec![5, 10, 20, 40],
            law2: None,
            radii: (1..=8).collect(),
            distinct: false,
            ball_radius: 4,
            ball_budget: crate::geometry::BALL_BUDGET,
            manifest: None,
            samples: 100_000,
            section: None,
        }
    }

    /// Parses the config text. Later lines override earlier ones; unknown
    /// keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            entries.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let (kind_line, kind) = entries
            .remove("kind")
            .ok_or_else(|| Error::Config { line: 0, message: "missing 'kind'".into() })?;
        let kind = kind.parse().map_err(|e: Error| Error::Config { line: kind_line, message: e.to_string() })?;
        let mut cfg = Self::new(kind);
        for (key, (line, value)) in entries {
            cfg.set(&key, &value).map_err(|e| Error::Config { line, message: e.to_string() })?;
        }
        Ok(cfg)
    }

    /// Sets one key; `kind` cannot be changed.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Argument(format!("bad value '{v}' for {key}")))
        }
        fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
            v.split(',').filter(|x| !x.trim().is_empty()).map(|x| num(key, x.trim())).collect()
        }
        let text = || Some(value.to_string());
        match key {
            "group" => self.group = text(),
            "law" => self.law = text(),
            "generators" => self.generators = value.parse()?,
            "threads" => self.threads = Some(num(key, value)?),
            "output.dir" => self.output_dir = Some(PathBuf::from(value)),
            "walk.steps" => self.walk.steps = num(key, value)?,
            "walk.trials" => self.walk.trials = num(key, value)?,
            "walk.seed" => self.walk.seed = num(key, value)?,
            "walk.lazy" => self.walk.lazy = num(key, value)?,
            "walk.grid" => self.grid = list(key, value)?,
            "exact.family" => self.family = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "intersect.dim" => self.intersect_dim = num(key, value)?,
            "intersect.offsets" => self.offsets = list(key, value)?,
            "intersect.law2" => self.law2 = text(),
            "occupation.radii" => self.radii = list(key, value)?,
            "occupation.distinct" => self.distinct = num(key, value)?,
            "ball.radius" => self.ball_radius = num(key, value)?,
            "ball.budget" => self.ball_budget = num(key, value)?,
            "verify.manifest" => self.manifest = Some(PathBuf::from(value)),
            "verify.samples" => self.samples = num(key, value)?,
            "reproduce.section" => self.section = text(),
            _ => return Err(Error::Argument(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Canonical text; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let join = |xs: Vec<String>| xs.join(",");
        let mut lines = vec![format!("kind = {}", self.kind)];
        let mut put = |k: &str, v: String| lines.push(format!("{k} = {v}"));
        if let Some(g) = &self.group {
            put("group", g.clone());
        }
        if let Some(l) = &self.law {
            put("law", l.clone());
        }
        put("generators", self.generators.to_string());
        if let Some(t) = self.threads {
            put("threads", t.to_string());
        }
        if let Some(d) = &self.output_dir {
            put("output.dir", d.display().to_string());
        }
        put("walk.steps", self.walk.steps.to_string());
        put("walk.trials", self.walk.trials.to_string());
        put("walk.seed", self.walk.seed.to_string());
        put("walk.lazy", self.walk.lazy.to_string());
        if !self.grid.is_empty() {
            put("walk.grid", join(self.grid.iter().map(u64::to_string).collect()));
        }
        if !self.family.is_empty() {
            put("exact.family", self.family.join(", "));
        }
        put("intersect.dim", self.intersect_dim.to_string());
        put("intersect.offsets", join(self.offsets.iter().map(i64::to_string).collect()));
        if let Some(l) = &self.law2 {
            put("intersect.law2", l.clone());
        }
        put("occupation.radii", join(self.radii.iter().map(u32::to_string).collect()));
        put("occupation.distinct", self.distinct.to_string());
        put("ball.radius", self.ball_radius.to_string());
        put("ball.budget", self.ball_budget.to_string());
        if let Some(m) = &self.manifest {
            put("verify.manifest", m.display().to_string());
        }
        put("verify.samples", self.samples.to_string());
        if let Some(s) = &self.section {
            put("reproduce.section", s.clone());
        }
        lines.join("\n") + "\n"
    }

    pub fn seed(&self) -> u64 {
        self.walk.seed
    }

    pub fn require_group(&self) -> Result<&str> {
        self.group.as_deref().ok_or_else(|| Error::Argument(format!("{} needs 'group'", self.kind)))
    }

    pub fn require_law(&self) -> Result<&str> {
        self.law.as_deref().ok_or_else(|| Error::Argument(format!("{} needs 'law'", self.kind)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_echo_round_trip() {
        let text = "kind = estimate\ngroup = dihedral-infinite  # D∞\nlaw = x1^2\nwalk.steps = 400\nwalk.trials=10000\nwalk.seed = 7\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Estimate);
        assert_eq!(cfg.walk.seed, 7);
        assert_eq!(cfg.group.as_deref(), Some("dihedral-infinite"));
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ExperimentConfig::parse("kind = ball\n\nball.radius = many\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }));
        let e = ExperimentConfig::parse("kind = ball\nwalk.colour = red\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        assert!(ExperimentConfig::parse("group = z\n").is_err());
        assert!(ExperimentConfig::parse("kind = guess\n").is_err());
    }

    #[test]
    fn generator_choices_round_trip() {
        for s in ["standard", "shifted(50)", "power(switch-move-switch, 2)", "product-ball(power(switch-move-switch, 2))", "rotations"] {
            let g: GeneratorChoice = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("shifted(x)".parse::<GeneratorChoice>().is_err());
        assert!("power(standard)".parse::<GeneratorChoice>().is_err());
    }
}
