//! Group identities: unconditional ones are decided by free reduction,
//! conditional ones are searched for counterexamples in finite models.
//!
//! Manifest format, one claim per line (`#` starts a comment):
//!
//! ```text
//! name : unconditional : lhs = rhs
//! name : conditional   : lhs = rhs | hyp; hyp; ...
//! ```
//!
//! Sides and hypotheses use the law grammar; `1` stands for the identity
//! and a hypothesis without `=` means `hyp = 1`. The hypothesis `good(k)`
//! expands to "every simple product of `x1..xk` cubes to the identity".

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{count_tuples_first, FiniteGroupTable, Program, TUPLE_BUDGET};
use crate::law::{parse_expr, simple_products, LawError, LawExpr};
use crate::scalar::Coord;
use crate::walk::stream;
use crate::{Error, Result};

/// The manifest shipped with the crate.
pub const MANIFEST: &str = include_str!("identities.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClaimKind {
    Unconditional,
    Conditional,
}

/// `lhs = rhs`, possibly under hypotheses `h = 1`. `None` is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityClaim {
    pub name: String,
    pub kind: ClaimKind,
    pub lhs: Option<LawExpr>,
    pub rhs: Option<LawExpr>,
    pub hypotheses: Vec<LawExpr>,
}

impl IdentityClaim {
    pub fn unconditional(name: &str, lhs: LawExpr, rhs: Option<LawExpr>) -> Self {
        IdentityClaim { name: name.into(), kind: ClaimKind::Unconditional, lhs: Some(lhs), rhs, hypotheses: Vec::new() }
    }

    pub fn conditional(name: &str, lhs: LawExpr, rhs: Option<LawExpr>, hypotheses: Vec<LawExpr>) -> Self {
        IdentityClaim { name: name.into(), kind: ClaimKind::Conditional, lhs: Some(lhs), rhs, hypotheses }
    }

    /// `lhs · rhs⁻¹`, which must be the identity.
    pub fn relator(&self) -> Option<LawExpr> {
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => Some(l.clone().mul(r.clone().inv())),
            (Some(l), None) => Some(l.clone()),
            (None, Some(r)) => Some(r.clone().inv()),
            (None, None) => None,
        }
    }

    /// Number of letters used anywhere in the claim.
    pub fn num_vars(&self) -> u32 {
        self.hypotheses
            .iter()
            .chain(self.lhs.iter())
            .chain(self.rhs.iter())
            .map(LawExpr::num_vars)
            .max()
            .unwrap_or(0)
    }

    pub fn without_hypothesis(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.hypotheses.remove(i);
        c
    }
}

fn side(e: &Option<LawExpr>) -> String {
    e.as_ref().map_or_else(|| "1".to_string(), LawExpr::to_string)
}

impl fmt::Display for IdentityClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", side(&self.lhs), side(&self.rhs))?;
        if !self.hypotheses.is_empty() {
            let hyps: Vec<String> = self.hypotheses.iter().map(ToString::to_string).collect();
            write!(f, " given {}", hyps.join(", "))?;
        }
        Ok(())
    }
}

fn parse_side(text: &str, offset: usize) -> Result<Option<LawExpr>, LawError> {
    if text.trim() == "1" {
        return Ok(None);
    }
    parse_expr(text).map(Some).map_err(|e| match e {
        LawError::Syntax { position, message } => LawError::Syntax { position: position + offset, message },
        other => other,
    })
}

fn parse_equation(text: &str, offset: usize) -> Result<(Option<LawExpr>, Option<LawExpr>), LawError> {
    match text.split_once('=') {
        Some((l, r)) => Ok((parse_side(l, offset)?, parse_side(r, offset + l.len() + 1)?)),
        None => Ok((parse_side(text, offset)?, None)),
    }
}

/// Parses a manifest. Errors carry the 1-based line number.
pub fn parse_manifest(text: &str) -> Result<Vec<IdentityClaim>> {
    let mut claims = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let cfg = |message: String| Error::Config { line: no + 1, message };
        let mut parts = line.splitn(3, ':');
        let (name, kind, body) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(k), Some(b)) => (n.trim(), k.trim(), b),
            _ => return Err(cfg("expected 'name : kind : equation'".into())),
        };
        let kind = match kind {
            "unconditional" => ClaimKind::Unconditional,
            "conditional" => ClaimKind::Conditional,
            other => return Err(cfg(format!("unknown claim kind '{other}'"))),
        };
        let body_offset = line.len() - body.len();
        let (eq, hyps) = match body.split_once('|') {
            Some((e, h)) => (e, Some(h)),
            None => (body, None),
        };
        let (lhs, rhs) = parse_equation(eq, body_offset).map_err(|e| cfg(e.to_string()))?;
        if lhs.is_none() && rhs.is_none() {
            return Err(cfg("claim '1 = 1' is empty".into()));
        }
        let mut hypotheses = Vec::new();
        if let Some(h) = hyps {
            if kind == ClaimKind::Unconditional {
                return Err(cfg("unconditional claims take no hypotheses".into()));
            }
            for item in h.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                if let Some(k) = item.strip_prefix("good(").and_then(|r| r.strip_suffix(')')) {
                    let k: u32 = k.trim().parse().map_err(|_| cfg(format!("bad letter count in '{item}'")))?;
                    hypotheses.extend(good_hypotheses(k));
                    continue;
                }
                let (l, r) = parse_equation(item, 0).map_err(|e| cfg(format!("in hypothesis '{item}': {e}")))?;
                let claim = IdentityClaim { name: String::new(), kind: ClaimKind::Conditional, lhs: l, rhs: r, hypotheses: vec![] };
                hypotheses.push(claim.relator().ok_or_else(|| cfg("hypothesis '1 = 1' is empty".into()))?);
            }
        }
        claims.push(IdentityClaim { name: name.to_string(), kind, lhs, rhs, hypotheses });
    }
    Ok(claims)
}

/// `p³ = 1` for every simple product `p` of `x1..xk`.
pub fn good_hypotheses(k: u32) -> Vec<LawExpr> {
    simple_products(k).into_iter().map(|p| p.pow(3)).collect()
}

pub fn shipped_claims() -> Vec<IdentityClaim> {
    parse_manifest(MANIFEST).expect("shipped manifest parses")
}

/// Descriptors of the finite models conditional claims are checked on.
pub const SHIPPED_MODELS: [&str; 5] = ["extraspecial3", "sym(3)", "sym(4)", "dihedral(8)", "quaternion"];

/// Conditional claims are searched exhaustively when the tuple count is
/// at most this or the sample count, whichever is larger.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

pub fn shipped_models<C: Coord>() -> Result<Vec<FiniteGroupTable<C>>> {
    SHIPPED_MODELS.iter().map(|m| FiniteGroupTable::parse(m)).collect()
}

/// Decides an unconditional claim: it holds in every group exactly when
/// `lhs · rhs⁻¹` freely reduces to the empty word.
pub fn verify_free_identity(claim: &IdentityClaim) -> Result<bool> {
    if claim.kind != ClaimKind::Unconditional {
        return Err(Error::Argument(format!("claim '{}' is conditional", claim.name)));
    }
    Ok(claim.relator().is_none_or(|r| r.word().is_empty()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

/// An assignment satisfying all hypotheses but not the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample<C: Coord> {
    pub assignment: Vec<crate::kernel::GroupElement<C>>,
}

impl<C: Coord> fmt::Display for Counterexample<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{} = {x}", i + 1)?;
        }
        Ok(())
    }
}

/// Searches `table` for a counterexample to `claim`. Returns the first one
/// in enumeration (or trial) order.
pub fn conditional_check<C: Coord>(
    claim: &IdentityClaim,
    table: &FiniteGroupTable<C>,
    mode: SearchMode,
) -> Result<Option<Counterexample<C>>> {
    let relator = claim
        .relator()
        .ok_or_else(|| Error::Argument(format!("claim '{}' has no conclusion", claim.name)))?;
    let d = claim.num_vars() as usize;
    let mut exprs = claim.hypotheses.clone();
    exprs.push(relator);
    let program = Program::compile(&exprs);
    let last = exprs.len() - 1;
    let fails = |xs: &[u32], slots: &mut Vec<u32>| {
        let mut ev = program.evaluator(table, xs, slots);
        (0..last).all(|h| ev.is_identity(h)) && !ev.is_identity(last)
    };
    let found = match mode {
        SearchMode::Exhaustive => {
            let n = table.order() as u128;
            let needed = n.checked_pow(d as u32).unwrap_or(u128::MAX);
            if needed > TUPLE_BUDGET {
                return Err(Error::Budget {
                    what: format!("exhaustive search over {d}-tuples of {}", table.name()),
                    needed,
                    budget: TUPLE_BUDGET,
                });
            }
            count_tuples_first(table, d, fails)
        }
        SearchMode::Sampled { trials, seed } => {
            let n = table.order() as u32;
            (0..trials).into_par_iter().find_map_first(|t| {
                let mut rng = stream(seed, 0, t, 0);
                let xs: Vec<u32> = (0..d).map(|_| rng.random_range(0..n)).collect();
                let mut slots = Vec::new();
                fails(&xs, &mut slots).then_some(xs)
            })
        }
    };
    Ok(found.map(|xs| Counterexample { assignment: xs.iter().map(|&i| table.element(i).clone()).collect() }))
}

/// Random single-site mutations of a claim: a letter renamed, a
/// subexpression inverted, an exponent shifted, or the operands of a
/// product, commutator or conjugate swapped.
pub fn perturb<R: Rng>(claim: &IdentityClaim, rng: &mut R) -> IdentityClaim {
    let d = claim.num_vars().max(2);
    let mut out = claim.clone();
    out.name = format!("{}~perturbed", claim.name);
    let target = match (&mut out.lhs, &mut out.rhs) {
        (Some(l), Some(r)) => {
            if rng.random_bool(0.5) {
                l
            } else {
                r
            }
        }
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => return out,
    };
    let nodes = count_nodes(target);
    let pick = rng.random_range(0..nodes);
    let choice = rng.random_range(0..3u8);
    let shift = rng.random_range(1..d);
    mutate(target, &mut { pick }, choice, shift, d);
    out
}

fn count_nodes(e: &LawExpr) -> usize {
    1 + match e {
        LawExpr::Var(_) => 0,
        LawExpr::Inv(a) | LawExpr::Pow(a, _) => count_nodes(a),
        LawExpr::Mul(a, b) | LawExpr::Comm(a, b) | LawExpr::Conj(a, b) => count_nodes(a) + count_nodes(b),
    }
}

fn mutate(e: &mut LawExpr, pick: &mut usize, choice: u8, shift: u32, d: u32) -> bool {
    if *pick == 0 {
        let old = std::mem::replace(e, LawExpr::Var(1));
        *e = match (old, choice) {
            (LawExpr::Var(i), 0 | 1) => LawExpr::Var((i - 1 + shift) % d + 1),
            (LawExpr::Pow(a, n), 0) => LawExpr::Pow(a, n + 1),
            (LawExpr::Mul(a, b), 0) => LawExpr::Mul(b, a),
            (LawExpr::Comm(a, b), 0) => LawExpr::Comm(b, a),
            (LawExpr::Conj(a, b), 0) => LawExpr::Conj(b, a),
            (LawExpr::Inv(a), 0) => *a,
            (old, _) => LawExpr::Inv(Box::new(old)),
        };
        return true;
    }
    *pick -= 1;
    match e {
        LawExpr::Var(_) => false,
        LawExpr::Inv(a) | LawExpr::Pow(a, _) => mutate(a, pick, choice, shift, d),
        LawExpr::Mul(a, b) | LawExpr::Comm(a, b) | LawExpr::Conj(a, b) => {
            mutate(a, pick, choice, shift, d) || mutate(b, pick, choice, shift, d)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub name: String,
    pub kind: ClaimKind,
    pub model: String,
    pub mode: String,
    pub verified: bool,
    pub counterexample: Option<String>,
}

/// Checks every claim: unconditional ones by free reduction, conditional
/// ones on each model (exhaustively up to [`EXHAUSTIVE_LIMIT`] tuples,
/// otherwise by sampling).
pub fn verify_manifest<C: Coord>(
    claims: &[IdentityClaim],
    models: &[FiniteGroupTable<C>],
    samples: u64,
    seed: u64,
) -> Result<Vec<ClaimResult>> {
    let mut out = Vec::new();
    for c in claims {
        match c.kind {
            ClaimKind::Unconditional => out.push(ClaimResult {
                name: c.name.clone(),
                kind: c.kind.clone(),
                model: "free group".into(),
                mode: "reduction".into(),
                verified: verify_free_identity(c)?,
                counterexample: None,
            }),
            ClaimKind::Conditional => {
                for t in models {
                    let tuples = (t.order() as u128).checked_pow(c.num_vars()).unwrap_or(u128::MAX);
                    let mode = if tuples <= EXHAUSTIVE_LIMIT.max(samples as u128) {
                        SearchMode::Exhaustive
                    } else {
                        SearchMode::Sampled { trials: samples, seed }
                    };
                    let cx = conditional_check(c, t, mode)?;
                    out.push(ClaimResult {
                        name: c.name.clone(),
                        kind: c.kind.clone(),
                        model: t.name().to_string(),
                        mode: match mode {
                            SearchMode::Exhaustive => "exhaustive".into(),
                            SearchMode::Sampled { trials, .. } => format!("sampled({trials})"),
                        },
                        verified: cx.is_none(),
                        counterexample: cx.map(|x| x.to_string()),
                    });
                }
            }
        }
    }
    Ok(out)
}
