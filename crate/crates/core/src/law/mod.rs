//! Law expressions: words in a free group written with products, powers,
//! commutators and conjugates.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! law      = product ;
//! product  = power { [ "*" ] power } ;
//! power    = atom { "^" integer } ;          (* "^-1" is an inverse *)
//! atom     = var | "(" product ")"
//!          | "[" product "," product { "," product } "]"
//!          | "conj(" product "," product ")" ;
//! var      = "x" digit { digit } ;           (* x1, x2, ... *)
//! ```
//!
//! `[a, b] = a b a⁻¹ b⁻¹`, brackets with more entries are left-normed, and
//! `conj(a, b) = a^b = b a b⁻¹`. `A^B` with a non-integer `B` is rejected.

mod parse;

use std::fmt;

use thiserror::Error;

use crate::kernel::{FreeWord, GroupElement, GroupHandle, KernelError, Letter};
use crate::scalar::Coord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("law syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variables must be x1..x{max}, but x{missing} does not occur")]
    NonContiguous { max: u32, missing: u32 },
    #[error("the word reduces to the identity, which is not a law")]
    EmptyWord,
    #[error("law needs {needed} values, got {given}")]
    Arity { needed: usize, given: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Abstract syntax tree of a word. Variables are 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LawExpr {
    Var(u32),
    Inv(Box<LawExpr>),
    Pow(Box<LawExpr>, i64),
    Mul(Box<LawExpr>, Box<LawExpr>),
    /// `[a, b] = a b a⁻¹ b⁻¹`.
    Comm(Box<LawExpr>, Box<LawExpr>),
    /// `a^b = b a b⁻¹`.
    Conj(Box<LawExpr>, Box<LawExpr>),
}

/// Parses a law; its variables must be exactly `x1..xd` for some `d`.
pub fn parse_law(text: &str) -> Result<LawExpr, LawError> {
    let e = parse_expr(text)?;
    let used = e.variables();
    let max = e.num_vars();
    if let Some(missing) = (1..=max).find(|i| !used.contains(i)) {
        return Err(LawError::NonContiguous { max, missing });
    }
    Ok(e)
}

/// Parses an expression without the contiguity requirement, for
/// hypotheses and sides of identities that share a variable namespace.
pub fn parse_expr(text: &str) -> Result<LawExpr, LawError> {
    let mut p = parse::Parser::new(text);
    let e = p.product()?;
    p.finish(e)
}

impl std::str::FromStr for LawExpr {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_law(s)
    }
}

impl LawExpr {
    pub fn var(i: u32) -> Self {
        LawExpr::Var(i)
    }

    pub fn inv(self) -> Self {
        LawExpr::Inv(Box::new(self))
    }

    pub fn pow(self, n: i64) -> Self {
        LawExpr::Pow(Box::new(self), n)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: LawExpr) -> Self {
        LawExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn comm(self, rhs: LawExpr) -> Self {
        LawExpr::Comm(Box::new(self), Box::new(rhs))
    }

    pub fn conj(self, by: LawExpr) -> Self {
        LawExpr::Conj(Box::new(self), Box::new(by))
    }

    /// Largest variable index, i.e. `d` for a law in `F_d`.
    pub fn num_vars(&self) -> u32 {
        match self {
            LawExpr::Var(i) => *i,
            LawExpr::Inv(e) | LawExpr::Pow(e, _) => e.num_vars(),
            LawExpr::Mul(a, b) | LawExpr::Comm(a, b) | LawExpr::Conj(a, b) => a.num_vars().max(b.num_vars()),
        }
    }

    /// Sorted distinct variable indices.
    pub fn variables(&self) -> Vec<u32> {
        fn walk(e: &LawExpr, out: &mut Vec<u32>) {
            match e {
                LawExpr::Var(i) => out.push(*i),
                LawExpr::Inv(e) | LawExpr::Pow(e, _) => walk(e, out),
                LawExpr::Mul(a, b) | LawExpr::Comm(a, b) | LawExpr::Conj(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The reduced word, possibly empty.
    pub fn word(&self) -> FreeWord {
        match self {
            LawExpr::Var(i) => FreeWord::generator(*i),
            LawExpr::Inv(e) => e.word().inverse(),
            LawExpr::Pow(e, n) => e.word().pow(*n),
            LawExpr::Mul(a, b) => a.word().mul(&b.word()),
            LawExpr::Comm(a, b) => {
                let (a, b) = (a.word(), b.word());
                let mut w = a.mul(&b);
                w.mul_assign(&a.inverse());
                w.mul_assign(&b.inverse());
                w
            }
            LawExpr::Conj(a, b) => {
                let (a, b) = (a.word(), b.word());
                let mut w = b.mul(&a);
                w.mul_assign(&b.inverse());
                w
            }
        }
    }

    /// The freely reduced letter sequence of a law. Fails when the word
    /// reduces to the identity.
    pub fn flatten(&self) -> Result<FreeWord, LawError> {
        let w = self.word();
        if w.is_empty() {
            return Err(LawError::EmptyWord);
        }
        Ok(w)
    }

    /// Per-variable exponent sums, computed from the tree. Length is
    /// `num_vars()`.
    pub fn degrees(&self) -> Vec<i64> {
        fn walk(e: &LawExpr, scale: i64, out: &mut [i64]) {
            match e {
                LawExpr::Var(i) => out[*i as usize - 1] += scale,
                LawExpr::Inv(e) => walk(e, -scale, out),
                LawExpr::Pow(e, n) => walk(e, scale * n, out),
                LawExpr::Mul(a, b) => {
                    walk(a, scale, out);
                    walk(b, scale, out);
                }
                LawExpr::Comm(_, _) => {}
                LawExpr::Conj(a, _) => walk(a, scale, out),
            }
        }
        let mut out = vec![0; self.num_vars() as usize];
        walk(self, 1, &mut out);
        out
    }

    /// Trivial abelianization: every exponent sum vanishes.
    pub fn is_balanced(&self) -> bool {
        self.degrees().iter().all(|&d| d == 0)
    }

    /// The derived word `[w(x1..xd), x(d+1)]`.
    pub fn derive(&self) -> LawExpr {
        self.clone().comm(LawExpr::Var(self.num_vars() + 1))
    }

    /// Shifts every variable index by `offset`, so two laws can be put on
    /// disjoint letters.
    pub fn rename(&self, offset: u32) -> LawExpr {
        self.map_vars(&|i| i + offset)
    }

    pub fn map_vars(&self, f: &dyn Fn(u32) -> u32) -> LawExpr {
        match self {
            LawExpr::Var(i) => LawExpr::Var(f(*i)),
            LawExpr::Inv(e) => LawExpr::Inv(Box::new(e.map_vars(f))),
            LawExpr::Pow(e, n) => LawExpr::Pow(Box::new(e.map_vars(f)), *n),
            LawExpr::Mul(a, b) => LawExpr::Mul(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            LawExpr::Comm(a, b) => LawExpr::Comm(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            LawExpr::Conj(a, b) => LawExpr::Conj(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
        }
    }

    /// Evaluates the word map directly on the tree.
    pub fn evaluate<C: Coord>(
        &self,
        group: &GroupHandle<C>,
        assignment: &[GroupElement<C>],
    ) -> Result<GroupElement<C>, LawError> {
        let needed = self.num_vars() as usize;
        if assignment.len() < needed {
            return Err(LawError::Arity { needed, given: assignment.len() });
        }
        Ok(self.eval_inner(group, assignment)?)
    }

    fn eval_inner<C: Coord>(
        &self,
        g: &GroupHandle<C>,
        xs: &[GroupElement<C>],
    ) -> Result<GroupElement<C>, KernelError> {
        match self {
            LawExpr::Var(i) => Ok(xs[*i as usize - 1].clone()),
            LawExpr::Inv(e) => g.inverse(&e.eval_inner(g, xs)?),
            LawExpr::Pow(e, n) => g.pow(&e.eval_inner(g, xs)?, *n),
            LawExpr::Mul(a, b) => g.multiply(&a.eval_inner(g, xs)?, &b.eval_inner(g, xs)?),
            LawExpr::Comm(a, b) => g.commutator(&a.eval_inner(g, xs)?, &b.eval_inner(g, xs)?),
            LawExpr::Conj(a, b) => g.conjugate(&a.eval_inner(g, xs)?, &b.eval_inner(g, xs)?),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            LawExpr::Mul(..) => 0,
            LawExpr::Inv(_) | LawExpr::Pow(..) => 1,
            _ => 2,
        }
    }
}

/// Evaluates a reduced word letter by letter.
pub fn evaluate_word<C: Coord>(
    word: &FreeWord,
    group: &GroupHandle<C>,
    assignment: &[GroupElement<C>],
) -> Result<GroupElement<C>, LawError> {
    let needed = word.max_generator() as usize;
    if assignment.len() < needed {
        return Err(LawError::Arity { needed, given: assignment.len() });
    }
    let inverses = assignment.iter().take(needed).map(|x| group.inverse(x)).collect::<Result<Vec<_>, _>>()?;
    let mut acc = group.identity();
    for l in word.letters() {
        let i = l.generator() as usize - 1;
        group.mul_assign(&mut acc, if l.is_inverse() { &inverses[i] } else { &assignment[i] })?;
    }
    Ok(acc)
}

impl fmt::Display for LawExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrapped = |f: &mut fmt::Formatter<'_>, e: &LawExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            LawExpr::Var(i) => write!(f, "x{i}"),
            LawExpr::Inv(e) => {
                wrapped(f, e, 2)?;
                write!(f, "^-1")
            }
            LawExpr::Pow(e, n) => {
                wrapped(f, e, 2)?;
                write!(f, "^{n}")
            }
            LawExpr::Mul(a, b) => {
                wrapped(f, a, 0)?;
                write!(f, " ")?;
                wrapped(f, b, 1)
            }
            LawExpr::Comm(a, b) => write!(f, "[{a},{b}]"),
            LawExpr::Conj(a, b) => write!(f, "conj({a},{b})"),
        }
    }
}

/// All simple products over `letters` variables: products of distinct
/// letters `x_i^{±1}`, each used at most once, in every order.
pub fn simple_products(letters: u32) -> Vec<LawExpr> {
    fn extend(letters: u32, prefix: &mut Vec<Letter>, used: &mut Vec<bool>, out: &mut Vec<Vec<Letter>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        for i in 1..=letters {
            if used[i as usize] {
                continue;
            }
            used[i as usize] = true;
            for inverted in [false, true] {
                prefix.push(Letter::new(i, inverted));
                extend(letters, prefix, used, out);
                prefix.pop();
            }
            used[i as usize] = false;
        }
    }
    let mut seqs = Vec::new();
    extend(letters, &mut Vec::new(), &mut vec![false; letters as usize + 1], &mut seqs);
    seqs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut seen = std::collections::HashSet::new();
    seqs.into_iter()
        .filter(|s| seen.insert(FreeWord::from_letters(s.iter().copied())))
        .map(|s| {
            let mut it = s.into_iter().map(letter_expr);
            let first = it.next().expect("nonempty");
            it.fold(first, LawExpr::mul)
        })
        .collect()
}

fn letter_expr(l: Letter) -> LawExpr {
    let v = LawExpr::Var(l.generator());
    if l.is_inverse() {
        v.inv()
    } else {
        v
    }
}

/// A law given as a reduced word, rebuilt as a product expression.
pub fn word_expr(word: &FreeWord) -> Option<LawExpr> {
    let mut it = word.letters().iter().copied().map(letter_expr);
    let first = it.next()?;
    Some(it.fold(first, LawExpr::mul))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> LawExpr {
        LawExpr::Var(i)
    }

    #[test]
    fn parses_metabelian_law() {
        let e = parse_law("[[x1,x2],[x3,x4]]").unwrap();
        assert_eq!(e, v(1).comm(v(2)).comm(v(3).comm(v(4))));
        assert_eq!(parse_law("x1^6").unwrap(), v(1).pow(6));
        assert_eq!(parse_law("[x1,x2,x3]").unwrap(), parse_law("[[x1,x2],x3]").unwrap());
        assert_eq!(parse_law("[[x1,x2],x3]").unwrap().num_vars(), 3);
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_law("1"), Err(LawError::Syntax { position: 0, .. })));
        assert!(matches!(parse_law("x1^x2"), Err(LawError::Syntax { position: 3, .. })));
        assert!(matches!(parse_law("[x1 x2]"), Err(LawError::Syntax { position: 6, .. })));
        assert!(matches!(parse_law("x0"), Err(LawError::Syntax { .. })));
        assert!(matches!(parse_law("x1 x3"), Err(LawError::NonContiguous { max: 3, missing: 2 })));
        assert!(parse_expr("x1 x3").is_ok());
    }

    #[test]
    fn juxtaposition_and_star_agree() {
        assert_eq!(parse_law("x1*x2 * x3").unwrap(), parse_law("x1x2 x3").unwrap());
        assert_eq!(parse_law(" conj( x1 , x2 ) ").unwrap(), v(1).conj(v(2)));
        assert_eq!(parse_law("(x1 x2)^-1").unwrap(), v(1).mul(v(2)).inv());
    }

    #[test]
    fn printer_round_trips() {
        for text in [
            "[[x1,x2],[x3,x4]]",
            "x1^6",
            "x1 (x2 x3)",
            "(x1 x2)^-1",
            "(x1^2)^3",
            "conj(x1 x2,x3^-1)",
            "[x1^2,[x2,x3]]",
        ] {
            let e = parse_law(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse_law(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(v(1).comm(v(2)).flatten().unwrap(), FreeWord::from_signed(&[1, 2, -1, -2]));
        assert_eq!(v(1).pow(3).flatten().unwrap().len(), 3);
        assert_eq!(v(1).mul(v(1).inv()).flatten(), Err(LawError::EmptyWord));
    }

    /// Letter-level expansion without any reduction until the end.
    fn naive_expand(e: &LawExpr) -> Vec<i32> {
        let inv = |w: Vec<i32>| w.into_iter().rev().map(|x| -x).collect::<Vec<_>>();
        match e {
            LawExpr::Var(i) => vec![*i as i32],
            LawExpr::Inv(a) => inv(naive_expand(a)),
            LawExpr::Pow(a, n) => {
                let base = if *n < 0 { inv(naive_expand(a)) } else { naive_expand(a) };
                base.repeat(n.unsigned_abs() as usize)
            }
            LawExpr::Mul(a, b) => [naive_expand(a), naive_expand(b)].concat(),
            LawExpr::Comm(a, b) => {
                let (a, b) = (naive_expand(a), naive_expand(b));
                [a.clone(), b.clone(), inv(a), inv(b)].concat()
            }
            LawExpr::Conj(a, b) => {
                let (a, b) = (naive_expand(a), naive_expand(b));
                [b.clone(), a, inv(b)].concat()
            }
        }
    }

    /// Stack-based free reduction, independent of `FreeWord::push`.
    fn reduce(w: &[i32]) -> Vec<i32> {
        let mut out: Vec<i32> = Vec::new();
        for &x in w {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn metabelian_flattens_to_sixteen_letters() {
        let e = parse_law("[[x1,x2],[x3,x4]]").unwrap();
        let oracle = reduce(&naive_expand(&e));
        assert_eq!(oracle.len(), 16);
        let w = e.flatten().unwrap();
        assert_eq!(w.letters().iter().map(|l| l.signed()).collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn degrees_and_balance() {
        assert_eq!(parse_law("[[x1,x2],[x3,x4]]").unwrap().degrees(), vec![0, 0, 0, 0]);
        assert_eq!(parse_law("x1^5").unwrap().degrees(), vec![5]);
        assert!(!parse_law("x1^5").unwrap().is_balanced());
        let e = parse_law("[x1^2, [x2,x3]]").unwrap();
        let mut sums = [0i64; 3];
        for x in naive_expand(&e) {
            sums[x.unsigned_abs() as usize - 1] += x.signum() as i64;
        }
        assert_eq!(e.degrees(), sums.to_vec());
        assert!(e.is_balanced());
    }

    #[test]
    fn derived_words() {
        assert_eq!(parse_law("[x1,x2]").unwrap().derive(), parse_law("[[x1,x2],x3]").unwrap());
        assert_eq!(parse_law("x1^2").unwrap().derive(), parse_law("[x1^2,x2]").unwrap());
        let d = parse_law("x1^3 x2").unwrap().derive();
        assert_eq!(d.degrees()[2], 0);
        assert_eq!(parse_law("[x1,x2]").unwrap().rename(2), parse_expr("[x3,x4]").unwrap());
    }

    #[test]
    fn simple_product_counts() {
        let all = simple_products(4);
        assert_eq!(all.len(), 632);
        let by_len = |n: usize| all.iter().filter(|e| e.word().len() == n).count();
        assert_eq!((by_len(1), by_len(2), by_len(3), by_len(4)), (8, 48, 192, 384));
        let words: Vec<FreeWord> = all.iter().map(|e| e.word()).collect();
        assert!(words.contains(&FreeWord::from_signed(&[-3, 1, 4])));
        assert!(!words.contains(&FreeWord::from_signed(&[1, 2, -1, 3])));
    }
}
