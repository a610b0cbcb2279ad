use std::collections::HashMap;

use crate::exact::FiniteGroupTable;
use crate::law::LawExpr;
use crate::scalar::Coord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Var(usize),
    Inv(usize),
    Mul(usize, usize),
    Pow(usize, i64),
    Comm(usize, usize),
    Conj(usize, usize),
}

/// A list of expressions compiled into straight-line code over table
/// indices. Shared subexpressions are computed once per tuple, and roots
/// are evaluated lazily in order, so a caller can stop at the first root
/// that fails.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
    /// Number of ops that must run before root `i` is available.
    marks: Vec<usize>,
}

impl Program {
    pub fn compile(exprs: &[LawExpr]) -> Self {
        let mut ops = Vec::new();
        let mut memo = HashMap::new();
        let mut roots = Vec::with_capacity(exprs.len());
        let mut marks = Vec::with_capacity(exprs.len());
        for e in exprs {
            roots.push(emit(e, &mut ops, &mut memo));
            marks.push(ops.len());
        }
        Program { ops, roots, marks }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Starts evaluating on the tuple `xs`; `slots` is scratch space that
    /// can be reused between tuples.
    pub fn evaluator<'a, C: Coord>(
        &'a self,
        table: &'a FiniteGroupTable<C>,
        xs: &'a [u32],
        slots: &'a mut Vec<u32>,
    ) -> Evaluator<'a, C> {
        slots.resize(self.ops.len(), 0);
        Evaluator { program: self, table, xs, slots, done: 0 }
    }

    /// Whether root `root` evaluates to the identity on `xs`.
    pub fn holds<C: Coord>(&self, table: &FiniteGroupTable<C>, xs: &[u32], slots: &mut Vec<u32>, root: usize) -> bool {
        self.evaluator(table, xs, slots).is_identity(root)
    }
}

fn emit(e: &LawExpr, ops: &mut Vec<Op>, memo: &mut HashMap<Op, usize>) -> usize {
    let op = match e {
        LawExpr::Var(i) => Op::Var(*i as usize - 1),
        LawExpr::Inv(a) => Op::Inv(emit(a, ops, memo)),
        LawExpr::Pow(a, n) => Op::Pow(emit(a, ops, memo), *n),
        LawExpr::Mul(a, b) => {
            let a = emit(a, ops, memo);
            Op::Mul(a, emit(b, ops, memo))
        }
        LawExpr::Comm(a, b) => {
            let a = emit(a, ops, memo);
            Op::Comm(a, emit(b, ops, memo))
        }
        LawExpr::Conj(a, b) => {
            let a = emit(a, ops, memo);
            Op::Conj(a, emit(b, ops, memo))
        }
    };
    *memo.entry(op).or_insert_with(|| {
        ops.push(op);
        ops.len() - 1
    })
}

pub struct Evaluator<'a, C: Coord> {
    program: &'a Program,
    table: &'a FiniteGroupTable<C>,
    xs: &'a [u32],
    slots: &'a mut Vec<u32>,
    done: usize,
}

impl<C: Coord> Evaluator<'_, C> {
    pub fn value(&mut self, root: usize) -> u32 {
        let t = self.table;
        let s = &mut *self.slots;
        for i in self.done..self.program.marks[root] {
            s[i] = match self.program.ops[i] {
                Op::Var(v) => self.xs[v],
                Op::Inv(a) => t.inv(s[a]),
                Op::Mul(a, b) => t.mul(s[a], s[b]),
                Op::Pow(a, n) => t.pow(s[a], n),
                Op::Comm(a, b) => {
                    let (x, y) = (s[a], s[b]);
                    t.mul(t.mul(x, y), t.inv(t.mul(y, x)))
                }
                Op::Conj(a, b) => {
                    let (x, y) = (s[a], s[b]);
                    t.mul(t.mul(y, x), t.inv(y))
                }
            };
        }
        self.done = self.done.max(self.program.marks[root]);
        s[self.program.roots[root]]
    }

    pub fn is_identity(&mut self, root: usize) -> bool {
        self.value(root) == FiniteGroupTable::<C>::IDENTITY
    }
}
