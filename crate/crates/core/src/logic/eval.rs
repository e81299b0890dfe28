use std::collections::BTreeSet;

use super::formula::Formula;
use crate::error::{Error, Result};
use crate::structure::OrderedStructure;

pub const DEFAULT_DEPTH_BUDGET: usize = 4;
const MEMO_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Bin(usize, usize, usize),
    Un(usize, usize),
    Eq(usize, usize),
    Le(usize, usize),
    Not(usize),
    /// Range into `Query::kids`.
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    /// (universal?, bound slot, body, memo id)
    Quant(bool, usize, usize, usize),
}

struct Memo {
    free: Vec<usize>,
    table: Option<Vec<u8>>,
}

/// A formula compiled against a structure, with named parameters.
///
/// Quantified subformulas are memoized on the values of their free
/// variables, so repeated queries share work.
pub struct Query<'a> {
    s: &'a OrderedStructure,
    nodes: Vec<Node>,
    kids: Vec<usize>,
    memos: Vec<Memo>,
    root: usize,
    slots: usize,
    params: usize,
}

impl<'a> Query<'a> {
    pub fn new(
        s: &'a OrderedStructure,
        f: &Formula,
        params: &[&str],
        budget: usize,
    ) -> Result<Self> {
        let depth = f.quantifier_depth();
        if depth > budget {
            return Err(Error::BudgetExceeded(depth as u64));
        }
        let mut q = Query {
            s,
            nodes: Vec::new(),
            kids: Vec::new(),
            memos: Vec::new(),
            root: 0,
            slots: params.len(),
            params: params.len(),
        };
        let mut scope: Vec<(String, usize)> = params
            .iter()
            .enumerate()
            .map(|(i, p)| (p.to_string(), i))
            .collect();
        let (root, _) = q.compile(f, &mut scope)?;
        q.root = root;
        Ok(q)
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn lookup(scope: &[(String, usize)], v: &str) -> Result<usize> {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|x| x.1)
            .ok_or_else(|| Error::Formula(format!("unbound variable {v}")))
    }

    fn compile(
        &mut self,
        f: &Formula,
        scope: &mut Vec<(String, usize)>,
    ) -> Result<(usize, BTreeSet<usize>)> {
        let sig = self.s.sig();
        let var = |v: &str, scope: &Vec<(String, usize)>| Self::lookup(scope, v);
        Ok(match f {
            Formula::True => (self.push(Node::Const(true)), BTreeSet::new()),
            Formula::False => (self.push(Node::Const(false)), BTreeSet::new()),
            Formula::Atom(r, args) => {
                let slots: Vec<usize> =
                    args.iter().map(|a| var(a, scope)).collect::<Result<_>>()?;
                let node = match (args.len(), sig.binary_index(r), sig.unary_index(r)) {
                    (2, Some(i), _) => Node::Bin(i, slots[0], slots[1]),
                    (1, _, Some(i)) => Node::Un(i, slots[0]),
                    (_, None, None) => return Err(Error::Formula(format!("unknown symbol {r}"))),
                    _ => {
                        return Err(Error::Formula(format!(
                            "{r} used with {} arguments",
                            args.len()
                        )))
                    }
                };
                (self.push(node), slots.into_iter().collect())
            }
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                let (x, y) = (var(a, scope)?, var(b, scope)?);
                let node = if matches!(f, Formula::Eq(..)) {
                    Node::Eq(x, y)
                } else {
                    Node::Le(x, y)
                };
                (self.push(node), [x, y].into_iter().collect())
            }
            Formula::Not(g) => {
                let (c, fv) = self.compile(g, scope)?;
                (self.push(Node::Not(c)), fv)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let mut kids = Vec::new();
                let mut fv = BTreeSet::new();
                for g in gs {
                    let (c, v) = self.compile(g, scope)?;
                    kids.push(c);
                    fv.extend(v);
                }
                let start = self.kids.len();
                self.kids.extend(kids);
                let end = self.kids.len();
                let node = if matches!(f, Formula::And(_)) {
                    Node::And(start, end)
                } else {
                    Node::Or(start, end)
                };
                (self.push(node), fv)
            }
            Formula::Implies(a, b) => {
                let (x, mut fv) = self.compile(a, scope)?;
                let (y, fv2) = self.compile(b, scope)?;
                fv.extend(fv2);
                (self.push(Node::Implies(x, y)), fv)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let slot = self.slots;
                self.slots += 1;
                scope.push((v.clone(), slot));
                let (body, mut fv) = self.compile(g, scope)?;
                scope.pop();
                fv.remove(&slot);
                let free: Vec<usize> = fv.iter().copied().collect();
                let size = (self.s.n() as u128)
                    .checked_pow(free.len() as u32)
                    .unwrap_or(u128::MAX);
                let table = (size <= MEMO_LIMIT as u128).then(|| vec![0u8; size as usize]);
                self.memos.push(Memo { free, table });
                let id = self.memos.len() - 1;
                (
                    self.push(Node::Quant(
                        matches!(f, Formula::Forall(..)),
                        slot,
                        body,
                        id,
                    )),
                    fv,
                )
            }
        })
    }

    /// Truth value with the parameters bound to `args`.
    pub fn eval(&mut self, args: &[usize]) -> Result<bool> {
        if args.len() != self.params {
            return Err(Error::Formula(format!(
                "expected {} arguments, got {}",
                self.params,
                args.len()
            )));
        }
        for &a in args {
            if a >= self.s.n() {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    n: self.s.n(),
                });
            }
        }
        let mut env = vec![0usize; self.slots];
        env[..args.len()].copy_from_slice(args);
        Ok(self.ev(self.root, &mut env))
    }

    fn ev(&mut self, i: usize, env: &mut Vec<usize>) -> bool {
        match &self.nodes[i] {
            Node::Const(b) => *b,
            Node::Bin(r, a, b) => self.s.rel(*r, env[*a], env[*b]),
            Node::Un(u, a) => self.s.has(*u, env[*a]),
            Node::Eq(a, b) => env[*a] == env[*b],
            Node::Le(a, b) => env[*a] <= env[*b],
            Node::Not(c) => {
                let c = *c;
                !self.ev(c, env)
            }
            Node::And(a, b) => {
                let (a, b) = (*a, *b);
                (a..b).all(|k| {
                    let c = self.kids[k];
                    self.ev(c, env)
                })
            }
            Node::Or(a, b) => {
                let (a, b) = (*a, *b);
                (a..b).any(|k| {
                    let c = self.kids[k];
                    self.ev(c, env)
                })
            }
            Node::Implies(a, b) => {
                let (a, b) = (*a, *b);
                !self.ev(a, env) || self.ev(b, env)
            }
            Node::Quant(universal, slot, body, id) => {
                let (universal, slot, body, id) = (*universal, *slot, *body, *id);
                let n = self.s.n();
                let key = self.memos[id].table.as_ref().map(|_| {
                    self.memos[id]
                        .free
                        .iter()
                        .fold(0usize, |k, &s| k * n + env[s])
                });
                if let (Some(k), Some(t)) = (key, self.memos[id].table.as_ref()) {
                    if t[k] != 0 {
                        return t[k] == 2;
                    }
                }
                let saved = env[slot];
                let mut result = universal;
                for v in 0..n {
                    env[slot] = v;
                    if self.ev(body, env) != universal {
                        result = !universal;
                        break;
                    }
                }
                env[slot] = saved;
                if let (Some(k), Some(t)) = (key, self.memos[id].table.as_mut()) {
                    t[k] = 1 + result as u8;
                }
                result
            }
        }
    }
}

/// Evaluator with a quantifier-depth budget.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    s: &'a OrderedStructure,
    budget: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(s: &'a OrderedStructure) -> Self {
        Evaluator {
            s,
            budget: DEFAULT_DEPTH_BUDGET,
        }
    }

    pub fn with_depth_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn query(&self, f: &Formula, params: &[&str]) -> Result<Query<'a>> {
        Query::new(self.s, f, params, self.budget)
    }

    pub fn eval(&self, f: &Formula, asg: &[(&str, usize)]) -> Result<bool> {
        let names: Vec<&str> = asg.iter().map(|a| a.0).collect();
        let values: Vec<usize> = asg.iter().map(|a| a.1).collect();
        self.query(f, &names)?.eval(&values)
    }
}

/// Truth of `f` in `s` under a partial assignment, with the default depth budget.
pub fn eval(s: &OrderedStructure, f: &Formula, asg: &[(&str, usize)]) -> Result<bool> {
    Evaluator::new(s).eval(f, asg)
}
