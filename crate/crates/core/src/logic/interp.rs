use super::eval::Query;
use super::formula::{Formula, Fresh};
use crate::error::{Error, Result};
use crate::structure::{OrderedStructure, Signature};

pub const X: &str = "x";
pub const Y: &str = "y";

/// One-dimensional interpretation from `source`-structures to `target`-structures.
///
/// `domain` has free variable `x`; each entry of `relations` defines the
/// target symbol at the same position, over `x` (unary) or `x, y` (binary).
/// `order`, when present, replaces the inherited order on the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub source: Signature,
    pub target: Signature,
    pub domain: Formula,
    pub order: Option<Formula>,
    pub relations: Vec<Formula>,
}

impl Interpretation {
    pub fn new(
        source: Signature,
        target: Signature,
        domain: Formula,
        order: Option<Formula>,
        relations: Vec<Formula>,
    ) -> Result<Self> {
        if relations.len() != target.symbols().len() {
            return Err(Error::Formula(format!(
                "{} formulas for {} target symbols",
                relations.len(),
                target.symbols().len()
            )));
        }
        let allowed =
            |k: usize| -> Vec<String> { [X, Y][..k].iter().map(|s| s.to_string()).collect() };
        let check = |f: &Formula, k: usize, what: &str| -> Result<()> {
            f.check_signature(&source)?;
            let extra: Vec<String> = f
                .free_vars()
                .into_iter()
                .filter(|v| !allowed(k).contains(v))
                .collect();
            if !extra.is_empty() {
                return Err(Error::Formula(format!(
                    "{what} has stray free variables {extra:?}"
                )));
            }
            Ok(())
        };
        check(&domain, 1, "domain formula")?;
        if let Some(o) = &order {
            check(o, 2, "order formula")?;
        }
        for (sym, f) in target.symbols().iter().zip(&relations) {
            check(f, sym.arity as usize, &sym.name)?;
        }
        Ok(Interpretation {
            source,
            target,
            domain,
            order,
            relations,
        })
    }

    pub fn identity(sig: &Signature) -> Self {
        let relations = sig
            .symbols()
            .iter()
            .map(|s| {
                if s.arity == 2 {
                    Formula::atom(&s.name, &[X, Y])
                } else {
                    Formula::atom(&s.name, &[X])
                }
            })
            .collect();
        Interpretation {
            source: sig.clone(),
            target: sig.clone(),
            domain: Formula::True,
            order: None,
            relations,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        let mut d = self.domain.quantifier_depth();
        if let Some(o) = &self.order {
            d = d.max(o.quantifier_depth());
        }
        self.relations
            .iter()
            .map(|f| f.quantifier_depth())
            .fold(d, usize::max)
    }

    /// Evaluates the interpretation on `s` with the given quantifier-depth budget.
    pub fn apply(&self, s: &OrderedStructure, budget: usize) -> Result<OrderedStructure> {
        if s.sig() != &self.source {
            return Err(Error::Signature(format!(
                "interpretation expects {}, structure has {}",
                self.source,
                s.sig()
            )));
        }
        let mut dq = Query::new(s, &self.domain, &[X], budget)?;
        let mut dom = Vec::new();
        for v in 0..s.n() {
            if dq.eval(&[v])? {
                dom.push(v);
            }
        }
        if let Some(o) = &self.order {
            let mut oq = Query::new(s, o, &[X, Y], budget)?;
            let k = dom.len();
            let mut le = vec![false; k * k];
            for i in 0..k {
                for j in 0..k {
                    le[i * k + j] = oq.eval(&[dom[i], dom[j]])?;
                }
            }
            for i in 0..k {
                for j in 0..k {
                    let total = le[i * k + j] || le[j * k + i];
                    let anti = i == j || !(le[i * k + j] && le[j * k + i]);
                    let trans = (0..k).all(|l| !(le[i * k + j] && le[j * k + l]) || le[i * k + l]);
                    if !le[i * k + i] || !total || !anti || !trans {
                        return Err(Error::Formula(
                            "order formula is not a linear order on the domain".into(),
                        ));
                    }
                }
            }
            let mut idx: Vec<usize> = (0..k).collect();
            idx.sort_by(|&a, &b| {
                if a == b {
                    std::cmp::Ordering::Equal
                } else if le[a * k + b] {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
            dom = idx.into_iter().map(|i| dom[i]).collect();
        }
        let k = dom.len();
        let mut out = OrderedStructure::new(self.target.clone(), k);
        for (sym, f) in self.target.symbols().iter().zip(&self.relations) {
            if sym.arity == 2 {
                let r = self
                    .target
                    .binary_index(&sym.name)
                    .expect("declared symbol");
                let mut q = Query::new(s, f, &[X, Y], budget)?;
                for i in 0..k {
                    for j in 0..k {
                        out.set_rel(r, i, j, q.eval(&[dom[i], dom[j]])?);
                    }
                }
            } else {
                let u = self.target.unary_index(&sym.name).expect("declared symbol");
                let mut q = Query::new(s, f, &[X], budget)?;
                for (i, &a) in dom.iter().enumerate().take(k) {
                    out.set_unary(u, i, q.eval(&[a])?);
                }
            }
        }
        Ok(out)
    }

    /// Rewrites a target-signature formula into a source-signature formula with
    /// the same meaning: atoms are replaced by their defining formulas and
    /// quantifiers are relativized to the domain.
    pub fn pullback(&self, f: &Formula) -> Result<Formula> {
        f.check_signature(&self.target)?;
        let mut fresh = Fresh::avoiding(f.all_vars());
        fresh.reserve([X.to_string(), Y.to_string()]);
        Ok(self.pb(f, &mut fresh))
    }

    fn pb(&self, f: &Formula, fresh: &mut Fresh) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::Eq(..) => f.clone(),
            Formula::Le(a, b) => match &self.order {
                Some(o) => o.substitute(&[(X, a), (Y, b)], fresh),
                None => f.clone(),
            },
            Formula::Atom(r, args) => {
                let pos = self
                    .target
                    .symbols()
                    .iter()
                    .position(|s| &s.name == r)
                    .expect("checked symbol");
                let def = &self.relations[pos];
                match args.as_slice() {
                    [a] => def.substitute(&[(X, a)], fresh),
                    [a, b] => def.substitute(&[(X, a), (Y, b)], fresh),
                    _ => unreachable!("atoms have one or two arguments"),
                }
            }
            Formula::Not(g) => Formula::not(self.pb(g, fresh)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.pb(g, fresh)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.pb(g, fresh)).collect()),
            Formula::Implies(a, b) => Formula::implies(self.pb(a, fresh), self.pb(b, fresh)),
            Formula::Exists(v, g) => {
                let dom = self.domain.substitute(&[(X, v)], fresh);
                Formula::exists(v, Formula::And(vec![dom, self.pb(g, fresh)]))
            }
            Formula::Forall(v, g) => {
                let dom = self.domain.substitute(&[(X, v)], fresh);
                Formula::forall(v, Formula::implies(dom, self.pb(g, fresh)))
            }
        }
    }
}

/// The interpretation `outer ∘ inner`, mapping S to outer(inner(S)).
pub fn compose(outer: &Interpretation, inner: &Interpretation) -> Result<Interpretation> {
    if outer.source != inner.target {
        return Err(Error::Signature(format!(
            "cannot compose: {} vs {}",
            outer.source, inner.target
        )));
    }
    let domain = Formula::And(vec![inner.domain.clone(), inner.pullback(&outer.domain)?]);
    let order = match (&outer.order, &inner.order) {
        (None, None) => None,
        (o, _) => Some(inner.pullback(o.as_ref().unwrap_or(&Formula::le(X, Y)))?),
    };
    let relations = outer
        .relations
        .iter()
        .map(|f| inner.pullback(f))
        .collect::<Result<_>>()?;
    Ok(Interpretation {
        source: inner.source.clone(),
        target: outer.target.clone(),
        domain,
        order,
        relations,
    })
}
