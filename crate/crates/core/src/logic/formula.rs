use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::structure::{AtomicTypeCode, OrderRel, Signature, ORDER_SYMBOL};

/// First-order formula over a relational signature with an implicit order.
///
/// Text form is a prefix s-expression:
///
/// ```text
/// φ ::= true | false
///     | (R x y) | (U x) | (= x y) | (<= x y) | (< x y)
///     | (not φ) | (and φ ...) | (or φ ...) | (implies φ φ)
///     | (exists x φ) | (forall x φ)
/// ```
///
/// `(< x y)` is read as `(and (<= x y) (not (= x y)))`. Lines starting with `;` are comments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<String>),
    Eq(String, String),
    Le(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: &str, args: &[&str]) -> Formula {
        Formula::Atom(
            rel.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.into(), y.into())
    }

    pub fn le(x: &str, y: &str) -> Formula {
        Formula::Le(x.into(), y.into())
    }

    pub fn lt(x: &str, y: &str) -> Formula {
        Formula::And(vec![Formula::le(x, y), Formula::not(Formula::eq(x, y))])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    /// Quantifier-free formula stating that (x, y) has the given atomic type.
    pub fn atomic_type(sig: &Signature, code: AtomicTypeCode, x: &str, y: &str) -> Formula {
        let lit = |f: Formula, v: bool| if v { f } else { Formula::not(f) };
        let mut parts = vec![match code.order() {
            OrderRel::Less => Formula::lt(x, y),
            OrderRel::Equal => Formula::eq(x, y),
            OrderRel::Greater => Formula::lt(y, x),
        }];
        for (r, name) in sig.binary_names().enumerate() {
            let (a, b) = code.binary(r);
            parts.push(lit(Formula::atom(name, &[x, y]), a));
            parts.push(lit(Formula::atom(name, &[y, x]), b));
        }
        let nb = sig.binary_count();
        for (u, name) in sig.unary_names().enumerate() {
            let (a, b) = code.unary(nb, u);
            parts.push(lit(Formula::atom(name, &[x]), a));
            parts.push(lit(Formula::atom(name, &[y]), b));
        }
        Formula::And(parts)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|v| add(v, bound)),
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                add(a, bound);
                add(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring in the formula, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|x| x.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(|f| f.quantifier_depth()).max().unwrap_or(0)
            }
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
            _ => 0,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_depth() == 0
    }

    /// Checks that every symbol exists in `sig` with the arity used.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        let mut err = None;
        self.visit(&mut |f| {
            if let Formula::Atom(r, args) = f {
                match sig.arity(r) {
                    Some(a) if a as usize == args.len() => {}
                    Some(a) => {
                        err = err.take().or(Some(Error::Formula(format!(
                            "{r} has arity {a}, used with {}",
                            args.len()
                        ))))
                    }
                    None => {
                        err = err
                            .take()
                            .or(Some(Error::Formula(format!("unknown symbol {r}"))))
                    }
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Renames free occurrences according to `map`. Every bound variable gets a fresh name.
    pub fn substitute(&self, map: &[(&str, &str)], fresh: &mut Fresh) -> Formula {
        let owned: Vec<(String, String)> = map
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        self.subst(&owned, fresh)
    }

    fn subst(&self, map: &[(String, String)], fresh: &mut Fresh) -> Formula {
        let r = |v: &String| {
            map.iter()
                .rev()
                .find(|(a, _)| a == v)
                .map_or_else(|| v.clone(), |(_, b)| b.clone())
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(s, args) => Formula::Atom(s.clone(), args.iter().map(r).collect()),
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Le(a, b) => Formula::Le(r(a), r(b)),
            Formula::Not(f) => Formula::not(f.subst(map, fresh)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst(map, fresh)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst(map, fresh)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.subst(map, fresh), b.subst(map, fresh)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let nv = fresh.next(v);
                let mut inner = map.to_vec();
                inner.push((v.clone(), nv.clone()));
                let body = Box::new(f.subst(&inner, fresh));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(nv, body)
                } else {
                    Formula::Forall(nv, body)
                }
            }
        }
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let f = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            let (line, t) = &tokens[pos];
            return Err(Error::Parse {
                line: *line,
                msg: format!("trailing input at {t:?}"),
            });
        }
        Ok(f)
    }
}

/// Source of variable names that do not clash with a given set.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    taken: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    pub fn avoiding(names: impl IntoIterator<Item = String>) -> Self {
        Fresh {
            taken: names.into_iter().collect(),
            counter: 0,
        }
    }

    pub fn next(&mut self, base: &str) -> String {
        let stem = base.split('#').next().unwrap_or(base);
        loop {
            self.counter += 1;
            let name = format!("{stem}#{}", self.counter);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn reserve(&mut self, names: impl IntoIterator<Item = String>) {
        self.taken.extend(names);
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        let mut cur = String::new();
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        out.push((ln + 1, std::mem::take(&mut cur)));
                    }
                    out.push((ln + 1, ch.to_string()));
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        out.push((ln + 1, std::mem::take(&mut cur)));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push((ln + 1, cur));
        }
    }
    Ok(out)
}

fn parse_expr(tokens: &[(usize, String)], pos: &mut usize) -> Result<Formula> {
    let eof = || Error::Parse {
        line: tokens.last().map_or(1, |t| t.0),
        msg: "unexpected end of formula".into(),
    };
    let (line, tok) = tokens.get(*pos).ok_or_else(eof)?.clone();
    *pos += 1;
    let err = |msg: String| Error::Parse { line, msg };
    match tok.as_str() {
        "true" => return Ok(Formula::True),
        "false" => return Ok(Formula::False),
        "(" => {}
        t => return Err(err(format!("expected formula, found {t:?}"))),
    }
    let (_, head) = tokens.get(*pos).ok_or_else(eof)?.clone();
    *pos += 1;
    let var = |pos: &mut usize| -> Result<String> {
        let (l, t) = tokens.get(*pos).ok_or_else(eof)?.clone();
        *pos += 1;
        if t == "(" || t == ")" {
            return Err(Error::Parse {
                line: l,
                msg: format!("expected variable, found {t:?}"),
            });
        }
        Ok(t)
    };
    let close = |pos: &mut usize| -> Result<()> {
        match tokens.get(*pos) {
            Some((_, t)) if t == ")" => {
                *pos += 1;
                Ok(())
            }
            Some((l, t)) => Err(Error::Parse {
                line: *l,
                msg: format!("expected ')', found {t:?}"),
            }),
            None => Err(eof()),
        }
    };
    let f = match head.as_str() {
        "not" => Formula::not(parse_expr(tokens, pos)?),
        "and" | "or" => {
            let mut fs = Vec::new();
            while tokens.get(*pos).map(|t| t.1.as_str()) != Some(")") {
                if *pos >= tokens.len() {
                    return Err(eof());
                }
                fs.push(parse_expr(tokens, pos)?);
            }
            if head == "and" {
                Formula::And(fs)
            } else {
                Formula::Or(fs)
            }
        }
        "implies" => {
            let a = parse_expr(tokens, pos)?;
            Formula::implies(a, parse_expr(tokens, pos)?)
        }
        "exists" | "forall" => {
            let v = var(pos)?;
            let body = parse_expr(tokens, pos)?;
            if head == "exists" {
                Formula::exists(&v, body)
            } else {
                Formula::forall(&v, body)
            }
        }
        "=" | "<=" | "<" => {
            let a = var(pos)?;
            let b = var(pos)?;
            match head.as_str() {
                "=" => Formula::Eq(a, b),
                "<=" => Formula::Le(a, b),
                _ => Formula::lt(&a, &b),
            }
        }
        "(" | ")" => return Err(err("expected operator".into())),
        rel => {
            let mut args = Vec::new();
            while tokens.get(*pos).map(|t| t.1.as_str()) != Some(")") {
                if *pos >= tokens.len() {
                    return Err(eof());
                }
                args.push(var(pos)?);
            }
            if args.is_empty() || args.len() > 2 {
                return Err(err(format!("{rel} applied to {} arguments", args.len())));
            }
            Formula::Atom(rel.to_string(), args)
        }
    };
    close(pos)?;
    Ok(f)
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formula::parse(s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(r, args) => write!(f, "({} {})", r, args.join(" ")),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Le(a, b) => write!(f, "({ORDER_SYMBOL} {a} {b})"),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(fs) | Formula::Or(fs) => {
                write!(
                    f,
                    "({}",
                    if matches!(self, Formula::And(_)) {
                        "and"
                    } else {
                        "or"
                    }
                )?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(v, x) => write!(f, "(exists {v} {x})"),
            Formula::Forall(v, x) => write!(f, "(forall {v} {x})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print_round_trip() {
        let texts = [
            "(exists x (exists y (E x y)))",
            "(forall x (forall y (or (<= x y) (<= y x))))",
            "(and (U x) (not (= x y)) (implies true false))",
            "(and)",
        ];
        for t in texts {
            let f = Formula::parse(t).unwrap();
            assert_eq!(f.to_string(), t);
        }
        let lt = Formula::parse("(< a b)").unwrap();
        assert_eq!(lt.to_string(), "(and (<= a b) (not (= a b)))");
    }

    #[test]
    fn parse_errors() {
        assert!(Formula::parse("(exists x").is_err());
        assert!(Formula::parse("(E x y z)").is_err());
        assert!(Formula::parse("x").is_err());
        assert!(Formula::parse("true true").is_err());
        let e = Formula::parse("(and\n  (E x y)\n  (exists ( x))").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn comments_and_depth() {
        let f = Formula::parse("; two levels\n(exists x ; outer\n (forall y (E x y)))").unwrap();
        assert_eq!(f.quantifier_depth(), 2);
        assert!(f.free_vars().is_empty());
        assert_eq!(
            Formula::parse("(and (E x y) (exists y (U y)))")
                .unwrap()
                .free_vars()
                .len(),
            2
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::parse("(exists y (E x y))").unwrap();
        let mut fresh = Fresh::avoiding(f.all_vars());
        let g = f.substitute(&[("x", "y")], &mut fresh);
        assert_eq!(
            g.free_vars().into_iter().collect::<Vec<_>>(),
            vec!["y".to_string()]
        );
        assert_eq!(g.to_string(), "(exists y#1 (E y y#1))");
    }

    #[test]
    fn signature_check() {
        let sig = Signature::graph();
        assert!(Formula::parse("(E x y)")
            .unwrap()
            .check_signature(&sig)
            .is_ok());
        assert!(Formula::parse("(E x)")
            .unwrap()
            .check_signature(&sig)
            .is_err());
        assert!(Formula::parse("(F x y)")
            .unwrap()
            .check_signature(&sig)
            .is_err());
    }
}
