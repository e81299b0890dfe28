use super::formula::{Formula, Fresh};
use super::interp::{Interpretation, X, Y};
use crate::error::{Error, Result};
use crate::semigrid::{generate_gs, Cells, GraphScheme, InnerFlag, Orient, RType};
use crate::structure::{OrderedStructure, Signature};

pub const ROW: &str = "Row";
pub const COL: &str = "Col";

/// Signature of bipartite graphs: edge relation `E` and part predicates `Row`, `Col`.
pub fn bipartite_signature() -> Signature {
    Signature::new([("E", 2u8), (ROW, 1), (COL, 1)]).expect("valid signature")
}

/// Bipartite graph with rows 1..=m followed by columns 1..=n and an edge for every cell.
pub fn bipartite_graph(m: usize, n: usize, cells: &[(usize, usize)]) -> Result<OrderedStructure> {
    let mut h = OrderedStructure::new(bipartite_signature(), m + n);
    for i in 0..m {
        h.set_unary(0, i, true);
    }
    for j in 0..n {
        h.set_unary(1, m + j, true);
    }
    for &(i, j) in cells {
        if i == 0 || j == 0 || i > m || j > n {
            return Err(Error::InvalidParameter(format!(
                "cell ({i},{j}) outside {m}x{n}"
            )));
        }
        h.set_rel(0, i - 1, m + j - 1, true);
        h.set_rel(0, m + j - 1, i - 1, true);
    }
    Ok(h)
}

/// Reads (m, n, cells) back from a bipartite graph laid out with rows before columns.
pub fn bipartite_cells(h: &OrderedStructure) -> Result<Cells> {
    if h.sig() != &bipartite_signature() {
        return Err(Error::Signature(format!(
            "expected {}, got {}",
            bipartite_signature(),
            h.sig()
        )));
    }
    let m = (0..h.n())
        .take_while(|&v| h.has(0, v) && !h.has(1, v))
        .count();
    let n = h.n() - m;
    if (m..h.n()).any(|v| h.has(0, v) || !h.has(1, v)) {
        return Err(Error::InvalidParameter(
            "parts must be rows followed by columns".into(),
        ));
    }
    let mut cells = Vec::new();
    for a in 0..h.n() {
        for b in 0..h.n() {
            let expected = (a < m) != (b < m);
            if h.rel(0, a, b) && !expected {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a},{b}) inside a part"
                )));
            }
            if h.rel(0, a, b) != h.rel(0, b, a) {
                return Err(Error::InvalidParameter(
                    "edge relation not symmetric".into(),
                ));
            }
            if a < m && b >= m && h.rel(0, a, b) {
                cells.push((a + 1, b - m + 1));
            }
        }
    }
    Ok((m, n, cells))
}

/// Builder for the defining formulas of one scheme.
struct Defs {
    sc: GraphScheme,
    fresh: Fresh,
}

type F = Formula;

fn and(v: Vec<F>) -> F {
    F::And(v)
}

fn or(v: Vec<F>) -> F {
    F::Or(v)
}

fn not(f: F) -> F {
    F::not(f)
}

fn e(a: &str, b: &str) -> F {
    F::atom("E", &[a, b])
}

impl Defs {
    fn v(&mut self, base: &str) -> String {
        self.fresh.next(base)
    }

    fn min(&mut self, v: &str) -> F {
        let z = self.v("z");
        F::forall(&z, F::le(v, &z))
    }

    fn max(&mut self, v: &str) -> F {
        let z = self.v("z");
        F::forall(&z, F::le(&z, v))
    }

    fn succ(&mut self, a: &str, b: &str) -> F {
        let z = self.v("z");
        and(vec![
            F::lt(a, b),
            not(F::exists(&z, and(vec![F::lt(a, &z), F::lt(&z, b)]))),
        ])
    }

    fn ge_clique(&self) -> bool {
        self.sc.rtype == RType::Ge && self.sc.inner == InnerFlag::Clique
    }

    /// The corner (0,0).
    fn star(&mut self, v: &str) -> F {
        match self.sc.orient {
            Orient::First => self.min(v),
            Orient::Last => match (self.sc.rtype, self.sc.inner) {
                (RType::Eq | RType::Le, _) => {
                    let (r, y) = (self.v("r"), self.v("y"));
                    let r1 = self.r1(&r);
                    F::exists(
                        &r,
                        and(vec![
                            r1,
                            e(v, &r),
                            not(F::exists(&y, and(vec![F::lt(v, &y), e(&y, &r)]))),
                        ]),
                    )
                }
                (RType::Ne, _) => {
                    let (r, y) = (self.v("r"), self.v("y"));
                    let r1 = self.r1(&r);
                    F::exists(
                        &r,
                        and(vec![
                            r1,
                            not(F::eq(v, &r)),
                            not(e(v, &r)),
                            not(F::exists(&y, and(vec![F::lt(v, &y), not(e(&y, &r))]))),
                        ]),
                    )
                }
                (RType::Ge, InnerFlag::Independent) => {
                    let (l, p, y) = (self.v("l"), self.v("p"), self.v("y"));
                    let last = self.max(&l);
                    let succ = self.succ(&p, v);
                    F::exists(
                        &l,
                        F::exists(
                            &p,
                            and(vec![
                                last,
                                e(&p, &l),
                                not(F::exists(&y, and(vec![F::lt(&p, &y), e(&y, &l)]))),
                                succ,
                            ]),
                        ),
                    )
                }
                (RType::Ge, InnerFlag::Clique) => {
                    let w = self.v("w");
                    let here = self.star_candidate(v);
                    let earlier = self.star_candidate(&w);
                    and(vec![
                        here,
                        not(F::exists(&w, and(vec![F::lt(&w, v), earlier]))),
                    ])
                }
            },
        }
    }

    fn star_candidate(&mut self, v: &str) -> F {
        let (r, y) = (self.v("r"), self.v("y"));
        let r1 = self.r1(&r);
        and(vec![
            F::exists(&r, and(vec![r1, not(F::eq(v, &r)), e(v, &r)])),
            F::forall(&y, F::implies(F::lt(v, &y), e(v, &y))),
        ])
    }

    /// First element of the first interval after the corner.
    fn c1(&mut self, v: &str) -> F {
        let s = self.v("s");
        let st = self.star(&s);
        let succ = self.succ(&s, v);
        F::exists(&s, and(vec![st, succ]))
    }

    /// Representative of row 1.
    fn r1(&mut self, v: &str) -> F {
        match self.sc.orient {
            Orient::Last => self.min(v),
            Orient::First => {
                let w = self.v("w");
                let here = self.r1_candidate(v);
                let earlier = self.r1_candidate(&w);
                and(vec![
                    here,
                    not(F::exists(&w, and(vec![F::lt(&w, v), earlier]))),
                ])
            }
        }
    }

    fn r1_candidate(&mut self, v: &str) -> F {
        let (s, c) = (self.v("s"), self.v("c"));
        let st = self.star(&s);
        let c1 = self.c1(&c);
        if !self.ge_clique() {
            let pair_same = if self.sc.inner == InnerFlag::Clique {
                and(vec![e(&s, v), e(&c, v)])
            } else {
                and(vec![not(e(&s, v)), not(e(&c, v))])
            };
            return F::exists(
                &s,
                F::exists(&c, and(vec![st, c1, F::lt(&c, v), not(pair_same)])),
            );
        }
        let (y, y2, s3, w) = (self.v("y"), self.v("y"), self.v("s"), self.v("w"));
        let st3 = self.star(&s3);
        let succ = self.succ(v, &y2);
        let cand1 = and(vec![
            F::exists(&c, and(vec![c1, F::lt(&c, v)])),
            F::exists(
                &y,
                and(vec![
                    F::lt(v, &y),
                    F::exists(&s, and(vec![st, e(&s, &y)])),
                    not(e(v, &y)),
                ]),
            ),
        ]);
        let first_non_neighbour = and(vec![
            st3,
            not(F::eq(&y2, &s3)),
            not(e(&s3, &y2)),
            not(F::exists(
                &w,
                and(vec![F::lt(&w, &y2), not(F::eq(&w, &s3)), not(e(&s3, &w))]),
            )),
        ]);
        let cand2 = F::exists(&y2, and(vec![succ, F::exists(&s3, first_non_neighbour)]));
        let cand3 = self.max(v);
        or(vec![cand1, cand2, cand3])
    }

    /// Member of the first interval other than the corner.
    fn in_c(&mut self, v: &str) -> F {
        let s = self.v("s");
        let st = self.star(&s);
        match self.sc.orient {
            Orient::First => {
                let r = self.v("r");
                let r1 = self.r1(&r);
                F::exists(
                    &s,
                    F::exists(&r, and(vec![st, r1, F::lt(&s, v), F::lt(v, &r)])),
                )
            }
            Orient::Last => F::exists(&s, and(vec![st, F::lt(&s, v)])),
        }
    }

    /// Member of rows 1..m.
    fn rest(&mut self, v: &str) -> F {
        match self.sc.orient {
            Orient::First => {
                let r = self.v("r");
                let r1 = self.r1(&r);
                F::exists(&r, and(vec![r1, F::le(&r, v)]))
            }
            Orient::Last => {
                let s = self.v("s");
                let st = self.star(&s);
                F::exists(&s, and(vec![st, F::lt(v, &s)]))
            }
        }
    }

    fn rep(&mut self, v: &str) -> F {
        let rest = self.rest(v);
        let test = match self.sc.rtype {
            RType::Eq | RType::Ge => {
                let s = self.v("s");
                let st = self.star(&s);
                F::exists(&s, and(vec![st, e(&s, v)]))
            }
            RType::Ne => {
                let s = self.v("s");
                let st = self.star(&s);
                F::exists(&s, and(vec![st, not(e(&s, v))]))
            }
            RType::Le => {
                let c = self.v("c");
                let c1 = self.c1(&c);
                F::exists(&c, and(vec![c1, not(e(&c, v))]))
            }
        };
        and(vec![rest, test])
    }

    fn cell(&mut self, v: &str) -> F {
        let rest = self.rest(v);
        let rep = self.rep(v);
        and(vec![rest, not(rep)])
    }

    fn row_of(&mut self, r: &str, z: &str) -> F {
        let w = self.v("w");
        let rep = self.rep(r);
        let between = self.rep(&w);
        and(vec![
            rep,
            F::lt(r, z),
            not(F::exists(
                &w,
                and(vec![between, F::lt(r, &w), F::lt(&w, z)]),
            )),
        ])
    }

    fn col_of(&mut self, c: &str, z: &str) -> F {
        let in_c = self.in_c(c);
        let rule = match self.sc.rtype {
            RType::Eq => e(c, z),
            RType::Ne => not(e(c, z)),
            RType::Le | RType::Ge => {
                let w = self.v("w");
                let w_in = self.in_c(&w);
                let step = if self.sc.rtype == RType::Le {
                    self.succ(c, &w)
                } else {
                    self.succ(&w, c)
                };
                and(vec![
                    e(c, z),
                    not(F::exists(&w, and(vec![w_in, step, e(&w, z)]))),
                ])
            }
        };
        and(vec![in_c, rule])
    }

    fn link(&mut self, r: &str, c: &str) -> F {
        let z = self.v("z");
        let rep = self.rep(r);
        let in_c = self.in_c(c);
        let cell = self.cell(&z);
        let row = self.row_of(r, &z);
        let col = self.col_of(c, &z);
        and(vec![rep, in_c, F::exists(&z, and(vec![cell, row, col]))])
    }
}

/// The interpretation recovering the bipartite graph of S from `G^S`.
///
/// Rows are the representatives of rows 1..m, columns the non-corner points
/// of the first interval; the order formula puts rows before columns.
/// Schemes where `G^S` does not determine S have no such interpretation.
pub fn universal_interpretation(sc: GraphScheme) -> Result<Interpretation> {
    if !sc.gs_injective() {
        return Err(Error::UnsupportedScheme(format!(
            "{sc}: G^S does not determine S"
        )));
    }
    let mut d = Defs {
        sc,
        fresh: Fresh::avoiding([X.to_string(), Y.to_string()]),
    };
    let rx = d.rep(X);
    let cx = d.in_c(X);
    let domain = or(vec![rx.clone(), cx.clone()]);
    let ry = d.rep(Y);
    let cy = d.in_c(Y);
    let order = or(vec![
        and(vec![rx.clone(), cy.clone()]),
        and(vec![rx.clone(), ry, F::le(X, Y)]),
        and(vec![cx.clone(), cy, F::le(X, Y)]),
    ]);
    let edge = or(vec![d.link(X, Y), d.link(Y, X)]);
    Interpretation::new(
        Signature::graph(),
        bipartite_signature(),
        domain,
        Some(order),
        vec![edge, rx, cx],
    )
}

/// Reduces model checking of a sentence on a bipartite graph to model
/// checking on the graph `G^S` built from it.
pub fn mc_reduce(
    phi: &Formula,
    h: &OrderedStructure,
    sc: GraphScheme,
) -> Result<(Formula, OrderedStructure)> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(Error::Formula(format!(
            "sentence expected, free variables {free:?}"
        )));
    }
    let (m, n, cells) = bipartite_cells(h)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "both parts must be nonempty".into(),
        ));
    }
    let g = generate_gs(sc, m, n, &cells)?;
    let interp = universal_interpretation(sc)?;
    Ok((interp.pullback(phi)?, g))
}
