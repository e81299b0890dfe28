use std::collections::HashMap;

use super::classify_regular_semigrid;
use super::general::classify_general;
use super::ramsey::{homogenize_grid, PairColoring};
use super::scheme::{classify_graph_as, GraphScheme, Orient};
use crate::error::{Error, Result};
use crate::logic::{Formula, GridDefinition, Interpretation, X, Y};
use crate::structure::{OrderedStructure, Signature};

/// Grid with A and B sorted and the bijection tabulated.
struct Tabulated {
    g: GridDefinition,
    alpha: Vec<usize>,
}

fn tabulate(s: &OrderedStructure, g: &GridDefinition) -> Result<Tabulated> {
    let mut g = g.clone();
    g.a.sort();
    g.b.sort();
    let budget = g.phi.quantifier_depth();
    let alpha = g
        .bijection(s, budget)?
        .ok_or_else(|| Error::Grid("formula does not define a grid on (A, B, C)".into()))?;
    Ok(Tabulated { g, alpha })
}

/// Restricts a defined grid to an m×n subgrid on which the atomic type of
/// (a, b, a', b', α(a,b), α(a',b')) depends only on how the two points compare.
pub fn homogenize_defined_grid(
    s: &OrderedStructure,
    g: &GridDefinition,
    m: usize,
    n: usize,
) -> Result<Option<GridDefinition>> {
    let t = tabulate(s, g)?;
    let (rows, cols) = (t.g.m(), t.g.n());
    let mut palette: HashMap<Vec<u64>, u32> = HashMap::new();
    let coloring = PairColoring::from_fn(rows, cols, |p, q| {
        let tuple: Vec<usize> = t.g.a[p.0]
            .iter()
            .chain(&t.g.b[p.1])
            .chain(&t.g.a[q.0])
            .chain(&t.g.b[q.1])
            .copied()
            .chain([t.alpha[p.0 * cols + p.1], t.alpha[q.0 * cols + q.1]])
            .collect();
        let key: Vec<u64> = tuple
            .iter()
            .flat_map(|&u| tuple.iter().map(move |&v| (u, v)))
            .map(|(u, v)| s.atp_unchecked(u, v).0)
            .collect();
        let next = palette.len() as u32;
        *palette.entry(key).or_insert(next)
    });
    let Some(sub) = homogenize_grid(&coloring, m, n)? else {
        return Ok(None);
    };
    let mut out = t.g.clone();
    out.a = sub.rows.iter().map(|&i| t.g.a[i].clone()).collect();
    out.b = sub.cols.iter().map(|&j| t.g.b[j].clone()).collect();
    out.c = sub
        .rows
        .iter()
        .flat_map(|&i| sub.cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| t.alpha[i * cols + j])
        .collect();
    out.c.sort_unstable();
    Ok(Some(out))
}

/// Extracts a regular semigrid from a homogeneous grid defined by a quantifier-free formula.
///
/// The order on C is matched against the eight lexicographic orders; with the
/// dominant side called A, a variable y of the other side separating two of
/// its tuples at a point of C is chosen, and the result is the substructure
/// induced by C together with the y-components of B.
pub fn extract_semigrid_from_grid(
    s: &OrderedStructure,
    g: &GridDefinition,
) -> Result<OrderedStructure> {
    if !g.phi.is_quantifier_free() {
        return Err(Error::Grid("grid formula must be quantifier-free".into()));
    }
    let t = tabulate(s, g)?;
    let (m, n) = (t.g.m(), t.g.n());
    if m < 2 || n < 2 {
        return Err(Error::Grid(format!(
            "a {m}x{n} grid is below the minimum 2x2"
        )));
    }
    let mut cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    cells.sort_by_key(|&(i, j)| t.alpha[i * n + j]);
    let a_first = [false, true]
        .into_iter()
        .flat_map(|ra| {
            [false, true]
                .into_iter()
                .flat_map(move |rb| [true, false].into_iter().map(move |af| (af, ra, rb)))
        })
        .find(|&(af, ra, rb)| {
            let key = |&(i, j): &(usize, usize)| {
                let i = if ra { m - 1 - i } else { i };
                let j = if rb { n - 1 - j } else { j };
                if af {
                    (i, j)
                } else {
                    (j, i)
                }
            };
            cells.windows(2).all(|w| key(&w[0]) < key(&w[1]))
        })
        .map(|(af, _, _)| af)
        .ok_or_else(|| Error::Grid("order on C matches no lexicographic order".into()))?;
    let b_side = if a_first { &t.g.b } else { &t.g.a };
    let c = t.alpha[0];
    let (b, b2) = (&b_side[0], &b_side[1]);
    let y = (0..b.len())
        .find(|&k| s.atp_unchecked(b[k], c) != s.atp_unchecked(b2[k], c))
        .ok_or_else(|| Error::Grid("no variable separates two columns".into()))?;
    let mut elems: Vec<usize> =
        t.g.c
            .iter()
            .copied()
            .chain(b_side.iter().map(|tup| tup[y]))
            .collect();
    elems.sort_unstable();
    elems.dedup();
    if elems.len() != t.g.c.len() + b_side.len() {
        return Err(Error::Grid(
            "projected column elements collide with the grid".into(),
        ));
    }
    let out = s.induced(&elems)?;
    classify_regular_semigrid(&out).ok_or(Error::NotSemigrid)?;
    Ok(out)
}

/// Maps a regular semigrid over any binary signature to a regular semigrid
/// over the graph signature of the same dimensions: x and y are adjacent when
/// (x, y) or (y, x) realizes the cross type of a point and its own column.
pub fn semigrid_to_graph(s: &OrderedStructure) -> Result<OrderedStructure> {
    let (sc, m, n) = classify_general(s).ok_or(Error::NotSemigrid)?;
    let tau = sc.cross[crate::structure::OrderRel::Equal.index()];
    let edge = Formula::Or(vec![
        Formula::atomic_type(s.sig(), tau, X, Y),
        Formula::atomic_type(s.sig(), tau, Y, X),
    ]);
    let interp = Interpretation::new(
        s.sig().clone(),
        Signature::graph(),
        Formula::True,
        None,
        vec![edge],
    )?;
    let g = interp.apply(s, 0)?;
    let ok = [Orient::First, Orient::Last]
        .into_iter()
        .any(|o| classify_graph_as(&g, m, n, o).is_some());
    if !ok {
        return Err(Error::NotSemigrid);
    }
    Ok(g)
}

/// Graph scheme of a graph semigrid of the given dimensions, if it is one.
pub fn graph_scheme_of(g: &OrderedStructure, m: usize, n: usize) -> Option<GraphScheme> {
    if !g.sig().is_graph() {
        return None;
    }
    [Orient::First, Orient::Last]
        .into_iter()
        .find_map(|o| classify_graph_as(g, m, n, o))
}
