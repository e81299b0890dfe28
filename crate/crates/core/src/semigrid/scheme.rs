use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::OrderedStructure;

/// Relation type of the R-graphs between the first interval and every other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RType {
    Le,
    Ge,
    Eq,
    Ne,
}

impl RType {
    pub const ALL: [RType; 4] = [RType::Le, RType::Ge, RType::Eq, RType::Ne];

    pub fn holds(self, i: usize, j: usize) -> bool {
        match self {
            RType::Le => i <= j,
            RType::Ge => i >= j,
            RType::Eq => i == j,
            RType::Ne => i != j,
        }
    }

    fn token(self) -> &'static str {
        match self {
            RType::Le => "le",
            RType::Ge => "ge",
            RType::Eq => "eq",
            RType::Ne => "ne",
        }
    }
}

impl FromStr for RType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "le" | "<=" => Ok(RType::Le),
            "ge" | ">=" => Ok(RType::Ge),
            "eq" | "=" => Ok(RType::Eq),
            "ne" | "!=" => Ok(RType::Ne),
            _ => Err(Error::InvalidParameter(format!(
                "unknown relation type {s:?}"
            ))),
        }
    }
}

/// Position of the first interval: before all others (`First`, written `<`) or after them (`Last`, `>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orient {
    First,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InnerFlag {
    Clique,
    Independent,
}

/// Direction between two points of rows 1..m, taken from the smaller to the larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    /// Same row.
    Right,
    /// Same column.
    Down,
    /// Later row, later column.
    DownRight,
    /// Later row, earlier column.
    DownLeft,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Right, Dir::Down, Dir::DownRight, Dir::DownLeft];

    /// Direction for lexicographically ordered points `p < q`.
    pub fn of(p: (usize, usize), q: (usize, usize)) -> Dir {
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        if p.0 == q.0 {
            Dir::Right
        } else if p.1 == q.1 {
            Dir::Down
        } else if p.1 < q.1 {
            Dir::DownRight
        } else {
            Dir::DownLeft
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    fn token(self) -> &'static str {
        match self {
            Dir::Right => "r",
            Dir::Down => "d",
            Dir::DownRight => "dr",
            Dir::DownLeft => "dl",
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct DirSet(pub u8);

impl DirSet {
    pub fn contains(self, d: Dir) -> bool {
        self.0 & d.bit() != 0
    }

    pub fn with(self, d: Dir) -> DirSet {
        DirSet(self.0 | d.bit())
    }

    pub fn from_dirs(dirs: &[Dir]) -> DirSet {
        dirs.iter().fold(DirSet(0), |s, &d| s.with(d))
    }
}

/// Scheme of a regular semigrid over the graph signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphScheme {
    pub rtype: RType,
    pub orient: Orient,
    pub inner: InnerFlag,
    pub dirs: DirSet,
}

impl GraphScheme {
    pub fn new(rtype: RType, orient: Orient, inner: InnerFlag, dirs: DirSet) -> Self {
        GraphScheme {
            rtype,
            orient,
            inner,
            dirs,
        }
    }

    /// Canonical index: `((rtype·2 + orient)·2 + inner)·16 + dirs`, with the
    /// orders `le, ge, eq, ne`; `<, >`; `clique, independent`; and direction
    /// bits `r=1, d=2, dr=4, dl=8`.
    pub fn index(self) -> usize {
        (((self.rtype as usize) * 2 + self.orient as usize) * 2 + self.inner as usize) * 16
            + self.dirs.0 as usize
    }

    pub fn from_index(id: usize) -> Result<Self> {
        if id >= 256 {
            return Err(Error::InvalidParameter(format!(
                "scheme id {id} outside 0..256"
            )));
        }
        let dirs = DirSet((id % 16) as u8);
        let inner = if (id / 16).is_multiple_of(2) {
            InnerFlag::Clique
        } else {
            InnerFlag::Independent
        };
        let orient = if (id / 32).is_multiple_of(2) {
            Orient::First
        } else {
            Orient::Last
        };
        let rtype = RType::ALL[id / 64];
        Ok(GraphScheme {
            rtype,
            orient,
            inner,
            dirs,
        })
    }

    pub fn all() -> Vec<GraphScheme> {
        (0..256)
            .map(|i| GraphScheme::from_index(i).expect("in range"))
            .collect()
    }

    /// `G^S` maps distinct (m, n, S) to distinct graphs for this scheme.
    ///
    /// Fails exactly for type `ge` with a clique on the first interval and the
    /// down direction present: there the first column cannot be told apart from
    /// a row representative.
    pub fn gs_injective(self) -> bool {
        !(self.rtype == RType::Ge
            && self.inner == InnerFlag::Clique
            && self.dirs.contains(Dir::Down))
    }

    /// Adjacency between two distinct grid points.
    pub fn adjacent(self, p: (usize, usize), q: (usize, usize)) -> bool {
        match (p.0 == 0, q.0 == 0) {
            (true, true) => self.inner == InnerFlag::Clique,
            (true, false) => self.rtype.holds(p.1, q.1),
            (false, true) => self.rtype.holds(q.1, p.1),
            (false, false) => self.dirs.contains(Dir::of(p, q)),
        }
    }

    /// Points of the full m×n semigrid, in the order of the structure.
    pub fn points(self, m: usize, n: usize) -> Vec<(usize, usize)> {
        let first: Vec<(usize, usize)> = (0..=n).map(|j| (0, j)).collect();
        let rest = (1..=m).flat_map(|i| (0..=n).map(move |j| (i, j)));
        match self.orient {
            Orient::First => first.into_iter().chain(rest).collect(),
            Orient::Last => rest.chain(first).collect(),
        }
    }

    /// Points of `G^S`, in the order of the structure.
    pub fn gs_points(
        self,
        m: usize,
        n: usize,
        cells: &[(usize, usize)],
    ) -> Result<Vec<(usize, usize)>> {
        for &(i, j) in cells {
            if i == 0 || j == 0 || i > m || j > n {
                return Err(Error::InvalidParameter(format!(
                    "cell ({i},{j}) outside 1..={m} x 1..={n}"
                )));
            }
        }
        let cells: std::collections::HashSet<(usize, usize)> = cells.iter().copied().collect();
        Ok(self
            .points(m, n)
            .into_iter()
            .filter(|&(i, j)| i == 0 || j == 0 || cells.contains(&(i, j)))
            .collect())
    }

    pub fn graph_on(self, points: &[(usize, usize)]) -> OrderedStructure {
        OrderedStructure::graph_from_fn(points.len(), |a, b| self.adjacent(points[a], points[b]))
    }
}

impl fmt::Display for GraphScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.orient == Orient::First {
            "<"
        } else {
            ">"
        };
        let t = if self.inner == InnerFlag::Clique {
            "clique"
        } else {
            "independent"
        };
        let d: Vec<&str> = Dir::ALL
            .iter()
            .filter(|&&d| self.dirs.contains(d))
            .map(|d| d.token())
            .collect();
        write!(f, "{}/{}/{}/{{{}}}", self.rtype.token(), o, t, d.join(","))
    }
}

impl FromStr for GraphScheme {
    type Err = Error;

    /// Accepts a canonical index or the `rtype/orient/flag/{dirs}` form.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(id) = s.parse::<usize>() {
            return GraphScheme::from_index(id);
        }
        let bad = || Error::InvalidParameter(format!("cannot parse scheme {s:?}"));
        let parts: Vec<&str> = s.split('/').collect();
        let [r, o, t, d] = parts.as_slice() else {
            return Err(bad());
        };
        let rtype: RType = r.parse()?;
        let orient = match *o {
            "<" => Orient::First,
            ">" => Orient::Last,
            _ => return Err(bad()),
        };
        let inner = match *t {
            "clique" => InnerFlag::Clique,
            "independent" => InnerFlag::Independent,
            _ => return Err(bad()),
        };
        let d = d
            .strip_prefix('{')
            .and_then(|d| d.strip_suffix('}'))
            .ok_or_else(bad)?;
        let mut dirs = DirSet(0);
        for tok in d.split(',').filter(|x| !x.is_empty()) {
            let dir = Dir::ALL.iter().find(|x| x.token() == tok).ok_or_else(bad)?;
            dirs = dirs.with(*dir);
        }
        Ok(GraphScheme {
            rtype,
            orient,
            inner,
            dirs,
        })
    }
}

/// Full regular m×n semigrid of a graph scheme.
pub fn generate_semigrid(scheme: GraphScheme, m: usize, n: usize) -> Result<OrderedStructure> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("semigrids need m, n >= 1".into()));
    }
    Ok(scheme.graph_on(&scheme.points(m, n)))
}

/// The graph `G^S`: the semigrid induced on the corner, the first row and
/// column, and the cells of `S` (1-based, within 1..=m × 1..=n).
pub fn generate_gs(
    scheme: GraphScheme,
    m: usize,
    n: usize,
    cells: &[(usize, usize)],
) -> Result<OrderedStructure> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("semigrids need m, n >= 1".into()));
    }
    Ok(scheme.graph_on(&scheme.gs_points(m, n, cells)?))
}

/// Whether the i-th element of `x` and the j-th element of `y` are adjacent exactly when `i R j`.
pub fn is_r_graph(s: &OrderedStructure, x: &[usize], y: &[usize], r: RType) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "sides of sizes {} and {}",
            x.len(),
            y.len()
        )));
    }
    for &v in x.iter().chain(y.iter()) {
        if v >= s.n() {
            return Err(Error::IndexOutOfRange { index: v, n: s.n() });
        }
    }
    Ok(x.iter().enumerate().all(|(i, &a)| {
        y.iter()
            .enumerate()
            .all(|(j, &b)| s.edge(a, b) == r.holds(i, j))
    }))
}

/// Dimensions and cell list (m, n, S).
pub type Cells = (usize, usize, Vec<(usize, usize)>);

/// Recovers (m, n, S) from `G^S` by walking the structure.
///
/// The first interval, the row representatives and the cell coordinates are
/// located by local adjacency rules; the answer is then confirmed by
/// regenerating `G^S`. For the schemes where `G^S` is not injective every
/// split point is tried and the first consistent one is returned.
pub fn decode_gs(g: &OrderedStructure, scheme: GraphScheme) -> Result<Cells> {
    if !g.sig().is_graph() {
        return Err(Error::Decode("not an ordered graph".into()));
    }
    let total = g.n();
    if total < 3 {
        return Err(Error::Decode(format!(
            "{total} vertices cannot hold a corner, a column and a row"
        )));
    }
    match first_interval_size(g, scheme)? {
        Some(n) => {
            let (m, cells) = decode_with(g, scheme, n)?;
            if generate_gs(scheme, m, n, &cells)? != *g {
                return Err(Error::Decode(
                    "regenerated graph differs from the input".into(),
                ));
            }
            Ok((m, n, cells))
        }
        None => {
            for n in 1..=total - 2 {
                if let Ok((m, cells)) = decode_with(g, scheme, n) {
                    if generate_gs(scheme, m, n, &cells)? == *g {
                        return Ok((m, n, cells));
                    }
                }
            }
            Err(Error::Decode(
                "no split of the first interval regenerates the input".into(),
            ))
        }
    }
}

/// Number n of column vertices, or `None` when the scheme does not determine it locally.
fn first_interval_size(g: &OrderedStructure, sc: GraphScheme) -> Result<Option<usize>> {
    let total = g.n();
    let e = |a: usize, b: usize| g.edge(a, b);
    let clique = sc.inner == InnerFlag::Clique;
    let ge_clique = sc.rtype == RType::Ge && clique;
    if ge_clique && sc.dirs.contains(Dir::Down) {
        return Ok(None);
    }
    match sc.orient {
        Orient::First => {
            let r1 = if ge_clique {
                let cand1 = (2..total).find(|&x| (x + 1..total).any(|y| e(0, y) && !e(x, y)));
                let cand2 = (1..total).find(|&y| !e(0, y)).map(|y| y - 1);
                [cand1, cand2, Some(total - 1)].into_iter().flatten().min()
            } else {
                (2..total).find(|&x| (e(0, x), e(1, x)) != (clique, clique))
            };
            match r1 {
                Some(r) if r >= 2 => Ok(Some(r - 1)),
                _ => Err(Error::Decode(
                    "no row representative after the first interval".into(),
                )),
            }
        }
        Orient::Last => {
            let star = match (sc.rtype, clique) {
                (RType::Eq | RType::Le, _) => (1..total).rev().find(|&x| e(x, 0)),
                (RType::Ne, _) => (1..total).rev().find(|&x| !e(x, 0)),
                (RType::Ge, false) => {
                    let last = total - 1;
                    (0..total).rev().find(|&x| e(x, last)).map(|x| x + 1)
                }
                (RType::Ge, true) => {
                    (1..total).find(|&x| e(x, 0) && (x + 1..total).all(|y| e(x, y)))
                }
            };
            match star {
                Some(s) if s + 1 < total => Ok(Some(total - 1 - s)),
                _ => Err(Error::Decode("corner vertex not found".into())),
            }
        }
    }
}

fn decode_with(
    g: &OrderedStructure,
    sc: GraphScheme,
    n: usize,
) -> Result<(usize, Vec<(usize, usize)>)> {
    let total = g.n();
    if n == 0 || n + 2 > total {
        return Err(Error::Decode(format!(
            "first interval of size {n} does not fit"
        )));
    }
    let (star, cols, rest): (usize, Vec<usize>, Vec<usize>) = match sc.orient {
        Orient::First => (0, (1..=n).collect(), (n + 1..total).collect()),
        Orient::Last => {
            let s = total - n - 1;
            (s, (s + 1..total).collect(), (0..s).collect())
        }
    };
    let c1 = cols[0];
    let e = |a: usize, b: usize| g.edge(a, b);
    let is_rep = |x: usize| match sc.rtype {
        RType::Eq | RType::Ge => e(star, x),
        RType::Le => !e(c1, x),
        RType::Ne => !e(star, x),
    };
    let mut m = 0;
    let mut cells = Vec::new();
    for &x in &rest {
        if is_rep(x) {
            m += 1;
            continue;
        }
        if m == 0 {
            return Err(Error::Decode(format!(
                "vertex {x} precedes every row representative"
            )));
        }
        let adj: Vec<usize> = (1..=n).filter(|&a| e(cols[a - 1], x)).collect();
        let beta = match sc.rtype {
            RType::Eq => (adj.len() == 1).then(|| adj[0]),
            RType::Ne => {
                (adj.len() + 1 == n).then(|| (1..=n).find(|a| !adj.contains(a)).unwrap_or(0))
            }
            RType::Le => (!adj.is_empty() && adj.iter().enumerate().all(|(i, &a)| a == i + 1))
                .then_some(adj.len()),
            RType::Ge => (!adj.is_empty()
                && adj
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| a == n - adj.len() + 1 + i))
            .then(|| n - adj.len() + 1),
        };
        match beta {
            Some(b) if b >= 1 => cells.push((m, b)),
            _ => {
                return Err(Error::Decode(format!(
                    "vertex {x} has no consistent column"
                )))
            }
        }
    }
    if m == 0 {
        return Err(Error::Decode("no row representative found".into()));
    }
    Ok((m, cells))
}

/// Reads a graph scheme off a structure laid out as an m×n semigrid with the given orientation.
pub(crate) fn classify_graph_as(
    g: &OrderedStructure,
    m: usize,
    n: usize,
    orient: Orient,
) -> Option<GraphScheme> {
    let probe = GraphScheme::new(RType::Eq, orient, InnerFlag::Clique, DirSet(0));
    let points = probe.points(m, n);
    let pos: std::collections::HashMap<(usize, usize), usize> =
        points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let e = |p: (usize, usize), q: (usize, usize)| g.edge(pos[&p], pos[&q]);
    let inner = if e((0, 0), (0, 1)) {
        InnerFlag::Clique
    } else {
        InnerFlag::Independent
    };
    let mut rel = [false; 3];
    for a in 0..=n {
        for b in 0..=n {
            if e((0, a), (1, b)) {
                rel[(a.cmp(&b) as i32 + 1) as usize] = true;
            }
        }
    }
    let rtype = match rel {
        [true, true, false] => RType::Le,
        [false, true, true] => RType::Ge,
        [false, true, false] => RType::Eq,
        [true, false, true] => RType::Ne,
        _ => return None,
    };
    let mut dirs = DirSet(0);
    let reps = [
        (Dir::Right, (1, 0), (1, 1)),
        (Dir::Down, (1, 0), (2, 0)),
        (Dir::DownRight, (1, 0), (2, 1)),
        (Dir::DownLeft, (1, 1), (2, 0)),
    ];
    for (d, p, q) in reps {
        if q.0 <= m && e(p, q) {
            dirs = dirs.with(d);
        }
    }
    let sc = GraphScheme {
        rtype,
        orient,
        inner,
        dirs,
    };
    (sc.graph_on(&points) == *g).then_some(sc)
}
