use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::scheme::{Dir, GraphScheme, InnerFlag, Orient};
use crate::error::{Error, Result};
use crate::structure::{AtomicTypeCode, OrderRel, OrderedStructure, Signature};

const SLOTS: usize = 15;
const FRAME: usize = 0;
const INNER: usize = 3;
const CROSS: usize = 12;

/// Scheme of a regular semigrid over an arbitrary binary signature.
///
/// `frame[o]` is the type of two points of row 0 whose columns compare as `o`;
/// `inner[3r + c]` the type of two points of rows 1..m whose rows compare as
/// `r` and columns as `c`; `cross[o]` the type of (p, b) for p outside row 0
/// and b in row 0, where o compares the column of p with the column of b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneralScheme {
    pub orient: Orient,
    pub frame: [AtomicTypeCode; 3],
    pub inner: [AtomicTypeCode; 9],
    pub cross: [AtomicTypeCode; 3],
}

/// Slot of the ordered pair of grid points (p, q), and whether the stored type is that of (q, p).
fn slot_of(p: (usize, usize), q: (usize, usize)) -> (usize, bool) {
    let c = |a: usize, b: usize| OrderRel::of(a, b).index();
    match (p.0 == 0, q.0 == 0) {
        (true, true) => (FRAME + c(p.1, q.1), false),
        (false, false) => (INNER + 3 * c(p.0, q.0) + c(p.1, q.1), false),
        (false, true) => (CROSS + c(p.1, q.1), false),
        (true, false) => (CROSS + c(q.1, p.1), true),
    }
}

/// Grid points (row, column) in the order of the structure: lexicographic for
/// `First`, reversed for `Last`.
pub fn general_points(orient: Orient, m: usize, n: usize) -> Vec<(usize, usize)> {
    let mut pts: Vec<(usize, usize)> = (0..=m).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
    if orient == Orient::Last {
        pts.reverse();
    }
    pts
}

fn oriented(orient: Orient, o: OrderRel) -> OrderRel {
    match orient {
        Orient::First => o,
        Orient::Last => o.flip(),
    }
}

fn lex(r: OrderRel, c: OrderRel) -> OrderRel {
    if r == OrderRel::Equal {
        c
    } else {
        r
    }
}

impl GeneralScheme {
    fn slots(&self) -> [AtomicTypeCode; SLOTS] {
        let mut out = [AtomicTypeCode(0); SLOTS];
        out[FRAME..INNER].copy_from_slice(&self.frame);
        out[INNER..CROSS].copy_from_slice(&self.inner);
        out[CROSS..].copy_from_slice(&self.cross);
        out
    }

    fn from_slots(orient: Orient, s: &[AtomicTypeCode; SLOTS]) -> Self {
        let mut g = GeneralScheme {
            orient,
            frame: [AtomicTypeCode(0); 3],
            inner: [AtomicTypeCode(0); 9],
            cross: [AtomicTypeCode(0); 3],
        };
        g.frame.copy_from_slice(&s[FRAME..INNER]);
        g.inner.copy_from_slice(&s[INNER..CROSS]);
        g.cross.copy_from_slice(&s[CROSS..]);
        g
    }

    /// Expected order relation stored in each slot.
    fn slot_order(orient: Orient, slot: usize) -> OrderRel {
        let o = match slot {
            s if s < INNER => OrderRel::ALL[s - FRAME],
            s if s < CROSS => {
                let k = s - INNER;
                lex(OrderRel::ALL[k / 3], OrderRel::ALL[k % 3])
            }
            _ => OrderRel::Greater,
        };
        oriented(orient, o)
    }

    /// Checks the consistency conditions: order flags match the orientation,
    /// reversed pairs carry reversed types, diagonal types are equal-typed,
    /// unary bits agree across slots and the cross types are not constant.
    pub fn check(&self, sig: &Signature) -> std::result::Result<(), String> {
        let nb = sig.binary_count();
        let nu = sig.unary_count();
        let width = 2 + 2 * (nb + nu);
        let slots = self.slots();
        for (i, code) in slots.iter().enumerate() {
            if width < 64 && code.0 >> width != 0 {
                return Err(format!("slot {i} uses bits outside the signature"));
            }
            if code.0 & 3 == 3 {
                return Err(format!("slot {i} has an invalid order field"));
            }
            if code.order() != Self::slot_order(self.orient, i) {
                return Err(format!("slot {i} has order {:?}", code.order()));
            }
        }
        if self.frame[2] != self.frame[0].reversed() || self.frame[1] != self.frame[1].reversed() {
            return Err("row 0 types are not reversal consistent".into());
        }
        for r in 0..3 {
            for c in 0..3 {
                if self.inner[3 * r + c] != self.inner[3 * (2 - r) + (2 - c)].reversed() {
                    return Err(format!("inner types {r},{c} are not reversal consistent"));
                }
            }
        }
        let ub: Vec<bool> = (0..nu).map(|u| self.frame[1].unary(nb, u).0).collect();
        let uc: Vec<bool> = (0..nu).map(|u| self.inner[4].unary(nb, u).0).collect();
        for u in 0..nu {
            let (b, c) = (ub[u], uc[u]);
            if self.frame.iter().any(|t| t.unary(nb, u) != (b, b)) {
                return Err(format!("unary symbol {u} varies on row 0"));
            }
            if self.inner.iter().any(|t| t.unary(nb, u) != (c, c)) {
                return Err(format!("unary symbol {u} varies outside row 0"));
            }
            if self.cross.iter().any(|t| t.unary(nb, u) != (c, b)) {
                return Err(format!("unary symbol {u} inconsistent on cross types"));
            }
        }
        if self.cross[0] == self.cross[1] && self.cross[1] == self.cross[2] {
            return Err("cross types are constant".into());
        }
        Ok(())
    }

    pub fn is_consistent(&self, sig: &Signature) -> bool {
        self.check(sig).is_ok()
    }

    /// The regular m×n semigrid of this scheme over `sig`.
    pub fn generate(&self, sig: &Signature, m: usize, n: usize) -> Result<OrderedStructure> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("semigrids need m, n >= 1".into()));
        }
        self.check(sig).map_err(Error::InvalidParameter)?;
        let pts = general_points(self.orient, m, n);
        let slots = self.slots();
        let nb = sig.binary_count();
        let mut s = OrderedStructure::new(sig.clone(), pts.len());
        for (a, &p) in pts.iter().enumerate() {
            for (b, &q) in pts.iter().enumerate() {
                let (slot, rev) = slot_of(p, q);
                let code = if rev {
                    slots[slot].reversed()
                } else {
                    slots[slot]
                };
                for r in 0..nb {
                    s.set_rel(r, a, b, code.binary(r).0);
                }
                if a == b {
                    for u in 0..sig.unary_count() {
                        s.set_unary(u, a, code.unary(nb, u).0);
                    }
                }
            }
        }
        Ok(s)
    }

    /// The same semigrid family expressed as a general scheme over the graph signature.
    ///
    /// For `>` the grid is read with rows and columns reversed, which turns
    /// the ascending rows into the inverse lexicographic order.
    pub fn from_graph(sc: GraphScheme) -> Self {
        let order = |o: OrderRel| oriented(sc.orient, o);
        let code = |o: OrderRel, e: bool| AtomicTypeCode::new(order(o), &[(e, e)], &[]);
        let clique = sc.inner == InnerFlag::Clique;
        let frame = [
            code(OrderRel::Less, clique),
            code(OrderRel::Equal, false),
            code(OrderRel::Greater, clique),
        ];
        let mut inner = [AtomicTypeCode(0); 9];
        for (ri, &r) in OrderRel::ALL.iter().enumerate() {
            for (ci, &c) in OrderRel::ALL.iter().enumerate() {
                let e = match (r, c) {
                    (OrderRel::Equal, OrderRel::Equal) => false,
                    (OrderRel::Equal, _) => sc.dirs.contains(Dir::Right),
                    (_, OrderRel::Equal) => sc.dirs.contains(Dir::Down),
                    _ if r == c => sc.dirs.contains(Dir::DownRight),
                    _ => sc.dirs.contains(Dir::DownLeft),
                };
                inner[3 * ri + ci] = code(lex(r, c), e);
            }
        }
        let mut cross = [AtomicTypeCode(0); 3];
        for (i, &o) in OrderRel::ALL.iter().enumerate() {
            // o compares the column of the row point with the column of the row-0 point
            let (a, beta) = match (sc.orient, o) {
                (Orient::First, OrderRel::Less) | (Orient::Last, OrderRel::Greater) => (1, 0),
                (_, OrderRel::Equal) => (0, 0),
                _ => (0, 1),
            };
            cross[i] = code(OrderRel::Greater, sc.rtype.holds(a, beta));
        }
        GeneralScheme {
            orient: sc.orient,
            frame,
            inner,
            cross,
        }
    }
}

/// Number of consistent general schemes over `sig`.
pub fn general_scheme_count(sig: &Signature) -> BigUint {
    let nb = sig.binary_count() as u32;
    let nu = sig.unary_count() as u32;
    let four = BigUint::from(4u32);
    let two = BigUint::from(2u32);
    let cross = four.pow(3 * nb) - four.pow(nb);
    two.clone() * four.pow(nb) * two.pow(nb + nu) * two.pow(nb + nu) * four.pow(4 * nb) * cross
}

/// Lazily enumerates the consistent general schemes over `sig`.
pub fn general_schemes(sig: &Signature) -> Result<impl Iterator<Item = GeneralScheme>> {
    let nb = sig.binary_count();
    let nu = sig.unary_count();
    let bits = 1 + 18 * nb + 2 * nu;
    if bits > 63 {
        return Err(Error::InvalidParameter(format!(
            "signature {sig} has too many schemes to enumerate"
        )));
    }
    let sig = sig.clone();
    Ok((0u64..1u64 << bits).filter_map(move |idx| {
        let sc = decode_index(idx, nb, nu);
        sc.is_consistent(&sig).then_some(sc)
    }))
}

/// The scheme at position `rank` of [`general_schemes`], without enumerating its predecessors.
pub fn general_scheme_at(sig: &Signature, rank: u64) -> Result<Option<GeneralScheme>> {
    let nb = sig.binary_count();
    let nu = sig.unary_count();
    let bits = 1 + 18 * nb + 2 * nu;
    if bits > 63 {
        return Err(Error::InvalidParameter(format!(
            "signature {sig} has too many schemes to enumerate"
        )));
    }
    let low_bits = bits - 6 * nb;
    let cross_rank = rank >> low_bits;
    let period = 1 + (1u64 << (2 * nb)) + (1u64 << (4 * nb));
    let constants_upto = |v: u64| (v / period + 1).min(1 << (2 * nb));
    let mut v = cross_rank;
    loop {
        let next = cross_rank + constants_upto(v);
        if next == v {
            break;
        }
        v = next;
    }
    if v >> (6 * nb) != 0 {
        return Ok(None);
    }
    Ok(Some(decode_index(
        (v << low_bits) | (rank & ((1u64 << low_bits) - 1)),
        nb,
        nu,
    )))
}

fn decode_index(mut idx: u64, nb: usize, nu: usize) -> GeneralScheme {
    let mut take = |k: usize| {
        let v = idx & ((1u64 << k) - 1);
        idx >>= k;
        v
    };
    let orient = if take(1) == 0 {
        Orient::First
    } else {
        Orient::Last
    };
    let pairs = |v: u64, k: usize| -> Vec<(bool, bool)> {
        (0..k)
            .map(|i| (v >> (2 * i) & 1 == 1, v >> (2 * i + 1) & 1 == 1))
            .collect()
    };
    let frame_lo = pairs(take(2 * nb), nb);
    let b_loops = take(nb);
    let b_unary = take(nu);
    let c_loops = take(nb);
    let c_unary = take(nu);
    let free_inner: Vec<Vec<(bool, bool)>> = (0..4).map(|_| pairs(take(2 * nb), nb)).collect();
    let cross_bin: Vec<Vec<(bool, bool)>> = (0..3).map(|_| pairs(take(2 * nb), nb)).collect();

    let bits = |v: u64, k: usize| -> Vec<bool> { (0..k).map(|i| v >> i & 1 == 1).collect() };
    let ub = bits(b_unary, nu);
    let uc = bits(c_unary, nu);
    let same = |u: &[bool]| -> Vec<(bool, bool)> { u.iter().map(|&x| (x, x)).collect() };
    let diag = |l: u64| -> Vec<(bool, bool)> { bits(l, nb).into_iter().map(|x| (x, x)).collect() };
    let ord = |o: OrderRel| oriented(orient, o);

    let f0 = AtomicTypeCode::new(ord(OrderRel::Less), &frame_lo, &same(&ub));
    let frame = [
        f0,
        AtomicTypeCode::new(ord(OrderRel::Equal), &diag(b_loops), &same(&ub)),
        f0.reversed(),
    ];
    let mut inner = [AtomicTypeCode(0); 9];
    for (k, bin) in free_inner.iter().enumerate() {
        let (r, c) = (k / 3, k % 3);
        let code = AtomicTypeCode::new(
            ord(lex(OrderRel::ALL[r], OrderRel::ALL[c])),
            bin,
            &same(&uc),
        );
        inner[k] = code;
        inner[8 - k] = code.reversed();
    }
    inner[4] = AtomicTypeCode::new(ord(OrderRel::Equal), &diag(c_loops), &same(&uc));
    let cu: Vec<(bool, bool)> = uc.iter().zip(ub.iter()).map(|(&c, &b)| (c, b)).collect();
    let mut cross = [AtomicTypeCode(0); 3];
    for (o, bin) in cross_bin.iter().enumerate() {
        cross[o] = AtomicTypeCode::new(ord(OrderRel::Greater), bin, &cu);
    }
    GeneralScheme {
        orient,
        frame,
        inner,
        cross,
    }
}

/// Partially known slot types, filled while reading a structure.
#[derive(Clone, Copy)]
struct Partial([Option<AtomicTypeCode>; SLOTS]);

impl Partial {
    fn new() -> Self {
        Partial([None; SLOTS])
    }

    fn record(&mut self, p: (usize, usize), q: (usize, usize), code: AtomicTypeCode) -> bool {
        let (slot, rev) = slot_of(p, q);
        let code = if rev { code.reversed() } else { code };
        match self.0[slot] {
            Some(c) => c == code,
            None => {
                self.0[slot] = Some(code);
                true
            }
        }
    }

    /// Fills unobserved slots with empty relations and checks consistency.
    fn complete(&self, orient: Orient, sig: &Signature) -> Option<GeneralScheme> {
        let nb = sig.binary_count();
        let nu = sig.unary_count();
        let uc: Vec<(bool, bool)> = match self.0[INNER + 4] {
            Some(d) => (0..nu).map(|u| d.unary(nb, u)).collect(),
            None => vec![(false, false); nu],
        };
        let mut slots = [AtomicTypeCode(0); SLOTS];
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = match self.0[i] {
                Some(c) => c,
                None => AtomicTypeCode::new(
                    GeneralScheme::slot_order(orient, i),
                    &vec![(false, false); nb],
                    &uc,
                ),
            };
        }
        let sc = GeneralScheme::from_slots(orient, &slots);
        sc.is_consistent(sig).then_some(sc)
    }
}

/// Reads a general scheme off a structure laid out as an m×n semigrid.
pub(crate) fn classify_general_as(
    s: &OrderedStructure,
    m: usize,
    n: usize,
    orient: Orient,
) -> Option<GeneralScheme> {
    let pts = general_points(orient, m, n);
    if pts.len() != s.n() {
        return None;
    }
    let mut part = Partial::new();
    for (a, &p) in pts.iter().enumerate() {
        for (b, &q) in pts.iter().enumerate() {
            if !part.record(p, q, s.atp_unchecked(a, b)) {
                return None;
            }
        }
    }
    part.complete(orient, s.sig())
}

/// Classifies `s` as a regular semigrid over its own signature.
pub fn classify_general(s: &OrderedStructure) -> Option<(GeneralScheme, usize, usize)> {
    let total = s.n();
    for m in 1..total {
        if !total.is_multiple_of(m + 1) || total / (m + 1) < 2 {
            continue;
        }
        let n = total / (m + 1) - 1;
        for orient in [Orient::First, Orient::Last] {
            if let Some(sc) = classify_general_as(s, m, n, orient) {
                return Some((sc, m, n));
            }
        }
    }
    None
}

/// An occurrence of a regular semigrid inside a larger structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub scheme: GeneralScheme,
    pub m: usize,
    pub n: usize,
    /// Host elements in increasing order, one per grid point in structure order.
    pub elems: Vec<usize>,
}

/// Lexicographically least set of elements of `s` inducing a regular m×n semigrid.
pub fn find_embedding(s: &OrderedStructure, m: usize, n: usize) -> Option<Embedding> {
    if m == 0 || n == 0 {
        return None;
    }
    [Orient::First, Orient::Last]
        .into_iter()
        .filter_map(|o| embed_oriented(s, m, n, o))
        .min_by(|a, b| a.elems.cmp(&b.elems))
}

fn embed_oriented(s: &OrderedStructure, m: usize, n: usize, orient: Orient) -> Option<Embedding> {
    let pts = general_points(orient, m, n);
    if pts.len() > s.n() {
        return None;
    }
    let mut chosen = Vec::with_capacity(pts.len());
    let sc = embed_rec(s, &pts, orient, &mut chosen, Partial::new())?;
    Some(Embedding {
        scheme: sc,
        m,
        n,
        elems: chosen,
    })
}

fn embed_rec(
    s: &OrderedStructure,
    pts: &[(usize, usize)],
    orient: Orient,
    chosen: &mut Vec<usize>,
    part: Partial,
) -> Option<GeneralScheme> {
    let k = chosen.len();
    if k == pts.len() {
        return part.complete(orient, s.sig());
    }
    let lo = chosen.last().map_or(0, |&v| v + 1);
    let hi = s.n() - (pts.len() - k);
    for v in lo..=hi {
        let mut next = part;
        let p = pts[k];
        let mut ok = next.record(p, p, s.atp_unchecked(v, v));
        for (j, &w) in chosen.iter().enumerate() {
            if !ok {
                break;
            }
            ok = next.record(pts[j], p, s.atp_unchecked(w, v))
                && next.record(p, pts[j], s.atp_unchecked(v, w));
        }
        if !ok {
            continue;
        }
        chosen.push(v);
        if let Some(sc) = embed_rec(s, pts, orient, chosen, next) {
            return Some(sc);
        }
        chosen.pop();
    }
    None
}
