use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the implicit order symbol. It is never listed in a [`Signature`].
pub const ORDER_SYMBOL: &str = "<=";

const MAX_SYMBOLS: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: u8,
}

/// Relational signature with symbols of arity one or two. The order is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, u8)>) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols
            .into_iter()
            .map(|(name, arity)| Symbol {
                name: name.into(),
                arity,
            })
            .collect();
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.arity != 1 && s.arity != 2 {
                return Err(Error::Signature(format!(
                    "symbol {} has arity {}",
                    s.name, s.arity
                )));
            }
            if s.name == ORDER_SYMBOL || s.name == "=" {
                return Err(Error::Signature(format!(
                    "symbol name {} is reserved",
                    s.name
                )));
            }
            if s.name.is_empty()
                || s.name
                    .chars()
                    .any(|c| c.is_whitespace() || c == ':' || c == '(' || c == ')')
            {
                return Err(Error::Signature(format!("bad symbol name {:?}", s.name)));
            }
            if !seen.insert(s.name.clone()) {
                return Err(Error::Signature(format!("duplicate symbol {}", s.name)));
            }
        }
        if symbols.len() > MAX_SYMBOLS {
            return Err(Error::Signature(format!(
                "at most {MAX_SYMBOLS} symbols are supported"
            )));
        }
        Ok(Signature { symbols })
    }

    /// The signature of ordered graphs: one binary symbol `E`.
    pub fn graph() -> Self {
        Signature {
            symbols: vec![Symbol {
                name: "E".into(),
                arity: 2,
            }],
        }
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_graph(&self) -> bool {
        self.symbols.len() == 1 && self.symbols[0].arity == 2 && self.symbols[0].name == "E"
    }

    pub fn binary_names(&self) -> impl Iterator<Item = &str> {
        self.symbols
            .iter()
            .filter(|s| s.arity == 2)
            .map(|s| s.name.as_str())
    }

    pub fn unary_names(&self) -> impl Iterator<Item = &str> {
        self.symbols
            .iter()
            .filter(|s| s.arity == 1)
            .map(|s| s.name.as_str())
    }

    pub fn binary_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.arity == 2).count()
    }

    pub fn unary_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.arity == 1).count()
    }

    /// Position of a binary symbol among the binary symbols.
    pub fn binary_index(&self, name: &str) -> Option<usize> {
        self.binary_names().position(|s| s == name)
    }

    /// Position of a unary symbol among the unary symbols.
    pub fn unary_index(&self, name: &str) -> Option<usize> {
        self.unary_names().position(|s| s == name)
    }

    pub fn arity(&self, name: &str) -> Option<u8> {
        if name == ORDER_SYMBOL {
            return Some(2);
        }
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .symbols
            .iter()
            .map(|s| format!("{}:{}", s.name, s.arity))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderRel {
    Less,
    Equal,
    Greater,
}

impl OrderRel {
    pub fn of(a: usize, b: usize) -> OrderRel {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => OrderRel::Less,
            std::cmp::Ordering::Equal => OrderRel::Equal,
            std::cmp::Ordering::Greater => OrderRel::Greater,
        }
    }

    pub fn flip(self) -> OrderRel {
        match self {
            OrderRel::Less => OrderRel::Greater,
            OrderRel::Equal => OrderRel::Equal,
            OrderRel::Greater => OrderRel::Less,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub const ALL: [OrderRel; 3] = [OrderRel::Less, OrderRel::Equal, OrderRel::Greater];

    fn name(self) -> &'static str {
        match self {
            OrderRel::Less => "less",
            OrderRel::Equal => "equal",
            OrderRel::Greater => "greater",
        }
    }
}

/// Atomic type of an ordered pair, packed into a word.
///
/// Bits 0..2 hold the order relation. Binary symbol `r` occupies bits
/// `2+2r` (R(a,b)) and `3+2r` (R(b,a)); unary symbols follow the binary
/// ones with the bit pair (U(a), U(b)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomicTypeCode(pub u64);

const PAIR_LO: u64 = 0x5555_5555_5555_5554;
const PAIR_HI: u64 = 0xAAAA_AAAA_AAAA_AAA8;

impl AtomicTypeCode {
    pub fn new(order: OrderRel, binary: &[(bool, bool)], unary: &[(bool, bool)]) -> Self {
        let mut code = order as u64;
        for (i, &(x, y)) in binary.iter().chain(unary.iter()).enumerate() {
            code |= (x as u64) << (2 + 2 * i);
            code |= (y as u64) << (3 + 2 * i);
        }
        AtomicTypeCode(code)
    }

    pub fn order(self) -> OrderRel {
        match self.0 & 3 {
            0 => OrderRel::Less,
            1 => OrderRel::Equal,
            _ => OrderRel::Greater,
        }
    }

    /// (R(a,b), R(b,a)) for the binary symbol at position `r`.
    pub fn binary(self, r: usize) -> (bool, bool) {
        self.pair(r)
    }

    /// (U(a), U(b)) for the unary symbol at position `u`; `nb` is the number of binary symbols.
    pub fn unary(self, nb: usize, u: usize) -> (bool, bool) {
        self.pair(nb + u)
    }

    fn pair(self, i: usize) -> (bool, bool) {
        (
            (self.0 >> (2 + 2 * i)) & 1 == 1,
            (self.0 >> (3 + 2 * i)) & 1 == 1,
        )
    }

    /// The type of (b,a) given the type of (a,b).
    pub fn reversed(self) -> Self {
        let bits = self.0 & !3;
        let swapped = ((bits >> 1) & PAIR_LO) | ((bits << 1) & PAIR_HI);
        AtomicTypeCode(swapped | self.order().flip() as u64)
    }

    pub fn with_order(self, order: OrderRel) -> Self {
        AtomicTypeCode((self.0 & !3) | order as u64)
    }

    pub fn describe(self, sig: &Signature) -> String {
        let mut out = vec![self.order().name().to_string()];
        for (r, name) in sig.binary_names().enumerate() {
            let (x, y) = self.binary(r);
            out.push(format!("{}:({},{})", name, x as u8, y as u8));
        }
        let nb = sig.binary_count();
        for (u, name) in sig.unary_names().enumerate() {
            let (x, y) = self.unary(nb, u);
            out.push(format!("{}:({},{})", name, x as u8, y as u8));
        }
        format!("({})", out.join(", "))
    }
}

/// Finite structure over `0..n` ordered by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedStructure {
    sig: Signature,
    n: usize,
    binary: Vec<Vec<bool>>,
    unary: Vec<Vec<bool>>,
}

impl OrderedStructure {
    /// Structure with every relation empty.
    pub fn new(sig: Signature, n: usize) -> Self {
        let binary = vec![vec![false; n * n]; sig.binary_count()];
        let unary = vec![vec![false; n]; sig.unary_count()];
        OrderedStructure {
            sig,
            n,
            binary,
            unary,
        }
    }

    /// Loopless symmetric ordered graph.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut s = OrderedStructure::new(Signature::graph(), n);
        for &(a, b) in edges {
            s.check(a)?;
            s.check(b)?;
            if a == b {
                return Err(Error::InvalidParameter(format!("loop at {a}")));
            }
            s.set_edge(a, b, true);
        }
        Ok(s)
    }

    /// Ordered graph from a symmetric adjacency predicate.
    pub fn graph_from_fn(n: usize, mut adj: impl FnMut(usize, usize) -> bool) -> Self {
        let mut s = OrderedStructure::new(Signature::graph(), n);
        for a in 0..n {
            for b in a + 1..n {
                if adj(a, b) {
                    s.set_edge(a, b, true);
                }
            }
        }
        s
    }

    pub fn clique(n: usize) -> Self {
        Self::graph_from_fn(n, |_, _| true)
    }

    pub fn path(n: usize) -> Self {
        Self::graph_from_fn(n, |a, b| b == a + 1)
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, a: usize) -> Result<()> {
        if a >= self.n {
            Err(Error::IndexOutOfRange {
                index: a,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn rel(&self, r: usize, a: usize, b: usize) -> bool {
        self.binary[r][a * self.n + b]
    }

    pub fn set_rel(&mut self, r: usize, a: usize, b: usize, value: bool) {
        self.binary[r][a * self.n + b] = value;
    }

    #[inline]
    pub fn has(&self, u: usize, a: usize) -> bool {
        self.unary[u][a]
    }

    pub fn set_unary(&mut self, u: usize, a: usize, value: bool) {
        self.unary[u][a] = value;
    }

    /// First binary relation, read as an edge relation.
    #[inline]
    pub fn edge(&self, a: usize, b: usize) -> bool {
        self.rel(0, a, b)
    }

    pub fn set_edge(&mut self, a: usize, b: usize, value: bool) {
        self.set_rel(0, a, b, value);
        self.set_rel(0, b, a, value);
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn atp(&self, a: usize, b: usize) -> Result<AtomicTypeCode> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.atp_unchecked(a, b))
    }

    #[inline]
    pub fn atp_unchecked(&self, a: usize, b: usize) -> AtomicTypeCode {
        let mut code = OrderRel::of(a, b) as u64;
        let mut shift = 2;
        for m in &self.binary {
            code |= (m[a * self.n + b] as u64) << shift;
            code |= (m[b * self.n + a] as u64) << (shift + 1);
            shift += 2;
        }
        for v in &self.unary {
            code |= (v[a] as u64) << shift;
            code |= (v[b] as u64) << (shift + 1);
            shift += 2;
        }
        AtomicTypeCode(code)
    }

    /// Row-major adjacency-type matrix.
    pub fn type_matrix(&self) -> Vec<AtomicTypeCode> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(self.atp_unchecked(a, b));
            }
        }
        out
    }

    /// Induced substructure on a strictly increasing list of elements.
    pub fn induced(&self, elems: &[usize]) -> Result<Self> {
        for w in elems.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(
                    "induced elements must be strictly increasing".into(),
                ));
            }
        }
        self.relabeled(elems)
    }

    /// Same relations with the order replaced: `order[i]` becomes element `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return Err(Error::InvalidParameter(
                "permutation length mismatch".into(),
            ));
        }
        let mut seen = vec![false; self.n];
        for &x in order {
            self.check(x)?;
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidParameter(format!("element {x} repeated")));
            }
        }
        self.relabeled(order)
    }

    fn relabeled(&self, elems: &[usize]) -> Result<Self> {
        for &x in elems {
            self.check(x)?;
        }
        let k = elems.len();
        let mut out = OrderedStructure::new(self.sig.clone(), k);
        for (r, m) in self.binary.iter().enumerate() {
            for (i, &a) in elems.iter().enumerate() {
                for (j, &b) in elems.iter().enumerate() {
                    out.binary[r][i * k + j] = m[a * self.n + b];
                }
            }
        }
        for (u, v) in self.unary.iter().enumerate() {
            for (i, &a) in elems.iter().enumerate() {
                out.unary[u][i] = v[a];
            }
        }
        Ok(out)
    }

    /// Serialize to the `.obs` text format.
    pub fn to_obs(&self) -> String {
        let mut out = String::from("obs v1\n");
        if self.sig.symbols.is_empty() {
            out.push_str("sig\n");
        } else {
            out.push_str(&format!("sig {}\n", self.sig));
        }
        out.push_str(&format!("n {}\n", self.n));
        let (mut r, mut u) = (0, 0);
        for s in &self.sig.symbols {
            if s.arity == 2 {
                out.push_str(&format!("rel {}\n", s.name));
                for a in 0..self.n {
                    for b in 0..self.n {
                        out.push(if self.rel(r, a, b) { '1' } else { '0' });
                    }
                    out.push('\n');
                }
                r += 1;
            } else {
                out.push_str(&format!("set {}\n", s.name));
                for a in 0..self.n {
                    out.push(if self.has(u, a) { '1' } else { '0' });
                }
                out.push('\n');
                u += 1;
            }
        }
        out
    }

    /// Parse the `.obs` text format.
    pub fn from_obs(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
        if header.trim() != "obs v1" {
            return Err(perr(ln, "expected header `obs v1`"));
        }
        let (ln, sig_line) = lines.next().ok_or_else(|| perr(2, "missing sig line"))?;
        let mut words = sig_line.split_whitespace();
        if words.next() != Some("sig") {
            return Err(perr(ln, "expected `sig`"));
        }
        let mut syms = Vec::new();
        for w in words {
            let (name, ar) = w
                .split_once(':')
                .ok_or_else(|| perr(ln, "symbol must be NAME:ARITY"))?;
            let ar: u8 = ar.parse().map_err(|_| perr(ln, "bad arity"))?;
            syms.push((name.to_string(), ar));
        }
        let sig = Signature::new(syms).map_err(|e| perr(ln, &e.to_string()))?;
        let (ln, n_line) = lines.next().ok_or_else(|| perr(3, "missing n line"))?;
        let n: usize = n_line
            .strip_prefix("n ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| perr(ln, "expected `n N`"))?;
        let mut s = OrderedStructure::new(sig, n);
        let mut done_bin = vec![false; s.sig.binary_count()];
        let mut done_un = vec![false; s.sig.unary_count()];
        let read_row = |line: Option<(usize, &str)>, len: usize| -> Result<Vec<bool>> {
            let (ln, row) = line.ok_or_else(|| perr(0, "unexpected end of input"))?;
            if row.len() != len {
                return Err(perr(ln, &format!("expected {len} characters")));
            }
            row.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(perr(ln, "expected 0 or 1")),
                })
                .collect()
        };
        while let Some((ln, line)) = lines.next() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix("rel ") {
                let r = s
                    .sig
                    .binary_index(name.trim())
                    .ok_or_else(|| perr(ln, "unknown binary symbol"))?;
                if std::mem::replace(&mut done_bin[r], true) {
                    return Err(perr(ln, "relation given twice"));
                }
                for a in 0..n {
                    let row = read_row(lines.next(), n)?;
                    for (b, v) in row.into_iter().enumerate() {
                        s.set_rel(r, a, b, v);
                    }
                }
            } else if let Some(name) = line.strip_prefix("set ") {
                let u = s
                    .sig
                    .unary_index(name.trim())
                    .ok_or_else(|| perr(ln, "unknown unary symbol"))?;
                if std::mem::replace(&mut done_un[u], true) {
                    return Err(perr(ln, "set given twice"));
                }
                let row = read_row(lines.next(), n)?;
                s.unary[u] = row;
            } else {
                return Err(perr(ln, "expected `rel NAME` or `set NAME`"));
            }
        }
        if done_bin.iter().chain(done_un.iter()).any(|d| !d) {
            return Err(perr(0, "some symbols have no data"));
        }
        Ok(s)
    }
}

fn nonempty(set: &[usize], n: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for &x in set {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    Ok(())
}

/// Number of distinct rows of the A×B block of the adjacency-type matrix.
pub fn types_count(s: &OrderedStructure, a: &[usize], b: &[usize]) -> Result<usize> {
    nonempty(a, s.n())?;
    nonempty(b, s.n())?;
    let rows: HashSet<Vec<AtomicTypeCode>> = a
        .iter()
        .map(|&x| b.iter().map(|&y| s.atp_unchecked(x, y)).collect())
        .collect();
    Ok(rows.len())
}

/// Both directions have a single type, i.e. the block of the type matrix is constant.
pub fn is_homogeneous(s: &OrderedStructure, x: &[usize], y: &[usize]) -> Result<bool> {
    nonempty(x, s.n())?;
    nonempty(y, s.n())?;
    let xs: HashSet<usize> = x.iter().copied().collect();
    if let Some(&c) = y.iter().find(|c| xs.contains(c)) {
        return Err(Error::Overlap(c));
    }
    let first = s.atp_unchecked(x[0], y[0]);
    Ok(x.iter()
        .all(|&a| y.iter().all(|&b| s.atp_unchecked(a, b) == first)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_graph(k: usize) -> OrderedStructure {
        // a_i < b_j for all i,j; a_i ~ b_j iff i <= j
        OrderedStructure::graph_from_fn(2 * k, |x, y| x < k && y >= k && x <= y - k)
    }

    #[test]
    fn atp_readoff() {
        let g = OrderedStructure::graph(2, &[(0, 1)]).unwrap();
        let c = g.atp(0, 1).unwrap();
        assert_eq!(c.order(), OrderRel::Less);
        assert_eq!(c.binary(0), (true, true));
        let d = g.atp(1, 0).unwrap();
        assert_eq!(d.order(), OrderRel::Greater);
        assert_eq!(d.binary(0), (true, true));
        let e = g.atp(0, 0).unwrap();
        assert_eq!(e.order(), OrderRel::Equal);
        assert_eq!(e.binary(0), (false, false));
        assert_eq!(c.describe(g.sig()), "(less, E:(1,1))");
        assert!(g.atp(0, 2).is_err());
    }

    #[test]
    fn reversal_is_involution() {
        let sig = Signature::new([("R", 2), ("S", 2), ("U", 1)]).unwrap();
        let mut s = OrderedStructure::new(sig, 3);
        s.set_rel(0, 0, 1, true);
        s.set_rel(1, 1, 0, true);
        s.set_unary(0, 1, true);
        for a in 0..3 {
            for b in 0..3 {
                let c = s.atp_unchecked(a, b);
                assert_eq!(c.reversed(), s.atp_unchecked(b, a));
                assert_eq!(c.reversed().reversed(), c);
            }
        }
    }

    #[test]
    fn five_codes_on_ordered_graphs() {
        let mut codes = HashSet::new();
        for mask in 0u32..8 {
            let g = OrderedStructure::graph_from_fn(3, |a, b| (mask >> (a + b - 1)) & 1 == 1);
            for a in 0..3 {
                for b in 0..3 {
                    codes.insert(g.atp_unchecked(a, b));
                }
            }
        }
        assert_eq!(codes.len(), 5);
    }

    #[test]
    fn types_count_examples() {
        let g = OrderedStructure::graph(2, &[]).unwrap();
        assert_eq!(types_count(&g, &[0], &[1]).unwrap(), 1);
        let twins = OrderedStructure::graph_from_fn(5, |a, b| a < 3 && b >= 3);
        assert_eq!(types_count(&twins, &[0, 1, 2], &[3, 4]).unwrap(), 1);
        let h = half_graph(3);
        assert_eq!(types_count(&h, &[0, 1, 2], &[3, 4, 5]).unwrap(), 3);
        assert_eq!(types_count(&h, &[], &[1]), Err(Error::EmptySet));
    }

    #[test]
    fn homogeneity_examples() {
        let g = OrderedStructure::graph(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert!(is_homogeneous(&g, &[0, 1], &[2, 3]).unwrap());
        assert!(!is_homogeneous(&g, &[0, 2], &[1, 3]).unwrap());
        let one = OrderedStructure::graph(4, &[(0, 2)]).unwrap();
        assert!(!is_homogeneous(&one, &[0, 1], &[2, 3]).unwrap());
        assert_eq!(is_homogeneous(&g, &[0, 1], &[1, 2]), Err(Error::Overlap(1)));
    }

    #[test]
    fn obs_round_trip() {
        let sig = Signature::new([("R", 2), ("U", 1)]).unwrap();
        let mut s = OrderedStructure::new(sig, 3);
        s.set_rel(0, 0, 0, true);
        s.set_rel(0, 2, 1, true);
        s.set_unary(0, 2, true);
        let text = s.to_obs();
        assert_eq!(
            text,
            "obs v1\nsig R:2 U:1\nn 3\nrel R\n100\n000\n010\nset U\n001\n"
        );
        let back = OrderedStructure::from_obs(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_obs(), text);
        let empty = OrderedStructure::new(Signature::empty(), 2);
        assert_eq!(OrderedStructure::from_obs(&empty.to_obs()).unwrap(), empty);
    }

    #[test]
    fn obs_errors() {
        assert!(OrderedStructure::from_obs("obs v2\n").is_err());
        assert!(OrderedStructure::from_obs("obs v1\nsig E:2\nn 2\nrel E\n01\n1\n").is_err());
        assert!(OrderedStructure::from_obs("obs v1\nsig E:2\nn 2\n").is_err());
        assert!(OrderedStructure::from_obs("obs v1\nsig E:3\nn 2\n").is_err());
    }

    #[test]
    fn signature_rejects_duplicates_and_order() {
        assert!(Signature::new([("E", 2), ("E", 1)]).is_err());
        assert!(Signature::new([("<=", 2)]).is_err());
    }

    #[test]
    fn permuted_and_induced() {
        let p = OrderedStructure::path(4);
        let q = p.permuted(&[3, 2, 1, 0]).unwrap();
        assert_eq!(q, p);
        let r = p.induced(&[0, 2, 3]).unwrap();
        assert_eq!(r.edges(), vec![(1, 2)]);
        assert!(p.induced(&[2, 0]).is_err());
    }
}
