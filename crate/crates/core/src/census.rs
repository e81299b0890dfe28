use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::semigrid::{
    generate_gs, generate_semigrid, DirSet, GraphScheme, InnerFlag, Orient, RType,
};
use crate::structure::{OrderedStructure, Signature};

/// Default cap on the number of search nodes visited by [`enumerate_avoiding`].
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
const MAX_BITS_PER_ELEMENT: usize = 30;

/// Forbidden induced substructures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenSet {
    patterns: Vec<OrderedStructure>,
}

impl ForbiddenSet {
    pub fn new(patterns: Vec<OrderedStructure>) -> Result<Self> {
        if patterns.iter().any(|p| p.n() == 0) {
            return Err(Error::InvalidParameter(
                "forbidden patterns must be nonempty".into(),
            ));
        }
        if let Some(p) = patterns.first() {
            if patterns.iter().any(|q| q.sig() != p.sig()) {
                return Err(Error::Signature(
                    "forbidden patterns over different signatures".into(),
                ));
            }
        }
        Ok(ForbiddenSet { patterns })
    }

    pub fn empty() -> Self {
        ForbiddenSet { patterns: vec![] }
    }

    pub fn patterns(&self) -> &[OrderedStructure] {
        &self.patterns
    }
}

/// The structures being counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Universe {
    /// Loopless symmetric graphs.
    Graphs,
    /// Every structure over the signature.
    Structures(Signature),
}

impl Universe {
    fn sig(&self) -> Signature {
        match self {
            Universe::Graphs => Signature::graph(),
            Universe::Structures(s) => s.clone(),
        }
    }

    fn bits(&self, i: usize) -> usize {
        match self {
            Universe::Graphs => i,
            Universe::Structures(s) => {
                s.binary_count() + s.unary_count() + 2 * s.binary_count() * i
            }
        }
    }

    /// Writes choice `mask` for element `i` against the elements before it.
    fn apply(&self, s: &mut OrderedStructure, i: usize, mask: u64) {
        match self {
            Universe::Graphs => {
                for j in 0..i {
                    s.set_edge(j, i, mask >> j & 1 == 1);
                }
            }
            Universe::Structures(sig) => {
                let (nb, nu) = (sig.binary_count(), sig.unary_count());
                let mut bit = 0;
                let mut next = || {
                    bit += 1;
                    mask >> (bit - 1) & 1 == 1
                };
                for r in 0..nb {
                    let v = next();
                    s.set_rel(r, i, i, v);
                }
                for u in 0..nu {
                    let v = next();
                    s.set_unary(u, i, v);
                }
                for j in 0..i {
                    for r in 0..nb {
                        let (a, b) = (next(), next());
                        s.set_rel(r, j, i, a);
                        s.set_rel(r, i, j, b);
                    }
                }
            }
        }
    }
}

/// Whether `p` embeds order-preservingly into `s` restricted to `0..=last`, with its last element at `last`.
fn embeds_ending_at(p: &OrderedStructure, s: &OrderedStructure, last: usize) -> bool {
    let q = p.n();
    if q == 0 {
        return true;
    }
    if q > last + 1 {
        return false;
    }
    let mut img = vec![0; q];
    img[q - 1] = last;
    let fits = |img: &[usize], j: usize| {
        (0..=j).all(|l| p.atp_unchecked(l, j) == s.atp_unchecked(img[l], img[j]))
    };
    fn go(
        img: &mut Vec<usize>,
        j: usize,
        last: usize,
        fits: &dyn Fn(&[usize], usize) -> bool,
    ) -> bool {
        let q = img.len();
        if j == q - 1 {
            return fits(img, j);
        }
        let lo = if j == 0 { 0 } else { img[j - 1] + 1 };
        let hi = last - (q - 1 - j);
        for v in lo..hi + 1 {
            img[j] = v;
            if fits(img, j) && go(img, j + 1, last, fits) {
                return true;
            }
        }
        false
    }
    go(&mut img, 0, last, &fits)
}

struct Search<'a> {
    universe: &'a Universe,
    forbidden: &'a ForbiddenSet,
    n: usize,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl Search<'_> {
    fn admissible(&self, s: &OrderedStructure, i: usize) -> bool {
        !self
            .forbidden
            .patterns
            .iter()
            .any(|p| embeds_ending_at(p, s, i))
    }

    fn count(&self, s: &mut OrderedStructure, i: usize) -> Result<u128> {
        if i == self.n {
            return Ok(1);
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let mut total = 0u128;
        for mask in 0..1u64 << self.universe.bits(i) {
            self.universe.apply(s, i, mask);
            if self.admissible(s, i) {
                total += self.count(s, i + 1)?;
            }
        }
        Ok(total)
    }

    /// Admissible structures whose first `depth` elements are filled in.
    fn prefixes(&self, depth: usize) -> Vec<OrderedStructure> {
        let mut level = vec![OrderedStructure::new(self.universe.sig(), self.n)];
        for i in 0..depth {
            let mut next = Vec::new();
            for s in level {
                for mask in 0..1u64 << self.universe.bits(i) {
                    let mut t = s.clone();
                    self.universe.apply(&mut t, i, mask);
                    if self.admissible(&t, i) {
                        next.push(t);
                    }
                }
            }
            level = next;
        }
        level
    }
}

/// Number of structures on `0..n` in which no forbidden pattern occurs as an induced substructure.
pub fn enumerate_avoiding(
    universe: &Universe,
    forbidden: &ForbiddenSet,
    n: usize,
) -> Result<BigUint> {
    enumerate_avoiding_with_budget(universe, forbidden, n, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_avoiding_with_budget(
    universe: &Universe,
    forbidden: &ForbiddenSet,
    n: usize,
    budget: u64,
) -> Result<BigUint> {
    let sig = universe.sig();
    if forbidden.patterns.iter().any(|p| p.sig() != &sig) {
        return Err(Error::Signature(format!("patterns must be over {sig}")));
    }
    if n > 0 && universe.bits(n - 1) > MAX_BITS_PER_ELEMENT {
        return Err(Error::OverCap {
            n,
            cap: (1..n)
                .take_while(|&m| universe.bits(m - 1) <= MAX_BITS_PER_ELEMENT)
                .last()
                .unwrap_or(0),
        });
    }
    let nodes = AtomicU64::new(0);
    let search = Search {
        universe,
        forbidden,
        n,
        nodes: &nodes,
        budget,
    };
    let depth = n.min(3);
    let prefixes = search.prefixes(depth);
    let counts: Vec<u128> = prefixes
        .into_par_iter()
        .map(|mut s| search.count(&mut s, depth))
        .collect::<Result<_>>()?;
    Ok(counts
        .into_iter()
        .fold(BigUint::zero(), |acc, c| acc + BigUint::from(c)))
}

/// One row of a growth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: usize,
    pub count: BigUint,
    pub elapsed: Duration,
}

pub fn growth_table(
    universe: &Universe,
    forbidden: &ForbiddenSet,
    n_max: usize,
    budget: u64,
) -> Result<Vec<GrowthRow>> {
    (0..=n_max)
        .map(|n| {
            let start = Instant::now();
            let count = enumerate_avoiding_with_budget(universe, forbidden, n, budget)?;
            Ok(GrowthRow {
                n,
                count,
                elapsed: start.elapsed(),
            })
        })
        .collect()
}

/// CSV with columns n,count,millis.
pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("n,count,millis\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.n, r.count, r.elapsed.as_millis()));
    }
    out
}

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(n - i) / BigUint::from(i + 1)
    })
}

/// (⌊n/3⌋!, k^k, C(k², k)) for k = ⌊n/3⌋.
pub fn growth_lb(n: usize) -> (BigUint, BigUint, BigUint) {
    let k = n / 3;
    (
        factorial(k),
        BigUint::from(k).pow(k as u32),
        binomial(k * k, k),
    )
}

/// Σ_{k=0}^{⌈n/2⌉} C(n, 2k)·k!.
pub fn growth_conjecture_sum(n: usize) -> BigUint {
    (0..=n.div_ceil(2))
        .map(|k| binomial(n, 2 * k) * factorial(k))
        .sum()
}

fn check_permutation(pi: &[usize]) -> Result<()> {
    let mut seen = vec![false; pi.len()];
    for &x in pi {
        if x >= pi.len() || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidParameter(format!(
                "{pi:?} is not a permutation of 0..{}",
                pi.len()
            )));
        }
    }
    Ok(())
}

/// Ordered graph on 0..2n with the matching i ~ π(i)+n.
pub fn generate_hpi(pi: &[usize]) -> Result<OrderedStructure> {
    check_permutation(pi)?;
    let n = pi.len();
    let edges: Vec<(usize, usize)> = pi.iter().enumerate().map(|(i, &p)| (i, p + n)).collect();
    OrderedStructure::graph(2 * n, &edges)
}

/// Substructure of the n×n '='-semigrid on the points (0, i) and (π(i)+1, i).
pub fn build_gpi(pi: &[usize]) -> Result<OrderedStructure> {
    check_permutation(pi)?;
    let n = pi.len();
    if n == 0 {
        return OrderedStructure::graph(0, &[]);
    }
    let sc = GraphScheme::new(RType::Eq, Orient::First, InnerFlag::Independent, DirSet(0));
    let g = generate_semigrid(sc, n, n)?;
    let points = sc.points(n, n);
    let index = |p: (usize, usize)| {
        points
            .iter()
            .position(|&q| q == p)
            .expect("point of the grid")
    };
    let mut elems: Vec<usize> = (0..n)
        .map(|i| index((0, i)))
        .chain(pi.iter().enumerate().map(|(i, &p)| index((p + 1, i))))
        .collect();
    elems.sort_unstable();
    g.induced(&elems)
}

/// Builds G^S for every k×k permutation matrix and checks that they are pairwise distinct.
pub fn count_gs_family(k: usize) -> Result<BigUint> {
    count_gs_family_with(
        GraphScheme::new(RType::Eq, Orient::First, InnerFlag::Independent, DirSet(0)),
        k,
    )
}

pub fn count_gs_family_with(sc: GraphScheme, k: usize) -> Result<BigUint> {
    const CAP: usize = 7;
    if k > CAP {
        return Err(Error::OverCap { n: k, cap: CAP });
    }
    if k == 0 {
        return Ok(BigUint::one());
    }
    let mut seen = std::collections::HashMap::new();
    for pi in (0..k).permutations(k) {
        let cells: Vec<(usize, usize)> = pi
            .iter()
            .enumerate()
            .map(|(i, &j)| (i + 1, j + 1))
            .collect();
        let g = generate_gs(sc, k, k, &cells)?;
        if let Some(prev) = seen.insert(g, pi.clone()) {
            return Err(Error::Collision(format!(
                "permutations {prev:?} and {pi:?} under {sc}"
            )));
        }
    }
    Ok(BigUint::from(seen.len()))
}
