use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{AtomicTypeCode, OrderedStructure};

/// Partition of `0..n` into nonempty blocks. Blocks are sorted and ordered by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} outside 0..{n}"
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} in two blocks"
                    )));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("element {x} not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { n, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|x| vec![x]).collect(),
        }
    }

    pub fn one_block(n: usize) -> Self {
        let blocks = if n == 0 {
            vec![]
        } else {
            vec![(0..n).collect()]
        };
        Partition { n, blocks }
    }

    /// Partition from a labelling `label[x]` of the elements.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, &l) in labels.iter().enumerate() {
            let id = *map.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(x);
        }
        Partition {
            n: labels.len(),
            blocks,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = i;
            }
        }
        out
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let lab = coarser.labels();
        self.n == coarser.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| lab[x] == lab[b[0]]))
    }

    /// Common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let (a, b) = (self.labels(), other.labels());
        let pairs: Vec<usize> = (0..self.n)
            .map(|x| a[x] * (other.len() + 1) + b[x])
            .collect();
        Partition::from_labels(&pairs)
    }

    /// Finest common coarsening.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            for &x in &b[1..] {
                uf.union(b[0], x);
            }
        }
        let labels: Vec<usize> = (0..self.n).map(|x| uf.find(x)).collect();
        Partition::from_labels(&labels)
    }

    /// Every block is an interval of the natural order.
    pub fn is_convex(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b[b.len() - 1] - b[0] + 1 == b.len())
    }
}

/// Partition of `0..n` into consecutive intervals, given by the start of every interval but the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvexPartition {
    pub n: usize,
    pub cuts: Vec<usize>,
}

impl ConvexPartition {
    pub fn new(n: usize, cuts: Vec<usize>) -> Result<Self> {
        let mut prev = 0;
        for &c in &cuts {
            if c <= prev || c >= n {
                return Err(Error::InvalidPartition(format!("bad cut {c} for n={n}")));
            }
            prev = c;
        }
        if n == 0 && !cuts.is_empty() {
            return Err(Error::InvalidPartition("cuts on an empty domain".into()));
        }
        Ok(ConvexPartition { n, cuts })
    }

    pub fn singletons(n: usize) -> Self {
        ConvexPartition {
            n,
            cuts: (1..n).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        ConvexPartition { n, cuts: vec![] }
    }

    /// Half-open intervals `[start, end)`.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        if self.n == 0 {
            return vec![];
        }
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        let mut start = 0;
        for &c in &self.cuts {
            out.push((start, c));
            start = c;
        }
        out.push((start, self.n));
        out
    }

    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.cuts.len() + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn to_partition(&self) -> Partition {
        Partition {
            n: self.n,
            blocks: self
                .intervals()
                .into_iter()
                .map(|(a, b)| (a..b).collect())
                .collect(),
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Attach the root of `b` below the root of `a`.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
        ra
    }
}

/// Merge order from singletons to a single block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContractionSequence {
    pub n: usize,
    pub merges: Vec<(usize, usize)>,
}

impl ContractionSequence {
    pub fn new(n: usize, merges: Vec<(usize, usize)>) -> Self {
        ContractionSequence { n, merges }
    }

    /// Checks that every merge joins two distinct blocks and that one block remains.
    pub fn validate(&self) -> Result<()> {
        let expected = self.n.saturating_sub(1);
        if self.merges.len() != expected {
            return Err(Error::MalformedMerge {
                step: self.merges.len(),
                reason: format!("expected {expected} merges, found {}", self.merges.len()),
            });
        }
        let mut uf = UnionFind::new(self.n);
        for (step, &(a, b)) in self.merges.iter().enumerate() {
            if a >= self.n || b >= self.n {
                return Err(Error::MalformedMerge {
                    step,
                    reason: format!("unknown element in ({a},{b})"),
                });
            }
            if uf.find(a) == uf.find(b) {
                return Err(Error::MalformedMerge {
                    step,
                    reason: format!("{a} and {b} are already in one block"),
                });
            }
            uf.union(a, b);
        }
        Ok(())
    }

    /// The chain of partitions, starting from singletons.
    pub fn partitions(&self) -> Result<Vec<Partition>> {
        self.validate()?;
        let mut uf = UnionFind::new(self.n);
        let mut out = vec![Partition::singletons(self.n)];
        for &(a, b) in &self.merges {
            uf.union(a, b);
            let labels: Vec<usize> = (0..self.n).map(|x| uf.find(x)).collect();
            out.push(Partition::from_labels(&labels));
        }
        Ok(out)
    }

    /// Merge-list text: one `merge a b` line per step and an optional red-degree comment.
    pub fn to_text(&self, red_degree: Option<usize>) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(a, b) in &self.merges {
            let _ = writeln!(out, "merge {a} {b}");
        }
        if let Some(d) = red_degree {
            let _ = writeln!(out, "# red-degree {d}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut merges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["n", x] => n = Some(x.parse().map_err(|_| perr("bad n"))?),
                ["merge", a, b] => merges.push((
                    a.parse().map_err(|_| perr("bad index"))?,
                    b.parse().map_err(|_| perr("bad index"))?,
                )),
                _ => return Err(perr("expected `n N` or `merge A B`")),
            }
        }
        let n = n.unwrap_or(merges.len() + 1);
        Ok(ContractionSequence { n, merges })
    }
}

fn block_lists(p: &Partition) -> &[Vec<usize>] {
    p.blocks()
}

/// Max over blocks of the number of other blocks it is not homogeneous with.
pub fn red_degree(s: &OrderedStructure, p: &Partition) -> Result<usize> {
    if p.n() != s.n() {
        return Err(Error::InvalidPartition(format!(
            "partition of {} elements for a structure of {}",
            p.n(),
            s.n()
        )));
    }
    let blocks = block_lists(p);
    let mut red = vec![0usize; blocks.len()];
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let first = s.atp_unchecked(blocks[i][0], blocks[j][0]);
            let constant = blocks[i]
                .iter()
                .all(|&a| blocks[j].iter().all(|&b| s.atp_unchecked(a, b) == first));
            if !constant {
                red[i] += 1;
                red[j] += 1;
            }
        }
    }
    Ok(red.into_iter().max().unwrap_or(0))
}

/// Incremental red-degree bookkeeping along a merge chain.
///
/// `hom[x*n+y]` holds the constant type of the block pair (x,y), indexed by
/// block roots, or `None` when the pair is not homogeneous.
#[derive(Clone)]
pub(crate) struct MergeState {
    n: usize,
    root: Vec<usize>,
    hom: Vec<Option<AtomicTypeCode>>,
    red: Vec<usize>,
    live: Vec<usize>,
}

impl MergeState {
    pub(crate) fn new(s: &OrderedStructure) -> Self {
        let n = s.n();
        let mut hom = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    hom[a * n + b] = Some(s.atp_unchecked(a, b));
                }
            }
        }
        MergeState {
            n,
            root: (0..n).collect(),
            hom,
            red: vec![0; n],
            live: (0..n).collect(),
        }
    }

    pub(crate) fn block_of(&self, x: usize) -> usize {
        let mut r = x;
        while self.root[r] != r {
            r = self.root[r];
        }
        r
    }

    /// Canonical encoding: the root of every element.
    pub(crate) fn key(&self) -> Vec<u16> {
        (0..self.n).map(|x| self.block_of(x) as u16).collect()
    }

    pub(crate) fn live(&self) -> &[usize] {
        &self.live
    }

    pub(crate) fn max_red(&self) -> usize {
        self.live.iter().map(|&x| self.red[x]).max().unwrap_or(0)
    }

    /// Red degree the partition would have after merging blocks `x` and `y`, without merging.
    pub(crate) fn red_after(&self, x: usize, y: usize) -> usize {
        let n = self.n;
        let mut zred = 0;
        let mut best = 0;
        for &w in &self.live {
            if w == x || w == y {
                continue;
            }
            let (hx, hy) = (self.hom[x * n + w], self.hom[y * n + w]);
            let now = hx.is_none() || hx != hy;
            let before = hx.is_none() as usize + hy.is_none() as usize;
            if now {
                zred += 1;
            }
            let wred = self.red[w] + now as usize - before;
            best = best.max(wred);
        }
        best.max(zred)
    }

    /// Merge the blocks with roots `x` and `y`; `x` stays the root.
    pub(crate) fn merge(&mut self, x: usize, y: usize) {
        let n = self.n;
        let mut zred = 0;
        for i in 0..self.live.len() {
            let w = self.live[i];
            if w == x || w == y {
                continue;
            }
            let (hx, hy) = (self.hom[x * n + w], self.hom[y * n + w]);
            let now = hx.is_none() || hx != hy;
            let before = hx.is_none() as usize + hy.is_none() as usize;
            self.red[w] = self.red[w] + now as usize - before;
            let v = if now { None } else { hx };
            self.hom[x * n + w] = v;
            self.hom[w * n + x] = v.map(|c| c.reversed());
            zred += now as usize;
        }
        self.red[x] = zred;
        self.root[y] = x;
        self.live.retain(|&w| w != y);
    }
}

/// Maximum red degree over every partition of the chain.
pub fn verify_contraction_sequence(
    s: &OrderedStructure,
    seq: &ContractionSequence,
) -> Result<usize> {
    if seq.n != s.n() {
        return Err(Error::MalformedMerge {
            step: 0,
            reason: format!("sequence over {} elements, structure has {}", seq.n, s.n()),
        });
    }
    seq.validate()?;
    let mut state = MergeState::new(s);
    let mut worst = 0;
    for &(a, b) in &seq.merges {
        let (x, y) = (state.block_of(a), state.block_of(b));
        state.merge(x, y);
        worst = worst.max(state.max_red());
    }
    Ok(worst)
}

/// An order of the domain in which every partition of the chain is convex.
///
/// Returned as the list of elements in their new order. When two blocks merge,
/// the one containing the smaller element goes first.
pub fn order_from_contraction(
    s: &OrderedStructure,
    seq: &ContractionSequence,
) -> Result<Vec<usize>> {
    if seq.n != s.n() {
        return Err(Error::MalformedMerge {
            step: 0,
            reason: "sequence size mismatch".into(),
        });
    }
    seq.validate()?;
    let mut uf = UnionFind::new(seq.n);
    let mut lists: Vec<Vec<usize>> = (0..seq.n).map(|x| vec![x]).collect();
    for &(a, b) in &seq.merges {
        let (ra, rb) = (uf.find(a), uf.find(b));
        let (la, lb) = (
            std::mem::take(&mut lists[ra]),
            std::mem::take(&mut lists[rb]),
        );
        let min_a = *la.iter().min().unwrap();
        let min_b = *lb.iter().min().unwrap();
        let joined = if min_a < min_b {
            [la, lb].concat()
        } else {
            [lb, la].concat()
        };
        let r = uf.union(a, b);
        lists[r] = joined;
    }
    if seq.n == 0 {
        return Ok(vec![]);
    }
    let r = uf.find(0);
    Ok(std::mem::take(&mut lists[r]))
}

/// The sequence expressed over a reordered domain where `order[i]` became element `i`.
pub fn relabel_sequence(seq: &ContractionSequence, order: &[usize]) -> ContractionSequence {
    let mut pos = vec![0; order.len()];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    ContractionSequence::new(
        seq.n,
        seq.merges.iter().map(|&(a, b)| (pos[a], pos[b])).collect(),
    )
}
