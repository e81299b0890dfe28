use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{ContractionSequence, ConvexPartition, MergeState};
use crate::structure::{AtomicTypeCode, OrderedStructure};

pub const DEFAULT_EXACT_CAP: usize = 10;
pub const DEFAULT_SEMIGRID_CAP: usize = 3;

/// Minimum red degree over all contraction sequences, with a sequence attaining it.
pub fn twinwidth_exact(s: &OrderedStructure, cap: usize) -> Result<(usize, ContractionSequence)> {
    let n = s.n();
    if n > cap {
        return Err(Error::OverCap { n, cap });
    }
    if n <= 1 {
        return Ok((0, ContractionSequence::new(n, vec![])));
    }
    for d in 0..n {
        let mut failed = HashSet::new();
        let mut merges = Vec::with_capacity(n - 1);
        if search(&MergeState::new(s), d, &mut failed, &mut merges) {
            return Ok((d, ContractionSequence::new(n, merges)));
        }
    }
    unreachable!("red degree never exceeds n-1")
}

fn search(
    state: &MergeState,
    d: usize,
    failed: &mut HashSet<Vec<u16>>,
    merges: &mut Vec<(usize, usize)>,
) -> bool {
    let live = state.live();
    if live.len() == 1 {
        return true;
    }
    let key = state.key();
    if failed.contains(&key) {
        return false;
    }
    let mut cands = Vec::new();
    for (i, &x) in live.iter().enumerate() {
        for &y in &live[i + 1..] {
            let r = state.red_after(x, y);
            if r <= d {
                cands.push((r, x, y));
            }
        }
    }
    cands.sort_unstable();
    for (_, x, y) in cands {
        let mut next = state.clone();
        next.merge(x, y);
        merges.push((x, y));
        if search(&next, d, failed, merges) {
            return true;
        }
        merges.pop();
    }
    failed.insert(key);
    false
}

/// Distinct-row and distinct-column counts of one zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneCounts {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityWitness {
    pub row_cuts: ConvexPartition,
    pub col_cuts: ConvexPartition,
    /// `per_zone[i][j]` describes the zone of the i-th row interval and j-th column interval.
    pub per_zone: Vec<Vec<ZoneCounts>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Simplicity {
    Simple,
    Witness(SimplicityWitness),
}

impl Simplicity {
    pub fn is_simple(&self) -> bool {
        matches!(self, Simplicity::Simple)
    }
}

/// Zone counts for every pair of intervals of the adjacency-type matrix.
struct ZoneTable {
    n: usize,
    counts: Vec<ZoneCounts>,
}

impl ZoneTable {
    fn interval_id(n: usize, a: usize, b: usize) -> usize {
        a * (n + 1) + b
    }

    fn new(s: &OrderedStructure) -> Self {
        let n = s.n();
        let m = s.type_matrix();
        let ids = (n + 1) * (n + 1);
        let mut counts = vec![ZoneCounts { rows: 0, cols: 0 }; ids * ids];
        for (a, b) in (0..n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))) {
            for (c, d) in (0..n).flat_map(|c| (c + 1..=n).map(move |d| (c, d))) {
                let rows: HashSet<&[AtomicTypeCode]> =
                    (a..b).map(|r| &m[r * n + c..r * n + d]).collect();
                let cols: HashSet<Vec<AtomicTypeCode>> = (c..d)
                    .map(|col| (a..b).map(|r| m[r * n + col]).collect())
                    .collect();
                let idx = Self::interval_id(n, a, b) * ids + Self::interval_id(n, c, d);
                counts[idx] = ZoneCounts {
                    rows: rows.len(),
                    cols: cols.len(),
                };
            }
        }
        ZoneTable { n, counts }
    }

    fn get(&self, l: (usize, usize), r: (usize, usize)) -> ZoneCounts {
        let ids = (self.n + 1) * (self.n + 1);
        self.counts[Self::interval_id(self.n, l.0, l.1) * ids + Self::interval_id(self.n, r.0, r.1)]
    }
}

/// Whether every pair of convex partitions into the same number `≥ t` of parts
/// has a zone with at most `k` distinct rows and at most `k` distinct columns.
pub fn is_kt_simple(s: &OrderedStructure, k: usize, t: usize) -> Result<Simplicity> {
    let n = s.n();
    if t == 0 || t > n {
        return Err(Error::InvalidParameter(format!(
            "t={t} must lie in 1..={n}"
        )));
    }
    let table = ZoneTable::new(s);
    for parts in t..=n {
        let cut_sets: Vec<Vec<usize>> = (1..n).combinations(parts - 1).collect();
        let intervals: Vec<Vec<(usize, usize)>> = cut_sets
            .iter()
            .map(|c| ConvexPartition { n, cuts: c.clone() }.intervals())
            .collect();
        for (li, l) in intervals.iter().enumerate() {
            for (ri, r) in intervals.iter().enumerate() {
                let ok = l.iter().any(|&a| {
                    r.iter().any(|&b| {
                        let z = table.get(a, b);
                        z.rows <= k && z.cols <= k
                    })
                });
                if !ok {
                    let per_zone = l
                        .iter()
                        .map(|&a| r.iter().map(|&b| table.get(a, b)).collect())
                        .collect();
                    return Ok(Simplicity::Witness(SimplicityWitness {
                        row_cuts: ConvexPartition {
                            n,
                            cuts: cut_sets[li].clone(),
                        },
                        col_cuts: ConvexPartition {
                            n,
                            cuts: cut_sets[ri].clone(),
                        },
                        per_zone,
                    }));
                }
            }
        }
    }
    Ok(Simplicity::Simple)
}

/// Least k such that the structure is (k,k)-simple.
pub fn simplicity(s: &OrderedStructure) -> Result<usize> {
    if s.n() == 0 {
        return Err(Error::InvalidParameter("empty structure".into()));
    }
    for k in 1..=s.n() {
        if is_kt_simple(s, k, k)?.is_simple() {
            return Ok(k);
        }
    }
    unreachable!("every structure is (n,n)-simple")
}

/// Largest m ≤ cap such that a regular m×m-semigrid embeds order-preservingly; 0 if none.
pub fn max_semigrid(s: &OrderedStructure, cap: usize) -> usize {
    let mut best = 0;
    for m in 1..=cap {
        if (m + 1) * (m + 1) > s.n() || crate::semigrid::find_embedding(s, m, m).is_none() {
            break;
        }
        best = m;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::verify_contraction_sequence;

    /// Best red degree over every merge order, without memoization.
    fn brute_tww(s: &OrderedStructure) -> usize {
        fn go(
            s: &OrderedStructure,
            merges: &mut Vec<(usize, usize)>,
            roots: &[usize],
            best: &mut usize,
        ) {
            if roots.len() == 1 {
                let seq = ContractionSequence::new(s.n(), merges.clone());
                *best = (*best).min(verify_contraction_sequence(s, &seq).unwrap());
                return;
            }
            for i in 0..roots.len() {
                for j in i + 1..roots.len() {
                    merges.push((roots[i], roots[j]));
                    let rest: Vec<usize> =
                        roots.iter().copied().filter(|&r| r != roots[j]).collect();
                    go(s, merges, &rest, best);
                    merges.pop();
                }
            }
        }
        let mut best = usize::MAX;
        go(s, &mut vec![], &(0..s.n()).collect::<Vec<_>>(), &mut best);
        best
    }

    #[test]
    fn exact_small_values() {
        assert_eq!(
            twinwidth_exact(&OrderedStructure::path(1), 10).unwrap().0,
            0
        );
        let (d, seq) = twinwidth_exact(&OrderedStructure::clique(4), 10).unwrap();
        assert_eq!(d, 0);
        assert_eq!(
            verify_contraction_sequence(&OrderedStructure::clique(4), &seq).unwrap(),
            0
        );
        assert!(matches!(
            twinwidth_exact(&OrderedStructure::path(11), 10),
            Err(Error::OverCap { .. })
        ));
    }

    #[test]
    fn exact_matches_unmemoized_enumeration() {
        for n in 1..=5 {
            let p = OrderedStructure::path(n);
            let (d, seq) = twinwidth_exact(&p, 10).unwrap();
            assert_eq!(d, brute_tww(&p), "path {n}");
            assert_eq!(verify_contraction_sequence(&p, &seq).unwrap(), d);
        }
        for mask in [0b1011010110u32, 0b0110101101, 0b1110001011] {
            let g = OrderedStructure::graph_from_fn(5, |a, b| {
                let idx = a * (9 - a) / 2 + b - a - 1;
                (mask >> idx) & 1 == 1
            });
            assert_eq!(twinwidth_exact(&g, 10).unwrap().0, brute_tww(&g));
        }
    }

    #[test]
    fn path_regression_values() {
        assert_eq!(
            twinwidth_exact(&OrderedStructure::path(4), 10).unwrap().0,
            1
        );
        assert_eq!(
            twinwidth_exact(&OrderedStructure::path(5), 10).unwrap().0,
            1
        );
    }

    #[test]
    fn simplicity_examples() {
        let k5 = OrderedStructure::clique(5);
        // the one-part partition has a single zone whose five rows are pairwise distinct
        assert!(!is_kt_simple(&k5, 1, 1).unwrap().is_simple());
        assert!(is_kt_simple(&k5, 5, 1).unwrap().is_simple());
        assert_eq!(simplicity(&k5).unwrap(), 2);
        for t in 2..=5 {
            assert!(is_kt_simple(&k5, 1, t).unwrap().is_simple());
        }
        assert_eq!(simplicity(&OrderedStructure::path(1)).unwrap(), 1);
        assert!(is_kt_simple(&k5, 1, 6).is_err());
        let p = OrderedStructure::path(4);
        assert!(is_kt_simple(&p, 4, 1).unwrap().is_simple());
    }

    #[test]
    fn witness_zones_all_violate() {
        let g = OrderedStructure::graph_from_fn(6, |a, b| (a + b) % 2 == 1);
        if let Simplicity::Witness(w) = is_kt_simple(&g, 1, 2).unwrap() {
            for row in &w.per_zone {
                for z in row {
                    assert!(z.rows > 1 || z.cols > 1);
                }
            }
        } else {
            panic!("alternating bipartite graph is not (1,2)-simple");
        }
    }
}
