#![allow(dead_code)]

use itertools::Itertools;
use rand::Rng;
use twwlab_core::minors::TypeMatrix;
use twwlab_core::OrderedStructure;

/// Every ordered graph on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<OrderedStructure> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            OrderedStructure::graph(n, &edges).unwrap()
        })
        .collect()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> OrderedStructure {
    OrderedStructure::graph_from_fn(n, |_, _| rng.gen_bool(p))
}

/// All cut vectors splitting `len` into `t` nonempty intervals.
pub fn cut_vectors(len: usize, t: usize) -> Vec<Vec<usize>> {
    if t == 0 || t > len {
        return vec![];
    }
    (1..len).combinations(t - 1).collect()
}

pub fn intervals(len: usize, cuts: &[usize]) -> Vec<(usize, usize)> {
    let mut bounds = vec![0];
    bounds.extend_from_slice(cuts);
    bounds.push(len);
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

fn distinct_rows(m: &TypeMatrix, (a, b): (usize, usize), (c, d): (usize, usize)) -> usize {
    (a..b)
        .map(|r| (c..d).map(|x| m.get(r, x)).collect::<Vec<_>>())
        .unique()
        .count()
}

fn distinct_cols(m: &TypeMatrix, (a, b): (usize, usize), (c, d): (usize, usize)) -> usize {
    (c..d)
        .map(|x| (a..b).map(|r| m.get(r, x)).collect::<Vec<_>>())
        .unique()
        .count()
}

/// Whether some pair of cut vectors makes every zone satisfy `zone`.
fn brute_division(
    m: &TypeMatrix,
    t: usize,
    zone: impl Fn((usize, usize), (usize, usize)) -> bool,
) -> bool {
    let rows = cut_vectors(m.rows(), t);
    let cols = cut_vectors(m.cols(), t);
    rows.iter().any(|rc| {
        let ri = intervals(m.rows(), rc);
        cols.iter().any(|cc| {
            let ci = intervals(m.cols(), cc);
            ri.iter().all(|&r| ci.iter().all(|&c| zone(r, c)))
        })
    })
}

pub fn brute_has_grid_minor(m: &TypeMatrix, t: usize) -> bool {
    brute_division(m, t, |(a, b), (c, d)| {
        (a..b).any(|r| (c..d).any(|x| m.get(r, x) == 1))
    })
}

pub fn brute_has_mixed_minor(m: &TypeMatrix, k: usize, t: usize) -> bool {
    brute_division(m, t, |r, c| {
        distinct_rows(m, r, c) >= k || distinct_cols(m, r, c) >= k
    })
}
