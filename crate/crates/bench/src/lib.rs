//! Fixtures shared by the benchmarks.
use twwlab_core::minors::TypeMatrix;
use twwlab_core::OrderedStructure;

/// Deterministic pseudo-random ordered graph (xorshift).
pub fn pseudo_random_graph(n: usize, seed: u64) -> OrderedStructure {
    let mut x = seed | 1;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            if x.is_multiple_of(3) {
                edges.push((a, b));
            }
        }
    }
    OrderedStructure::graph(n, &edges).expect("edges in range")
}

/// Permutation matrix of i -> (a·i) mod n.
pub fn permutation_matrix(n: usize, a: usize) -> TypeMatrix {
    TypeMatrix::from_fn(n, n, |r, c| u64::from(c == (a * r) % n))
}
