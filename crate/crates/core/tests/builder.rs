mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{all_graphs, random_graph};
use twwlab_core::builder::{
    algo_cor, build_convex_chain, refine_chain, AlgoOutcome, BuildOutcome, BuildParams,
};
use twwlab_core::minors::{check_mixed_witness, TypeMatrix};
use twwlab_core::semigrid::{generate_semigrid, GraphScheme};
use twwlab_core::{verify_contraction_sequence, OrderedStructure};

fn check_outcome(g: &OrderedStructure, out: &AlgoOutcome) -> Result<(), String> {
    match out {
        AlgoOutcome::Sequence {
            seq, red_degree, ..
        } => {
            let d = verify_contraction_sequence(g, seq).map_err(|e| e.to_string())?;
            if d != *red_degree {
                return Err(format!("reported {red_degree}, verified {d}"));
            }
            Ok(())
        }
        AlgoOutcome::Witness(w) => check_mixed_witness(&TypeMatrix::from_structure(g), w),
    }
}

#[test]
fn success_is_monotone_in_k_and_t() {
    for n in 1..=5 {
        for g in all_graphs(n) {
            let ok = |k, t| algo_cor(&g, k, t).unwrap().is_sequence();
            for k in 1..=2 {
                for t in 1..=2 {
                    if ok(k, t) {
                        assert!(
                            ok(k + 1, t) && ok(k, t + 1),
                            "n={n} k={k} t={t} edges={:?}",
                            g.edges()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn dichotomy_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..40 {
        let n = 6 + round % 7;
        let g = random_graph(&mut rng, n, 0.4);
        for (k, t) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
            let out = algo_cor(&g, k, t).unwrap();
            check_outcome(&g, &out).unwrap_or_else(|e| panic!("n={n} k={k} t={t}: {e}"));
        }
    }
}

#[test]
fn unequal_semigrid_blocks_small_k() {
    let sc: GraphScheme = "ne/</independent/{}".parse().unwrap();
    let g = generate_semigrid(sc, 6, 6).unwrap();
    let out = algo_cor(&g, 1, 2).unwrap();
    check_outcome(&g, &out).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn chain_shape(seed in any::<u64>(), n in 1usize..=9, k in 1usize..=3, t in 1usize..=3) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, 0.5);
        if let BuildOutcome::Chain(chain) = build_convex_chain(&g, &BuildParams::new(k, t).unwrap()).unwrap() {
            prop_assert_eq!(chain.len(), 2 * n - 2);
            let first = &chain.steps[0];
            prop_assert_eq!(first.rows.len() + first.cols.len(), 2 * n);
            let last = chain.steps.last().unwrap();
            prop_assert_eq!(last.rows.len() + last.cols.len(), 2);
            for w in chain.steps.windows(2) {
                prop_assert!(w[0].rows.to_partition().refines(&w[1].rows.to_partition()));
                prop_assert!(w[0].cols.to_partition().refines(&w[1].cols.to_partition()));
                prop_assert_eq!(w[0].rows.len() + w[0].cols.len(), w[1].rows.len() + w[1].cols.len() + 1);
            }
            let refined = refine_chain(&g, &chain).unwrap();
            prop_assert_eq!(refined.len(), chain.steps.len());
            for ((r, c), step) in refined.iter().zip(&chain.steps) {
                prop_assert!(r.refines(&step.rows.to_partition()));
                prop_assert!(c.refines(&step.cols.to_partition()));
            }
        }
    }

    #[test]
    fn outcomes_check(seed in any::<u64>(), n in 1usize..=10, k in 1usize..=3, t in 1usize..=3) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, 0.5);
        let out = algo_cor(&g, k, t).unwrap();
        prop_assert!(check_outcome(&g, &out).is_ok());
    }
}
