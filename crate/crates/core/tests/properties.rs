use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchmix::config::{pi_bc, sample_configuration, sample_uniform_simple};
use switchmix::graph::{classify, decode, encode, from_json, tilde_distance, to_json};
use switchmix::kernels::{
    apply_switch, multigraph_neighbors, neighbor_switches, qc_rate, qu_rate, simple_neighbors, step_config,
    step_simple, switch_between, transition_row,
};
use switchmix::{BipartiteMultigraph, Chain};

fn size() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..10).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

fn sparse() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..10).prop_flat_map(|n| (Just(n), 1..=n.min(3), any::<u64>()))
}

fn multigraph(n: usize, d: usize, seed: u64) -> BipartiteMultigraph {
    sample_configuration(n, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn big(r: num_rational::Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn degrees_ok(g: &BipartiteMultigraph) -> bool {
    let m = g.matrix();
    let n = g.n();
    (0..n).all(|i| m[i].iter().sum::<u32>() as usize == g.d())
        && (0..n).all(|j| (0..n).map(|i| m[i][j]).sum::<u32>() as usize == g.d())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_and_json_forms_round_trip((n, d, seed) in size()) {
        let g = multigraph(n, d, seed);
        prop_assert_eq!(decode(&encode(&g)).unwrap(), g.clone());
        prop_assert_eq!(from_json(&to_json(&g)).unwrap(), g);
    }

    #[test]
    fn configuration_step_preserves_degrees((n, d, seed) in size(), steps in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut g = multigraph(n, d, seed);
        for _ in 0..steps {
            step_config(&mut g, &mut rng);
        }
        prop_assert!(g.validate().is_ok());
        prop_assert!(degrees_ok(&g));
    }

    #[test]
    fn simple_step_stays_simple((n, d, seed) in sparse(), steps in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = sample_uniform_simple(n, d, &mut rng);
        for _ in 0..steps {
            step_simple(&mut g, &mut rng);
            prop_assert!(g.is_simple());
        }
        prop_assert!(degrees_ok(&g));
    }

    #[test]
    fn switches_invert_and_are_recovered((n, d, seed) in size(), pick in any::<prop::sample::Index>()) {
        let g = multigraph(n, d, seed);
        let ops = neighbor_switches(&g, false);
        prop_assume!(!ops.is_empty());
        let (op, _) = ops[pick.index(ops.len())];
        let h = apply_switch(&g, op).unwrap();
        prop_assert_eq!(tilde_distance(&g, &h).unwrap(), 4);
        prop_assert_eq!(tilde_distance(&h, &g).unwrap(), 4);
        prop_assert_eq!(apply_switch(&h, op.inverse()).unwrap(), g.clone());
        let found = switch_between(&g, &h).expect("adjacent graphs have a switch");
        prop_assert_eq!(apply_switch(&g, found).unwrap(), h);
    }

    #[test]
    fn multigraph_chain_satisfies_detailed_balance((n, d, seed) in size(), pick in any::<prop::sample::Index>()) {
        let g = multigraph(n, d, seed);
        let nbrs = multigraph_neighbors(&g);
        prop_assume!(!nbrs.is_empty());
        let h = &nbrs[pick.index(nbrs.len())];
        let lhs = pi_bc(&g) * big(qc_rate(&g, h).unwrap().value());
        let rhs = pi_bc(h) * big(qc_rate(h, &g).unwrap().value());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn simple_chain_is_symmetric((n, d, seed) in sparse(), pick in any::<prop::sample::Index>()) {
        let g = sample_uniform_simple(n, d, &mut ChaCha8Rng::seed_from_u64(seed));
        let nbrs = simple_neighbors(&g).unwrap();
        prop_assume!(!nbrs.is_empty());
        let h = &nbrs[pick.index(nbrs.len())];
        prop_assert!(h.is_simple());
        prop_assert_eq!(qu_rate(&g, h).unwrap().value(), qu_rate(h, &g).unwrap().value());
    }

    #[test]
    fn transition_rows_are_distributions((n, d, seed) in (2usize..6).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))) {
        let g = multigraph(n, d, seed);
        for chain in [Chain::Config, Chain::Simple] {
            if chain == Chain::Simple && !g.is_simple() {
                continue;
            }
            let row = transition_row(&g, chain);
            let total: num_rational::Ratio<i64> = row.values().copied().sum();
            prop_assert_eq!(total, num_rational::Ratio::from_integer(1));
            prop_assert!(row.values().all(|p| *p >= num_rational::Ratio::from_integer(0)));
        }
    }

    #[test]
    fn relabelling_preserves_measure_and_category((n, d, seed) in size()) {
        let g = multigraph(n, d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let h = g.relabel(&rows, &cols).unwrap();
        prop_assert_eq!(pi_bc(&g), pi_bc(&h));
        prop_assert_eq!(classify(&g), classify(&h));
        prop_assert_eq!(g.multiedges().len(), h.multiedges().len());
    }
}
