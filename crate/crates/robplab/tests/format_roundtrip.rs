//! Property tests: parse/write round trips and transformation invariants on
//! arbitrary inputs.

use proptest::prelude::*;

use robplab::bp::{equivalent, random_clean_nrobp};
use robplab::cnf::{CnfFormula, Literal};
use robplab::graph::Graph;
use robplab::io;
use robplab::transform::{to_traditional, uniformize};

fn arb_graph() -> impl Strategy<Value = Graph> {
    (0u32..10).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        proptest::bits::u64::masked((1u64 << pairs.len()) - 1).prop_map(move |mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::new(n, edges).unwrap()
        })
    })
}

fn arb_cnf() -> impl Strategy<Value = CnfFormula> {
    (1u32..8).prop_flat_map(|n| {
        let clause = proptest::collection::btree_map(0..n, any::<bool>(), 0..=n as usize)
            .prop_map(|m| {
                m.into_iter()
                    .map(|(var, positive)| Literal { var, positive })
                    .collect::<Vec<_>>()
            });
        proptest::collection::vec(clause, 0..6)
            .prop_map(move |clauses| CnfFormula::new(n, clauses).unwrap())
    })
}

proptest! {
    #[test]
    fn gr_round_trip(g in arb_graph()) {
        let text = io::write_gr(&g);
        prop_assert_eq!(io::parse_gr(&text).unwrap(), g);
    }

    #[test]
    fn dimacs_round_trip(f in arb_cnf()) {
        let text = io::write_dimacs(&f);
        prop_assert_eq!(io::parse_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn bp_and_tbp_round_trip(vars in 1u32..10, seed in any::<u64>()) {
        let z = random_clean_nrobp(vars, seed);
        prop_assert_eq!(io::parse_bp(&io::write_bp(&z)).unwrap(), z.clone());
        let t = to_traditional(&z);
        prop_assert_eq!(io::parse_tbp(&io::write_tbp(&t)).unwrap(), t);
    }

    #[test]
    fn uniformize_preserves_function(vars in 1u32..9, seed in any::<u64>()) {
        let z = random_clean_nrobp(vars, seed);
        let out = uniformize(&z);
        prop_assert!(out.program.check_uniform());
        prop_assert!(equivalent(&z, &out.program, 20).unwrap());
    }
}
