mod common;

use common::{int_instance, random_roles, to_f64, to_rational};
use dynmatch::coins::{expected_value_exact, ScriptedCoins};
use dynmatch::dda::{run_dda, run_sdda_with, ConstrainedBipartiteInstance};
use dynmatch::oracle::{offline_opt, verify_certificate, DualCertificate};
use dynmatch::pdda::{
    decompose_two_matching, run_pdda, run_pdda_known_departures, run_pdda_unknown_departures, run_pdda_with,
};
use dynmatch::{DepartureModel, DynamicInstance, Rational};
use proptest::prelude::*;

fn half() -> Rational {
    Rational::new(1, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dda_collects_half_of_opt(seed in any::<u64>(), horizon in 1usize..=14, d in 1u32..5) {
        let inst = int_instance(seed, horizon, d, 0.6, 100);
        let cbi = ConstrainedBipartiteInstance::new(&inst, random_roles(seed, horizon)).unwrap();
        let deadlines = vec![d; horizon];
        let run = run_dda(&cbi, &deadlines).unwrap();
        let opt = offline_opt(cbi.base(), &deadlines);
        prop_assert!(opt.method.is_exact());
        prop_assert!(2 * run.total_value >= opt.value, "A={} OPT={}", run.total_value, opt.value);
        prop_assert!(run.audits_pass(), "{:?}", run.failures().collect::<Vec<_>>());
        let ledger = run.ledger.as_ref().unwrap();
        let cert = DualCertificate::from_bipartite(cbi.roles(), ledger);
        prop_assert!(verify_certificate(cbi.base(), &cert, Some(opt.value)).passed);
        prop_assert_eq!(ledger.sum_final_prices() + ledger.sum_final_margins(), ledger.sum_initial_margins());
    }

    #[test]
    fn pdda_exact_expectation(seed in any::<u64>(), horizon in 1usize..=9, d in 1u32..4) {
        let inst = to_rational(&int_instance(seed, horizon, d, 0.7, 20));
        let deadlines = vec![d; horizon];
        let mut ledger_sums = Vec::new();
        let e = expected_value_exact(horizon, |coins: &mut ScriptedCoins| {
            let run = run_pdda_with(&inst, &deadlines, coins).unwrap();
            assert!(run.audits_pass(), "{:?}", run.failures().collect::<Vec<_>>());
            let ledger = run.ledger.as_ref().unwrap();
            ledger_sums.push(ledger.sum_final_prices() + ledger.sum_final_margins());
            run.total_value
        })
        .unwrap();
        let opt = offline_opt(&inst, &deadlines);
        prop_assert!(e.at_least(opt.value, 1, 4), "E={} OPT={}", e.value(), opt.value);
        prop_assert!(ledger_sums.windows(2).all(|w| w[0] == w[1]));
        prop_assert_eq!(e.value(), half() * ledger_sums[0]);
    }

    #[test]
    fn sdda_exact_expectation(seed in any::<u64>(), horizon in 1usize..=9, d in 1u32..4) {
        let inst = to_rational(&int_instance(seed, horizon, d, 0.7, 20));
        let deadlines = vec![d; horizon];
        let e = expected_value_exact(horizon, |coins: &mut ScriptedCoins| {
            run_sdda_with(&inst, &deadlines, coins).unwrap().total_value
        })
        .unwrap();
        prop_assert_eq!(e.max_coins, horizon);
        let opt = offline_opt(&inst, &deadlines);
        prop_assert!(e.at_least(opt.value, 1, 8), "E={} OPT={}", e.value(), opt.value);
    }

    #[test]
    fn virtual_pairs_form_alternating_paths(seed in any::<u64>(), horizon in 1usize..80, d in 1u32..8) {
        let inst = to_f64(&int_instance(seed, horizon, d, 0.5, 100));
        let run = run_pdda(&inst, seed).unwrap();
        let paths = decompose_two_matching(&run.virtual_pairs, &run.roles).unwrap();
        let covered: usize = paths.iter().map(|p| p.len() - 1).sum();
        prop_assert_eq!(covered, run.virtual_pairs.len());
        prop_assert!(run.virtual_pairs.iter().all(|&(k, l)| k < l));
        prop_assert!(run.audits_pass());
    }

    #[test]
    fn unknown_departures_match_plain_pdda_under_constant_d(seed in any::<u64>(), horizon in 1usize..40, d in 1u32..6) {
        let inst = to_f64(&int_instance(seed, horizon, d, 0.5, 100));
        let a = run_pdda(&inst, seed).unwrap();
        let b = run_pdda_unknown_departures(&inst, seed).unwrap();
        prop_assert_eq!(&a.matching, &b.matching);
        prop_assert_eq!(&a.roles, &b.roles);
        prop_assert_eq!(a.coins_used, b.coins_used);
    }

    #[test]
    fn stochastic_variants_stay_certified(seed in any::<u64>(), horizon in 1usize..30, delta_pct in 20u32..80) {
        let base = to_f64(&int_instance(seed, horizon, horizon.max(1) as u32, 0.4, 50));
        let edges: Vec<_> = base.edges().collect();
        let inst = DynamicInstance::new(horizon, edges, DepartureModel::geometric(delta_pct as f64 / 100.0)).unwrap();
        let deadlines = inst.deadlines_for_seed(seed);
        let known = run_pdda_known_departures(&inst, &deadlines, seed).unwrap();
        prop_assert!(known.audits_pass(), "{:?}", known.failures().collect::<Vec<_>>());
        let unknown = run_pdda_unknown_departures(&inst, seed).unwrap();
        prop_assert!(unknown.audits_pass(), "{:?}", unknown.failures().collect::<Vec<_>>());
        let opt = offline_opt(&inst, &deadlines);
        prop_assert!(known.total_value <= opt.value + 1e-9);
        prop_assert!(unknown.total_value <= opt.value + 1e-9);
    }
}
