use num_rational::Ratio;
use proptest::prelude::*;

use super::*;
use crate::oracle::max_weight_bipartite;

fn s(i: usize) -> SellerId {
    SellerId(i)
}

fn b(i: usize) -> BuyerId {
    BuyerId(i)
}

fn all_pass(state: &AuctionState<impl Scalar>) {
    for rec in state.audit() {
        assert!(rec.passed, "{rec}");
    }
}

#[test]
fn lone_seller_has_zero_price() {
    let mut st = AuctionState::<f64>::new();
    st.add_seller(s(1)).unwrap();
    assert_eq!(st.price(s(1)), Some(0.0));
    assert_eq!(st.seller_mate(s(1)), None);
    all_pass(&st);
}

#[test]
fn single_edge_then_outbid() {
    let mut st = AuctionState::<f64>::new().with_history();
    st.add_seller(s(1)).unwrap();
    let out = st.add_buyer(b(2), [(s(1), 5.0)]).unwrap();
    assert_eq!(out.initial_margin, 5.0);
    assert_eq!(out.matched_to, Some(s(1)));
    assert_eq!(st.price(s(1)), Some(0.0));
    assert_eq!(st.ledger().initial_margin(b(2)), Some(5.0));

    let before = st.price(s(1)).unwrap() + st.margin(b(2)).unwrap();
    let out = st.add_buyer(b(3), [(s(1), 7.0)]).unwrap();
    assert_eq!(st.price(s(1)), Some(5.0));
    assert_eq!(st.margin(b(3)), Some(2.0));
    assert_eq!(st.margin(b(2)), Some(0.0));
    assert_eq!(st.seller_mate(s(1)), Some(b(3)));
    assert_eq!(out.initial_margin, 2.0);
    assert_eq!(out.conservation_gap, 0.0);
    assert_eq!(st.price(s(1)).unwrap() + st.margin(b(2)).unwrap(), before);
    all_pass(&st);

    // The 1x2 assignment and its dual, solved independently.
    let (opt, pairs) = max_weight_bipartite(1, 2, &[(0, 0, 5.0), (0, 1, 7.0)]);
    assert_eq!(opt, st.tentative_weight());
    assert_eq!(pairs, vec![(0, 1)]);
}

#[test]
fn second_buyer_that_bids_less_loses() {
    let mut st = AuctionState::<i64>::new();
    st.add_seller(s(1)).unwrap();
    st.add_buyer(b(2), [(s(1), 7)]).unwrap();
    let out = st.add_buyer(b(3), [(s(1), 5)]).unwrap();
    assert_eq!(out.initial_margin, 0);
    assert_eq!(out.matched_to, None);
    assert_eq!(st.seller_mate(s(1)), Some(b(2)));
    assert_eq!(st.price(s(1)), Some(5));
    assert_eq!(st.margin(b(2)), Some(2));
    all_pass(&st);
}

#[test]
fn equal_bids_keep_the_incumbent() {
    let mut st = AuctionState::<i64>::new();
    st.add_seller(s(1)).unwrap();
    st.add_buyer(b(2), [(s(1), 4)]).unwrap();
    st.add_buyer(b(3), [(s(1), 4)]).unwrap();
    assert_eq!(st.seller_mate(s(1)), Some(b(2)));
    assert_eq!(st.price(s(1)), Some(4));
    assert_eq!(st.margin(b(2)), Some(0));
    assert_eq!(st.margin(b(3)), Some(0));
    all_pass(&st);
}

#[test]
fn buyer_without_neighbors_has_zero_margin() {
    let mut st = AuctionState::<f64>::new();
    let out = st.add_buyer(b(1), []).unwrap();
    assert_eq!(out.initial_margin, 0.0);
    assert_eq!(out.dual_updates, 0);
    assert_eq!(st.stranded_buyers(), vec![b(1)]);
    assert_eq!(st.remove_buyer(b(1)).unwrap(), 0.0);
    assert_eq!(st.ledger().final_margin(b(1)), Some(0.0));
}

#[test]
fn tightness_replay() {
    let eps = 0.1;
    let mut st = AuctionState::<f64>::new().with_history().with_step_trace();
    st.add_seller(s(1)).unwrap();
    st.add_seller(s(2)).unwrap();
    assert_eq!(st.price(s(1)), Some(0.0));
    assert_eq!(st.price(s(2)), Some(0.0));

    // t = 3: buyer 3 prefers seller 2.
    let out = st.add_buyer(b(3), [(s(1), 1.0 - eps), (s(2), 1.0)]).unwrap();
    assert_eq!(out.matched_to, Some(s(2)));
    assert_eq!(out.initial_margin, 1.0);
    all_pass(&st);

    // Seller 1 becomes critical before buyer 4 arrives.
    let exit = st.finalize_seller(s(1)).unwrap();
    assert_eq!(exit.partner, None);
    assert_eq!(exit.final_price, 0.0);

    // t = 4: buyer 4 contests seller 2 and loses the tie.
    let out = st.add_buyer(b(4), [(s(2), 1.0)]).unwrap();
    assert_eq!(st.price(s(2)), Some(1.0));
    assert_eq!(out.initial_margin, 0.0);
    assert_eq!(st.margin(b(3)), Some(0.0));
    assert_eq!(st.seller_mate(s(2)), Some(b(3)));
    assert!(out.conservation_gap.abs() < 1e-12);
    all_pass(&st);
    for step in st.step_trace() {
        assert_eq!(step.red_sellers.len() + 1, step.blue_buyers.len());
    }

    let exit = st.finalize_seller(s(2)).unwrap();
    assert_eq!(exit.partner, Some((b(3), 1.0)));
    assert_eq!(exit.final_price, 1.0);
    assert!(!st.has_buyer(b(3)));
    assert_eq!(st.remove_buyer(b(4)).unwrap(), 0.0);

    let ledger = st.ledger();
    assert!(ledger.is_complete());
    assert!(ledger.identity_gap().abs() < 1e-12);
    assert!(ledger.check().iter().all(|r| r.passed));
}

#[test]
fn argmax_ties_go_to_lowest_seller() {
    let mut st = AuctionState::<i64>::new();
    st.add_seller(s(2)).unwrap();
    st.add_seller(s(1)).unwrap();
    st.add_buyer(b(3), [(s(2), 3), (s(1), 3)]).unwrap();
    assert_eq!(st.buyer_mate(b(3)), Some(s(1)));
}

#[test]
fn engine_errors() {
    let mut st = AuctionState::<f64>::new();
    st.add_seller(s(1)).unwrap();
    assert_eq!(st.add_seller(s(1)), Err(EngineError::DuplicateSeller(1)));
    assert_eq!(
        st.add_buyer(b(2), [(s(9), 1.0)]).unwrap_err(),
        EngineError::UnknownSeller(9)
    );
    assert_eq!(
        st.add_buyer(b(2), [(s(1), 1.0), (s(1), 2.0)]).unwrap_err(),
        EngineError::DuplicateEdge { seller: 1, buyer: 2 }
    );
    assert_eq!(
        st.add_buyer(b(2), [(s(1), -1.0)]).unwrap_err(),
        EngineError::NegativeValue { seller: 1, buyer: 2 }
    );
    // Failed arrivals leave no trace.
    assert!(!st.has_buyer(b(2)));
    st.add_buyer(b(2), [(s(1), 1.0)]).unwrap();
    assert_eq!(st.add_buyer(b(2), []).unwrap_err(), EngineError::DuplicateBuyer(2));
    assert_eq!(st.remove_buyer(b(2)), Err(EngineError::BuyerStillMatched(2)));
    assert_eq!(st.remove_buyer(b(7)), Err(EngineError::UnknownBuyer(7)));
    assert_eq!(st.finalize_seller(s(5)), Err(EngineError::UnknownSeller(5)));
}

#[test]
fn loose_matched_pair_fails_cs1() {
    let mut st = AuctionState::<f64>::new();
    st.add_seller(s(1)).unwrap();
    st.add_buyer(b(2), [(s(1), 5.0)]).unwrap();
    st.force_margin(b(2), 6.0);
    let audit = st.audit();
    let cs1 = audit.iter().find(|r| r.name == "cs1-tight-matches").unwrap();
    assert!(!cs1.passed);
    assert!(cs1.detail.contains("(1,2)"));
    let feasible = audit.iter().find(|r| r.name == "dual-feasibility").unwrap();
    assert!(feasible.passed);
}

#[test]
fn unmatched_buyer_is_never_reached_again() {
    let mut st = AuctionState::<i64>::new();
    st.add_seller(s(1)).unwrap();
    st.add_seller(s(2)).unwrap();
    st.add_buyer(b(3), [(s(1), 4)]).unwrap();
    st.add_buyer(b(4), [(s(1), 3)]).unwrap();
    assert_eq!(st.buyer_mate(b(4)), None);
    st.add_buyer(b(5), [(s(1), 6), (s(2), 1)]).unwrap();
    // b5 takes s1 only if 6 - p1 beats 1 - p2.
    let weight = st.tentative_weight();
    let (opt, _) = max_weight_bipartite(2, 3, &[(0, 0, 4i64), (0, 1, 3), (0, 2, 6), (1, 2, 1)]);
    assert_eq!(weight, opt);
    assert_eq!(st.margin(b(4)), Some(0));
    all_pass(&st);
}

#[test]
fn rational_duals_stay_exact() {
    let r = |n: i64, d: i64| Ratio::new(n, d);
    let mut st = AuctionState::<Ratio<i64>>::new().with_history();
    st.add_seller(s(1)).unwrap();
    st.add_seller(s(2)).unwrap();
    st.add_buyer(b(3), [(s(1), r(1, 3)), (s(2), r(1, 7))]).unwrap();
    let out = st.add_buyer(b(4), [(s(1), r(2, 5)), (s(2), r(1, 11))]).unwrap();
    assert_eq!(out.conservation_gap, r(0, 1));
    let (opt, _) = max_weight_bipartite(
        2,
        2,
        &[(0, 0, r(1, 3)), (1, 0, r(1, 7)), (0, 1, r(2, 5)), (1, 1, r(1, 11))],
    );
    assert_eq!(st.tentative_weight(), opt);
    all_pass(&st);
}

#[derive(Debug, Clone)]
enum Op {
    Seller,
    Buyer(Vec<(usize, i64)>),
    FinalizeSeller(usize),
    RemoveBuyer(usize),
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => Just(Op::Seller),
        4 => prop::collection::vec((0usize..10, 0i64..=100), 0..5).prop_map(Op::Buyer),
        2 => (0usize..10).prop_map(Op::FinalizeSeller),
        1 => (0usize..10).prop_map(Op::RemoveBuyer),
    ]
}

/// Maximum-weight matching of the present graph, solved from scratch.
fn present_optimum(st: &AuctionState<i64>) -> i64 {
    let sellers: Vec<SellerId> = st.sellers().collect();
    let buyers: Vec<BuyerId> = st.buyers().collect();
    let edges: Vec<(usize, usize, i64)> = st
        .present_edges()
        .into_iter()
        .map(|(x, y, v)| {
            let si = sellers.iter().position(|&z| z == x).unwrap();
            let bi = buyers.iter().position(|&z| z == y).unwrap();
            (si, bi, v)
        })
        .collect();
    let left: Vec<_> = edges.iter().map(|&(a, bb, v)| (a, sellers.len() + bb, v)).collect();
    let (v, _) = crate::oracle::max_weight_matching_exhaustive(sellers.len() + buyers.len(), &left);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_scripts_keep_every_invariant(ops in prop::collection::vec(op_strategy(), 1..40)) {
        let mut st = AuctionState::<i64>::new().with_history().with_step_trace();
        let mut next_id = 1usize;
        for op in ops {
            match op {
                Op::Seller => {
                    st.add_seller(SellerId(next_id)).unwrap();
                    next_id += 1;
                }
                Op::Buyer(raw) => {
                    let sellers: Vec<SellerId> = st.sellers().collect();
                    if st.buyers().count() >= 9 {
                        continue;
                    }
                    let mut edges: Vec<(SellerId, i64)> = Vec::new();
                    if !sellers.is_empty() {
                        for (pick, v) in raw {
                            let sel = sellers[pick % sellers.len()];
                            if edges.iter().all(|&(x, _)| x != sel) {
                                edges.push((sel, v));
                            }
                        }
                    }
                    let before = st.dual_sum();
                    let out = st.add_buyer(BuyerId(next_id), edges).unwrap();
                    next_id += 1;
                    prop_assert_eq!(out.conservation_gap, 0);
                    prop_assert_eq!(st.dual_sum() - out.initial_margin, before);
                    prop_assert_eq!(st.tentative_weight(), present_optimum(&st));
                    prop_assert!(st.mates_consistent());
                    for rec in st.audit() {
                        prop_assert!(rec.passed, "{}", rec);
                    }
                }
                Op::FinalizeSeller(pick) => {
                    let sellers: Vec<SellerId> = st.sellers().collect();
                    if sellers.is_empty() {
                        continue;
                    }
                    let id = sellers[pick % sellers.len()];
                    let price = st.price(id).unwrap();
                    let mate = st.seller_mate(id);
                    let exit = st.finalize_seller(id).unwrap();
                    prop_assert_eq!(exit.final_price, price);
                    prop_assert_eq!(exit.partner.map(|p| p.0), mate);
                    if mate.is_none() {
                        prop_assert_eq!(price, 0);
                    }
                }
                Op::RemoveBuyer(pick) => {
                    let free: Vec<BuyerId> =
                        st.buyers().filter(|&x| st.buyer_mate(x).is_none()).collect();
                    if free.is_empty() {
                        continue;
                    }
                    let id = free[pick % free.len()];
                    prop_assert_eq!(st.remove_buyer(id).unwrap(), 0);
                }
            }
        }
        for step in st.step_trace() {
            prop_assert_eq!(step.red_sellers.len() + 1, step.blue_buyers.len());
            prop_assert!(step.delta > 0);
        }
        // Drain the market so every vertex is resolved.
        let sellers: Vec<SellerId> = st.sellers().collect();
        for id in sellers {
            st.finalize_seller(id).unwrap();
        }
        let buyers: Vec<BuyerId> = st.buyers().collect();
        for id in buyers {
            st.remove_buyer(id).unwrap();
        }
        prop_assert!(st.ledger().is_complete());
        prop_assert_eq!(st.ledger().identity_gap(), 0);
        for rec in st.ledger().check() {
            prop_assert!(rec.passed, "{}", rec);
        }
    }

    #[test]
    fn float_engine_tracks_integer_engine(
        ops in prop::collection::vec(op_strategy(), 1..30),
    ) {
        let mut exact = AuctionState::<i64>::new();
        let mut float = AuctionState::<f64>::new();
        let mut next_id = 1usize;
        for op in ops {
            match op {
                Op::Seller => {
                    exact.add_seller(SellerId(next_id)).unwrap();
                    float.add_seller(SellerId(next_id)).unwrap();
                    next_id += 1;
                }
                Op::Buyer(raw) => {
                    let sellers: Vec<SellerId> = exact.sellers().collect();
                    let mut edges: Vec<(SellerId, i64)> = Vec::new();
                    if !sellers.is_empty() {
                        for (pick, v) in raw {
                            let sel = sellers[pick % sellers.len()];
                            if edges.iter().all(|&(x, _)| x != sel) {
                                edges.push((sel, v));
                            }
                        }
                    }
                    let fe: Vec<(SellerId, f64)> = edges.iter().map(|&(x, v)| (x, v as f64)).collect();
                    exact.add_buyer(BuyerId(next_id), edges).unwrap();
                    float.add_buyer(BuyerId(next_id), fe).unwrap();
                    next_id += 1;
                    prop_assert_eq!(exact.tentative_weight() as f64, float.tentative_weight());
                }
                Op::FinalizeSeller(pick) => {
                    let sellers: Vec<SellerId> = exact.sellers().collect();
                    if sellers.is_empty() {
                        continue;
                    }
                    let id = sellers[pick % sellers.len()];
                    exact.finalize_seller(id).unwrap();
                    float.finalize_seller(id).unwrap();
                }
                Op::RemoveBuyer(_) => {}
            }
        }
    }
}
