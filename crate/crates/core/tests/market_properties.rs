mod common;

use common::{int_instance, random_roles, to_f64, with_random_deadlines};
use dynmatch::algorithms::AlgorithmError;
use dynmatch::pdda::PddaError;
use dynmatch::{event_stream, validate_matching, Algorithm, EventKind};
use proptest::prelude::*;

const ALL: &[&str] = &[
    "dda", "sdda", "pdda", "pdda-known", "pdda-unknown", "greedy", "batching:1", "batching:3", "patient", "mdda", "reopt",
];

proptest! {
    #[test]
    fn event_stream_order(deadlines in prop::collection::vec(0u32..6, 0..30)) {
        let events = event_stream(&deadlines);
        prop_assert_eq!(events.len(), 2 * deadlines.len());
        let mut arrived = vec![None; deadlines.len() + 1];
        for (pos, e) in events.iter().enumerate() {
            match e.kind {
                EventKind::Arrival => {
                    prop_assert_eq!(e.time, e.vertex as u64);
                    arrived[e.vertex] = Some(pos);
                }
                EventKind::Critical => {
                    prop_assert_eq!(e.time, e.vertex as u64 + deadlines[e.vertex - 1] as u64);
                    prop_assert!(arrived[e.vertex].is_some());
                }
            }
        }
        for w in events.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!(a.time <= b.time);
            if a.time == b.time {
                match (a.kind, b.kind) {
                    (EventKind::Critical, EventKind::Arrival) => prop_assert!(false, "arrival after critical at t={}", a.time),
                    (EventKind::Critical, EventKind::Critical) => prop_assert!(a.vertex < b.vertex),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn every_algorithm_is_valid_and_deterministic(seed in any::<u64>(), horizon in 1usize..24, d in 1u32..5) {
        let inst = to_f64(&int_instance(seed, horizon, d, 0.6, 50)).with_roles(&random_roles(seed, horizon));
        for name in ALL {
            let algo: Algorithm = name.parse().unwrap();
            let a = algo.run(&inst, seed).unwrap();
            let b = algo.run(&inst, seed).unwrap();
            prop_assert_eq!(&a.matching, &b.matching);
            prop_assert_eq!(&a.trace, &b.trace);
            prop_assert_eq!(a.total_value, b.total_value);
            prop_assert!(a.audits_pass(), "{}: {:?}", name, a.failures().collect::<Vec<_>>());
            prop_assert!(validate_matching(&inst, &a.matching, &a.deadlines).passed);
        }
    }

    #[test]
    fn per_vertex_deadlines_stay_valid(seed in any::<u64>(), horizon in 1usize..20) {
        let base = to_f64(&int_instance(seed, horizon, 4, 0.6, 20));
        let (inst, ds) = with_random_deadlines(&base, seed, 5);
        for name in ALL.iter().filter(|&&n| n != "dda") {
            let algo: Algorithm = name.parse().unwrap();
            let run = match algo.run_with_deadlines(&inst, &ds, seed) {
                Err(AlgorithmError::Pdda(PddaError::OutOfOrderDepartures { .. })) if *name == "pdda" => continue,
                other => other.unwrap(),
            };
            let check = validate_matching(&inst, &run.matching, &ds);
            prop_assert!(check.passed, "{}: {}", name, check);
        }
    }
}
