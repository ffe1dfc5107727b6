//! Comparison policies: Greedy, Patient, Batching(k), MDDA and Re-Opt.

use std::collections::VecDeque;

use petgraph::graph::UnGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rustworkx_core::max_weight_matching::max_weight_matching;

use crate::coins::coin_rng;
use crate::market::{
    event_stream, validate_matching, AuditRecord, Decision, DynamicInstance, Event, EventKind, RunResult,
    VertexId,
};
use crate::oracle::{max_weight_matching_exhaustive, EXHAUSTIVE_LIMIT};
use crate::Scalar;

/// Default batch lengths swept by experiments.
pub const DEFAULT_BATCH_GRID: [u32; 6] = [5, 10, 50, 100, 200, 300];

/// Maximum-weight matching of a pool of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolMatching<S> {
    pub value: S,
    pub pairs: Vec<(VertexId, VertexId)>,
}

/// Exact maximum-weight matching on the given vertices and edges: subset
/// search up to [`EXHAUSTIVE_LIMIT`] vertices, a blossom solver above.
pub fn pool_matching<S: Scalar>(vertices: &[VertexId], edges: &[(VertexId, VertexId, S)]) -> PoolMatching<S> {
    let index = |v: VertexId| vertices.binary_search(&v).expect("edge endpoint in pool");
    debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
    let local: Vec<(usize, usize, S)> = edges
        .iter()
        .filter(|&&(_, _, v)| v > S::zero())
        .map(|&(a, b, v)| (index(a), index(b), v))
        .collect();
    let pairs: Vec<(usize, usize)> = if vertices.len() <= EXHAUSTIVE_LIMIT {
        max_weight_matching_exhaustive(vertices.len(), &local).1
    } else {
        let mut graph: UnGraph<(), i128> = UnGraph::with_capacity(vertices.len(), local.len());
        let nodes: Vec<_> = vertices.iter().map(|_| graph.add_node(())).collect();
        for &(a, b, v) in &local {
            graph.add_edge(nodes[a], nodes[b], v.matching_weight());
        }
        let found = max_weight_matching(&graph, false, |e| Ok::<i128, ()>(*e.weight()), false)
            .expect("infallible weights");
        let mut pairs: Vec<(usize, usize)> = found.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        pairs
    };
    let mut value = S::zero();
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let (x, y) = (vertices[a], vertices[b]);
        let v = local
            .iter()
            .find(|&&(p, q, _)| (p, q) == (a, b) || (q, p) == (a, b))
            .map(|&(_, _, v)| v)
            .expect("solver matched along an edge");
        value = value + v;
        out.push((x.min(y), x.max(y)));
    }
    PoolMatching { value, pairs: out }
}

/// Vertices that have arrived and are neither matched nor departed.
struct Pool<'a, S> {
    instance: &'a DynamicInstance<S>,
    present: Vec<bool>,
}

impl<'a, S: Scalar> Pool<'a, S> {
    fn new(instance: &'a DynamicInstance<S>) -> Self {
        Self {
            instance,
            present: vec![false; instance.horizon() + 1],
        }
    }

    /// Highest-value present neighbor with a positive value; earliest on ties.
    fn best_neighbor(&self, k: VertexId) -> Option<(VertexId, S)> {
        let mut best: Option<(VertexId, S)> = None;
        for &(l, v) in self.instance.neighbors(k) {
            if self.present[l] && v > S::zero() && best.is_none_or(|(_, b)| v > b) {
                best = Some((l, v));
            }
        }
        best
    }

    fn members(&self) -> Vec<VertexId> {
        (1..self.present.len()).filter(|&v| self.present[v]).collect()
    }

    fn edges_within(&self, vertices: &[VertexId]) -> Vec<(VertexId, VertexId, S)> {
        let mut out = Vec::new();
        for &a in vertices {
            for &(b, v) in self.instance.neighbors(a) {
                if a < b && self.present[b] && v > S::zero() {
                    out.push((a, b, v));
                }
            }
        }
        out
    }

    /// Present vertices reachable from `k` over positive edges, ascending.
    fn component(&self, k: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.present.len()];
        let mut queue = VecDeque::from([k]);
        seen[k] = true;
        let mut out = vec![k];
        while let Some(a) = queue.pop_front() {
            for &(b, v) in self.instance.neighbors(a) {
                if self.present[b] && !seen[b] && v > S::zero() {
                    seen[b] = true;
                    out.push(b);
                    queue.push_back(b);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn finish<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32], mut result: RunResult<S>) -> RunResult<S> {
    result.audit.push(validate_matching(instance, &result.matching, deadlines));
    result
}

pub fn run_greedy<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32]) -> RunResult<S> {
    let mut pool = Pool::new(instance);
    let mut result = RunResult::new("greedy", 0, deadlines.to_vec());
    for event in event_stream(deadlines) {
        let k = event.vertex;
        let decision = match event.kind {
            EventKind::Arrival => match pool.best_neighbor(k) {
                Some((l, v)) => {
                    pool.present[l] = false;
                    result.record_match(k, l, event.time, v);
                    Decision::Matched { partner: l, value: v }
                }
                None => {
                    pool.present[k] = true;
                    Decision::Joined
                }
            },
            EventKind::Critical => depart(&mut pool, k),
        };
        result.push_trace(event, decision);
    }
    finish(instance, deadlines, result)
}

fn depart<S: Scalar>(pool: &mut Pool<'_, S>, k: VertexId) -> Decision<S> {
    if pool.present[k] {
        pool.present[k] = false;
        Decision::DepartedUnmatched
    } else {
        Decision::Inert
    }
}

/// Matches a critical vertex to its best present neighbor, if any.
fn match_critical<S: Scalar>(pool: &mut Pool<'_, S>, result: &mut RunResult<S>, event: Event) -> Decision<S> {
    let k = event.vertex;
    if !pool.present[k] {
        return Decision::Inert;
    }
    pool.present[k] = false;
    match pool.best_neighbor(k) {
        Some((l, v)) => {
            pool.present[l] = false;
            result.record_match(k, l, event.time, v);
            Decision::Matched { partner: l, value: v }
        }
        None => Decision::DepartedUnmatched,
    }
}

pub fn run_patient<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32]) -> RunResult<S> {
    let mut pool = Pool::new(instance);
    let mut result = RunResult::new("patient", 0, deadlines.to_vec());
    for event in event_stream(deadlines) {
        let decision = match event.kind {
            EventKind::Arrival => {
                pool.present[event.vertex] = true;
                Decision::Joined
            }
            EventKind::Critical => match_critical(&mut pool, &mut result, event),
        };
        result.push_trace(event, decision);
    }
    finish(instance, deadlines, result)
}

pub fn run_batching<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32], k: u32) -> RunResult<S> {
    run_batching_with(instance, deadlines, k, false)
}

/// Batching(k). Batches run at `t = k, 2k, ...` after that step's arrival
/// and before its critical events. With `rescue`, a vertex that becomes
/// critical between batches is matched to its best present neighbor
/// instead of leaving. Batch instants appear in the trace against a
/// pseudo-event with vertex 0.
pub fn run_batching_with<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    k: u32,
    rescue: bool,
) -> RunResult<S> {
    assert!(k >= 1, "batch length must be positive");
    let mut pool = Pool::new(instance);
    let name = if rescue { format!("batching:{k}+rescue") } else { format!("batching:{k}") };
    let mut result = RunResult::new(name, 0, deadlines.to_vec());
    let events = event_stream(deadlines);
    let last = events.last().map_or(0, |e| e.time);
    let mut next_batch = k as u64;
    let mut i = 0;
    while i < events.len() || next_batch <= last {
        let batch_due = next_batch <= last
            && (i == events.len() || {
                let e = events[i];
                e.time > next_batch || (e.time == next_batch && e.kind == EventKind::Critical)
            });
        if batch_due {
            let t = next_batch;
            let members = pool.members();
            let edges = pool.edges_within(&members);
            let solved = pool_matching(&members, &edges);
            for &(a, b) in &solved.pairs {
                pool.present[a] = false;
                pool.present[b] = false;
                let v = instance.value(a, b).expect("pool edge");
                result.record_match(a, b, t, v);
            }
            let marker = Event {
                time: t,
                kind: EventKind::Critical,
                vertex: 0,
            };
            result.push_trace(marker, Decision::Batch { pairs: solved.pairs.len() });
            next_batch += k as u64;
            continue;
        }
        let event = events[i];
        i += 1;
        let decision = match event.kind {
            EventKind::Arrival => {
                pool.present[event.vertex] = true;
                Decision::Joined
            }
            EventKind::Critical if rescue => match_critical(&mut pool, &mut result, event),
            EventKind::Critical => depart(&mut pool, event.vertex),
        };
        result.push_trace(event, decision);
    }
    finish(instance, deadlines, result)
}

/// Re-Opt: a critical vertex is finalized with its partner in a
/// maximum-weight matching of the current pool. Only the critical vertex's
/// connected component is solved, which yields the same partner.
pub fn run_reopt<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32]) -> RunResult<S> {
    let mut pool = Pool::new(instance);
    let mut result = RunResult::new("reopt", 0, deadlines.to_vec());
    let mut solves = 0usize;
    for event in event_stream(deadlines) {
        let k = event.vertex;
        let decision = match event.kind {
            EventKind::Arrival => {
                pool.present[k] = true;
                Decision::Joined
            }
            EventKind::Critical if !pool.present[k] => Decision::Inert,
            EventKind::Critical => {
                let members = pool.component(k);
                if members.len() < 2 {
                    pool.present[k] = false;
                    Decision::DepartedUnmatched
                } else {
                    let edges = pool.edges_within(&members);
                    let solved = pool_matching(&members, &edges);
                    solves += 1;
                    pool.present[k] = false;
                    let partner = solved
                        .pairs
                        .iter()
                        .find_map(|&(a, b)| if a == k { Some(b) } else if b == k { Some(a) } else { None });
                    match partner {
                        Some(l) => {
                            pool.present[l] = false;
                            let v = instance.value(k, l).expect("pool edge");
                            result.record_match(k, l, event.time, v);
                            Decision::Matched { partner: l, value: v }
                        }
                        None => Decision::DepartedUnmatched,
                    }
                }
            }
        };
        result.push_trace(event, decision);
    }
    result
        .audit
        .push(AuditRecord::pass("pool-solves", format!("{solves} exact pool matchings")));
    finish(instance, deadlines, result)
}

/// Result of one bidding round on a pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BidRound {
    pub bids: usize,
    pub cap_hit: bool,
}

/// Tentative matching and prices of the non-bipartite auction.
#[derive(Debug, Clone)]
pub struct MddaPool<S> {
    adjacency: Vec<Vec<(VertexId, S)>>,
    present: Vec<bool>,
    mate: Vec<Option<VertexId>>,
    price: Vec<S>,
}

impl<S: Scalar> MddaPool<S> {
    /// `adjacency[v]` lists `(neighbor, value)` for vertex ids `0..len`.
    pub fn new(adjacency: Vec<Vec<(VertexId, S)>>) -> Self {
        let n = adjacency.len();
        Self {
            adjacency,
            present: vec![false; n],
            mate: vec![None; n],
            price: vec![S::zero(); n],
        }
    }

    pub fn insert(&mut self, v: VertexId) {
        self.present[v] = true;
    }

    /// Takes `v` out of the pool together with its tentative partner.
    pub fn remove(&mut self, v: VertexId) -> Option<VertexId> {
        self.present[v] = false;
        let m = self.mate[v].take();
        if let Some(m) = m {
            self.present[m] = false;
            self.mate[m] = None;
        }
        m
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        self.mate[v]
    }

    pub fn price(&self, v: VertexId) -> S {
        self.price[v]
    }

    pub fn pool_size(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    fn value(&self, a: VertexId, b: VertexId) -> S {
        self.adjacency[a]
            .iter()
            .find(|&&(x, _)| x == b)
            .map(|&(_, v)| v)
            .expect("matched along an edge")
    }

    /// Tentative pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        (0..self.mate.len())
            .filter_map(|a| self.mate[a].filter(|&b| a < b).map(|b| (a, b)))
            .collect()
    }

    pub fn weight(&self) -> S {
        crate::scalar::total(self.pairs().into_iter().map(|(a, b)| self.value(a, b)))
    }

    /// Best `(neighbor, margin)` for `u` at current prices; earliest on ties.
    fn best_bid(&self, u: VertexId) -> Option<(VertexId, S)> {
        let mut best: Option<(VertexId, S)> = None;
        for &(j, v) in &self.adjacency[u] {
            if !self.present[j] || v <= S::zero() {
                continue;
            }
            let margin = v - self.price[j];
            if best.is_none_or(|(_, m)| margin > m) {
                best = Some((j, margin));
            }
        }
        best.filter(|&(_, m)| m > S::tolerance())
    }

    /// Restarts the auction on the present pool: prices and tentative
    /// pairs are cleared, then a uniformly chosen unmatched vertex bids on
    /// its best neighbor until no unmatched vertex has a positive margin,
    /// or `n^2` bids have been placed. Both ends of a new pair are priced
    /// at its value and a displaced vertex is freed at price zero, so each
    /// bid raises the tentative weight.
    pub fn bid_round(&mut self, rng: &mut ChaCha8Rng) -> BidRound {
        let members: Vec<VertexId> = (0..self.present.len()).filter(|&v| self.present[v]).collect();
        for &v in &members {
            self.price[v] = S::zero();
            self.mate[v] = None;
        }
        let cap = members.len() * members.len();
        let mut bids = 0;
        loop {
            let eligible: Vec<(VertexId, VertexId)> = members
                .iter()
                .filter(|&&u| self.mate[u].is_none())
                .filter_map(|&u| self.best_bid(u).map(|(j, _)| (u, j)))
                .collect();
            if eligible.is_empty() {
                return BidRound { bids, cap_hit: false };
            }
            if bids >= cap {
                return BidRound { bids, cap_hit: true };
            }
            let (u, j) = eligible[rng.random_range(0..eligible.len())];
            if let Some(w) = self.mate[j] {
                self.mate[w] = None;
                self.price[w] = S::zero();
            }
            let v = self.value(u, j);
            self.mate[j] = Some(u);
            self.mate[u] = Some(j);
            self.price[j] = v;
            self.price[u] = v;
            bids += 1;
        }
    }

    /// Present vertices in id order.
    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.present.len()).filter(|&v| self.present[v])
    }

    /// Edges of `v` to present vertices.
    pub fn present_neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, S)> + '_ {
        self.adjacency[v].iter().copied().filter(|&(j, _)| self.present[j])
    }
}

pub fn run_mdda<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32], seed: u64) -> RunResult<S> {
    let mut rng = coin_rng(seed);
    let adjacency: Vec<Vec<(VertexId, S)>> =
        (0..=instance.horizon()).map(|k| instance.neighbors(k).to_vec()).collect();
    let mut pool = MddaPool::new(adjacency);
    let mut result = RunResult::new("mdda", seed, deadlines.to_vec());
    let mut cap_hits = 0usize;
    let mut rounds = 0usize;
    for event in event_stream(deadlines) {
        let k = event.vertex;
        match event.kind {
            EventKind::Arrival => {
                pool.insert(k);
                let round = pool.bid_round(&mut rng);
                rounds += 1;
                if round.cap_hit {
                    cap_hits += 1;
                }
                result.push_trace(
                    event,
                    Decision::Tentative {
                        bids: round.bids,
                        cap_hit: round.cap_hit,
                    },
                );
            }
            EventKind::Critical => {
                let decision = if !pool.present[k] {
                    Decision::Inert
                } else {
                    match pool.remove(k) {
                        Some(l) => {
                            let v = instance.value(k, l).expect("tentative pair is an edge");
                            result.record_match(k, l, event.time, v);
                            Decision::Matched { partner: l, value: v }
                        }
                        None => Decision::DepartedUnmatched,
                    }
                };
                result.push_trace(event, decision);
            }
        }
    }
    result.audit.push(AuditRecord::pass(
        "bid-cap",
        format!("{cap_hits} of {rounds} bidding rounds hit the cap"),
    ));
    finish(instance, deadlines, result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::DepartureModel;
    use rand::SeedableRng;

    fn figure1(y: f64) -> DynamicInstance<f64> {
        DynamicInstance::new(3, [(1, 2, 1.0), (2, 3, y)], DepartureModel::constant(1)).unwrap()
    }

    fn tightness(eps: f64) -> DynamicInstance<f64> {
        DynamicInstance::new(
            4,
            [(1, 3, 1.0 - eps), (2, 3, 1.0), (2, 4, 1.0)],
            DepartureModel::constant(2),
        )
        .unwrap()
    }

    #[test]
    fn greedy_takes_the_first_edge() {
        let run = run_greedy(&figure1(10.0), &[1; 3]);
        assert_eq!(run.total_value, 1.0);
        assert_eq!(run.matching.pairs()[0].time, 2);
        assert!(run.audits_pass());
    }

    #[test]
    fn patient_matches_at_the_deadline() {
        let run = run_patient(&figure1(10.0), &[1; 3]);
        assert_eq!(run.total_value, 1.0);
        assert_eq!(run.matching.pairs()[0].time, 2);
        assert!(run.audits_pass());
    }

    #[test]
    fn trivial_instances() {
        let zero = DynamicInstance::new(2, [(1, 2, 0.0)], DepartureModel::constant(1)).unwrap();
        assert_eq!(run_greedy(&zero, &[1, 1]).total_value, 0.0);
        assert_eq!(run_patient(&zero, &[1, 1]).matching.len(), 0);
        let pair = DynamicInstance::new(2, [(1, 2, 1.0)], DepartureModel::constant(1)).unwrap();
        assert_eq!(run_greedy(&pair, &[1, 1]).total_value, 1.0);
        let empty = DynamicInstance::<f64>::new(0, [], DepartureModel::constant(1)).unwrap();
        assert_eq!(run_reopt(&empty, &[]).total_value, 0.0);
        let isolated = DynamicInstance::<f64>::new(3, [], DepartureModel::constant(1)).unwrap();
        assert_eq!(run_patient(&isolated, &[1; 3]).total_value, 0.0);
    }

    #[test]
    fn batching_two_on_figure_one() {
        let run = run_batching(&figure1(3.0), &[1; 3], 2);
        assert_eq!(run.total_value, 1.0);
        assert_eq!(run.matching.pairs()[0].time, 2);
        assert!(run.audits_pass());
        let batches = run
            .trace
            .iter()
            .filter(|e| matches!(e.decision, Decision::Batch { .. }))
            .count();
        assert_eq!(batches, 2);
    }

    #[test]
    fn strict_batching_lets_vertices_leave_between_batches() {
        // Vertex 1 is critical at t=2, before the batch at t=3.
        let inst = DynamicInstance::new(2, [(1, 2, 1.0)], DepartureModel::constant(1)).unwrap();
        assert_eq!(run_batching(&inst, &[1, 1], 3).total_value, 0.0);
        assert_eq!(run_batching_with(&inst, &[1, 1], 3, true).total_value, 1.0);
    }

    #[test]
    fn reopt_on_tightness() {
        let run = run_reopt(&tightness(0.1), &[2; 4]);
        assert_eq!(run.total_value, 1.0);
        assert!(run.audits_pass());
        assert!(!run.matching.is_matched(1));
    }

    #[test]
    fn reopt_waits_for_the_better_edge() {
        let run = run_reopt(&figure1(10.0), &[1; 3]);
        // At Crit(1)@2 the pool {1,2} only has edge (1,2).
        assert_eq!(run.total_value, 1.0);
        let inst = DynamicInstance::new(3, [(1, 2, 1.0), (2, 3, 10.0)], DepartureModel::constant(2)).unwrap();
        let run = run_reopt(&inst, &[2; 3]);
        assert_eq!(run.total_value, 10.0);
    }

    #[test]
    fn pool_solvers_agree_above_the_exhaustive_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = 20;
            let vertices: Vec<usize> = (1..=n).collect();
            let mut edges = Vec::new();
            for a in 1..=n {
                for b in (a + 1)..=n {
                    if rng.random_bool(0.25) {
                        edges.push((a, b, rng.random_range(1..50) as i64));
                    }
                }
            }
            let blossom = pool_matching(&vertices, &edges);
            let local: Vec<_> = edges.iter().map(|&(a, b, v)| (a - 1, b - 1, v)).collect();
            let (exact, _) = max_weight_matching_exhaustive(n, &local);
            assert_eq!(blossom.value, exact);
        }
    }

    #[test]
    fn mdda_triangle_converges_to_best_edge() {
        let adjacency = vec![
            vec![],
            vec![(2, 1.0), (3, 2.0)],
            vec![(1, 1.0), (3, 2.5)],
            vec![(1, 2.0), (2, 2.5)],
        ];
        for seed in 0..50 {
            let mut pool = MddaPool::new(adjacency.clone());
            for v in 1..=3 {
                pool.insert(v);
            }
            let round = pool.bid_round(&mut coin_rng(seed));
            assert!(!round.cap_hit);
            assert_eq!(pool.pairs(), vec![(2, 3)], "seed {seed}");
        }
    }

    #[test]
    fn mdda_low_bid_cannot_break_a_richer_pair() {
        let adjacency = vec![vec![], vec![(2, 10.0)], vec![(1, 10.0), (3, 1.0)], vec![(2, 1.0)]];
        for seed in 0..50 {
            let mut pool = MddaPool::new(adjacency.clone());
            for v in 1..=3 {
                pool.insert(v);
            }
            pool.bid_round(&mut coin_rng(seed));
            assert_eq!(pool.pairs(), vec![(1, 2)], "seed {seed}");
            assert_eq!(pool.price(3), 0.0);
        }
    }

    #[test]
    fn mdda_single_edge() {
        let inst = DynamicInstance::new(2, [(1, 2, 3.0)], DepartureModel::constant(1)).unwrap();
        let run = run_mdda(&inst, &[1, 1], 0);
        assert_eq!(run.total_value, 3.0);
        assert!(run.audits_pass());
    }
}
