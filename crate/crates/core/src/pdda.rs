//! Deferred acceptance on general graphs. Every vertex enters a virtual
//! two-sided market as both a seller and a buyer; its real role is decided
//! by a coin only when it becomes critical, unless a neighbor already fixed
//! it by propagation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::auction::{AuctionState, BuyerId, EngineError, SellerId};
use crate::coins::{CoinSource, SeededCoins};
use crate::dda::conservation_record;
use crate::market::{
    event_stream, validate_matching, AuditRecord, AuditTally, Decision, DynamicInstance, Event,
    EventKind, Role, RoleCause, RoleStatus, RunResult, VertexId,
};
use crate::oracle::{verify_certificate, DualCertificate};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PddaError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("vertex {vertex} is already a {current:?}, propagation tried {attempted:?}")]
    RoleConflict {
        vertex: VertexId,
        current: Role,
        attempted: Role,
    },
    #[error("edge ({i},{j}) leaves in reverse arrival order; use the known-departures variant")]
    OutOfOrderDepartures { i: VertexId, j: VertexId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("vertex {0} appears in more than two pairs")]
    DegreeExceeded(VertexId),
    #[error("the pairs contain a cycle through vertex {0}")]
    CycleDetected(VertexId),
    #[error("adjacent vertices {0} and {1} do not have opposite resolved roles")]
    RoleConflict(VertexId, VertexId),
}

/// The auxiliary market of seller copies `SellerId(k)` and buyer copies
/// `BuyerId(k)` together with the role status of each real vertex.
#[derive(Debug, Clone)]
pub struct VirtualMarket<S> {
    engine: AuctionState<S>,
    status: Vec<RoleStatus>,
    virtual_pairs: Vec<(VertexId, VertexId)>,
}

impl<S: Scalar> VirtualMarket<S> {
    pub fn new(horizon: usize) -> Self {
        Self {
            engine: AuctionState::new().with_history(),
            status: vec![RoleStatus::Undetermined; horizon + 1],
            virtual_pairs: Vec::new(),
        }
    }

    pub fn engine(&self) -> &AuctionState<S> {
        &self.engine
    }

    pub fn status(&self, k: VertexId) -> RoleStatus {
        self.status[k]
    }

    /// Finalized pairs `(k, l)`: seller copy of `k` with buyer copy of `l`.
    pub fn virtual_pairs(&self) -> &[(VertexId, VertexId)] {
        &self.virtual_pairs
    }

    fn propagate(&mut self, l: VertexId, role: Role) -> Result<bool, PddaError> {
        match self.status[l] {
            RoleStatus::Undetermined => {
                self.status[l] = RoleStatus::Resolved(role);
                Ok(true)
            }
            RoleStatus::Resolved(r) if r == role => Ok(false),
            RoleStatus::Resolved(r) => Err(PddaError::RoleConflict {
                vertex: l,
                current: r,
                attempted: role,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Deadlines known on arrival; buyer copies leave at their critical time.
    Known,
    /// Deadlines revealed only at the critical time; buyer copies never
    /// become critical and are collected once they have nothing to bid on.
    Revealed,
}

pub fn run_pdda<S: Scalar>(instance: &DynamicInstance<S>, seed: u64) -> Result<RunResult<S>, PddaError> {
    let deadlines = instance.deadlines_for_seed(seed);
    let mut coins = SeededCoins::new(seed);
    let mut result = run_pdda_with(instance, &deadlines, &mut coins)?;
    result.seed = seed;
    Ok(result)
}

pub fn run_pdda_with<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
) -> Result<RunResult<S>, PddaError> {
    check_departure_order(instance, deadlines)?;
    run_core(instance, deadlines, coins, Mode::Known, "pdda", |_, _| {})
}

fn check_departure_order<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32]) -> Result<(), PddaError> {
    match instance
        .edges()
        .find(|&(i, j, _)| i + deadlines[i - 1] as usize > j + deadlines[j - 1] as usize)
    {
        Some((i, j, _)) => Err(PddaError::OutOfOrderDepartures { i, j }),
        None => Ok(()),
    }
}

/// PDDA that calls `observe` after every event with the virtual market.
pub fn run_pdda_observed<S, F>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
    observe: F,
) -> Result<RunResult<S>, PddaError>
where
    S: Scalar,
    F: FnMut(&Event, &VirtualMarket<S>),
{
    check_departure_order(instance, deadlines)?;
    run_core(instance, deadlines, coins, Mode::Known, "pdda", observe)
}

/// Drops every edge whose endpoints leave in the opposite order from the
/// one in which they arrived: `(i, j)`, `i < j`, goes iff `i + d_i > j + d_j`.
pub fn drop_out_of_order_edges<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
) -> DynamicInstance<S> {
    instance.filter_edges(|i, j, _| i + deadlines[i - 1] as usize <= j + deadlines[j - 1] as usize)
}

pub fn run_pdda_known_departures<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    seed: u64,
) -> Result<RunResult<S>, PddaError> {
    let mut coins = SeededCoins::new(seed);
    let mut result = run_pdda_known_departures_with(instance, deadlines, &mut coins)?;
    result.seed = seed;
    Ok(result)
}

pub fn run_pdda_known_departures_with<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
) -> Result<RunResult<S>, PddaError> {
    let processed = drop_out_of_order_edges(instance, deadlines);
    let mut result = run_core(&processed, deadlines, coins, Mode::Known, "pdda-known", |_, _| {})?;
    result.audit.push(validate_matching(instance, &result.matching, deadlines));
    Ok(result)
}

/// Deadlines are drawn from the instance's departure model with `seed`
/// but the algorithm only learns each one when the vertex turns critical.
pub fn run_pdda_unknown_departures<S: Scalar>(
    instance: &DynamicInstance<S>,
    seed: u64,
) -> Result<RunResult<S>, PddaError> {
    let deadlines = instance.deadlines_for_seed(seed);
    let mut coins = SeededCoins::new(seed);
    let mut result = run_pdda_unknown_departures_with(instance, &deadlines, &mut coins)?;
    result.seed = seed;
    Ok(result)
}

pub fn run_pdda_unknown_departures_with<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
) -> Result<RunResult<S>, PddaError> {
    run_core(instance, deadlines, coins, Mode::Revealed, "pdda-unknown", |_, _| {})
}

fn run_core<S, F>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
    mode: Mode,
    name: &str,
    mut observe: F,
) -> Result<RunResult<S>, PddaError>
where
    S: Scalar,
    F: FnMut(&Event, &VirtualMarket<S>),
{
    let horizon = instance.horizon();
    let mut vm = VirtualMarket::new(horizon);
    let mut present = vec![false; horizon + 1];
    let mut result = RunResult::new(name, 0, deadlines.to_vec());
    let mut tally = AuditTally::default();
    let mut extra_audit = Vec::new();

    for event in event_stream(deadlines) {
        let k = event.vertex;
        let t = event.time;
        match event.kind {
            EventKind::Arrival => {
                present[k] = true;
                vm.engine.add_seller(SellerId(k))?;
                let edges: Vec<(SellerId, S)> = instance
                    .earlier_neighbors(k)
                    .map(|(l, v)| (SellerId(l), v))
                    .filter(|&(s, _)| vm.engine.has_seller(s))
                    .collect();
                let out = vm.engine.add_buyer(BuyerId(k), edges)?;
                tally.absorb(conservation_record(out.conservation_gap), t);
                tally.absorb_all(vm.engine.audit(), t);
                result.push_trace(
                    event,
                    Decision::Bid {
                        initial_margin: out.initial_margin,
                    },
                );
            }
            EventKind::Critical => {
                present[k] = false;
                if mode == Mode::Known && vm.engine.has_buyer(BuyerId(k)) {
                    let matched = vm.engine.buyer_mate(BuyerId(k));
                    tally.absorb(
                        AuditRecord::check(
                            "buyer-copy-free",
                            matched.is_none(),
                            matched.map_or_else(String::new, |s| {
                                format!("buyer copy {k} still held by seller copy {}", s.0)
                            }),
                        ),
                        t,
                    );
                    vm.engine.remove_buyer(BuyerId(k))?;
                }
                let partner = vm.engine.finalize_seller(SellerId(k))?.partner;

                if vm.status[k] == RoleStatus::Undetermined {
                    let role = if coins.flip() { Role::Seller } else { Role::Buyer };
                    vm.status[k] = RoleStatus::Resolved(role);
                    result.push_trace(
                        event,
                        Decision::RoleResolved {
                            vertex: k,
                            status: role,
                            cause: RoleCause::Coin,
                        },
                    );
                }
                let role = vm.status[k].role().expect("resolved above");

                let mut decision = if result.matching.is_matched(k) {
                    Decision::Inert
                } else {
                    Decision::DepartedUnmatched
                };
                if let Some((b, v)) = partner {
                    let l = b.0;
                    if mode == Mode::Revealed && !present[l] {
                        if role == Role::Seller {
                            decision = Decision::PartnerGone { partner: l };
                            extra_audit.push(
                                AuditRecord::pass(
                                    "partner-gone",
                                    format!("seller {k} held buyer copy {l}, which had already left"),
                                )
                                .at(t),
                            );
                        }
                    } else {
                        if role == Role::Seller {
                            result.record_match(k, l, t, v);
                            decision = Decision::Matched { partner: l, value: v };
                        }
                        let forced = role.opposite();
                        if vm.propagate(l, forced)? {
                            result.push_trace(
                                event,
                                Decision::RoleResolved {
                                    vertex: l,
                                    status: forced,
                                    cause: RoleCause::Propagation,
                                },
                            );
                        }
                        vm.virtual_pairs.push((k, l));
                    }
                }
                result.push_trace(event, decision);
            }
        }
        if mode == Mode::Revealed {
            collect_stranded(&mut vm.engine)?;
        }
        observe(&event, &vm);
    }
    collect_stranded(&mut vm.engine)?;

    let VirtualMarket {
        engine,
        status,
        virtual_pairs,
    } = vm;
    let ledger = engine.into_ledger();
    tally.absorb_all(ledger.check(), deadlines.len() as u64);
    let mut audit = tally.finish();
    audit.extend(extra_audit);

    let usable = instance.filter_edges(|i, j, _| j <= i + deadlines[i - 1] as usize);
    let certificate = DualCertificate::from_virtual(horizon, &ledger);
    audit.push(verify_certificate(&usable, &certificate, None));
    audit.push(validate_matching(instance, &result.matching, deadlines));
    let roles: Vec<RoleStatus> = status[1..].to_vec();
    audit.push(match decompose_two_matching(&virtual_pairs, &roles) {
        Ok(paths) => AuditRecord::pass("virtual-paths", format!("{} paths", paths.len())),
        Err(e) => AuditRecord::fail("virtual-paths", e.to_string()),
    });

    result.ledger = Some(ledger);
    result.audit = audit;
    result.roles = roles;
    result.virtual_pairs = virtual_pairs;
    result.coins_used = coins.used();
    Ok(result)
}

fn collect_stranded<S: Scalar>(engine: &mut AuctionState<S>) -> Result<(), EngineError> {
    for b in engine.stranded_buyers() {
        engine.remove_buyer(b)?;
    }
    Ok(())
}

/// Splits the finalized virtual pairs into vertex-disjoint paths, each
/// listed from its smaller endpoint. With `roles` non-empty (index `k - 1`)
/// consecutive vertices must carry opposite resolved roles.
pub fn decompose_two_matching(
    pairs: &[(VertexId, VertexId)],
    roles: &[RoleStatus],
) -> Result<Vec<Vec<VertexId>>, PathError> {
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in pairs {
        for (x, y) in [(a, b), (b, a)] {
            let list = adjacency.entry(x).or_default();
            list.push(y);
            if list.len() > 2 {
                return Err(PathError::DegreeExceeded(x));
            }
        }
    }

    let mut visited: BTreeMap<VertexId, bool> = adjacency.keys().map(|&v| (v, false)).collect();
    let mut paths = Vec::new();
    let ends: Vec<VertexId> = adjacency
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    for start in ends {
        if visited[&start] {
            continue;
        }
        let mut path = vec![start];
        visited.insert(start, true);
        let mut prev = None;
        let mut cur = start;
        loop {
            let next = adjacency[&cur].iter().copied().find(|&n| Some(n) != prev);
            match next {
                Some(n) if !visited[&n] => {
                    visited.insert(n, true);
                    path.push(n);
                    prev = Some(cur);
                    cur = n;
                }
                Some(n) => return Err(PathError::CycleDetected(n)),
                None => break,
            }
        }
        paths.push(path);
    }
    if let Some((&v, _)) = visited.iter().find(|(_, &seen)| !seen) {
        return Err(PathError::CycleDetected(v));
    }

    if !roles.is_empty() {
        for path in &paths {
            for w in path.windows(2) {
                let (a, b) = (roles[w[0] - 1].role(), roles[w[1] - 1].role());
                match (a, b) {
                    (Some(x), Some(y)) if x != y => {}
                    _ => return Err(PathError::RoleConflict(w[0], w[1])),
                }
            }
        }
    }
    for path in &mut paths {
        if path.first() > path.last() {
            path.reverse();
        }
    }
    paths.sort();
    Ok(paths)
}
