//! Deferred acceptance on two-sided markets: sellers wait until their
//! deadline and then take whichever buyer currently holds them.

use crate::auction::{AuctionState, BuyerId, EngineError, SellerId};
use crate::coins::{CoinSource, SeededCoins};
use crate::market::{
    event_stream, validate_matching, AuditRecord, AuditTally, Decision, DynamicInstance, Event,
    EventKind, InstanceError, Role, RoleStatus, RunResult,
};
use crate::oracle::{verify_certificate, DualCertificate};
use crate::Scalar;

/// An instance with fixed roles in which every edge runs from a seller to
/// a later buyer. Other edges are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedBipartiteInstance<S> {
    base: DynamicInstance<S>,
    roles: Vec<Role>,
}

impl<S: Scalar> ConstrainedBipartiteInstance<S> {
    pub fn new(instance: &DynamicInstance<S>, roles: Vec<Role>) -> Result<Self, InstanceError> {
        if roles.len() != instance.horizon() {
            return Err(InstanceError::BadRoles(format!(
                "{} labels for {} vertices",
                roles.len(),
                instance.horizon()
            )));
        }
        let base = instance
            .filter_edges(|i, j, _| roles[i - 1] == Role::Seller && roles[j - 1] == Role::Buyer)
            .with_roles(&roles);
        Ok(Self { base, roles })
    }

    /// Uses the role labels stored in the instance metadata.
    pub fn from_labelled(instance: &DynamicInstance<S>) -> Result<Self, InstanceError> {
        let roles = instance
            .roles()
            .ok_or_else(|| InstanceError::BadRoles("instance carries no role labels".into()))??;
        Self::new(instance, roles)
    }

    pub fn base(&self) -> &DynamicInstance<S> {
        &self.base
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, k: usize) -> Role {
        self.roles[k - 1]
    }
}

pub fn run_dda<S: Scalar>(
    cbi: &ConstrainedBipartiteInstance<S>,
    deadlines: &[u32],
) -> Result<RunResult<S>, EngineError> {
    run_dda_observed(cbi, deadlines, |_, _| {})
}

/// Runs DDA and calls `observe` after every event with the market state.
pub fn run_dda_observed<S, F>(
    cbi: &ConstrainedBipartiteInstance<S>,
    deadlines: &[u32],
    mut observe: F,
) -> Result<RunResult<S>, EngineError>
where
    S: Scalar,
    F: FnMut(&Event, &AuctionState<S>),
{
    // A buyer must not leave while its seller is still present, so edges
    // that cannot respect that order are dropped. Under a uniform deadline
    // nothing is removed.
    let inst = &cbi
        .base()
        .filter_edges(|i, j, _| i + deadlines[i - 1] as usize <= j + deadlines[j - 1] as usize);
    let mut state = AuctionState::new().with_history();
    let mut result = RunResult::new("dda", 0, deadlines.to_vec());
    let mut tally = AuditTally::default();

    for event in event_stream(deadlines) {
        let k = event.vertex;
        let decision = match (event.kind, cbi.role(k)) {
            (EventKind::Arrival, Role::Seller) => {
                state.add_seller(SellerId(k))?;
                Decision::Joined
            }
            (EventKind::Arrival, Role::Buyer) => {
                let edges: Vec<(SellerId, S)> = inst
                    .earlier_neighbors(k)
                    .map(|(l, v)| (SellerId(l), v))
                    .filter(|&(s, _)| state.has_seller(s))
                    .collect();
                let out = state.add_buyer(BuyerId(k), edges)?;
                tally.absorb(conservation_record(out.conservation_gap), event.time);
                tally.absorb_all(state.audit(), event.time);
                Decision::Bid {
                    initial_margin: out.initial_margin,
                }
            }
            (EventKind::Critical, Role::Seller) => match state.finalize_seller(SellerId(k))?.partner {
                Some((b, v)) => {
                    result.record_match(k, b.0, event.time, v);
                    Decision::Matched { partner: b.0, value: v }
                }
                None => Decision::DepartedUnmatched,
            },
            (EventKind::Critical, Role::Buyer) => {
                if state.has_buyer(BuyerId(k)) {
                    state.remove_buyer(BuyerId(k))?;
                    Decision::DepartedUnmatched
                } else {
                    Decision::Inert
                }
            }
        };
        result.push_trace(event, decision);
        observe(&event, &state);
    }

    let ledger = state.into_ledger();
    tally.absorb_all(ledger.check(), deadlines.len() as u64);
    let mut audit = tally.finish();
    let usable = inst.filter_edges(|i, j, _| j <= i + deadlines[i - 1] as usize);
    let certificate = DualCertificate::from_bipartite(cbi.roles(), &ledger);
    audit.push(verify_certificate(&usable, &certificate, None));
    audit.push(validate_matching(cbi.base(), &result.matching, deadlines));
    audit.push(sellers_wait(cbi, &result, deadlines));

    result.ledger = Some(ledger);
    result.audit = audit;
    result.roles = cbi.roles().iter().map(|&r| RoleStatus::Resolved(r)).collect();
    Ok(result)
}

pub(crate) fn conservation_record<S: Scalar>(gap: S) -> AuditRecord {
    AuditRecord::check(
        "conservation",
        gap.approx_eq(S::zero()),
        format!("pre-existing dual sum changed by {gap}"),
    )
}

/// Every real match is finalized exactly when its seller becomes critical.
fn sellers_wait<S: Scalar>(
    cbi: &ConstrainedBipartiteInstance<S>,
    result: &RunResult<S>,
    deadlines: &[u32],
) -> AuditRecord {
    let early = result.matching.pairs().iter().find(|p| {
        let seller = if cbi.role(p.first) == Role::Seller { p.first } else { p.second };
        p.time != seller as u64 + deadlines[seller - 1] as u64
    });
    AuditRecord::check(
        "sellers-wait",
        early.is_none(),
        early.map_or_else(String::new, |p| {
            format!("pair ({},{}) finalized at t={} before the seller's deadline", p.first, p.second, p.time)
        }),
    )
}

/// One fair coin per vertex in arrival order; heads makes a seller.
pub fn draw_roles(horizon: usize, coins: &mut dyn CoinSource) -> Vec<Role> {
    (0..horizon)
        .map(|_| if coins.flip() { Role::Seller } else { Role::Buyer })
        .collect()
}

pub fn run_sdda<S: Scalar>(instance: &DynamicInstance<S>, seed: u64) -> Result<RunResult<S>, EngineError> {
    let deadlines = instance.deadlines_for_seed(seed);
    let mut coins = SeededCoins::new(seed);
    let mut result = run_sdda_with(instance, &deadlines, &mut coins)?;
    result.seed = seed;
    Ok(result)
}

/// SDDA with an explicit coin source, for replaying or enumerating draws.
pub fn run_sdda_with<S: Scalar>(
    instance: &DynamicInstance<S>,
    deadlines: &[u32],
    coins: &mut dyn CoinSource,
) -> Result<RunResult<S>, EngineError> {
    let roles = draw_roles(instance.horizon(), coins);
    let cbi = ConstrainedBipartiteInstance::new(instance, roles).expect("one role per vertex");
    let mut result = run_dda(&cbi, deadlines)?;
    result.algorithm = "sdda".into();
    result.coins_used = coins.used();
    result.audit.push(validate_matching(instance, &result.matching, deadlines));
    Ok(result)
}
