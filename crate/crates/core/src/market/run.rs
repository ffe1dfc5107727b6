use std::fmt;

use super::{Event, Matching, Role, RoleStatus, VertexId};
use crate::auction::DualLedger;
use crate::Scalar;

/// One invariant check: what was checked, when, and whether it held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRecord {
    pub name: String,
    pub time: Option<u64>,
    pub passed: bool,
    pub detail: String,
}

impl AuditRecord {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            time: None,
            passed: true,
            detail: detail.into(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            time: None,
            passed: false,
            detail: detail.into(),
        }
    }

    pub fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            time: None,
            passed,
            detail: detail.into(),
        }
    }

    pub fn at(mut self, time: u64) -> Self {
        self.time = Some(time);
        self
    }
}

impl fmt::Display for AuditRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "FAIL" };
        match self.time {
            Some(t) => write!(f, "[{status}] {} @{t}: {}", self.name, self.detail),
            None => write!(f, "[{status}] {}: {}", self.name, self.detail),
        }
    }
}

/// Why a vertex received its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleCause {
    Coin,
    Propagation,
}

/// What an algorithm did in response to an event.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision<S> {
    /// Arrival processed without any matching consequence.
    Joined,
    /// A buyer's auction finished with this initial margin.
    Bid { initial_margin: S },
    /// A real match was finalized.
    Matched { partner: VertexId, value: S },
    DepartedUnmatched,
    /// Critical event for a vertex that had already left the market.
    Inert,
    RoleResolved {
        vertex: VertexId,
        status: Role,
        cause: RoleCause,
    },
    /// A finalized virtual pair whose real partner was no longer present.
    PartnerGone { partner: VertexId },
    /// A batch instant matched this many pairs.
    Batch { pairs: usize },
    /// Tentative matching rebuilt by an auction round.
    Tentative { bids: usize, cap_hit: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<S> {
    pub event: Event,
    pub decision: Decision<S>,
}

/// Everything one algorithm run produced.
#[derive(Debug, Clone)]
pub struct RunResult<S> {
    pub algorithm: String,
    pub matching: Matching<S>,
    pub total_value: S,
    pub ledger: Option<DualLedger<S>>,
    pub audit: Vec<AuditRecord>,
    pub seed: u64,
    pub deadlines: Vec<u32>,
    pub trace: Vec<TraceEntry<S>>,
    /// Per-vertex roles (index `k - 1`) for algorithms that assign them.
    pub roles: Vec<RoleStatus>,
    /// Finalized virtual pairs `(k, l)`: seller copy of `k` with buyer copy of `l`.
    pub virtual_pairs: Vec<(VertexId, VertexId)>,
    pub coins_used: usize,
}

impl<S: Scalar> RunResult<S> {
    pub(crate) fn new(algorithm: impl Into<String>, seed: u64, deadlines: Vec<u32>) -> Self {
        Self {
            algorithm: algorithm.into(),
            matching: Matching::new(),
            total_value: S::zero(),
            ledger: None,
            audit: Vec::new(),
            seed,
            deadlines,
            trace: Vec::new(),
            roles: Vec::new(),
            virtual_pairs: Vec::new(),
            coins_used: 0,
        }
    }

    pub(crate) fn record_match(&mut self, a: VertexId, b: VertexId, time: u64, value: S) {
        self.matching
            .insert(a, b, time, value)
            .expect("algorithm finalized a vertex twice");
        self.total_value = self.total_value + value;
    }

    pub(crate) fn push_trace(&mut self, event: Event, decision: Decision<S>) {
        self.trace.push(TraceEntry { event, decision });
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditRecord> {
        self.audit.iter().filter(|r| !r.passed)
    }

    pub fn audits_pass(&self) -> bool {
        self.audit.iter().all(|r| r.passed)
    }

    pub fn audit_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a AuditRecord> + 'a {
        self.audit.iter().filter(move |r| r.name == name)
    }

    /// Fraction of vertices that ended up matched.
    pub fn matched_fraction(&self) -> f64 {
        if self.deadlines.is_empty() {
            0.0
        } else {
            self.matching.matched_vertex_count() as f64 / self.deadlines.len() as f64
        }
    }
}

/// Folds repeated audit checks into one record per name: the first
/// failure (with its time) if any, otherwise a pass with the check count.
#[derive(Debug, Default)]
pub(crate) struct AuditTally {
    order: Vec<String>,
    entries: std::collections::HashMap<String, (usize, Option<AuditRecord>)>,
}

impl AuditTally {
    pub(crate) fn absorb(&mut self, record: AuditRecord, time: u64) {
        let entry = self.entries.entry(record.name.clone()).or_insert_with(|| {
            self.order.push(record.name.clone());
            (0, None)
        });
        entry.0 += 1;
        if !record.passed && entry.1.is_none() {
            entry.1 = Some(record.at(time));
        }
    }

    pub(crate) fn absorb_all(&mut self, records: impl IntoIterator<Item = AuditRecord>, time: u64) {
        for r in records {
            self.absorb(r, time);
        }
    }

    pub(crate) fn finish(mut self) -> Vec<AuditRecord> {
        self.order
            .iter()
            .map(|name| {
                let (count, failure) = self.entries.remove(name).expect("ordered name");
                failure.unwrap_or_else(|| AuditRecord::pass(name.clone(), format!("{count} checks")))
            })
            .collect()
    }
}
