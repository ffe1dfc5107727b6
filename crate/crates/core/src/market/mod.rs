//! Instances, departure models, the event timeline, matchings and run
//! results shared by every algorithm.

mod departure;
mod events;
mod instance;
mod matching;
mod run;

pub use departure::{DepartureKind, DepartureKnowledge, DepartureModel};
pub use events::{event_stream, Event, EventKind};
pub use instance::{DynamicInstance, ROLES_KEY};
pub use matching::{validate_matching, MatchedPair, Matching};
pub use run::{AuditRecord, Decision, RoleCause, RunResult, TraceEntry};
pub(crate) use run::AuditTally;

use thiserror::Error;

/// A vertex is identified by its arrival step, starting at 1.
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Seller,
    Buyer,
}

impl Role {
    pub fn label(self) -> char {
        match self {
            Role::Seller => 'S',
            Role::Buyer => 'B',
        }
    }

    pub fn opposite(self) -> Role {
        match self {
            Role::Seller => Role::Buyer,
            Role::Buyer => Role::Seller,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RoleStatus {
    #[default]
    Undetermined,
    Resolved(Role),
}

impl RoleStatus {
    pub fn role(self) -> Option<Role> {
        match self {
            RoleStatus::Undetermined => None,
            RoleStatus::Resolved(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("edge ({i},{j}) spans more than the deadline window d={d}")]
    WindowViolation { i: VertexId, j: VertexId, d: u32 },
    #[error("edge ({i},{j}) has a negative value")]
    NegativeValue { i: VertexId, j: VertexId },
    #[error("expected {expected} per-vertex deadlines, got {got}")]
    BadDeadlineLength { expected: usize, got: usize },
    #[error("edge ({i},{j}) is not a pair of distinct vertices in 1..={horizon}")]
    BadIndex { i: VertexId, j: VertexId, horizon: usize },
    #[error("edge ({i},{j}) listed twice")]
    DuplicateEdge { i: VertexId, j: VertexId },
    #[error("bad departure model: {0}")]
    BadDeparture(String),
    #[error("bad role labels: {0}")]
    BadRoles(String),
}
