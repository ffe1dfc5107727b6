//! Online weighted matching in dynamic markets where agents arrive one per
//! step and leave after a deadline.
//!
//! The crate provides the market model ([`market`]), an exact online
//! auction that maintains a maximum-weight bipartite matching with prices
//! ([`auction`]), the deferred-acceptance algorithms built on it ([`dda`],
//! [`pdda`]), comparison policies ([`baselines`]), offline optima and dual
//! certificates ([`oracle`]), and instance generators and data ingestion
//! ([`generators`], [`data`], [`format`]).
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix
//! the common choices.

pub mod algorithms;
pub mod auction;
pub mod baselines;
pub mod coins;
pub mod data;
pub mod dda;
pub mod format;
pub mod generators;
pub mod market;
pub mod oracle;
pub mod pdda;
pub mod scalar;

pub use algorithms::Algorithm;
pub use market::{
    event_stream, validate_matching, AuditRecord, DepartureKind, DepartureKnowledge, DepartureModel,
    DynamicInstance, Event, EventKind, InstanceError, Matching, Role, RoleStatus, RunResult,
    VertexId,
};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type Instance = DynamicInstance<f64>;
pub type InstanceF32 = DynamicInstance<f32>;
pub type IntInstance = DynamicInstance<i64>;
pub type RationalInstance = DynamicInstance<Rational>;

pub type Run = RunResult<f64>;
pub type IntRun = RunResult<i64>;
pub type RationalRun = RunResult<Rational>;

pub type Auction = auction::AuctionState<f64>;
pub type IntAuction = auction::AuctionState<i64>;
pub type RationalAuction = auction::AuctionState<Rational>;
