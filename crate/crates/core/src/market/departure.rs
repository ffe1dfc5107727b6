use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};

use super::InstanceError;

/// How long each vertex stays in the market before it becomes critical.
#[derive(Debug, Clone, PartialEq)]
pub enum DepartureKind {
    /// Every vertex stays exactly `d` steps.
    Constant(u32),
    /// One explicit deadline per vertex, in arrival order.
    ExplicitPerVertex(Vec<u32>),
    /// The vertex survives each step with probability `delta`, so
    /// `P(d >= k) = delta^k` and the hazard rate is the constant `1 - delta`.
    Geometric { delta: f64 },
    /// Exponential with the given mean, rounded to the nearest step.
    Exponential { mean: f64 },
    /// Uniform draw from an observed list of deadlines.
    Empirical(Vec<u32>),
}

/// When the online algorithm learns a vertex's deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepartureKnowledge {
    #[default]
    KnownAtArrival,
    RevealedWhenCritical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepartureModel {
    pub kind: DepartureKind,
    pub knowledge: DepartureKnowledge,
}

impl DepartureModel {
    pub fn constant(d: u32) -> Self {
        Self {
            kind: DepartureKind::Constant(d),
            knowledge: DepartureKnowledge::KnownAtArrival,
        }
    }

    pub fn per_vertex(deadlines: Vec<u32>) -> Self {
        Self {
            kind: DepartureKind::ExplicitPerVertex(deadlines),
            knowledge: DepartureKnowledge::KnownAtArrival,
        }
    }

    pub fn geometric(delta: f64) -> Self {
        Self {
            kind: DepartureKind::Geometric { delta },
            knowledge: DepartureKnowledge::KnownAtArrival,
        }
    }

    pub fn exponential(mean: f64) -> Self {
        Self {
            kind: DepartureKind::Exponential { mean },
            knowledge: DepartureKnowledge::KnownAtArrival,
        }
    }

    pub fn empirical(deadlines: Vec<u32>) -> Self {
        Self {
            kind: DepartureKind::Empirical(deadlines),
            knowledge: DepartureKnowledge::KnownAtArrival,
        }
    }

    pub fn with_knowledge(mut self, knowledge: DepartureKnowledge) -> Self {
        self.knowledge = knowledge;
        self
    }

    /// The common deadline, when every vertex has the same one.
    pub fn uniform(&self) -> Option<u32> {
        match &self.kind {
            DepartureKind::Constant(d) => Some(*d),
            _ => None,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(
            self.kind,
            DepartureKind::Geometric { .. } | DepartureKind::Exponential { .. } | DepartureKind::Empirical(_)
        )
    }

    pub fn validate(&self, horizon: usize) -> Result<(), InstanceError> {
        match &self.kind {
            DepartureKind::Constant(0) => Err(InstanceError::BadDeparture(
                "constant deadline must be positive".into(),
            )),
            DepartureKind::Constant(_) => Ok(()),
            DepartureKind::ExplicitPerVertex(ds) if ds.len() != horizon => {
                Err(InstanceError::BadDeadlineLength {
                    expected: horizon,
                    got: ds.len(),
                })
            }
            DepartureKind::ExplicitPerVertex(_) => Ok(()),
            DepartureKind::Geometric { delta } if !(*delta > 0.0 && *delta < 1.0) => Err(
                InstanceError::BadDeparture(format!("geometric delta {delta} outside (0,1)")),
            ),
            DepartureKind::Geometric { .. } => Ok(()),
            DepartureKind::Exponential { mean } if !(*mean > 0.0 && mean.is_finite()) => Err(
                InstanceError::BadDeparture(format!("exponential mean {mean} must be positive")),
            ),
            DepartureKind::Exponential { .. } => Ok(()),
            DepartureKind::Empirical(ds) if ds.is_empty() => Err(InstanceError::BadDeparture(
                "empirical deadline list is empty".into(),
            )),
            DepartureKind::Empirical(_) => Ok(()),
        }
    }

    /// Resolves one deadline per vertex. Deterministic kinds ignore `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, horizon: usize, rng: &mut R) -> Vec<u32> {
        match &self.kind {
            DepartureKind::Constant(d) => vec![*d; horizon],
            DepartureKind::ExplicitPerVertex(ds) => ds.clone(),
            DepartureKind::Geometric { delta } => {
                let dist = Geometric::new(1.0 - delta).expect("validated geometric parameter");
                (0..horizon)
                    .map(|_| dist.sample(rng).min(u32::MAX as u64) as u32)
                    .collect()
            }
            DepartureKind::Exponential { mean } => {
                let dist = Exp::new(1.0 / mean).expect("validated exponential mean");
                (0..horizon)
                    .map(|_| dist.sample(rng).round().min(u32::MAX as f64) as u32)
                    .collect()
            }
            DepartureKind::Empirical(ds) => (0..horizon)
                .map(|_| ds[rng.random_range(0..ds.len())])
                .collect(),
        }
    }
}
