use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

use super::{DepartureModel, InstanceError, Role, VertexId};
use crate::Scalar;

/// Metadata key carrying a fixed seller/buyer labelling, e.g. `SSBB`.
pub const ROLES_KEY: &str = "roles";

/// The complete input of the online problem: `horizon` vertices arriving one
/// per step, nonnegative pairwise match values, and a departure model.
///
/// Vertex `k` arrives at time `k` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicInstance<S> {
    horizon: usize,
    values: BTreeMap<(VertexId, VertexId), S>,
    departure: DepartureModel,
    metadata: BTreeMap<String, String>,
    // adjacency[k] lists (neighbor, value) sorted by neighbor; index 0 unused.
    adjacency: Vec<Vec<(VertexId, S)>>,
}

impl<S: Scalar> DynamicInstance<S> {
    /// Validates and builds an instance. Value keys may be given in either
    /// order; they are stored as `(i, j)` with `i < j`.
    pub fn new<I>(horizon: usize, values: I, departure: DepartureModel) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, S)>,
    {
        departure.validate(horizon)?;
        let window = departure.uniform();
        let mut map = BTreeMap::new();
        for (a, b, v) in values {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i == j || i == 0 || j > horizon {
                return Err(InstanceError::BadIndex { i: a, j: b, horizon });
            }
            if v < S::zero() {
                return Err(InstanceError::NegativeValue { i, j });
            }
            if let Some(d) = window {
                if j - i > d as usize {
                    return Err(InstanceError::WindowViolation { i, j, d });
                }
            }
            if map.insert((i, j), v).is_some() {
                return Err(InstanceError::DuplicateEdge { i, j });
            }
        }
        Ok(Self::from_parts(horizon, map, departure, BTreeMap::new()))
    }

    fn from_parts(
        horizon: usize,
        values: BTreeMap<(VertexId, VertexId), S>,
        departure: DepartureModel,
        metadata: BTreeMap<String, String>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); horizon + 1];
        for (&(i, j), &v) in &values {
            adjacency[i].push((j, v));
            adjacency[j].push((i, v));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(n, _)| n);
        }
        Self {
            horizon,
            values,
            departure,
            metadata,
            adjacency,
        }
    }

    pub fn empty(departure: DepartureModel) -> Self {
        Self::from_parts(0, BTreeMap::new(), departure, BTreeMap::new())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn departure(&self) -> &DepartureModel {
        &self.departure
    }

    pub fn uniform_deadline(&self) -> Option<u32> {
        self.departure.uniform()
    }

    pub fn value(&self, a: VertexId, b: VertexId) -> Option<S> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.values.get(&key).copied()
    }

    /// All stored edges `(i, j, v)` with `i < j`, in key order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, S)> + '_ {
        self.values.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn edge_count(&self) -> usize {
        self.values.len()
    }

    pub fn neighbors(&self, k: VertexId) -> &[(VertexId, S)] {
        self.adjacency.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Neighbors that arrived before `k`, ascending.
    pub fn earlier_neighbors(&self, k: VertexId) -> impl Iterator<Item = (VertexId, S)> + '_ {
        self.neighbors(k).iter().copied().take_while(move |&(n, _)| n < k)
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn with_roles(self, roles: &[Role]) -> Self {
        let labels: String = roles.iter().map(|r| r.label()).collect();
        self.with_meta(ROLES_KEY, labels)
    }

    /// Seller/buyer labels stored in metadata, if any.
    pub fn roles(&self) -> Option<Result<Vec<Role>, InstanceError>> {
        let raw = self.meta(ROLES_KEY)?;
        let parsed: Result<Vec<Role>, InstanceError> = raw
            .chars()
            .map(|c| match c {
                'S' | 's' => Ok(Role::Seller),
                'B' | 'b' => Ok(Role::Buyer),
                other => Err(InstanceError::BadRoles(format!("unknown role label {other:?}"))),
            })
            .collect();
        Some(parsed.and_then(|roles| {
            if roles.len() == self.horizon {
                Ok(roles)
            } else {
                Err(InstanceError::BadRoles(format!(
                    "{} labels for {} vertices",
                    roles.len(),
                    self.horizon
                )))
            }
        }))
    }

    /// Same vertices, departure model and metadata, keeping only the edges
    /// accepted by `keep`.
    pub fn filter_edges<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(VertexId, VertexId, S) -> bool,
    {
        let values = self
            .values
            .iter()
            .filter(|(&(i, j), &v)| keep(i, j, v))
            .map(|(&k, &v)| (k, v))
            .collect();
        Self::from_parts(self.horizon, values, self.departure.clone(), self.metadata.clone())
    }

    /// Same graph under a different departure model.
    pub fn with_departure(&self, departure: DepartureModel) -> Result<Self, InstanceError> {
        Self::new(self.horizon, self.edges(), departure).map(|mut inst| {
            inst.metadata = self.metadata.clone();
            inst
        })
    }

    /// Resolves one deadline per vertex; stochastic models draw from `rng`.
    pub fn sample_deadlines(&self, rng: &mut ChaCha8Rng) -> Vec<u32> {
        self.departure.sample(self.horizon, rng)
    }

    /// Deadlines for a run seeded with `seed`, drawn from the dedicated
    /// deadline stream so coin flips do not perturb them.
    pub fn deadlines_for_seed(&self, seed: u64) -> Vec<u32> {
        let mut rng = crate::coins::deadline_rng(seed);
        self.sample_deadlines(&mut rng)
    }

    /// Edges whose endpoints are simultaneously present: `(i, j)` with `i < j`
    /// is usable iff `j <= i + d_i`.
    pub fn usable_edges<'a>(
        &'a self,
        deadlines: &'a [u32],
    ) -> impl Iterator<Item = (VertexId, VertexId, S)> + 'a {
        self.edges()
            .filter(move |&(i, j, _)| j <= i + deadlines[i - 1] as usize)
    }
}
