use std::collections::{BTreeMap, BTreeSet};

use super::{AuditRecord, DynamicInstance, VertexId};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair<S> {
    /// Smaller vertex id of the pair.
    pub first: VertexId,
    pub second: VertexId,
    /// Step at which the match was finalized.
    pub time: u64,
    pub value: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching<S> {
    pairs: Vec<MatchedPair<S>>,
    mate: BTreeMap<VertexId, VertexId>,
}

impl<S> Default for Matching<S> {
    fn default() -> Self {
        Self {
            pairs: Vec::new(),
            mate: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> Matching<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a finalized pair. Returns the offending vertex if either
    /// endpoint is already matched.
    pub fn insert(&mut self, a: VertexId, b: VertexId, time: u64, value: S) -> Result<(), VertexId> {
        for v in [a, b] {
            if self.mate.contains_key(&v) {
                return Err(v);
            }
        }
        if a == b {
            return Err(a);
        }
        self.mate.insert(a, b);
        self.mate.insert(b, a);
        self.pairs.push(MatchedPair {
            first: a.min(b),
            second: a.max(b),
            time,
            value,
        });
        Ok(())
    }

    pub fn pairs(&self) -> &[MatchedPair<S>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn mate_of(&self, v: VertexId) -> Option<VertexId> {
        self.mate.get(&v).copied()
    }

    pub fn is_matched(&self, v: VertexId) -> bool {
        self.mate.contains_key(&v)
    }

    pub fn total_value(&self) -> S {
        crate::scalar::total(self.pairs.iter().map(|p| p.value))
    }

    pub fn pair_set(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.pairs.iter().map(|p| (p.first, p.second)).collect()
    }

    pub fn matched_vertex_count(&self) -> usize {
        self.mate.len()
    }
}

/// Checks that every pair is an instance edge, that both endpoints were
/// present at the finalize time, that no vertex is used twice and that the
/// recorded values agree with the instance.
pub fn validate_matching<S: Scalar>(
    instance: &DynamicInstance<S>,
    matching: &Matching<S>,
    deadlines: &[u32],
) -> AuditRecord {
    const NAME: &str = "matching-valid";
    let mut seen = BTreeSet::new();
    for p in matching.pairs() {
        let (k, l) = (p.first, p.second);
        for v in [k, l] {
            if v == 0 || v > instance.horizon() {
                return AuditRecord::fail(NAME, format!("pair ({k},{l}): vertex {v} out of range"));
            }
            if !seen.insert(v) {
                return AuditRecord::fail(NAME, format!("vertex {v} matched twice"));
            }
        }
        let Some(value) = instance.value(k, l) else {
            return AuditRecord::fail(NAME, format!("pair ({k},{l}): no such edge"));
        };
        if !value.approx_eq(p.value) {
            return AuditRecord::fail(
                NAME,
                format!("pair ({k},{l}): recorded value {} but edge value {value}", p.value),
            );
        }
        if p.time < l as u64 {
            return AuditRecord::fail(
                NAME,
                format!("pair ({k},{l}) at t={}: vertex {l} had not arrived", p.time),
            );
        }
        for v in [k, l] {
            if p.time > v as u64 + deadlines[v - 1] as u64 {
                return AuditRecord::fail(
                    NAME,
                    format!("pair ({k},{l}) at t={}: vertex {v} departed", p.time),
                );
            }
        }
    }
    AuditRecord::pass(NAME, format!("{} pairs", matching.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::DepartureModel;

    fn figure1() -> DynamicInstance<f64> {
        DynamicInstance::new(3, [(1, 2, 1.0), (2, 3, 3.0)], DepartureModel::constant(1)).unwrap()
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
    fn accepts_figure_one_match() {
        let mut m = Matching::new();
        m.insert(1, 2, 2, 1.0).unwrap();
        assert!(validate_matching(&figure1(), &m, &[1, 1, 1]).passed);
    }

    #[test]
    fn rejects_missing_edge() {
        let mut m = Matching::new();
        m.insert(1, 3, 3, 5.0).unwrap();
        let rec = validate_matching(&figure1(), &m, &[1, 1, 1]);
        assert!(!rec.passed);
        assert!(rec.detail.contains("no such edge"), "{}", rec.detail);
    }

    #[test]
    fn rejects_departed_vertex() {
        let inst = DynamicInstance::new(3, [(1, 2, 1.0)], DepartureModel::per_vertex(vec![1, 1, 1])).unwrap();
        let mut m = Matching::new();
        m.insert(1, 2, 3, 1.0).unwrap();
        let rec = validate_matching(&inst, &m, &[1, 1, 1]);
        assert!(!rec.passed);
        assert!(rec.detail.contains("vertex 1 departed"), "{}", rec.detail);
    }

    #[test]
    fn accepts_offline_optimum_of_tightness_instance() {
        let inst = tightness(0.01);
        let mut m = Matching::new();
        m.insert(1, 3, 3, 0.99).unwrap();
        m.insert(2, 4, 4, 1.0).unwrap();
        assert!(validate_matching(&inst, &m, &[2; 4]).passed);
        assert!((m.total_value() - 1.99).abs() < 1e-12);
    }

    #[test]
    fn double_use_is_refused() {
        let mut m = Matching::new();
        m.insert(1, 2, 2, 1.0).unwrap();
        assert_eq!(m.insert(2, 3, 3, 3.0), Err(2));
    }
}
