use std::fmt;

use super::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    // Variant order is the same-time processing order.
    Arrival,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub time: u64,
    pub kind: EventKind,
    pub vertex: VertexId,
}

impl Event {
    pub fn arrival(vertex: VertexId) -> Self {
        Self {
            time: vertex as u64,
            kind: EventKind::Arrival,
            vertex,
        }
    }

    pub fn critical(vertex: VertexId, deadline: u32) -> Self {
        Self {
            time: vertex as u64 + deadline as u64,
            kind: EventKind::Critical,
            vertex,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EventKind::Arrival => write!(f, "Arr({})@{}", self.vertex, self.time),
            EventKind::Critical => write!(f, "Crit({})@{}", self.vertex, self.time),
        }
    }
}

/// Merged arrival/criticality timeline for resolved per-vertex deadlines.
///
/// Vertex `k` arrives at `k` and becomes critical at `k + d_k`. At equal
/// times arrivals come first, then critical events by ascending vertex.
pub fn event_stream(deadlines: &[u32]) -> Vec<Event> {
    let mut events: Vec<Event> = Vec::with_capacity(2 * deadlines.len());
    for (idx, &d) in deadlines.iter().enumerate() {
        let k = idx + 1;
        events.push(Event::arrival(k));
        events.push(Event::critical(k, d));
    }
    events.sort();
    events
}
