//! Behavior graph construction.
//!
//! A behavior graph has one vertex per event and an edge `(v, w)` whenever
//! `v` certainly precedes `w` and no third event certainly sits between them.
//! Two constructions are provided:
//!
//! * [`build_baseline`] materialises the full precedence relation as a dense
//!   adjacency matrix and removes implied edges with a cubic transitive
//!   reduction.
//! * [`build_sweep`] sorts the interval endpoints once and, for every event,
//!   scans forward from the point at which it has certainly occurred until
//!   no further immediate successor is possible. Quadratic in the worst case.
//!
//! Both return identical graphs on every valid trace.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{precedes, EventId, ModelError, Timestamp, UncertainEvent, UncertainTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    InvalidTrace(#[from] ModelError),
    #[error("not a DAG: the input graph contains a cycle")]
    NotADag,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
}

/// Rendering payload of a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: EventId,
    pub activities: BTreeSet<String>,
    pub determinate: bool,
}

/// Vertices are kept sorted by event id and edges are index pairs into that
/// order, so two graphs over the same event set compare structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorGraph {
    case_id: String,
    vertices: Vec<Vertex>,
    edges: BTreeSet<(usize, usize)>,
}

impl BehaviorGraph {
    pub fn case_id(&self) -> &str {
        &self.case_id
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as index pairs into [`BehaviorGraph::vertices`].
    pub fn edge_indices(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EventId, &EventId)> + '_ {
        self.edges
            .iter()
            .map(|&(v, w)| (&self.vertices[v].id, &self.vertices[w].id))
    }

    /// Edge set keyed by event id, handy for comparisons against oracles.
    pub fn edge_ids(&self) -> BTreeSet<(EventId, EventId)> {
        self.edges()
            .map(|(v, w)| (v.clone(), w.clone()))
            .collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices
            .binary_search_by(|v| v.id.as_str().cmp(id))
            .ok()
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((v, 0)..(v + 1, 0)).map(|&(_, w)| w)
    }

    /// Whether a directed path leads from `v` to `w`. The empty path counts,
    /// so every vertex reaches itself.
    pub fn reachable(&self, v: &str, w: &str) -> Result<bool, GraphError> {
        let from = self
            .index_of(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_owned()))?;
        let to = self
            .index_of(w)
            .ok_or_else(|| GraphError::UnknownVertex(w.to_owned()))?;
        if from == to {
            return Ok(true);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for s in self.successors(u) {
                if s == to {
                    return Ok(true);
                }
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        Ok(false)
    }

    pub fn is_acyclic(&self) -> bool {
        let mut adjacency = AdjacencyMatrix::new(self.vertices.len());
        for &(v, w) in &self.edges {
            adjacency.insert(v, w);
        }
        adjacency.is_acyclic()
    }
}

/// Dense boolean adjacency matrix of a directed graph over `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl fmt::Debug for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdjacencyMatrix")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl AdjacencyMatrix {
    pub fn new(n: usize) -> Self {
        AdjacencyMatrix {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::new(n);
        for (v, w) in edges {
            m.insert(v, w);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn insert(&mut self, v: usize, w: usize) {
        assert!(v < self.n && w < self.n, "vertex out of range");
        self.cells[v * self.n + w] = true;
    }

    pub fn contains(&self, v: usize, w: usize) -> bool {
        self.cells[v * self.n + w]
    }

    fn row(&self, v: usize) -> &[bool] {
        &self.cells[v * self.n..(v + 1) * self.n]
    }

    pub fn edge_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| (i / n, i % n))
    }

    /// Kahn's algorithm; self-loops count as cycles.
    pub fn is_acyclic(&self) -> bool {
        let n = self.n;
        let mut indegree = vec![0usize; n];
        for (_, w) in self.edges() {
            indegree[w] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for (w, &edge) in self.row(v).iter().enumerate() {
                if edge {
                    indegree[w] -= 1;
                    if indegree[w] == 0 {
                        queue.push_back(w);
                    }
                }
            }
        }
        removed == n
    }

    /// Reachability by paths of length at least one (Warshall).
    pub fn transitive_closure(&self) -> AdjacencyMatrix {
        let n = self.n;
        let mut reach = self.clone();
        for k in 0..n {
            let through = reach.row(k).to_vec();
            for i in 0..n {
                if i != k && reach.contains(i, k) {
                    let row = &mut reach.cells[i * n..(i + 1) * n];
                    for (cell, &r) in row.iter_mut().zip(&through) {
                        *cell |= r;
                    }
                }
            }
        }
        reach
    }
}

/// Unique minimal subgraph of a DAG with the same reachability.
///
/// An edge `(i, j)` survives iff no path `i -> k -> .. -> j` of length at
/// least two exists. Runs the elementary cubic elimination over the
/// transitive closure.
pub fn transitive_reduce(g: &AdjacencyMatrix) -> Result<AdjacencyMatrix, GraphError> {
    if !g.is_acyclic() {
        return Err(GraphError::NotADag);
    }
    let n = g.len();
    let reach = g.transitive_closure();
    let mut implied = AdjacencyMatrix::new(n);
    for i in 0..n {
        for k in 0..n {
            if !reach.contains(i, k) {
                continue;
            }
            for j in 0..n {
                if reach.contains(k, j) {
                    implied.cells[i * n + j] = true;
                }
            }
        }
    }
    let mut reduced = AdjacencyMatrix::new(n);
    for (v, w) in g.edges() {
        if !implied.contains(v, w) {
            reduced.insert(v, w);
        }
    }
    Ok(reduced)
}

/// Events sorted by id, checked for validity.
fn sorted_vertices(trace: &UncertainTrace) -> Result<Vec<&UncertainEvent>, GraphError> {
    crate::model::validate_trace(trace).map_err(|violations| ModelError::InvalidTrace {
        case: trace.case_id.clone(),
        violations,
    })?;
    Ok(trace.sorted_events())
}

fn assemble(
    trace: &UncertainTrace,
    events: &[&UncertainEvent],
    edges: BTreeSet<(usize, usize)>,
) -> BehaviorGraph {
    BehaviorGraph {
        case_id: trace.case_id.clone(),
        vertices: events
            .iter()
            .map(|e| Vertex {
                id: e.id().clone(),
                activities: e.activities().clone(),
                determinate: e.is_determinate(),
            })
            .collect(),
        edges,
    }
}

/// Precedence graph over the id-sorted events, before any reduction.
pub fn precedence_matrix(trace: &UncertainTrace) -> Result<AdjacencyMatrix, GraphError> {
    let events = sorted_vertices(trace)?;
    Ok(precedence_of(&events))
}

fn precedence_of(events: &[&UncertainEvent]) -> AdjacencyMatrix {
    let n = events.len();
    let mut g = AdjacencyMatrix::new(n);
    for (i, v) in events.iter().enumerate() {
        for (j, w) in events.iter().enumerate() {
            if precedes(v, w) {
                g.insert(i, j);
            }
        }
    }
    g
}

/// Behavior graph by definition: every precedence pair, then transitive
/// reduction.
pub fn build_baseline(trace: &UncertainTrace) -> Result<BehaviorGraph, GraphError> {
    let events = sorted_vertices(trace)?;
    let reduced = transitive_reduce(&precedence_of(&events))?;
    Ok(assemble(trace, &events, reduced.edges().collect()))
}

/// Role of an interval endpoint in the sweep list. The derived order is the
/// tie-break among entries with equal time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndpointKind {
    Minimum,
    Certain,
    Maximum,
}

/// One element of the sweep list. `event` indexes the id-sorted events, so
/// ordering by index is ordering by event id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimestampEntry {
    pub time: Timestamp,
    pub kind: EndpointKind,
    pub event: usize,
}

/// Sorted sweep list: one `Certain` entry per point-timestamped event, a
/// `Minimum` and a `Maximum` entry per interval event. Ordered by time, then
/// kind, then event.
pub fn sweep_list(events: &[&UncertainEvent]) -> Vec<TimestampEntry> {
    let mut entries = Vec::with_capacity(events.len() * 2);
    for (i, e) in events.iter().enumerate() {
        if e.is_certain() {
            entries.push(TimestampEntry {
                time: e.t_min(),
                kind: EndpointKind::Certain,
                event: i,
            });
        } else {
            entries.push(TimestampEntry {
                time: e.t_min(),
                kind: EndpointKind::Minimum,
                event: i,
            });
            entries.push(TimestampEntry {
                time: e.t_max(),
                kind: EndpointKind::Maximum,
                event: i,
            });
        }
    }
    entries.sort_unstable();
    entries
}

/// Behavior graph by a single sweep over sorted interval endpoints.
pub fn build_sweep(trace: &UncertainTrace) -> Result<BehaviorGraph, GraphError> {
    let events = sorted_vertices(trace)?;
    let entries = sweep_list(&events);
    let edges = sweep_edges(&entries, events.len());
    Ok(assemble(trace, &events, edges))
}

fn sweep_edges(entries: &[TimestampEntry], n: usize) -> BTreeSet<(usize, usize)> {
    // Every event anchors at most one search (its certain or maximum entry),
    // so "edge (anchor, e) already added" is tracked per target event.
    const NONE: usize = usize::MAX;
    let mut linked_from = vec![NONE; n];
    let mut edges = Vec::new();

    for (i, anchor) in entries.iter().enumerate() {
        if anchor.kind == EndpointKind::Minimum {
            continue;
        }
        // Set by the first certain successor; certain events tied with it are
        // successors too, anything later is not.
        let mut stop_after: Option<Timestamp> = None;
        for next in &entries[i + 1..] {
            if stop_after.is_some_and(|t| next.time > t) {
                break;
            }
            // Equal times never satisfy the strict precedence.
            if next.time == anchor.time {
                continue;
            }
            match next.kind {
                EndpointKind::Minimum => {
                    edges.push((anchor.event, next.event));
                    linked_from[next.event] = anchor.event;
                }
                EndpointKind::Certain => {
                    edges.push((anchor.event, next.event));
                    stop_after = Some(next.time);
                }
                EndpointKind::Maximum => {
                    if linked_from[next.event] == anchor.event {
                        break;
                    }
                }
            }
        }
    }
    edges.into_iter().collect()
}
