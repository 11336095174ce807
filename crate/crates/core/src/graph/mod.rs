//! Immutable simple undirected graphs with stable identifiers.
//!
//! Node and edge identifiers are owned by the caller and may be sparse; all
//! iteration orders are ascending by identifier so that every algorithm in
//! this crate is deterministic. Subgraphs keep the identifiers of their host,
//! which lets matchings and fractional values survive across the whole
//! pipeline without translation.

mod decompose;
pub mod io;

pub use decompose::{
    bipartite_cover, components, two_decompose, BipartiteCover, ComponentKind,
    PathCycleComponent, Side, TwoDecomposition,
};

use std::collections::BTreeMap;
use thiserror::Error;

/// Identifier of a node, unique and totally ordered within a graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u64);

/// Identifier of an edge, unique and totally ordered within a graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u64);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected edge with its identifier.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
}

impl Edge {
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("edge {0} references unknown node {1}")]
    UnknownNode(EdgeId, NodeId),
    #[error("b-value {b} at node {node} outside 1..=degree ({degree})")]
    BadBValue { node: NodeId, b: u64, degree: usize },
    #[error("coloring is not proper: nodes {0} and {1} share color {2}")]
    ImproperColoring(NodeId, NodeId, u64),
    #[error("node {0} has degree {1} > 2")]
    DegreeTooHigh(NodeId, usize),
    #[error("orientation references non-edge {0}")]
    OrientationNonEdge(EdgeId),
    #[error("orientation of edge {0} does not list its endpoints")]
    OrientationBadEndpoints(EdgeId),
    #[error("missing weight for edge {0}")]
    MissingWeight(EdgeId),
    #[error("missing b-value for node {0}")]
    MissingBValue(NodeId),
}

/// A proper node coloring attached to a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeColoring {
    /// Color per node, indexed like `Graph::nodes`.
    pub colors: Vec<u64>,
    pub palette: u64,
}

/// Immutable simple undirected graph.
///
/// Optionally carries integer edge weights, per-node b-values and a proper
/// node coloring. All of these are indexed positionally (node index / edge
/// index) and move with the graph.
#[derive(Clone, Debug)]
pub struct Graph {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    /// Per node index: incident `(edge index, peer node index)`, ascending by
    /// edge id.
    adj: Vec<Vec<(usize, usize)>>,
    weights: Option<Vec<u64>>,
    b_values: Option<Vec<u64>>,
    coloring: Option<NodeColoring>,
    delta: usize,
}

impl Graph {
    /// Builds a graph from explicit node and edge lists.
    ///
    /// Rejects self-loops, parallel edges, duplicate identifiers and edges
    /// with unknown endpoints. Input order is irrelevant; everything is
    /// sorted by identifier.
    pub fn new(
        mut nodes: Vec<NodeId>,
        mut edges: Vec<Edge>,
    ) -> Result<Graph, GraphError> {
        nodes.sort_unstable();
        for w in nodes.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateNodeId(w[0]));
            }
        }
        edges.sort_unstable_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdgeId(w[0].id));
            }
        }
        let index_of = |n: NodeId| nodes.binary_search(&n).ok();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
        let mut seen_pairs: BTreeMap<(NodeId, NodeId), ()> = BTreeMap::new();
        for (ei, e) in edges.iter().enumerate() {
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            let ui = index_of(e.u).ok_or(GraphError::UnknownNode(e.id, e.u))?;
            let vi = index_of(e.v).ok_or(GraphError::UnknownNode(e.id, e.v))?;
            let key = (e.u.min(e.v), e.u.max(e.v));
            if seen_pairs.insert(key, ()).is_some() {
                return Err(GraphError::ParallelEdge(key.0, key.1));
            }
            adj[ui].push((ei, vi));
            adj[vi].push((ei, ui));
        }
        let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            nodes,
            edges,
            adj,
            weights: None,
            b_values: None,
            coloring: None,
            delta,
        })
    }

    /// Convenience constructor: nodes are the endpoints that occur in
    /// `pairs`, edge ids are assigned 0.. in input order.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Graph, GraphError> {
        let mut nodes: Vec<NodeId> = pairs
            .iter()
            .flat_map(|&(a, b)| [NodeId(a), NodeId(b)])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                id: EdgeId(i as u64),
                u: NodeId(a),
                v: NodeId(b),
            })
            .collect();
        Graph::new(nodes, edges)
    }

    /// Attaches edge weights (`weights[i]` belongs to `edges()[i]`).
    pub fn with_weights(mut self, weights: Vec<u64>) -> Result<Graph, GraphError> {
        if weights.len() != self.edges.len() {
            let missing = self.edges.get(weights.len()).map(|e| e.id).unwrap_or(EdgeId(0));
            return Err(GraphError::MissingWeight(missing));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Attaches b-values and validates `1 <= b_v <= degree(v)`.
    pub fn with_b_values(mut self, b: Vec<u64>) -> Result<Graph, GraphError> {
        if b.len() != self.nodes.len() {
            let missing = self.nodes.get(b.len()).copied().unwrap_or(NodeId(0));
            return Err(GraphError::MissingBValue(missing));
        }
        for (i, &bv) in b.iter().enumerate() {
            let d = self.adj[i].len();
            if bv < 1 || bv as usize > d {
                return Err(GraphError::BadBValue {
                    node: self.nodes[i],
                    b: bv,
                    degree: d,
                });
            }
        }
        self.b_values = Some(b);
        Ok(self)
    }

    /// Attaches a node coloring and validates that it is proper.
    pub fn with_coloring(mut self, coloring: NodeColoring) -> Result<Graph, GraphError> {
        self.validate_coloring(&coloring)?;
        self.coloring = Some(coloring);
        Ok(self)
    }

    pub fn validate_coloring(&self, coloring: &NodeColoring) -> Result<(), GraphError> {
        for e in &self.edges {
            let cu = coloring.colors[self.node_index(e.u)];
            let cv = coloring.colors[self.node_index(e.v)];
            if cu == cv {
                return Err(GraphError::ImproperColoring(e.u, e.v, cu));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Maximum degree.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_at(&self, idx: usize) -> NodeId {
        self.nodes[idx]
    }

    pub fn edge_at(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// Index of a node id; panics on unknown id.
    pub fn node_index(&self, n: NodeId) -> usize {
        self.nodes.binary_search(&n).expect("unknown node id")
    }

    pub fn try_node_index(&self, n: NodeId) -> Option<usize> {
        self.nodes.binary_search(&n).ok()
    }

    /// Index of an edge id; panics on unknown id.
    pub fn edge_index(&self, e: EdgeId) -> usize {
        self.edges
            .binary_search_by_key(&e, |x| x.id)
            .expect("unknown edge id")
    }

    pub fn try_edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&e, |x| x.id).ok()
    }

    pub fn has_edge_id(&self, e: EdgeId) -> bool {
        self.try_edge_index(e).is_some()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    /// Incident edges of the node at `idx`: `(edge index, peer node index)`,
    /// ascending by edge id.
    pub fn incident(&self, idx: usize) -> &[(usize, usize)] {
        &self.adj[idx]
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, edge_idx: usize) -> Option<u64> {
        self.weights.as_ref().map(|w| w[edge_idx])
    }

    pub fn b_values(&self) -> Option<&[u64]> {
        self.b_values.as_deref()
    }

    pub fn b_value(&self, node_idx: usize) -> Option<u64> {
        self.b_values.as_ref().map(|b| b[node_idx])
    }

    pub fn coloring(&self) -> Option<&NodeColoring> {
        self.coloring.as_ref()
    }

    /// Whether two nodes (by index) are adjacent.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (small, other) = if self.adj[a].len() <= self.adj[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adj[small].iter().any(|&(_, p)| p == other)
    }

    /// Subgraph on the same node set, keeping only the given edges.
    /// Identifiers, weights, b-values and coloring carry over (b-values are
    /// clamped to the new degrees where needed is NOT done here: b-values are
    /// dropped because their invariant is degree-dependent).
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> Graph {
        let mut keep_sorted: Vec<EdgeId> = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        let edges: Vec<Edge> = keep_sorted
            .iter()
            .map(|&id| self.edges[self.edge_index(id)])
            .collect();
        let weights = self.weights.as_ref().map(|w| {
            keep_sorted
                .iter()
                .map(|&id| w[self.edge_index(id)])
                .collect()
        });
        let mut g = Graph::new(self.nodes.clone(), edges).expect("subgraph of a valid graph");
        g.weights = weights;
        g.coloring = self.coloring.clone();
        g.delta = g.adj.iter().map(Vec::len).max().unwrap_or(0);
        g
    }

    /// Same as [`edge_subgraph`] but with fresh b-values supplied by the
    /// caller (indexed like `nodes()`).
    pub fn edge_subgraph_with_b(&self, keep: &[EdgeId], b: Vec<u64>) -> Graph {
        let mut g = self.edge_subgraph(keep);
        debug_assert_eq!(b.len(), g.nodes.len());
        g.b_values = Some(b);
        g
    }

    /// Replaces the weights wholesale (same length as `edges()`).
    pub fn reweighted(&self, weights: Vec<u64>) -> Graph {
        let mut g = self.clone();
        assert_eq!(weights.len(), g.edges.len());
        g.weights = Some(weights);
        g
    }

    /// `ceil(log2(delta))`, the fractionality level the greedy phase starts
    /// from; 0 for edgeless graphs.
    pub fn log_delta_ceil(&self) -> u32 {
        ceil_log2(self.delta as u64)
    }
}

/// `ceil(log2(x))` with `ceil_log2(0) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
