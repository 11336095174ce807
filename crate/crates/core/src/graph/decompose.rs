//! Structural transforms: degree-2 decomposition, bipartite double cover and
//! path/cycle extraction.

use super::{Edge, EdgeId, Graph, GraphError, NodeColoring, NodeId};
use std::collections::BTreeMap;

/// Degree-2 decomposition of a graph.
///
/// Every node `v` is replaced by `ceil(degree(v)/2)` copies; incident edges
/// are paired in ascending edge-id order, two per copy, with the odd leftover
/// edge on a final degree-1 copy. Edge identifiers are shared with the
/// original graph, so the decomposed edge set *is* the original edge set.
#[derive(Clone, Debug)]
pub struct TwoDecomposition {
    pub decomposed: Graph,
    /// Original node per decomposed node index.
    copy_of: Vec<NodeId>,
}

impl TwoDecomposition {
    /// Original node that the given copy (by decomposed node index) stands for.
    pub fn original_of(&self, copy_idx: usize) -> NodeId {
        self.copy_of[copy_idx]
    }

    pub fn copy_of(&self) -> &[NodeId] {
        &self.copy_of
    }

    /// Number of copies of an original node.
    pub fn copies_of(&self, original: NodeId) -> usize {
        self.copy_of.iter().filter(|&&o| o == original).count()
    }
}

/// Splits a graph into node-disjoint paths and cycles sharing its edge set.
pub fn two_decompose(g: &Graph) -> TwoDecomposition {
    let mut copy_of: Vec<NodeId> = Vec::new();
    // Copy node id for (node idx, pair slot). Dense fresh ids in node order.
    let mut copy_id: Vec<Vec<u64>> = Vec::with_capacity(g.n());
    let mut next = 0u64;
    for idx in 0..g.n() {
        let d = g.degree(idx);
        let copies = d.div_ceil(2);
        let mut ids = Vec::with_capacity(copies);
        for _ in 0..copies {
            ids.push(next);
            copy_of.push(g.node_at(idx));
            next += 1;
        }
        copy_id.push(ids);
    }
    let mut endpoint_copy: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for idx in 0..g.n() {
        for (slot, &(edge_idx, _)) in g.incident(idx).iter().enumerate() {
            endpoint_copy.insert((edge_idx, idx), copy_id[idx][slot / 2]);
        }
    }
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(edge_idx, e)| {
            let ui = g.node_index(e.u);
            let vi = g.node_index(e.v);
            Edge {
                id: e.id,
                u: NodeId(endpoint_copy[&(edge_idx, ui)]),
                v: NodeId(endpoint_copy[&(edge_idx, vi)]),
            }
        })
        .collect();
    let nodes: Vec<NodeId> = (0..next).map(NodeId).collect();
    let mut decomposed =
        Graph::new(nodes, edges).expect("decomposition of a simple graph is simple");
    // Copies inherit the original coloring: edges join copies of distinct
    // originals, so properness carries over.
    if let Some(col) = g.coloring() {
        let colors = copy_of
            .iter()
            .map(|&orig| col.colors[g.node_index(orig)])
            .collect();
        decomposed = decomposed
            .with_coloring(NodeColoring { colors, palette: col.palette })
            .expect("inherited coloring stays proper");
    }
    TwoDecomposition { decomposed, copy_of }
}

/// Which side of the double cover a node belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Out,
    In,
}

/// Bipartite double cover: each node splits into an out-sibling and an
/// in-sibling, and an edge oriented `u -> v` becomes `{u_out, v_in}`.
///
/// The cover carries a 2-coloring with the in-side as color 1 and the
/// out-side as color 0. Edge ids are shared with the original graph.
#[derive(Clone, Debug)]
pub struct BipartiteCover {
    pub cover: Graph,
    /// `(original node, side)` per cover node index.
    side_of: Vec<(NodeId, Side)>,
}

impl BipartiteCover {
    pub fn side_of(&self, cover_idx: usize) -> (NodeId, Side) {
        self.side_of[cover_idx]
    }
}

/// Color index of the in-side in the cover's 2-coloring.
pub const IN_SIDE_COLOR: u64 = 1;

/// Builds the bipartite double cover under the given orientation.
///
/// `orient` maps edge ids to ordered endpoint pairs; when `None`, every edge
/// is directed from its smaller to its larger endpoint.
pub fn bipartite_cover(
    g: &Graph,
    orient: Option<&BTreeMap<EdgeId, (NodeId, NodeId)>>,
) -> Result<BipartiteCover, GraphError> {
    if let Some(o) = orient {
        for (&eid, &(a, b)) in o {
            let idx = g
                .try_edge_index(eid)
                .ok_or(GraphError::OrientationNonEdge(eid))?;
            let e = g.edge_at(idx);
            if !((a, b) == (e.u, e.v) || (a, b) == (e.v, e.u)) {
                return Err(GraphError::OrientationBadEndpoints(eid));
            }
        }
    }
    // out(v) = 2*idx, in(v) = 2*idx + 1
    let mut side_of = Vec::with_capacity(2 * g.n());
    let mut nodes = Vec::with_capacity(2 * g.n());
    let mut colors = Vec::with_capacity(2 * g.n());
    for idx in 0..g.n() {
        let v = g.node_at(idx);
        nodes.push(NodeId(2 * idx as u64));
        side_of.push((v, Side::Out));
        colors.push(1 - IN_SIDE_COLOR);
        nodes.push(NodeId(2 * idx as u64 + 1));
        side_of.push((v, Side::In));
        colors.push(IN_SIDE_COLOR);
    }
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            let (from, to) = match orient.and_then(|o| o.get(&e.id)) {
                Some(&(a, b)) => (a, b),
                None => {
                    if e.u <= e.v {
                        (e.u, e.v)
                    } else {
                        (e.v, e.u)
                    }
                }
            };
            Edge {
                id: e.id,
                u: NodeId(2 * g.node_index(from) as u64),
                v: NodeId(2 * g.node_index(to) as u64 + 1),
            }
        })
        .collect();
    let cover = Graph::new(nodes, edges)
        .expect("cover of a simple graph is simple")
        .with_coloring(NodeColoring { colors, palette: 2 })
        .expect("out/in split is a proper 2-coloring");
    Ok(BipartiteCover { cover, side_of })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ComponentKind {
    Path,
    Cycle,
}

/// A connected component of a graph with maximum degree 2, in canonical
/// order: paths start at their smaller-id endpoint; cycles start at their
/// smallest node and proceed toward its smaller-id neighbor. For cycles the
/// node list closes on its starting node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCycleComponent {
    pub kind: ComponentKind,
    pub edges: Vec<EdgeId>,
    pub nodes: Vec<NodeId>,
}

impl PathCycleComponent {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Extracts the path/cycle components of a degree-<=2 graph.
pub fn components(g: &Graph) -> Result<Vec<PathCycleComponent>, GraphError> {
    for idx in 0..g.n() {
        if g.degree(idx) > 2 {
            return Err(GraphError::DegreeTooHigh(g.node_at(idx), g.degree(idx)));
        }
    }
    let mut visited = vec![false; g.n()];
    let mut out = Vec::new();

    // Walk from `start` away from `avoid_edge`, collecting nodes and edges.
    let walk = |start: usize,
                first_edge: usize,
                visited: &mut Vec<bool>|
     -> (Vec<usize>, Vec<usize>) {
        let mut nodes = vec![start];
        let mut edges = Vec::new();
        let mut cur = start;
        let mut next_edge = first_edge;
        loop {
            edges.push(next_edge);
            let (_, peer) = *g
                .incident(cur)
                .iter()
                .find(|&&(e, _)| e == next_edge)
                .expect("edge incident to walk node");
            cur = peer;
            nodes.push(cur);
            if cur == start {
                break; // closed a cycle
            }
            visited[cur] = true;
            let prev_edge = next_edge;
            match g.incident(cur).iter().find(|&&(e, _)| e != prev_edge) {
                Some(&(e, _)) => next_edge = e,
                None => break, // reached an endpoint
            }
        }
        (nodes, edges)
    };

    // Paths first: scan 度-1 endpoints in ascending node order so each path
    // is discovered from its smaller endpoint.
    for idx in 0..g.n() {
        if visited[idx] || g.degree(idx) != 1 {
            continue;
        }
        visited[idx] = true;
        let first = g.incident(idx)[0].0;
        let (nodes, edges) = walk(idx, first, &mut visited);
        let other_end = *nodes.last().unwrap();
        // Canonical start is the smaller endpoint.
        let (nodes, edges) = if g.node_at(idx) <= g.node_at(other_end) {
            (nodes, edges)
        } else {
            (
                nodes.into_iter().rev().collect(),
                edges.into_iter().rev().collect(),
            )
        };
        out.push(PathCycleComponent {
            kind: ComponentKind::Path,
            nodes: nodes.into_iter().map(|i| g.node_at(i)).collect(),
            edges: edges.into_iter().map(|i| g.edge_at(i).id).collect(),
        });
    }
    // Remaining unvisited nodes with edges are on cycles.
    for idx in 0..g.n() {
        if visited[idx] || g.degree(idx) != 2 {
            continue;
        }
        visited[idx] = true;
        // Start toward the smaller-id neighbor.
        let mut inc = g.incident(idx).to_vec();
        inc.sort_by_key(|&(_, p)| g.node_at(p));
        let (nodes, edges) = walk(idx, inc[0].0, &mut visited);
        debug_assert_eq!(nodes[0], *nodes.last().unwrap());
        out.push(PathCycleComponent {
            kind: ComponentKind::Cycle,
            nodes: nodes.into_iter().map(|i| g.node_at(i)).collect(),
            edges: edges.into_iter().map(|i| g.edge_at(i).id).collect(),
        });
    }
    // Components are discovered in ascending order of their canonical start
    // node within each kind; merge to a single ascending order.
    out.sort_by_key(|c| c.nodes[0]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(ids: &[u64]) -> Graph {
        let pairs: Vec<(u64, u64)> = ids.windows(2).map(|w| (w[0], w[1])).collect();
        Graph::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn single_edge_decomposes_to_single_edge() {
        let g = Graph::from_pairs(&[(7, 3)]).unwrap();
        let d = two_decompose(&g);
        assert_eq!(d.decomposed.n(), 2);
        assert_eq!(d.decomposed.m(), 1);
        assert_eq!(d.copies_of(NodeId(3)), 1);
        assert_eq!(d.copies_of(NodeId(7)), 1);
        let comps = components(&d.decomposed).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].kind, ComponentKind::Path);
        assert_eq!(comps[0].len(), 1);
    }

    #[test]
    fn star_k13_splits_center() {
        // Center 0 with leaves 1,2,3; edges 0,1,2 in ascending order.
        let g = Graph::from_pairs(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = two_decompose(&g);
        assert_eq!(d.copies_of(NodeId(0)), 2);
        let degrees: Vec<usize> = (0..d.decomposed.n())
            .filter(|&i| d.original_of(i) == NodeId(0))
            .map(|i| d.decomposed.degree(i))
            .collect();
        assert_eq!(degrees, vec![2, 1]);
        let mut comps = components(&d.decomposed).unwrap();
        comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
        assert_eq!(comps.len(), 2);
        // Pairing rule: edges 0 and 1 share the degree-2 copy (path of
        // length 2); leftover edge 2 is the degree-1 copy (path of length 1).
        assert_eq!(comps[0].len(), 2);
        assert_eq!(comps[0].edges, vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(comps[1].len(), 1);
        assert_eq!(comps[1].edges, vec![EdgeId(2)]);
    }

    #[test]
    fn cycle_c6_is_unchanged() {
        let pairs: Vec<(u64, u64)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let g = Graph::from_pairs(&pairs).unwrap();
        let d = two_decompose(&g);
        assert_eq!(d.decomposed.n(), 6);
        assert_eq!(d.decomposed.m(), 6);
        let comps = components(&d.decomposed).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].kind, ComponentKind::Cycle);
        assert_eq!(comps[0].len(), 6);
    }

    #[test]
    fn cover_of_single_edge() {
        let g = Graph::from_pairs(&[(0, 1)]).unwrap();
        let c = bipartite_cover(&g, None).unwrap();
        assert_eq!(c.cover.n(), 4);
        assert_eq!(c.cover.m(), 1);
        let e = c.cover.edges()[0];
        let (ou, su) = c.side_of(c.cover.node_index(e.u));
        let (ov, sv) = c.side_of(c.cover.node_index(e.v));
        assert_eq!((ou, su), (NodeId(0), Side::Out));
        assert_eq!((ov, sv), (NodeId(1), Side::In));
        // Two isolated siblings remain.
        let isolated = (0..c.cover.n()).filter(|&i| c.cover.degree(i) == 0).count();
        assert_eq!(isolated, 2);
    }

    #[test]
    fn cover_of_cyclically_oriented_triangle_is_perfect_matching() {
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut orient = BTreeMap::new();
        orient.insert(EdgeId(0), (NodeId(0), NodeId(1)));
        orient.insert(EdgeId(1), (NodeId(1), NodeId(2)));
        orient.insert(EdgeId(2), (NodeId(2), NodeId(0)));
        let c = bipartite_cover(&g, Some(&orient)).unwrap();
        assert_eq!(c.cover.n(), 6);
        assert_eq!(c.cover.m(), 3);
        // Every used copy has degree exactly 1.
        for i in 0..c.cover.n() {
            assert!(c.cover.degree(i) <= 1);
        }
        let used = (0..c.cover.n()).filter(|&i| c.cover.degree(i) == 1).count();
        assert_eq!(used, 6);
    }

    #[test]
    fn cover_rejects_unknown_edge_orientation() {
        let g = Graph::from_pairs(&[(0, 1)]).unwrap();
        let mut orient = BTreeMap::new();
        orient.insert(EdgeId(9), (NodeId(0), NodeId(1)));
        assert_eq!(
            bipartite_cover(&g, Some(&orient)).unwrap_err(),
            GraphError::OrientationNonEdge(EdgeId(9))
        );
    }

    #[test]
    fn cover_preserves_degree_sums() {
        let g = Graph::from_pairs(&[(0, 1), (0, 2), (0, 3), (2, 3), (1, 3)]).unwrap();
        let c = bipartite_cover(&g, None).unwrap();
        for idx in 0..g.n() {
            let v = g.node_at(idx);
            let total: usize = (0..c.cover.n())
                .filter(|&i| c.side_of(i).0 == v)
                .map(|i| c.cover.degree(i))
                .sum();
            assert_eq!(total, g.degree(idx));
        }
    }

    #[test]
    fn components_canonical_orders() {
        // C_4.
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let comps = components(&g).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].kind, ComponentKind::Cycle);
        assert_eq!(comps[0].len(), 4);
        assert_eq!(comps[0].nodes[0], NodeId(0));
        assert_eq!(comps[0].nodes[1], NodeId(1)); // toward smaller neighbor

        // Two disjoint edges.
        let g = Graph::from_pairs(&[(0, 1), (5, 3)]).unwrap();
        let comps = components(&g).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.kind == ComponentKind::Path && c.len() == 1));

        // Path a-b-c with a < c starts at a.
        let g = path(&[4, 9, 6]);
        let comps = components(&g).unwrap();
        assert_eq!(comps[0].nodes, vec![NodeId(4), NodeId(9), NodeId(6)]);

        // Degree-3 node is rejected.
        let g = Graph::from_pairs(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(
            components(&g),
            Err(GraphError::DegreeTooHigh(NodeId(0), 3))
        ));
    }
}
