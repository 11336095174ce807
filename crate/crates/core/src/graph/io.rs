//! Text edge-list format.
//!
//! ```text
//! n m [weighted] [bvalues]
//! u v [w]        (m lines)
//! v b_v          (n lines, only when "bvalues" is declared)
//! ```
//!
//! Node ids are non-negative integers and may be sparse. The node set is the
//! set of edge endpoints (plus the ids of the b-value lines when present);
//! if fewer than `n` distinct ids occur, the remaining nodes are filled in
//! with the smallest unused non-negative ids so that isolated nodes can be
//! represented. Edge ids are assigned 0.. in line order.

use super::{Edge, EdgeId, Graph, NodeId};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("empty graph file")]
    Empty,
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("header declares {declared} edges but {found} were found")]
    EdgeCount { declared: usize, found: usize },
    #[error("header declares {declared} nodes but {found} occur")]
    NodeCount { declared: usize, found: usize },
    #[error("invalid graph: {0}")]
    Graph(#[from] super::GraphError),
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(FormatError::Empty)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(FormatError::Line(hline, "header needs `n m`".into()));
    }
    let n: usize = toks[0]
        .parse()
        .map_err(|_| FormatError::Line(hline, "bad node count".into()))?;
    let m: usize = toks[1]
        .parse()
        .map_err(|_| FormatError::Line(hline, "bad edge count".into()))?;
    let mut weighted = false;
    let mut bvalues = false;
    for t in &toks[2..] {
        match *t {
            "weighted" => weighted = true,
            "bvalues" => bvalues = true,
            other => {
                return Err(FormatError::Line(hline, format!("unknown flag `{other}`")))
            }
        }
    }

    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(if weighted { m } else { 0 });
    let mut ids: BTreeSet<u64> = BTreeSet::new();
    for k in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or(FormatError::EdgeCount { declared: m, found: k })?;
        let t: Vec<&str> = line.split_whitespace().collect();
        let want = if weighted { 3 } else { 2 };
        if t.len() != want {
            return Err(FormatError::Line(ln, format!("expected {want} fields")));
        }
        let u: u64 = t[0]
            .parse()
            .map_err(|_| FormatError::Line(ln, "bad node id".into()))?;
        let v: u64 = t[1]
            .parse()
            .map_err(|_| FormatError::Line(ln, "bad node id".into()))?;
        if weighted {
            let w: u64 = t[2]
                .parse()
                .map_err(|_| FormatError::Line(ln, "bad weight".into()))?;
            weights.push(w);
        }
        ids.insert(u);
        ids.insert(v);
        edges.push(Edge { id: EdgeId(k as u64), u: NodeId(u), v: NodeId(v) });
    }

    let mut b_pairs: Vec<(u64, u64)> = Vec::new();
    if bvalues {
        for k in 0..n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| FormatError::Line(0, format!("missing b-value line {k}")))?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 {
                return Err(FormatError::Line(ln, "expected `v b_v`".into()));
            }
            let v: u64 = t[0]
                .parse()
                .map_err(|_| FormatError::Line(ln, "bad node id".into()))?;
            let b: u64 = t[1]
                .parse()
                .map_err(|_| FormatError::Line(ln, "bad b-value".into()))?;
            ids.insert(v);
            b_pairs.push((v, b));
        }
    }

    if ids.len() > n {
        return Err(FormatError::NodeCount { declared: n, found: ids.len() });
    }
    // Fill missing nodes with the smallest unused ids.
    let mut next = 0u64;
    while ids.len() < n {
        if !ids.contains(&next) {
            ids.insert(next);
        }
        next += 1;
    }
    let nodes: Vec<NodeId> = ids.into_iter().map(NodeId).collect();
    let mut g = Graph::new(nodes, edges)?;
    if weighted {
        g = g.with_weights(weights)?;
    }
    if bvalues {
        let mut b = vec![0u64; g.n()];
        for (v, bv) in b_pairs {
            b[g.node_index(NodeId(v))] = bv;
        }
        g = g.with_b_values(b)?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let mut flags = String::new();
    if g.weights().is_some() {
        flags.push_str(" weighted");
    }
    if g.b_values().is_some() {
        flags.push_str(" bvalues");
    }
    out.push_str(&format!("{} {}{}\n", g.n(), g.m(), flags));
    for (i, e) in g.edges().iter().enumerate() {
        match g.weight(i) {
            Some(w) => out.push_str(&format!("{} {} {}\n", e.u, e.v, w)),
            None => out.push_str(&format!("{} {}\n", e.u, e.v)),
        }
    }
    if let Some(b) = g.b_values() {
        for (i, bv) in b.iter().enumerate() {
            out.push_str(&format!("{} {}\n", g.node_at(i), bv));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_plain_and_weighted() {
        let text = "3 2\n0 1\n1 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert_eq!(write_graph(&g), text);

        let text = "3 2 weighted\n0 1 5\n1 2 7\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.weight(1), Some(7));
        assert_eq!(write_graph(&g), text);
    }

    #[test]
    fn b_values_and_isolated_nodes() {
        let text = "4 2 bvalues\n0 1\n1 2\n0 1\n1 2\n2 1\n9 0\n";
        // Node 9 is isolated; b_9 = 0 is invalid (degree 0), so this must fail.
        assert!(parse_graph(text).is_err());

        let text = "3 3 bvalues\n0 1\n1 2\n0 2\n0 1\n1 2\n2 1\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.b_value(g.node_index(NodeId(1))), Some(2));
        let again = parse_graph(&write_graph(&g)).unwrap();
        assert_eq!(write_graph(&again), write_graph(&g));
    }

    #[test]
    fn isolated_nodes_fill_in() {
        let g = parse_graph("4 1\n5 6\n").unwrap();
        assert_eq!(g.n(), 4);
        let ids: Vec<u64> = g.nodes().iter().map(|n| n.0).collect();
        assert_eq!(ids, vec![0, 1, 5, 6]);
    }

    #[test]
    fn rejects_surplus_ids() {
        assert!(matches!(
            parse_graph("1 1\n0 1\n"),
            Err(FormatError::NodeCount { .. })
        ));
    }
}
