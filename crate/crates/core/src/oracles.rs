//! Independent exact solvers and validity checkers.
//!
//! Everything here exists to verify the distributed algorithms and therefore
//! deliberately shares no code with them: the solvers work on plain index
//! arrays, use centralized classical algorithms, and refuse instances above
//! their budget instead of silently running forever.
//!
//! Two independent routes exist for maximum matching (augmenting-path search
//! with blossom contraction, and exhaustive edge-subset enumeration) so the
//! oracle itself is cross-checked wherever both run.

use crate::graph::{EdgeId, Graph, NodeId};
use thiserror::Error;

/// Instance-size limits per oracle class.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    /// Blossom search: max nodes.
    pub blossom_nodes: usize,
    /// Blossom search: max edges.
    pub blossom_edges: usize,
    /// Exhaustive subset enumeration: max edges.
    pub exhaustive_edges: usize,
    /// Weighted branch-and-bound: max edges.
    pub weighted_edges: usize,
    /// Minimum edge dominating set: max edges.
    pub eds_edges: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            blossom_nodes: 1000,
            blossom_edges: 200_000,
            exhaustive_edges: 24,
            weighted_edges: 26,
            eds_edges: 20,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance exceeds oracle budget: {0}")]
    OverBudget(String),
    #[error("edge weights are required")]
    MissingWeights,
    #[error("b-values are required")]
    MissingBValues,
}

/// Exact solution with a witness edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSolution {
    pub size: u64,
    /// Total weight of the witness; equals `size` in the unweighted case.
    pub weight: u64,
    pub witness: Vec<EdgeId>,
}

// ---------------------------------------------------------------------------
// Maximum cardinality matching (augmenting paths with blossom contraction)
// ---------------------------------------------------------------------------

struct Blossom {
    n: usize,
    adj: Vec<Vec<usize>>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    queue: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

const NONE: usize = usize::MAX;

impl Blossom {
    fn new(n: usize, adj: Vec<Vec<usize>>) -> Self {
        Blossom {
            n,
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            queue: Vec::new(),
            used: vec![false; n],
            in_blossom: vec![false; n],
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.n];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for i in 0..self.n {
            self.base[i] = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for ti in 0..self.adj[v].len() {
                let to = self.adj[v][ti];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // Odd cycle: contract the blossom.
                    let cur_base = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur_base, to);
                    self.mark_path(to, cur_base, v);
                    for i in 0..self.n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur_base;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        // Augment along the path ending in `to`.
                        let mut u = to;
                        while u != NONE {
                            let pv = self.parent[u];
                            let ppv = self.mate[pv];
                            self.mate[u] = pv;
                            self.mate[pv] = u;
                            u = ppv;
                        }
                        return to;
                    } else {
                        let w = self.mate[to];
                        if !self.used[w] {
                            self.used[w] = true;
                            self.queue.push(w);
                        }
                    }
                }
            }
        }
        NONE
    }

    fn solve(mut self) -> Vec<usize> {
        for v in 0..self.n {
            if self.mate[v] == NONE {
                self.find_path(v);
            }
        }
        self.mate
    }
}

/// Exact maximum cardinality matching.
///
/// Runs the blossom search, and on instances small enough for the exhaustive
/// route additionally cross-checks the two sizes against each other.
pub fn max_matching_exact(g: &Graph, budget: &OracleBudget) -> Result<OracleSolution, OracleError> {
    if g.n() > budget.blossom_nodes || g.m() > budget.blossom_edges {
        return Err(OracleError::OverBudget(format!(
            "matching oracle limited to {} nodes / {} edges, got {} / {}",
            budget.blossom_nodes,
            budget.blossom_edges,
            g.n(),
            g.m()
        )));
    }
    let adj: Vec<Vec<usize>> = (0..g.n())
        .map(|i| g.incident(i).iter().map(|&(_, p)| p).collect())
        .collect();
    let mate = Blossom::new(g.n(), adj).solve();
    let mut witness = Vec::new();
    for e in g.edges() {
        let ui = g.node_index(e.u);
        let vi = g.node_index(e.v);
        // Each matched pair corresponds to exactly one edge of a simple graph.
        if mate[ui] == vi && mate[vi] == ui {
            witness.push(e.id);
        }
    }
    let size = witness.len() as u64;
    if g.m() <= budget.exhaustive_edges {
        let b = vec![1u64; g.n()];
        let alt = exhaustive_best_subset(g, &b, None);
        assert_eq!(
            alt.size, size,
            "matching oracle disagreement: exhaustive {} vs blossom {}",
            alt.size, size
        );
    }
    Ok(OracleSolution { size, weight: size, witness })
}

// ---------------------------------------------------------------------------
// Exhaustive subset enumeration (Gray-code order)
// ---------------------------------------------------------------------------

/// Enumerates all edge subsets in Gray-code order, maintaining per-node
/// chosen degrees incrementally, and returns the best feasible subset under
/// the degree bounds `b` (cardinality, or total weight when `weights` is
/// given).
fn exhaustive_best_subset(g: &Graph, b: &[u64], weights: Option<&[u64]>) -> OracleSolution {
    let m = g.m();
    assert!(m < 63, "exhaustive oracle called above budget");
    let ends: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (g.node_index(e.u), g.node_index(e.v)))
        .collect();
    let mut deg = vec![0u64; g.n()];
    let mut violations = 0usize; // nodes with deg > b
    let mut chosen = 0u64; // bitmask
    let mut count = 0u64;
    let mut weight = 0u64;
    let mut best_weight = 0u64;
    let mut best_mask = 0u64;
    let mut bump = |node: usize, up: bool, deg: &mut Vec<u64>, violations: &mut usize| {
        if up {
            deg[node] += 1;
            if deg[node] == b[node] + 1 {
                *violations += 1;
            }
        } else {
            if deg[node] == b[node] + 1 {
                *violations -= 1;
            }
            deg[node] -= 1;
        }
    };
    for k in 1u64..(1u64 << m) {
        let bit = k.trailing_zeros() as usize;
        let adding = chosen & (1 << bit) == 0;
        chosen ^= 1 << bit;
        let (u, v) = ends[bit];
        bump(u, adding, &mut deg, &mut violations);
        bump(v, adding, &mut deg, &mut violations);
        let w = weights.map_or(1, |ws| ws[bit]);
        if adding {
            count += 1;
            weight += w;
        } else {
            count -= 1;
            weight -= w;
        }
        if violations == 0 && weight > best_weight {
            best_weight = weight;
            best_mask = chosen;
        }
    }
    let witness: Vec<EdgeId> = (0..m)
        .filter(|&i| best_mask & (1 << i) != 0)
        .map(|i| g.edge_at(i).id)
        .collect();
    let _ = count;
    OracleSolution {
        size: witness.len() as u64,
        weight: best_weight,
        witness,
    }
}

// ---------------------------------------------------------------------------
// Maximum weight matching (branch and bound)
// ---------------------------------------------------------------------------

/// Exact maximum weight matching via branch-and-bound over edges ordered by
/// descending weight, pruned with suffix-sum upper bounds.
pub fn max_weighted_matching_exact(
    g: &Graph,
    budget: &OracleBudget,
) -> Result<OracleSolution, OracleError> {
    let weights = g.weights().ok_or(OracleError::MissingWeights)?;
    if g.m() > budget.weighted_edges {
        return Err(OracleError::OverBudget(format!(
            "weighted matching oracle limited to {} edges, got {}",
            budget.weighted_edges,
            g.m()
        )));
    }
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((weights[i], std::cmp::Reverse(i))));
    let ends: Vec<(usize, usize)> = order
        .iter()
        .map(|&i| {
            let e = g.edge_at(i);
            (g.node_index(e.u), g.node_index(e.v))
        })
        .collect();
    let ws: Vec<u64> = order.iter().map(|&i| weights[i]).collect();
    let mut suffix: Vec<u64> = vec![0; ws.len() + 1];
    for i in (0..ws.len()).rev() {
        suffix[i] = suffix[i + 1] + ws[i];
    }

    struct Bb<'a> {
        ends: &'a [(usize, usize)],
        ws: &'a [u64],
        suffix: &'a [u64],
        used: Vec<bool>,
        current: Vec<usize>,
        cur_w: u64,
        best_w: u64,
        best: Vec<usize>,
    }
    impl Bb<'_> {
        fn go(&mut self, i: usize) {
            if self.cur_w > self.best_w {
                self.best_w = self.cur_w;
                self.best = self.current.clone();
            }
            if i >= self.ends.len() || self.cur_w + self.suffix[i] <= self.best_w {
                return;
            }
            let (u, v) = self.ends[i];
            if !self.used[u] && !self.used[v] {
                self.used[u] = true;
                self.used[v] = true;
                self.current.push(i);
                self.cur_w += self.ws[i];
                self.go(i + 1);
                self.cur_w -= self.ws[i];
                self.current.pop();
                self.used[u] = false;
                self.used[v] = false;
            }
            self.go(i + 1);
        }
    }
    let mut bb = Bb {
        ends: &ends,
        ws: &ws,
        suffix: &suffix,
        used: vec![false; g.n()],
        current: Vec::new(),
        cur_w: 0,
        best_w: 0,
        best: Vec::new(),
    };
    bb.go(0);
    let mut witness: Vec<EdgeId> = bb.best.iter().map(|&i| g.edge_at(order[i]).id).collect();
    witness.sort_unstable();
    // Cross-check against the Gray-code route when cheap enough.
    if g.m() <= budget.exhaustive_edges {
        let b = vec![1u64; g.n()];
        let reordered: Vec<u64> = (0..g.m()).map(|i| weights[i]).collect();
        let alt = exhaustive_best_subset(g, &b, Some(&reordered));
        assert_eq!(
            alt.weight, bb.best_w,
            "weighted oracle disagreement: exhaustive {} vs branch-and-bound {}",
            alt.weight, bb.best_w
        );
    }
    Ok(OracleSolution {
        size: witness.len() as u64,
        weight: bb.best_w,
        witness,
    })
}

// ---------------------------------------------------------------------------
// Maximum b-matching
// ---------------------------------------------------------------------------

/// Exact maximum b-matching by Gray-code enumeration; bipartite instances
/// within budget are cross-checked with an augmenting-flow solver.
pub fn max_b_matching_exact(g: &Graph, budget: &OracleBudget) -> Result<OracleSolution, OracleError> {
    let b = g.b_values().ok_or(OracleError::MissingBValues)?;
    if g.m() > budget.exhaustive_edges {
        return Err(OracleError::OverBudget(format!(
            "b-matching oracle limited to {} edges, got {}",
            budget.exhaustive_edges,
            g.m()
        )));
    }
    let sol = exhaustive_best_subset(g, b, None);
    if let Some(sides) = two_color(g) {
        let flow = bipartite_b_matching_flow(g, b, &sides);
        assert_eq!(
            flow, sol.size,
            "b-matching oracle disagreement: flow {} vs exhaustive {}",
            flow, sol.size
        );
    }
    Ok(sol)
}

/// 2-colors a graph if it is bipartite.
fn two_color(g: &Graph) -> Option<Vec<bool>> {
    let mut side = vec![None; g.n()];
    for start in 0..g.n() {
        if side[start].is_some() || g.degree(start) == 0 {
            continue;
        }
        side[start] = Some(false);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let sv = side[v].unwrap();
            for &(_, p) in g.incident(v) {
                match side[p] {
                    None => {
                        side[p] = Some(!sv);
                        stack.push(p);
                    }
                    Some(sp) if sp == sv => return None,
                    _ => {}
                }
            }
        }
    }
    Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
}

/// Max-flow value of the bipartite b-matching network: source -> left node
/// (capacity `b_v`), graph edge left -> right (capacity 1), right node ->
/// sink (capacity `b_v`). Plain Edmonds-Karp on an explicit residual graph.
fn bipartite_b_matching_flow(g: &Graph, b: &[u64], left: &[bool]) -> u64 {
    let source = g.n();
    let sink = g.n() + 1;
    // Residual arcs stored as (to, capacity); arc i and i^1 are twins.
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); g.n() + 2];
    let mut arcs: Vec<(usize, u64)> = Vec::new();
    let mut add = |head: &mut Vec<Vec<usize>>, arcs: &mut Vec<(usize, u64)>,
                   from: usize, to: usize, cap: u64| {
        head[from].push(arcs.len());
        arcs.push((to, cap));
        head[to].push(arcs.len());
        arcs.push((from, 0));
    };
    for v in 0..g.n() {
        if left[v] {
            add(&mut head, &mut arcs, source, v, b[v]);
        } else {
            add(&mut head, &mut arcs, v, sink, b[v]);
        }
    }
    for e in g.edges() {
        let u = g.node_index(e.u);
        let v = g.node_index(e.v);
        let (from, to) = if left[u] { (u, v) } else { (v, u) };
        add(&mut head, &mut arcs, from, to, 1);
    }
    let mut total = 0u64;
    loop {
        let mut parent: Vec<Option<usize>> = vec![None; g.n() + 2];
        let mut queue = std::collections::VecDeque::from([source]);
        let mut seen = vec![false; g.n() + 2];
        seen[source] = true;
        while let Some(v) = queue.pop_front() {
            for &ai in &head[v] {
                let (to, cap) = arcs[ai];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    parent[to] = Some(ai);
                    queue.push_back(to);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        // Bottleneck along the path, then push one augmenting unit batch.
        let mut bottleneck = u64::MAX;
        let mut v = sink;
        while v != source {
            let ai = parent[v].unwrap();
            bottleneck = bottleneck.min(arcs[ai].1);
            v = arcs[ai ^ 1].0;
        }
        let mut v = sink;
        while v != source {
            let ai = parent[v].unwrap();
            arcs[ai].1 -= bottleneck;
            arcs[ai ^ 1].1 += bottleneck;
            v = arcs[ai ^ 1].0;
        }
        total += bottleneck;
    }
    total
}

// ---------------------------------------------------------------------------
// Minimum edge dominating set
// ---------------------------------------------------------------------------

/// Exact minimum edge dominating set via branch and bound: the lowest-index
/// undominated edge must be dominated by one of the edges touching it.
///
/// A second branch-and-bound over maximal matchings serves as an independent
/// route; the two always agree (minimum EDS equals minimum maximal matching).
pub fn min_eds_exact(g: &Graph, budget: &OracleBudget) -> Result<OracleSolution, OracleError> {
    if g.m() > budget.eds_edges {
        return Err(OracleError::OverBudget(format!(
            "edge dominating set oracle limited to {} edges, got {}",
            budget.eds_edges,
            g.m()
        )));
    }
    let ends: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (g.node_index(e.u), g.node_index(e.v)))
        .collect();
    // Candidates that dominate edge i: all edges sharing an endpoint, plus i.
    let dominators: Vec<Vec<usize>> = (0..g.m())
        .map(|i| {
            let (u, v) = ends[i];
            let mut c: Vec<usize> = g
                .incident(u)
                .iter()
                .chain(g.incident(v))
                .map(|&(e, _)| e)
                .collect();
            c.push(i);
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();

    struct Eds<'a> {
        ends: &'a [(usize, usize)],
        dominators: &'a [Vec<usize>],
        node_hit: Vec<u32>,
        chosen: Vec<usize>,
        best: Vec<usize>,
    }
    impl Eds<'_> {
        fn first_undominated(&self) -> Option<usize> {
            self.ends
                .iter()
                .position(|&(u, v)| self.node_hit[u] == 0 && self.node_hit[v] == 0)
        }
        fn go(&mut self) {
            if self.chosen.len() + 1 > self.best.len() {
                return;
            }
            match self.first_undominated() {
                None => {
                    if self.chosen.len() < self.best.len() {
                        self.best = self.chosen.clone();
                    }
                }
                Some(i) => {
                    for &f in &self.dominators[i] {
                        let (u, v) = self.ends[f];
                        self.node_hit[u] += 1;
                        self.node_hit[v] += 1;
                        self.chosen.push(f);
                        self.go();
                        self.chosen.pop();
                        self.node_hit[u] -= 1;
                        self.node_hit[v] -= 1;
                    }
                }
            }
        }
    }
    let mut solver = Eds {
        ends: &ends,
        dominators: &dominators,
        node_hit: vec![0; g.n()],
        chosen: Vec::new(),
        best: (0..g.m()).collect(),
    };
    solver.go();
    let best = solver.best;
    // Independent route: smallest maximal matching.
    let mmm = min_maximal_matching_size(g.n(), &ends);
    assert_eq!(
        mmm,
        best.len() as u64,
        "edge dominating set oracle disagreement: min maximal matching {} vs direct {}",
        mmm,
        best.len()
    );
    let mut witness: Vec<EdgeId> = best.iter().map(|&i| g.edge_at(i).id).collect();
    witness.sort_unstable();
    Ok(OracleSolution {
        size: witness.len() as u64,
        weight: witness.len() as u64,
        witness,
    })
}

fn min_maximal_matching_size(n: usize, ends: &[(usize, usize)]) -> u64 {
    struct Mmm<'a> {
        ends: &'a [(usize, usize)],
        used: Vec<bool>,
        size: usize,
        best: usize,
    }
    impl Mmm<'_> {
        fn go(&mut self) {
            if self.size >= self.best {
                return;
            }
            // First edge with both endpoints free; any maximal matching must
            // contain an edge touching it.
            let Some(i) = self
                .ends
                .iter()
                .position(|&(u, v)| !self.used[u] && !self.used[v])
            else {
                self.best = self.size;
                return;
            };
            let (u, v) = self.ends[i];
            let candidates: Vec<usize> = self
                .ends
                .iter()
                .enumerate()
                .filter(|&(_, &(a, b))| {
                    (a == u || b == u || a == v || b == v) && !self.used[a] && !self.used[b]
                })
                .map(|(j, _)| j)
                .collect();
            for j in candidates {
                let (a, b) = self.ends[j];
                self.used[a] = true;
                self.used[b] = true;
                self.size += 1;
                self.go();
                self.size -= 1;
                self.used[a] = false;
                self.used[b] = false;
            }
        }
    }
    let mut solver = Mmm { ends, used: vec![false; n], size: 0, best: ends.len().max(1) };
    if ends.is_empty() {
        return 0;
    }
    solver.go();
    solver.best as u64
}

// ---------------------------------------------------------------------------
// Validity checkers
// ---------------------------------------------------------------------------

/// Nothing wrong, or a witness for the first violated condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NodeOverloaded { node: NodeId, load: u64, bound: u64 },
    NotMaximal { addable: EdgeId },
    Undominated { edge: EdgeId },
    UnknownEdge { edge: EdgeId },
    BadExponent { edge: EdgeId, exponent: u8, level: u32 },
}

fn node_loads(g: &Graph, edges: &[EdgeId]) -> Result<Vec<u64>, Violation> {
    let mut load = vec![0u64; g.n()];
    for &id in edges {
        let idx = g.try_edge_index(id).ok_or(Violation::UnknownEdge { edge: id })?;
        let e = g.edge_at(idx);
        load[g.node_index(e.u)] += 1;
        load[g.node_index(e.v)] += 1;
    }
    Ok(load)
}

/// Checks that `edges` is a matching of `g`.
pub fn is_matching(g: &Graph, edges: &[EdgeId]) -> Result<(), Violation> {
    let load = node_loads(g, edges)?;
    for (i, &l) in load.iter().enumerate() {
        if l > 1 {
            return Err(Violation::NodeOverloaded { node: g.node_at(i), load: l, bound: 1 });
        }
    }
    Ok(())
}

/// Checks that `edges` is a b-matching of `g` under `b` (indexed like nodes).
pub fn is_b_matching(g: &Graph, edges: &[EdgeId], b: &[u64]) -> Result<(), Violation> {
    let load = node_loads(g, edges)?;
    for (i, &l) in load.iter().enumerate() {
        if l > b[i] {
            return Err(Violation::NodeOverloaded { node: g.node_at(i), load: l, bound: b[i] });
        }
    }
    Ok(())
}

/// Checks that `edges` is a maximal matching of `g`.
pub fn is_maximal(g: &Graph, edges: &[EdgeId]) -> Result<(), Violation> {
    is_matching(g, edges)?;
    let load = node_loads(g, edges)?;
    for e in g.edges() {
        if load[g.node_index(e.u)] == 0 && load[g.node_index(e.v)] == 0 {
            return Err(Violation::NotMaximal { addable: e.id });
        }
    }
    Ok(())
}

/// Checks that every edge of `g` shares an endpoint with `edges`.
pub fn dominates(g: &Graph, edges: &[EdgeId]) -> Result<(), Violation> {
    let load = node_loads(g, edges)?;
    for e in g.edges() {
        if load[g.node_index(e.u)] == 0 && load[g.node_index(e.v)] == 0 {
            return Err(Violation::Undominated { edge: e.id });
        }
    }
    Ok(())
}

/// Exact fraction of edges untouched by the matching: `(uncovered, |E|)`.
pub fn uncovered_edge_fraction(g: &Graph, matching: &[EdgeId]) -> (u64, u64) {
    let load = node_loads(g, matching).expect("matching edges must exist in g");
    let uncovered = g
        .edges()
        .iter()
        .filter(|e| load[g.node_index(e.u)] == 0 && load[g.node_index(e.v)] == 0)
        .count() as u64;
    (uncovered, g.m() as u64)
}

/// Checks feasibility and fractionality of dyadic edge values.
///
/// `values[i]` is the exponent `j` of edge `i` (`x = 2^-j`), `None` for zero.
/// Node loads are compared exactly in units of `2^-level`: the load must stay
/// at most 1 (or `b_v` when `b` is given).
pub fn is_feasible_fractional(
    g: &Graph,
    values: &[Option<u8>],
    level: u32,
    b: Option<&[u64]>,
) -> Result<(), Violation> {
    assert_eq!(values.len(), g.m());
    let scale: u128 = 1u128 << level;
    let mut load = vec![0u128; g.n()];
    for (i, v) in values.iter().enumerate() {
        if let Some(j) = v {
            if u32::from(*j) > level {
                return Err(Violation::BadExponent {
                    edge: g.edge_at(i).id,
                    exponent: *j,
                    level,
                });
            }
            let x = 1u128 << (level - u32::from(*j));
            let e = g.edge_at(i);
            load[g.node_index(e.u)] += x;
            load[g.node_index(e.v)] += x;
        }
    }
    for (i, &l) in load.iter().enumerate() {
        let bound = scale * u128::from(b.map_or(1, |bs| bs[i]));
        if l > bound {
            return Err(Violation::NodeOverloaded {
                node: g.node_at(i),
                load: (l / scale.max(1)) as u64,
                bound: b.map_or(1, |bs| bs[i]),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    fn cycle(n: u64) -> Graph {
        Graph::from_pairs(&(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
    }

    fn complete_bipartite(a: u64, b: u64) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..a {
            for j in 0..b {
                pairs.push((i, a + j));
            }
        }
        Graph::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn matching_oracle_small_cases() {
        assert_eq!(max_matching_exact(&cycle(5), &budget()).unwrap().size, 2);
        assert_eq!(
            max_matching_exact(&complete_bipartite(8, 8), &budget()).unwrap().size,
            8
        );
        let empty = Graph::from_pairs(&[]).unwrap();
        assert_eq!(max_matching_exact(&empty, &budget()).unwrap().size, 0);
    }

    #[test]
    fn matching_oracle_handles_odd_structures() {
        // Two triangles joined by a bridge: maximum matching is 3.
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
            .unwrap();
        assert_eq!(max_matching_exact(&g, &budget()).unwrap().size, 3);
        // Petersen graph: perfect matching of size 5.
        let petersen = Graph::from_pairs(&[
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
        ])
        .unwrap();
        assert_eq!(max_matching_exact(&petersen, &budget()).unwrap().size, 5);
    }

    #[test]
    fn matching_witness_is_valid() {
        let g = cycle(9);
        let sol = max_matching_exact(&g, &budget()).unwrap();
        assert_eq!(sol.size, 4);
        assert!(is_matching(&g, &sol.witness).is_ok());
        assert_eq!(sol.witness.len() as u64, sol.size);
    }

    #[test]
    fn weighted_oracle_cases() {
        let g = Graph::from_pairs(&[(0, 1), (1, 2)])
            .unwrap()
            .with_weights(vec![1, 3])
            .unwrap();
        let sol = max_weighted_matching_exact(&g, &budget()).unwrap();
        assert_eq!(sol.weight, 3);

        // Middle edge heavy: path 1-3-1 takes the middle alone.
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (2, 3)])
            .unwrap()
            .with_weights(vec![1, 3, 1])
            .unwrap();
        assert_eq!(max_weighted_matching_exact(&g, &budget()).unwrap().weight, 3);

        let g = Graph::from_pairs(&[(0, 1)])
            .unwrap()
            .with_weights(vec![7])
            .unwrap();
        assert_eq!(max_weighted_matching_exact(&g, &budget()).unwrap().weight, 7);

        let g = Graph::from_pairs(&[(0, 1), (2, 3)])
            .unwrap()
            .with_weights(vec![2, 5])
            .unwrap();
        assert_eq!(max_weighted_matching_exact(&g, &budget()).unwrap().weight, 7);
    }

    #[test]
    fn b_matching_oracle_cases() {
        let g = cycle(4).with_b_values(vec![2, 2, 2, 2]).unwrap();
        assert_eq!(max_b_matching_exact(&g, &budget()).unwrap().size, 4);

        let star = Graph::from_pairs(&(1..=6).map(|i| (0, i)).collect::<Vec<_>>())
            .unwrap()
            .with_b_values(vec![3, 1, 1, 1, 1, 1, 1])
            .unwrap();
        assert_eq!(max_b_matching_exact(&star, &budget()).unwrap().size, 3);

        // b == 1 coincides with plain matching.
        let g = cycle(7).with_b_values(vec![1; 7]).unwrap();
        let bsol = max_b_matching_exact(&g, &budget()).unwrap();
        let msol = max_matching_exact(&g, &budget()).unwrap();
        assert_eq!(bsol.size, msol.size);
    }

    #[test]
    fn eds_oracle_cases() {
        // P_4 (3 edges): middle edge dominates everything.
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(min_eds_exact(&g, &budget()).unwrap().size, 1);

        let star = Graph::from_pairs(&(1..=5).map(|i| (0, i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(min_eds_exact(&star, &budget()).unwrap().size, 1);

        let two = Graph::from_pairs(&[(0, 1), (2, 3)]).unwrap();
        assert_eq!(min_eds_exact(&two, &budget()).unwrap().size, 2);

        let sol = min_eds_exact(&cycle(9), &budget()).unwrap();
        assert_eq!(sol.size, 3);
        assert!(dominates(&cycle(9), &sol.witness).is_ok());
    }

    #[test]
    fn checkers_produce_witnesses() {
        let g = cycle(5);
        let err = is_maximal(&g, &[EdgeId(0)]).unwrap_err();
        assert!(matches!(err, Violation::NotMaximal { .. }));

        let (unc, total) = uncovered_edge_fraction(&g, &[]);
        assert_eq!((unc, total), (5, 5));

        // c_v > 1 is rejected with the violating node.
        let g = Graph::from_pairs(&[(0, 1), (1, 2)]).unwrap();
        let err = is_feasible_fractional(&g, &[Some(0), Some(0)], 0, None).unwrap_err();
        assert_eq!(
            err,
            Violation::NodeOverloaded { node: NodeId(1), load: 2, bound: 1 }
        );
        assert!(is_feasible_fractional(&g, &[Some(1), Some(1)], 1, None).is_ok());
    }

    #[test]
    fn budgets_are_enforced() {
        let tight = OracleBudget { blossom_nodes: 2, ..OracleBudget::default() };
        assert!(matches!(
            max_matching_exact(&cycle(5), &tight),
            Err(OracleError::OverBudget(_))
        ));
    }
}
