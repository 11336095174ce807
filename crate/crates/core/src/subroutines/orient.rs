//! Orientation of paths and cycles so that every maximal directed run is
//! long.
//!
//! Starting from an arbitrary deterministic orientation, iteration `j`
//! merges directed runs of length `< 2^j`: a run's length (capped at `2^j`)
//! and identity are piped to the junction where two runs collide, the
//! junction reverses the smaller run, and the two runs concatenate. Head-on
//! collisions are resolved first, then back-to-back collisions; after
//! iteration `j` every maximal run has length at least `min(2^j, component
//! length)`. Ties are broken toward the run with the smaller minimal node
//! id, then the smaller minimal edge id (run edge sets are disjoint, so this
//! is always decisive).
//!
//! All messages carry a hop counter and two identifiers, so message size
//! stays logarithmic.

use crate::graph::{ceil_log2, ComponentKind, EdgeId, Graph, NodeId, PathCycleComponent};
use crate::sim::{
    self, Message, NodeProgram, NodeView, Outbox, RoundTrace, Schedule, StepStatus,
};
use std::collections::BTreeMap;
use thiserror::Error;

/// Edge directions as ordered endpoint pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub direction: BTreeMap<EdgeId, (NodeId, NodeId)>,
}

#[derive(Debug, Error)]
pub enum OrientError {
    #[error("component of length {0} is not longer than ell = {1}")]
    TooShort(usize, u64),
    #[error("initial orientation is incomplete or inconsistent")]
    BadInitial,
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct IterWindow {
    pub cap: u32,
    pub start: u64,
    pub b_start: u64,
    pub end: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct OrientSchedule {
    pub windows: Vec<IterWindow>,
    pub total: u64,
}

pub(crate) fn orient_schedule(ell: u64) -> OrientSchedule {
    let mut windows = Vec::new();
    let mut t = 0u64;
    let iters = ceil_log2(ell.max(2));
    for j in 1..=iters {
        let cap = 1u64 << j;
        let sub = 2 * cap + 2;
        windows.push(IterWindow {
            cap: cap as u32,
            start: t,
            b_start: t + sub,
            end: t + 2 * sub,
        });
        t += 2 * sub;
    }
    OrientSchedule { windows, total: t }
}

#[derive(Clone, Debug)]
pub(crate) enum OrientMsg {
    /// Run prefix measured from its tail, flowing with the direction.
    Fwd { len: u32, min_node: u64, min_edge: u64 },
    /// Run suffix measured from its head, flowing against the direction.
    Bwd { len: u32, min_node: u64, min_edge: u64 },
    /// Reverse the run this message travels along.
    Rev,
}

impl OrientMsg {
    pub(crate) fn bits(&self) -> u32 {
        match self {
            OrientMsg::Fwd { len, min_node, min_edge }
            | OrientMsg::Bwd { len, min_node, min_edge } => {
                3 + sim::value_bits(u64::from(*len))
                    + sim::value_bits(*min_node)
                    + sim::value_bits(*min_edge)
            }
            OrientMsg::Rev => 3,
        }
    }
}

/// Per-node static facts the core needs.
#[derive(Clone, Copy, Debug)]
pub(crate) struct OrientNodeInfo {
    pub my_id: u64,
    pub degree: usize,
    pub edge_ids: [u64; 2],
    pub peer_ids: [u64; 2],
}

/// Per-node orientation state machine, embeddable in larger programs.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct OrientCore {
    /// Direction per slot: `true` when the edge points away from this node.
    pub out: [bool; 2],
    token: [Option<(u32, u64, u64)>; 2],
}

impl OrientCore {
    /// Low-id to high-id initial orientation.
    pub fn new(info: &OrientNodeInfo) -> OrientCore {
        let mut out = [false; 2];
        for s in 0..info.degree {
            out[s] = info.my_id < info.peer_ids[s];
        }
        OrientCore { out, token: [None, None] }
    }

    pub fn with_directions(out: [bool; 2]) -> OrientCore {
        OrientCore { out, token: [None, None] }
    }

    fn is_in(&self, s: usize) -> bool {
        !self.out[s]
    }

    /// Advances one round of the orientation stage. `rel` is the round
    /// offset within the stage; messages in `inbox` are tagged with their
    /// arrival slot. Returns `false` once the stage is over.
    pub fn step<F: FnMut(usize, OrientMsg)>(
        &mut self,
        rel: u64,
        sched: &OrientSchedule,
        info: &OrientNodeInfo,
        inbox: &[(usize, OrientMsg)],
        mut send: F,
    ) -> bool {
        if rel >= sched.total {
            return false;
        }
        let w = sched
            .windows
            .iter()
            .find(|w| rel >= w.start && rel < w.end)
            .expect("round inside some window");
        let (sub_rel, forward_mode) = if rel < w.b_start {
            (rel - w.start, true) // A: head-on collisions, tokens flow forward
        } else {
            (rel - w.b_start, false) // B: back-to-back collisions
        };
        let cap = u64::from(w.cap);
        let d = info.degree;

        if sub_rel == 0 {
            self.token = [None, None];
            if forward_mode {
                // Tails (no incoming edge) emit along each outgoing edge.
                let has_in = (0..d).any(|s| self.is_in(s));
                if !has_in {
                    for s in 0..d {
                        send(
                            s,
                            OrientMsg::Fwd {
                                len: 1,
                                min_node: info.my_id,
                                min_edge: info.edge_ids[s],
                            },
                        );
                    }
                }
            } else {
                // Heads (no outgoing edge) emit along each incoming edge.
                let has_out = (0..d).any(|s| self.out[s]);
                if !has_out {
                    for s in 0..d {
                        send(
                            s,
                            OrientMsg::Bwd {
                                len: 1,
                                min_node: info.my_id,
                                min_edge: info.edge_ids[s],
                            },
                        );
                    }
                }
            }
            return true;
        }

        // Measurement tokens and reversal commands, processed against the
        // direction state at the start of the round.
        let snapshot = self.out;
        let mut flips = [false; 2];
        for &(slot, ref msg) in inbox {
            match msg {
                OrientMsg::Fwd { len, min_node, min_edge } if forward_mode => {
                    self.token[slot] = Some((*len, *min_node, *min_edge));
                    if d == 2 {
                        let other = 1 - slot;
                        if snapshot[other] && u64::from(*len) < cap {
                            send(
                                other,
                                OrientMsg::Fwd {
                                    len: len + 1,
                                    min_node: (*min_node).min(info.my_id),
                                    min_edge: (*min_edge).min(info.edge_ids[other]),
                                },
                            );
                        }
                    }
                }
                OrientMsg::Bwd { len, min_node, min_edge } if !forward_mode => {
                    self.token[slot] = Some((*len, *min_node, *min_edge));
                    if d == 2 {
                        let other = 1 - slot;
                        if !snapshot[other] && u64::from(*len) < cap {
                            send(
                                other,
                                OrientMsg::Bwd {
                                    len: len + 1,
                                    min_node: (*min_node).min(info.my_id),
                                    min_edge: (*min_edge).min(info.edge_ids[other]),
                                },
                            );
                        }
                    }
                }
                OrientMsg::Rev => {
                    flips[slot] = true;
                    if d == 2 {
                        let other = 1 - slot;
                        // Forward along the run: upstream in A, downstream in B.
                        let continues = if forward_mode {
                            !snapshot[other]
                        } else {
                            snapshot[other]
                        };
                        if continues {
                            flips[other] = true;
                            send(other, OrientMsg::Rev);
                        }
                    }
                }
                _ => {}
            }
        }
        for s in 0..2 {
            if flips[s] {
                self.out[s] = !self.out[s];
            }
        }

        // Junction decision once all uncapped tokens have arrived.
        if sub_rel == cap && d == 2 {
            let junction = if forward_mode {
                self.is_in(0) && self.is_in(1)
            } else {
                self.out[0] && self.out[1]
            };
            if junction {
                let info0 = self.token[0].map_or((w.cap, u64::MAX, u64::MAX), |t| t);
                let info1 = self.token[1].map_or((w.cap, u64::MAX, u64::MAX), |t| t);
                let shorter = u64::from(info0.0.min(info1.0));
                if shorter < cap {
                    let loser = if info0 < info1 { 0 } else { 1 };
                    self.out[loser] = !self.out[loser];
                    send(loser, OrientMsg::Rev);
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Standalone run orientation on a single component
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub(crate) struct WrappedOrientMsg(pub OrientMsg);

impl Message for WrappedOrientMsg {
    fn bits(&self) -> u32 {
        self.0.bits()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct OrientOnlyState {
    core: OrientCore,
}

struct OrientOnlyProgram {
    sched: OrientSchedule,
    /// Initial directions per node index and slot, when overriding the
    /// default low-to-high rule.
    initial: Option<Vec<[bool; 2]>>,
}

fn node_info(view: &NodeView) -> OrientNodeInfo {
    let mut edge_ids = [0u64; 2];
    let mut peer_ids = [0u64; 2];
    for (s, ie) in view.incident.iter().enumerate().take(2) {
        edge_ids[s] = ie.edge.0;
        peer_ids[s] = ie.peer.0;
    }
    OrientNodeInfo {
        my_id: view.id.0,
        degree: view.degree().min(2),
        edge_ids,
        peer_ids,
    }
}

impl NodeProgram for OrientOnlyProgram {
    type State = OrientOnlyState;
    type Msg = WrappedOrientMsg;

    fn init(&self, view: &NodeView) -> OrientOnlyState {
        let info = node_info(view);
        let core = match &self.initial {
            Some(dirs) => OrientCore::with_directions(dirs[view.idx]),
            None => OrientCore::new(&info),
        };
        OrientOnlyState { core }
    }

    fn step(
        &self,
        round: u64,
        view: &NodeView,
        state: &mut OrientOnlyState,
        inbox: &[(NodeId, WrappedOrientMsg)],
        out: &mut Outbox<WrappedOrientMsg>,
    ) -> StepStatus {
        let info = node_info(view);
        let slotted: Vec<(usize, OrientMsg)> = inbox
            .iter()
            .map(|(from, m)| (view.slot_to(*from).expect("message from neighbor"), m.0.clone()))
            .collect();
        let alive = state.core.step(round, &self.sched, &info, &slotted, |slot, msg| {
            out.send(view.incident[slot].peer, WrappedOrientMsg(msg));
        });
        if alive {
            StepStatus::Continue
        } else {
            StepStatus::Halt
        }
    }
}

/// Orients a path or cycle so every maximal directed run has length at least
/// `min(ell, component length)`, starting from the low-to-high orientation.
pub fn orient_min_length(
    comp: &PathCycleComponent,
    ell: u64,
) -> Result<(Orientation, RoundTrace), OrientError> {
    orient_min_length_from(comp, ell, None)
}

/// As [`orient_min_length`], but starting from the given orientation.
pub fn orient_min_length_from(
    comp: &PathCycleComponent,
    ell: u64,
    initial: Option<&Orientation>,
) -> Result<(Orientation, RoundTrace), OrientError> {
    if comp.len() as u64 <= ell {
        return Err(OrientError::TooShort(comp.len(), ell));
    }
    let g = component_graph(comp);
    let initial_dirs = match initial {
        Some(orient) => Some(initial_slot_directions(&g, orient)?),
        None => None,
    };
    let sched = orient_schedule(ell);
    let budget = sched.total + 4;
    let program = OrientOnlyProgram { sched, initial: initial_dirs };
    let outcome = sim::run(&g, &program, budget, Schedule::Ascending)?;
    let mut direction = BTreeMap::new();
    for idx in 0..g.n() {
        let me = g.node_at(idx);
        for (s, &(edge_idx, peer_idx)) in g.incident(idx).iter().enumerate() {
            let e = g.edge_at(edge_idx);
            if outcome.states[idx].core.out[s] {
                direction.insert(e.id, (me, g.node_at(peer_idx)));
            } else {
                debug_assert!(
                    outcome.states[peer_idx].core.out
                        [g.incident(peer_idx).iter().position(|&(ei, _)| ei == edge_idx).unwrap()],
                    "edge direction inconsistent between endpoints"
                );
            }
        }
    }
    Ok((Orientation { direction }, outcome.trace))
}

fn component_graph(comp: &PathCycleComponent) -> Graph {
    let mut nodes: Vec<NodeId> = comp.nodes.clone();
    nodes.sort_unstable();
    nodes.dedup();
    let edges = comp
        .edges
        .iter()
        .enumerate()
        .map(|(k, &id)| crate::graph::Edge {
            id,
            u: comp.nodes[k],
            v: comp.nodes[k + 1],
        })
        .collect();
    Graph::new(nodes, edges).expect("component is a simple path or cycle")
}

fn initial_slot_directions(g: &Graph, orient: &Orientation) -> Result<Vec<[bool; 2]>, OrientError> {
    let mut dirs = vec![[false; 2]; g.n()];
    for idx in 0..g.n() {
        for (s, &(edge_idx, _)) in g.incident(idx).iter().enumerate() {
            let e = g.edge_at(edge_idx);
            let &(from, to) = orient.direction.get(&e.id).ok_or(OrientError::BadInitial)?;
            if !((from, to) == (e.u, e.v) || (from, to) == (e.v, e.u)) {
                return Err(OrientError::BadInitial);
            }
            dirs[idx][s] = from == g.node_at(idx);
        }
    }
    Ok(dirs)
}

/// Maximal directed run lengths of an orientation along a component, in
/// walk order. Used by tests and by the phase diagnostics.
pub fn run_lengths(comp: &PathCycleComponent, orient: &Orientation) -> Vec<u64> {
    let mut signs = Vec::with_capacity(comp.len());
    for (k, &eid) in comp.edges.iter().enumerate() {
        let (from, _) = orient.direction[&eid];
        signs.push(from == comp.nodes[k]);
    }
    if signs.is_empty() {
        return Vec::new();
    }
    let mut runs = Vec::new();
    let mut cur = 1u64;
    for i in 1..signs.len() {
        if signs[i] == signs[i - 1] {
            cur += 1;
        } else {
            runs.push(cur);
            cur = 1;
        }
    }
    runs.push(cur);
    if comp.kind == ComponentKind::Cycle && runs.len() > 1 && signs[0] == signs[comp.len() - 1] {
        // The walk split one run across the seam; stitch it back together.
        let last = runs.pop().unwrap();
        runs[0] += last;
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{components, Graph};

    fn path_comp(ids: &[u64]) -> PathCycleComponent {
        let pairs: Vec<(u64, u64)> = ids.windows(2).map(|w| (w[0], w[1])).collect();
        let g = Graph::from_pairs(&pairs).unwrap();
        components(&g).unwrap().into_iter().next().unwrap()
    }

    fn cycle_comp(n: u64) -> PathCycleComponent {
        let pairs: Vec<(u64, u64)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_pairs(&pairs).unwrap();
        components(&g).unwrap().into_iter().next().unwrap()
    }

    #[test]
    fn rejects_short_components() {
        let comp = path_comp(&[0, 1, 2, 3]);
        assert!(matches!(
            orient_min_length(&comp, 3),
            Err(OrientError::TooShort(3, 3))
        ));
    }

    #[test]
    fn alternating_path_merges_into_long_runs() {
        // Ids chosen so the low-to-high rule alternates along the path.
        let ell = 4u64;
        let ids: Vec<u64> = vec![0, 9, 1, 8, 2, 7]; // length 5 = ell + 1
        let comp = path_comp(&ids);
        let (orient, trace) = orient_min_length(&comp, ell).unwrap();
        let runs = run_lengths(&comp, &orient);
        assert_eq!(runs.iter().sum::<u64>(), comp.len() as u64);
        for r in &runs {
            assert!(
                *r >= ell.min(comp.len() as u64),
                "short run {r} in {runs:?}"
            );
        }
        assert!(trace.rounds_used > 0);
    }

    #[test]
    fn uniform_cycle_is_unchanged() {
        let comp = cycle_comp(12);
        // Uniform initial orientation along the walk.
        let mut direction = BTreeMap::new();
        for (k, &eid) in comp.edges.iter().enumerate() {
            direction.insert(eid, (comp.nodes[k], comp.nodes[k + 1]));
        }
        let initial = Orientation { direction: direction.clone() };
        let (orient, trace) = orient_min_length_from(&comp, 8, Some(&initial)).unwrap();
        assert_eq!(orient.direction, direction);
        assert_eq!(trace.rounds_used, 0);
        assert_eq!(run_lengths(&comp, &orient), vec![12]);
    }

    #[test]
    fn long_cycle_runs_reach_ell() {
        let ell = 6u64;
        let comp = cycle_comp(4 * ell);
        let (orient, _) = orient_min_length(&comp, ell).unwrap();
        let runs = run_lengths(&comp, &orient);
        assert_eq!(runs.iter().sum::<u64>(), comp.len() as u64);
        for r in &runs {
            assert!(*r >= ell, "short run {r} in {runs:?}");
        }
    }

    #[test]
    fn assorted_components_meet_the_bound() {
        for (len, ell) in [(9u64, 8u64), (17, 8), (33, 8), (12, 11), (40, 12)] {
            // Scrambled ids give a pseudo-random initial orientation.
            let ids: Vec<u64> = (0..=len).map(|i| (i * 37) % 1009).collect();
            let comp = path_comp(&ids);
            assert_eq!(comp.len() as u64, len);
            let (orient, _) = orient_min_length(&comp, ell).unwrap();
            for r in run_lengths(&comp, &orient) {
                assert!(r >= ell.min(len), "len {len} ell {ell}: short run {r}");
            }
            let comp = cycle_comp(len + 1);
            let (orient, _) = orient_min_length(&comp, ell).unwrap();
            for r in run_lengths(&comp, &orient) {
                assert!(r >= ell.min(len + 1), "cycle: short run {r}");
            }
        }
    }

    #[test]
    fn orientation_preserves_edge_set() {
        let comp = cycle_comp(30);
        let (orient, _) = orient_min_length(&comp, 8).unwrap();
        let mut keys: Vec<EdgeId> = orient.direction.keys().copied().collect();
        keys.sort_unstable();
        let mut expect = comp.edges.clone();
        expect.sort_unstable();
        assert_eq!(keys, expect);
    }
}
