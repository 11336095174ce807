//! Round-synchronous execution engine for node programs.
//!
//! A node program is a pure step function: given the round number, its own
//! state and the inbox of messages delivered this round, it produces a new
//! state, an outbox addressed to current neighbors, and a halt flag. The
//! engine runs all nodes in lockstep — every active node steps, then all
//! messages are delivered — until every node has halted or the step budget
//! is exhausted.
//!
//! Determinism contract: inboxes are sorted by sender id before delivery, so
//! the outcome is independent of the order in which nodes are stepped inside
//! a round. [`Schedule`] exists so tests can exercise that property.
//!
//! Round accounting follows the usual convention that a round is a round of
//! communication: `rounds_used` is one past the last round in which any
//! message was sent. A program that halts immediately without sending uses
//! zero rounds.

use crate::graph::{EdgeId, Graph, NodeId};
use thiserror::Error;

/// Graph-wide constants every node knows at start.
#[derive(Clone, Copy, Debug)]
pub struct GlobalInfo {
    pub n: usize,
    pub m: usize,
    /// Exclusive upper bound on node ids.
    pub node_id_space: u64,
    /// Exclusive upper bound on edge ids.
    pub edge_id_space: u64,
    /// Maximum degree.
    pub delta: usize,
    /// `ceil(log2(delta))`.
    pub log_delta_ceil: u32,
}

impl GlobalInfo {
    pub fn of(g: &Graph) -> GlobalInfo {
        GlobalInfo {
            n: g.n(),
            m: g.m(),
            node_id_space: g.nodes().last().map_or(0, |n| n.0 + 1),
            edge_id_space: g.edges().last().map_or(0, |e| e.id.0 + 1),
            delta: g.delta(),
            log_delta_ceil: g.log_delta_ceil(),
        }
    }
}

/// Number of bits of a variable-length encoding of `x`.
pub fn value_bits(x: u64) -> u32 {
    64 - x.max(1).leading_zeros()
}

/// Messages report their encoded size so the engine can track the maximum
/// message width of a run.
pub trait Message: Clone + std::fmt::Debug {
    fn bits(&self) -> u32;
}

/// One incident edge as seen from a node.
#[derive(Clone, Copy, Debug)]
pub struct IncidentEdge {
    pub edge: EdgeId,
    pub edge_idx: usize,
    pub peer: NodeId,
    pub peer_idx: usize,
}

/// What a node can see locally: itself, its incident edges (ascending by
/// edge id) and the global constants.
pub struct NodeView<'a> {
    pub id: NodeId,
    pub idx: usize,
    pub incident: &'a [IncidentEdge],
    pub env: &'a GlobalInfo,
    pub graph: &'a Graph,
}

impl NodeView<'_> {
    pub fn degree(&self) -> usize {
        self.incident.len()
    }

    /// Slot of the incident edge leading to `peer`, if any.
    pub fn slot_to(&self, peer: NodeId) -> Option<usize> {
        self.incident.iter().position(|ie| ie.peer == peer)
    }

    pub fn slot_of_edge(&self, edge: EdgeId) -> Option<usize> {
        self.incident.iter().position(|ie| ie.edge == edge)
    }
}

/// Outgoing messages of one step.
pub struct Outbox<M> {
    msgs: Vec<(NodeId, M)>,
}

impl<M> Outbox<M> {
    fn new() -> Self {
        Outbox { msgs: Vec::new() }
    }

    pub fn send(&mut self, to: NodeId, msg: M) {
        self.msgs.push((to, msg));
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StepStatus {
    Continue,
    Halt,
}

/// A synchronous node program.
pub trait NodeProgram {
    type State: Clone + PartialEq + std::fmt::Debug;
    type Msg: Message;

    /// Initial state, computed before any communication.
    fn init(&self, view: &NodeView) -> Self::State;

    /// One synchronous step. `inbox` holds the messages sent to this node in
    /// the previous round, sorted by sender id.
    fn step(
        &self,
        round: u64,
        view: &NodeView,
        state: &mut Self::State,
        inbox: &[(NodeId, Self::Msg)],
        out: &mut Outbox<Self::Msg>,
    ) -> StepStatus;
}

/// Annotation of a contiguous round interval inside a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Annotation {
    pub label: String,
    /// Half-open round interval `[start, end)` in the surrounding trace.
    pub rounds: (u64, u64),
    pub metric: Option<f64>,
}

/// Measured cost of one or more composed runs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoundTrace {
    pub rounds_used: u64,
    pub messages_sent: u64,
    pub max_message_bits: u32,
    pub annotations: Vec<Annotation>,
}

impl RoundTrace {
    pub fn empty() -> RoundTrace {
        RoundTrace::default()
    }

    /// Appends a run that happens after everything recorded so far.
    pub fn absorb_sequential(&mut self, label: &str, other: &RoundTrace) {
        let start = self.rounds_used;
        self.rounds_used += other.rounds_used;
        self.messages_sent += other.messages_sent;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.annotations.push(Annotation {
            label: label.to_string(),
            rounds: (start, self.rounds_used),
            metric: None,
        });
        for a in &other.annotations {
            self.annotations.push(Annotation {
                label: format!("{label}/{}", a.label),
                rounds: (start + a.rounds.0, start + a.rounds.1),
                metric: a.metric,
            });
        }
    }

    /// Appends runs that execute simultaneously on edge-disjoint subgraphs:
    /// rounds take the maximum, messages add up.
    pub fn absorb_parallel(&mut self, label: &str, others: &[RoundTrace]) {
        let start = self.rounds_used;
        let rounds = others.iter().map(|t| t.rounds_used).max().unwrap_or(0);
        self.rounds_used += rounds;
        for t in others {
            self.messages_sent += t.messages_sent;
            self.max_message_bits = self.max_message_bits.max(t.max_message_bits);
        }
        self.annotations.push(Annotation {
            label: label.to_string(),
            rounds: (start, self.rounds_used),
            metric: None,
        });
    }

    pub fn annotate_last(&mut self, metric: f64) {
        if let Some(a) = self.annotations.last_mut() {
            a.metric = Some(metric);
        }
    }
}

/// Order in which nodes are stepped within a round. Outputs must not depend
/// on this; it exists to test exactly that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Ascending,
    Descending,
    /// Deterministic shuffle derived from the seed.
    Shuffled(u64),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Ascending
    }
}

fn schedule_order(n: usize, s: Schedule) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    match s {
        Schedule::Ascending => {}
        Schedule::Descending => order.reverse(),
        Schedule::Shuffled(seed) => {
            // splitmix64-driven Fisher-Yates; no external RNG needed.
            let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
            let mut next = move || {
                state = state.wrapping_add(0x9E3779B97F4A7C15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
                z ^ (z >> 31)
            };
            for i in (1..n).rev() {
                let j = (next() % (i as u64 + 1)) as usize;
                order.swap(i, j);
            }
        }
    }
    order
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("round budget of {budget} steps exhausted before global halt")]
    BudgetExceeded { budget: u64, partial: RoundTrace },
    #[error("node {from} addressed non-neighbor {to} in round {round}")]
    NonNeighborMessage { from: NodeId, to: NodeId, round: u64 },
}

/// Result of a completed run.
pub struct RunOutcome<S> {
    /// Final state per node, indexed like `graph.nodes()`.
    pub states: Vec<S>,
    pub trace: RoundTrace,
}

struct EngineCtx<'a> {
    g: &'a Graph,
    env: GlobalInfo,
    incident: Vec<Vec<IncidentEdge>>,
    order: Vec<usize>,
}

impl<'a> EngineCtx<'a> {
    fn new(g: &'a Graph, schedule: Schedule) -> Self {
        let env = GlobalInfo::of(g);
        let incident = (0..g.n())
            .map(|idx| {
                g.incident(idx)
                    .iter()
                    .map(|&(edge_idx, peer_idx)| IncidentEdge {
                        edge: g.edge_at(edge_idx).id,
                        edge_idx,
                        peer: g.node_at(peer_idx),
                        peer_idx,
                    })
                    .collect()
            })
            .collect();
        let order = schedule_order(g.n(), schedule);
        EngineCtx { g, env, incident, order }
    }

    fn view(&self, idx: usize) -> NodeView<'_> {
        NodeView {
            id: self.g.node_at(idx),
            idx,
            incident: &self.incident[idx],
            env: &self.env,
            graph: self.g,
        }
    }
}

/// Runs a program to global halt.
pub fn run<P: NodeProgram>(
    g: &Graph,
    program: &P,
    step_budget: u64,
    schedule: Schedule,
) -> Result<RunOutcome<P::State>, SimError> {
    let ctx = EngineCtx::new(g, schedule);
    let mut states: Vec<P::State> = (0..g.n()).map(|i| program.init(&ctx.view(i))).collect();
    let trace = drive(&ctx, program, &mut states, step_budget, &mut vec![false; g.n()])?;
    Ok(RunOutcome { states, trace })
}

/// Runs a sequence of phases to global halt each, threading node states.
/// The first phase initializes states; later phases continue from the states
/// the previous phase left behind. The trace is annotated per phase, and the
/// phase intervals partition `[0, rounds_used)`.
pub fn run_phased<S, M>(
    g: &Graph,
    phases: &[&dyn NodeProgram<State = S, Msg = M>],
    step_budget: u64,
    schedule: Schedule,
) -> Result<RunOutcome<S>, SimError>
where
    S: Clone + PartialEq + std::fmt::Debug,
    M: Message,
{
    let ctx = EngineCtx::new(g, schedule);
    let mut states: Vec<S> = Vec::new();
    let mut trace = RoundTrace::empty();
    for (pi, phase) in phases.iter().enumerate() {
        if pi == 0 {
            states = (0..g.n()).map(|i| phase.init(&ctx.view(i))).collect();
        }
        let mut halted = vec![false; g.n()];
        let t = drive(&ctx, *phase, &mut states, step_budget, &mut halted).map_err(|e| {
            match e {
                SimError::BudgetExceeded { budget, partial } => {
                    let mut whole = trace.clone();
                    whole.absorb_sequential(&format!("phase-{pi}"), &partial);
                    SimError::BudgetExceeded { budget, partial: whole }
                }
                other => other,
            }
        })?;
        trace.absorb_sequential(&format!("phase-{pi}"), &t);
    }
    if phases.is_empty() {
        states = Vec::new();
    }
    Ok(RunOutcome { states, trace })
}

/// Core loop shared by `run` and `run_phased`.
fn drive<P: NodeProgram + ?Sized>(
    ctx: &EngineCtx,
    program: &P,
    states: &mut [P::State],
    step_budget: u64,
    halted: &mut [bool],
) -> Result<RoundTrace, SimError> {
    let n = states.len();
    let mut inboxes: Vec<Vec<(NodeId, P::Msg)>> = vec![Vec::new(); n];
    let mut next_inboxes: Vec<Vec<(NodeId, P::Msg)>> = vec![Vec::new(); n];
    let mut messages_sent: u64 = 0;
    let mut max_bits: u32 = 0;
    let mut last_send_round: Option<u64> = None;
    let mut active: usize = halted.iter().filter(|&&h| !h).count();
    let mut round: u64 = 0;

    while active > 0 {
        if round >= step_budget {
            return Err(SimError::BudgetExceeded {
                budget: step_budget,
                partial: RoundTrace {
                    rounds_used: last_send_round.map_or(0, |r| r + 1),
                    messages_sent,
                    max_message_bits: max_bits,
                    annotations: Vec::new(),
                },
            });
        }
        let mut sent_this_round = false;
        for &idx in &ctx.order {
            if halted[idx] {
                continue;
            }
            let view = ctx.view(idx);
            let mut out = Outbox::new();
            let status = program.step(round, &view, &mut states[idx], &inboxes[idx], &mut out);
            for (to, msg) in out.msgs {
                let Some(slot) = view.slot_to(to) else {
                    return Err(SimError::NonNeighborMessage { from: view.id, to, round });
                };
                let peer_idx = view.incident[slot].peer_idx;
                max_bits = max_bits.max(msg.bits());
                messages_sent += 1;
                sent_this_round = true;
                next_inboxes[peer_idx].push((view.id, msg));
            }
            if status == StepStatus::Halt {
                halted[idx] = true;
                active -= 1;
            }
        }
        if sent_this_round {
            last_send_round = Some(round);
        }
        for idx in 0..n {
            inboxes[idx].clear();
            if halted[idx] {
                // Halted nodes buffer nothing useful; drop to bound memory.
                next_inboxes[idx].clear();
            } else {
                std::mem::swap(&mut inboxes[idx], &mut next_inboxes[idx]);
                inboxes[idx].sort_by_key(|&(from, _)| from);
            }
        }
        round += 1;
    }

    Ok(RoundTrace {
        rounds_used: last_send_round.map_or(0, |r| r + 1),
        messages_sent,
        max_message_bits: max_bits,
        annotations: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[derive(Clone, Debug, PartialEq)]
    struct Nil;

    #[derive(Clone, Debug)]
    struct IdMsg(u64);

    impl Message for IdMsg {
        fn bits(&self) -> u32 {
            value_bits(self.0)
        }
    }

    /// Halts immediately without sending.
    struct HaltNow;
    impl NodeProgram for HaltNow {
        type State = Nil;
        type Msg = IdMsg;
        fn init(&self, _: &NodeView) -> Nil {
            Nil
        }
        fn step(
            &self,
            _round: u64,
            _view: &NodeView,
            _state: &mut Nil,
            _inbox: &[(NodeId, IdMsg)],
            _out: &mut Outbox<IdMsg>,
        ) -> StepStatus {
            StepStatus::Halt
        }
    }

    /// Sends own id to every neighbor once, then halts.
    struct Announce;
    impl NodeProgram for Announce {
        type State = Nil;
        type Msg = IdMsg;
        fn init(&self, _: &NodeView) -> Nil {
            Nil
        }
        fn step(
            &self,
            _round: u64,
            view: &NodeView,
            _state: &mut Nil,
            _inbox: &[(NodeId, IdMsg)],
            out: &mut Outbox<IdMsg>,
        ) -> StepStatus {
            for ie in view.incident {
                out.send(ie.peer, IdMsg(view.id.0));
            }
            StepStatus::Halt
        }
    }

    /// Collects the ids heard over `rounds` rounds.
    struct Gossip {
        rounds: u64,
    }
    impl NodeProgram for Gossip {
        type State = Vec<u64>;
        type Msg = IdMsg;
        fn init(&self, view: &NodeView) -> Vec<u64> {
            vec![view.id.0]
        }
        fn step(
            &self,
            round: u64,
            view: &NodeView,
            state: &mut Vec<u64>,
            inbox: &[(NodeId, IdMsg)],
            out: &mut Outbox<IdMsg>,
        ) -> StepStatus {
            for (_, m) in inbox {
                if !state.contains(&m.0) {
                    state.push(m.0);
                }
            }
            if round < self.rounds {
                for ie in view.incident {
                    out.send(ie.peer, IdMsg(view.id.0));
                }
                StepStatus::Continue
            } else {
                StepStatus::Halt
            }
        }
    }

    #[test]
    fn immediate_halt_uses_zero_rounds() {
        let g = Graph::from_pairs(&[]).unwrap();
        let out = run(&g, &HaltNow, 10, Schedule::Ascending).unwrap();
        assert_eq!(out.trace.rounds_used, 0);
        assert_eq!(out.trace.messages_sent, 0);

        let g = Graph::new(vec![NodeId(0), NodeId(5)], vec![]).unwrap();
        let out = run(&g, &HaltNow, 10, Schedule::Ascending).unwrap();
        assert_eq!(out.trace.rounds_used, 0);
    }

    #[test]
    fn single_announcement_costs_one_round() {
        let g = Graph::from_pairs(&[(0, 1)]).unwrap();
        let out = run(&g, &Announce, 10, Schedule::Ascending).unwrap();
        assert_eq!(out.trace.rounds_used, 1);
        assert_eq!(out.trace.messages_sent, 2);
    }

    #[test]
    fn runs_are_reproducible_and_schedule_independent() {
        let g = Graph::from_pairs(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let a = run(&g, &Gossip { rounds: 3 }, 100, Schedule::Ascending).unwrap();
        let b = run(&g, &Gossip { rounds: 3 }, 100, Schedule::Ascending).unwrap();
        let c = run(&g, &Gossip { rounds: 3 }, 100, Schedule::Descending).unwrap();
        let d = run(&g, &Gossip { rounds: 3 }, 100, Schedule::Shuffled(42)).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.states, c.states);
        assert_eq!(a.states, d.states);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.trace, c.trace);
        assert_eq!(a.trace, d.trace);
    }

    #[test]
    fn budget_exhaustion_reports_partial_trace() {
        let g = Graph::from_pairs(&[(0, 1)]).unwrap();
        let err = run(&g, &Gossip { rounds: 100 }, 5, Schedule::Ascending).unwrap_err();
        match err {
            SimError::BudgetExceeded { budget, partial } => {
                assert_eq!(budget, 5);
                assert!(partial.messages_sent > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_neighbor_send_is_an_engine_error() {
        struct Bad;
        impl NodeProgram for Bad {
            type State = Nil;
            type Msg = IdMsg;
            fn init(&self, _: &NodeView) -> Nil {
                Nil
            }
            fn step(
                &self,
                _round: u64,
                view: &NodeView,
                _state: &mut Nil,
                _inbox: &[(NodeId, IdMsg)],
                out: &mut Outbox<IdMsg>,
            ) -> StepStatus {
                if view.id == NodeId(0) {
                    out.send(NodeId(2), IdMsg(0));
                }
                StepStatus::Halt
            }
        }
        let g = Graph::from_pairs(&[(0, 1), (1, 2)]).unwrap();
        let err = run(&g, &Bad, 10, Schedule::Ascending).unwrap_err();
        assert!(matches!(err, SimError::NonNeighborMessage { .. }));
    }

    #[test]
    fn phased_runs_thread_states_and_partition_rounds() {
        let g = Graph::from_pairs(&[(0, 1), (1, 2)]).unwrap();
        let p1 = Gossip { rounds: 1 };
        let p2 = Gossip { rounds: 1 };
        let phases: Vec<&dyn NodeProgram<State = Vec<u64>, Msg = IdMsg>> = vec![&p1, &p2];
        let out = run_phased(&g, &phases, 100, Schedule::Ascending).unwrap();
        assert_eq!(out.trace.rounds_used, 2);
        // Node 0 heard node 2 through the threaded state of phase 2? No:
        // gossip re-sends only its own id, so node 0 knows {0, 1}.
        let idx0 = g.node_index(NodeId(0));
        assert_eq!(out.states[idx0], vec![0, 1]);
        let spans: Vec<(u64, u64)> = out
            .trace
            .annotations
            .iter()
            .filter(|a| !a.label.contains('/'))
            .map(|a| a.rounds)
            .collect();
        assert_eq!(spans, vec![(0, 1), (1, 2)]);

        let empty: Vec<&dyn NodeProgram<State = Vec<u64>, Msg = IdMsg>> = vec![];
        let out = run_phased(&g, &empty, 100, Schedule::Ascending).unwrap();
        assert_eq!(out.trace.rounds_used, 0);
    }
}
