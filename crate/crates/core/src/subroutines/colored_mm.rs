//! Maximal matching on a colored bounded-degree graph.
//!
//! The provided palette is first shrunk with the same set-system reduction
//! used by [`super::coloring`], on the call-site graph, which takes
//! `O(log* palette)` rounds and lands at `O(delta^2)` colors. Color classes
//! are then processed in fixed round windows: free nodes of the active class
//! repeatedly propose along their smallest free incident edge, proposees
//! accept their smallest proposer, and matched nodes announce to their
//! neighborhood. A window of `delta + 1` propose/answer exchanges suffices
//! because every failed proposal witnesses a neighbor that just became
//! matched.

use super::coloring::{recolor, reduction_plan, Coloring, PaletteStep};
use super::SubroutineError;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::sim::{
    self, Message, NodeProgram, NodeView, Outbox, RoundTrace, Schedule, StepStatus,
};

#[derive(Clone, Debug)]
pub enum MmMsg {
    Color(u64),
    Propose,
    Accept,
    Matched,
}

impl Message for MmMsg {
    fn bits(&self) -> u32 {
        match self {
            MmMsg::Color(c) => 3 + sim::value_bits(*c),
            _ => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmState {
    color: u64,
    /// Matched edge, if any.
    pub matched: Option<EdgeId>,
    announced: bool,
    /// Believed-free flag per incident slot.
    free_peer: Vec<bool>,
    /// Slot of the proposal in flight.
    pending: Option<usize>,
}

pub struct ColoredMmProgram {
    /// Starting color per node index of the run graph.
    colors: Vec<u64>,
    plan: Vec<PaletteStep>,
    palette: u64,
    /// Rounds per color class window.
    window: u64,
}

impl ColoredMmProgram {
    pub fn new(g: &Graph, dense_colors: Vec<u64>, palette: u64) -> ColoredMmProgram {
        let plan = reduction_plan(palette, g.delta() as u64);
        let palette = plan.last().map_or(palette, |s| s.palette_out);
        ColoredMmProgram {
            colors: dense_colors,
            plan,
            palette,
            window: 2 * (g.delta() as u64 + 2),
        }
    }

    /// Steps of the whole schedule; used to size engine budgets.
    pub fn schedule_len(&self) -> u64 {
        self.plan.len() as u64 + self.palette * self.window + 4
    }

    fn classes_base(&self) -> u64 {
        self.plan.len() as u64
    }
}

impl NodeProgram for ColoredMmProgram {
    type State = MmState;
    type Msg = MmMsg;

    fn init(&self, view: &NodeView) -> MmState {
        MmState {
            color: self.colors[view.idx],
            matched: None,
            announced: false,
            free_peer: vec![true; view.degree()],
            pending: None,
        }
    }

    fn step(
        &self,
        round: u64,
        view: &NodeView,
        state: &mut MmState,
        inbox: &[(NodeId, MmMsg)],
        out: &mut Outbox<MmMsg>,
    ) -> StepStatus {
        if view.degree() == 0 {
            return StepStatus::Halt;
        }
        let base = self.classes_base();

        // Palette reduction prelude.
        if round < base || (round == base && !self.plan.is_empty()) {
            if round > 0 {
                let step = &self.plan[(round - 1) as usize];
                let nbr: Vec<u64> = inbox
                    .iter()
                    .filter_map(|(_, m)| match m {
                        MmMsg::Color(c) => Some(*c),
                        _ => None,
                    })
                    .collect();
                state.color = recolor(step, state.color, &nbr);
            }
            if round < base {
                for ie in view.incident {
                    out.send(ie.peer, MmMsg::Color(state.color));
                }
                return StepStatus::Continue;
            }
            // round == base: final recolor done, fall through to the class
            // machinery in this same step.
        }

        // Process responses and announcements first.
        let mut accepted = false;
        let mut proposals: Vec<NodeId> = Vec::new();
        for (from, msg) in inbox {
            match msg {
                MmMsg::Accept => accepted = true,
                MmMsg::Matched => {
                    if let Some(slot) = view.slot_to(*from) {
                        state.free_peer[slot] = false;
                    }
                }
                MmMsg::Propose => proposals.push(*from),
                MmMsg::Color(_) => {}
            }
        }
        if accepted {
            let slot = state.pending.expect("accept without pending proposal");
            state.matched = Some(view.incident[slot].edge);
            state.pending = None;
        } else if let Some(slot) = state.pending {
            // A failed proposal is witnessed by the target's announcement.
            if !state.free_peer[slot] {
                state.pending = None;
            }
        }

        // A free node answers proposals no matter whose window it is.
        if state.matched.is_none() {
            if let Some(&winner) = proposals.iter().min() {
                let slot = view.slot_to(winner).expect("proposal from non-neighbor");
                state.matched = Some(view.incident[slot].edge);
                out.send(winner, MmMsg::Accept);
                for ie in view.incident {
                    if ie.peer != winner {
                        out.send(ie.peer, MmMsg::Matched);
                    }
                }
                state.announced = true;
                return StepStatus::Halt;
            }
        }

        if state.matched.is_some() {
            if !state.announced {
                for ie in view.incident {
                    out.send(ie.peer, MmMsg::Matched);
                }
                state.announced = true;
            }
            return StepStatus::Halt;
        }

        // Propose during our own class window.
        let rel = round - base;
        let class = rel / self.window;
        if class >= self.palette {
            return StepStatus::Halt; // schedule exhausted; nothing matched us
        }
        if class == state.color && rel % 2 == 0 && state.pending.is_none() {
            if let Some(slot) = (0..view.degree()).find(|&s| state.free_peer[s]) {
                out.send(view.incident[slot].peer, MmMsg::Propose);
                state.pending = Some(slot);
                return StepStatus::Continue;
            }
        }
        // Halt when no neighbor can ever talk to us again.
        if state.free_peer.iter().all(|&f| !f) {
            return StepStatus::Halt;
        }
        StepStatus::Continue
    }
}

/// Output of [`colored_maximal_matching`].
pub struct MaximalMatchingRun {
    pub edges: Vec<EdgeId>,
    pub trace: RoundTrace,
}

/// Computes a maximal matching of `g`, given a proper coloring covering its
/// nodes. Deterministic; intended for bounded-degree call sites.
pub fn colored_maximal_matching(
    g: &Graph,
    coloring: &Coloring,
) -> Result<MaximalMatchingRun, SubroutineError> {
    let dense = coloring.dense_for(g)?;
    let as_node_coloring = crate::graph::NodeColoring {
        colors: dense.clone(),
        palette: coloring.palette,
    };
    g.validate_coloring(&as_node_coloring)
        .map_err(SubroutineError::ImproperColoring)?;
    if g.m() == 0 {
        return Ok(MaximalMatchingRun { edges: Vec::new(), trace: RoundTrace::empty() });
    }
    let program = ColoredMmProgram::new(g, dense, coloring.palette);
    let budget = program.schedule_len() + 8;
    let outcome = sim::run(g, &program, budget, Schedule::Ascending)?;
    let mut edges: Vec<EdgeId> = outcome
        .states
        .iter()
        .filter_map(|s| s.matched)
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(MaximalMatchingRun { edges, trace: outcome.trace })
}
