//! Greedy dyadic fractional matchings and b-matchings.
//!
//! Edge values are powers of two, stored as exponents: `values[i] = Some(j)`
//! means `x = 2^-j`, `None` means zero. All feasibility arithmetic is exact,
//! in integer units of `2^-level`.
//!
//! The greedy phase starts every edge at `2^-ceil(log2(delta))` and doubles
//! all loose edges in parallel each round, where a node is loose while its
//! incident value sum is at most 1/2 (strictly below `b_v/2` in b-matching
//! mode) and an edge is loose while both endpoints are. Every edge carries a
//! tight endpoint after `O(log delta)` rounds.

use crate::graph::{EdgeId, Graph, NodeId};
use crate::oracles::{self, Violation};
use crate::sim::{
    self, Message, NodeProgram, NodeView, Outbox, RoundTrace, Schedule, StepStatus,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FractionalError {
    #[error("graph carries no b-values")]
    MissingBValues,
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

/// Dyadic edge values over a host graph's edge indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalAssignment {
    /// Exponent per edge index; `None` is zero.
    pub values: Vec<Option<u8>>,
    /// All nonzero exponents are at most this.
    pub level: u32,
}

impl FractionalAssignment {
    pub fn zero(m: usize, level: u32) -> FractionalAssignment {
        FractionalAssignment { values: vec![None; m], level }
    }

    pub fn scale(&self) -> u128 {
        1u128 << self.level
    }

    /// Total value in units of `2^-level`.
    pub fn sum_scaled(&self) -> u128 {
        self.values
            .iter()
            .flatten()
            .map(|&j| 1u128 << (self.level - u32::from(j)))
            .sum()
    }

    /// Edge ids with nonzero value.
    pub fn support(&self, g: &Graph) -> Vec<EdgeId> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|_| g.edge_at(i).id))
            .collect()
    }

    /// Edge ids carrying exactly `2^-exponent`.
    pub fn edges_at_exponent(&self, g: &Graph, exponent: u8) -> Vec<EdgeId> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| (*v == Some(exponent)).then(|| g.edge_at(i).id))
            .collect()
    }

    pub fn check_feasible(&self, g: &Graph, b: Option<&[u64]>) -> Result<(), Violation> {
        oracles::is_feasible_fractional(g, &self.values, self.level, b)
    }

    /// Per-node value sums in units of `2^-level`.
    pub fn node_loads(&self, g: &Graph) -> Vec<u128> {
        let mut load = vec![0u128; g.n()];
        for (i, v) in self.values.iter().enumerate() {
            if let Some(j) = v {
                let x = 1u128 << (self.level - u32::from(*j));
                let e = g.edge_at(i);
                load[g.node_index(e.u)] += x;
                load[g.node_index(e.v)] += x;
            }
        }
        load
    }
}

/// Loose/tight classification of nodes under an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tightness {
    /// Indexed like the host graph's nodes.
    pub loose: Vec<bool>,
}

impl Tightness {
    /// Matching rule: loose iff `c_v <= 1/2`. B-matching rule (when `b` is
    /// given): loose iff `c_v < b_v / 2`.
    pub fn of(g: &Graph, x: &FractionalAssignment, b: Option<&[u64]>) -> Tightness {
        let loads = x.node_loads(g);
        let scale = x.scale();
        let loose = loads
            .iter()
            .enumerate()
            .map(|(i, &c)| match b {
                None => 2 * c <= scale,
                Some(bs) => 2 * c < u128::from(bs[i]) * scale,
            })
            .collect();
        Tightness { loose }
    }
}

#[derive(Clone, Debug)]
pub struct LooseFlag(pub bool);

impl Message for LooseFlag {
    fn bits(&self) -> u32 {
        4
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyState {
    /// Exponent per incident slot.
    exps: Vec<u8>,
    /// Incident value sum in units of `2^-level`.
    c_scaled: u64,
    self_loose: bool,
    peer_loose: Vec<bool>,
}

struct GreedyProgram {
    level: u32,
    /// Dense b-values; `None` selects the plain matching thresholds.
    b: Option<Vec<u64>>,
}

impl GreedyProgram {
    fn loose(&self, view: &NodeView, c_scaled: u64) -> bool {
        let scale = 1u64 << self.level;
        match &self.b {
            None => 2 * c_scaled <= scale,
            Some(bs) => 2 * c_scaled < bs[view.idx] * scale,
        }
    }

    /// Whether a raise of this edge is permitted by the value cap.
    fn raisable(&self, exp: u8) -> bool {
        match &self.b {
            None => exp >= 1,
            // Only values at most 1/2 keep rising.
            Some(_) => exp >= 1,
        }
    }
}

impl NodeProgram for GreedyProgram {
    type State = GreedyState;
    type Msg = LooseFlag;

    fn init(&self, view: &NodeView) -> GreedyState {
        let d = view.degree();
        let c_scaled = d as u64; // every edge starts at 2^-level
        GreedyState {
            exps: vec![self.level as u8; d],
            c_scaled,
            self_loose: self.loose(view, c_scaled),
            peer_loose: vec![true; d],
        }
    }

    fn step(
        &self,
        round: u64,
        view: &NodeView,
        state: &mut GreedyState,
        inbox: &[(NodeId, LooseFlag)],
        out: &mut Outbox<LooseFlag>,
    ) -> StepStatus {
        if view.degree() == 0 {
            return StepStatus::Halt;
        }
        if round > 0 {
            for (from, flag) in inbox {
                let slot = view.slot_to(*from).expect("flag from neighbor");
                state.peer_loose[slot] = flag.0;
            }
            if state.self_loose {
                for s in 0..view.degree() {
                    if state.peer_loose[s] && self.raisable(state.exps[s]) {
                        // Doubling: the scaled contribution 2^(level-exp)
                        // gains the same amount again.
                        state.c_scaled += 1u64 << (self.level - u32::from(state.exps[s]));
                        state.exps[s] -= 1;
                    }
                }
            }
            state.self_loose = self.loose(view, state.c_scaled);
            let bound = self
                .b
                .as_ref()
                .map_or(1u64 << self.level, |bs| bs[view.idx] << self.level);
            assert!(
                state.c_scaled <= bound,
                "feasibility violated during greedy growth at node {}",
                view.id
            );
        }
        for ie in view.incident {
            out.send(ie.peer, LooseFlag(state.self_loose));
        }
        let any_alive = state.self_loose
            && (0..view.degree())
                .any(|s| state.peer_loose[s] && self.raisable(state.exps[s]));
        if any_alive {
            StepStatus::Continue
        } else {
            StepStatus::Halt
        }
    }
}

/// Result of a greedy run.
pub struct GreedyRun {
    pub assignment: FractionalAssignment,
    pub trace: RoundTrace,
}

fn extract_assignment(
    g: &Graph,
    level: u32,
    states: &[GreedyState],
) -> FractionalAssignment {
    let mut values = vec![None; g.m()];
    for idx in 0..g.n() {
        for (s, &(edge_idx, peer_idx)) in g.incident(idx).iter().enumerate() {
            let exp = states[idx].exps[s];
            if let Some(prev) = values[edge_idx] {
                debug_assert_eq!(prev, exp, "endpoint disagreement on edge value");
                let _ = peer_idx;
            }
            values[edge_idx] = Some(exp);
        }
    }
    FractionalAssignment { values, level }
}

/// Greedy `2^-ceil(log2(delta))`-fractional matching: feasible, all edges
/// tight, and within a factor 4 of the maximum matching in value.
pub fn greedy_fractional_matching(g: &Graph) -> Result<GreedyRun, FractionalError> {
    greedy_run(g, None)
}

/// Greedy fractional b-matching under the graph's b-values.
pub fn greedy_fractional_b_matching(g: &Graph) -> Result<GreedyRun, FractionalError> {
    let b = g.b_values().ok_or(FractionalError::MissingBValues)?.to_vec();
    greedy_run(g, Some(b))
}

fn greedy_run(g: &Graph, b: Option<Vec<u64>>) -> Result<GreedyRun, FractionalError> {
    if g.m() == 0 {
        return Ok(GreedyRun {
            assignment: FractionalAssignment::zero(0, 0),
            trace: RoundTrace::empty(),
        });
    }
    let level = g.log_delta_ceil();
    let program = GreedyProgram { level, b: b.clone() };
    let budget = u64::from(level) + 8;
    let outcome = sim::run(g, &program, budget, Schedule::Ascending)?;
    let assignment = extract_assignment(g, level, &outcome.states);
    debug_assert!(assignment.check_feasible(g, b.as_deref()).is_ok());
    Ok(GreedyRun { assignment, trace: outcome.trace })
}
