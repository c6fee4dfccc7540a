//! Decision procedures: given an instance, answer whether a valid schedule
//! exists whose maximum delay stays within a bound `d`, and produce one
//! when it does. The bound is never read directly; every procedure
//! consults it only through [`DelayProbe`] comparisons, which is what lets
//! the optimizer simulate a run against the unknown optimal delay.

mod crossing;
mod kmerge;
mod ymerge;

pub use crossing::{
    decide_crossing, greedy_phase, lane_gap_prefix, lane_push, GapPrefix, LanePush, LaneSegment,
    PhaseEval,
};
pub use kmerge::decide_kmerge;
pub use ymerge::decide_y;

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{Instance, Schedule, Time, Topology, TopologyKind};

/// Upper bound on dynamic-programming table sizes; beyond it the decision
/// procedure refuses instead of exhausting memory.
pub(crate) const STATE_CAP: u128 = 5_000_000;

/// Raised by a probe that cannot answer (an exhausted replay log, or a
/// failure inside a simulated comparison).
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ProbeFault(pub String);

/// The single question a decision procedure may ask about its delay bound
/// `d`: is the computed comparison value `c` at most `d`?
///
/// Implementations must be monotone: once `at_most(c)` holds it must also
/// hold for every smaller `c`.
pub trait DelayProbe {
    fn at_most(&mut self, c: Time) -> Result<bool, ProbeFault>;
}

/// The bound is a known number `d`; answers `c <= d`.
#[derive(Clone, Copy, Debug)]
pub struct ConcreteProbe {
    d: Time,
}

impl ConcreteProbe {
    pub fn new(d: Time) -> ConcreteProbe {
        ConcreteProbe { d }
    }
}

impl DelayProbe for ConcreteProbe {
    fn at_most(&mut self, c: Time) -> Result<bool, ProbeFault> {
        Ok(c <= self.d)
    }
}

/// Behaves as if the bound were just below `d`: answers `c < d`. This is
/// the simulated `d - epsilon` run that turns an at-most decider into a
/// strictly-below decider.
#[derive(Clone, Copy, Debug)]
pub struct StrictProbe {
    d: Time,
}

impl StrictProbe {
    pub fn new(d: Time) -> StrictProbe {
        StrictProbe { d }
    }
}

impl DelayProbe for StrictProbe {
    fn at_most(&mut self, c: Time) -> Result<bool, ProbeFault> {
        Ok(c < self.d)
    }
}

/// Wraps another probe and records the answer sequence.
pub struct RecordingProbe<'a> {
    inner: &'a mut dyn DelayProbe,
    pub answers: Vec<bool>,
}

impl<'a> RecordingProbe<'a> {
    pub fn new(inner: &'a mut dyn DelayProbe) -> RecordingProbe<'a> {
        RecordingProbe {
            inner,
            answers: Vec::new(),
        }
    }
}

impl DelayProbe for RecordingProbe<'_> {
    fn at_most(&mut self, c: Time) -> Result<bool, ProbeFault> {
        let answer = self.inner.at_most(c)?;
        self.answers.push(answer);
        Ok(answer)
    }
}

/// Replays a recorded answer sequence, ignoring the comparison values.
/// Replaying a run's own log must reproduce that run exactly; that is the
/// comparison-only contract every decider here upholds.
pub struct ReplayProbe {
    answers: VecDeque<bool>,
}

impl ReplayProbe {
    pub fn new(answers: impl IntoIterator<Item = bool>) -> ReplayProbe {
        ReplayProbe {
            answers: answers.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.answers.len()
    }
}

impl DelayProbe for ReplayProbe {
    fn at_most(&mut self, _c: Time) -> Result<bool, ProbeFault> {
        self.answers
            .pop_front()
            .ok_or_else(|| ProbeFault("replay log exhausted".into()))
    }
}

/// Result of a decision run: a schedule meeting the bound, or the verdict
/// that none exists.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Feasible(Schedule),
    Infeasible,
}

impl Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            Outcome::Feasible(s) => Some(s),
            Outcome::Infeasible => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("{decider} cannot run on a {topology} instance")]
    WrongTopology {
        decider: &'static str,
        topology: String,
    },
    #[error("no polynomial decision procedure for {0}; use the brute-force oracle")]
    Unsupported(String),
    #[error("dynamic program needs {states} states, above the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },
    #[error(transparent)]
    Probe(#[from] ProbeFault),
}

/// A named decision procedure, selectable per topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decider {
    /// Greedy two-lane merge scheduler.
    GreedyY,
    /// Dynamic program over per-lane crossed counts, any merge.
    MergeDp,
    /// Dynamic program over road phases for the two-way crossing.
    CrossingDp,
}

impl Decider {
    /// The natural procedure for a topology: greedy for the two-lane
    /// merge, the merge DP for wider merges, the phase DP for the
    /// crossing. The combined merge-plus-crossing shape has no polynomial
    /// decision procedure and is refused.
    pub fn auto(topology: &Topology) -> Result<Decider, DecideError> {
        match topology.kind() {
            TopologyKind::YMerge => Ok(Decider::GreedyY),
            TopologyKind::KMerge => Ok(Decider::MergeDp),
            TopologyKind::TwoWayCrossing => Ok(Decider::CrossingDp),
            TopologyKind::MultiCross => {
                Err(DecideError::Unsupported(topology.kind().to_string()))
            }
        }
    }

    pub fn decide(
        self,
        inst: &Instance,
        probe: &mut dyn DelayProbe,
    ) -> Result<Outcome, DecideError> {
        match self {
            Decider::GreedyY => decide_y(inst, probe),
            Decider::MergeDp => decide_kmerge(inst, probe),
            Decider::CrossingDp => decide_crossing(inst, probe),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Decider::GreedyY => "greedy",
            Decider::MergeDp => "merge-dp",
            Decider::CrossingDp => "crossing-dp",
        }
    }
}
