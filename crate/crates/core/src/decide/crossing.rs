//! Decision procedure for the two-way crossing.
//!
//! States count crossed platoons per lane; a transition appends one
//! road's worth of traffic (a contiguous segment per lane of that road),
//! scheduled greedily from the predecessor's completion time. Within such
//! a phase only the two first platoons can carry the worst delay, and the
//! push each lane's first platoon receives decays through the idle gaps
//! between consecutive platoons, so a whole phase is evaluated in constant
//! time from prefix sums of those gaps.

use std::ops::Range;

use super::{DecideError, DelayProbe, Outcome, ProbeFault, STATE_CAP};
use crate::model::{Instance, Platoon, Schedule, Time, Topology};

/// Prefix sums of the idle gaps between consecutive platoons of one lane:
/// entry `j` is the total gap before the lane's `j`-th platoon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapPrefix {
    prefix: Vec<Time>,
}

impl GapPrefix {
    pub fn prefix(&self) -> &[Time] {
        &self.prefix
    }

    /// Total gap between consecutive platoons within `range`, in O(1).
    pub fn gap_sum(&self, range: Range<usize>) -> Time {
        if range.end.saturating_sub(range.start) <= 1 {
            Time::ZERO
        } else {
            self.prefix[range.end - 1] - self.prefix[range.start]
        }
    }
}

/// Gaps for a lane sequence sorted by release. Disjointness keeps every
/// gap non-negative.
pub fn lane_gap_prefix(seq: &[&Platoon]) -> GapPrefix {
    let mut prefix = Vec::with_capacity(seq.len());
    if !seq.is_empty() {
        prefix.push(Time::ZERO);
    }
    for pair in seq.windows(2) {
        let gap = pair[1].release - pair[0].undelayed_finish();
        debug_assert!(gap >= Time::ZERO);
        prefix.push(*prefix.last().expect("seeded with zero") + gap);
    }
    GapPrefix { prefix }
}

/// One lane's contribution to a phase: the contiguous run `range` of the
/// lane's platoons that crosses in this phase.
#[derive(Clone, Debug)]
pub struct LaneSegment<'a> {
    pub lane: &'a [&'a Platoon],
    pub prefix: &'a GapPrefix,
    pub range: Range<usize>,
}

/// Closed-form effect of starting a lane segment no earlier than `floor`:
/// the first platoon absorbs the whole wait and later platoons recover
/// through the gaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LanePush {
    pub first_delay: Time,
    pub last_delay: Time,
    pub completion: Time,
}

/// `None` for an empty segment.
pub fn lane_push(seg: &LaneSegment<'_>, floor: Time) -> Option<LanePush> {
    if seg.range.is_empty() {
        return None;
    }
    let first = seg.lane[seg.range.start];
    let last = seg.lane[seg.range.end - 1];
    let first_delay = Time::ZERO.max(floor - first.release);
    let last_delay = Time::ZERO.max(first_delay - seg.prefix.gap_sum(seg.range.clone()));
    Some(LanePush {
        first_delay,
        last_delay,
        completion: last.undelayed_finish() + last_delay,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseEval {
    pub admissible: bool,
    /// Finish time of the phase's last platoon; `floor` when both
    /// segments are empty. Meaningless when not admissible.
    pub completion: Time,
}

/// Evaluates one road's phase: both lanes start no earlier than `floor`,
/// and the phase is admissible when each lane's heaviest delay (its first
/// platoon's) passes the probe.
pub fn greedy_phase(
    segments: &[LaneSegment<'_>; 2],
    floor: Time,
    probe: &mut dyn DelayProbe,
) -> Result<PhaseEval, ProbeFault> {
    let mut completion = floor;
    for seg in segments {
        if let Some(push) = lane_push(seg, floor) {
            if !probe.at_most(push.first_delay)? {
                return Ok(PhaseEval {
                    admissible: false,
                    completion: floor,
                });
            }
            completion = completion.max(push.completion);
        }
    }
    Ok(PhaseEval {
        admissible: true,
        completion,
    })
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    t: Time,
    back: Option<usize>,
}

struct Dp {
    table: Vec<Option<Cell>>,
    strides: [usize; 4],
}

impl Dp {
    fn counts_of(&self, mut idx: usize) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for (i, &s) in self.strides.iter().enumerate() {
            counts[i] = idx / s;
            idx %= s;
        }
        counts
    }
}

pub fn decide_crossing(
    inst: &Instance,
    probe: &mut dyn DelayProbe,
) -> Result<Outcome, DecideError> {
    let dp = run_dp(inst, probe)?;
    let lanes = inst.lane_sequences();

    let full = dp.table.len() - 1;
    if dp.table[full].is_none() {
        return Ok(Outcome::Infeasible);
    }

    let mut sched = Schedule::new();
    let mut idx = full;
    while idx != 0 {
        let cell = dp.table[idx].expect("walked only reachable states");
        let pred_idx = cell.back.expect("non-base states store a predecessor");
        let pred = dp.table[pred_idx].expect("predecessor was reachable");
        let counts = dp.counts_of(idx);
        let pred_counts = dp.counts_of(pred_idx);
        for lane in 0..4 {
            let mut cursor = pred.t;
            for p in &lanes[lane][pred_counts[lane]..counts[lane]] {
                let crossing = p.release.max(cursor);
                cursor = crossing + p.length;
                sched.set(p.id.clone(), crossing);
            }
        }
        idx = pred_idx;
    }
    Ok(Outcome::Feasible(sched))
}

fn run_dp(inst: &Instance, probe: &mut dyn DelayProbe) -> Result<Dp, DecideError> {
    if inst.topology() != &Topology::TwoWayCrossing {
        return Err(DecideError::WrongTopology {
            decider: "the crossing dynamic program",
            topology: inst.topology().kind().to_string(),
        });
    }

    let lanes = inst.lane_sequences();
    debug_assert_eq!(lanes.len(), 4);
    let prefixes: Vec<GapPrefix> = lanes.iter().map(|seq| lane_gap_prefix(seq)).collect();
    let dims: Vec<usize> = lanes.iter().map(|seq| seq.len() + 1).collect();
    let states: u128 = dims.iter().map(|&d| d as u128).product();
    if states > STATE_CAP {
        return Err(DecideError::StateSpaceTooLarge {
            states,
            cap: STATE_CAP,
        });
    }
    let states = states as usize;

    let mut strides = [1usize; 4];
    for i in (0..3).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let counts_of = |mut idx: usize| -> [usize; 4] {
        let mut counts = [0usize; 4];
        for (i, &s) in strides.iter().enumerate() {
            counts[i] = idx / s;
            idx %= s;
        }
        counts
    };

    let mut order: Vec<(u32, usize)> = (0..states)
        .map(|idx| (counts_of(idx).iter().sum::<usize>() as u32, idx))
        .collect();
    order.sort_unstable();

    let mut table: Vec<Option<Cell>> = vec![None; states];
    table[0] = Some(Cell {
        t: inst.earliest_release(),
        back: None,
    });

    for &(total, idx) in &order {
        if total == 0 {
            continue;
        }
        let counts = counts_of(idx);
        let mut best: Option<Cell> = None;
        // Road 0 covers lanes h1/h2, road 1 covers v1/v2; ties prefer the
        // earlier road and the lexicographically first predecessor.
        for road in 0..2 {
            let (la, lb) = (2 * road, 2 * road + 1);
            for ca in 0..=counts[la] {
                for cb in 0..=counts[lb] {
                    if ca == counts[la] && cb == counts[lb] {
                        continue;
                    }
                    let pred_idx = idx
                        - (counts[la] - ca) * strides[la]
                        - (counts[lb] - cb) * strides[lb];
                    let Some(pred) = table[pred_idx] else {
                        continue;
                    };
                    let segments = [
                        LaneSegment {
                            lane: &lanes[la],
                            prefix: &prefixes[la],
                            range: ca..counts[la],
                        },
                        LaneSegment {
                            lane: &lanes[lb],
                            prefix: &prefixes[lb],
                            range: cb..counts[lb],
                        },
                    ];
                    let eval = greedy_phase(&segments, pred.t, probe)?;
                    if eval.admissible && best.is_none_or(|b| eval.completion < b.t) {
                        best = Some(Cell {
                            t: eval.completion,
                            back: Some(pred_idx),
                        });
                    }
                }
            }
        }
        table[idx] = best;
    }

    Ok(Dp { table, strides })
}
