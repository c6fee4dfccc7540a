//! Greedy decision procedure for the two-lane merge.
//!
//! After each crossing, the earlier-released of the two front platoons is
//! allowed through unless doing so would push the other front platoon past
//! the bound; in that case the other one goes. A final pass re-checks
//! every delay through the probe, so the whole run stays within the
//! comparison-only contract. Linear in the number of platoons after the
//! lane sort, with at most `2n + 1` probe queries.

use super::{DecideError, DelayProbe, Outcome};
use crate::model::{Instance, Platoon, Schedule, Time, Topology};

pub fn decide_y(inst: &Instance, probe: &mut dyn DelayProbe) -> Result<Outcome, DecideError> {
    match inst.topology() {
        Topology::YMerge | Topology::KMerge { k: 2 } => {}
        other => {
            return Err(DecideError::WrongTopology {
                decider: "the greedy merge decider",
                topology: other.kind().to_string(),
            })
        }
    }

    let lanes = inst.lane_sequences();
    debug_assert_eq!(lanes.len(), 2);
    let mut next = [0usize, 0usize];
    let mut free_at = inst.earliest_release();
    let mut sched = Schedule::new();

    let cross = |p: &Platoon, free_at: &mut Time, sched: &mut Schedule| {
        let crossing = p.release.max(*free_at);
        *free_at = crossing + p.length;
        sched.set(p.id.clone(), crossing);
    };

    while next[0] < lanes[0].len() && next[1] < lanes[1].len() {
        let fronts = [lanes[0][next[0]], lanes[1][next[1]]];
        // Earlier release goes first as the candidate; ties favor lane 0.
        let (i, j) = if fronts[0].release <= fronts[1].release {
            (0, 1)
        } else {
            (1, 0)
        };
        let (candidate, other) = (fronts[i], fronts[j]);
        let induced =
            Time::ZERO.max(candidate.release.max(free_at) + candidate.length - other.release);
        if probe.at_most(induced)? {
            cross(candidate, &mut free_at, &mut sched);
            next[i] += 1;
        } else {
            cross(other, &mut free_at, &mut sched);
            next[j] += 1;
        }
    }
    for (idx, lane) in lanes.iter().enumerate() {
        for p in &lane[next[idx]..] {
            cross(p, &mut free_at, &mut sched);
        }
    }

    // The loop only bounded delays it was asked about; the schedule as a
    // whole is accepted or rejected through the probe.
    for p in inst.platoons() {
        let delay = sched.crossing(&p.id).expect("every platoon crossed") - p.release;
        if !probe.at_most(delay)? {
            return Ok(Outcome::Infeasible);
        }
    }
    Ok(Outcome::Feasible(sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{ConcreteProbe, RecordingProbe, ReplayProbe};
    use crate::model::{generate_instance, LaneId, PlatoonId};
    use crate::validate::check_valid;

    fn long_short() -> Instance {
        Instance::new(
            Topology::YMerge,
            vec![
                Platoon::new("P", LaneId::Merge(1), 0, 10),
                Platoon::new("Q", LaneId::Merge(2), 2, 1),
            ],
        )
        .unwrap()
    }

    fn run(inst: &Instance, d: i64) -> Outcome {
        decide_y(inst, &mut ConcreteProbe::new(Time::new(d))).unwrap()
    }

    #[test]
    fn long_platoon_yields_at_three() {
        match run(&long_short(), 3) {
            Outcome::Feasible(s) => {
                assert_eq!(s.crossing(&PlatoonId::from("Q")), Some(Time::new(2)));
                assert_eq!(s.crossing(&PlatoonId::from("P")), Some(Time::new(3)));
            }
            Outcome::Infeasible => panic!("d=3 is feasible"),
        }
    }

    #[test]
    fn infeasible_below_optimum() {
        assert_eq!(run(&long_short(), 2), Outcome::Infeasible);
    }

    #[test]
    fn long_platoon_goes_first_at_eight() {
        match run(&long_short(), 8) {
            Outcome::Feasible(s) => {
                assert_eq!(s.crossing(&PlatoonId::from("P")), Some(Time::ZERO));
                assert_eq!(s.crossing(&PlatoonId::from("Q")), Some(Time::new(10)));
            }
            Outcome::Infeasible => panic!("d=8 is feasible"),
        }
    }

    #[test]
    fn single_platoon_at_zero_delay() {
        let inst = Instance::new(
            Topology::YMerge,
            vec![Platoon::new("p", LaneId::Merge(2), 4, 2)],
        )
        .unwrap();
        match run(&inst, 0) {
            Outcome::Feasible(s) => {
                assert_eq!(s.crossing(&PlatoonId::from("p")), Some(Time::new(4)))
            }
            Outcome::Infeasible => panic!("a lone platoon never waits"),
        }
    }

    #[test]
    fn empty_instance_feasible() {
        let inst = Instance::new(Topology::YMerge, vec![]).unwrap();
        assert_eq!(run(&inst, 0), Outcome::Feasible(Schedule::new()));
    }

    #[test]
    fn wrong_topology_rejected() {
        let inst = Instance::new(Topology::TwoWayCrossing, vec![]).unwrap();
        let err = decide_y(&inst, &mut ConcreteProbe::new(Time::ZERO));
        assert!(matches!(err, Err(DecideError::WrongTopology { .. })));
    }

    #[test]
    fn feasible_schedules_validate_within_bound() {
        for seed in 0..40 {
            let inst =
                generate_instance(&Topology::YMerge, 6, seed, Time::new(20), Time::new(5))
                    .unwrap();
            for d in 0..=inst.schedule_length().value() {
                if let Outcome::Feasible(s) = run(&inst, d) {
                    let report = check_valid(&inst, &s);
                    assert!(report.is_valid(), "{:?}", report.violations);
                    assert!(report.max_delay.unwrap() <= Time::new(d));
                }
            }
        }
    }

    #[test]
    fn probe_query_budget() {
        for seed in 0..20 {
            let inst =
                generate_instance(&Topology::YMerge, 7, seed, Time::new(25), Time::new(4))
                    .unwrap();
            let n = inst.platoons().len();
            for d in [0, 3, 10] {
                let mut concrete = ConcreteProbe::new(Time::new(d));
                let mut recorder = RecordingProbe::new(&mut concrete);
                decide_y(&inst, &mut recorder).unwrap();
                assert!(recorder.answers.len() <= 2 * n + 1);
            }
        }
    }

    #[test]
    fn replaying_recorded_answers_reproduces_outcome() {
        let inst = long_short();
        for d in [2, 3, 8] {
            let mut concrete = ConcreteProbe::new(Time::new(d));
            let mut recorder = RecordingProbe::new(&mut concrete);
            let original = decide_y(&inst, &mut recorder).unwrap();
            let mut replay = ReplayProbe::new(recorder.answers.clone());
            let replayed = decide_y(&inst, &mut replay).unwrap();
            assert_eq!(original, replayed);
            assert_eq!(replay.remaining(), 0);
        }
    }
}
