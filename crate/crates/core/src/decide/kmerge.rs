//! Decision procedure for the k-way merge, as a dynamic program over
//! crossed-count states.
//!
//! A state records, per lane, how many platoons have fully crossed. For
//! each reachable state the table stores the earliest completion time of
//! a partial schedule reaching it with all delays within the bound, plus
//! the lane whose platoon crossed last. States are visited in ascending
//! total count (ties broken lexicographically), so every predecessor is
//! final before it is read.

use super::{DecideError, DelayProbe, Outcome, STATE_CAP};
use crate::model::{Instance, Schedule, Time, Topology};

#[derive(Clone, Copy, Debug)]
struct Cell {
    t: Time,
    back: Option<usize>,
}

pub fn decide_kmerge(inst: &Instance, probe: &mut dyn DelayProbe) -> Result<Outcome, DecideError> {
    match inst.topology() {
        Topology::YMerge | Topology::KMerge { .. } => {}
        other => {
            return Err(DecideError::WrongTopology {
                decider: "the merge dynamic program",
                topology: other.kind().to_string(),
            })
        }
    }

    let lanes = inst.lane_sequences();
    let dims: Vec<usize> = lanes.iter().map(|seq| seq.len() + 1).collect();
    let states: u128 = dims.iter().map(|&d| d as u128).product();
    if states > STATE_CAP {
        return Err(DecideError::StateSpaceTooLarge {
            states,
            cap: STATE_CAP,
        });
    }
    let states = states as usize;

    // Mixed-radix indexing with lane 0 most significant, so index order is
    // lexicographic over count vectors.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let counts_of = |mut idx: usize| -> Vec<usize> {
        strides
            .iter()
            .map(|&s| {
                let c = idx / s;
                idx %= s;
                c
            })
            .collect()
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
        for (lane, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let Some(pred) = table[idx - strides[lane]] else {
                continue;
            };
            let platoon = lanes[lane][count - 1];
            let crossing = pred.t.max(platoon.release);
            if !probe.at_most(crossing - platoon.release)? {
                continue;
            }
            let completion = crossing + platoon.length;
            if best.is_none_or(|b| completion < b.t) {
                best = Some(Cell {
                    t: completion,
                    back: Some(lane),
                });
            }
        }
        table[idx] = best;
    }

    let full = states - 1;
    if table[full].is_none() {
        return Ok(Outcome::Infeasible);
    }

    let mut sched = Schedule::new();
    let mut idx = full;
    let mut counts = counts_of(full);
    while idx != 0 {
        let lane = table[idx]
            .expect("walked only reachable states")
            .back
            .expect("non-base states store a predecessor lane");
        let pred_idx = idx - strides[lane];
        let pred = table[pred_idx].expect("predecessor was reachable");
        let platoon = lanes[lane][counts[lane] - 1];
        sched.set(platoon.id.clone(), pred.t.max(platoon.release));
        counts[lane] -= 1;
        idx = pred_idx;
    }
    Ok(Outcome::Feasible(sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{decide_y, ConcreteProbe};
    use crate::model::{generate_instance, LaneId, Platoon, PlatoonId};
    use crate::validate::check_valid;

    fn three_way() -> Instance {
        Instance::new(
            Topology::KMerge { k: 3 },
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 10),
                Platoon::new("B", LaneId::Merge(2), 3, 2),
                Platoon::new("C", LaneId::Merge(3), 4, 2),
            ],
        )
        .unwrap()
    }

    fn run(inst: &Instance, d: i64) -> Outcome {
        decide_kmerge(inst, &mut ConcreteProbe::new(Time::new(d))).unwrap()
    }

    #[test]
    fn three_way_feasible_at_seven() {
        match run(&three_way(), 7) {
            Outcome::Feasible(s) => {
                assert_eq!(s.crossing(&PlatoonId::from("B")), Some(Time::new(3)));
                assert_eq!(s.crossing(&PlatoonId::from("C")), Some(Time::new(5)));
                assert_eq!(s.crossing(&PlatoonId::from("A")), Some(Time::new(7)));
            }
            Outcome::Infeasible => panic!("d=7 is feasible"),
        }
    }

    #[test]
    fn three_way_infeasible_at_six() {
        assert_eq!(run(&three_way(), 6), Outcome::Infeasible);
    }

    #[test]
    fn agrees_with_greedy_on_two_lanes() {
        let inst = Instance::new(
            Topology::KMerge { k: 2 },
            vec![
                Platoon::new("P", LaneId::Merge(1), 0, 10),
                Platoon::new("Q", LaneId::Merge(2), 2, 1),
            ],
        )
        .unwrap();
        for d in -1..=12 {
            let mut p1 = ConcreteProbe::new(Time::new(d));
            let mut p2 = ConcreteProbe::new(Time::new(d));
            let dp = decide_kmerge(&inst, &mut p1).unwrap();
            let greedy = decide_y(&inst, &mut p2).unwrap();
            assert_eq!(dp.is_feasible(), greedy.is_feasible(), "d={d}");
        }
        assert!(run(&inst, 3).is_feasible());
    }

    #[test]
    fn empty_and_single() {
        let empty = Instance::new(Topology::KMerge { k: 3 }, vec![]).unwrap();
        assert_eq!(run(&empty, 0), Outcome::Feasible(Schedule::new()));

        let single = Instance::new(
            Topology::KMerge { k: 1 },
            vec![Platoon::new("p", LaneId::Merge(1), 5, 2)],
        )
        .unwrap();
        match run(&single, 0) {
            Outcome::Feasible(s) => {
                assert_eq!(s.crossing(&PlatoonId::from("p")), Some(Time::new(5)))
            }
            Outcome::Infeasible => panic!("single platoon is feasible at 0"),
        }
    }

    #[test]
    fn wrong_topology_rejected() {
        let inst = Instance::new(Topology::TwoWayCrossing, vec![]).unwrap();
        assert!(matches!(
            decide_kmerge(&inst, &mut ConcreteProbe::new(Time::ZERO)),
            Err(DecideError::WrongTopology { .. })
        ));
    }

    #[test]
    fn probe_queries_bounded_by_state_count() {
        use crate::decide::RecordingProbe;
        for seed in 0..10 {
            let inst = generate_instance(
                &Topology::KMerge { k: 4 },
                7,
                seed,
                Time::new(20),
                Time::new(5),
            )
            .unwrap();
            let states: usize = inst
                .lane_sequences()
                .iter()
                .map(|seq| seq.len() + 1)
                .product();
            let mut concrete = ConcreteProbe::new(Time::new(3));
            let mut recorder = RecordingProbe::new(&mut concrete);
            decide_kmerge(&inst, &mut recorder).unwrap();
            assert!(recorder.answers.len() <= 4 * states);
        }
    }

    #[test]
    fn feasible_schedules_validate_within_bound() {
        for seed in 0..25 {
            let inst = generate_instance(
                &Topology::KMerge { k: 3 },
                6,
                seed,
                Time::new(18),
                Time::new(4),
            )
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

    // Raising the bound can only reach states sooner.
    #[test]
    fn state_values_monotone_in_bound() {
        for seed in 0..10 {
            let inst = generate_instance(
                &Topology::KMerge { k: 3 },
                5,
                seed,
                Time::new(15),
                Time::new(4),
            )
            .unwrap();
            for d in 0..inst.schedule_length().value() {
                let loose = table_times(&inst, d + 1);
                let tight = table_times(&inst, d);
                for (a, b) in tight.iter().zip(&loose) {
                    if let (Some(a), Some(b)) = (a, b) {
                        assert!(b <= a, "t at d+1 exceeds t at d");
                    }
                    if a.is_some() {
                        assert!(b.is_some(), "state reachable at d but not d+1");
                    }
                }
            }
        }
    }

    // A transcript of the per-state completion times, for the monotonicity
    // check above; mirrors the DP loop without reconstruction.
    fn table_times(inst: &Instance, d: i64) -> Vec<Option<Time>> {
        let mut probe = ConcreteProbe::new(Time::new(d));
        let lanes = inst.lane_sequences();
        let dims: Vec<usize> = lanes.iter().map(|seq| seq.len() + 1).collect();
        let states: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let mut table: Vec<Option<Time>> = vec![None; states];
        table[0] = Some(inst.earliest_release());
        for idx in 1..states {
            let mut best: Option<Time> = None;
            for lane in 0..dims.len() {
                let count = idx / strides[lane] % dims[lane];
                if count == 0 {
                    continue;
                }
                let Some(pred) = table[idx - strides[lane]] else {
                    continue;
                };
                let p = lanes[lane][count - 1];
                let crossing = pred.max(p.release);
                if !probe.at_most(crossing - p.release).unwrap() {
                    continue;
                }
                let completion = crossing + p.length;
                if best.is_none_or(|b| completion < b) {
                    best = Some(completion);
                }
            }
            table[idx] = best;
        }
        table
    }
}
