//! Brute-force reference solver: enumerates every admission order (an
//! interleaving of the per-lane queues), schedules each order as early as
//! possible, and keeps the smallest maximum delay. Exact on any topology,
//! affordable only for small instances, and deliberately independent of
//! the polynomial solvers it is used to check.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{Instance, LaneId, Platoon, PlatoonId, Schedule, Time};
use crate::validate::max_delay;

/// Refuse to enumerate beyond this many admission orders unless the caller
/// raises the cap explicitly.
pub const DEFAULT_ORDER_CAP: u64 = 500_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{required} admission orders exceed the cap of {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("invalid admission order: {0}")]
    InvalidOrder(String),
}

/// An exact optimum with its witness and the number of orders inspected.
#[derive(Clone, Debug)]
pub struct Optimal {
    pub d_star: Time,
    pub schedule: Schedule,
    pub orders_tried: u64,
}

/// Number of admission orders: the multinomial of the lane populations,
/// computed as a running product of binomials so intermediate values stay
/// integral. `None` when the count overflows a `u128`.
pub fn count_admission_orders(inst: &Instance) -> Option<u128> {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for seq in inst.lane_sequences() {
        for i in 1..=seq.len() as u128 {
            placed += 1;
            total = total.checked_mul(placed)?;
            total /= i;
        }
    }
    Some(total)
}

/// Schedules each platoon, in the given order, as early as possible: no
/// earlier than its release, its in-lane predecessor's finish, or the
/// finish of any earlier-ordered platoon on a conflicting lane.
pub fn earliest_schedule_for_order(
    inst: &Instance,
    order: &[PlatoonId],
) -> Result<Schedule, OracleError> {
    let mut position: HashMap<&PlatoonId, usize> = HashMap::new();
    for (i, id) in order.iter().enumerate() {
        if position.insert(id, i).is_some() {
            return Err(OracleError::InvalidOrder(format!(
                "platoon `{id}` appears twice"
            )));
        }
    }
    if order.len() != inst.platoons().len() {
        return Err(OracleError::InvalidOrder(format!(
            "order lists {} platoons, instance has {}",
            order.len(),
            inst.platoons().len()
        )));
    }
    for p in inst.platoons() {
        if !position.contains_key(&p.id) {
            return Err(OracleError::InvalidOrder(format!(
                "platoon `{}` is missing from the order",
                p.id
            )));
        }
    }
    // Consistency with per-lane release order.
    for seq in inst.lane_sequences() {
        for pair in seq.windows(2) {
            if position[&pair[0].id] > position[&pair[1].id] {
                return Err(OracleError::InvalidOrder(format!(
                    "`{}` overtakes `{}` on lane `{}`",
                    pair[1].id, pair[0].id, pair[0].lane
                )));
            }
        }
    }

    let ordered: Vec<&Platoon> = order
        .iter()
        .map(|id| inst.platoon(id).expect("order checked against instance"))
        .collect();
    Ok(earliest_schedule_unchecked(inst, &ordered))
}

fn earliest_schedule_unchecked(inst: &Instance, ordered: &[&Platoon]) -> Schedule {
    let mut sched = Schedule::new();
    let mut lane_free: HashMap<LaneId, Time> = HashMap::new();
    let mut crossed: Vec<(&LaneId, Time)> = Vec::with_capacity(ordered.len());
    for p in ordered {
        let mut crossing = p.release;
        if let Some(&free) = lane_free.get(&p.lane) {
            crossing = crossing.max(free);
        }
        for (lane, finish) in &crossed {
            if inst.topology().conflict_unchecked(lane, &p.lane) {
                crossing = crossing.max(*finish);
            }
        }
        let finish = crossing + p.length;
        lane_free.insert(p.lane, finish);
        crossed.push((&p.lane, finish));
        sched.set(p.id.clone(), crossing);
    }
    sched
}

/// Enumerates every admission order and returns the minimum maximum delay
/// with the first witness in enumeration order (lanes advance in declared
/// lane order at every branch).
///
/// The search keeps per-lane last-finish times incrementally, so one step
/// costs O(k) and no schedule is materialized until the best order is
/// known. Per-lane finish times suffice for the conflict bound because
/// earliest scheduling keeps each lane's finishes increasing.
pub fn brute_force_optimal(inst: &Instance, order_cap: u64) -> Result<Optimal, OracleError> {
    let required = count_admission_orders(inst);
    match required {
        Some(required) if required <= order_cap as u128 => {}
        _ => {
            return Err(OracleError::CapExceeded {
                required: required.unwrap_or(u128::MAX),
                cap: order_cap,
            })
        }
    }

    let lane_ids = inst.topology().lanes();
    let k = lane_ids.len();
    let mut blocks = vec![vec![false; k]; k];
    for (i, x) in lane_ids.iter().enumerate() {
        for (j, y) in lane_ids.iter().enumerate() {
            // A platoon waits for its own lane (FIFO) and for lanes that
            // conflict with it.
            blocks[i][j] = i == j || inst.topology().conflict_unchecked(x, y);
        }
    }

    struct Dfs<'a> {
        lanes: Vec<Vec<&'a Platoon>>,
        blocks: Vec<Vec<bool>>,
        total: usize,
        cursor: Vec<usize>,
        last_finish: Vec<Option<Time>>,
        running_max: Time,
        prefix: Vec<usize>,
        best: Option<(Time, Vec<usize>)>,
        leaves: u64,
    }

    impl Dfs<'_> {
        fn run(&mut self) {
            if self.prefix.len() == self.total {
                self.leaves += 1;
                let better = self
                    .best
                    .as_ref()
                    .is_none_or(|(incumbent, _)| self.running_max < *incumbent);
                if better {
                    self.best = Some((self.running_max, self.prefix.clone()));
                }
                return;
            }
            for lane in 0..self.lanes.len() {
                if self.cursor[lane] >= self.lanes[lane].len() {
                    continue;
                }
                let p = self.lanes[lane][self.cursor[lane]];
                let mut crossing = p.release;
                for other in 0..self.lanes.len() {
                    if self.blocks[lane][other] {
                        if let Some(finish) = self.last_finish[other] {
                            crossing = crossing.max(finish);
                        }
                    }
                }
                let saved_finish = self.last_finish[lane];
                let saved_max = self.running_max;
                self.last_finish[lane] = Some(crossing + p.length);
                self.running_max = self.running_max.max(crossing - p.release);
                self.cursor[lane] += 1;
                self.prefix.push(lane);
                self.run();
                self.prefix.pop();
                self.cursor[lane] -= 1;
                self.running_max = saved_max;
                self.last_finish[lane] = saved_finish;
            }
        }
    }

    let lanes = inst.lane_sequences();
    let mut dfs = Dfs {
        total: lanes.iter().map(|l| l.len()).sum(),
        cursor: vec![0; k],
        last_finish: vec![None; k],
        running_max: Time::ZERO,
        prefix: Vec::new(),
        best: None,
        leaves: 0,
        lanes,
        blocks,
    };
    dfs.run();

    let (d_star, best_prefix) = dfs.best.expect("at least the empty order exists");
    let mut cursor = vec![0usize; k];
    let ordered: Vec<&Platoon> = best_prefix
        .iter()
        .map(|&lane| {
            let p = dfs.lanes[lane][cursor[lane]];
            cursor[lane] += 1;
            p
        })
        .collect();
    let schedule = earliest_schedule_unchecked(inst, &ordered);
    debug_assert_eq!(max_delay(inst, &schedule), Ok(d_star));
    Ok(Optimal {
        d_star,
        schedule,
        orders_tried: dfs.leaves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, LaneId, Topology};
    use crate::validate::check_valid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(names: &[&str]) -> Vec<PlatoonId> {
        names.iter().map(|n| PlatoonId::from(*n)).collect()
    }

    #[test]
    fn fig1_order_a_b() {
        let inst = Instance::new(
            Topology::YMerge,
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 3),
                Platoon::new("B", LaneId::Merge(2), 1, 2),
            ],
        )
        .unwrap();
        let sched = earliest_schedule_for_order(&inst, &ids(&["A", "B"])).unwrap();
        assert_eq!(sched.crossing(&PlatoonId::from("A")), Some(Time::ZERO));
        assert_eq!(sched.crossing(&PlatoonId::from("B")), Some(Time::new(3)));
        assert!(check_valid(&inst, &sched).is_valid());
    }

    #[test]
    fn long_and_short_platoons() {
        let inst = Instance::new(
            Topology::YMerge,
            vec![
                Platoon::new("P", LaneId::Merge(1), 0, 10),
                Platoon::new("Q", LaneId::Merge(2), 2, 1),
            ],
        )
        .unwrap();
        let q_first = earliest_schedule_for_order(&inst, &ids(&["Q", "P"])).unwrap();
        assert_eq!(q_first.crossing(&PlatoonId::from("Q")), Some(Time::new(2)));
        assert_eq!(q_first.crossing(&PlatoonId::from("P")), Some(Time::new(3)));

        let opt = brute_force_optimal(&inst, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(opt.d_star, Time::new(3));
        assert_eq!(opt.schedule, q_first);
        assert_eq!(opt.orders_tried, 2);
    }

    #[test]
    fn three_way_merge_optimum() {
        let inst = Instance::new(
            Topology::KMerge { k: 3 },
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 10),
                Platoon::new("B", LaneId::Merge(2), 3, 2),
                Platoon::new("C", LaneId::Merge(3), 4, 2),
            ],
        )
        .unwrap();
        let opt = brute_force_optimal(&inst, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(opt.orders_tried, 6);
        assert_eq!(opt.d_star, Time::new(7));
        // Witness realizes the order B, C, A.
        assert_eq!(opt.schedule.crossing(&PlatoonId::from("B")), Some(Time::new(3)));
        assert_eq!(opt.schedule.crossing(&PlatoonId::from("C")), Some(Time::new(5)));
        assert_eq!(opt.schedule.crossing(&PlatoonId::from("A")), Some(Time::new(7)));
    }

    #[test]
    fn non_conflicting_lanes_cross_at_release() {
        let inst = Instance::new(
            Topology::TwoWayCrossing,
            vec![
                Platoon::new("A", LaneId::H1, 0, 5),
                Platoon::new("B", LaneId::H2, 1, 5),
            ],
        )
        .unwrap();
        for order in [ids(&["A", "B"]), ids(&["B", "A"])] {
            let sched = earliest_schedule_for_order(&inst, &order).unwrap();
            assert_eq!(sched.crossing(&PlatoonId::from("A")), Some(Time::ZERO));
            assert_eq!(sched.crossing(&PlatoonId::from("B")), Some(Time::new(1)));
        }
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(Topology::YMerge, vec![]).unwrap();
        let opt = brute_force_optimal(&inst, 10).unwrap();
        assert_eq!(opt.d_star, Time::ZERO);
        assert!(opt.schedule.is_empty());
        assert_eq!(opt.orders_tried, 1);
    }

    #[test]
    fn invalid_orders_rejected() {
        let inst = Instance::new(
            Topology::KMerge { k: 2 },
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 1),
                Platoon::new("B", LaneId::Merge(1), 2, 1),
            ],
        )
        .unwrap();
        assert!(earliest_schedule_for_order(&inst, &ids(&["B", "A"])).is_err());
        assert!(earliest_schedule_for_order(&inst, &ids(&["A"])).is_err());
        assert!(earliest_schedule_for_order(&inst, &ids(&["A", "A"])).is_err());
        assert!(earliest_schedule_for_order(&inst, &ids(&["A", "B", "C"])).is_err());
    }

    #[test]
    fn cap_enforced() {
        let inst = generate_instance(
            &Topology::KMerge { k: 3 },
            9,
            11,
            Time::new(20),
            Time::new(4),
        )
        .unwrap();
        let err = brute_force_optimal(&inst, 5);
        assert!(matches!(err, Err(OracleError::CapExceeded { .. })));
    }

    #[test]
    fn order_count_matches_enumeration() {
        for seed in 0..6 {
            let inst = generate_instance(
                &Topology::KMerge { k: 3 },
                6,
                seed,
                Time::new(12),
                Time::new(3),
            )
            .unwrap();
            let predicted = count_admission_orders(&inst).unwrap();
            let opt = brute_force_optimal(&inst, DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(predicted, opt.orders_tried as u128);
        }
    }

    #[test]
    fn dominance_over_random_valid_schedules() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        'outer: for seed in 0..500u64 {
            let topology = match seed % 3 {
                0 => Topology::YMerge,
                1 => Topology::KMerge { k: 3 },
                _ => Topology::TwoWayCrossing,
            };
            let inst =
                generate_instance(&topology, 5, seed, Time::new(15), Time::new(4)).unwrap();
            // Random valid schedule: a random admission order scheduled
            // earliest, then padded with random per-platoon slack.
            let lanes = inst.lane_sequences();
            let mut cursors = vec![0usize; lanes.len()];
            let mut order = Vec::new();
            while order.len() < inst.platoons().len() {
                let live: Vec<usize> = (0..lanes.len())
                    .filter(|&i| cursors[i] < lanes[i].len())
                    .collect();
                let pick = live[rng.gen_range(0..live.len())];
                order.push(lanes[pick][cursors[pick]].id.clone());
                cursors[pick] += 1;
            }
            let mut padded = Schedule::new();
            {
                let mut lane_free: std::collections::HashMap<LaneId, Time> = Default::default();
                let mut done: Vec<(LaneId, Time)> = Vec::new();
                for id in &order {
                    let p = inst.platoon(id).unwrap();
                    let mut crossing = p.release;
                    if let Some(&f) = lane_free.get(&p.lane) {
                        crossing = crossing.max(f);
                    }
                    for (lane, finish) in &done {
                        if inst.topology().conflict_unchecked(lane, &p.lane) {
                            crossing = crossing.max(*finish);
                        }
                    }
                    crossing = crossing + Time::new(rng.gen_range(0..4));
                    let finish = crossing + p.length;
                    lane_free.insert(p.lane, finish);
                    done.push((p.lane, finish));
                    padded.set(id.clone(), crossing);
                }
            }
            let report = check_valid(&inst, &padded);
            assert!(report.is_valid());

            // Induced order: sort by crossing time, ties by lane name.
            let mut induced: Vec<&Platoon> = inst.platoons().iter().collect();
            induced.sort_by_key(|p| (padded.crossing(&p.id).unwrap(), p.lane.to_string()));
            let induced_ids: Vec<PlatoonId> = induced.iter().map(|p| p.id.clone()).collect();
            let earliest = match earliest_schedule_for_order(&inst, &induced_ids) {
                Ok(s) => s,
                Err(_) => continue 'outer, // order ties broke lane order; skip
            };
            for p in inst.platoons() {
                assert!(
                    earliest.crossing(&p.id).unwrap() <= padded.crossing(&p.id).unwrap(),
                    "earliest scheduling moved `{}` later",
                    p.id
                );
            }
            assert!(max_delay(&inst, &earliest).unwrap() <= report.max_delay.unwrap());
            checked += 1;
        }
        assert!(checked >= 400, "only {checked} random schedules exercised");
    }
}
