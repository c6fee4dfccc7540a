//! Schedule validation: no platoon crosses before release, same-lane
//! platoons keep their order, conflicting platoons never share the
//! intersection (open intervals, so touching end-to-start is legal), and
//! every platoon is scheduled exactly once.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Instance, PlatoonId, Schedule, Time};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("platoon `{0}` is not scheduled")]
    MissingPlatoon(PlatoonId),
    #[error("platoon `{0}` is not part of the instance")]
    UnknownPlatoon(PlatoonId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    BeforeRelease,
    LaneOvertake,
    CrossCollision,
    MissingPlatoon,
    UnknownPlatoon,
}

/// One broken validity condition, with the platoon(s) responsible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub offenders: Vec<PlatoonId>,
    pub detail: String,
}

/// Outcome of validating a schedule. `max_delay` is present exactly when
/// there are no violations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub max_delay: Option<Time>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Crossing time minus release time. Negative only for schedules that are
/// invalid anyway.
pub fn platoon_delay(inst: &Instance, sched: &Schedule, id: &PlatoonId) -> Result<Time, ValidateError> {
    let platoon = inst
        .platoon(id)
        .ok_or_else(|| ValidateError::UnknownPlatoon(id.clone()))?;
    let crossing = sched
        .crossing(id)
        .ok_or_else(|| ValidateError::MissingPlatoon(id.clone()))?;
    Ok(crossing - platoon.release)
}

/// Maximum per-platoon delay; zero for the empty instance.
pub fn max_delay(inst: &Instance, sched: &Schedule) -> Result<Time, ValidateError> {
    let mut max = Time::ZERO;
    for p in inst.platoons() {
        max = max.max(platoon_delay(inst, sched, &p.id)?);
    }
    Ok(max)
}

/// Checks every validity condition and reports all violations found, not
/// just the first.
pub fn check_valid(inst: &Instance, sched: &Schedule) -> ValidationReport {
    let mut violations = Vec::new();

    for id in sched.crossing_times.keys() {
        if inst.platoon(id).is_none() {
            violations.push(Violation {
                kind: ViolationKind::UnknownPlatoon,
                offenders: vec![id.clone()],
                detail: format!("schedule entry `{id}` is not a platoon of the instance"),
            });
        }
    }
    for p in inst.platoons() {
        if sched.crossing(&p.id).is_none() {
            violations.push(Violation {
                kind: ViolationKind::MissingPlatoon,
                offenders: vec![p.id.clone()],
                detail: format!("platoon `{}` has no crossing time", p.id),
            });
        }
    }

    for p in inst.platoons() {
        if let Some(crossing) = sched.crossing(&p.id) {
            if crossing < p.release {
                violations.push(Violation {
                    kind: ViolationKind::BeforeRelease,
                    offenders: vec![p.id.clone()],
                    detail: format!(
                        "platoon `{}` crosses at {crossing}, before its release {}",
                        p.id, p.release
                    ),
                });
            }
        }
    }

    // Same lane: the follower may start no earlier than the leader's
    // crossing time plus length, which rules out overtaking outright.
    for lane in inst.topology().lanes() {
        let seq = inst.lane_sequence(&lane);
        for pair in seq.windows(2) {
            let (lead, follow) = (pair[0], pair[1]);
            if let (Some(t_lead), Some(t_follow)) =
                (sched.crossing(&lead.id), sched.crossing(&follow.id))
            {
                if t_follow < t_lead + lead.length {
                    violations.push(Violation {
                        kind: ViolationKind::LaneOvertake,
                        offenders: vec![lead.id.clone(), follow.id.clone()],
                        detail: format!(
                            "on lane `{lane}`, `{}` must finish (at {}) before `{}` starts (at {t_follow})",
                            lead.id,
                            t_lead + lead.length,
                            follow.id
                        ),
                    });
                }
            }
        }
    }

    // Conflicting lanes: open occupancy intervals must be disjoint.
    let platoons = inst.platoons();
    for (i, p) in platoons.iter().enumerate() {
        for q in &platoons[i + 1..] {
            if !inst.topology().conflict_unchecked(&p.lane, &q.lane) {
                continue;
            }
            if let (Some(tp), Some(tq)) = (sched.crossing(&p.id), sched.crossing(&q.id)) {
                if tp < tq + q.length && tq < tp + p.length {
                    violations.push(Violation {
                        kind: ViolationKind::CrossCollision,
                        offenders: vec![p.id.clone(), q.id.clone()],
                        detail: format!(
                            "`{}` occupies ({tp}, {}) and `{}` occupies ({tq}, {}) on conflicting lanes",
                            p.id,
                            tp + p.length,
                            q.id,
                            tq + q.length
                        ),
                    });
                }
            }
        }
    }

    let max_delay = if violations.is_empty() {
        Some(max_delay(inst, sched).expect("no missing platoons when valid"))
    } else {
        None
    };
    ValidationReport {
        violations,
        max_delay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LaneId, Platoon, Topology};

    fn fig1() -> Instance {
        Instance::new(
            Topology::YMerge,
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 3),
                Platoon::new("B", LaneId::Merge(2), 1, 2),
            ],
        )
        .unwrap()
    }

    fn sched(entries: &[(&str, i64)]) -> Schedule {
        let mut s = Schedule::new();
        for (id, t) in entries {
            s.set(PlatoonId::from(*id), Time::new(*t));
        }
        s
    }

    #[test]
    fn fig1_schedule_delays() {
        let inst = fig1();
        let s = sched(&[("A", 0), ("B", 3)]);
        assert_eq!(
            platoon_delay(&inst, &s, &PlatoonId::from("A")).unwrap(),
            Time::ZERO
        );
        assert_eq!(
            platoon_delay(&inst, &s, &PlatoonId::from("B")).unwrap(),
            Time::new(2)
        );
        let report = check_valid(&inst, &s);
        assert!(report.is_valid());
        assert_eq!(report.max_delay, Some(Time::new(2)));
    }

    #[test]
    fn cross_collision_detected() {
        let inst = fig1();
        let report = check_valid(&inst, &sched(&[("A", 0), ("B", 2)]));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::CrossCollision);
        assert_eq!(report.max_delay, None);
    }

    #[test]
    fn same_lane_back_to_back_legal_but_overtake_not() {
        let inst = Instance::new(
            Topology::YMerge,
            vec![
                Platoon::new("A", LaneId::Merge(1), 0, 3),
                Platoon::new("B", LaneId::Merge(1), 3, 2),
            ],
        )
        .unwrap();
        let ok = check_valid(&inst, &sched(&[("A", 0), ("B", 3)]));
        assert!(ok.is_valid());
        assert_eq!(ok.max_delay, Some(Time::ZERO));

        // When A is delayed, B must wait for A's *crossing* plus length,
        // not merely A's release plus length: no overtaking.
        let pushed = check_valid(&inst, &sched(&[("A", 1), ("B", 4)]));
        assert!(pushed.is_valid());
        assert_eq!(pushed.max_delay, Some(Time::new(1)));

        let bad = check_valid(&inst, &sched(&[("A", 1), ("B", 3)]));
        assert_eq!(bad.violations.len(), 1);
        assert_eq!(bad.violations[0].kind, ViolationKind::LaneOvertake);
    }

    #[test]
    fn conflicting_touch_is_legal() {
        let inst = fig1();
        // B starts exactly when A finishes: open intervals stay disjoint.
        let report = check_valid(&inst, &sched(&[("A", 0), ("B", 3)]));
        assert!(report.is_valid());
    }

    #[test]
    fn before_release_detected() {
        let inst = fig1();
        let report = check_valid(&inst, &sched(&[("A", 0), ("B", 0)]));
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::BeforeRelease));
    }

    #[test]
    fn missing_and_unknown_platoons() {
        let inst = fig1();
        let report = check_valid(&inst, &sched(&[("A", 0), ("C", 5)]));
        let kinds: Vec<ViolationKind> = report.violations.iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::MissingPlatoon));
        assert!(kinds.contains(&ViolationKind::UnknownPlatoon));

        assert!(matches!(
            max_delay(&inst, &sched(&[("A", 0)])),
            Err(ValidateError::MissingPlatoon(_))
        ));
        assert!(matches!(
            platoon_delay(&inst, &sched(&[("A", 0)]), &PlatoonId::from("zz")),
            Err(ValidateError::UnknownPlatoon(_))
        ));
    }

    #[test]
    fn all_at_release_and_empty_instance() {
        let inst = Instance::new(
            Topology::TwoWayCrossing,
            vec![
                Platoon::new("A", LaneId::H1, 0, 2),
                Platoon::new("B", LaneId::H2, 1, 2),
            ],
        )
        .unwrap();
        // Same road never conflicts, so releasing both on time is valid.
        let report = check_valid(&inst, &sched(&[("A", 0), ("B", 1)]));
        assert_eq!(report.max_delay, Some(Time::ZERO));

        let empty = Instance::new(Topology::YMerge, vec![]).unwrap();
        let report = check_valid(&empty, &Schedule::new());
        assert!(report.is_valid());
        assert_eq!(report.max_delay, Some(Time::ZERO));
        assert_eq!(max_delay(&empty, &Schedule::new()).unwrap(), Time::ZERO);
    }
}
