//! Executable hardness reduction: builds a combined merge-plus-crossing
//! instance from a multiset of positive integers so that a schedule with
//! delay at most `2q+1` exists exactly when the multiset splits into two
//! halves of equal sum, and recovers such a split from any good schedule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, LaneId, ModelError, Platoon, PlatoonId, Schedule, Time, Topology};
use crate::validate::check_valid;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("the input multiset is empty")]
    EmptyInput,
    #[error("multiset entries must be positive, got {0}")]
    NonPositiveEntry(i64),
    #[error("reduction arithmetic overflow")]
    Overflow,
    #[error("instance does not match the reduction metadata: {0}")]
    MetaMismatch(String),
    #[error("schedule is not valid for the instance: {0}")]
    InvalidSchedule(String),
    #[error("extraction produced unbalanced sums ({0} vs {1}); metadata is corrupt")]
    UnbalancedExtraction(i64, i64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Marker for the only reduction this format carries; serializes as the
/// string `"partition"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PartitionTag;

impl Serialize for PartitionTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str("partition")
    }
}

impl<'de> Deserialize<'de> for PartitionTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<PartitionTag, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "partition" {
            Ok(PartitionTag)
        } else {
            Err(serde::de::Error::custom(format!(
                "unknown reduction kind `{s}`"
            )))
        }
    }
}

/// Metadata embedded in a reduced instance: the source multiset, the half
/// sum `q`, and the delay threshold `d_max = 2q + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionMeta {
    pub reduction: PartitionTag,
    pub x: Vec<i64>,
    pub q: Time,
    pub d_max: Time,
}

impl ReductionMeta {
    /// The fixed platoon ids: `p1` (parallel lane), `p2` (crossing lane),
    /// `p3` (long merge platoon), then `p4..` one per multiset entry.
    pub fn merge_platoon_id(&self, index: usize) -> PlatoonId {
        PlatoonId::new(format!("p{}", 4 + index))
    }

    pub fn parallel_id(&self) -> PlatoonId {
        PlatoonId::new("p1")
    }

    pub fn crossing_id(&self) -> PlatoonId {
        PlatoonId::new("p2")
    }

    pub fn long_merge_id(&self) -> PlatoonId {
        PlatoonId::new("p3")
    }
}

/// Result of reducing a multiset: either the multiset has odd total (so no
/// equal split can exist and no instance is emitted) or a ready-to-solve
/// instance with its metadata.
#[derive(Clone, Debug)]
pub enum Reduction {
    TriviallyNoPartition { sum: i64 },
    Instance { instance: Instance, meta: ReductionMeta },
}

fn mul4(t: Time) -> Result<Time, ReductionError> {
    t.checked_add(t)
        .and_then(|d| d.checked_add(d))
        .ok_or(ReductionError::Overflow)
}

/// Builds the combined-intersection instance for the multiset `x`.
///
/// With `q` the half sum and `l = x.len()`: a platoon of length `4(q+1)`
/// on lane `a` released at 0, a unit platoon on lane `b` released at `2q`,
/// a platoon of length `4(q+1)` on merge lane `m(l+1)` released at `q`,
/// and one platoon of length `x[i]` on merge lane `m(i+1)` released at `q`.
pub fn reduce_partition(x: &[i64]) -> Result<Reduction, ReductionError> {
    if x.is_empty() {
        return Err(ReductionError::EmptyInput);
    }
    let mut sum: i64 = 0;
    for &entry in x {
        if entry < 1 {
            return Err(ReductionError::NonPositiveEntry(entry));
        }
        sum = sum.checked_add(entry).ok_or(ReductionError::Overflow)?;
    }
    if sum % 2 != 0 {
        return Ok(Reduction::TriviallyNoPartition { sum });
    }

    let q = Time::new(sum / 2);
    let two_q = q.checked_add(q).ok_or(ReductionError::Overflow)?;
    let d_max = two_q.checked_add(Time::new(1)).ok_or(ReductionError::Overflow)?;
    let long_length = mul4(q.checked_add(Time::new(1)).ok_or(ReductionError::Overflow)?)?;

    let len = u32::try_from(x.len()).map_err(|_| ReductionError::Overflow)?;
    let k = len.checked_add(1).ok_or(ReductionError::Overflow)?;
    let meta = ReductionMeta {
        reduction: PartitionTag,
        x: x.to_vec(),
        q,
        d_max,
    };

    let mut platoons = vec![
        Platoon::new(meta.parallel_id(), LaneId::A, Time::ZERO, long_length),
        Platoon::new(meta.crossing_id(), LaneId::B, two_q, Time::new(1)),
        Platoon::new(meta.long_merge_id(), LaneId::Merge(k), q, long_length),
    ];
    for (i, &entry) in x.iter().enumerate() {
        platoons.push(Platoon::new(
            meta.merge_platoon_id(i),
            LaneId::Merge(i as u32 + 1),
            q,
            Time::new(entry),
        ));
    }

    let instance = Instance::with_meta(Topology::MultiCross { k }, platoons, Some(meta.clone()))?;
    Ok(Reduction::Instance { instance, meta })
}

/// The two halves of a recovered equal-sum split.
pub type Split = (Vec<i64>, Vec<i64>);

/// Splits the multiset according to a schedule: entries whose platoon
/// crosses the merge before the crossing-lane platoon `p2` go into the
/// first half. Returns `None` when the schedule's delay exceeds `d_max`,
/// in which case it certifies nothing.
///
/// The schedule must be valid for the instance; the two recovered halves
/// are guaranteed to sum to `q` each.
pub fn extract_partition(
    meta: &ReductionMeta,
    inst: &Instance,
    sched: &Schedule,
) -> Result<Option<Split>, ReductionError> {
    let expected = match reduce_partition(&meta.x)? {
        Reduction::Instance { instance, .. } => instance,
        Reduction::TriviallyNoPartition { .. } => {
            return Err(ReductionError::MetaMismatch(
                "metadata multiset has odd sum".into(),
            ))
        }
    };
    if expected.topology() != inst.topology() || expected.platoons() != inst.platoons() {
        return Err(ReductionError::MetaMismatch(
            "instance platoons differ from the reduction of the metadata multiset".into(),
        ));
    }

    let report = check_valid(inst, sched);
    let max_delay = match report.max_delay {
        Some(d) => d,
        None => {
            let first = report
                .violations
                .first()
                .map(|v| v.detail.clone())
                .unwrap_or_default();
            return Err(ReductionError::InvalidSchedule(first));
        }
    };
    if max_delay > meta.d_max {
        return Ok(None);
    }

    // Valid schedules keep every merge platoon's open interval clear of
    // p2's, so crossing strictly before/after p2 is a clean dichotomy.
    let p2_crossing = sched
        .crossing(&meta.crossing_id())
        .expect("validated schedule covers p2");
    let mut before = Vec::new();
    let mut after = Vec::new();
    for (i, &entry) in meta.x.iter().enumerate() {
        let crossing = sched
            .crossing(&meta.merge_platoon_id(i))
            .expect("validated schedule covers merge platoons");
        if crossing < p2_crossing {
            before.push(entry);
        } else {
            after.push(entry);
        }
    }

    let sum_before: i64 = before.iter().sum();
    let sum_after: i64 = after.iter().sum();
    if sum_before != sum_after {
        return Err(ReductionError::UnbalancedExtraction(sum_before, sum_after));
    }
    Ok(Some((before, after)))
}

/// True when `u` and `v` partition `x` as multisets and have equal sums.
pub fn check_partition(x: &[i64], u: &[i64], v: &[i64]) -> bool {
    let mut combined: Vec<i64> = u.iter().chain(v).copied().collect();
    let mut sorted_x = x.to_vec();
    combined.sort_unstable();
    sorted_x.sort_unstable();
    combined == sorted_x && u.iter().sum::<i64>() == v.iter().sum::<i64>()
}

/// The explicit schedule for a known split of `x`: the `before` entries
/// merge back to back from time `q`, `p2` crosses on release, `p1` follows
/// it, the remaining entries merge from `2q+1`, and `p3` goes last. Valid
/// with maximum delay exactly `d_max` whenever both halves sum to `q`.
pub fn split_schedule(meta: &ReductionMeta, before: &[usize]) -> Schedule {
    let mut sched = Schedule::new();
    let one = Time::new(1);
    let two_q = meta.q + meta.q;

    let mut cursor = meta.q;
    for &i in before {
        sched.set(meta.merge_platoon_id(i), cursor);
        cursor = cursor + Time::new(meta.x[i]);
    }

    sched.set(meta.crossing_id(), two_q);
    sched.set(meta.parallel_id(), two_q + one);

    let mut cursor = two_q + one;
    for (i, &entry) in meta.x.iter().enumerate() {
        if !before.contains(&i) {
            sched.set(meta.merge_platoon_id(i), cursor);
            cursor = cursor + Time::new(entry);
        }
    }
    sched.set(meta.long_merge_id(), cursor);
    sched
}
