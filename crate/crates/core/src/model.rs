//! Core domain types: times, lanes, intersection topologies, platoons,
//! instances, and schedules, plus JSON (de)serialization and random
//! instance generation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardness::ReductionMeta;

/// Instances whose schedule length exceeds this bound are rejected so that
/// every intermediate quantity the solvers compute (at most a small multiple
/// of `L`) stays representable in an `i64`.
pub const MAX_SCHEDULE_LENGTH: i64 = i64::MAX / 8;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("topology kind `{0}` requires a lane count k")]
    MissingK(&'static str),
    #[error("topology kind `{0}` does not take a lane count k")]
    UnexpectedK(&'static str),
    #[error("lane count k must be at least 1")]
    ZeroK,
    #[error("lane `{lane}` is not declared by the {topology} topology")]
    UndeclaredLane { lane: LaneId, topology: String },
    #[error("duplicate platoon id `{0}`")]
    DuplicateId(PlatoonId),
    #[error("platoon `{0}` has non-positive length {1}")]
    NonPositiveLength(PlatoonId, Time),
    #[error("platoon `{0}` has negative release time {1}")]
    NegativeRelease(PlatoonId, Time),
    #[error("platoons `{0}` and `{1}` overlap on lane `{2}` before any delay")]
    ReleaseOverlap(PlatoonId, PlatoonId, LaneId),
    #[error("time arithmetic overflow while sizing the instance")]
    TimeOverflow,
    #[error("generator requires max_length >= 1, got {0}")]
    BadMaxLength(Time),
    #[error("generator requires max_release >= 0, got {0}")]
    BadMaxRelease(Time),
}

/// An exact point or span of scheduling time, in integer ticks.
///
/// Arithmetic never wraps: overflow panics, and the instance constructors
/// bound `L` by [`MAX_SCHEDULE_LENGTH`] so solver-internal arithmetic stays
/// far away from that panic.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Time(i64);

impl Time {
    pub const ZERO: Time = Time(0);

    pub const fn new(ticks: i64) -> Time {
        Time(ticks)
    }

    pub const fn value(self) -> i64 {
        self.0
    }

    pub fn checked_add(self, rhs: Time) -> Option<Time> {
        self.0.checked_add(rhs.0).map(Time)
    }

    pub fn checked_sub(self, rhs: Time) -> Option<Time> {
        self.0.checked_sub(rhs.0).map(Time)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        self.checked_add(rhs).expect("time arithmetic overflow")
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        self.checked_sub(rhs).expect("time arithmetic overflow")
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Time {
    fn from(ticks: i64) -> Time {
        Time(ticks)
    }
}

/// An incoming lane. Merge lanes are numbered from 1 (`m1`, `m2`, ...);
/// the crossing uses `h1`/`h2`/`v1`/`v2`; the combined intersection adds
/// the parallel lane `a` and the crossing lane `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LaneId {
    Merge(u32),
    H1,
    H2,
    V1,
    V2,
    A,
    B,
}

impl LaneId {
    pub fn merge(index: u32) -> LaneId {
        assert!(index >= 1, "merge lanes are numbered from 1");
        LaneId::Merge(index)
    }
}

impl fmt::Display for LaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LaneId::Merge(i) => write!(f, "m{i}"),
            LaneId::H1 => write!(f, "h1"),
            LaneId::H2 => write!(f, "h2"),
            LaneId::V1 => write!(f, "v1"),
            LaneId::V2 => write!(f, "v2"),
            LaneId::A => write!(f, "a"),
            LaneId::B => write!(f, "b"),
        }
    }
}

impl FromStr for LaneId {
    type Err = String;

    fn from_str(s: &str) -> Result<LaneId, String> {
        match s {
            "h1" => Ok(LaneId::H1),
            "h2" => Ok(LaneId::H2),
            "v1" => Ok(LaneId::V1),
            "v2" => Ok(LaneId::V2),
            "a" => Ok(LaneId::A),
            "b" => Ok(LaneId::B),
            _ => {
                let index = s
                    .strip_prefix('m')
                    .and_then(|rest| rest.parse::<u32>().ok())
                    .filter(|&i| i >= 1);
                match index {
                    Some(i) => Ok(LaneId::Merge(i)),
                    None => Err(format!("unknown lane name `{s}`")),
                }
            }
        }
    }
}

impl Serialize for LaneId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LaneId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<LaneId, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The shape of the intersection, without lane-count data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopologyKind {
    YMerge,
    KMerge,
    TwoWayCrossing,
    MultiCross,
}

impl TopologyKind {
    pub const fn name(self) -> &'static str {
        match self {
            TopologyKind::YMerge => "y-merge",
            TopologyKind::KMerge => "k-merge",
            TopologyKind::TwoWayCrossing => "two-way-crossing",
            TopologyKind::MultiCross => "multi-cross",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<TopologyKind, String> {
        match s {
            "y-merge" => Ok(TopologyKind::YMerge),
            "k-merge" => Ok(TopologyKind::KMerge),
            "two-way-crossing" => Ok(TopologyKind::TwoWayCrossing),
            "multi-cross" => Ok(TopologyKind::MultiCross),
            _ => Err(format!("unknown topology kind `{s}`")),
        }
    }
}

/// A named intersection shape. The shape fixes the lane set and the
/// symmetric, irreflexive conflict relation between lanes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub enum Topology {
    /// Two incoming lanes `m1`, `m2` merging into one outgoing lane.
    YMerge,
    /// `k` incoming lanes `m1..mk` merging into one outgoing lane.
    KMerge { k: u32 },
    /// Two two-way roads crossing: lanes `h1`, `h2` versus `v1`, `v2`.
    TwoWayCrossing,
    /// A `k`-way merge `m1..mk`, a parallel lane `a`, and a lane `b`
    /// crossing both.
    MultiCross { k: u32 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
}

impl TryFrom<TopologyRepr> for Topology {
    type Error = ModelError;

    fn try_from(repr: TopologyRepr) -> Result<Topology, ModelError> {
        let kind: TopologyKind = repr
            .kind
            .parse()
            .map_err(serde::de::Error::custom)
            .map_err(ModelError::Parse)?;
        Topology::new(kind, repr.k)
    }
}

impl From<Topology> for TopologyRepr {
    fn from(t: Topology) -> TopologyRepr {
        let k = match t {
            Topology::KMerge { k } | Topology::MultiCross { k } => Some(k),
            _ => None,
        };
        TopologyRepr {
            kind: t.kind().name().to_owned(),
            k,
        }
    }
}

impl Topology {
    /// Builds a topology from its kind, requiring `k` exactly for the kinds
    /// that are parameterized by a merge-lane count.
    pub fn new(kind: TopologyKind, k: Option<u32>) -> Result<Topology, ModelError> {
        match (kind, k) {
            (TopologyKind::YMerge, None) => Ok(Topology::YMerge),
            (TopologyKind::TwoWayCrossing, None) => Ok(Topology::TwoWayCrossing),
            (TopologyKind::KMerge, Some(0)) | (TopologyKind::MultiCross, Some(0)) => {
                Err(ModelError::ZeroK)
            }
            (TopologyKind::KMerge, Some(k)) => Ok(Topology::KMerge { k }),
            (TopologyKind::MultiCross, Some(k)) => Ok(Topology::MultiCross { k }),
            (TopologyKind::KMerge, None) => Err(ModelError::MissingK("k-merge")),
            (TopologyKind::MultiCross, None) => Err(ModelError::MissingK("multi-cross")),
            (TopologyKind::YMerge, Some(_)) => Err(ModelError::UnexpectedK("y-merge")),
            (TopologyKind::TwoWayCrossing, Some(_)) => {
                Err(ModelError::UnexpectedK("two-way-crossing"))
            }
        }
    }

    pub fn kind(&self) -> TopologyKind {
        match self {
            Topology::YMerge => TopologyKind::YMerge,
            Topology::KMerge { .. } => TopologyKind::KMerge,
            Topology::TwoWayCrossing => TopologyKind::TwoWayCrossing,
            Topology::MultiCross { .. } => TopologyKind::MultiCross,
        }
    }

    /// The declared lanes, in canonical order.
    pub fn lanes(&self) -> Vec<LaneId> {
        match *self {
            Topology::YMerge => vec![LaneId::Merge(1), LaneId::Merge(2)],
            Topology::KMerge { k } => (1..=k).map(LaneId::Merge).collect(),
            Topology::TwoWayCrossing => vec![LaneId::H1, LaneId::H2, LaneId::V1, LaneId::V2],
            Topology::MultiCross { k } => {
                let mut lanes: Vec<LaneId> = (1..=k).map(LaneId::Merge).collect();
                lanes.push(LaneId::A);
                lanes.push(LaneId::B);
                lanes
            }
        }
    }

    pub fn declares(&self, lane: &LaneId) -> bool {
        match (self, lane) {
            (Topology::YMerge, LaneId::Merge(i)) => (1..=2).contains(i),
            (Topology::KMerge { k }, LaneId::Merge(i)) => (1..=*k).contains(i),
            (
                Topology::TwoWayCrossing,
                LaneId::H1 | LaneId::H2 | LaneId::V1 | LaneId::V2,
            ) => true,
            (Topology::MultiCross { k }, LaneId::Merge(i)) => (1..=*k).contains(i),
            (Topology::MultiCross { .. }, LaneId::A | LaneId::B) => true,
            _ => false,
        }
    }

    /// Whether platoons on `x` and `y` may not occupy the intersection at
    /// the same time. Errors if either lane is not declared.
    pub fn conflicts(&self, x: &LaneId, y: &LaneId) -> Result<bool, ModelError> {
        for lane in [x, y] {
            if !self.declares(lane) {
                return Err(ModelError::UndeclaredLane {
                    lane: *lane,
                    topology: self.kind().to_string(),
                });
            }
        }
        Ok(self.conflict_unchecked(x, y))
    }

    /// The raw conflict relation, without the lane-declaration check.
    pub(crate) fn conflict_unchecked(&self, x: &LaneId, y: &LaneId) -> bool {
        if x == y {
            return false;
        }
        match self {
            Topology::YMerge | Topology::KMerge { .. } => {
                matches!((x, y), (LaneId::Merge(_), LaneId::Merge(_)))
            }
            Topology::TwoWayCrossing => {
                let horizontal = |l: &LaneId| matches!(l, LaneId::H1 | LaneId::H2);
                let vertical = |l: &LaneId| matches!(l, LaneId::V1 | LaneId::V2);
                (horizontal(x) && vertical(y)) || (vertical(x) && horizontal(y))
            }
            Topology::MultiCross { .. } => match (x, y) {
                (LaneId::Merge(_), LaneId::Merge(_)) => true,
                (LaneId::B, _) | (_, LaneId::B) => true,
                // `a` runs parallel to the merge; only `b` cuts across it.
                _ => false,
            },
        }
    }
}

/// Identity of one platoon within an instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlatoonId(String);

impl PlatoonId {
    pub fn new(id: impl Into<String>) -> PlatoonId {
        PlatoonId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlatoonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PlatoonId {
    fn from(s: &str) -> PlatoonId {
        PlatoonId(s.to_owned())
    }
}

impl From<String> for PlatoonId {
    fn from(s: String) -> PlatoonId {
        PlatoonId(s)
    }
}

/// One indivisible traffic unit: if undelayed, it occupies the intersection
/// over `[release, release + length)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Platoon {
    pub id: PlatoonId,
    pub lane: LaneId,
    pub release: Time,
    pub length: Time,
}

impl Platoon {
    pub fn new(
        id: impl Into<PlatoonId>,
        lane: LaneId,
        release: impl Into<Time>,
        length: impl Into<Time>,
    ) -> Platoon {
        Platoon {
            id: id.into(),
            lane,
            release: release.into(),
            length: length.into(),
        }
    }

    /// When the platoon would finish crossing if never delayed.
    pub fn undelayed_finish(&self) -> Time {
        self.release + self.length
    }
}

/// A full scheduling problem: a topology plus the platoons to route
/// through it. Construction validates every instance invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    topology: Topology,
    platoons: Vec<Platoon>,
    meta: Option<ReductionMeta>,
    schedule_length: Time,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    topology: Topology,
    platoons: Vec<Platoon>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<ReductionMeta>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = ModelError;

    fn try_from(repr: InstanceRepr) -> Result<Instance, ModelError> {
        Instance::with_meta(repr.topology, repr.platoons, repr.meta)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> InstanceRepr {
        InstanceRepr {
            topology: inst.topology,
            platoons: inst.platoons,
            meta: inst.meta,
        }
    }
}

impl Instance {
    pub fn new(topology: Topology, platoons: Vec<Platoon>) -> Result<Instance, ModelError> {
        Instance::with_meta(topology, platoons, None)
    }

    pub fn with_meta(
        topology: Topology,
        platoons: Vec<Platoon>,
        meta: Option<ReductionMeta>,
    ) -> Result<Instance, ModelError> {
        let mut seen = BTreeSet::new();
        for p in &platoons {
            if !topology.declares(&p.lane) {
                return Err(ModelError::UndeclaredLane {
                    lane: p.lane,
                    topology: topology.kind().to_string(),
                });
            }
            if !seen.insert(p.id.clone()) {
                return Err(ModelError::DuplicateId(p.id.clone()));
            }
            if p.length < Time::new(1) {
                return Err(ModelError::NonPositiveLength(p.id.clone(), p.length));
            }
            if p.release < Time::ZERO {
                return Err(ModelError::NegativeRelease(p.id.clone(), p.release));
            }
        }

        // Disjoint undelayed occupancy per lane.
        let mut by_lane: HashMap<LaneId, Vec<&Platoon>> = HashMap::new();
        for p in &platoons {
            by_lane.entry(p.lane).or_default().push(p);
        }
        for seq in by_lane.values_mut() {
            seq.sort_by_key(|p| p.release);
            for pair in seq.windows(2) {
                if pair[1].release < pair[0].undelayed_finish() {
                    return Err(ModelError::ReleaseOverlap(
                        pair[0].id.clone(),
                        pair[1].id.clone(),
                        pair[0].lane,
                    ));
                }
            }
        }

        let schedule_length = checked_schedule_length(&platoons)?;
        Ok(Instance {
            topology,
            platoons,
            meta,
            schedule_length,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn platoons(&self) -> &[Platoon] {
        &self.platoons
    }

    pub fn meta(&self) -> Option<&ReductionMeta> {
        self.meta.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.platoons.is_empty()
    }

    pub fn platoon(&self, id: &PlatoonId) -> Option<&Platoon> {
        self.platoons.iter().find(|p| &p.id == id)
    }

    /// The schedule length `L`: maximum release time plus the sum of all
    /// platoon lengths, an upper bound on the optimal delay. Zero for the
    /// empty instance.
    pub fn schedule_length(&self) -> Time {
        self.schedule_length
    }

    /// Platoons on `lane`, sorted by ascending release time. The order is
    /// strict thanks to the disjointness invariant.
    pub fn lane_sequence(&self, lane: &LaneId) -> Vec<&Platoon> {
        let mut seq: Vec<&Platoon> = self.platoons.iter().filter(|p| &p.lane == lane).collect();
        seq.sort_by_key(|p| p.release);
        seq
    }

    /// One sequence per declared lane, aligned with `topology().lanes()`.
    pub fn lane_sequences(&self) -> Vec<Vec<&Platoon>> {
        self.topology
            .lanes()
            .iter()
            .map(|lane| self.lane_sequence(lane))
            .collect()
    }

    pub fn earliest_release(&self) -> Time {
        self.platoons
            .iter()
            .map(|p| p.release)
            .min()
            .unwrap_or(Time::ZERO)
    }

    /// Parses and fully validates an instance from its JSON file format.
    pub fn from_json(bytes: &[u8]) -> Result<Instance, ModelError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    /// Serializes to the canonical JSON file format. `from_json` of the
    /// output reproduces the instance exactly.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("instance serialization");
        out.push(b'\n');
        out
    }
}

fn checked_schedule_length(platoons: &[Platoon]) -> Result<Time, ModelError> {
    let max_release = platoons
        .iter()
        .map(|p| p.release)
        .max()
        .unwrap_or(Time::ZERO);
    let mut total = max_release;
    for p in platoons {
        total = total.checked_add(p.length).ok_or(ModelError::TimeOverflow)?;
    }
    if total.value() > MAX_SCHEDULE_LENGTH {
        return Err(ModelError::TimeOverflow);
    }
    Ok(total)
}

/// A (candidate) schedule: the time each platoon begins crossing. Whether
/// it is valid for a given instance is the validator's business.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub crossing_times: BTreeMap<PlatoonId, Time>,
}

impl Schedule {
    pub fn new() -> Schedule {
        Schedule::default()
    }

    pub fn set(&mut self, id: PlatoonId, crossing: Time) {
        self.crossing_times.insert(id, crossing);
    }

    pub fn crossing(&self, id: &PlatoonId) -> Option<Time> {
        self.crossing_times.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.crossing_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossing_times.is_empty()
    }

    pub fn from_json(bytes: &[u8]) -> Result<Schedule, ModelError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("schedule serialization");
        out.push(b'\n');
        out
    }
}

/// Deterministically generates a random instance: each platoon gets a
/// uniform lane and a uniform length in `[1, max_length]`; per lane, raw
/// release draws from `[0, max_release]` are packed left to right (shifted
/// right just enough) so undelayed occupancies stay disjoint.
pub fn generate_instance(
    topology: &Topology,
    n: u32,
    seed: u64,
    max_release: Time,
    max_length: Time,
) -> Result<Instance, ModelError> {
    if max_length < Time::new(1) {
        return Err(ModelError::BadMaxLength(max_length));
    }
    if max_release < Time::ZERO {
        return Err(ModelError::BadMaxRelease(max_release));
    }

    let lanes = topology.lanes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n as usize);
    for i in 0..n {
        let lane = lanes[rng.gen_range(0..lanes.len())];
        let length = rng.gen_range(1..=max_length.value());
        let raw_release = rng.gen_range(0..=max_release.value());
        draws.push((
            PlatoonId::new(format!("p{}", i + 1)),
            lane,
            raw_release,
            length,
        ));
    }

    let mut platoons: Vec<Option<Platoon>> = vec![None; n as usize];
    for lane in &lanes {
        let mut on_lane: Vec<usize> = (0..draws.len()).filter(|&i| draws[i].1 == *lane).collect();
        on_lane.sort_by_key(|&i| draws[i].2); // stable: ties keep draw order
        let mut cursor = Time::ZERO;
        for i in on_lane {
            let (id, lane, raw, length) = &draws[i];
            let release = Time::new(*raw).max(cursor);
            cursor = release + Time::new(*length);
            platoons[i] = Some(Platoon::new(id.clone(), *lane, release, *length));
        }
    }

    Instance::new(
        topology.clone(),
        platoons.into_iter().map(|p| p.expect("assigned")).collect(),
    )
}
