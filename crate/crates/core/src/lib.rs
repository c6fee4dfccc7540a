//! Exact minimum-maximum-delay scheduling of vehicle platoons through a
//! single unregulated intersection.
//!
//! A platoon is an indivisible run of vehicles with a release time (when
//! it would reach the intersection undelayed) and a length (how long it
//! occupies the intersection). A schedule assigns each platoon a crossing
//! time; it is valid when nothing crosses before release, same-lane
//! platoons keep their order, and platoons on conflicting lanes never
//! overlap inside the intersection. The objective is the smallest possible
//! maximum delay.
//!
//! The crate provides, per intersection shape:
//!
//! - [`decide`]: bound-`d` decision procedures (greedy for the two-lane
//!   merge, dynamic programs for wider merges and for the two-way
//!   crossing), all consulting `d` only through comparison probes;
//! - [`search`]: a parametric-search optimizer that turns any such
//!   procedure into an exact minimum-delay solver;
//! - [`oracle`]: a brute-force reference solver for small instances of
//!   any shape;
//! - [`hardness`]: a reduction from equal-sum partitioning onto the
//!   combined merge-plus-crossing shape, with the reverse extraction;
//! - [`model`] / [`validate`]: the instance and schedule types, their
//!   JSON formats, a deterministic instance generator, and the validator.
//!
//! ```
//! use platoon_sched::decide::Decider;
//! use platoon_sched::model::{Instance, LaneId, Platoon, Topology};
//! use platoon_sched::search::{minimize_delay, Strategy};
//! use platoon_sched::validate::check_valid;
//!
//! let inst = Instance::new(
//!     Topology::YMerge,
//!     vec![
//!         Platoon::new("A", LaneId::Merge(1), 0, 3),
//!         Platoon::new("B", LaneId::Merge(2), 1, 2),
//!     ],
//! )
//! .unwrap();
//! let decider = Decider::auto(inst.topology()).unwrap();
//! let solved = minimize_delay(&inst, decider, Strategy::Hybrid).unwrap();
//! assert_eq!(solved.d_star.value(), 2);
//! assert!(check_valid(&inst, &solved.schedule).is_valid());
//! ```

pub mod decide;
pub mod hardness;
pub mod model;
pub mod oracle;
pub mod search;
pub mod validate;

pub use decide::{DecideError, Decider, DelayProbe, Outcome};
pub use model::{Instance, LaneId, ModelError, Platoon, PlatoonId, Schedule, Time, Topology};
pub use search::{minimize_delay, SearchError, Solved, Strategy};
pub use validate::{check_valid, ValidationReport};
