//! Lifts any comparison-only decision procedure into a minimum-delay
//! solver.
//!
//! The decider is run once as if it had been given the unknown optimal
//! delay. An open interval bracketing that optimum shrinks as comparisons
//! arrive: a comparison value outside the interval is answered directly,
//! one inside triggers probe runs of the decider at concrete test values.
//! When the at-most and strictly-below runs at a test value disagree, that
//! value *is* the optimum and the probe run's schedule is the witness.

use thiserror::Error;

use crate::decide::{
    ConcreteProbe, DecideError, Decider, DelayProbe, Outcome, ProbeFault, StrictProbe,
};
use crate::model::{Instance, Schedule, Time};
use crate::validate::max_delay;

/// How test values are chosen when a comparison value lands inside the
/// bracketing interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// A midpoint probe first, then the comparison value itself if it is
    /// still inside. Refines in O(log L) steps and still pins every
    /// comparison exactly.
    Hybrid,
    /// Midpoint probes only, narrowing to a single candidate before
    /// probing it. Pure binary search on the delay.
    Bisect,
    /// Probes only the comparison values the decider produces. No
    /// dependence on the magnitude of L.
    Comparison,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("decision procedure broke the monotone comparison contract: {0}")]
    ContractViolation(String),
}

/// Accounting for one solve.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    /// Total decider runs (at-most plus strictly-below probes, and the
    /// certificate checks of the fallback path).
    pub decide_calls: usize,
    /// Interval refinements performed.
    pub refinements: usize,
    /// Whether the optimum was read off the simulated run instead of a
    /// halting probe.
    pub used_fallback: bool,
}

/// A minimum delay with a witness schedule attaining it.
#[derive(Clone, Debug)]
pub struct Solved {
    pub d_star: Time,
    pub schedule: Schedule,
    pub stats: SearchStats,
}

/// Runs the decider with the concrete bound `d`.
pub fn decide_at(inst: &Instance, decider: Decider, d: Time) -> Result<Outcome, DecideError> {
    decider.decide(inst, &mut ConcreteProbe::new(d))
}

/// Runs the decider as if the bound were just below `d`: feasible exactly
/// when a valid schedule with delay strictly less than `d` exists.
pub fn decide_strictly_below(
    inst: &Instance,
    decider: Decider,
    d: Time,
) -> Result<Outcome, DecideError> {
    decider.decide(inst, &mut StrictProbe::new(d))
}

struct Simulation<'a> {
    inst: &'a Instance,
    decider: Decider,
    strategy: Strategy,
    /// Open interval (lo, hi) bracketing the optimum.
    lo: Time,
    hi: Time,
    halted: Option<(Time, Schedule)>,
    fault: Option<SearchError>,
    stats: SearchStats,
}

impl Simulation<'_> {
    fn single_candidate(&self) -> Option<Time> {
        (self.hi - self.lo == Time::new(2)).then(|| self.lo + Time::new(1))
    }

    fn midpoint(&self) -> Time {
        let half = Time::new((self.hi - self.lo).value() / 2);
        self.lo + half
    }

    /// Probes the decider at `t`, shrinking the interval or halting with
    /// the optimum when the at-most and strictly-below runs disagree.
    fn refine(&mut self, t: Time) -> Result<(), SearchError> {
        debug_assert!(self.lo < t && t < self.hi);
        self.stats.refinements += 1;
        self.stats.decide_calls += 1;
        match decide_at(self.inst, self.decider, t)? {
            Outcome::Infeasible => self.lo = t,
            Outcome::Feasible(schedule) => {
                self.stats.decide_calls += 1;
                match decide_strictly_below(self.inst, self.decider, t)? {
                    Outcome::Feasible(_) => self.hi = t,
                    Outcome::Infeasible => {
                        self.halted = Some((t, schedule));
                        return Ok(());
                    }
                }
            }
        }
        if self.hi - self.lo < Time::new(2) {
            return Err(SearchError::ContractViolation(format!(
                "interval ({}, {}) is empty after refining at {t}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn answer(&mut self, c: Time) -> Result<bool, SearchError> {
        loop {
            if let Some((d_star, _)) = &self.halted {
                return Ok(c <= *d_star);
            }
            if let Some(d_star) = self.single_candidate() {
                // Only one integer remains in the interval, so the
                // optimum is known; no further decider runs are needed.
                return Ok(c <= d_star);
            }
            if c <= self.lo {
                return Ok(true);
            }
            if c >= self.hi {
                return Ok(false);
            }
            match self.strategy {
                Strategy::Hybrid => {
                    let mid = self.midpoint();
                    self.refine(mid)?;
                    let unresolved = self.halted.is_none()
                        && self.single_candidate().is_none()
                        && c > self.lo
                        && c < self.hi;
                    if unresolved {
                        self.refine(c)?;
                    }
                }
                Strategy::Bisect => {
                    while self.halted.is_none() && self.hi - self.lo > Time::new(2) {
                        let mid = self.midpoint();
                        self.refine(mid)?;
                    }
                    if self.halted.is_none() {
                        let only = self.single_candidate().expect("interval narrowed");
                        // At the sole candidate the two runs must
                        // disagree; refine() errors out otherwise.
                        self.refine(only)?;
                    }
                }
                Strategy::Comparison => self.refine(c)?,
            }
        }
    }
}

impl DelayProbe for Simulation<'_> {
    fn at_most(&mut self, c: Time) -> Result<bool, ProbeFault> {
        self.answer(c).map_err(|err| {
            let fault = ProbeFault(err.to_string());
            self.fault = Some(err);
            fault
        })
    }
}

/// Computes the minimum delay `d*` for which the decider is feasible,
/// along with a witness schedule of exactly that delay.
pub fn minimize_delay(
    inst: &Instance,
    decider: Decider,
    strategy: Strategy,
) -> Result<Solved, SearchError> {
    let length = inst.schedule_length();
    let mut sim = Simulation {
        inst,
        decider,
        strategy,
        lo: Time::new(-1),
        hi: length + Time::new(1),
        halted: None,
        fault: None,
        stats: SearchStats::default(),
    };

    let outcome = match decider.decide(inst, &mut sim) {
        Ok(outcome) => outcome,
        Err(DecideError::Probe(_)) if sim.fault.is_some() => {
            return Err(sim.fault.take().expect("checked"))
        }
        Err(err) => return Err(err.into()),
    };

    let mut stats = sim.stats;
    if let Some((d_star, schedule)) = sim.halted {
        return Ok(Solved {
            d_star,
            schedule,
            stats,
        });
    }

    // The simulated run finished without ever probing the optimum
    // exactly; since it answered every comparison consistently with the
    // optimum, its own schedule attains it. Certify rather than assume.
    stats.used_fallback = true;
    let schedule = match outcome {
        Outcome::Feasible(schedule) => schedule,
        Outcome::Infeasible => {
            return Err(SearchError::ContractViolation(
                "simulated run at the optimum claims infeasibility".into(),
            ))
        }
    };
    let d_star = max_delay(inst, &schedule).map_err(|err| {
        SearchError::ContractViolation(format!("simulated run returned a partial schedule: {err}"))
    })?;

    stats.decide_calls += 1;
    if !decide_at(inst, decider, d_star)?.is_feasible() {
        return Err(SearchError::ContractViolation(format!(
            "claimed optimum {d_star} is not feasible"
        )));
    }
    if d_star > Time::ZERO {
        stats.decide_calls += 1;
        if decide_at(inst, decider, d_star - Time::new(1))?.is_feasible() {
            return Err(SearchError::ContractViolation(format!(
                "delay {} below the claimed optimum is still feasible",
                d_star - Time::new(1)
            )));
        }
    }
    Ok(Solved {
        d_star,
        schedule,
        stats,
    })
}
