//! Multi-neighborhood local search.
//!
//! The loop alternates the cheap procedures `(*,1)`, AAP and `(1,*)` until
//! they stall, falls back to `(2,*)`, and perturbs once a whole pass fails
//! to beat the best solution seen. See [`Engine`] for the individual moves.

mod aap;
mod engine;

use rand::Rng;

use crate::clock::Clock;
use crate::graph::Graph;
use crate::lp_bias::RelaxedSolution;
use crate::solution::{solutions_equivalent, Solution};

pub use engine::{Engine, MoveKind, MoveObserver, MoveOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchParams {
    /// Consecutive non-improving outer iterations before giving up.
    pub num_iterations: usize,
    /// Largest 1-tight set solved exactly in a `(1,*)` move.
    pub exact_recursion_limit: usize,
    /// Maximum number of vertices on an alternating augmenting path.
    pub aap_max_len: usize,
    /// Most negative running gain tolerated while growing a path;
    /// `None` means ten times the mean node weight, negated.
    pub aap_gain_floor: Option<f64>,
    /// Half-width of the uniform noise added to path-extension scores.
    pub aap_delta: f64,
    /// Nodes forced into the solution per perturbation.
    pub perturb_count: usize,
}

impl Default for LocalSearchParams {
    fn default() -> Self {
        LocalSearchParams {
            num_iterations: 64,
            exact_recursion_limit: 7,
            aap_max_len: 32,
            aap_gain_floor: None,
            aap_delta: 50.0,
            perturb_count: 1,
        }
    }
}

impl LocalSearchParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.num_iterations == 0 || self.aap_max_len == 0 || self.perturb_count == 0 {
            return Err("iteration, path-length and perturbation counts must be at least 1".into());
        }
        if self.exact_recursion_limit == 0 || self.exact_recursion_limit > crate::oracle::MAX_SUBSET_SIZE {
            return Err(format!(
                "exact recursion limit must be in 1..={}",
                crate::oracle::MAX_SUBSET_SIZE
            ));
        }
        if !(self.aap_delta >= 0.0 && self.aap_delta.is_finite()) {
            return Err("AAP noise must be finite and non-negative".into());
        }
        if let Some(floor) = self.aap_gain_floor {
            if !floor.is_finite() {
                return Err("AAP gain floor must be finite".into());
            }
        }
        Ok(())
    }

    pub fn gain_floor(&self, g: &Graph) -> f64 {
        self.aap_gain_floor.unwrap_or(-10.0 * g.mean_weight())
    }
}

/// Optional run-time context for [`Engine::run`].
#[derive(Default)]
pub struct SearchControl<'a> {
    /// Clock checked between procedures; work is charged to it.
    pub clock: Option<&'a mut Clock>,
    pub deadline: Option<f64>,
    /// Stop early once the search reaches a solution equivalent to this one.
    pub reference: Option<&'a Solution>,
    pub bias: Option<&'a RelaxedSolution>,
}

impl SearchControl<'_> {
    fn tick(&mut self, work: u64) -> bool {
        match self.clock.as_deref_mut() {
            Some(clock) => {
                clock.charge(work);
                clock.expired(self.deadline)
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalSearchOutcome {
    pub best: Solution,
    pub outer_iterations: usize,
    pub moves: u64,
    pub timed_out: bool,
    pub matched_reference: bool,
}

impl Engine<'_, '_> {
    /// The outer loop. Maximalizes the current solution first and returns
    /// the best solution seen; the engine is left at its last state.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, ctl: &mut SearchControl<'_>) -> LocalSearchOutcome {
        self.maximalize(rng);
        let mut best = self.snapshot();
        let mut i = 1;
        let mut outer = 0;
        let mut timed_out = false;
        let mut matched_reference = false;

        'outer: while i <= self.params().num_iterations {
            outer += 1;
            loop {
                let mut improved = self.star_one_moves(rng);
                if ctl.tick(self.take_work()) {
                    timed_out = true;
                    break 'outer;
                }
                improved |= self.aap_moves(rng);
                if ctl.tick(self.take_work()) {
                    timed_out = true;
                    break 'outer;
                }
                improved |= self.one_star_moves(rng);
                if ctl.tick(self.take_work()) {
                    timed_out = true;
                    break 'outer;
                }
                if improved {
                    continue;
                }
                let improved = self.two_star_moves(rng);
                if ctl.tick(self.take_work()) {
                    timed_out = true;
                    break 'outer;
                }
                if !improved {
                    break;
                }
            }

            let improved_best = self.solution().weight() > best.weight() && {
                let w = self.refresh_weight();
                w > best.weight()
            };
            if improved_best {
                best = self.snapshot();
                i = 1;
            }
            if let Some(reference) = ctl.reference {
                if self.solution().weight() == reference.weight()
                    && solutions_equivalent(self.graph(), self.solution(), reference, None)
                {
                    matched_reference = true;
                    break;
                }
            }
            if !improved_best {
                i += 1;
                if i > self.params().num_iterations {
                    break;
                }
                self.perturb(rng, ctl.bias);
                if ctl.tick(self.take_work()) {
                    timed_out = true;
                    break;
                }
            }
        }

        // a pass cut short by the clock may have improved the current state
        if self.solution().weight() > best.weight() && self.refresh_weight() > best.weight() {
            best = self.snapshot();
        }
        LocalSearchOutcome {
            best,
            outer_iterations: outer,
            moves: self.moves(),
            timed_out,
            matched_reference,
        }
    }

    fn snapshot(&mut self) -> Solution {
        self.refresh_weight();
        self.solution().clone()
    }
}

/// Runs local search from `s0` without a clock or reference solution.
///
/// Panics if `s0` is not independent.
pub fn local_search<R: Rng + ?Sized>(
    g: &Graph,
    s0: Solution,
    params: &LocalSearchParams,
    rng: &mut R,
    bias: Option<&RelaxedSolution>,
) -> Solution {
    let mut engine = Engine::new(g, s0, params.clone()).expect("initial solution must be independent");
    let mut ctl = SearchControl {
        bias,
        ..SearchControl::default()
    };
    engine.run(rng, &mut ctl).best
}
