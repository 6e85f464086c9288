//! Time sources for stopping rules and trace timestamps.
//!
//! `Wall` measures real elapsed time. `Work` counts abstract work units
//! charged by the solver and converts them at a fixed rate, which makes
//! time-limited runs and their traces reproducible bit for bit.

use std::time::Instant;

/// Default conversion rate for the work clock, in units per second.
pub const DEFAULT_WORK_RATE: f64 = 5.0e7;

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum ClockMode {
    #[default]
    Wall,
    Work { units_per_second: f64 },
}


#[derive(Debug, Clone)]
pub enum Clock {
    Wall(Instant),
    Work { units: u64, units_per_second: f64 },
}

impl Clock {
    pub fn start(mode: ClockMode) -> Self {
        match mode {
            ClockMode::Wall => Clock::Wall(Instant::now()),
            ClockMode::Work { units_per_second } => Clock::Work {
                units: 0,
                units_per_second,
            },
        }
    }

    pub fn wall() -> Self {
        Clock::start(ClockMode::Wall)
    }

    pub fn elapsed(&self) -> f64 {
        match self {
            Clock::Wall(start) => start.elapsed().as_secs_f64(),
            Clock::Work {
                units,
                units_per_second,
            } => *units as f64 / units_per_second,
        }
    }

    /// Records `units` of work; a no-op for the wall clock.
    pub fn charge(&mut self, amount: u64) {
        if let Clock::Work { units, .. } = self {
            *units += amount;
        }
    }

    pub fn expired(&self, limit: Option<f64>) -> bool {
        limit.is_some_and(|t| self.elapsed() >= t)
    }
}
