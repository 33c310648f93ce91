use std::fmt;

use serde::{Deserialize, Serialize};

pub const DAYS_PER_MONTH: u32 = 30;
pub const DAYS_PER_YEAR: u32 = 360;

/// Simulation clock value, counted in whole days from the start of a run.
///
/// The calendar is regular: every month has 30 days and every year 360, so
/// month and year boundaries land on exact multiples of the day count.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(u32);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_day(day: u32) -> Self {
        SimTime(day)
    }

    pub const fn from_years(years: u32) -> Self {
        SimTime(years * DAYS_PER_YEAR)
    }

    pub const fn day(self) -> u32 {
        self.0
    }

    /// Completed months since the start (`day / 30`).
    pub const fn month(self) -> u32 {
        self.0 / DAYS_PER_MONTH
    }

    /// Completed years since the start (`day / 360`).
    pub const fn year(self) -> u32 {
        self.0 / DAYS_PER_YEAR
    }

    pub const fn plus_days(self, days: u32) -> Self {
        SimTime(self.0 + days)
    }

    /// First day of the next calendar year strictly after `self`.
    pub const fn next_year_boundary(self) -> Self {
        SimTime((self.0 / DAYS_PER_YEAR + 1) * DAYS_PER_YEAR)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "day {}", self.0)
    }
}

/// Calendar tick emitted by the timer on a given day.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tick {
    Day,
    Month,
    Year,
}

/// Ticks that fire on `time`, in dispatch order.
///
/// Every day fires `Day`; every 30th day after the start adds `Month` and
/// every 360th adds `Year`. Day 0 is the start of the run and only fires `Day`.
pub fn ticks_for(time: SimTime) -> Vec<Tick> {
    let day = time.day();
    let mut ticks = vec![Tick::Day];
    if day > 0 && day % DAYS_PER_MONTH == 0 {
        ticks.push(Tick::Month);
    }
    if day > 0 && day % DAYS_PER_YEAR == 0 {
        ticks.push(Tick::Year);
    }
    ticks
}
