//! Per-thread tally of elementary planning work (ray steps, graph relaxations).
//!
//! Missions run single-threaded, so the tally of the current thread between two
//! [`take`] calls is a deterministic measure of the work done in between.

use std::cell::Cell;

thread_local! {
    static UNITS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn add(units: u64) {
    UNITS.with(|u| u.set(u.get().wrapping_add(units)));
}

/// Returns the units accumulated since the previous call and resets the tally.
pub fn take() -> u64 {
    UNITS.with(|u| u.replace(0))
}
