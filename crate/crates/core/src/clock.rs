//! Injected time source.

/// Monotonic clock reading in seconds from an arbitrary epoch.
pub trait Stopwatch {
    fn now(&self) -> f64;
}

/// A clock frozen at zero. Budgets never expire under it, which makes
/// time-bounded loops fall back to their iteration caps.
#[derive(Debug, Default, Clone, Copy)]
pub struct FrozenClock;

impl Stopwatch for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }
}
