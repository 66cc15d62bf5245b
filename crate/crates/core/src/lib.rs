//! Receiver tuning-plan construction for passive surveillance systems.
//!
//! A passive surveillance system has a handful of sensor nodes, each with a
//! few tunable receivers. Every time step a receiver observes one
//! multiple-interval of frequencies. Tracks (emitting objects) and surveys
//! (frequency bands to search) demand to be observed at given rates, and the
//! scheduler emits one tuning plan per cycle.
//!
//! The crate is `no_std` (with `alloc`) and contains the whole algorithmic
//! core:
//!
//! * [`interval`] - single-intervals, multiple-intervals and shapes.
//! * [`model`] - tasks, configurations, tuning plans and observation rules.
//! * [`evaluate`] - the exact objective over a sequence of plans.
//! * [`preprocess`] - survey splitting and configuration construction.
//! * [`rates`] - the goal-insertion-rate LP and the discounted history.
//! * [`planner`] - lexicographic-queue plan construction.
//! * [`strategy`] - ResourceTune plus the time-balance greedy and GA baselines.
//! * [`scenario`] - seeded random instances at a target utilization.
//!
//! Wall-clock time is injected through [`clock::Stopwatch`] and the LP
//! backend through [`rates::CoveringSolver`], so the std-only pieces live in
//! the companion harness crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clock;
pub mod error;
pub mod evaluate;
pub mod interval;
pub mod model;
pub mod planner;
pub mod preprocess;
pub mod rates;
pub mod scenario;
pub mod strategy;

pub use error::{Error, Result};
pub use interval::{MultipleInterval, Shape, SingleInterval};
pub use model::{
    Configuration, ConfigId, Emitter, Instance, Position, ShapeSet, SubSurvey, Survey, SurveyId,
    SystemSpec, Track, TrackId, TuningPlan, Weight,
};
