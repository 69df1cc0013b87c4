//! Closed-loop Task planning for a small wheeled robot: a hybrid automaton
//! of drive and turn Tasks, a kinematic simulator, and a planner that
//! searches over simulated Task chains.

pub mod automaton;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod planner;
pub mod sensing;
pub mod simulator;

pub use error::{Error, Result};
