//! The configurator: builds a cognitive map of simulated Tasks by best-first
//! search and reads a plan off it.

mod cost;
mod reactive;
mod reset;
mod split;
mod synthesis;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automaton::{ContinuousState, ControlMode};
use crate::error::{Error, Result};
use crate::geometry::{to_fixed_frame, Disturbance, DisturbanceKind, Pose2};

pub use cost::{chi, gamma, shift, KAPPA};
pub use reactive::reactive_step;
pub use reset::{reset_basic, reset_window};
pub use split::split;
pub use synthesis::{extract_plan, synthesize, GOAL_RADIUS, STATE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    Reactive,
    Vanilla,
    StepWise,
    SplitOnly,
    SplitWindow,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Reactive,
        StrategyKind::Vanilla,
        StrategyKind::StepWise,
        StrategyKind::SplitOnly,
        StrategyKind::SplitWindow,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("strategy index {i} out of range 0..4")))
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.index())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim_start_matches(['S', 's']);
        let i = digits
            .parse::<usize>()
            .map_err(|_| Error::InvalidConfig(format!("bad strategy {s:?}")))?;
        Self::from_index(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub d_sub: f64,
}

impl Strategy {
    pub fn new(kind: StrategyKind, d_sub: f64) -> Self {
        Self { kind, d_sub }
    }

    pub fn validate(&self) -> Result<()> {
        let needs_sub = self.kind != StrategyKind::Vanilla;
        if needs_sub && !(self.d_sub > 0.0 && self.d_sub.is_finite()) {
            return Err(Error::InvalidConfig(format!("{} needs d_sub > 0", self.kind)));
        }
        Ok(())
    }

    /// Straight drives are simulated in increments of `d_sub`.
    pub fn step_wise(&self) -> bool {
        self.kind == StrategyKind::StepWise
    }

    /// Collided straight drives are split a posteriori.
    pub fn splits(&self) -> bool {
        matches!(self.kind, StrategyKind::SplitOnly | StrategyKind::SplitWindow)
    }

    pub fn uses_window(&self) -> bool {
        self.kind == StrategyKind::SplitWindow
    }
}

/// Summary of one simulated Task. Disturbances are in the robot's moving
/// frame at Task end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanState {
    pub id: usize,
    pub mode: ControlMode,
    pub d_i: Option<Disturbance>,
    pub d_n: Option<Disturbance>,
    /// Task start pose in the fixed frame.
    pub v0: Pose2,
    pub vd: (f64, f64),
    /// Task end pose in the fixed frame.
    pub end: Pose2,
    pub n_steps: usize,
    pub gamma: f64,
    pub chi: f64,
    pub phi: f64,
    pub parent: Option<usize>,
    /// The Task counteracted its initial disturbance.
    pub counteracted: bool,
    /// `d_n` was handed up from a child that collided.
    pub propagated: bool,
    /// Created by splitting a collided state.
    pub split: bool,
}

impl PlanState {
    pub fn collided(&self) -> bool {
        matches!(self.d_n, Some(d) if d.kind == DisturbanceKind::ObstacleCollided)
    }

    pub fn d_i_fixed(&self) -> Option<Disturbance> {
        self.d_i.map(|d| to_fixed_frame(&self.end, &d))
    }

    pub fn d_n_fixed(&self) -> Option<Disturbance> {
        self.d_n.map(|d| to_fixed_frame(&self.end, &d))
    }

    /// Continuous state the outgoing jumps see.
    pub fn end_state(&self) -> ContinuousState {
        let d_i = if self.counteracted { None } else { self.d_i_fixed() };
        ContinuousState::new(d_i, self.d_n_fixed())
    }

    pub fn length(&self) -> f64 {
        self.vd.0.hypot(self.vd.1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CognitiveMap {
    pub states: Vec<PlanState>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub goal: Option<Disturbance>,
    /// Bodies represented across all simulated Tasks.
    pub n_objects: usize,
    /// Order in which states were expanded.
    pub expansions: Vec<usize>,
}

impl CognitiveMap {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == id).map(|e| e.1)
    }

    /// Ids from the root down to `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.states[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub states: Vec<usize>,
    /// Motor update intervals per plan state.
    pub n_motor: Vec<usize>,
}

impl Plan {
    /// Plan membership flag for every state in a map of `n` states.
    pub fn psi(&self, n: usize) -> Vec<bool> {
        let mut out = vec![false; n];
        for &s in &self.states {
            out[s] = true;
        }
        out
    }

    pub fn last(&self) -> usize {
        *self.states.last().expect("plans start at the root")
    }
}
