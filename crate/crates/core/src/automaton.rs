//! The nondeterministic hybrid automaton that governs Task switching:
//! control modes, their flows and invariants, and the guarded edges between
//! them. Choosing among several permitted jumps is left to the planner.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Disturbance, DisturbanceKind, Pose2, RobotModel};

/// Forward distance at which a target counts as reached.
pub const TARGET_TOL: f64 = 0.05;

/// Half-angle of the cone ahead in which a target can be driven to.
pub const TARGET_CONE: f64 = std::f64::consts::FRAC_PI_4;

/// Whether driving straight can counteract a target seen at `(x, y)` in the
/// moving frame.
pub fn target_ahead(x: f64, y: f64) -> bool {
    x > TARGET_TOL && y.atan2(x).abs() <= TARGET_CONE
}

/// Slack on the quarter-turn completion test.
const TURN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ControlMode {
    /// Drive straight to counteract a disturbance.
    #[serde(rename = "H_S")]
    Straight,
    /// Drive straight with nothing to counteract.
    #[serde(rename = "H_D")]
    Default,
    /// Quarter turn to the left on the spot.
    #[serde(rename = "H_L")]
    Left,
    /// Quarter turn to the right on the spot.
    #[serde(rename = "H_R")]
    Right,
}

impl ControlMode {
    pub const ALL: [ControlMode; 4] = [
        ControlMode::Straight,
        ControlMode::Default,
        ControlMode::Left,
        ControlMode::Right,
    ];

    pub fn is_straight(self) -> bool {
        matches!(self, ControlMode::Straight | ControlMode::Default)
    }

    pub fn is_turn(self) -> bool {
        !self.is_straight()
    }

    pub fn label(self) -> &'static str {
        match self {
            ControlMode::Straight => "H_S",
            ControlMode::Default => "H_D",
            ControlMode::Left => "H_L",
            ControlMode::Right => "H_R",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The continuous variables: the disturbance a Task is contingent on and the
/// one (if any) that interrupted it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuousState {
    pub d_i: Option<Disturbance>,
    pub d_n: Option<Disturbance>,
}

impl ContinuousState {
    pub fn new(d_i: Option<Disturbance>, d_n: Option<Disturbance>) -> Self {
        Self { d_i, d_n }
    }

    pub fn collided(&self) -> bool {
        matches!(self.d_n, Some(d) if d.kind == DisturbanceKind::ObstacleCollided)
    }
}

/// A Task to simulate: a control mode, its continuous state and where it starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub mode: ControlMode,
    pub c: ContinuousState,
    pub start: Pose2,
}

impl TaskSpec {
    pub fn new(mode: ControlMode, d_i: Option<Disturbance>, start: Pose2) -> Self {
        Self {
            mode,
            c: ContinuousState::new(d_i, None),
            start,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == ControlMode::Default && self.c.d_i.is_some() {
            return Err(Error::InvalidTask("H_D cannot carry an initial disturbance".into()));
        }
        if matches!(self.c.d_i, Some(d) if d.kind == DisturbanceKind::ObstacleCollided) {
            return Err(Error::InvalidTask(
                "a Task cannot be contingent on a collided obstacle".into(),
            ));
        }
        if !self.start.is_finite() {
            return Err(Error::InvalidTask("non-finite start pose".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: ControlMode,
    pub to: ControlMode,
}

impl Edge {
    pub const fn new(from: ControlMode, to: ControlMode) -> Self {
        Self { from, to }
    }
}

use ControlMode::{Default as HD, Left as HL, Right as HR, Straight as HS};

/// Edges allowed unless the source Task ended in a collision.
const COLLISION_FREE_EDGES: [Edge; 6] = [
    Edge::new(HS, HL),
    Edge::new(HS, HR),
    Edge::new(HS, HS),
    Edge::new(HD, HS),
    Edge::new(HD, HL),
    Edge::new(HD, HR),
];

/// Edges out of a completed turn.
const AFTER_TURN_EDGES: [Edge; 4] = [
    Edge::new(HL, HS),
    Edge::new(HL, HD),
    Edge::new(HR, HD),
    Edge::new(HR, HS),
];

/// The static edge set.
pub fn edge_set() -> Vec<Edge> {
    COLLISION_FREE_EDGES
        .iter()
        .chain(AFTER_TURN_EDGES.iter())
        .copied()
        .chain(std::iter::once(Edge::new(HS, HD)))
        .collect()
}

/// Velocity output of a control mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCommand {
    pub linear: f64,
    pub angular: f64,
}

pub fn flow(mode: ControlMode, robot: &RobotModel) -> VelocityCommand {
    match mode {
        HS | HD => VelocityCommand {
            linear: robot.linear_speed,
            angular: 0.0,
        },
        HL => VelocityCommand {
            linear: 0.0,
            angular: robot.angular_speed,
        },
        HR => VelocityCommand {
            linear: 0.0,
            angular: -robot.angular_speed,
        },
    }
}

/// What a running Task has done so far.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskProgress {
    /// Signed heading change since Task start.
    pub turned: f64,
    /// Distance driven since Task start.
    pub distance: f64,
    /// Task distance limit.
    pub horizon: f64,
    /// The initial disturbance seen from the robot's current pose.
    pub d_i_view: Option<Disturbance>,
    /// Whether a target was ahead when the Task started. A target that is
    /// beside or behind the robot cannot be counteracted by driving straight.
    pub target_armed: bool,
    /// Attention-window verdict on an obstacle `d_i`, when a window is in use.
    pub d_i_in_window: Option<bool>,
}

impl TaskProgress {
    pub fn start(horizon: f64) -> Self {
        Self {
            turned: 0.0,
            distance: 0.0,
            horizon,
            d_i_view: None,
            target_armed: false,
            d_i_in_window: None,
        }
    }
}

/// Whether a Task in `mode` keeps running.
pub fn invariant_holds(mode: ControlMode, c: &ContinuousState, progress: &TaskProgress) -> bool {
    if c.d_n.is_some() {
        return false;
    }
    match mode {
        HL | HR => progress.turned.abs() < FRAC_PI_2 - TURN_EPS,
        HD => progress.distance < progress.horizon,
        HS => {
            if progress.distance >= progress.horizon {
                return false;
            }
            match c.d_i.map(|d| d.kind) {
                Some(DisturbanceKind::Target) => {
                    let ahead = progress.d_i_view.map_or(f64::INFINITY, |d| d.x);
                    !progress.target_armed || ahead > TARGET_TOL
                }
                Some(_) => progress.d_i_in_window.unwrap_or(true),
                None => true,
            }
        }
    }
}

/// Edges that may be taken once a Task ends with continuous state `c`.
///
/// `c.d_i` must already reflect whether the source Task counteracted its
/// initial disturbance; a finished turn has `d_i = None`.
pub fn permitted_jumps(from: ControlMode, c: &ContinuousState) -> Vec<Edge> {
    let collided = c.collided();
    let mut out = Vec::new();
    if !collided {
        out.extend(COLLISION_FREE_EDGES.iter().filter(|e| e.from == from));
    }
    if from.is_turn() && c.d_i.is_none() && c.d_n.is_none() {
        out.extend(AFTER_TURN_EDGES.iter().filter(|e| e.from == from));
    }
    if from == HS && c.d_n.is_none() {
        out.push(Edge::new(HS, HD));
    }
    out
}
