//! Core knowledge: a kinematic simulator that runs one Task at a time.
//!
//! Modes never mix linear and angular velocity, so explicit Euler steps are
//! exact. The final step of a turn or of a drive reaching the horizon is
//! shortened so the Task ends exactly on its limit.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::automaton::{
    flow, invariant_holds, target_ahead, ContinuousState, ControlMode, TaskProgress, TaskSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{
    obb_overlap, to_moving_frame, Disturbance, DisturbanceKind, Pose2, Rect, RobotModel,
};
use crate::sensing::{cluster_in_frame, filter_points, filter_region, PointCloud, CLUSTER_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step in seconds.
    pub step: f64,
    /// Task distance limit and planning horizon in metres.
    pub horizon: f64,
    /// Motor update rate in Hz.
    pub motor_rate: f64,
    pub max_steps: usize,
    pub robot: RobotModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            horizon: 1.0,
            motor_rate: 10.0,
            max_steps: 200,
            robot: RobotModel::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.horizon > 0.0 && self.motor_rate > 0.0) || !self.robot.is_valid() {
            return Err(Error::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Everything the simulator knows about the surroundings. Bodies are in the
/// fixed frame. When `cloud` is present, each Task builds its own world from
/// the points relevant to it; `obstacles` are always represented.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub obstacles: Vec<Disturbance>,
    pub robot_pose: Option<Pose2>,
    pub goal: Option<Disturbance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<PointCloud>,
}

impl World {
    pub fn new(obstacles: Vec<Disturbance>, robot_pose: Pose2, goal: Option<Disturbance>) -> Self {
        Self {
            obstacles,
            robot_pose: Some(robot_pose),
            goal,
            cloud: None,
        }
    }

    pub fn from_cloud(cloud: PointCloud, robot_pose: Pose2, goal: Option<Disturbance>) -> Self {
        Self {
            obstacles: Vec::new(),
            robot_pose: Some(robot_pose),
            goal,
            cloud: Some(cloud),
        }
    }

    pub fn pose(&self) -> Pose2 {
        self.robot_pose.unwrap_or_else(Pose2::origin)
    }

    pub fn with_pose(&self, pose: Pose2) -> Self {
        Self {
            robot_pose: Some(pose),
            ..self.clone()
        }
    }
}

/// Why a simulated Task stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    Collision,
    Looming,
    TurnComplete,
    TargetReached,
    /// The obstacle the Task was contingent on left the attention window.
    Invalidated,
    /// The Task drove the full horizon.
    Horizon,
    /// A caller-imposed distance limit shorter than the horizon was reached.
    StepLimit,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n_steps: usize,
    pub end_pose: Pose2,
    pub displacement: (f64, f64),
    /// Interrupting disturbance in the fixed frame.
    pub d_n: Option<Disturbance>,
    pub collided: bool,
    /// Initial disturbance still standing at the end, `None` if counteracted.
    pub d_i_after: Option<Disturbance>,
    pub termination: Termination,
    pub distance: f64,
    pub turned: f64,
}

impl SimResult {
    pub fn is_empty(&self) -> bool {
        self.n_steps == 0 && !self.collided
    }
}

/// Box around the robot and the goal, captured in the robot's moving frame
/// at Task start and carried rigidly with the robot afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionWindow {
    /// Window in the moving frame; constant over a Task.
    pub local: Rect,
    /// Pose the window is currently attached to.
    pub anchor: Pose2,
}

impl AttentionWindow {
    pub fn attached_to(&self, pose: Pose2) -> Self {
        Self {
            local: self.local,
            anchor: pose,
        }
    }

    /// The window in the fixed frame.
    pub fn rect(&self) -> Rect {
        let (cx, cy) = self.anchor.to_global(self.local.cx, self.local.cy);
        Rect::new(cx, cy, self.anchor.theta + self.local.theta, self.local.len, self.local.wid)
    }
}

pub fn make_attention_window(
    robot_pose: &Pose2,
    goal: Option<&Disturbance>,
    robot: &RobotModel,
) -> Result<AttentionWindow> {
    let goal = goal.ok_or(Error::NoGoal)?;
    let local_goal = to_moving_frame(robot_pose, goal);
    let foot = robot.footprint(&Pose2::origin());
    let (mut xmin, mut ymin, mut xmax, mut ymax) = foot.bounds();
    let (gx0, gy0, gx1, gy1) = local_goal.rect().bounds();
    xmin = xmin.min(gx0);
    ymin = ymin.min(gy0);
    xmax = xmax.max(gx1);
    ymax = ymax.max(gy1);
    Ok(AttentionWindow {
        local: Rect::from_bounds(xmin, ymin, xmax, ymax),
        anchor: *robot_pose,
    })
}

/// Closed overlap between the window and a fixed-frame disturbance.
pub fn in_view(window: &AttentionWindow, d_i: &Disturbance) -> bool {
    obb_overlap(&window.rect(), &d_i.rect())
}

/// Simulated duration converted into motor update intervals.
pub fn motor_duration(n_sim_steps: usize, cfg: &SimConfig) -> usize {
    (n_sim_steps as f64 * cfg.motor_rate * cfg.step).round() as usize
}

/// Add `d_i` to the world as a body unless it is already represented.
/// Targets are added too but never collide.
pub fn reconstruct_disturbance(d_i: &Disturbance, world: &World) -> World {
    let rect = d_i.rect();
    let present = world.obstacles.iter().any(|o| {
        o.same_body(d_i, 1e-9)
            || (d_i.kind.is_obstacle() && o.kind.is_obstacle() && obb_overlap(&o.rect(), &rect))
    });
    let mut out = world.clone();
    if !present {
        out.obstacles.push(*d_i);
    }
    out
}

/// Padding added on every side of a clustered body. Scan returns sample a
/// surface at the beam spacing, so the true edge can lie past the outermost
/// point.
pub const BODY_MARGIN: f64 = 0.01;

/// The world a single Task is simulated in: the persistent bodies, the
/// clustered points relevant to the Task (when a cloud is available) and the
/// Task's initial disturbance.
pub fn world_for_task(world: &World, task: &TaskSpec, cfg: &SimConfig) -> World {
    let mut out = World {
        obstacles: world.obstacles.clone(),
        robot_pose: Some(task.start),
        goal: world.goal,
        cloud: None,
    };
    if let Some(cloud) = &world.cloud {
        let kept = filter_points(cloud, &task.start, task.mode, task.c.d_i.as_ref(), cfg.horizon, &cfg.robot);
        out.obstacles.extend(cluster_in_frame(&kept, CLUSTER_EPS, &task.start).into_iter().map(|c| {
            let mut body = c.body;
            body.w += 2.0 * BODY_MARGIN;
            body.l += 2.0 * BODY_MARGIN;
            body
        }));
    }
    match &task.c.d_i {
        Some(d) => reconstruct_disturbance(d, &out),
        None => out,
    }
}

/// Per-call knobs the planner sets from its strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimOptions {
    /// Terminate an obstacle-contingent straight drive once the obstacle
    /// leaves this window (built at Task start).
    pub window: Option<AttentionWindow>,
    /// Cap on the distance of a straight drive, below the horizon.
    pub distance_limit: Option<f64>,
}

pub fn simulate_task(world: &World, task: &TaskSpec, cfg: &SimConfig) -> Result<SimResult> {
    simulate_task_with(world, task, cfg, &SimOptions::default())
}

pub fn simulate_task_with(
    world: &World,
    task: &TaskSpec,
    cfg: &SimConfig,
    opts: &SimOptions,
) -> Result<SimResult> {
    task.validate()?;
    cfg.validate()?;
    let robot = &cfg.robot;
    let start = task.start;
    let vel = flow(task.mode, robot);
    let limit = opts
        .distance_limit
        .map_or(cfg.horizon, |l| l.min(cfg.horizon));
    let d_i = task.c.d_i;
    let d_i_obstacle = d_i.filter(|d| d.kind.is_obstacle());
    let window = opts.window.filter(|_| d_i_obstacle.is_some() && task.mode == ControlMode::Straight);

    let solid: Vec<&Disturbance> = world.obstacles.iter().filter(|o| o.kind.is_obstacle()).collect();
    let corridor = filter_region(
        task.mode,
        d_i.map(|d| to_moving_frame(&start, &d)).as_ref(),
        cfg.horizon,
        robot,
    );
    let corridor_at = |pose: &Pose2| {
        let (cx, cy) = pose.to_global(corridor.cx, corridor.cy);
        Rect::new(cx, cy, pose.theta, corridor.len, corridor.wid)
    };
    let initially_seen: Vec<bool> = solid
        .iter()
        .map(|o| task.mode.is_straight() && obb_overlap(&corridor_at(&start), &o.rect()))
        .collect();

    let mut pose = start;
    let mut progress = TaskProgress::start(limit);
    progress.d_i_view = d_i.map(|d| to_moving_frame(&pose, &d));
    progress.target_armed = matches!(progress.d_i_view, Some(v) if v.kind == DisturbanceKind::Target && target_ahead(v.x, v.y));
    let update_window = |progress: &mut TaskProgress, pose: &Pose2| {
        if let (Some(w), Some(d)) = (window, d_i_obstacle) {
            progress.d_i_in_window = Some(in_view(&w.attached_to(*pose), &d));
        }
    };
    update_window(&mut progress, &pose);

    let finish = |pose: Pose2, n_steps: usize, progress: &TaskProgress, d_n: Option<Disturbance>, termination: Termination| {
        let counteracted = matches!(
            termination,
            Termination::TurnComplete | Termination::TargetReached | Termination::Invalidated
        );
        SimResult {
            n_steps,
            end_pose: pose,
            displacement: (pose.x - start.x, pose.y - start.y),
            d_n,
            collided: termination == Termination::Collision,
            d_i_after: if counteracted { None } else { d_i },
            termination,
            distance: progress.distance,
            turned: progress.turned,
        }
    };

    let footprint = robot.footprint(&pose);
    if let Some(hit) = solid.iter().find(|o| obb_overlap(&footprint, &o.rect())) {
        return Ok(finish(pose, 0, &progress, Some(hit.with_kind(DisturbanceKind::ObstacleCollided)), Termination::Collision));
    }

    let classify = |progress: &TaskProgress| -> Termination {
        match task.mode {
            ControlMode::Left | ControlMode::Right => Termination::TurnComplete,
            _ if progress.distance >= cfg.horizon => Termination::Horizon,
            _ if progress.distance >= limit => Termination::StepLimit,
            _ if progress.d_i_in_window == Some(false) => Termination::Invalidated,
            _ => Termination::TargetReached,
        }
    };

    let c = ContinuousState::new(d_i, None);
    if !invariant_holds(task.mode, &c, &progress) {
        return Ok(finish(pose, 0, &progress, None, classify(&progress)));
    }

    for n in 1..=cfg.max_steps {
        if task.mode.is_straight() {
            // Only the horizon cuts a step short; a tighter limit ends the
            // Task on the first whole step that reaches it.
            let ds = (vel.linear * cfg.step).min(cfg.horizon - progress.distance).max(0.0);
            let (fx, fy) = pose.forward();
            pose = pose.displaced(fx * ds, fy * ds, 0.0);
            progress.distance += ds;
            if (limit - progress.distance).abs() < 1e-9 || cfg.horizon - progress.distance < 1e-12 {
                progress.distance = progress.distance.max(limit).min(cfg.horizon);
            }
        } else {
            let remaining = FRAC_PI_2 - progress.turned.abs();
            let dth = (vel.angular.abs() * cfg.step).min(remaining).max(0.0) * vel.angular.signum();
            pose = pose.displaced(0.0, 0.0, dth);
            progress.turned += dth;
            if FRAC_PI_2 - progress.turned.abs() < 1e-12 {
                progress.turned = FRAC_PI_2 * vel.angular.signum();
            }
        }

        let footprint = robot.footprint(&pose);
        if let Some(hit) = solid.iter().find(|o| obb_overlap(&footprint, &o.rect())) {
            return Ok(finish(pose, n, &progress, Some(hit.with_kind(DisturbanceKind::ObstacleCollided)), Termination::Collision));
        }
        if task.mode.is_straight() {
            let now = corridor_at(&pose);
            if let Some((o, _)) = solid
                .iter()
                .zip(&initially_seen)
                .find(|(o, seen)| !**seen && obb_overlap(&now, &o.rect()))
            {
                return Ok(finish(pose, n, &progress, Some(o.with_kind(DisturbanceKind::ObstacleLooming)), Termination::Looming));
            }
        }

        progress.d_i_view = d_i.map(|d| to_moving_frame(&pose, &d));
        update_window(&mut progress, &pose);
        if !invariant_holds(task.mode, &c, &progress) {
            return Ok(finish(pose, n, &progress, None, classify(&progress)));
        }
    }
    Ok(finish(pose, cfg.max_steps, &progress, None, Termination::MaxSteps))
}
