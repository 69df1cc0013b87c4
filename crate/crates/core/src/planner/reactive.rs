use crate::automaton::{ControlMode, TaskSpec, TARGET_TOL};
use crate::error::Result;
use crate::geometry::{to_moving_frame, Disturbance, DisturbanceKind};
use crate::simulator::{simulate_task_with, world_for_task, SimConfig, SimOptions, World};

use super::synthesis::GOAL_RADIUS;

/// Next Task for a purely reactive robot. Only the continuation of the
/// current drive is simulated, over `d_sub`. An interruption makes the robot
/// turn away from the obstacle; a target beside or behind it makes it turn
/// towards the target.
pub fn reactive_step(world: &World, goal: Option<&Disturbance>, d_sub: f64, cfg: &SimConfig) -> Result<TaskSpec> {
    let pose = world.pose();
    let task = match goal {
        Some(g) => TaskSpec::new(ControlMode::Straight, Some(*g), pose),
        None => TaskSpec::new(ControlMode::Default, None, pose),
    };
    let task_world = world_for_task(world, &task, cfg);
    let opts = SimOptions {
        distance_limit: Some(d_sub),
        ..Default::default()
    };
    let res = simulate_task_with(&task_world, &task, cfg, &opts)?;
    if let Some(hit) = res.d_n {
        let local = to_moving_frame(&pose, &hit);
        let mode = if local.y > 0.0 {
            ControlMode::Right
        } else {
            ControlMode::Left
        };
        return Ok(TaskSpec::new(mode, Some(hit.with_kind(DisturbanceKind::ObstacleLooming)), pose));
    }
    if let Some(g) = goal {
        let local = to_moving_frame(&pose, g);
        let off_axis = local.y.abs() > GOAL_RADIUS || local.x < -GOAL_RADIUS;
        if local.x <= TARGET_TOL && off_axis {
            let mode = if local.y >= 0.0 {
                ControlMode::Left
            } else {
                ControlMode::Right
            };
            return Ok(TaskSpec::new(mode, Some(*g), pose));
        }
    }
    Ok(task)
}
