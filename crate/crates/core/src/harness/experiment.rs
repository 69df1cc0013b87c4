use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::automaton::{flow, ControlMode, TaskSpec};
use crate::error::{Error, Result};
use crate::geometry::{obb_overlap, Disturbance, Pose2};
use crate::planner::{extract_plan, reactive_step, synthesize, CognitiveMap, Plan, Strategy, StrategyKind, GOAL_RADIUS};
use crate::sensing::{scan_rects, ScanConfig};
use crate::simulator::{world_for_task, SimConfig, World};

use super::scenario::ScenarioSpec;

/// Reactive steps before a run is abandoned.
pub const REACTIVE_STEP_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub strategy: StrategyKind,
    pub variant: usize,
    pub repetition: usize,
    pub seed: u64,
    pub n_objects: usize,
    pub n_states: usize,
    /// Map construction plus plan extraction, in seconds. Left out of JSON
    /// so that repeated runs serialize identically.
    #[serde(skip)]
    pub planning_time: f64,
    /// `"ok"` or the planning error.
    pub outcome: String,
    pub plan: Option<Plan>,
    pub trajectory: Vec<Pose2>,
    pub collided: bool,
    pub entered_pocket: bool,
    pub success: bool,
    pub obstacles: Vec<Disturbance>,
    pub goal: Option<Disturbance>,
    pub map: Option<CognitiveMap>,
}

/// Apply one mode's velocities for `n` integration steps in the true world.
/// Returns whether the robot hit something.
fn drive(
    bodies: &[Disturbance],
    mode: ControlMode,
    n: usize,
    cfg: &SimConfig,
    trajectory: &mut Vec<Pose2>,
) -> bool {
    let vel = flow(mode, &cfg.robot);
    let mut pose = *trajectory.last().expect("trajectory starts at the start pose");
    for _ in 0..n {
        let (fx, fy) = pose.forward();
        let ds = vel.linear * cfg.step;
        pose = pose.displaced(fx * ds, fy * ds, vel.angular * cfg.step);
        trajectory.push(pose);
        let foot = cfg.robot.footprint(&pose);
        if bodies.iter().any(|b| obb_overlap(&foot, &b.rect())) {
            return true;
        }
    }
    false
}

fn sim_steps_for(n_motor: usize, cfg: &SimConfig) -> usize {
    (n_motor as f64 / (cfg.motor_rate * cfg.step)).round() as usize
}

fn near_goal(pose: &Pose2, goal: Option<&Disturbance>) -> bool {
    goal.is_some_and(|g| (pose.x - g.x).hypot(pose.y - g.y) <= GOAL_RADIUS)
}

fn judge(scenario: &ScenarioSpec, rec: &mut RunRecord) {
    let end = *rec.trajectory.last().expect("non-empty trajectory");
    rec.entered_pocket = rec.trajectory.iter().any(|p| scenario.in_pocket(p));
    rec.success = !rec.collided
        && match &rec.goal {
            Some(g) => near_goal(&end, Some(g)),
            None => !scenario.in_pocket(&end),
        };
}

fn scan_config(scenario: &ScenarioSpec) -> ScanConfig {
    ScanConfig {
        noise_std: scenario.scan_noise,
        ..ScanConfig::default()
    }
}

/// Scan, plan and execute one run.
pub fn run_experiment(
    scenario: &ScenarioSpec,
    strategy: StrategyKind,
    variant: usize,
    repetition: usize,
    seed: u64,
    cfg: &SimConfig,
) -> Result<RunRecord> {
    scenario.validate(&cfg.robot)?;
    let start = *scenario
        .starting_variants
        .get(variant)
        .ok_or_else(|| Error::InvalidConfig(format!("variant {variant} out of range")))?;
    let bodies = scenario.bodies();
    let goal = scenario.goal();
    let mut rec = RunRecord {
        scenario: scenario.name.clone(),
        strategy,
        variant,
        repetition,
        seed,
        n_objects: 0,
        n_states: 0,
        planning_time: 0.0,
        outcome: "ok".into(),
        plan: None,
        trajectory: vec![start],
        collided: false,
        entered_pocket: false,
        success: false,
        obstacles: bodies.clone(),
        goal,
        map: None,
    };
    if strategy == StrategyKind::Reactive {
        run_reactive(scenario, &mut rec, cfg)?;
        judge(scenario, &mut rec);
        return Ok(rec);
    }

    let cloud = scan_rects(&bodies, &start, &cfg.robot, &scan_config(scenario), seed)?;
    let world = World::from_cloud(cloud, start, goal);
    let strat = Strategy::new(strategy, scenario.d_sub);

    let t0 = Instant::now();
    let planned = synthesize(&world, strat, goal.as_ref(), cfg).map(|map| {
        let plan = extract_plan(&map, cfg);
        (map, plan)
    });
    rec.planning_time = t0.elapsed().as_secs_f64();

    match planned {
        Ok((map, plan)) => {
            rec.n_states = map.len();
            rec.n_objects = map.n_objects;
            match plan {
                Ok(plan) => {
                    for (&id, &n_motor) in plan.states.iter().zip(&plan.n_motor) {
                        let n = sim_steps_for(n_motor, cfg);
                        if drive(&bodies, map.states[id].mode, n, cfg, &mut rec.trajectory) {
                            rec.collided = true;
                            break;
                        }
                    }
                    rec.plan = Some(plan);
                }
                Err(e) => rec.outcome = e.to_string(),
            }
            rec.map = Some(map);
        }
        Err(e @ Error::StateSpaceExhausted(_)) => rec.outcome = e.to_string(),
        Err(e) => return Err(e),
    }
    judge(scenario, &mut rec);
    Ok(rec)
}

fn run_reactive(scenario: &ScenarioSpec, rec: &mut RunRecord, cfg: &SimConfig) -> Result<()> {
    let bodies = scenario.bodies();
    let start = rec.trajectory[0];
    let turn_steps = (std::f64::consts::FRAC_PI_2 / (cfg.robot.angular_speed * cfg.step)).round() as usize;
    let drive_steps = (scenario.d_sub / (cfg.robot.linear_speed * cfg.step)).round() as usize;
    for k in 0..REACTIVE_STEP_CAP {
        let pose = *rec.trajectory.last().expect("non-empty trajectory");
        if near_goal(&pose, rec.goal.as_ref())
            || (rec.goal.is_none() && pose.distance_to(&start) >= cfg.horizon)
        {
            break;
        }
        let cloud = scan_rects(&bodies, &pose, &cfg.robot, &scan_config(scenario), rec.seed.wrapping_add(k as u64))?;
        let world = World::from_cloud(cloud, pose, rec.goal);
        let t0 = Instant::now();
        let task: TaskSpec = reactive_step(&world, rec.goal.as_ref(), scenario.d_sub, cfg)?;
        rec.planning_time += t0.elapsed().as_secs_f64();
        rec.n_objects += world_for_task(&world, &task, cfg).obstacles.len();
        let n = if task.mode.is_turn() { turn_steps } else { drive_steps };
        if drive(&bodies, task.mode, n, cfg, &mut rec.trajectory) {
            rec.collided = true;
            break;
        }
    }
    Ok(())
}

/// Seed for one repetition of a suite.
pub fn run_seed(base: u64, repetition: usize) -> u64 {
    base.wrapping_mul(1000).wrapping_add(repetition as u64)
}

/// Every built-in scenario × strategy × variant × repetition.
pub fn run_suite(scenarios: &[ScenarioSpec], repetitions: usize, base_seed: u64, cfg: &SimConfig) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for s in scenarios {
        for &k in &StrategyKind::ALL {
            for v in 0..s.starting_variants.len() {
                for r in 0..repetitions {
                    out.push(run_experiment(s, k, v, r, run_seed(base_seed, r), cfg)?);
                }
            }
        }
    }
    Ok(out)
}
