//! Exhaustive enumeration of Task sequences, used as an oracle for the
//! best-first search.

#![allow(dead_code)]

use closedloop::automaton::{permitted_jumps, ContinuousState, ControlMode, TaskSpec};
use closedloop::geometry::{to_moving_frame, Disturbance, DisturbanceKind, Pose2};
use closedloop::planner::{chi, gamma, GOAL_RADIUS};
use closedloop::simulator::{simulate_task, world_for_task, SimConfig, SimResult, World};

#[derive(Debug, Clone)]
pub struct Leaf {
    pub modes: Vec<ControlMode>,
    pub end: Pose2,
    pub phi: f64,
}

struct Step {
    mode: ControlMode,
    d_i: Option<Disturbance>,
    res: SimResult,
}

fn run(world: &World, mode: ControlMode, d_i: Option<Disturbance>, start: Pose2, cfg: &SimConfig) -> SimResult {
    let task = TaskSpec::new(mode, d_i, start);
    simulate_task(&world_for_task(world, &task, cfg), &task, cfg).unwrap()
}

fn next_d_i(c: &ContinuousState, goal: Option<&Disturbance>) -> Option<Disturbance> {
    match c.d_n {
        Some(d) => Some(d),
        None => goal.copied(),
    }
}

fn normalise(mode: ControlMode, d_i: Option<Disturbance>) -> Option<ControlMode> {
    match mode {
        ControlMode::Straight if d_i.is_none() => Some(ControlMode::Default),
        ControlMode::Default if d_i.is_some() => None,
        m => Some(m),
    }
}

fn good(end: &Pose2, collided: bool, start: &Pose2, goal: Option<&Disturbance>, r: f64) -> bool {
    !collided
        && match goal {
            Some(g) => (end.x - g.x).hypot(end.y - g.y) <= GOAL_RADIUS,
            None => end.distance_to(start) >= r - 1e-6,
        }
}

/// Cheapest goal-satisfying sequence of at most `depth` Tasks after the
/// Task already running, using the basic reset. Ties go to fewer Tasks,
/// then to the order in which jumps are listed.
pub fn brute_force(world: &World, goal: Option<&Disturbance>, depth: usize, cfg: &SimConfig) -> Option<Leaf> {
    let start = world.pose();
    let mode0 = if goal.is_some() {
        ControlMode::Straight
    } else {
        ControlMode::Default
    };
    let first = run(world, mode0, goal.copied(), start, cfg);
    let mut best: Option<Leaf> = None;
    let mut consider = |modes: &[ControlMode], end: Pose2, d_n: Option<Disturbance>, collided: bool| {
        if !good(&end, collided, &start, goal, cfg.horizon) {
            return;
        }
        let local_n = d_n.map(|d| to_moving_frame(&end, &d));
        let local_g = goal.map(|g| to_moving_frame(&end, g));
        let phi = gamma(local_n.as_ref(), cfg.horizon) + chi(local_g.as_ref(), cfg.horizon);
        let better = match &best {
            None => true,
            Some(b) => phi < b.phi - 1e-12 || ((phi - b.phi).abs() <= 1e-12 && modes.len() < b.modes.len()),
        };
        if better {
            best = Some(Leaf { modes: modes.to_vec(), end, phi });
        }
    };
    consider(&[mode0], first.end_pose, first.d_n, first.collided);

    // The running Task's alternatives see its collision as looming.
    let root_c = ContinuousState::new(goal.copied(), first.d_n.map(|d| d.with_kind(DisturbanceKind::ObstacleLooming)));
    let mut stack: Vec<(Vec<ControlMode>, Pose2, ControlMode, ContinuousState)> = vec![(vec![], start, mode0, root_c)];
    // Depth-first in jump order; `consider` keeps the first of equal cost
    // among sequences of equal length.
    let mut frontier = Vec::new();
    while let Some((modes, pose, mode, c)) = stack.pop() {
        frontier.clear();
        for e in permitted_jumps(mode, &c) {
            let d_i = next_d_i(&c, goal);
            let Some(m) = normalise(e.to, d_i) else { continue };
            frontier.push((m, d_i));
        }
        frontier.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        let mut children = Vec::new();
        for &(m, d_i) in &frontier {
            let mut seq = modes.clone();
            let mut chain = vec![Step { mode: m, d_i, res: run(world, m, d_i, pose, cfg) }];
            // A finished turn goes on with its after-turn successors.
            while chain.last().unwrap().mode.is_turn() {
                let last = chain.last().unwrap();
                if last.res.d_n.is_some() || last.res.n_steps == 0 {
                    break;
                }
                let c_end = ContinuousState::new(None, None);
                let mut next = None;
                for e in permitted_jumps(last.mode, &c_end) {
                    let d = next_d_i(&c_end, goal);
                    if let Some(m2) = normalise(e.to, d) {
                        next = Some((m2, d));
                        break;
                    }
                }
                let Some((m2, d2)) = next else { break };
                let at = last.res.end_pose;
                chain.push(Step { mode: m2, d_i: d2, res: run(world, m2, d2, at, cfg) });
            }
            if chain.iter().any(|s| s.res.n_steps == 0 && !s.res.collided) {
                continue;
            }
            for s in &chain {
                seq.push(s.mode);
                consider(&seq, s.res.end_pose, s.res.d_n, s.res.collided);
            }
            let last = chain.last().unwrap();
            if seq.len() < depth && !last.res.collided && last.mode.is_straight() {
                let c_end = ContinuousState::new(last.res.d_i_after, last.res.d_n);
                children.push((seq, last.res.end_pose, last.mode, c_end));
            }
            let _ = last.d_i;
        }
        // Reverse so that the first jump is explored first.
        stack.extend(children.into_iter().rev());
    }
    best
}
