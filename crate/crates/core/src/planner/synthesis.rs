use crate::automaton::{permitted_jumps, ContinuousState, ControlMode, TaskSpec};
use crate::error::{Error, Result};
use crate::geometry::{to_moving_frame, Disturbance, DisturbanceKind, Pose2};
use crate::simulator::{
    make_attention_window, motor_duration, simulate_task_with, world_for_task, SimConfig, SimOptions,
    SimResult, Termination, World,
};

use super::cost::{chi, gamma};
use super::reset::{reset_basic, reset_window};
use super::split::split;
use super::{CognitiveMap, Plan, PlanState, Strategy, StrategyKind};

/// Maximum number of states in one map.
pub const STATE_CAP: usize = 500;
/// A state ending this close to the goal reaches it.
pub const GOAL_RADIUS: f64 = 0.15;

fn same_disturbance(a: Option<&Disturbance>, b: Option<&Disturbance>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => a.kind == b.kind && a.same_body(b, 1e-6),
        _ => false,
    }
}

/// Whether a non-collided state satisfies the goal criterion: near the goal
/// if there is one, otherwise a horizon away from where planning started.
fn reaches_goal(q: &PlanState, origin: &Pose2, goal: Option<&Disturbance>, r: f64) -> bool {
    if q.collided() {
        return false;
    }
    match goal {
        Some(g) => (q.end.x - g.x).hypot(q.end.y - g.y) <= GOAL_RADIUS,
        None => q.end.distance_to(origin) >= r - 1e-6,
    }
}

struct Builder<'a> {
    world: &'a World,
    strategy: Strategy,
    goal: Option<Disturbance>,
    cfg: &'a SimConfig,
    map: CognitiveMap,
    expanded: Vec<bool>,
    queue: Vec<usize>,
}

impl Builder<'_> {
    fn origin(&self) -> Pose2 {
        self.map.states[0].v0
    }

    fn costs(&self, end: &Pose2, d_n: Option<&Disturbance>) -> (f64, f64) {
        let goal_local = self.goal.map(|g| to_moving_frame(end, &g));
        (gamma(d_n, self.cfg.horizon), chi(goal_local.as_ref(), self.cfg.horizon))
    }

    fn push_state(&mut self, mut q: PlanState) -> usize {
        let id = self.map.states.len();
        q.id = id;
        if let Some(p) = q.parent {
            self.map.edges.push((p, id));
        }
        self.map.states.push(q);
        self.expanded.push(false);
        id
    }

    fn has_jumps(&self, id: usize) -> bool {
        let q = &self.map.states[id];
        !permitted_jumps(q.mode, &q.end_state()).is_empty()
    }

    fn enqueue(&mut self, id: usize) {
        if !self.expanded[id] && !self.queue.contains(&id) && self.has_jumps(id) {
            self.queue.push(id);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let states = &self.map.states;
        let (pos, _) = self.queue.iter().enumerate().min_by(|(_, &a), (_, &b)| {
            states[a].phi.total_cmp(&states[b].phi).then(a.cmp(&b))
        })?;
        Some(self.queue.swap_remove(pos))
    }

    fn reached(&self) -> bool {
        let origin = self.origin();
        self.map
            .states
            .iter()
            .skip(1)
            .any(|q| reaches_goal(q, &origin, self.goal.as_ref(), self.cfg.horizon))
    }

    /// Initial disturbance for a Task that follows `q`.
    fn reset(&self, q: &PlanState) -> Result<Option<Disturbance>> {
        if self.strategy.uses_window() {
            if let Some(goal) = &self.goal {
                let window = make_attention_window(&q.end, Some(goal), &self.cfg.robot)?;
                let c = ContinuousState::new(q.d_i_fixed(), q.d_n_fixed());
                return reset_window(&c, Some(goal), &window);
            }
        }
        reset_basic(&q.end_state(), self.goal.as_ref())
    }

    fn record(&mut self, parent: usize, task: &TaskSpec, res: &SimResult) -> usize {
        let end = res.end_pose;
        let d_n = res.d_n.map(|d| to_moving_frame(&end, &d));
        let (g, c) = self.costs(&end, d_n.as_ref());
        self.push_state(PlanState {
            id: 0,
            mode: task.mode,
            d_i: task.c.d_i.map(|d| to_moving_frame(&end, &d)),
            d_n,
            v0: task.start,
            vd: res.displacement,
            end,
            n_steps: res.n_steps,
            gamma: g,
            chi: c,
            phi: g + c,
            parent: Some(parent),
            counteracted: res.d_i_after.is_none() && task.c.d_i.is_some()
                || res.termination == Termination::TurnComplete,
            propagated: false,
            split: false,
        })
    }

    /// Hand a collision at `id` up to its parent as a looming obstacle, and
    /// on through ancestors that continue the same straight drive.
    fn propagate(&mut self, id: usize) {
        let Some(hit) = self.map.states[id].d_n_fixed() else { return };
        let hit = hit.with_kind(DisturbanceKind::ObstacleLooming);
        let mut child = id;
        while let Some(p) = self.map.states[child].parent {
            if self.map.states[p].d_n.is_some() {
                break;
            }
            let end = self.map.states[p].end;
            let d_n = to_moving_frame(&end, &hit);
            let (g, c) = self.costs(&end, Some(&d_n));
            let q = &mut self.map.states[p];
            q.d_n = Some(d_n);
            q.propagated = true;
            q.gamma = g;
            q.chi = c;
            q.phi = g + c;
            self.enqueue(p);

            let q = self.map.states[p];
            let Some(pp) = q.parent else { break };
            let up = &self.map.states[pp];
            let continues = q.mode.is_straight()
                && up.mode == q.mode
                && same_disturbance(up.d_i_fixed().as_ref(), q.d_i_fixed().as_ref());
            if !continues {
                break;
            }
            child = p;
        }
    }

    fn split_last(&mut self, id: usize) -> Result<()> {
        debug_assert_eq!(id + 1, self.map.states.len());
        let parts = split(&self.map.states[id], self.strategy.d_sub, self.cfg.horizon, self.goal.as_ref())?;
        if parts.len() == 1 && parts[0] == self.map.states[id] {
            return Ok(());
        }
        let mut parts = parts.into_iter();
        self.map.states[id] = parts.next().expect("split keeps at least one state");
        for part in parts {
            self.push_state(part);
        }
        for k in id..self.map.states.len() - 1 {
            self.enqueue(k);
        }
        Ok(())
    }

    /// Successor of `parent` in `mode`, normalised so that a straight drive
    /// with nothing to counteract is the default mode.
    fn successor(&mut self, parent: usize, mode: ControlMode, d_i: Option<Disturbance>) -> Result<()> {
        let mode = match mode {
            ControlMode::Straight if d_i.is_none() => ControlMode::Default,
            ControlMode::Default if d_i.is_some() => return Ok(()),
            m => m,
        };
        let dup = self.map.children(parent).any(|c| {
            let q = &self.map.states[c];
            q.mode == mode && same_disturbance(q.d_i_fixed().as_ref(), d_i.as_ref())
        });
        if dup {
            return Ok(());
        }
        self.chain(parent, mode, d_i)
    }

    /// Simulate a Task from the end of `parent`. A finished turn is followed
    /// straight away by its successors; straight drives join the frontier.
    fn chain(&mut self, parent: usize, mode: ControlMode, d_i: Option<Disturbance>) -> Result<()> {
        let start = self.map.states[parent].end;
        let task = TaskSpec::new(mode, d_i, start);
        let task_world = world_for_task(self.world, &task, self.cfg);
        self.map.n_objects += task_world.obstacles.len();

        let mut opts = SimOptions::default();
        if mode.is_straight() {
            if self.strategy.step_wise() {
                opts.distance_limit = Some(self.strategy.d_sub);
            }
            if self.strategy.uses_window() && d_i.is_some_and(|d| d.kind.is_obstacle()) {
                if let Some(goal) = &self.goal {
                    opts.window = Some(make_attention_window(&start, Some(goal), &self.cfg.robot)?);
                }
            }
        }
        let res = simulate_task_with(&task_world, &task, self.cfg, &opts)?;
        if res.is_empty() {
            return Ok(());
        }
        let id = self.record(parent, &task, &res);
        if res.collided {
            // Split first: the collision then lands on the last sub-state
            // and only reaches the parent when there was nothing to split.
            if self.strategy.splits() && mode.is_straight() {
                self.split_last(id)?;
            }
            self.propagate(self.map.states.len() - 1);
            return Ok(());
        }
        if mode.is_turn() && res.d_n.is_none() {
            let q = self.map.states[id];
            for e in permitted_jumps(mode, &q.end_state()) {
                let next = self.reset(&q)?;
                self.successor(id, e.to, next)?;
            }
            return Ok(());
        }
        self.enqueue(id);
        Ok(())
    }

    fn expand(&mut self, id: usize) -> Result<()> {
        self.expanded[id] = true;
        self.map.expansions.push(id);
        let q = self.map.states[id];
        for e in permitted_jumps(q.mode, &q.end_state()) {
            let next = self.reset(&q)?;
            self.successor(id, e.to, next)?;
        }
        Ok(())
    }
}

/// Best-first construction of the cognitive map from the robot's pose in
/// `world`. The root stands for the Task currently running; its continuation
/// is simulated first.
pub fn synthesize(
    world: &World,
    strategy: Strategy,
    goal: Option<&Disturbance>,
    cfg: &SimConfig,
) -> Result<CognitiveMap> {
    strategy.validate()?;
    cfg.validate()?;
    if strategy.kind == StrategyKind::Reactive {
        return Err(Error::InvalidConfig("the reactive strategy builds no map".into()));
    }
    let start = world.pose();
    let mode = if goal.is_some() {
        ControlMode::Straight
    } else {
        ControlMode::Default
    };
    let mut b = Builder {
        world,
        strategy,
        goal: goal.copied(),
        cfg,
        map: CognitiveMap {
            goal: goal.copied(),
            ..Default::default()
        },
        expanded: Vec::new(),
        queue: Vec::new(),
    };
    let (g, c) = b.costs(&start, None);
    b.push_state(PlanState {
        id: 0,
        mode,
        d_i: goal.map(|d| to_moving_frame(&start, d)),
        d_n: None,
        v0: start,
        vd: (0.0, 0.0),
        end: start,
        n_steps: 0,
        gamma: g,
        chi: c,
        phi: g + c,
        parent: None,
        counteracted: false,
        propagated: false,
        split: false,
    });
    b.chain(0, mode, goal.copied())?;
    b.enqueue(0);

    loop {
        if b.reached() {
            break;
        }
        if b.map.len() >= STATE_CAP {
            if goal.is_some() {
                return Err(Error::StateSpaceExhausted(STATE_CAP));
            }
            break;
        }
        let Some(id) = b.pop() else { break };
        b.expand(id)?;
    }
    Ok(b.map)
}

/// Path from the root to the cheapest state that reaches the goal.
pub fn extract_plan(map: &CognitiveMap, cfg: &SimConfig) -> Result<Plan> {
    let origin = map.states.first().ok_or(Error::NoPlan)?.v0;
    let by_cost = |a: &&PlanState, b: &&PlanState| a.phi.total_cmp(&b.phi).then(a.id.cmp(&b.id));
    let best = map
        .states
        .iter()
        .filter(|q| map.states.len() == 1 || q.parent.is_some())
        .filter(|q| reaches_goal(q, &origin, map.goal.as_ref(), cfg.horizon))
        .min_by(by_cost);
    let last = match best {
        Some(q) => q,
        None if map.goal.is_some() => return Err(Error::NoPlan),
        None => map.states.iter().min_by(by_cost).expect("non-empty map"),
    };
    if last.collided() {
        return Err(Error::NoPlan);
    }
    let states = map.path_to(last.id);
    let n_motor = states
        .iter()
        .map(|&s| motor_duration(map.states[s].n_steps, cfg))
        .collect();
    Ok(Plan { states, n_motor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disturbance;

    fn strategy(kind: StrategyKind) -> Strategy {
        Strategy::new(kind, 0.5)
    }

    #[test]
    fn empty_world_needs_one_drive() {
        let w = World::new(Vec::new(), Pose2::origin(), None);
        let cfg = SimConfig::default();
        let map = synthesize(&w, strategy(StrategyKind::Vanilla), None, &cfg).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.states[1].mode, ControlMode::Default);
        assert!((map.states[1].length() - 1.0).abs() < 1e-9);
        let plan = extract_plan(&map, &cfg).unwrap();
        assert_eq!(plan.states, vec![0, 1]);
        assert_eq!(plan.n_motor, vec![0, 50]);
    }

    #[test]
    fn wall_ahead_is_avoided_by_turning() {
        let wall = Disturbance::obstacle(0.6, 0.0, 0.05, 0.6);
        let w = World::new(vec![wall], Pose2::origin(), None);
        let cfg = SimConfig::default();
        let map = synthesize(&w, strategy(StrategyKind::Vanilla), None, &cfg).unwrap();
        assert!(map.states[1].collided());
        assert!(map.states[0].propagated);
        let plan = extract_plan(&map, &cfg).unwrap();
        let modes: Vec<_> = plan.states.iter().map(|&s| map.states[s].mode).collect();
        assert_eq!(modes, vec![ControlMode::Default, ControlMode::Left, ControlMode::Default]);
        assert!(plan.states.iter().all(|&s| !map.states[s].collided()));
    }

    #[test]
    fn reached_goal_ends_synthesis() {
        let goal = Disturbance::target(0.8, 0.0, 0.1, 0.1);
        let w = World::new(Vec::new(), Pose2::origin(), Some(goal));
        let cfg = SimConfig::default();
        let map = synthesize(&w, strategy(StrategyKind::Vanilla), Some(&goal), &cfg).unwrap();
        assert_eq!(map.len(), 2);
        let plan = extract_plan(&map, &cfg).unwrap();
        assert_eq!(plan.last(), 1);
    }

    #[test]
    fn ties_go_to_the_lower_id() {
        let mut map = CognitiveMap::default();
        let base = PlanState {
            id: 0,
            mode: ControlMode::Default,
            d_i: None,
            d_n: None,
            v0: Pose2::origin(),
            vd: (0.0, 0.0),
            end: Pose2::origin(),
            n_steps: 0,
            gamma: 0.0,
            chi: 0.0,
            phi: 0.0,
            parent: None,
            counteracted: false,
            propagated: false,
            split: false,
        };
        map.states.push(base);
        for id in 1..3 {
            map.states.push(PlanState {
                id,
                parent: Some(0),
                end: Pose2::new(0.0, 1.0, 0.0),
                vd: (0.0, 1.0),
                n_steps: 50,
                ..base
            });
            map.edges.push((0, id));
        }
        assert_eq!(extract_plan(&map, &SimConfig::default()).unwrap().states, vec![0, 1]);
    }

    #[test]
    fn single_state_map_plans_the_root() {
        let mut map = CognitiveMap::default();
        map.states.push(PlanState {
            id: 0,
            mode: ControlMode::Default,
            d_i: None,
            d_n: None,
            v0: Pose2::origin(),
            vd: (0.0, 0.0),
            end: Pose2::origin(),
            n_steps: 0,
            gamma: 0.0,
            chi: 0.0,
            phi: 0.0,
            parent: None,
            counteracted: false,
            propagated: false,
            split: false,
        });
        assert_eq!(extract_plan(&map, &SimConfig::default()).unwrap().states, vec![0]);
    }

    #[test]
    fn reactive_strategy_is_rejected() {
        let w = World::new(Vec::new(), Pose2::origin(), None);
        let r = synthesize(&w, strategy(StrategyKind::Reactive), None, &SimConfig::default());
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
