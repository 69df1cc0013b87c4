mod common;

use closedloop::automaton::ControlMode;
use closedloop::geometry::{Disturbance, DisturbanceKind, Pose2};
use closedloop::planner::{extract_plan, synthesize, Strategy, StrategyKind};
use closedloop::simulator::{SimConfig, World};

use common::brute_force;

fn searched(world: &World, goal: Option<&Disturbance>) -> (Vec<ControlMode>, Pose2, f64) {
    let cfg = SimConfig::default();
    let map = synthesize(world, Strategy::new(StrategyKind::Vanilla, 0.5), goal, &cfg).unwrap();
    let plan = extract_plan(&map, &cfg).unwrap();
    let last = map.states[plan.last()];
    (plan.states[1..].iter().map(|&s| map.states[s].mode).collect(), last.end, last.phi)
}

fn compare(world: &World, goal: Option<&Disturbance>) -> (Vec<ControlMode>, Vec<ControlMode>) {
    let (modes, end, phi) = searched(world, goal);
    let leaf = brute_force(world, goal, 4, &SimConfig::default()).expect("oracle finds a sequence");
    assert!((end.x - leaf.end.x).abs() < 1e-9 && (end.y - leaf.end.y).abs() < 1e-9);
    assert!((phi - leaf.phi).abs() < 1e-12);
    (modes, leaf.modes)
}

#[test]
fn wall_ahead_without_goal() {
    let wall = Disturbance::obstacle(0.6, 0.0, 0.05, 0.6);
    let world = World::new(vec![wall], Pose2::origin(), None);
    let (a, b) = compare(&world, None);
    assert_eq!(a, b);
    assert_eq!(a, vec![ControlMode::Left, ControlMode::Default]);
}

#[test]
fn box_ahead_goal_to_the_left() {
    // The goal faces the way the robot arrives, so nothing after reaching
    // it can lower the cost.
    let goal = Disturbance::new(0.0, 0.8, std::f64::consts::FRAC_PI_2, 0.1, 0.1, DisturbanceKind::Target);
    let box_ = Disturbance::obstacle(0.5, 0.0, 0.1, 0.2);
    let world = World::new(vec![box_], Pose2::origin(), Some(goal));
    let (a, b) = compare(&world, Some(&goal));
    assert_eq!(a, b);
    assert_eq!(a, vec![ControlMode::Left, ControlMode::Straight]);
}

#[test]
fn search_stops_at_the_first_goal_state() {
    // With the goal facing across the approach, a final turn would align
    // the robot with it. The search has already stopped by then, so the
    // exhaustive optimum is one Task longer and cheaper.
    let goal = Disturbance::target(0.0, 0.8, 0.1, 0.1);
    let box_ = Disturbance::obstacle(0.5, 0.0, 0.1, 0.2);
    let world = World::new(vec![box_], Pose2::origin(), Some(goal));
    let (modes, _, phi) = searched(&world, Some(&goal));
    let leaf = brute_force(&world, Some(&goal), 4, &SimConfig::default()).unwrap();
    assert_eq!(modes, vec![ControlMode::Left, ControlMode::Straight]);
    assert_eq!(leaf.modes, vec![ControlMode::Left, ControlMode::Straight, ControlMode::Right]);
    assert!(leaf.phi < phi);
}
