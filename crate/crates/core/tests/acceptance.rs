mod common;

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use closedloop::automaton::ControlMode;
use closedloop::geometry::{to_fixed_frame, to_moving_frame, Disturbance, DisturbanceKind, Pose2};
use closedloop::harness::export::runs_json;
use closedloop::harness::{builtin_scenarios, pearson, run_suite, RunRecord};
use closedloop::planner::{chi, extract_plan, gamma, shift, split, synthesize, PlanState, Strategy, StrategyKind};
use closedloop::simulator::{SimConfig, World};

use common::brute_force;

type Check = std::result::Result<String, String>;

const REPETITIONS: usize = 3;

fn runs<'a>(recs: &'a [RunRecord], scenario: &'a str, k: StrategyKind) -> impl Iterator<Item = &'a RunRecord> {
    recs.iter().filter(move |r| r.scenario == scenario && r.strategy == k)
}

fn mean_states(recs: &[RunRecord], scenario: &str, k: StrategyKind) -> f64 {
    let v: Vec<f64> = runs(recs, scenario, k).map(|r| r.n_states as f64).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_objects(recs: &[RunRecord], scenario: &str, k: StrategyKind) -> f64 {
    let v: Vec<f64> = runs(recs, scenario, k).map(|r| r.n_objects as f64).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn real_time(recs: &[RunRecord]) -> Check {
    let planned: Vec<&RunRecord> = recs.iter().filter(|r| r.strategy != StrategyKind::Reactive).collect();
    let worst = planned.iter().map(|r| r.planning_time).fold(0.0, f64::max);
    ensure(
        !planned.is_empty() && worst < 0.1,
        format!("{} runs, slowest {:.3} ms", planned.len(), worst * 1e3),
    )
}

fn cul_de_sac_counts(recs: &[RunRecord]) -> Check {
    use StrategyKind::*;
    let m = |k| mean_states(recs, "cul-de-sac", k);
    let (s1, s2, s3, s4) = (m(Vanilla), m(StepWise), m(SplitOnly), m(SplitWindow));
    let msg = format!("S1 {s1:.2}, S2 {s2:.2}, S3 {s3:.2}, S4 {s4:.2}");
    ensure((s1 - 7.0).abs() <= 2.0 && (s4 - 8.0).abs() <= 2.0 && s2 > s1 && s2 > s3 && s2 > s4, msg)
}

fn cul_de_sac_success(recs: &[RunRecord]) -> Check {
    let planned: Vec<&RunRecord> = recs
        .iter()
        .filter(|r| r.scenario == "cul-de-sac" && r.strategy != StrategyKind::Reactive)
        .collect();
    let planned_ok = !planned.is_empty() && planned.iter().all(|r| r.success && !r.collided && !r.entered_pocket);
    let reactive: Vec<&RunRecord> = runs(recs, "cul-de-sac", StrategyKind::Reactive).collect();
    let pocketed = reactive.iter().filter(|r| r.entered_pocket).count();
    ensure(
        planned_ok && !reactive.is_empty() && pocketed == reactive.len(),
        format!("S1-S4 clear of the pocket: {planned_ok}; S0 entered it in {pocketed}/{}", reactive.len()),
    )
}

fn overtaking_outcomes(recs: &[RunRecord]) -> Check {
    let s0: Vec<&RunRecord> = runs(recs, "overtaking", StrategyKind::Reactive).collect();
    let s1: Vec<&RunRecord> = runs(recs, "overtaking", StrategyKind::Vanilla).collect();
    let s0_fail = !s0.is_empty() && s0.iter().all(|r| !r.success);
    let s1_stuck = !s1.is_empty() && s1.iter().all(|r| {
        let Some(map) = &r.map else { return false };
        let dead = |s: &PlanState| s.collided() || s.propagated;
        let leaves_dead = map.states.iter().filter(|s| map.children(s.id).next().is_none()).all(dead);
        r.plan.is_none() && r.outcome.contains("no collision-free plan") && map.states[1..].iter().all(dead) && leaves_dead
    });
    let mut worst: f64 = 0.0;
    let mut late_ok = true;
    for k in [StrategyKind::StepWise, StrategyKind::SplitOnly, StrategyKind::SplitWindow] {
        late_ok &= runs(recs, "overtaking", k).next().is_some();
        for r in runs(recs, "overtaking", k) {
            let end = r.trajectory.last().unwrap();
            let d = (end.x - 1.0).hypot(end.y);
            worst = worst.max(d);
            late_ok &= r.success && d <= 0.15;
        }
    }
    ensure(
        s0_fail && s1_stuck && late_ok,
        format!("S0 fails: {s0_fail}; S1 no plan: {s1_stuck}; S2-S4 reach goal: {late_ok} (worst {worst:.3} m)"),
    )
}

fn overtaking_ordering(recs: &[RunRecord]) -> Check {
    use StrategyKind::*;
    let m = |k| mean_states(recs, "overtaking", k);
    let o = |k| mean_objects(recs, "overtaking", k);
    let (s2, s3, s4) = (m(StepWise), m(SplitOnly), m(SplitWindow));
    let close = (s3 - s4).abs() <= 0.2 * s3.max(s4);
    let most = [Vanilla, SplitOnly, SplitWindow].iter().all(|&k| o(StepWise) > o(k));
    ensure(
        s2 > s3 && s2 > s4 && close && most,
        format!(
            "states S2 {s2:.1}, S3 {s3:.1}, S4 {s4:.1}; objects S2 {:.1}, S3 {:.1}, S4 {:.1}",
            o(StepWise),
            o(SplitOnly),
            o(SplitWindow)
        ),
    )
}

fn oracle_equivalence() -> Check {
    let cfg = SimConfig::default();
    let goal = Disturbance::new(0.0, 0.8, FRAC_PI_2, 0.1, 0.1, DisturbanceKind::Target);
    let worlds = [
        (World::new(vec![Disturbance::obstacle(0.6, 0.0, 0.05, 0.6)], Pose2::origin(), None), None),
        (World::new(vec![Disturbance::obstacle(0.5, 0.0, 0.1, 0.2)], Pose2::origin(), Some(goal)), Some(goal)),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (world, goal) in &worlds {
        let map = synthesize(world, Strategy::new(StrategyKind::Vanilla, 0.5), goal.as_ref(), &cfg).map_err(|e| e.to_string())?;
        let plan = extract_plan(&map, &cfg).map_err(|e| e.to_string())?;
        let last = map.states[plan.last()];
        let leaf = brute_force(world, goal.as_ref(), 4, &cfg).ok_or("oracle found nothing")?;
        let modes: Vec<ControlMode> = plan.states[1..].iter().map(|&s| map.states[s].mode).collect();
        ok &= modes == leaf.modes
            && (last.end.x - leaf.end.x).abs() < 1e-9
            && (last.end.y - leaf.end.y).abs() < 1e-9
            && (last.phi - leaf.phi).abs() < 1e-12;
        notes.push(format!("{:?} phi {:.4}", leaf.modes, leaf.phi));
    }
    ensure(ok, notes.join("; "))
}

fn straight(len: f64) -> PlanState {
    PlanState {
        id: 1,
        mode: ControlMode::Straight,
        d_i: None,
        d_n: Some(Disturbance::obstacle(0.1, 0.0, 0.05, 0.5).with_kind(DisturbanceKind::ObstacleCollided)),
        v0: Pose2::origin(),
        vd: (len, 0.0),
        end: Pose2::new(len, 0.0, 0.0),
        n_steps: (len / 0.02).round() as usize,
        gamma: 0.0,
        chi: 0.0,
        phi: 0.0,
        parent: Some(0),
        counteracted: false,
        propagated: false,
        split: false,
    }
}

fn suites(recs: &[RunRecord], cfg: &SimConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failed = Vec::new();
    for _ in 0..2000 {
        let p = Pose2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-3.1..3.1));
        let d = Disturbance::obstacle(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), 0.1, 0.2);
        let back = to_fixed_frame(&p, &to_moving_frame(&p, &d));
        if (back.x - d.x).abs() > 1e-9 || (back.y - d.y).abs() > 1e-9 {
            failed.push("frame round-trip");
            break;
        }
        let v = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let s = shift(&shift(&d, v), (-v.0, -v.1));
        if (s.x - d.x).abs() > 1e-12 || (s.y - d.y).abs() > 1e-12 {
            failed.push("shift inverse");
            break;
        }
        let g = gamma(Some(&d.with_kind(DisturbanceKind::ObstacleCollided)), 1.0);
        let c = chi(Some(&Disturbance::target(d.x / 5.0, d.y / 5.0, 0.1, 0.1)), 1.0);
        if !(0.0..=1.0).contains(&g) || !(0.0..=0.5).contains(&c) {
            failed.push("cost bounds");
            break;
        }
    }
    for steps in 1usize..100 {
        for sub in 1..30 {
            let parts = split(&straight(steps as f64 * 0.02), sub as f64 * 0.02, 1.0, None).map_err(|e| e.to_string())?;
            let total: f64 = parts.iter().map(|p| p.length()).sum();
            if (total - steps as f64 * 0.02).abs() > 1e-9 || parts.len() != steps.div_ceil(sub) {
                failed.push("split conservation");
            }
        }
    }
    for r in recs {
        let Some(map) = &r.map else { continue };
        if map.states.iter().any(|s| (s.phi - s.gamma - s.chi).abs() > 1e-12) {
            failed.push("phi additivity");
        }
        let mut scaled = map.clone();
        scaled.states.iter_mut().for_each(|s| s.phi *= 3.7);
        if extract_plan(map, cfg).ok().map(|p| p.states) != extract_plan(&scaled, cfg).ok().map(|p| p.states) {
            failed.push("argmin scaling");
        }
    }
    let xs: Vec<f64> = (0..10).map(f64::from).collect();
    let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
    let down: Vec<f64> = xs.iter().map(|x| 3.0 - x).collect();
    if (pearson(&xs, &up).unwrap() - 1.0).abs() > 1e-12 || (pearson(&xs, &down).unwrap() + 1.0).abs() > 1e-12 {
        failed.push("pearson");
    }
    let again = run_suite(&builtin_scenarios(), REPETITIONS, 0, cfg).map_err(|e| e.to_string())?;
    if runs_json(recs).map_err(|e| e.to_string())? != runs_json(&again).map_err(|e| e.to_string())? {
        failed.push("determinism");
    }
    failed.dedup();
    ensure(
        failed.is_empty(),
        if failed.is_empty() { "all invariants hold, runs.json byte-identical".into() } else { failed.join(", ") },
    )
}

fn split_formula() -> Check {
    let parts = split(&straight(1.35), 0.5, 1.0, None).map_err(|e| e.to_string())?;
    let got: Vec<f64> = parts.iter().map(|p| p.length()).collect();
    // 135 cm in 50 cm pieces.
    let (whole, rest) = (135 / 50, 135 % 50);
    let mut want = vec![0.5; whole];
    want.push(rest as f64 / 100.0);
    let ok = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9);
    ensure(ok, format!("{got:?}"))
}

fn main() -> ExitCode {
    let cfg = SimConfig::default();
    let recs = match run_suite(&builtin_scenarios(), REPETITIONS, 0, &cfg) {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let checks: [(&str, Check); 8] = [
        ("real-time bound", real_time(&recs)),
        ("cul-de-sac state counts", cul_de_sac_counts(&recs)),
        ("cul-de-sac success", cul_de_sac_success(&recs)),
        ("overtaking outcomes", overtaking_outcomes(&recs)),
        ("overtaking ordering", overtaking_ordering(&recs)),
        ("oracle equivalence", oracle_equivalence()),
        ("unit and property invariants", suites(&recs, &cfg)),
        ("split formula", split_formula()),
    ];
    let mut all = true;
    for (i, (name, res)) in checks.iter().enumerate() {
        match res {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                all = false;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
