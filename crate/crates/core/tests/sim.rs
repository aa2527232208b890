use std::f64::consts::PI;

use coopnav::assessor::signed_contribution;
use coopnav::cli::config::{builtin_scenario, load_config};
use coopnav::decision::{Checkpoint, CueKind};
use coopnav::geometry::{shortest_path, AgentState, CorridorWorld, Pose, Rect};
use coopnav::planner::PlannerConfig;
use coopnav::sim::{
    run_scenario, step_facilitating_human, step_minimal_human, HumanModelConfig, HumanStepContext, RunTrace,
    ScenarioConfig,
};

const NAMES: [&str; 4] = ["open_minimal", "open_facilitating", "narrow_minimal", "narrow_facilitating"];

fn scenario(name: &str) -> ScenarioConfig {
    load_config(builtin_scenario(name).unwrap(), &[]).unwrap()
}

fn run(name: &str) -> RunTrace {
    run_scenario(&scenario(name)).unwrap()
}

#[test]
fn builtin_runs_are_safe_and_complete() {
    for name in NAMES {
        let t = run(name);
        let cfg = &t.config;
        assert!(!t.collided(), "{name}: min separation {}", t.min_separation);
        assert!(t.reached_goals, "{name}");
        assert!(!t.timed_out, "{name}");
        let last = t.ticks.last().unwrap();
        assert!(last.robot.position().distance(cfg.robot_goal.position()) <= cfg.goal_tolerance);
        assert!(last.human.position().distance(cfg.human_goal.position()) <= cfg.goal_tolerance);
        for w in t.ticks.windows(2) {
            assert!(w[1].time > w[0].time);
            assert!((w[1].time - w[0].time - cfg.tick_dt).abs() < 1e-9);
        }
        let (t0, t1) = (t.ticks[0].time, last.time);
        for e in &t.events {
            assert!(e.time >= t0 && e.time <= t1, "{name}: event at {}", e.time);
        }
    }
}

#[test]
fn checkpoints_fire_in_order() {
    for name in NAMES {
        let t = run(name);
        let first = t.event_at(Checkpoint::First);
        let second = t.event_at(Checkpoint::Second);
        let cross = t.crossing_time;
        if let (Some(a), Some(b), Some(c)) = (first, second, cross) {
            assert!(a.time < b.time && b.time < c, "{name}");
            let t_cross_at = |time: f64| t.ticks.iter().find(|k| k.time == time).unwrap().t_cross.unwrap();
            assert!(t_cross_at(b.time) < t_cross_at(a.time), "{name}");
        }
        assert_eq!(t.events.iter().filter(|e| e.checkpoint == Checkpoint::First).count(), first.iter().count());
        assert!(t.events.iter().filter(|e| e.checkpoint == Checkpoint::Second).count() <= 1);
        assert!(t.events.iter().filter(|e| e.checkpoint == Checkpoint::PostCross).count() <= 1);
    }
}

#[test]
fn runs_are_deterministic() {
    for name in NAMES {
        assert_eq!(run(name), run(name), "{name}");
    }
    let mut noisy = scenario("open_minimal");
    noisy.noise_std = 0.02;
    noisy.seed = 3;
    let a = run_scenario(&noisy).unwrap();
    assert_eq!(a, run_scenario(&noisy).unwrap());
    noisy.seed = 4;
    assert_ne!(a.ca_full, run_scenario(&noisy).unwrap().ca_full);
}

#[test]
fn open_facilitating_is_thanked() {
    let t = run("open_facilitating");
    assert!(t.final_cm > 0.4);
    assert!(t.is_contributing);
    assert_eq!(t.event_at(Checkpoint::PostCross).unwrap().kind, CueKind::ThankYou);
}

#[test]
fn narrow_minimal_reaches_the_dock_branch() {
    let t = run("narrow_minimal");
    let ev = t.event_at(Checkpoint::Second).unwrap();
    assert!(matches!(ev.kind, CueKind::DockToWall | CueKind::AskMoveMore));
    if ev.kind == CueKind::DockToWall {
        assert_eq!(ev.flag("robot_is_constrained"), Some(true));
        assert_eq!(ev.flag("is_contributing"), Some(false));
        assert!(t.ticks.iter().any(|k| k.docking));
    }
}

#[test]
fn facilitating_human_yields_early_and_away_from_the_robot() {
    for name in ["open_facilitating", "narrow_facilitating"] {
        let t = run(name);
        let cfg = &t.config;
        let path = shortest_path(
            &cfg.world,
            &cfg.human_start,
            &cfg.human_goal,
            cfg.human_radius,
            cfg.human_speed,
            cfg.tick_dt,
        )
        .unwrap();
        let onset = t
            .ticks
            .iter()
            .find(|k| signed_contribution(k.human.position(), &path, k.robot.position()).abs() > 0.05)
            .unwrap();
        let gap = onset.human.position().distance(onset.robot.position());
        assert!(gap >= 3.0, "{name}: deviation starts at separation {gap}");
        assert!(signed_contribution(onset.human.position(), &path, onset.robot.position()) > 0.0);
    }
}

#[test]
fn minimal_human_contributes_only_late() {
    for name in ["open_minimal", "narrow_minimal"] {
        let t = run(name);
        let ca = &t.ca_full;
        assert!(!ca.is_empty());
        let early = (ca.len() as f64 * 0.6).floor() as usize;
        assert!(ca[..early].iter().all(|c| c.abs() < 0.05), "{name}: {ca:?}");
    }
}

#[test]
fn disjoint_corridors_stay_silent() {
    let mut cfg = scenario("open_minimal");
    let walls = vec![
        Rect::from_coords(0.0, -0.2, 10.0, 0.0).unwrap(),
        Rect::from_coords(0.0, 4.0, 10.0, 4.2).unwrap(),
        Rect::from_coords(0.0, 1.9, 10.0, 2.1).unwrap(),
    ];
    cfg.world = CorridorWorld::new(walls, 4.0, Rect::from_coords(0.0, -0.2, 10.0, 4.2).unwrap()).unwrap();
    cfg.robot_start = Pose::new(0.3, 0.95, 0.0);
    cfg.robot_goal = Pose::new(9.8, 0.95, 0.0);
    cfg.human_start = Pose::new(9.7, 3.05, PI);
    cfg.human_goal = Pose::new(0.2, 3.05, PI);
    for policy in [coopnav::sim::HumanPolicy::MinimallyContributing, coopnav::sim::HumanPolicy::Facilitating] {
        cfg.human_policy = policy;
        let t = run_scenario(&cfg).unwrap();
        assert!(!t.events.is_empty());
        assert!(t.events.iter().all(|e| e.kind == CueKind::Silent), "{:?}", t.events);
        assert!(!t.collided());
        assert!(t.reached_goals);
    }
}

#[test]
fn human_ignores_a_distant_robot() {
    let world = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
    let model = HumanModelConfig::default();
    let ctx = HumanStepContext {
        world: &world,
        model: &model,
        speed: 0.5,
        dt: 0.25,
    };
    let goal = Pose::new(0.2, 2.0, PI);
    let start = Pose::new(9.7, 2.0, PI);
    let path = shortest_path(&world, &start, &goal, 0.25, 0.5, 0.25).unwrap();
    let human = AgentState::new(start, 0.5, 0.25).unwrap();
    // robot far behind the human, already past it
    let robot = AgentState::new(Pose::new(9.9, 0.5, 0.0), 0.5, 0.2).unwrap();
    let robot_goal = Pose::new(9.95, 0.5, 0.0);
    let minimal = step_minimal_human(&human, &robot, &goal, &path, &ctx);
    assert!(coopnav::geometry::deviation_from_path(&path, minimal.position()) < 1e-12);
    let (facil, ok) =
        step_facilitating_human(&human, &robot, &robot_goal, &goal, &path, &PlannerConfig::default(), &ctx);
    assert!(ok);
    assert!(coopnav::geometry::deviation_from_path(&path, facil.position()) <= 1e-3);
}

#[test]
fn minimal_human_reacts_inside_the_activation_radius() {
    let world = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
    let model = HumanModelConfig::default();
    let ctx = HumanStepContext {
        world: &world,
        model: &model,
        speed: 0.5,
        dt: 0.25,
    };
    let goal = Pose::new(0.2, 2.0, PI);
    let path = shortest_path(&world, &Pose::new(9.7, 2.0, PI), &goal, 0.25, 0.5, 0.25).unwrap();
    let human = AgentState::new(Pose::new(5.0, 2.0, PI), 0.5, 0.25).unwrap();
    let robot = AgentState::new(Pose::new(3.8, 2.3, 0.0), 0.5, 0.2).unwrap();
    let next = step_minimal_human(&human, &robot, &goal, &path, &ctx);
    let d_g = signed_contribution(next.position(), &path, robot.position());
    assert!(d_g > 0.0);
}
