//! Two-checkpoint cue pipeline.
//!
//! The first checkpoint fires when the estimated time to cross drops to 7 s
//! and starts the contribution recorder; the second fires at 4 s and may ask
//! for more room or send the robot to dock; after the agents cross, a
//! facilitating human is thanked. Each checkpoint emits exactly one
//! [`CueEvent`] whose rationale lists the values that selected the branch.

use serde::{Deserialize, Serialize};

use crate::assessor::{
    contribution_metric, is_contributing, reset_recorder, still_needs_to_contribute, ContributionRecord,
    CrossingInfo, Direction, SituationPredicates, Thresholds,
};
use crate::error::{Error, Result};
use crate::geometry::{AgentState, Band, CorridorWorld, Pose, Vec2, project_onto_polyline};

/// Estimated time to cross at which the first checkpoint fires, s.
pub const FIRST_CHECKPOINT_T_CROSS: f64 = 7.0;
/// Estimated time to cross at which the second checkpoint fires, s.
pub const SECOND_CHECKPOINT_T_CROSS: f64 = 4.0;
/// Gap left between the docked robot's footprint and the wall, m.
pub const DOCK_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dir")]
pub enum CueKind {
    InformDirection(Direction),
    InformConstrainedSuggestDirection(Direction),
    IndicateWillDockIfNeeded,
    AskMoveMore,
    DockToWall,
    ThankYou,
    Silent,
}

impl CueKind {
    pub fn name(&self) -> &'static str {
        match self {
            CueKind::InformDirection(_) => "InformDirection",
            CueKind::InformConstrainedSuggestDirection(_) => "InformConstrainedSuggestDirection",
            CueKind::IndicateWillDockIfNeeded => "IndicateWillDockIfNeeded",
            CueKind::AskMoveMore => "AskMoveMore",
            CueKind::DockToWall => "DockToWall",
            CueKind::ThankYou => "ThankYou",
            CueKind::Silent => "Silent",
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            CueKind::InformDirection(d) | CueKind::InformConstrainedSuggestDirection(d) => Some(*d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Checkpoint {
    First,
    Second,
    PostCross,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationaleValue {
    Flag(bool),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationaleEntry {
    pub name: String,
    pub value: RationaleValue,
}

fn flag(name: &str, v: bool) -> RationaleEntry {
    RationaleEntry {
        name: name.to_owned(),
        value: RationaleValue::Flag(v),
    }
}

fn value(name: &str, v: f64) -> RationaleEntry {
    RationaleEntry {
        name: name.to_owned(),
        value: RationaleValue::Value(v),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CueEvent {
    pub time: f64,
    #[serde(flatten)]
    pub kind: CueKind,
    pub checkpoint: Checkpoint,
    pub rationale: Vec<RationaleEntry>,
}

impl CueEvent {
    pub fn flag(&self, name: &str) -> Option<bool> {
        self.rationale.iter().find(|e| e.name == name).and_then(|e| match e.value {
            RationaleValue::Flag(b) => Some(b),
            RationaleValue::Value(_) => None,
        })
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.rationale.iter().find(|e| e.name == name).and_then(|e| match e.value {
            RationaleValue::Value(v) => Some(v),
            RationaleValue::Flag(_) => None,
        })
    }
}

fn predicate_rationale(preds: &SituationPredicates) -> Vec<RationaleEntry> {
    vec![
        flag("human_needs_to_contribute", preds.human_needs_to_contribute),
        flag("human_is_constrained", preds.human_is_constrained),
        flag("robot_is_constrained", preds.robot_is_constrained),
    ]
}

/// Branch of the first checkpoint.
pub fn first_checkpoint_cue(preds: &SituationPredicates, dir: Direction) -> CueKind {
    match (
        preds.human_needs_to_contribute,
        preds.robot_is_constrained,
        preds.human_is_constrained,
    ) {
        (true, false, _) => CueKind::InformDirection(dir),
        (true, true, false) => CueKind::InformConstrainedSuggestDirection(dir),
        (true, true, true) => CueKind::IndicateWillDockIfNeeded,
        (false, true, _) => CueKind::InformDirection(dir),
        (false, false, _) => CueKind::Silent,
    }
}

pub fn first_checkpoint(time: f64, preds: &SituationPredicates, info: &CrossingInfo) -> CueEvent {
    CueEvent {
        time,
        kind: first_checkpoint_cue(preds, info.dir),
        checkpoint: Checkpoint::First,
        rationale: predicate_rationale(preds),
    }
}

/// Second checkpoint. Returns the recorder, reset when the robot is
/// constrained and the contribution had to be judged.
pub fn second_checkpoint(
    time: f64,
    cm: f64,
    d_h: f64,
    preds_now: &SituationPredicates,
    info_now: &CrossingInfo,
    rec: &ContributionRecord,
    th: &Thresholds,
) -> (CueEvent, ContributionRecord) {
    let still_needs = still_needs_to_contribute(cm, d_h);
    let mut rationale = vec![
        value("cm", cm),
        value("d_h", d_h),
        flag("still_needs_to_contribute", still_needs),
        flag("robot_is_constrained", preds_now.robot_is_constrained),
    ];
    let (kind, rec) = if !still_needs {
        (CueKind::Silent, rec.clone())
    } else if !preds_now.robot_is_constrained {
        (CueKind::InformDirection(info_now.dir), rec.clone())
    } else {
        let contributing = is_contributing(cm, th);
        rationale.push(flag("is_contributing", contributing));
        let kind = if contributing {
            CueKind::AskMoveMore
        } else {
            CueKind::DockToWall
        };
        (kind, reset_recorder(rec))
    };
    (
        CueEvent {
            time,
            kind,
            checkpoint: Checkpoint::Second,
            rationale,
        },
        rec,
    )
}

/// Thanks the human when the final record shows a contribution. An empty
/// record counts as no contribution.
pub fn post_cross(time: f64, rec_final: &ContributionRecord, th: &Thresholds) -> CueEvent {
    let cm = contribution_metric(rec_final).unwrap_or(0.0);
    let contributing = is_contributing(cm, th);
    CueEvent {
        time,
        kind: if contributing {
            CueKind::ThankYou
        } else {
            CueKind::Silent
        },
        checkpoint: Checkpoint::PostCross,
        rationale: vec![value("cm", cm), flag("is_contributing", contributing)],
    }
}

/// A pose next to the wall nearest the robot on the side away from the
/// human, with `DOCK_GAP` between footprint and wall. Heading unchanged.
pub fn dock_target(world: &CorridorWorld, robot: &AgentState, human_pose: &Pose) -> Result<Pose> {
    let here = robot.position();
    let (_, foot) = world
        .nearest_wall_point_on_side(here, human_pose.position())
        .ok_or(Error::NoDockWall)?;
    let out = (here - foot)
        .normalized()
        .or_else(|| (here - human_pose.position()).normalized())
        .ok_or(Error::NoDockWall)?;
    let p = foot + out * (robot.radius + DOCK_GAP);
    Ok(Pose::from_position(p, robot.pose.theta))
}

/// Signed longitudinal order of robot and human along the human's path
/// direction at the human's projection. Positive while the robot is ahead.
pub fn longitudinal_order(robot: Vec2, human: Vec2, human_path: &Band) -> f64 {
    let proj = project_onto_polyline(&human_path.positions(), human, human_path.first().heading());
    (robot - human).dot(proj.tangent)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Idle,
    Recording,
    SecondWindow,
    Crossed,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineState {
    pub phase: Phase,
    pub first_checkpoint_fired: bool,
    pub second_checkpoint_fired: bool,
    pub thanked: bool,
}

impl Default for PipelineState {
    fn default() -> Self {
        Self {
            phase: Phase::Idle,
            first_checkpoint_fired: false,
            second_checkpoint_fired: false,
            thanked: false,
        }
    }
}

/// Order-enforcing wrapper around the checkpoint functions.
#[derive(Debug, Clone, Default)]
pub struct DecisionPipeline {
    state: PipelineState,
    post_cross_fired: bool,
}

impl DecisionPipeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &PipelineState {
        &self.state
    }

    /// True while the contribution recorder should be sampling.
    pub fn is_recording(&self) -> bool {
        matches!(self.state.phase, Phase::Recording | Phase::SecondWindow)
    }

    pub fn first_checkpoint(
        &mut self,
        time: f64,
        preds: &SituationPredicates,
        info: &CrossingInfo,
    ) -> Result<CueEvent> {
        if self.state.first_checkpoint_fired {
            return Err(Error::CheckpointAlreadyFired(Checkpoint::First));
        }
        if self.state.phase != Phase::Idle {
            return Err(Error::PipelineOrder("first checkpoint after the crossing"));
        }
        self.state.first_checkpoint_fired = true;
        self.state.phase = Phase::Recording;
        Ok(first_checkpoint(time, preds, info))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn second_checkpoint(
        &mut self,
        time: f64,
        cm: f64,
        d_h: f64,
        preds_now: &SituationPredicates,
        info_now: &CrossingInfo,
        rec: &ContributionRecord,
        th: &Thresholds,
    ) -> Result<(CueEvent, ContributionRecord)> {
        if !self.state.first_checkpoint_fired {
            return Err(Error::PipelineOrder("second checkpoint before the first"));
        }
        if self.state.second_checkpoint_fired {
            return Err(Error::CheckpointAlreadyFired(Checkpoint::Second));
        }
        if self.state.phase != Phase::Recording {
            return Err(Error::PipelineOrder("second checkpoint after the crossing"));
        }
        self.state.second_checkpoint_fired = true;
        self.state.phase = Phase::SecondWindow;
        Ok(second_checkpoint(time, cm, d_h, preds_now, info_now, rec, th))
    }

    /// Stops the recorder and emits the closing cue.
    pub fn post_cross(&mut self, time: f64, rec_final: &ContributionRecord, th: &Thresholds) -> Result<CueEvent> {
        if self.post_cross_fired {
            return Err(Error::CheckpointAlreadyFired(Checkpoint::PostCross));
        }
        self.post_cross_fired = true;
        self.state.phase = Phase::Crossed;
        let ev = post_cross(time, rec_final, th);
        self.state.thanked = ev.kind == CueKind::ThankYou;
        self.state.phase = Phase::Done;
        Ok(ev)
    }
}
