//! Explanation generation for model reconciliation.
//!
//! A [`ReconciliationProblem`] pairs the robot's model with the human's
//! model of the robot and the robot's plan. Explanations are sets of
//! features from the robot model that the human model lacks. [`mce`] finds a
//! smallest set after which the robot's plan is optimal for the human;
//! [`oeg_pp`], [`oeg_na`] and [`oeg_ap`] spread explanations over the plan's
//! execution, and [`verify_online`] replays any explanation and checks the
//! condition its variant promises.

mod mce;
mod online;
mod space;
mod trace;
mod verify;

pub use mce::{mce, mce_random};
pub use online::{oeg_ap, oeg_na, oeg_pp, PpMode, DEFAULT_EXACT_THRESHOLD};
pub use trace::{Trace, TracePart};
pub use verify::{verify_online, StepCheck, VerificationReport};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{diff, FactSet, FeatureSet, GroundedModel, ModelDiff, ModelError};
use crate::pddl::GroundedTask;
use crate::planner::{optimal_cost, plan_optimal, validate, Plan, PlanError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReconcileError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("human model has features the robot model lacks: {}", .0.join(", "))]
    ExtraFeatures(Vec<String>),
    #[error("robot plan is invalid at step {step}")]
    InvalidRobotPlan { step: usize },
    #[error("robot plan costs {cost} but the optimal cost is {optimal}")]
    NonOptimalRobotPlan { cost: u64, optimal: u64 },
    #[error("robot model has no plan for the goal")]
    RobotUnsolvable,
    #[error("the planner's plan for the robot model differs from the supplied plan")]
    NonCanonicalPlan,
    #[error("even the full missing diff does not make the robot plan optimal")]
    NotReconcilable,
    #[error("exact mode needs at most {threshold} missing features, found {features}")]
    ExactModeTooLarge { features: usize, threshold: usize },
    #[error("no feature subset restores the condition at step {step}")]
    SearchExhausted { step: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Robot model, human model, task and the robot's optimal plan.
#[derive(Debug, Clone)]
pub struct ReconciliationProblem {
    robot: GroundedModel,
    human: GroundedModel,
    init: FactSet,
    goal: FactSet,
    robot_plan: Plan,
    diff: ModelDiff,
}

impl ReconciliationProblem {
    /// Checks that `robot_plan` is valid and optimal in the robot model and
    /// that the human model has nothing the robot model lacks.
    pub fn new(
        robot: GroundedModel,
        human: GroundedModel,
        init: FactSet,
        goal: FactSet,
        robot_plan: Plan,
    ) -> Result<Self, ReconcileError> {
        let diff = diff(&robot, &human)?;
        if !diff.extra.is_empty() {
            return Err(ReconcileError::ExtraFeatures(diff.extra.names()));
        }
        let cost = validate(&robot, &init, &goal, &robot_plan.actions)
            .map_err(|e| ReconcileError::InvalidRobotPlan { step: e.step })?;
        let optimal = optimal_cost(&robot, &init, &goal).ok_or(ReconcileError::RobotUnsolvable)?;
        if cost != optimal {
            return Err(ReconcileError::NonOptimalRobotPlan { cost, optimal });
        }
        Ok(ReconciliationProblem {
            robot,
            human,
            init,
            goal,
            robot_plan: Plan::new(robot_plan.actions, cost),
            diff,
        })
    }

    /// Uses the planner's own plan for the robot model.
    pub fn with_canonical_plan(
        robot: GroundedModel,
        human: GroundedModel,
        init: FactSet,
        goal: FactSet,
    ) -> Result<Self, ReconcileError> {
        let plan = plan_optimal(&robot, &init, &goal).ok_or(ReconcileError::RobotUnsolvable)?;
        Self::new(robot, human, init, goal, plan)
    }

    /// Builds from a grounded robot task and a human model over its universe.
    pub fn from_task(task: &GroundedTask, human: GroundedModel) -> Result<Self, ReconcileError> {
        Self::with_canonical_plan(task.model.clone(), human, task.init.clone(), task.goal.clone())
    }

    pub fn robot(&self) -> &GroundedModel {
        &self.robot
    }

    pub fn human(&self) -> &GroundedModel {
        &self.human
    }

    pub fn init(&self) -> &FactSet {
        &self.init
    }

    pub fn goal(&self) -> &FactSet {
        &self.goal
    }

    pub fn robot_plan(&self) -> &Plan {
        &self.robot_plan
    }

    /// Features of the robot model absent from the human model.
    pub fn missing(&self) -> &FeatureSet {
        &self.diff.missing
    }

    /// Whether the planner returns exactly the robot plan for the robot model.
    pub fn is_canonical(&self) -> bool {
        plan_optimal(&self.robot, &self.init, &self.goal).is_some_and(|p| p.actions == self.robot_plan.actions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "mce")]
    Mce,
    #[serde(rename = "mce-r")]
    MceR,
    #[serde(rename = "oeg-pp")]
    Pp,
    #[serde(rename = "oeg-na")]
    Na,
    #[serde(rename = "oeg-ap")]
    Ap,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Mce, Variant::MceR, Variant::Pp, Variant::Na, Variant::Ap];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Mce => "mce",
            Variant::MceR => "mce-r",
            Variant::Pp => "oeg-pp",
            Variant::Na => "oeg-na",
            Variant::Ap => "oeg-ap",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == s)
    }

    /// Whether part steps must strictly increase.
    pub fn strictly_increasing(self) -> bool {
        matches!(self, Variant::Pp | Variant::Na | Variant::Ap)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Features communicated before executing 1-based plan step `step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubExplanation {
    pub features: FeatureSet,
    pub step: usize,
}

/// Something a generator wants the caller to know about its output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Note {
    /// Candidate search ran out of budget; the remaining diff was emitted
    /// as one final part at this step.
    Fallback { step: usize },
    /// No subset of the remaining diff makes this position match.
    PositionUnfixable { step: usize },
    /// A part landed on the same step as its predecessor and was merged.
    Merged { step: usize },
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Note::Fallback { step } => write!(f, "fallback at step {step}"),
            Note::PositionUnfixable { step } => write!(f, "position {step} unfixable"),
            Note::Merged { step } => write!(f, "merged parts at step {step}"),
        }
    }
}

/// Ordered sub-explanations produced by one generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnlineExplanation {
    pub variant: Variant,
    pub parts: Vec<SubExplanation>,
    pub notes: Vec<Note>,
}

impl OnlineExplanation {
    pub fn new(variant: Variant) -> Self {
        OnlineExplanation {
            variant,
            parts: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// An offline explanation delivered in full before the first step.
    pub fn offline(features: FeatureSet) -> Self {
        let mut out = Self::new(Variant::Mce);
        if !features.is_empty() {
            out.parts.push(SubExplanation { features, step: 1 });
        }
        out
    }

    /// Appends a part, merging into the previous one when the step repeats.
    pub(crate) fn push(&mut self, features: FeatureSet, step: usize) {
        match self.parts.last_mut() {
            Some(last) if last.step == step => {
                last.features.extend(features);
                self.notes.push(Note::Merged { step });
            }
            _ => self.parts.push(SubExplanation { features, step }),
        }
    }

    /// Union of all parts.
    pub fn features(&self) -> FeatureSet {
        self.parts.iter().flat_map(|p| p.features.iter().cloned()).collect()
    }

    /// Σ|e_k|.
    pub fn total_features(&self) -> usize {
        self.parts.iter().map(|p| p.features.len()).sum()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Σ|e_k| over the number of parts; 0 when there are none.
    pub fn avg_part_size(&self) -> f64 {
        if self.parts.is_empty() {
            0.0
        } else {
            self.total_features() as f64 / self.parts.len() as f64
        }
    }
}

/// Knobs shared by every generator run through [`explain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExplainOptions {
    /// Seed for [`mce_random`].
    pub seed: u64,
    /// Use the exact prefix-preserving search for `oeg-pp`.
    pub exact: bool,
}

/// Runs the generator for `variant`.
pub fn explain(
    problem: &ReconciliationProblem,
    variant: Variant,
    options: ExplainOptions,
) -> Result<OnlineExplanation, ReconcileError> {
    match variant {
        Variant::Mce => mce(problem).map(OnlineExplanation::offline),
        Variant::MceR => mce_random(problem, options.seed),
        Variant::Pp => oeg_pp(problem, if options.exact { PpMode::exact() } else { PpMode::Approx }),
        Variant::Na => oeg_na(problem),
        Variant::Ap => oeg_ap(problem),
    }
}
