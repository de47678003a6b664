use serde::Serialize;

use super::space::{union, ModelSpace, Subset};
use super::{OnlineExplanation, ReconciliationProblem, Variant};
use crate::planner::plan_distance;

/// Outcome of the variant's condition for part `k` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub k: usize,
    pub step: usize,
    pub holds: bool,
    /// The human's plan just before the part was delivered.
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub variant: Variant,
    pub per_step: Vec<StepCheck>,
    pub final_check: bool,
    /// Distance between the human's final plan and the robot plan.
    pub distance: f64,
    /// Structural problems: unknown or repeated features, bad step order.
    pub problems: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty() && self.final_check && self.per_step.iter().all(|c| c.holds)
    }

    /// First part whose condition fails.
    pub fn first_failure(&self) -> Option<usize> {
        self.per_step.iter().find(|c| !c.holds).map(|c| c.k)
    }
}

/// Replays `explanation` part by part, replanning after each, and checks
/// the condition its variant guarantees.
///
/// | variant | before part k | at the end |
/// |---|---|---|
/// | `oeg-pp` | human plan matches the robot plan before step `t_k` | human plan equals the robot plan |
/// | `oeg-na` | human plan matches on `t_{k-1}..t_k - 1` | each `t_k` matched right after its part, and the tail after the last part matches |
/// | `oeg-ap` | some optimal plan starts with the first `t_k - 1` robot actions | some optimal plan is the robot plan |
/// | `mce`, `mce-r` | nothing | the robot plan is optimal |
pub fn verify_online(problem: &ReconciliationProblem, explanation: &OnlineExplanation) -> VerificationReport {
    let space = ModelSpace::new(problem);
    let robot = &problem.robot_plan().actions;
    let n = robot.len();
    let universe = problem.robot().universe();
    let variant = explanation.variant;
    let mut problems = Vec::new();

    let mut applied: Subset = Vec::new();
    let mut per_step = Vec::new();
    let mut positions_hold = true;
    let mut prev_step: Option<usize> = None;
    for (i, part) in explanation.parts.iter().enumerate() {
        let k = i + 1;
        let t = part.step;
        if part.features.is_empty() {
            problems.push(format!("part {k} is empty"));
        }
        if t == 0 || t > n.max(1) {
            problems.push(format!("part {k} has step {t} outside 1..={n}"));
        }
        if let Some(p) = prev_step {
            let ordered = if variant.strictly_increasing() { t > p } else { t >= p };
            if !ordered {
                problems.push(format!("part {k} at step {t} follows step {p}"));
            }
        }
        let Some(subset) = space.indices(&part.features) else {
            problems.push(format!("part {k} has features outside the missing diff"));
            continue;
        };
        if subset.iter().any(|i| applied.binary_search(i).is_ok()) {
            problems.push(format!("part {k} repeats features of earlier parts"));
        }

        let before = space.actions(&applied);
        let holds = match variant {
            Variant::Pp => (1..t).all(|s| before.get(s - 1) == robot.get(s - 1)),
            Variant::Na => {
                let from = prev_step.unwrap_or(1).max(1);
                (from..t).all(|s| before.get(s - 1) == robot.get(s - 1))
            }
            Variant::Ap => t <= 1 || space.prefix_exists(&applied, t - 1),
            Variant::Mce | Variant::MceR => true,
        };
        per_step.push(StepCheck {
            k,
            step: t,
            holds,
            witness: before.iter().map(|&a| universe.action_name(a).to_string()).collect(),
        });

        let mut merged = union(&applied, &subset);
        merged.dedup();
        applied = merged;
        if variant == Variant::Na {
            let after = space.actions(&applied);
            positions_hold &= t >= 1 && after.get(t - 1) == robot.get(t - 1);
        }
        prev_step = Some(t);
    }

    let last = space.actions(&applied);
    let final_check = match variant {
        Variant::Pp => last == *robot,
        Variant::Na => {
            let from = prev_step.unwrap_or(1).max(1);
            positions_hold && (from..=n).all(|s| last.get(s - 1) == robot.get(s - 1))
        }
        Variant::Ap => space.prefix_exists(&applied, n),
        Variant::Mce | Variant::MceR => space.complete(&applied),
    };
    VerificationReport {
        variant,
        per_step,
        final_check,
        distance: plan_distance(&last, robot),
        problems,
    }
}
