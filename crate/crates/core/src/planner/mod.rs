//! Deterministic cost-optimal planning and plan utilities.
//!
//! [`plan_optimal`] runs uniform-cost search and returns, among all
//! minimum-cost plans, the one whose action-id sequence is lexicographically
//! smallest. Explanation generators compare the human's expected plan
//! against the robot's plan, so the planner must pick the same plan every
//! time and independently of search order.
//!
//! Plans are 1-indexed throughout: `step(1)` is the first action, and
//! [`first_diff`] reports 1-based positions.

mod compile;
mod search;

pub use compile::{compile_prefix, exists_optimal_with_prefix, CompiledTask, ForcedCopy};

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{ActionId, FactSet, GroundedModel, Universe};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("prefix is not executable: step {0} fails")]
    PrefixNotExecutable(usize),
    #[error("the unconstrained task has no plan")]
    InconsistentTask,
}

/// A sequence of ground actions and its cost under the model it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Plan {
    pub actions: Vec<ActionId>,
    pub cost: u64,
}

impl Plan {
    pub fn new(actions: Vec<ActionId>, cost: u64) -> Self {
        Plan { actions, cost }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Action at 1-based step `t`.
    pub fn step(&self, t: usize) -> Option<ActionId> {
        t.checked_sub(1).and_then(|i| self.actions.get(i)).copied()
    }

    /// The first `t` actions (the whole plan when `t` exceeds its length).
    pub fn prefix(&self, t: usize) -> &[ActionId] {
        &self.actions[..t.min(self.actions.len())]
    }

    pub fn names(&self, universe: &Universe) -> Vec<String> {
        self.actions
            .iter()
            .map(|&a| universe.action_name(a).to_string())
            .collect()
    }

    /// `{"actions": [...], "cost": n}`.
    pub fn to_json(&self, universe: &Universe) -> String {
        #[derive(Serialize)]
        struct Out {
            actions: Vec<String>,
            cost: u64,
        }
        serde_json::to_string_pretty(&Out {
            actions: self.names(universe),
            cost: self.cost,
        })
        .expect("plan serializes")
    }
}

/// Minimum-cost plan from `init` to `goal`, or `None` if the goal is
/// unreachable. Among equal-cost plans the lexicographically smallest
/// action-id sequence is returned.
pub fn plan_optimal(model: &GroundedModel, init: &FactSet, goal: &FactSet) -> Option<Plan> {
    let c = search::Compiled::new(model);
    search::optimal_plan(&c, init, goal).map(|(actions, cost)| Plan { actions, cost })
}

/// Optimal plan cost without extracting a plan.
pub fn optimal_cost(model: &GroundedModel, init: &FactSet, goal: &FactSet) -> Option<u64> {
    let c = search::Compiled::new(model);
    search::optimal_cost(&c, init, goal)
}

/// Step at which a plan stops being valid. Goal failure is reported as
/// `len + 1`.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("plan invalid at step {step}")]
pub struct Invalid {
    pub step: usize,
}

/// Executes `actions` from `init` and returns the final state.
pub fn execute(model: &GroundedModel, init: &FactSet, actions: &[ActionId]) -> Result<FactSet, Invalid> {
    let mut state = init.clone();
    for (i, &a) in actions.iter().enumerate() {
        let step = i + 1;
        if a.index() >= model.num_actions() {
            return Err(Invalid { step });
        }
        let act = model.action(a);
        if !act.pre.is_subset(&state) {
            return Err(Invalid { step });
        }
        for f in &act.del {
            state.remove(f);
        }
        state.extend(act.add.iter().copied());
    }
    Ok(state)
}

/// Simulates `actions` and returns their total cost under `model` if every
/// precondition holds and the goal holds at the end.
pub fn validate(model: &GroundedModel, init: &FactSet, goal: &FactSet, actions: &[ActionId]) -> Result<u64, Invalid> {
    let state = execute(model, init, actions)?;
    if !goal.is_subset(&state) {
        return Err(Invalid {
            step: actions.len() + 1,
        });
    }
    Ok(actions.iter().map(|&a| u64::from(model.action(a).cost)).sum())
}

/// First 1-based position where the plans differ. A proper prefix differs
/// at `min(len) + 1`; `None` means the sequences are identical.
pub fn first_diff(a: &[ActionId], b: &[ActionId]) -> Option<usize> {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => Some(i + 1),
        None if a.len() == b.len() => None,
        None => Some(a.len().min(b.len()) + 1),
    }
}

/// `1 - |multiset intersection| / max(|human|, |robot|)`, in `[0, 1]`.
pub fn plan_distance(human: &[ActionId], robot: &[ActionId]) -> f64 {
    let denom = human.len().max(robot.len());
    if denom == 0 {
        return 0.0;
    }
    let mut counts: HashMap<ActionId, usize> = HashMap::new();
    for &a in robot {
        *counts.entry(a).or_default() += 1;
    }
    let mut shared = 0usize;
    for a in human {
        if let Some(c) = counts.get_mut(a) {
            if *c > 0 {
                *c -= 1;
                shared += 1;
            }
        }
    }
    1.0 - shared as f64 / denom as f64
}
