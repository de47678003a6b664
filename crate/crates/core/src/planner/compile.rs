use std::sync::Arc;

use super::{execute, optimal_cost, PlanError};
use crate::model::{ActionId, FactId, FactSet, GroundAction, GroundedModel, Universe};
use crate::pddl::GroundedTask;

/// Copy of the prefix action at 1-based `position`, gated by the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForcedCopy {
    pub position: usize,
    pub original: ActionId,
    pub id: ActionId,
}

/// A task whose plans must start with a given prefix.
///
/// Chain facts `p_0..p_L` are appended to the fact universe with `p_0`
/// initially true. Prefix position `i` gets its own copy of action `a_i`
/// that consumes `p_{i-1}` and produces `p_i`. Every original action
/// additionally requires `p_L`, and so does the goal, so the original action
/// set only opens up once the whole prefix has run. Copies keep the cost of
/// the action they duplicate, so compiled plan costs equal the costs of the
/// corresponding uncompiled plans.
#[derive(Debug, Clone)]
pub struct CompiledTask {
    pub task: GroundedTask,
    pub forced_prefix: Vec<ActionId>,
    pub chain_facts: Vec<FactId>,
    pub forced_copies: Vec<ForcedCopy>,
    pub gate: FactId,
    base_actions: usize,
}

impl CompiledTask {
    /// Maps a compiled plan back to actions of the base task.
    pub fn to_base_plan(&self, actions: &[ActionId]) -> Vec<ActionId> {
        actions
            .iter()
            .map(|&a| {
                if a.index() < self.base_actions {
                    a
                } else {
                    self.forced_copies[a.index() - self.base_actions].original
                }
            })
            .collect()
    }

    pub fn is_forced(&self, a: ActionId) -> bool {
        a.index() >= self.base_actions
    }
}

fn fresh(universe: &Universe, base: String) -> String {
    let mut name = base;
    while universe.fact(&name).is_some() || universe.action(&name).is_some() {
        name.push('\'');
    }
    name
}

pub fn compile_prefix(task: &GroundedTask, prefix: &[ActionId]) -> Result<CompiledTask, PlanError> {
    execute(&task.model, &task.init, prefix).map_err(|e| PlanError::PrefixNotExecutable(e.step))?;

    let base = task.model.universe();
    let n_facts = base.num_facts();
    let n_actions = base.num_actions();
    let len = prefix.len();

    let mut facts = base.fact_names().to_vec();
    let chain_facts: Vec<FactId> = (0..=len)
        .map(|i| {
            facts.push(fresh(base, format!("prefix-chain-{i}")));
            FactId((n_facts + i) as u32)
        })
        .collect();
    let gate = chain_facts[len];

    let mut names = base.action_names().to_vec();
    let mut actions: Vec<GroundAction> = task
        .model
        .actions()
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.pre.insert(gate);
            a
        })
        .collect();
    let mut forced_copies = Vec::with_capacity(len);
    for (i, &orig) in prefix.iter().enumerate() {
        let src = task.model.action(orig);
        let (before, after) = (chain_facts[i], chain_facts[i + 1]);
        let mut pre = src.pre.clone();
        pre.insert(before);
        let mut add = src.add.clone();
        add.insert(after);
        let mut del = src.del.clone();
        del.insert(before);
        names.push(format!("{} [forced {}]", base.action_name(orig), i + 1));
        actions.push(GroundAction::new(pre, add, del, src.cost));
        forced_copies.push(ForcedCopy {
            position: i + 1,
            original: orig,
            id: ActionId((n_actions + i) as u32),
        });
    }

    // The chain names are fresh and forced names carry a bracket suffix no
    // grounded name has, so universe construction cannot collide.
    let universe = Arc::new(Universe::new(facts, names).expect("fresh names"));
    let model = GroundedModel::new(universe, actions).expect("compiled model keeps invariants");
    let mut init = task.init.clone();
    init.insert(chain_facts[0]);
    let mut goal = task.goal.clone();
    goal.insert(gate);
    Ok(CompiledTask {
        task: GroundedTask { model, init, goal },
        forced_prefix: prefix.to_vec(),
        chain_facts,
        forced_copies,
        gate,
        base_actions: n_actions,
    })
}

/// Whether some optimal plan of the task starts with `prefix`: the optimal
/// cost of the prefix-forcing compilation must equal the unconstrained
/// optimal cost.
pub fn exists_optimal_with_prefix(
    model: &GroundedModel,
    init: &FactSet,
    goal: &FactSet,
    prefix: &[ActionId],
) -> Result<bool, PlanError> {
    let task = GroundedTask {
        model: model.clone(),
        init: init.clone(),
        goal: goal.clone(),
    };
    let compiled = compile_prefix(&task, prefix)?;
    let free = optimal_cost(model, init, goal).ok_or(PlanError::InconsistentTask)?;
    let forced = optimal_cost(&compiled.task.model, &compiled.task.init, &compiled.task.goal);
    Ok(forced == Some(free))
}
