//! Brute-force reference implementations for small instances.
//!
//! Nothing here shares code with the planner's search: states are ordered
//! fact sets, the whole reachable state space is listed explicitly, and
//! costs are settled by fixed-point relaxation rather than a priority queue. Use these to cross-check [`crate::planner`] and the explanation
//! generators, and keep instances small.

use std::collections::{BTreeSet, HashMap, VecDeque};

use itertools::Itertools;
use thiserror::Error;

use crate::model::{apply_features, ActionId, FactSet, FeatureSet, GroundedModel};
use crate::planner::validate;
use crate::reconcile::ReconciliationProblem;

/// Largest missing diff [`min_complete_subsets`] accepts.
pub const SUBSET_GUARD: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {limit} optimal plans; shrink the instance")]
    Overflow { limit: usize },
    #[error("{features} missing features exceed the oracle guard of {guard}")]
    GuardExceeded { features: usize, guard: usize },
}

/// All optimal plans of a task, sharing one cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanSet {
    pub plans: BTreeSet<Vec<ActionId>>,
    pub cost: u64,
}

impl PlanSet {
    pub fn contains(&self, plan: &[ActionId]) -> bool {
        self.plans.contains(plan)
    }

    /// Whether some optimal plan starts with `prefix`.
    pub fn any_starts_with(&self, prefix: &[ActionId]) -> bool {
        self.plans.iter().any(|p| p.starts_with(prefix))
    }
}

/// Explicit reachable-state graph with exact cheapest arrival costs.
struct StateGraph {
    states: Vec<FactSet>,
    g: Vec<u64>,
    goal: Vec<bool>,
    edges: Vec<Vec<(ActionId, usize, u64)>>,
}

/// Enumerates every state reachable within `bound` and relaxes arrival costs
/// to a fixed point with a FIFO worklist.
fn explore(model: &GroundedModel, init: &FactSet, goal: &FactSet, bound: u64) -> StateGraph {
    let mut index: HashMap<FactSet, usize> = HashMap::new();
    let mut graph = StateGraph {
        states: vec![init.clone()],
        g: vec![0],
        goal: vec![goal.is_subset(init)],
        edges: vec![Vec::new()],
    };
    index.insert(init.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = vec![false];
    while let Some(s) = queue.pop_front() {
        let relax_only = expanded[s];
        expanded[s] = true;
        if !relax_only {
            for (i, a) in model.actions().iter().enumerate() {
                if !a.pre.is_subset(&graph.states[s]) {
                    continue;
                }
                let mut next: FactSet = graph.states[s].difference(&a.del).copied().collect();
                next.extend(a.add.iter().copied());
                let t = *index.entry(next.clone()).or_insert_with(|| {
                    graph.goal.push(goal.is_subset(&next));
                    graph.states.push(next);
                    graph.g.push(u64::MAX);
                    graph.edges.push(Vec::new());
                    expanded.push(false);
                    graph.states.len() - 1
                });
                graph.edges[s].push((ActionId(i as u32), t, u64::from(a.cost)));
            }
        }
        let gs = graph.g[s];
        for k in 0..graph.edges[s].len() {
            let (_, t, c) = graph.edges[s][k];
            let ng = gs + c;
            if ng <= bound && ng < graph.g[t] {
                graph.g[t] = ng;
                queue.push_back(t);
            }
        }
    }
    graph
}

impl StateGraph {
    fn best_goal(&self) -> Option<u64> {
        (0..self.states.len())
            .filter(|&s| self.goal[s])
            .map(|s| self.g[s])
            .min()
            .filter(|&g| g != u64::MAX)
    }

    /// Edges lying on some cheapest path to their target.
    fn tight(&self, s: usize) -> impl Iterator<Item = (ActionId, usize)> + '_ {
        let gs = self.g[s];
        self.edges[s]
            .iter()
            .filter(move |&&(_, t, c)| gs + c == self.g[t])
            .map(|&(a, t, _)| (a, t))
    }

    /// Number of optimal plans from each state, saturating at `cap + 1`.
    /// Positive costs make the tight edges acyclic.
    fn count(&self, s: usize, best: u64, cap: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(n) = memo[s] {
            return n;
        }
        let n = if self.goal[s] {
            usize::from(self.g[s] == best)
        } else {
            let mut n = 0usize;
            for (_, t) in self.tight(s).collect::<Vec<_>>() {
                if self.g[t] <= best {
                    n = (n + self.count(t, best, cap, memo)).min(cap + 1);
                }
            }
            n
        };
        memo[s] = Some(n);
        n
    }

    fn collect(
        &self,
        s: usize,
        best: u64,
        memo: &[Option<usize>],
        path: &mut Vec<ActionId>,
        out: &mut BTreeSet<Vec<ActionId>>,
    ) {
        if self.goal[s] {
            out.insert(path.clone());
            return;
        }
        for (a, t) in self.tight(s) {
            if memo[t].is_some_and(|n| n > 0) && self.g[t] <= best {
                path.push(a);
                self.collect(t, best, memo, path, out);
                path.pop();
            }
        }
    }
}

/// Every minimum-cost plan with cost at most `max_cost`, or `None` when no
/// plan fits under the bound.
///
/// All states reachable within the bound are listed explicitly and their
/// cheapest arrival costs relaxed to a fixed point. Optimal plans are then
/// exactly the paths from the initial state to a cheapest goal state that
/// use only cost-tight edges; they are counted before being listed so that
/// an overflow is detected without materialising the plans.
pub fn enumerate_optimal_plans(
    model: &GroundedModel,
    init: &FactSet,
    goal: &FactSet,
    max_cost: u64,
    max_count: usize,
) -> Result<Option<PlanSet>, OracleError> {
    let graph = explore(model, init, goal, max_cost);
    let Some(best) = graph.best_goal() else {
        return Ok(None);
    };
    let mut memo = vec![None; graph.states.len()];
    if graph.count(0, best, max_count, &mut memo) > max_count {
        return Err(OracleError::Overflow { limit: max_count });
    }
    let mut plans = BTreeSet::new();
    graph.collect(0, best, &memo, &mut Vec::new(), &mut plans);
    Ok(Some(PlanSet { plans, cost: best }))
}

/// Whether any plan costs at most `max_cost`.
pub fn exists_plan_within(model: &GroundedModel, init: &FactSet, goal: &FactSet, max_cost: u64) -> bool {
    explore(model, init, goal, max_cost).best_goal().is_some()
}

/// Number of states reachable from `init`.
pub fn reachable_states(model: &GroundedModel, init: &FactSet) -> usize {
    explore(model, init, &FactSet::new(), u64::MAX).states.len()
}

/// Whether the robot plan is optimal once `features` are added to the human
/// model, judged by exhaustive search for a strictly cheaper plan.
pub fn is_complete(problem: &ReconciliationProblem, features: &FeatureSet) -> bool {
    let Ok(applied) = apply_features(problem.human(), features) else {
        return false;
    };
    let model = applied.model;
    let Ok(cost) = validate(&model, problem.init(), problem.goal(), &problem.robot_plan().actions) else {
        return false;
    };
    cost == 0 || !exists_plan_within(&model, problem.init(), problem.goal(), cost - 1)
}

/// All minimum-cardinality complete subsets of the missing diff, searching
/// sizes `0..=size_bound`. Empty when nothing within the bound is complete.
pub fn min_complete_subsets(
    problem: &ReconciliationProblem,
    size_bound: usize,
) -> Result<Vec<FeatureSet>, OracleError> {
    let missing: Vec<_> = problem.missing().iter().cloned().collect();
    if missing.len() > SUBSET_GUARD {
        return Err(OracleError::GuardExceeded {
            features: missing.len(),
            guard: SUBSET_GUARD,
        });
    }
    for k in 0..=size_bound.min(missing.len()) {
        let hits: Vec<FeatureSet> = missing
            .iter()
            .cloned()
            .combinations(k)
            .map(FeatureSet::from_iter)
            .filter(|s| is_complete(problem, s))
            .collect();
        if !hits.is_empty() {
            return Ok(hits);
        }
    }
    Ok(Vec::new())
}
