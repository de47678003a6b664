use std::cell::RefCell;
use std::collections::HashMap;

use itertools::Itertools;

use super::ReconciliationProblem;
use crate::model::{apply_resolved, FeatureSet, GroundedModel, ResolvedFeature};
use crate::planner::{exists_optimal_with_prefix, optimal_cost, plan_optimal, validate, Plan};

/// Sorted indices into the missing diff.
pub(crate) type Subset = Vec<usize>;

/// Human models reachable by adding subsets of the missing diff, with
/// planner results cached per subset.
pub(crate) struct ModelSpace<'a> {
    pub problem: &'a ReconciliationProblem,
    missing: Vec<ResolvedFeature>,
    names: Vec<crate::model::ModelFeature>,
    plans: RefCell<HashMap<Subset, Option<Plan>>>,
    costs: RefCell<HashMap<Subset, Option<u64>>>,
    prefixes: RefCell<HashMap<(Subset, usize), bool>>,
}

impl<'a> ModelSpace<'a> {
    pub fn new(problem: &'a ReconciliationProblem) -> Self {
        let universe = problem.robot().universe();
        let names: Vec<_> = problem.missing().iter().cloned().collect();
        let missing = names
            .iter()
            .map(|f| f.resolve(universe).expect("missing features come from the robot model"))
            .collect();
        ModelSpace {
            problem,
            missing,
            names,
            plans: RefCell::default(),
            costs: RefCell::default(),
            prefixes: RefCell::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.missing.len()
    }

    pub fn all(&self) -> Subset {
        (0..self.len()).collect()
    }

    pub fn features(&self, subset: &[usize]) -> FeatureSet {
        subset.iter().map(|&i| self.names[i].clone()).collect()
    }

    pub fn indices(&self, features: &FeatureSet) -> Option<Subset> {
        features
            .iter()
            .map(|f| self.names.binary_search(f).ok())
            .collect::<Option<Subset>>()
            .map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v
            })
    }

    /// Human model plus the given features.
    pub fn model(&self, subset: &[usize]) -> GroundedModel {
        let adds: Vec<ResolvedFeature> = subset.iter().map(|&i| self.missing[i]).collect();
        // With no extra features the result's feature set lies inside the
        // robot model's, which already satisfies every model invariant.
        apply_resolved(self.problem.human(), &adds).expect("subsets of the missing diff apply cleanly")
    }

    /// The planner's plan for the updated human model.
    pub fn plan(&self, subset: &[usize]) -> Option<Plan> {
        if let Some(p) = self.plans.borrow().get(subset) {
            return p.clone();
        }
        let p = plan_optimal(&self.model(subset), self.problem.init(), self.problem.goal());
        self.plans.borrow_mut().insert(subset.to_vec(), p.clone());
        p
    }

    /// Plan actions, treating an unsolvable model as expecting no actions.
    pub fn actions(&self, subset: &[usize]) -> Vec<crate::model::ActionId> {
        self.plan(subset).map(|p| p.actions).unwrap_or_default()
    }

    fn optimal(&self, subset: &[usize]) -> Option<u64> {
        if let Some(&c) = self.costs.borrow().get(subset) {
            return c;
        }
        let c = match self.plans.borrow().get(subset) {
            Some(p) => p.as_ref().map(|p| p.cost),
            None => optimal_cost(&self.model(subset), self.problem.init(), self.problem.goal()),
        };
        self.costs.borrow_mut().insert(subset.to_vec(), c);
        c
    }

    /// Whether the robot plan is optimal in the updated human model.
    pub fn complete(&self, subset: &[usize]) -> bool {
        let p = self.problem;
        match validate(&self.model(subset), p.init(), p.goal(), &p.robot_plan().actions) {
            Ok(cost) => self.optimal(subset) == Some(cost),
            Err(_) => false,
        }
    }

    /// Whether some optimal plan of the updated human model starts with the
    /// first `t` robot actions. Unsolvable models and non-executable
    /// prefixes count as no.
    pub fn prefix_exists(&self, subset: &[usize], t: usize) -> bool {
        let key = (subset.to_vec(), t);
        if let Some(&b) = self.prefixes.borrow().get(&key) {
            return b;
        }
        let p = self.problem;
        let b = exists_optimal_with_prefix(&self.model(subset), p.init(), p.goal(), p.robot_plan().prefix(t))
            .unwrap_or(false);
        self.prefixes.borrow_mut().insert(key, b);
        b
    }
}

/// Sorted union of two disjoint subsets.
pub(crate) fn union(a: &[usize], b: &[usize]) -> Subset {
    let mut v: Subset = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

pub(crate) fn complement(n: usize, of: &[usize]) -> Subset {
    (0..n).filter(|i| of.binary_search(i).is_err()).collect()
}

/// Nonempty subsets of `pool` by increasing size, lexicographic within a
/// size.
pub(crate) fn nonempty_subsets(pool: &[usize]) -> impl Iterator<Item = Subset> + '_ {
    (1..=pool.len()).flat_map(move |k| pool.iter().copied().combinations(k))
}

/// First subset in [`nonempty_subsets`] order satisfying `accept`.
pub(crate) fn smallest(pool: &[usize], mut accept: impl FnMut(&[usize]) -> bool) -> Option<Subset> {
    nonempty_subsets(pool).find(|s| accept(s))
}
