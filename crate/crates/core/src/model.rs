//! Grounded STRIPS models and their unit-feature view.
//!
//! A [`GroundedModel`] is the pair of a fact universe and a list of ground
//! actions. Every model can be flattened into a [`FeatureSet`] with
//! [`gamma`]: one feature per precondition, add effect, delete effect and
//! cost of every action. Explanations are sets of such features, and the
//! search for explanations moves through model space by adding features
//! with [`apply_features`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Dense index of a ground fact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactId(pub u32);

/// Dense index of a ground action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type FactSet = BTreeSet<FactId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("fact and action universes of the two models differ")]
    UniverseMismatch,
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown fact `{0}`")]
    UnknownFact(String),
    #[error("`{0}` is not a well-formed model feature")]
    UnknownFeature(String),
    #[error("feature `{0}` is not part of the model")]
    FeatureNotInModel(String),
    #[error("cost features cannot be removed (`{0}`)")]
    CostRemoval(String),
    #[error("action `{action}` has no cost feature")]
    MissingCost { action: String },
    #[error("action `{action}` has more than one cost feature")]
    DuplicateCost { action: String },
    #[error("action `{action}` has cost 0; costs must be positive")]
    ZeroCost { action: String },
    #[error("action `{action}` both adds and deletes `{fact}`")]
    AddDeleteOverlap { action: String, fact: String },
    #[error("action `{action}` references fact id {fact} outside the universe")]
    FactOutOfRange { action: String, fact: u32 },
    #[error("universe has {names} action names but the model lists {actions} actions")]
    ActionCount { names: usize, actions: usize },
    #[error("duplicate name `{0}` in universe")]
    DuplicateName(String),
}

/// The shared naming tables of a grounding: facts and actions by id.
///
/// Two models are comparable feature-by-feature only when they share a
/// universe, which is what grounding a robot and a human domain against the
/// same problem produces.
#[derive(Debug, Clone)]
pub struct Universe {
    facts: Vec<String>,
    actions: Vec<String>,
    fact_index: HashMap<String, FactId>,
    action_index: HashMap<String, ActionId>,
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.facts == other.facts && self.actions == other.actions
    }
}

impl Eq for Universe {}

impl Universe {
    pub fn new(facts: Vec<String>, actions: Vec<String>) -> Result<Self, ModelError> {
        let mut fact_index = HashMap::with_capacity(facts.len());
        for (i, f) in facts.iter().enumerate() {
            if fact_index.insert(f.clone(), FactId(i as u32)).is_some() {
                return Err(ModelError::DuplicateName(f.clone()));
            }
        }
        let mut action_index = HashMap::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if action_index.insert(a.clone(), ActionId(i as u32)).is_some() {
                return Err(ModelError::DuplicateName(a.clone()));
            }
        }
        Ok(Universe {
            facts,
            actions,
            fact_index,
            action_index,
        })
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn fact_name(&self, id: FactId) -> &str {
        &self.facts[id.index()]
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions[id.index()]
    }

    pub fn fact_names(&self) -> &[String] {
        &self.facts
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn fact(&self, name: &str) -> Option<FactId> {
        self.fact_index.get(name).copied()
    }

    pub fn action(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    /// Resolves a list of fact names into a fact set.
    pub fn facts_named<'a, I>(&self, names: I) -> Result<FactSet, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names
            .into_iter()
            .map(|n| self.fact(n).ok_or_else(|| ModelError::UnknownFact(n.to_string())))
            .collect()
    }

    /// Resolves a list of action names into an action sequence.
    pub fn actions_named<'a, I>(&self, names: I) -> Result<Vec<ActionId>, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names
            .into_iter()
            .map(|n| self.action(n).ok_or_else(|| ModelError::UnknownAction(n.to_string())))
            .collect()
    }
}

/// Preconditions, effects and cost of one ground action. Its name lives in
/// the model's [`Universe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub pre: FactSet,
    pub add: FactSet,
    pub del: FactSet,
    pub cost: u32,
}

impl GroundAction {
    pub fn new(pre: FactSet, add: FactSet, del: FactSet, cost: u32) -> Self {
        GroundAction { pre, add, del, cost }
    }
}

/// A grounded planning model `(F, A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedModel {
    universe: Arc<Universe>,
    actions: Vec<GroundAction>,
}

impl GroundedModel {
    pub fn new(universe: Arc<Universe>, actions: Vec<GroundAction>) -> Result<Self, ModelError> {
        if universe.num_actions() != actions.len() {
            return Err(ModelError::ActionCount {
                names: universe.num_actions(),
                actions: actions.len(),
            });
        }
        let model = GroundedModel { universe, actions };
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<(), ModelError> {
        let n = self.universe.num_facts() as u32;
        for (i, a) in self.actions.iter().enumerate() {
            let name = || self.universe.actions[i].clone();
            if a.cost == 0 {
                return Err(ModelError::ZeroCost { action: name() });
            }
            for f in a.pre.iter().chain(&a.add).chain(&a.del) {
                if f.0 >= n {
                    return Err(ModelError::FactOutOfRange {
                        action: name(),
                        fact: f.0,
                    });
                }
            }
            if let Some(f) = a.add.intersection(&a.del).next() {
                return Err(ModelError::AddDeleteOverlap {
                    action: name(),
                    fact: self.universe.fact_name(*f).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn num_facts(&self) -> usize {
        self.universe.num_facts()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn fact_name(&self, id: FactId) -> &str {
        self.universe.fact_name(id)
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        self.universe.action_name(id)
    }

    /// Rebuilds a model from a feature set over `universe`. Every action
    /// needs exactly one cost feature.
    pub fn from_features(universe: Arc<Universe>, features: &FeatureSet) -> Result<Self, ModelError> {
        let mut actions: Vec<Option<GroundAction>> = vec![None; universe.num_actions()];
        let mut costs: Vec<Option<u32>> = vec![None; universe.num_actions()];
        for f in features {
            let r = f.resolve(&universe)?;
            let slot = actions[r.action.index()]
                .get_or_insert_with(|| GroundAction::new(FactSet::new(), FactSet::new(), FactSet::new(), 1));
            match r.change {
                Change::Pre(p) => {
                    slot.pre.insert(p);
                }
                Change::Add(p) => {
                    slot.add.insert(p);
                }
                Change::Del(p) => {
                    slot.del.insert(p);
                }
                Change::Cost(c) => {
                    if costs[r.action.index()].replace(c).is_some() {
                        return Err(ModelError::DuplicateCost {
                            action: f.action().to_string(),
                        });
                    }
                }
            }
        }
        let actions = actions
            .into_iter()
            .zip(costs)
            .enumerate()
            .map(|(i, (a, c))| {
                let cost = c.ok_or_else(|| ModelError::MissingCost {
                    action: universe.actions[i].clone(),
                })?;
                let mut a =
                    a.unwrap_or_else(|| GroundAction::new(FactSet::new(), FactSet::new(), FactSet::new(), cost));
                a.cost = cost;
                Ok(a)
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        GroundedModel::new(universe, actions)
    }
}

/// The four kinds of unit feature, with their payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKind {
    Precondition(String),
    AddEffect(String),
    DelEffect(String),
    Cost(u32),
}

/// One unit feature of a model, e.g. `take-image-has-precondition-calibrated`.
///
/// Features carry names rather than ids so that they can be compared across
/// models and written to traces. Ordering is lexicographic by canonical
/// rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelFeature {
    canonical: String,
    action: String,
    kind: FeatureKind,
}

impl ModelFeature {
    pub fn new(action: impl Into<String>, kind: FeatureKind) -> Self {
        let action = action.into();
        let canonical = match &kind {
            FeatureKind::Precondition(f) => format!("{action}-has-precondition-{f}"),
            FeatureKind::AddEffect(f) => format!("{action}-has-add-effect-{f}"),
            FeatureKind::DelEffect(f) => format!("{action}-has-del-effect-{f}"),
            FeatureKind::Cost(c) => format!("{action}-has-cost-{c}"),
        };
        ModelFeature {
            canonical,
            action,
            kind,
        }
    }

    pub fn precondition(action: &str, fact: &str) -> Self {
        Self::new(action, FeatureKind::Precondition(fact.to_string()))
    }

    pub fn add_effect(action: &str, fact: &str) -> Self {
        Self::new(action, FeatureKind::AddEffect(fact.to_string()))
    }

    pub fn del_effect(action: &str, fact: &str) -> Self {
        Self::new(action, FeatureKind::DelEffect(fact.to_string()))
    }

    pub fn cost(action: &str, cost: u32) -> Self {
        Self::new(action, FeatureKind::Cost(cost))
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn kind(&self) -> &FeatureKind {
        &self.kind
    }

    pub fn is_cost(&self) -> bool {
        matches!(self.kind, FeatureKind::Cost(_))
    }

    /// Parses a canonical feature name against the names of `universe`.
    ///
    /// Action and fact names may themselves contain `-has-`, so every split
    /// point is tried and the first one naming a known action and fact wins.
    pub fn parse(name: &str, universe: &Universe) -> Result<Self, ModelError> {
        let name = name.trim();
        for (idx, _) in name.match_indices("-has-") {
            let action = &name[..idx];
            if universe.action(action).is_none() {
                continue;
            }
            let rest = &name[idx + 5..];
            let fact_kind = |prefix: &str| rest.strip_prefix(prefix).filter(|f| universe.fact(f).is_some());
            if let Some(f) = fact_kind("precondition-") {
                return Ok(Self::precondition(action, f));
            }
            if let Some(f) = fact_kind("add-effect-") {
                return Ok(Self::add_effect(action, f));
            }
            if let Some(f) = fact_kind("del-effect-") {
                return Ok(Self::del_effect(action, f));
            }
            if let Some(c) = rest.strip_prefix("cost-").and_then(|c| c.parse::<u32>().ok()) {
                return Ok(Self::cost(action, c));
            }
        }
        Err(ModelError::UnknownFeature(name.to_string()))
    }

    pub fn resolve(&self, universe: &Universe) -> Result<ResolvedFeature, ModelError> {
        let action = universe
            .action(&self.action)
            .ok_or_else(|| ModelError::UnknownAction(self.action.clone()))?;
        let fact = |f: &str| universe.fact(f).ok_or_else(|| ModelError::UnknownFact(f.to_string()));
        let change = match &self.kind {
            FeatureKind::Precondition(f) => Change::Pre(fact(f)?),
            FeatureKind::AddEffect(f) => Change::Add(fact(f)?),
            FeatureKind::DelEffect(f) => Change::Del(fact(f)?),
            FeatureKind::Cost(c) => Change::Cost(*c),
        };
        Ok(ResolvedFeature { action, change })
    }
}

impl Ord for ModelFeature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical
            .cmp(&other.canonical)
            .then_with(|| self.action.cmp(&other.action))
            .then_with(|| self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for ModelFeature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModelFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

impl Serialize for ModelFeature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical)
    }
}

/// A feature bound to ids of a particular universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedFeature {
    pub action: ActionId,
    pub change: Change,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Change {
    Pre(FactId),
    Add(FactId),
    Del(FactId),
    Cost(u32),
}

/// Ordered set of features, iterated in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FeatureSet(BTreeSet<ModelFeature>);

impl FeatureSet {
    pub fn new() -> Self {
        FeatureSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, f: ModelFeature) -> bool {
        self.0.insert(f)
    }

    pub fn remove(&mut self, f: &ModelFeature) -> bool {
        self.0.remove(f)
    }

    pub fn contains(&self, f: &ModelFeature) -> bool {
        self.0.contains(f)
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, ModelFeature> {
        self.0.iter()
    }

    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &FeatureSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|f| f.canonical.clone()).collect()
    }

    /// Parses canonical names against `universe`.
    pub fn parse_names<'a, I>(names: I, universe: &Universe) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names.into_iter().map(|n| ModelFeature::parse(n, universe)).collect()
    }
}

impl FromIterator<ModelFeature> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = ModelFeature>>(iter: I) -> Self {
        FeatureSet(iter.into_iter().collect())
    }
}

impl IntoIterator for FeatureSet {
    type Item = ModelFeature;
    type IntoIter = std::collections::btree_set::IntoIter<ModelFeature>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FeatureSet {
    type Item = &'a ModelFeature;
    type IntoIter = std::collections::btree_set::Iter<'a, ModelFeature>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Extend<ModelFeature> for FeatureSet {
    fn extend<I: IntoIterator<Item = ModelFeature>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

/// Maps a model to its unit features.
pub fn gamma(model: &GroundedModel) -> FeatureSet {
    let u = &model.universe;
    let mut out = FeatureSet::new();
    for (id, a) in model.action_ids().zip(&model.actions) {
        let name = u.action_name(id);
        for &f in &a.pre {
            out.insert(ModelFeature::precondition(name, u.fact_name(f)));
        }
        for &f in &a.add {
            out.insert(ModelFeature::add_effect(name, u.fact_name(f)));
        }
        for &f in &a.del {
            out.insert(ModelFeature::del_effect(name, u.fact_name(f)));
        }
        out.insert(ModelFeature::cost(name, a.cost));
    }
    out
}

/// Features of the robot model the human is missing, and features the human
/// believes in that the robot model does not have.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ModelDiff {
    pub missing: FeatureSet,
    pub extra: FeatureSet,
}

impl ModelDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diff serializes")
    }
}

pub fn diff(robot: &GroundedModel, human: &GroundedModel) -> Result<ModelDiff, ModelError> {
    if !Arc::ptr_eq(&robot.universe, &human.universe) && robot.universe != human.universe {
        return Err(ModelError::UniverseMismatch);
    }
    let r = gamma(robot);
    let h = gamma(human);
    Ok(ModelDiff {
        missing: r.difference(&h),
        extra: h.difference(&r),
    })
}

/// A cost feature that replaced an action's previous cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostExchange {
    pub action: String,
    pub old: u32,
    pub new: u32,
}

/// Result of [`apply_features`]: the updated model plus any cost exchanges.
#[derive(Debug, Clone)]
pub struct Applied {
    pub model: GroundedModel,
    pub cost_exchanges: Vec<CostExchange>,
}

/// Adds `adds` to a copy of `model`.
///
/// Adding a cost feature retires the action's current cost; each such
/// exchange is reported in [`Applied::cost_exchanges`].
pub fn apply_features(model: &GroundedModel, adds: &FeatureSet) -> Result<Applied, ModelError> {
    let mut actions = model.actions.clone();
    let mut cost_exchanges = Vec::new();
    for f in adds {
        let r = f.resolve(&model.universe)?;
        let a = &mut actions[r.action.index()];
        match r.change {
            Change::Pre(p) => {
                a.pre.insert(p);
            }
            Change::Add(p) => {
                a.add.insert(p);
            }
            Change::Del(p) => {
                a.del.insert(p);
            }
            Change::Cost(c) => {
                if a.cost != c {
                    cost_exchanges.push(CostExchange {
                        action: f.action.clone(),
                        old: a.cost,
                        new: c,
                    });
                    a.cost = c;
                }
            }
        }
    }
    let model = GroundedModel::new(model.universe.clone(), actions)?;
    Ok(Applied { model, cost_exchanges })
}

/// Applies already-resolved additions; the id-level core of [`apply_features`].
pub(crate) fn apply_resolved(model: &GroundedModel, adds: &[ResolvedFeature]) -> Result<GroundedModel, ModelError> {
    let mut actions = model.actions.clone();
    for r in adds {
        let a = &mut actions[r.action.index()];
        match r.change {
            Change::Pre(p) => {
                a.pre.insert(p);
            }
            Change::Add(p) => {
                a.add.insert(p);
            }
            Change::Del(p) => {
                a.del.insert(p);
            }
            Change::Cost(c) => a.cost = c,
        }
    }
    GroundedModel::new(model.universe.clone(), actions)
}

/// Removes features from a copy of `model`. Every feature must be present in
/// `gamma(model)`; cost features cannot be removed.
pub fn remove_features(model: &GroundedModel, removals: &FeatureSet) -> Result<GroundedModel, ModelError> {
    let mut actions = model.actions.clone();
    for f in removals {
        let r = f.resolve(&model.universe)?;
        let a = &mut actions[r.action.index()];
        let present = match r.change {
            Change::Pre(p) => a.pre.remove(&p),
            Change::Add(p) => a.add.remove(&p),
            Change::Del(p) => a.del.remove(&p),
            Change::Cost(_) => return Err(ModelError::CostRemoval(f.canonical.clone())),
        };
        if !present {
            return Err(ModelError::FeatureNotInModel(f.canonical.clone()));
        }
    }
    GroundedModel::new(model.universe.clone(), actions)
}
