use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ast::*;
use super::parse::check_problem;
use super::PddlError;
use crate::model::{ActionId, FactId, FactSet, GroundAction, GroundedModel, ModelError, Universe};

/// A grounded planning task: model plus initial state and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedTask {
    pub model: GroundedModel,
    pub init: FactSet,
    pub goal: FactSet,
}

impl GroundedTask {
    pub fn universe(&self) -> &Arc<Universe> {
        self.model.universe()
    }

    pub fn fact_name(&self, id: FactId) -> &str {
        self.model.fact_name(id)
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        self.model.action_name(id)
    }

    /// Same initial state and goal, different model over the same universe.
    pub fn with_model(&self, model: GroundedModel) -> GroundedTask {
        GroundedTask {
            model,
            init: self.init.clone(),
            goal: self.goal.clone(),
        }
    }
}

struct Objects<'a> {
    by_type: BTreeMap<&'a str, Vec<&'a str>>,
    all: BTreeMap<&'a str, &'a str>,
}

impl<'a> Objects<'a> {
    fn new(domain: &'a DomainAst, problem: &'a ProblemAst) -> Self {
        let mut all = BTreeMap::new();
        for o in domain.constants.iter().chain(&problem.objects) {
            all.insert(o.name.as_str(), o.ty.as_str());
        }
        let mut by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let types = std::iter::once("object").chain(domain.types.keys().map(String::as_str));
        for t in types {
            let objs = all
                .iter()
                .filter(|(_, ty)| domain.is_subtype(ty, t))
                .map(|(n, _)| *n)
                .collect();
            by_type.insert(t, objs);
        }
        Objects { by_type, all }
    }

    fn of_type(&self, ty: &str) -> &[&'a str] {
        self.by_type.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Every assignment of objects to `params`, in lexicographic order.
fn assignments<'a>(objects: &Objects<'a>, params: &[Typed]) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = vec![Vec::new()];
    for p in params {
        let choices = objects.of_type(&p.ty);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

fn instantiate(atom: &Atom, params: &[Typed], binding: &[&str]) -> String {
    let args: Vec<String> = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => {
                let i = params
                    .iter()
                    .position(|p| &p.name == v)
                    .expect("variables checked at parse time");
                binding[i].to_string()
            }
            Term::Const(c) => c.clone(),
        })
        .collect();
    canonical_name(&atom.predicate, &args)
}

/// Grounds a domain against a problem.
///
/// The fact universe holds every type-correct instantiation of every
/// declared predicate, and every schema is instantiated with every
/// type-correct argument tuple; nothing is pruned. Facts and actions are
/// numbered in lexicographic order of their canonical names.
pub fn ground(domain: &DomainAst, problem: &ProblemAst) -> Result<GroundedTask, PddlError> {
    check_problem(domain, problem)?;
    let objects = Objects::new(domain, problem);
    debug_assert!(problem
        .objects
        .iter()
        .all(|o| objects.all.contains_key(o.name.as_str())));

    let mut fact_names = BTreeSet::new();
    for p in &domain.predicates {
        for binding in assignments(&objects, &p.params) {
            let args: Vec<String> = binding.iter().map(|s| s.to_string()).collect();
            fact_names.insert(canonical_name(&p.name, &args));
        }
    }
    let facts: Vec<String> = fact_names.into_iter().collect();
    let index: BTreeMap<String, FactId> = facts
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), FactId(i as u32)))
        .collect();
    let lookup = |name: &str| -> Result<FactId, PddlError> {
        index.get(name).copied().ok_or_else(|| PddlError::Undeclared {
            kind: "fact",
            name: name.to_string(),
        })
    };

    let mut grounded: BTreeMap<String, GroundAction> = BTreeMap::new();
    for schema in &domain.actions {
        if schema.cost == 0 {
            return Err(PddlError::Model(ModelError::ZeroCost {
                action: schema.name.clone(),
            }));
        }
        let mut seen = BTreeSet::new();
        for p in &schema.params {
            if !seen.insert(&p.name) {
                return Err(PddlError::Syntax {
                    pos: Default::default(),
                    token: format!("?{}", p.name),
                    message: format!("duplicate parameter in action {}", schema.name),
                });
            }
        }
        for binding in assignments(&objects, &schema.params) {
            let args: Vec<String> = binding.iter().map(|s| s.to_string()).collect();
            let name = canonical_name(&schema.name, &args);
            let set = |atoms: &[Atom]| -> Result<FactSet, PddlError> {
                atoms
                    .iter()
                    .map(|a| lookup(&instantiate(a, &schema.params, &binding)))
                    .collect()
            };
            let pre = set(&schema.pre)?;
            let add = set(&schema.add)?;
            // Delete-then-add: a fact both deleted and added stays true.
            let del: FactSet = set(&schema.del)?.difference(&add).copied().collect();
            if grounded
                .insert(name.clone(), GroundAction::new(pre, add, del, schema.cost))
                .is_some()
            {
                return Err(PddlError::Model(ModelError::DuplicateName(name)));
            }
        }
    }
    let (action_names, actions): (Vec<String>, Vec<GroundAction>) = grounded.into_iter().unzip();
    let universe = Arc::new(Universe::new(facts, action_names)?);
    let model = GroundedModel::new(universe, actions)?;
    let atoms = |set: &BTreeSet<GroundAtom>| -> Result<FactSet, PddlError> {
        set.iter().map(|a| lookup(&a.canonical())).collect()
    };
    Ok(GroundedTask {
        init: atoms(&problem.init)?,
        goal: atoms(&problem.goal)?,
        model,
    })
}

/// Grounds a robot domain and a human domain against one problem, giving both
/// models the same universe. The human domain must declare the same
/// predicates and action signatures as the robot domain.
pub fn ground_pair(
    robot: &DomainAst,
    human: &DomainAst,
    problem: &ProblemAst,
) -> Result<(GroundedTask, GroundedModel), PddlError> {
    let r = ground(robot, problem)?;
    let mut human_problem = problem.clone();
    human_problem.domain = human.name.clone();
    let h = ground(human, &human_problem)?;
    if r.universe() != h.universe() {
        return Err(PddlError::Model(ModelError::UniverseMismatch));
    }
    let human_model = GroundedModel::new(r.universe().clone(), h.model.actions().to_vec())?;
    Ok((r, human_model))
}
