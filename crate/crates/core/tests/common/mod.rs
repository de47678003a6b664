//! Random propositional tasks shared by the property and acceptance tests.
#![allow(dead_code)]

use std::fmt::Write as _;

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use oeg::pddl::{load_task, GroundedTask};

#[derive(Debug, Clone)]
pub struct RandomAction {
    pub pre: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub cost: u32,
}

/// A STRIPS task over facts `p0..pN` and actions `a0..aM`.
#[derive(Debug, Clone)]
pub struct RandomTask {
    pub facts: usize,
    pub actions: Vec<RandomAction>,
    pub init: Vec<usize>,
    pub goal: Vec<usize>,
}

fn atoms(out: &mut String, ids: &[usize]) {
    for i in ids {
        let _ = write!(out, " (p{i})");
    }
}

impl RandomTask {
    pub fn domain_pddl(&self) -> String {
        let mut s = String::from("(define (domain random)\n  (:requirements :strips :action-costs)\n  (:predicates");
        for i in 0..self.facts {
            let _ = write!(s, " (p{i})");
        }
        s.push_str(")\n  (:functions (total-cost) - number)\n");
        for (j, a) in self.actions.iter().enumerate() {
            let _ = write!(s, "  (:action a{j}\n    :parameters ()\n");
            if !a.pre.is_empty() {
                s.push_str("    :precondition (and");
                atoms(&mut s, &a.pre);
                s.push_str(")\n");
            }
            s.push_str("    :effect (and");
            atoms(&mut s, &a.add);
            for d in &a.del {
                let _ = write!(s, " (not (p{d}))");
            }
            let _ = writeln!(s, " (increase (total-cost) {})))", a.cost);
        }
        s.push(')');
        s
    }

    pub fn problem_pddl(&self) -> String {
        let mut s = String::from("(define (problem random-1)\n  (:domain random)\n  (:init (= (total-cost) 0)");
        atoms(&mut s, &self.init);
        s.push_str(")\n  (:goal (and");
        atoms(&mut s, &self.goal);
        s.push_str("))\n  (:metric minimize (total-cost)))");
        s
    }

    pub fn ground(&self) -> GroundedTask {
        load_task(&self.domain_pddl(), &self.problem_pddl()).expect("random task grounds")
    }
}

fn fact_list(facts: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    btree_set(0..facts, 0..=max).prop_map(|s| s.into_iter().collect())
}

pub fn random_task(max_facts: usize, max_actions: usize) -> impl Strategy<Value = RandomTask> {
    (2..=max_facts).prop_flat_map(move |facts| {
        let action = (fact_list(facts, 2), fact_list(facts, 2), fact_list(facts, 2), 1u32..=3)
            .prop_map(|(pre, add, del, cost)| RandomAction { pre, add, del, cost });
        (
            vec(action, 1..=max_actions),
            fact_list(facts, facts / 2),
            btree_set(0..facts, 1..=2).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
        )
            .prop_map(move |(actions, init, goal)| RandomTask {
                facts,
                actions,
                init,
                goal,
            })
    })
}
