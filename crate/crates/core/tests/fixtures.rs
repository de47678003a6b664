use std::collections::BTreeSet;

use oeg::fixtures::{self, Fixture};
use oeg::model::{apply_features, diff, gamma, ModelFeature};
use oeg::pddl::{ground, load_task, parse_domain, parse_problem, Term};
use oeg::planner::{compile_prefix, exists_optimal_with_prefix, optimal_cost, plan_optimal, validate, Invalid};

fn names(f: &Fixture, actions: &[oeg::model::ActionId]) -> Vec<String> {
    let task = load_task(f.domain, f.problem).unwrap();
    actions.iter().map(|&a| task.action_name(a).to_string()).collect()
}

#[test]
fn ipc_domains_have_standard_schema_counts() {
    assert_eq!(parse_domain(fixtures::ROVER.domain).unwrap().actions.len(), 9);
    assert_eq!(parse_domain(fixtures::BARMAN.domain).unwrap().actions.len(), 12);
}

#[test]
fn minirover_problem_shape() {
    let p = parse_problem(fixtures::MINIROVER.problem).unwrap();
    assert!(p.objects.is_empty());
    assert!(p.init.is_empty());
    assert_eq!(p.goal.len(), 1);
}

#[test]
fn minirover2_grounds_to_six_and_six() {
    let t = load_task(fixtures::MINIROVER2.domain, fixtures::MINIROVER2.problem).unwrap();
    assert_eq!(t.model.num_actions(), 6);
    assert_eq!(t.model.num_facts(), 6);
}

#[test]
fn every_fixture_domain_round_trips() {
    for f in fixtures::ALL {
        let d = parse_domain(f.domain).unwrap();
        assert_eq!(parse_domain(&d.to_string()).unwrap(), d, "{}", f.name);
        let p = parse_problem(f.problem).unwrap();
        assert_eq!(parse_problem(&p.to_string()).unwrap(), p, "{}", f.name);
    }
}

/// Re-derives each ground action's sets by substituting its name's
/// arguments into the schema text.
#[test]
fn grounding_is_sound_on_ipc_fixtures() {
    for f in [fixtures::ROVER, fixtures::BARMAN] {
        let d = parse_domain(f.domain).unwrap();
        let t = ground(&d, &parse_problem(f.problem).unwrap()).unwrap();
        for id in t.model.action_ids() {
            let name = t.action_name(id);
            let mut words = name.split(' ');
            let head = words.next().unwrap();
            let schema = d.actions.iter().find(|s| s.name == head).unwrap();
            let args: Vec<&str> = words.collect();
            let subst = |atoms: &[oeg::pddl::Atom]| -> BTreeSet<String> {
                atoms
                    .iter()
                    .map(|a| {
                        let mut parts = vec![a.predicate.clone()];
                        for term in &a.args {
                            parts.push(match term {
                                Term::Var(v) => {
                                    args[schema.params.iter().position(|p| &p.name == v).unwrap()].to_string()
                                }
                                Term::Const(c) => c.clone(),
                            });
                        }
                        parts.join(" ")
                    })
                    .collect()
            };
            let fact_names = |s: &oeg::model::FactSet| -> BTreeSet<String> {
                s.iter().map(|&x| t.fact_name(x).to_string()).collect()
            };
            let a = t.model.action(id);
            let add = subst(&schema.add);
            assert_eq!(fact_names(&a.pre), subst(&schema.pre), "{name}");
            assert_eq!(fact_names(&a.add), add, "{name}");
            assert_eq!(fact_names(&a.del), &subst(&schema.del) - &add, "{name}");
        }
    }
}

#[test]
fn minirover_features_and_diff() {
    let i = fixtures::MINIROVER.instance().unwrap();
    assert_eq!(gamma(&i.task.model).len(), 8);
    let d = diff(&i.task.model, &i.human).unwrap();
    assert_eq!(d.missing.names(), ["take-image-has-precondition-calibrated"]);
    assert!(d.extra.is_empty());
    assert_eq!(
        d.to_json().replace(char::is_whitespace, ""),
        r#"{"missing":["take-image-has-precondition-calibrated"],"extra":[]}"#
    );
    let fixed = apply_features(&i.human, &d.missing).unwrap();
    assert_eq!(fixed.model, i.task.model);
    assert!(fixed.cost_exchanges.is_empty());
}

#[test]
fn human_domain_and_removal_list_agree() {
    let a = fixtures::MINIROVER.instance().unwrap();
    let b = oeg::bench::Instance::load(
        fixtures::MINIROVER.domain,
        fixtures::MINIROVER.problem,
        &oeg::bench::HumanSource::Removals(vec!["take-image-has-precondition-calibrated".into()]),
    )
    .unwrap();
    assert_eq!(a.human, b.human);
}

#[test]
fn minirover_plans_and_validation() {
    let i = fixtures::MINIROVER.instance().unwrap();
    let t = &i.task;
    let robot = plan_optimal(&t.model, &t.init, &t.goal).unwrap();
    assert_eq!(
        names(&fixtures::MINIROVER, &robot.actions),
        ["calibrate", "take-image", "communicate"]
    );
    assert_eq!(robot.cost, 3);
    let human = plan_optimal(&i.human, &t.init, &t.goal).unwrap();
    assert_eq!(
        names(&fixtures::MINIROVER, &human.actions),
        ["take-image", "communicate"]
    );
    assert_eq!(human.cost, 2);
    assert_eq!(
        validate(&t.model, &t.init, &t.goal, &human.actions),
        Err(Invalid { step: 1 })
    );
    assert_eq!(validate(&t.model, &t.init, &t.goal, &robot.actions), Ok(3));
}

#[test]
fn prefix_compilation_examples() {
    let i = fixtures::MINIROVER.instance().unwrap();
    let t = &i.task;
    let calibrate = t.universe().action("calibrate").unwrap();
    let c = compile_prefix(t, &[calibrate]).unwrap();
    assert_eq!(optimal_cost(&c.task.model, &c.task.init, &c.task.goal), Some(3));

    let h = t.with_model(i.human.clone());
    let c = compile_prefix(&h, &[calibrate]).unwrap();
    assert_eq!(optimal_cost(&c.task.model, &c.task.init, &c.task.goal), Some(3));
    assert_eq!(optimal_cost(&h.model, &h.init, &h.goal), Some(2));
    assert!(!exists_optimal_with_prefix(&h.model, &h.init, &h.goal, &[calibrate]).unwrap());

    let robot = plan_optimal(&t.model, &t.init, &t.goal).unwrap();
    assert!(exists_optimal_with_prefix(&t.model, &t.init, &t.goal, &robot.actions).unwrap());
}

#[test]
fn tieworld_walk_prefix_is_optimal_for_human() {
    let i = fixtures::TIEWORLD.instance().unwrap();
    let t = &i.task;
    let walk = t.universe().action("walk").unwrap();
    assert!(exists_optimal_with_prefix(&i.human, &t.init, &t.goal, &[walk]).unwrap());
    let human = plan_optimal(&i.human, &t.init, &t.goal).unwrap();
    assert_eq!(names(&fixtures::TIEWORLD, &human.actions), ["bike"]);
}

#[test]
fn removal_lists_name_real_features() {
    for f in fixtures::ALL {
        let i = f.instance().unwrap();
        let d = diff(&i.task.model, &i.human).unwrap();
        assert!(d.extra.is_empty(), "{}", f.name);
        assert!(!d.missing.is_empty(), "{}", f.name);
        for m in &d.missing {
            assert!(ModelFeature::parse(m.canonical(), i.task.universe()).is_ok());
        }
    }
}
