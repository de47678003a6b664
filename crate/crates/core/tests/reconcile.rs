use oeg::fixtures;
use oeg::model::FeatureSet;
use oeg::planner::Plan;
use oeg::reconcile::*;

fn steps(e: &OnlineExplanation) -> Vec<(usize, Vec<String>)> {
    e.parts.iter().map(|p| (p.step, p.features.names())).collect()
}

fn own(s: &[(usize, &[&str])]) -> Vec<(usize, Vec<String>)> {
    s.iter()
        .map(|(t, f)| (*t, f.iter().map(|x| x.to_string()).collect()))
        .collect()
}

const CAL: &str = "take-image-has-precondition-calibrated";
const WARM: &str = "drill-sample-has-precondition-warmed";

/// A problem whose human already has the robot's model.
fn agreeing(f: fixtures::Fixture) -> ReconciliationProblem {
    let t = f.instance().unwrap().task;
    ReconciliationProblem::from_task(&t, t.model.clone()).unwrap()
}

#[test]
fn identical_models_need_no_explanation() {
    for f in fixtures::ALL {
        let p = agreeing(f);
        assert!(mce(&p).unwrap().is_empty());
        assert!(mce_random(&p, 3).unwrap().parts.is_empty());
        assert!(oeg_pp(&p, PpMode::Approx).unwrap().parts.is_empty());
        assert!(oeg_pp(&p, PpMode::exact()).unwrap().parts.is_empty());
        assert!(oeg_na(&p).unwrap().parts.is_empty());
        assert!(oeg_ap(&p).unwrap().parts.is_empty());
    }
}

#[test]
fn mce_examples() {
    assert_eq!(mce(&fixtures::MINIROVER.problem()).unwrap().names(), [CAL]);
    assert_eq!(mce(&fixtures::MINIROVER2.problem()).unwrap().names(), [WARM, CAL]);
    assert!(mce(&fixtures::TIEWORLD.problem()).unwrap().is_empty());
}

#[test]
fn mce_random_schedule() {
    let p = fixtures::MINIROVER2.problem();
    let mut saw_split = false;
    for seed in 0..64 {
        let e = mce_random(&p, seed).unwrap();
        assert_eq!(e, mce_random(&p, seed).unwrap());
        assert_eq!(e.total_features(), 2);
        let at: Vec<usize> = e.parts.iter().map(|x| x.step).collect();
        match e.num_parts() {
            1 => assert_eq!(at, [1]),
            2 => {
                assert_eq!(at, [1, 4]);
                saw_split = true;
            }
            n => panic!("{n} parts from a size-2 MCE"),
        }
    }
    assert!(saw_split);

    let single = fixtures::MINIROVER.problem();
    for seed in 0..16 {
        assert_eq!(steps(&mce_random(&single, seed).unwrap()), own(&[(1, &[CAL])]));
    }
}

#[test]
fn oeg_pp_examples() {
    for mode in [PpMode::Approx, PpMode::exact()] {
        assert_eq!(
            steps(&oeg_pp(&fixtures::MINIROVER.problem(), mode).unwrap()),
            own(&[(1, &[CAL])])
        );
        assert_eq!(
            steps(&oeg_pp(&fixtures::MINIROVER2.problem(), mode).unwrap()),
            own(&[(1, &[CAL]), (4, &[WARM])])
        );
    }
}

#[test]
fn exact_mode_respects_threshold() {
    let p = fixtures::MINIROVER2.problem();
    assert_eq!(
        oeg_pp(&p, PpMode::Exact { threshold: 1 }),
        Err(ReconcileError::ExactModeTooLarge {
            features: 2,
            threshold: 1
        })
    );
}

#[test]
fn oeg_na_examples() {
    assert_eq!(
        steps(&oeg_na(&fixtures::MINIROVER.problem()).unwrap()),
        own(&[(1, &[CAL])])
    );
    let p = fixtures::DETOUR.problem();
    let e = oeg_na(&p).unwrap();
    assert_eq!(steps(&e), own(&[(2, &["coast-has-precondition-downhill"])]));
    let r = verify_online(&p, &e);
    assert!(r.passed());
    assert_eq!(r.distance, 0.5);
}

#[test]
fn oeg_ap_examples() {
    assert!(oeg_ap(&fixtures::TIEWORLD.problem()).unwrap().parts.is_empty());
    assert_eq!(
        steps(&oeg_ap(&fixtures::MINIROVER.problem()).unwrap()),
        own(&[(1, &[CAL])])
    );
}

#[test]
fn verify_examples() {
    let p = fixtures::MINIROVER2.problem();
    let pp = oeg_pp(&p, PpMode::Approx).unwrap();
    let r = verify_online(&p, &pp);
    assert!(r.passed());
    assert_eq!(r.distance, 0.0);
    assert_eq!(r.per_step.len(), 2);

    let tie = fixtures::TIEWORLD.problem();
    let r = verify_online(&tie, &oeg_ap(&tie).unwrap());
    assert!(r.final_check);
    assert_eq!(r.distance, 1.0);

    // Deliver the step-4 feature first: the prefix before step 4 then breaks.
    let mut shuffled = pp.clone();
    let (a, b) = (shuffled.parts[0].features.clone(), shuffled.parts[1].features.clone());
    shuffled.parts[0].features = b;
    shuffled.parts[1].features = a;
    let r = verify_online(&p, &shuffled);
    assert!(!r.passed());
    assert_eq!(r.first_failure(), Some(2));
    assert!(r.per_step[0].holds);
}

#[test]
fn verify_flags_structural_problems() {
    let p = fixtures::MINIROVER2.problem();
    let mut e = oeg_pp(&p, PpMode::Approx).unwrap();
    e.parts.swap(0, 1);
    let r = verify_online(&p, &e);
    assert!(!r.problems.is_empty());
    assert!(!r.passed());

    let mut dup = oeg_pp(&p, PpMode::Approx).unwrap();
    let first = dup.parts[0].features.clone();
    dup.parts[1].features.extend(first);
    assert!(!verify_online(&p, &dup).problems.is_empty());
}

#[test]
fn pp_and_na_need_the_canonical_plan() {
    let i = fixtures::TIEWORLD.instance().unwrap();
    let t = &i.task;
    let walk = t.universe().action("walk").unwrap();
    // Both actions are possible in the human's model; [walk] is optimal but
    // the planner prefers [bike].
    let p = ReconciliationProblem::new(
        i.human.clone(),
        i.human.clone(),
        t.init.clone(),
        t.goal.clone(),
        Plan::new(vec![walk], 2),
    )
    .unwrap();
    assert!(!p.is_canonical());
    assert_eq!(oeg_pp(&p, PpMode::Approx), Err(ReconcileError::NonCanonicalPlan));
    assert_eq!(oeg_na(&p), Err(ReconcileError::NonCanonicalPlan));
    assert!(oeg_ap(&p).unwrap().parts.is_empty());
}

#[test]
fn invalid_inputs_are_refused() {
    let i = fixtures::MINIROVER.instance().unwrap();
    let t = &i.task;
    let swapped =
        ReconciliationProblem::with_canonical_plan(i.human.clone(), t.model.clone(), t.init.clone(), t.goal.clone());
    assert_eq!(swapped.unwrap_err(), ReconcileError::ExtraFeatures(vec![CAL.into()]));

    let ids = |names: &[&str]| t.universe().actions_named(names.iter().copied()).unwrap();
    let long = ids(&["calibrate", "calibrate", "take-image", "communicate"]);
    let r = ReconciliationProblem::new(
        t.model.clone(),
        i.human.clone(),
        t.init.clone(),
        t.goal.clone(),
        Plan::new(long, 4),
    );
    assert_eq!(
        r.unwrap_err(),
        ReconcileError::NonOptimalRobotPlan { cost: 4, optimal: 3 }
    );

    let short = ids(&["take-image", "communicate"]);
    let r = ReconciliationProblem::new(
        t.model.clone(),
        i.human.clone(),
        t.init.clone(),
        t.goal.clone(),
        Plan::new(short, 2),
    );
    assert_eq!(r.unwrap_err(), ReconcileError::InvalidRobotPlan { step: 1 });
}

#[test]
fn trace_format_and_round_trip() {
    let p = fixtures::MINIROVER.problem();
    let e = oeg_pp(&p, PpMode::Approx).unwrap();
    let trace = Trace::new(&p, &e);
    assert_eq!(
        trace.to_json().replace(char::is_whitespace, ""),
        r#"{"variant":"oeg-pp","parts":[{"step":1,"features":["take-image-has-precondition-calibrated"]}],"final_distance":0.0,"total_features":1,"avg_part_size":1.0}"#
    );
    let back = Trace::from_json(&trace.to_json()).unwrap();
    assert_eq!(back, trace);
    assert_eq!(back.to_explanation(p.robot().universe()).unwrap(), e);
}

#[test]
fn every_generator_replays_from_its_trace() {
    for f in fixtures::ALL {
        let p = f.problem();
        for v in Variant::ALL {
            let e = explain(&p, v, ExplainOptions { seed: 11, exact: false }).unwrap();
            let trace = Trace::from_json(&Trace::new(&p, &e).to_json()).unwrap();
            let replayed = trace.to_explanation(p.robot().universe()).unwrap();
            let r = verify_online(&p, &replayed);
            assert!(r.passed(), "{} {v}: {r:?}", f.name);
            assert_eq!(r.distance, trace.final_distance);
        }
    }
}

#[test]
fn offline_explanation_is_one_part() {
    let p = fixtures::MINIROVER2.problem();
    let e = OnlineExplanation::offline(mce(&p).unwrap());
    assert_eq!(e.num_parts(), 1);
    assert_eq!(e.parts[0].step, 1);
    assert_eq!(e.avg_part_size(), 2.0);
    assert!(OnlineExplanation::offline(FeatureSet::new()).parts.is_empty());
}
