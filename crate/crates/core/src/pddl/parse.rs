use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::sexpr::{read, Pos, Sexp};
use super::PddlError;

fn syntax(e: &Sexp, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        pos: e.pos(),
        token: e.token(),
        message: message.into(),
    }
}

fn unsupported(construct: impl Into<String>, pos: Pos) -> PddlError {
    PddlError::Unsupported {
        construct: construct.into(),
        pos,
    }
}

fn list<'a>(e: &'a Sexp, what: &str) -> Result<&'a [Sexp], PddlError> {
    e.as_list().ok_or_else(|| syntax(e, format!("expected {what}")))
}

fn atom<'a>(e: &'a Sexp, what: &str) -> Result<&'a str, PddlError> {
    e.as_atom().ok_or_else(|| syntax(e, format!("expected {what}")))
}

fn name(e: &Sexp, what: &str) -> Result<String, PddlError> {
    let s = atom(e, what)?;
    if s.starts_with('?') || s.starts_with(':') || s == "-" {
        return Err(syntax(e, format!("expected {what}")));
    }
    Ok(s.to_string())
}

/// `(define (<kind> <name>) ...)`: returns the name and the remaining sections.
fn header<'a>(e: &'a Sexp, kind: &str) -> Result<(String, &'a [Sexp]), PddlError> {
    let items = list(e, "(define ...)")?;
    match items.first().and_then(Sexp::as_atom) {
        Some("define") => {}
        _ => return Err(syntax(e, "expected (define ...)")),
    }
    let head = items
        .get(1)
        .ok_or_else(|| syntax(e, format!("expected ({kind} <name>)")))?;
    let h = list(head, &format!("({kind} <name>)"))?;
    if h.len() != 2 || h[0].as_atom() != Some(kind) {
        return Err(syntax(head, format!("expected ({kind} <name>)")));
    }
    Ok((name(&h[1], &format!("{kind} name"))?, &items[2..]))
}

/// Parses `a b - t c ?d` style typed lists. Untyped names get `object`.
fn typed_list(items: &[Sexp], vars: bool) -> Result<Vec<Typed>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let it = &items[i];
        if it.as_atom() == Some("-") {
            let ty = items.get(i + 1).ok_or_else(|| syntax(it, "expected type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(unsupported("either types", ty.pos()));
            }
            let ty = name(ty, "type name")?;
            if pending.is_empty() {
                return Err(syntax(it, "type annotation without names"));
            }
            out.extend(pending.drain(..).map(|n| Typed::new(n, ty.clone())));
            i += 2;
            continue;
        }
        let s = atom(it, if vars { "variable" } else { "name" })?;
        let n = if vars {
            s.strip_prefix('?')
                .filter(|v| !v.is_empty())
                .ok_or_else(|| syntax(it, "expected variable"))?
                .to_string()
        } else {
            name(it, "name")?
        };
        pending.push(n);
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| Typed::new(n, "object")));
    Ok(out)
}

fn requirements(items: &[Sexp]) -> Result<BTreeSet<Requirement>, PddlError> {
    items
        .iter()
        .map(|r| {
            let tag = atom(r, "requirement")?;
            Requirement::parse(tag).ok_or_else(|| unsupported(tag, r.pos()))
        })
        .collect()
}

fn reject_connective(e: &Sexp) -> Result<(), PddlError> {
    match e.head() {
        Some("not") => Err(unsupported("negative literal", e.pos())),
        Some(k @ ("or" | "imply" | "exists" | "forall" | "when" | "preference")) => Err(unsupported(k, e.pos())),
        Some("=") => Err(unsupported("equality", e.pos())),
        Some(k @ ("<" | ">" | "<=" | ">=" | "assign" | "scale-up" | "scale-down" | "decrease")) => {
            Err(unsupported(format!("numeric expression `{k}`"), e.pos()))
        }
        _ => Ok(()),
    }
}

fn schema_atom(e: &Sexp) -> Result<Atom, PddlError> {
    reject_connective(e)?;
    let items = list(e, "atom")?;
    let predicate = name(items.first().ok_or_else(|| syntax(e, "empty atom"))?, "predicate")?;
    let args = items[1..]
        .iter()
        .map(|a| {
            let s = atom(a, "term")?;
            Ok(match s.strip_prefix('?') {
                Some(v) => Term::Var(v.to_string()),
                None => Term::Const(name(a, "term")?),
            })
        })
        .collect::<Result<_, PddlError>>()?;
    Ok(Atom { predicate, args })
}

fn ground_atom(e: &Sexp) -> Result<GroundAtom, PddlError> {
    reject_connective(e)?;
    let items = list(e, "ground atom")?;
    let predicate = name(items.first().ok_or_else(|| syntax(e, "empty atom"))?, "predicate")?;
    let args = items[1..].iter().map(|a| name(a, "object")).collect::<Result<_, _>>()?;
    Ok(GroundAtom { predicate, args })
}

/// Flattens `(and ...)` nests; `()` is the empty conjunction.
fn conjuncts<'a>(e: &'a Sexp, out: &mut Vec<&'a Sexp>) -> Result<(), PddlError> {
    match e {
        Sexp::List(items, _) if items.is_empty() => Ok(()),
        Sexp::List(items, _) if e.head() == Some("and") => {
            for c in &items[1..] {
                conjuncts(c, out)?;
            }
            Ok(())
        }
        Sexp::List(..) => {
            out.push(e);
            Ok(())
        }
        Sexp::Atom(..) => Err(syntax(e, "expected a formula")),
    }
}

fn is_total_cost(e: &Sexp) -> bool {
    matches!(e.as_list(), Some([h]) if h.as_atom() == Some("total-cost"))
}

fn action(items: &[Sexp], pos: Pos, costs_enabled: bool) -> Result<ActionSchema, PddlError> {
    let whole = Sexp::List(items.to_vec(), pos);
    let name = name(
        items.get(1).ok_or_else(|| syntax(&whole, "expected action name"))?,
        "action name",
    )?;
    let mut params = Vec::new();
    let mut pre = Vec::new();
    let mut add = Vec::new();
    let mut del = Vec::new();
    let mut cost: Option<u32> = None;
    let mut i = 2;
    while i < items.len() {
        let key = atom(&items[i], "action keyword")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| syntax(&items[i], format!("missing value for {key}")))?;
        match key {
            ":parameters" => params = typed_list(list(val, "parameter list")?, true)?,
            ":precondition" => {
                let mut cs = Vec::new();
                conjuncts(val, &mut cs)?;
                pre = cs.into_iter().map(schema_atom).collect::<Result<_, _>>()?;
            }
            ":effect" => {
                let mut cs = Vec::new();
                conjuncts(val, &mut cs)?;
                for c in cs {
                    match c.head() {
                        Some("not") => {
                            let inner = list(c, "negated atom")?;
                            match inner {
                                [_, a] => del.push(schema_atom(a)?),
                                _ => return Err(syntax(c, "malformed (not ...)")),
                            }
                        }
                        Some("increase") => {
                            let parts = list(c, "increase")?;
                            match parts {
                                [_, target, amount] if is_total_cost(target) => {
                                    if !costs_enabled {
                                        return Err(unsupported("increase without :action-costs", c.pos()));
                                    }
                                    let n = amount
                                        .as_atom()
                                        .and_then(|s| s.parse::<u32>().ok())
                                        .ok_or_else(|| unsupported("non-constant action cost", amount.pos()))?;
                                    *cost.get_or_insert(0) += n;
                                }
                                _ => return Err(unsupported("numeric fluent effect", c.pos())),
                            }
                        }
                        _ => add.push(schema_atom(c)?),
                    }
                }
            }
            other => return Err(unsupported(format!("action keyword {other}"), items[i].pos())),
        }
        i += 2;
    }
    Ok(ActionSchema {
        name,
        params,
        pre,
        add,
        del,
        cost: cost.unwrap_or(1),
    })
}

/// Parses a domain file of the supported STRIPS subset and checks that every
/// symbol it uses is declared.
pub fn parse_domain(text: &str) -> Result<DomainAst, PddlError> {
    let root = read(text)?;
    let (title, sections) = header(&root, "domain")?;
    let mut domain = DomainAst {
        name: title,
        requirements: BTreeSet::new(),
        types: BTreeMap::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    for sec in sections {
        let items = list(sec, "domain section")?;
        let key = items
            .first()
            .and_then(Sexp::as_atom)
            .ok_or_else(|| syntax(sec, "expected section keyword"))?;
        match key {
            ":requirements" => domain.requirements.extend(requirements(&items[1..])?),
            ":types" => {
                for t in typed_list(&items[1..], false)? {
                    if t.ty != "object" && !domain.types.contains_key(&t.ty) {
                        domain.types.entry(t.ty.clone()).or_insert_with(|| "object".to_string());
                    }
                    if t.name != "object" {
                        domain.types.insert(t.name, t.ty);
                    }
                }
            }
            ":constants" => domain.constants.extend(typed_list(&items[1..], false)?),
            ":predicates" => {
                for p in &items[1..] {
                    let parts = list(p, "predicate declaration")?;
                    let pname = name(
                        parts.first().ok_or_else(|| syntax(p, "empty predicate"))?,
                        "predicate name",
                    )?;
                    domain.predicates.push(PredicateDecl {
                        name: pname,
                        params: typed_list(&parts[1..], true)?,
                    });
                }
            }
            ":functions" => {
                let mut rest = &items[1..];
                while let Some(f) = rest.first() {
                    if !is_total_cost(f) {
                        return Err(unsupported("numeric function other than total-cost", f.pos()));
                    }
                    rest = &rest[1..];
                    if rest.first().and_then(Sexp::as_atom) == Some("-") {
                        match rest.get(1).and_then(Sexp::as_atom) {
                            Some("number") => rest = &rest[2..],
                            _ => return Err(syntax(f, "expected `- number`")),
                        }
                    }
                }
            }
            ":action" => {
                let costs = domain.requirements.contains(&Requirement::ActionCosts);
                domain.actions.push(action(items, sec.pos(), costs)?);
            }
            k @ (":derived" | ":durative-action" | ":constraints" | ":process" | ":event") => {
                return Err(unsupported(k, sec.pos()))
            }
            _ => return Err(syntax(sec, "unknown domain section")),
        }
    }
    check_domain(&domain)?;
    Ok(domain)
}

fn check_domain(d: &DomainAst) -> Result<(), PddlError> {
    let undeclared = |kind: &'static str, name: &str| PddlError::Undeclared {
        kind,
        name: name.to_string(),
    };
    let check_type = |t: &str| {
        if d.has_type(t) {
            Ok(())
        } else {
            Err(undeclared("type", t))
        }
    };
    for c in &d.constants {
        check_type(&c.ty)?;
    }
    for p in &d.predicates {
        for t in &p.params {
            check_type(&t.ty)?;
        }
    }
    for a in &d.actions {
        for t in &a.params {
            check_type(&t.ty)?;
        }
        for atom in a.pre.iter().chain(&a.add).chain(&a.del) {
            let decl = d
                .predicate(&atom.predicate)
                .ok_or_else(|| undeclared("predicate", &atom.predicate))?;
            if decl.params.len() != atom.args.len() {
                return Err(PddlError::ArityMismatch {
                    symbol: atom.predicate.clone(),
                    expected: decl.params.len(),
                    found: atom.args.len(),
                });
            }
            for (term, slot) in atom.args.iter().zip(&decl.params) {
                let ty = match term {
                    Term::Var(v) => {
                        &a.params
                            .iter()
                            .find(|p| &p.name == v)
                            .ok_or_else(|| undeclared("variable", &format!("?{v} in {}", a.name)))?
                            .ty
                    }
                    Term::Const(c) => {
                        &d.constants
                            .iter()
                            .find(|k| &k.name == c)
                            .ok_or_else(|| undeclared("constant", c))?
                            .ty
                    }
                };
                if !d.is_subtype(ty, &slot.ty) {
                    return Err(PddlError::TypeMismatch {
                        context: format!("{} in action {}", atom, a.name),
                        expected: slot.ty.clone(),
                        found: ty.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Parses a problem file. Symbols are checked against a domain by
/// [`check_problem`], which grounding calls.
pub fn parse_problem(text: &str) -> Result<ProblemAst, PddlError> {
    let root = read(text)?;
    let (title, sections) = header(&root, "problem")?;
    let mut problem = ProblemAst {
        name: title,
        domain: String::new(),
        objects: Vec::new(),
        init: BTreeSet::new(),
        goal: BTreeSet::new(),
    };
    let mut saw_domain = false;
    for sec in sections {
        let items = list(sec, "problem section")?;
        let key = items
            .first()
            .and_then(Sexp::as_atom)
            .ok_or_else(|| syntax(sec, "expected section keyword"))?;
        match key {
            ":domain" => match items {
                [_, d] => {
                    problem.domain = name(d, "domain name")?;
                    saw_domain = true;
                }
                _ => return Err(syntax(sec, "expected (:domain <name>)")),
            },
            ":requirements" => {
                requirements(&items[1..])?;
            }
            ":objects" => problem.objects.extend(typed_list(&items[1..], false)?),
            ":init" => {
                for fact in &items[1..] {
                    if fact.head() == Some("=") {
                        match fact.as_list() {
                            Some([_, f, v])
                                if is_total_cost(f) && v.as_atom().and_then(|s| s.parse::<u64>().ok()).is_some() =>
                            {
                                continue
                            }
                            _ => return Err(unsupported("numeric initial value", fact.pos())),
                        }
                    }
                    problem.init.insert(ground_atom(fact)?);
                }
            }
            ":goal" => {
                let body = match items {
                    [_, g] => g,
                    _ => return Err(syntax(sec, "expected (:goal <formula>)")),
                };
                let mut cs = Vec::new();
                conjuncts(body, &mut cs)?;
                for c in cs {
                    problem.goal.insert(ground_atom(c)?);
                }
            }
            ":metric" => match items {
                [_, dir, f] if dir.as_atom() == Some("minimize") && is_total_cost(f) => {}
                _ => return Err(unsupported("metric other than (minimize (total-cost))", sec.pos())),
            },
            _ => return Err(syntax(sec, "unknown problem section")),
        }
    }
    if !saw_domain {
        return Err(syntax(&root, "missing (:domain ...)"));
    }
    Ok(problem)
}

/// Checks a problem's objects and atoms against `domain`.
pub fn check_problem(domain: &DomainAst, problem: &ProblemAst) -> Result<(), PddlError> {
    if domain.name != problem.domain {
        return Err(PddlError::DomainMismatch {
            domain: domain.name.clone(),
            problem: problem.domain.clone(),
        });
    }
    let mut objects: BTreeMap<&str, &str> = BTreeMap::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        if !domain.has_type(&o.ty) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: o.ty.clone(),
            });
        }
        if let Some(prev) = objects.insert(&o.name, &o.ty) {
            if prev != o.ty {
                return Err(PddlError::TypeMismatch {
                    context: format!("object {}", o.name),
                    expected: prev.to_string(),
                    found: o.ty.clone(),
                });
            }
        }
    }
    for a in problem.init.iter().chain(&problem.goal) {
        let decl = domain.predicate(&a.predicate).ok_or_else(|| PddlError::Undeclared {
            kind: "predicate",
            name: a.predicate.clone(),
        })?;
        if decl.params.len() != a.args.len() {
            return Err(PddlError::ArityMismatch {
                symbol: a.predicate.clone(),
                expected: decl.params.len(),
                found: a.args.len(),
            });
        }
        for (arg, slot) in a.args.iter().zip(&decl.params) {
            let ty = objects.get(arg.as_str()).ok_or_else(|| PddlError::Undeclared {
                kind: "object",
                name: arg.clone(),
            })?;
            if !domain.is_subtype(ty, &slot.ty) {
                return Err(PddlError::TypeMismatch {
                    context: a.to_string(),
                    expected: slot.ty.clone(),
                    found: ty.to_string(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "(define (domain tiny) (:predicates (done)) (:action finish :parameters () :effect (done)))";

    #[test]
    fn minimal_domain_defaults_to_unit_cost() {
        let d = parse_domain(TINY).unwrap();
        assert_eq!(d.actions.len(), 1);
        assert_eq!(d.actions[0].cost, 1);
        assert!(d.actions[0].pre.is_empty());
    }

    #[test]
    fn rejects_adl_requirement() {
        let err = parse_domain("(define (domain x) (:requirements :adl))").unwrap_err();
        assert!(
            matches!(err, PddlError::Unsupported { ref construct, .. } if construct == ":adl"),
            "{err}"
        );
        let err = parse_domain("(define (domain x) (:requirements :strips :negative-preconditions))").unwrap_err();
        assert!(matches!(err, PddlError::Unsupported { ref construct, .. } if construct == ":negative-preconditions"));
    }

    #[test]
    fn rejects_non_strips_formulas() {
        let neg =
            "(define (domain x) (:predicates (p)) (:action a :parameters () :precondition (not (p)) :effect (p)))";
        assert!(matches!(parse_domain(neg), Err(PddlError::Unsupported { .. })));
        let or =
            "(define (domain x) (:predicates (p)) (:action a :parameters () :precondition (or (p) (p)) :effect (p)))";
        assert!(matches!(parse_domain(or), Err(PddlError::Unsupported { ref construct, .. }) if construct == "or"));
        let when = "(define (domain x) (:predicates (p)) (:action a :parameters () :effect (when (p) (p))))";
        assert!(matches!(parse_domain(when), Err(PddlError::Unsupported { ref construct, .. }) if construct == "when"));
        let forall = "(define (domain x) (:predicates (p ?x)) (:action a :parameters () :effect (forall (?x) (p ?x))))";
        assert!(matches!(parse_domain(forall), Err(PddlError::Unsupported { .. })));
    }

    #[test]
    fn action_costs_need_requirement() {
        let no_req = "(define (domain x) (:predicates (p)) (:action a :parameters () :effect (and (p) (increase (total-cost) 2))))";
        assert!(matches!(parse_domain(no_req), Err(PddlError::Unsupported { .. })));
        let with_req = "(define (domain x) (:requirements :action-costs) (:predicates (p)) (:functions (total-cost) - number) (:action a :parameters () :effect (and (p) (increase (total-cost) 2))))";
        assert_eq!(parse_domain(with_req).unwrap().actions[0].cost, 2);
    }

    #[test]
    fn undeclared_symbols_are_reported() {
        let bad_pred = "(define (domain x) (:predicates (p)) (:action a :parameters () :effect (q)))";
        assert!(matches!(
            parse_domain(bad_pred),
            Err(PddlError::Undeclared { kind: "predicate", .. })
        ));
        let bad_var = "(define (domain x) (:predicates (p ?y)) (:action a :parameters () :effect (p ?z)))";
        assert!(matches!(
            parse_domain(bad_var),
            Err(PddlError::Undeclared { kind: "variable", .. })
        ));
        let bad_type = "(define (domain x) (:requirements :typing) (:predicates (p ?y - thing)))";
        assert!(matches!(
            parse_domain(bad_type),
            Err(PddlError::Undeclared { kind: "type", .. })
        ));
        let arity = "(define (domain x) (:predicates (p ?y)) (:action a :parameters (?y) :effect (p ?y ?y)))";
        assert!(matches!(parse_domain(arity), Err(PddlError::ArityMismatch { .. })));
    }

    #[test]
    fn schema_argument_types_are_checked() {
        let src = "(define (domain x) (:requirements :typing) (:types cam rover)
            (:predicates (on ?c - cam)) (:action a :parameters (?r - rover) :effect (on ?r)))";
        assert!(matches!(parse_domain(src), Err(PddlError::TypeMismatch { .. })));
    }

    #[test]
    fn type_hierarchy() {
        let d = parse_domain(
            "(define (domain x) (:requirements :typing) (:types shot shaker - container hand) (:predicates))",
        )
        .unwrap();
        assert!(d.is_subtype("shot", "container"));
        assert!(d.is_subtype("shot", "object"));
        assert!(!d.is_subtype("hand", "container"));
        assert_eq!(d.types["container"], "object");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_domain("(define (domain x)\n  (:predicates (p))\n  (:action a :parameters () :effect (p))") {
            Err(PddlError::Syntax { pos, .. }) => assert_eq!(pos.line, 1),
            other => panic!("{other:?}"),
        }
        match parse_domain("(define (domain x)\n (:shapes))") {
            Err(PddlError::Syntax { pos, token, .. }) => {
                assert_eq!((pos.line, pos.col), (2, 2));
                assert_eq!(token, "(:shapes ...)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn problem_with_empty_init() {
        let p = parse_problem("(define (problem p) (:domain tiny) (:init) (:goal (done)))").unwrap();
        assert!(p.init.is_empty());
        assert_eq!(p.goal.len(), 1);
        check_problem(&parse_domain(TINY).unwrap(), &p).unwrap();
    }

    #[test]
    fn problem_rejects_negative_goal() {
        let err = parse_problem("(define (problem p) (:domain tiny) (:init) (:goal (and (not (done)))))").unwrap_err();
        assert!(matches!(err, PddlError::Unsupported { .. }));
    }

    #[test]
    fn problem_checks_symbols() {
        let d =
            parse_domain("(define (domain t) (:requirements :typing) (:types a b) (:predicates (p ?x - a)))").unwrap();
        let undeclared =
            parse_problem("(define (problem q) (:domain t) (:objects o - a) (:init (p z)) (:goal (p o)))").unwrap();
        assert!(matches!(
            check_problem(&d, &undeclared),
            Err(PddlError::Undeclared { kind: "object", .. })
        ));
        let wrong =
            parse_problem("(define (problem q) (:domain t) (:objects o - b) (:init (p o)) (:goal (p o)))").unwrap();
        assert!(matches!(check_problem(&d, &wrong), Err(PddlError::TypeMismatch { .. })));
        let other = parse_problem("(define (problem q) (:domain elsewhere) (:init) (:goal (p o)))").unwrap();
        assert!(matches!(
            check_problem(&d, &other),
            Err(PddlError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn problem_accepts_cost_metric() {
        let p = parse_problem(
            "(define (problem p) (:domain tiny) (:init (= (total-cost) 0)) (:goal (done)) (:metric minimize (total-cost)))",
        )
        .unwrap();
        assert!(p.init.is_empty());
    }
}
