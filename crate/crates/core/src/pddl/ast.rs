use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Requirement flags of the supported subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Requirement {
    Strips,
    Typing,
    ActionCosts,
}

impl Requirement {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":action-costs" => Some(Requirement::ActionCosts),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::ActionCosts => ":action-costs",
        }
    }
}

/// A name with its declared type (`object` when untyped).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Typed {
    pub name: String,
    pub ty: String,
}

impl Typed {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        Typed {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    /// Parameter names are stored without the leading `?`.
    pub params: Vec<Typed>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Typed>,
    pub pre: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: BTreeSet<Requirement>,
    /// Declared type → parent type. `object` is the implicit root.
    pub types: BTreeMap<String, String>,
    pub constants: Vec<Typed>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == "object" || self.types.contains_key(ty)
    }

    /// True when `sub` equals `sup` or descends from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sup == "object" {
            return true;
        }
        let mut cur = sub;
        for _ in 0..=self.types.len() {
            if cur == sup {
                return true;
            }
            match self.types.get(cur) {
                Some(parent) => cur = parent,
                None => return false,
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    /// `pred a b` rendering used for fact names.
    pub fn canonical(&self) -> String {
        canonical_name(&self.predicate, &self.args)
    }
}

pub(crate) fn canonical_name(head: &str, args: &[String]) -> String {
    let mut s = head.to_string();
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<Typed>,
    pub init: BTreeSet<GroundAtom>,
    pub goal: BTreeSet<GroundAtom>,
}

fn write_typed(f: &mut fmt::Formatter<'_>, items: &[Typed], var: bool) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        if var {
            f.write_str("?")?;
        }
        write!(f, "{} - {}", t.name, t.ty)?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.canonical())
    }
}

impl fmt::Display for DomainAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            f.write_str("  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {}", r.tag())?;
            }
            f.write_str(")\n")?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types")?;
            for (t, parent) in &self.types {
                write!(f, " {t} - {parent}")?;
            }
            f.write_str(")\n")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            write_typed(f, &self.constants, false)?;
            f.write_str(")\n")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, "\n    ({}", p.name)?;
            if !p.params.is_empty() {
                f.write_str(" ")?;
                write_typed(f, &p.params, true)?;
            }
            f.write_str(")")?;
        }
        f.write_str(")\n")?;
        let costs = self.requirements.contains(&Requirement::ActionCosts);
        if costs {
            f.write_str("  (:functions (total-cost) - number)\n")?;
        }
        for a in &self.actions {
            writeln!(f, "  (:action {}", a.name)?;
            f.write_str("    :parameters (")?;
            write_typed(f, &a.params, true)?;
            f.write_str(")\n    :precondition (and")?;
            for p in &a.pre {
                write!(f, " {p}")?;
            }
            f.write_str(")\n    :effect (and")?;
            for p in &a.add {
                write!(f, " {p}")?;
            }
            for p in &a.del {
                write!(f, " (not {p})")?;
            }
            if costs {
                write!(f, " (increase (total-cost) {})", a.cost)?;
            }
            f.write_str("))\n")?;
        }
        f.write_str(")\n")
    }
}

impl fmt::Display for ProblemAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        f.write_str("  (:objects ")?;
        write_typed(f, &self.objects, false)?;
        f.write_str(")\n  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        f.write_str(")\n  (:goal (and")?;
        for a in &self.goal {
            write!(f, " {a}")?;
        }
        f.write_str(")))\n")
    }
}
