//! Small instances shipped with the library.
//!
//! | name | actions | human model |
//! |---|---|---|
//! | `minirover` | 3 | domain without take-image's calibration precondition |
//! | `minirover2` | 6 | two preconditions removed; explained at steps 1 and 4 |
//! | `tieworld` | 2 | walking and biking tie; the human forgets biking needs a bike |
//! | `detour` | 4 | fixing the next action reshuffles an earlier one |
//! | `rover-p1` | IPC Rover, 97 ground | three ground features removed |
//! | `barman-p1` | IPC Barman, 402 ground | two ground features removed |
//!
//! The Rover and Barman instances and removal lists are this crate's own,
//! sized so that the brute-force oracles finish in well under a second.

use crate::bench::{parse_removal_list, HumanSource, Instance, LoadError};

#[derive(Debug, Clone, Copy)]
enum Human {
    Domain(&'static str),
    Removals(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub domain: &'static str,
    pub problem: &'static str,
    human: Human,
}

macro_rules! text {
    ($file:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $file))
    };
}

pub const MINIROVER: Fixture = Fixture {
    name: "minirover",
    domain: text!("minirover-domain.pddl"),
    problem: text!("minirover-problem.pddl"),
    human: Human::Domain(text!("minirover-human.pddl")),
};

pub const MINIROVER2: Fixture = Fixture {
    name: "minirover2",
    domain: text!("minirover2-domain.pddl"),
    problem: text!("minirover2-problem.pddl"),
    human: Human::Removals(text!("minirover2-remove.txt")),
};

pub const TIEWORLD: Fixture = Fixture {
    name: "tieworld",
    domain: text!("tieworld-domain.pddl"),
    problem: text!("tieworld-problem.pddl"),
    human: Human::Domain(text!("tieworld-human.pddl")),
};

pub const DETOUR: Fixture = Fixture {
    name: "detour",
    domain: text!("detour-domain.pddl"),
    problem: text!("detour-problem.pddl"),
    human: Human::Removals(text!("detour-remove.txt")),
};

pub const ROVER: Fixture = Fixture {
    name: "rover-p1",
    domain: text!("rover-domain.pddl"),
    problem: text!("rover-problem.pddl"),
    human: Human::Removals(text!("rover-remove.txt")),
};

pub const BARMAN: Fixture = Fixture {
    name: "barman-p1",
    domain: text!("barman-domain.pddl"),
    problem: text!("barman-problem.pddl"),
    human: Human::Removals(text!("barman-remove.txt")),
};

pub const ALL: [Fixture; 6] = [MINIROVER, MINIROVER2, TIEWORLD, DETOUR, ROVER, BARMAN];

/// Suite config covering every fixture, with paths relative to the
/// fixture directory.
pub const SUITE_JSON: &str = text!("suite.json");

/// Directory holding the fixture files in a source checkout.
pub fn dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

impl Fixture {
    pub fn by_name(name: &str) -> Option<Fixture> {
        ALL.into_iter().find(|f| f.name == name)
    }

    pub fn human_source(&self) -> HumanSource {
        match self.human {
            Human::Domain(text) => HumanSource::Domain(text.to_string()),
            Human::Removals(text) => HumanSource::Removals(parse_removal_list(text)),
        }
    }

    pub fn instance(&self) -> Result<Instance, LoadError> {
        Instance::load(self.domain, self.problem, &self.human_source())
    }

    /// The reconciliation problem with the planner's robot plan.
    pub fn problem(&self) -> crate::reconcile::ReconciliationProblem {
        self.instance()
            .and_then(|i| i.problem().map_err(LoadError::from))
            .unwrap_or_else(|e| panic!("fixture {} loads: {e}", self.name))
    }
}
