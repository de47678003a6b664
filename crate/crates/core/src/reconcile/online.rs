use itertools::Itertools;

use super::space::{complement, nonempty_subsets, smallest, union, ModelSpace, Subset};
use super::{Note, OnlineExplanation, ReconcileError, ReconciliationProblem, Variant};
use crate::model::ActionId;
use crate::planner::first_diff;

/// Largest missing diff the exact prefix-preserving search accepts.
pub const DEFAULT_EXACT_THRESHOLD: usize = 12;

/// Candidate evaluations the approximate search may spend before it gives
/// up and emits the rest of the diff in one part.
const APPROX_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpMode {
    /// Grow the human model forward, smallest fixing subset first.
    Approx,
    /// Shrink backward from the robot model, keeping the largest withheld
    /// set under which every intermediate model preserves the prefix.
    Exact { threshold: usize },
}

impl PpMode {
    pub fn exact() -> Self {
        PpMode::Exact {
            threshold: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

/// Whether `plan` agrees with the robot plan on positions `1..=t`.
fn matches_through(robot: &[ActionId], plan: &[ActionId], t: usize) -> bool {
    first_diff(robot, plan).is_none_or(|d| d > t)
}

fn require_canonical(problem: &ReconciliationProblem) -> Result<(), ReconcileError> {
    if problem.is_canonical() {
        Ok(())
    } else {
        Err(ReconcileError::NonCanonicalPlan)
    }
}

/// A divergence past the end of the robot plan is explained before its last
/// step.
fn clamp(t: usize, n: usize) -> usize {
    t.min(n).max(1)
}

/// Explanation whose parts each keep the human's plan on the robot plan's
/// prefix up to the next divergence; ends when the two plans are equal.
pub fn oeg_pp(problem: &ReconciliationProblem, mode: PpMode) -> Result<OnlineExplanation, ReconcileError> {
    require_canonical(problem)?;
    let space = ModelSpace::new(problem);
    let mut out = OnlineExplanation::new(Variant::Pp);
    match mode {
        PpMode::Approx => pp_approx(&space, &mut out),
        PpMode::Exact { threshold } => {
            if space.len() > threshold {
                return Err(ReconcileError::ExactModeTooLarge {
                    features: space.len(),
                    threshold,
                });
            }
            pp_exact(&space, &mut out);
        }
    }
    Ok(out)
}

struct Approx<'s, 'a> {
    space: &'s ModelSpace<'a>,
    robot: &'s [ActionId],
    budget: usize,
    parts: Vec<(Subset, usize)>,
    fallback: Option<usize>,
}

impl Approx<'_, '_> {
    /// Depth-first over per-step candidates with chronological backtracking.
    fn search(&mut self, applied: &[usize]) -> bool {
        let plan = self.space.actions(applied);
        let Some(t) = first_diff(self.robot, &plan) else {
            return true;
        };
        let remaining = complement(self.space.len(), applied);
        for candidate in nonempty_subsets(&remaining) {
            if self.budget == 0 {
                // The whole remaining diff yields the robot model, whose
                // plan is the robot plan.
                self.parts.push((remaining.clone(), t));
                self.fallback = Some(t);
                return true;
            }
            self.budget -= 1;
            let next = union(applied, &candidate);
            if !matches_through(self.robot, &self.space.actions(&next), t) {
                continue;
            }
            self.parts.push((candidate, t));
            if self.search(&next) {
                return true;
            }
            self.parts.pop();
        }
        false
    }
}

fn pp_approx(space: &ModelSpace, out: &mut OnlineExplanation) {
    let robot = &space.problem.robot_plan().actions;
    let mut run = Approx {
        space,
        robot,
        budget: APPROX_BUDGET,
        parts: Vec::new(),
        fallback: None,
    };
    if !run.search(&[]) {
        let t = first_diff(robot, &space.actions(&[])).unwrap_or(1);
        run.parts = vec![(space.all(), t)];
        run.fallback = Some(t);
    }
    let n = robot.len();
    for (subset, t) in run.parts {
        out.push(space.features(&subset), clamp(t, n));
    }
    if let Some(t) = run.fallback {
        out.notes.push(Note::Fallback { step: clamp(t, n) });
    }
}

fn pp_exact(space: &ModelSpace, out: &mut OnlineExplanation) {
    let robot = &space.problem.robot_plan().actions;
    let mut applied: Subset = Vec::new();
    while let Some(t) = first_diff(robot, &space.actions(&applied)) {
        let remaining = complement(space.len(), &applied);
        // Every model between the robot model and the robot model minus the
        // withheld set must keep the prefix through `t`.
        let safe = |withheld: &[usize]| {
            (0..withheld.len()).powerset().all(|picks| {
                let removed: Subset = picks.iter().map(|&i| withheld[i]).collect();
                let kept = complement(space.len(), &removed);
                matches_through(robot, &space.actions(&kept), t)
            })
        };
        let withheld = (0..remaining.len())
            .rev()
            .flat_map(|k| remaining.iter().copied().combinations(k))
            .find(|w| safe(w))
            .expect("withholding nothing leaves the robot model, which keeps the prefix");
        let part = complement(space.len(), &union(&applied, &withheld));
        applied = union(&applied, &part);
        out.push(space.features(&part), clamp(t, robot.len()));
    }
}

/// Explanation that fixes only the next diverging action at each step,
/// never revisiting earlier positions.
pub fn oeg_na(problem: &ReconciliationProblem) -> Result<OnlineExplanation, ReconcileError> {
    require_canonical(problem)?;
    let space = ModelSpace::new(problem);
    let robot = &problem.robot_plan().actions;
    let mut out = OnlineExplanation::new(Variant::Na);
    let mut applied: Subset = Vec::new();
    for t in 1..=robot.len() {
        let target = robot[t - 1];
        if space.actions(&applied).get(t - 1) == Some(&target) {
            continue;
        }
        let remaining = complement(space.len(), &applied);
        match smallest(&remaining, |s| {
            space.actions(&union(&applied, s)).get(t - 1) == Some(&target)
        }) {
            Some(part) => {
                applied = union(&applied, &part);
                out.push(space.features(&part), t);
            }
            None => out.notes.push(Note::PositionUnfixable { step: t }),
        }
    }
    Ok(out)
}

/// Explanation that keeps some optimal human plan on the robot plan's
/// prefix, without requiring the human's plan to be unique.
pub fn oeg_ap(problem: &ReconciliationProblem) -> Result<OnlineExplanation, ReconcileError> {
    let space = ModelSpace::new(problem);
    let n = problem.robot_plan().len();
    let mut out = OnlineExplanation::new(Variant::Ap);
    let mut applied: Subset = Vec::new();
    while let Some(t) = (1..=n).find(|&t| !space.prefix_exists(&applied, t)) {
        let remaining = complement(space.len(), &applied);
        let part = smallest(&remaining, |s| space.prefix_exists(&union(&applied, s), t))
            .ok_or(ReconcileError::SearchExhausted { step: t })?;
        applied = union(&applied, &part);
        out.push(space.features(&part), t);
    }
    Ok(out)
}
