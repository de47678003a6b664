use serde::{Deserialize, Serialize};

use super::space::ModelSpace;
use super::{OnlineExplanation, ReconciliationProblem, SubExplanation, Variant};
use crate::model::{FeatureSet, ModelError, Universe};
use crate::planner::plan_distance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePart {
    pub step: usize,
    pub features: Vec<String>,
}

/// Serializable record of an explanation, replayable from the file alone
/// given the same domain and problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub variant: Variant,
    pub parts: Vec<TracePart>,
    pub final_distance: f64,
    pub total_features: usize,
    pub avg_part_size: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Trace {
    /// Records `explanation`, replanning once to measure the final distance.
    pub fn new(problem: &ReconciliationProblem, explanation: &OnlineExplanation) -> Self {
        let space = ModelSpace::new(problem);
        let applied = space.indices(&explanation.features()).unwrap_or_else(|| space.all());
        let final_distance = plan_distance(&space.actions(&applied), &problem.robot_plan().actions);
        Trace {
            variant: explanation.variant,
            parts: explanation
                .parts
                .iter()
                .map(|p| TracePart {
                    step: p.step,
                    features: p.features.names(),
                })
                .collect(),
            final_distance,
            total_features: explanation.total_features(),
            avg_part_size: explanation.avg_part_size(),
            notes: explanation.notes.iter().map(|n| n.to_string()).collect(),
        }
    }

    /// Rebuilds the explanation, resolving feature names in `universe`.
    pub fn to_explanation(&self, universe: &Universe) -> Result<OnlineExplanation, ModelError> {
        let mut out = OnlineExplanation::new(self.variant);
        for p in &self.parts {
            out.parts.push(SubExplanation {
                features: FeatureSet::parse_names(p.features.iter().map(String::as_str), universe)?,
                step: p.step,
            });
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
