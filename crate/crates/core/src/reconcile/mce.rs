use itertools::Itertools;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space::ModelSpace;
use super::{OnlineExplanation, ReconcileError, ReconciliationProblem, Variant};
use crate::model::FeatureSet;

/// Smallest set of missing features after which the robot plan is optimal
/// in the human model.
///
/// Subsets are tried by increasing size and lexicographically within a
/// size, so the result is the first minimal hit in that order.
pub fn mce(problem: &ReconciliationProblem) -> Result<FeatureSet, ReconcileError> {
    let space = ModelSpace::new(problem);
    for k in 0..=space.len() {
        if let Some(hit) = (0..space.len()).combinations(k).find(|s| space.complete(s)) {
            return Ok(space.features(&hit));
        }
    }
    Err(ReconcileError::NotReconcilable)
}

/// An MCE split into a random number of random parts spread evenly over the
/// plan. Deterministic for a given seed.
pub fn mce_random(problem: &ReconciliationProblem, seed: u64) -> Result<OnlineExplanation, ReconcileError> {
    let full = mce(problem)?;
    let mut out = OnlineExplanation::new(Variant::MceR);
    let m = full.len();
    if m == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=m);
    let mut features: Vec<_> = full.into_iter().collect();
    features.shuffle(&mut rng);
    let mut cuts: Vec<usize> = index::sample(&mut rng, m - 1, k - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(m);

    let n = problem.robot_plan().len();
    let mut start = 0;
    for (j, &end) in cuts.iter().enumerate() {
        let step = j * n / k + 1;
        out.push(features[start..end].iter().cloned().collect(), step.min(n.max(1)));
        start = end;
    }
    Ok(out)
}
