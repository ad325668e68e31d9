//! Additive score deltas for recounting.
//!
//! Under both rules a district's contribution depends only on its own row, so
//! restoring district `i` shifts every candidate's score by a fixed amount
//! regardless of what else is restored. The solvers enumerate recount sets
//! over these vectors instead of rebuilding profiles.

use crate::model::{DistrictId, ElectionInstance, Rule, VoteProfile};
use crate::voting::{pv_scores, pd_scores, row_winner};

/// Per-district score change `restored − current` for one rule.
pub(crate) fn district_delta(
    rule: Rule,
    instance: &ElectionInstance,
    district: DistrictId,
    current: &[u64],
    restored: &[u64],
) -> Vec<i64> {
    let m = current.len();
    let mut delta = vec![0i64; m];
    match rule {
        Rule::Pv => {
            for c in 0..m {
                delta[c] = restored[c] as i64 - current[c] as i64;
            }
        }
        Rule::Pd => {
            let tie = instance.tie();
            let from = row_winner(current, tie);
            let to = row_winner(restored, tie);
            if from != to {
                let w = instance.district(district).weight as i64;
                delta[from] -= w;
                delta[to] += w;
            }
        }
    }
    delta
}

pub(crate) fn signed_scores(rule: Rule, instance: &ElectionInstance, profile: &VoteProfile) -> Vec<i64> {
    let sc = match rule {
        Rule::Pv => pv_scores(profile),
        Rule::Pd => pd_scores(profile, &instance.weights(), instance.tie()),
    };
    sc.0.into_iter().map(|x| x as i64).collect()
}
