//! Winner determination under plurality over voters (PV) and plurality over
//! districts (PD).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Candidate, DistrictId, ElectionInstance, Rule, ScoreVector, TieOrder, VoteProfile};

/// Column sums of the profile. District weights play no role.
pub fn pv_scores(profile: &VoteProfile) -> ScoreVector {
    let mut totals = vec![0u64; profile.num_candidates()];
    for row in profile.rows() {
        for (t, &x) in totals.iter_mut().zip(row) {
            *t += x;
        }
    }
    ScoreVector(totals)
}

/// Plurality winner of one row. An all-zero row goes to the tie order's
/// favorite, like any other tie.
pub fn row_winner(row: &[u64], tie: &TieOrder) -> Candidate {
    let mut best = tie.most_favored();
    for c in 0..row.len() {
        if row[c] > row[best] || (row[c] == row[best] && tie.prefers(c, best)) {
            best = c;
        }
    }
    best
}

pub fn pd_district_winner(profile: &VoteProfile, district: DistrictId, tie: &TieOrder) -> Candidate {
    row_winner(profile.row(district), tie)
}

/// Total weight of the districts each candidate wins.
pub fn pd_scores(profile: &VoteProfile, weights: &[u64], tie: &TieOrder) -> ScoreVector {
    let mut totals = vec![0u64; profile.num_candidates()];
    for (i, &w) in weights.iter().enumerate() {
        totals[pd_district_winner(profile, i, tie)] += w;
    }
    ScoreVector(totals)
}

/// Social welfare of every candidate under `rule`.
pub fn scores(rule: Rule, profile: &VoteProfile, instance: &ElectionInstance) -> ScoreVector {
    match rule {
        Rule::Pv => pv_scores(profile),
        Rule::Pd => pd_scores(profile, &instance.weights(), instance.tie()),
    }
}

/// Does `a` beat `b`: strictly higher score, or equal score and favored by
/// the tie order.
pub fn beats(a: Candidate, b: Candidate, scores: &ScoreVector, tie: &TieOrder) -> Result<bool> {
    if a == b {
        return Err(Error::SameCandidate);
    }
    Ok(beats_unchecked(a, b, &scores.0, tie))
}

#[inline]
pub(crate) fn beats_unchecked<T: Ord + Copy>(a: Candidate, b: Candidate, scores: &[T], tie: &TieOrder) -> bool {
    scores[a] > scores[b] || (scores[a] == scores[b] && tie.prefers(a, b))
}

/// The candidate that beats every other one.
pub fn winner_of<T: Ord + Copy>(scores: &[T], tie: &TieOrder) -> Candidate {
    let mut best = tie.most_favored();
    for c in 0..scores.len() {
        if c != best && beats_unchecked(c, best, scores, tie) {
            best = c;
        }
    }
    best
}

pub fn winner(rule: Rule, profile: &VoteProfile, instance: &ElectionInstance) -> Candidate {
    winner_of(&scores(rule, profile, instance).0, instance.tie())
}

/// Candidates that beat `p` under the current scores.
pub fn rivals(
    rule: Rule,
    profile: &VoteProfile,
    p: Candidate,
    instance: &ElectionInstance,
) -> BTreeSet<Candidate> {
    let sc = scores(rule, profile, instance);
    (0..sc.len())
        .filter(|&c| c != p && beats_unchecked(c, p, &sc.0, instance.tie()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rows: &[&[u64]]) -> VoteProfile {
        VoteProfile::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn instance(rows: &[&[u64]], weights: &[u64], tie: Vec<usize>) -> ElectionInstance {
        let params: Vec<_> = weights.iter().map(|&w| (w, 0)).collect();
        ElectionInstance::new(TieOrder::new(tie).unwrap(), &params, profile(rows), None).unwrap()
    }

    #[test]
    fn pv_scores_are_column_sums() {
        assert_eq!(pv_scores(&profile(&[&[2, 1]])).0, vec![2, 1]);
        assert_eq!(pv_scores(&profile(&[&[1, 0], &[0, 3]])).0, vec![1, 3]);
    }

    #[test]
    fn district_winner_breaks_ties_by_order() {
        let t_ab = TieOrder::identity(2);
        let t_ba = TieOrder::new(vec![1, 0]).unwrap();
        assert_eq!(row_winner(&[2, 1], &t_ba), 0);
        assert_eq!(row_winner(&[1, 1], &t_ba), 1);
        assert_eq!(row_winner(&[1, 1], &t_ab), 0);
        assert_eq!(row_winner(&[0, 0, 5], &TieOrder::identity(3)), 2);
        // empty district goes to the favorite
        assert_eq!(row_winner(&[0, 0, 0], &TieOrder::new(vec![2, 0, 1]).unwrap()), 2);
    }

    #[test]
    fn pd_scores_sum_won_weight() {
        let t = TieOrder::identity(2);
        assert_eq!(pd_scores(&profile(&[&[2, 1]]), &[3], &t).0, vec![3, 0]);
        assert_eq!(pd_scores(&profile(&[&[1, 0], &[0, 1]]), &[1, 2], &t).0, vec![1, 2]);
    }

    #[test]
    fn beats_uses_tie_on_equal_scores() {
        let t = TieOrder::identity(2);
        let s = ScoreVector(vec![3, 2]);
        assert!(beats(0, 1, &s, &t).unwrap());
        let s = ScoreVector(vec![2, 2]);
        assert!(beats(0, 1, &s, &t).unwrap());
        assert!(!beats(1, 0, &s, &t).unwrap());
        assert_eq!(beats(1, 1, &s, &t), Err(Error::SameCandidate));
    }

    #[test]
    fn beats_is_antisymmetric_on_small_scores() {
        for tie in [TieOrder::identity(2), TieOrder::new(vec![1, 0]).unwrap()] {
            for a in 0..=5 {
                for b in 0..=5 {
                    let s = ScoreVector(vec![a, b]);
                    let ab = beats(0, 1, &s, &tie).unwrap();
                    let ba = beats(1, 0, &s, &tie).unwrap();
                    assert!(ab ^ ba, "scores {a},{b}");
                }
            }
        }
    }

    #[test]
    fn winner_examples() {
        let single = instance(&[&[4]], &[1], vec![0]);
        assert_eq!(winner(Rule::Pv, single.original(), &single), 0);
        assert_eq!(winner(Rule::Pd, single.original(), &single), 0);

        let inst = instance(&[&[1, 2], &[2, 1]], &[1, 1], vec![1, 0]);
        assert_eq!(winner(Rule::Pv, inst.original(), &inst), 1);
    }

    #[test]
    fn pv_ignores_weights_pd_does_not() {
        let inst = instance(&[&[3, 0], &[0, 2], &[0, 2]], &[5, 1, 1], vec![1, 0]);
        assert_eq!(winner(Rule::Pv, inst.original(), &inst), 1);
        assert_eq!(winner(Rule::Pd, inst.original(), &inst), 0);
    }

    #[test]
    fn rivals_examples() {
        let inst = instance(&[&[5, 1, 2]], &[1], vec![0, 1, 2]);
        assert!(rivals(Rule::Pv, inst.original(), 0, &inst).is_empty());
        let inst = instance(&[&[1, 1, 1]], &[1], vec![0, 1, 2]);
        assert_eq!(
            rivals(Rule::Pv, inst.original(), 2, &inst).into_iter().collect::<Vec<_>>(),
            vec![0, 1]
        );
    }
}
