//! Witness checking that rebuilds profiles and recomputes winners directly,
//! without the solvers' incremental score bookkeeping.

use itertools::Itertools;

use crate::error::Result;
use crate::man::{DefenderTie, ManProblem};
use crate::manipulation::{apply_recount, validate_manipulation};
use crate::model::{ManipulationStrategy, RecountSet};
use crate::rec::RecProblem;
use crate::voting::{scores, winner};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

pub fn verify_recount(problem: &RecProblem, recount: &RecountSet) -> Result<Verdict> {
    let inst = &problem.instance;
    let manipulated = inst.manipulated().expect("recount problems carry a manipulated profile");
    if recount.len() > problem.budget {
        return Ok(Verdict::Invalid(format!(
            "{} districts recounted, budget is {}",
            recount.len(),
            problem.budget
        )));
    }
    if let Some(d) = recount.iter().find(|&d| d >= inst.num_districts()) {
        return Ok(Verdict::Invalid(format!("district {d} does not exist")));
    }
    let touched = (0..inst.num_districts()).collect();
    let restored = apply_recount(inst.original(), manipulated, &touched, recount)?;
    let w = winner(problem.rule, &restored, inst);
    Ok(if w == problem.preferred {
        Verdict::Valid
    } else {
        Verdict::Invalid(format!("candidate {w} wins after the recount"))
    })
}

pub fn verify_manipulation(problem: &ManProblem, strategy: &ManipulationStrategy) -> Result<Verdict> {
    let inst = &problem.instance;
    if let Err(v) = validate_manipulation(inst, strategy, problem.budget_attacker) {
        return Ok(Verdict::Invalid(v.to_string()));
    }
    let manipulated = strategy.apply(inst.original());
    let touched = strategy.touched();
    let mut best: Option<u64> = None;
    let mut outcomes = Vec::new();
    for size in 0..=problem.budget_defender.min(touched.len()) {
        for r in touched.iter().copied().combinations(size) {
            let recount = RecountSet(r.into_iter().collect());
            let profile = apply_recount(inst.original(), &manipulated, &touched, &recount)?;
            let w = winner(problem.rule, &profile, inst);
            let welfare = scores(problem.rule, &profile, inst)[w];
            best = best.max(Some(welfare));
            outcomes.push((welfare, w, recount));
        }
    }
    let best = best.expect("the empty recount is always available");
    let mut optimal = outcomes.into_iter().filter(|&(sw, ..)| sw == best);
    let p = problem.preferred;
    let verdict = match problem.defender_tie {
        DefenderTie::Pessimistic => match optimal.find(|&(_, w, _)| w != p) {
            None => Verdict::Valid,
            Some((_, w, r)) => Verdict::Invalid(format!(
                "recounting {:?} elects candidate {w} with the same welfare",
                r.0
            )),
        },
        DefenderTie::Optimistic => {
            if optimal.any(|(_, w, _)| w == p) {
                Verdict::Valid
            } else {
                Verdict::Invalid(format!("no welfare-maximizing recount elects candidate {p}"))
            }
        }
    };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElectionInstance, Rule, TieOrder, VoteProfile};

    #[test]
    fn recount_verdicts() {
        let inst = ElectionInstance::new(
            TieOrder::new(vec![1, 0]).unwrap(),
            &[(1, 1), (1, 1)],
            VoteProfile::from_rows(vec![vec![2, 0], vec![1, 0]]).unwrap(),
            Some(VoteProfile::from_rows(vec![vec![0, 2], vec![0, 1]]).unwrap()),
        )
        .unwrap();
        let p = RecProblem::new(inst, 0, 1, Rule::Pv).unwrap();
        assert!(verify_recount(&p, &RecountSet([0].into_iter().collect())).unwrap().is_valid());
        assert!(!verify_recount(&p, &RecountSet([1].into_iter().collect())).unwrap().is_valid());
        assert!(!verify_recount(&p, &RecountSet([0, 1].into_iter().collect())).unwrap().is_valid());
    }

    #[test]
    fn manipulation_verdicts() {
        let inst = ElectionInstance::new(
            TieOrder::identity(2),
            &[(1, 1), (1, 1)],
            VoteProfile::from_rows(vec![vec![1, 0], vec![1, 0]]).unwrap(),
            None,
        )
        .unwrap();
        let p = ManProblem::new(inst, 1, 2, 0, Rule::Pv).unwrap();
        let s = ManipulationStrategy::new().with_row(0, vec![0, 1]).with_row(1, vec![0, 1]);
        assert!(verify_manipulation(&p, &s).unwrap().is_valid());
        // any single recount leaves a 1:1 tie worth less than the 0:2 win
        let p1 = ManProblem { budget_defender: 1, ..p.clone() };
        assert!(verify_manipulation(&p1, &s).unwrap().is_valid());
        let p2 = ManProblem { budget_defender: 2, ..p.clone() };
        assert!(!verify_manipulation(&p2, &s).unwrap().is_valid());
        let over = ManipulationStrategy::new().with_row(0, vec![0, 1]).with_row(1, vec![0, 1]);
        let p0 = ManProblem { budget_attacker: 1, ..p };
        assert!(!verify_manipulation(&p0, &over).unwrap().is_valid());
    }
}
