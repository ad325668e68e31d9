//! Brute-force references and random instance generators shared by the
//! integration tests. Nothing here calls into the solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use electiongame::man::{DefenderTie, ManProblem};
use electiongame::manipulation::{apply_recount, swap_distance};
use electiongame::model::{ElectionInstance, RecountSet, Rule, TieOrder, VoteProfile};
use electiongame::rec::RecProblem;
use electiongame::voting::{row_winner, scores, winner};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every row of `n` votes over `m` candidates, lexicographically.
pub fn compositions(n: u64, m: usize) -> Vec<Vec<u64>> {
    fn go(n: u64, m: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if m == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=n {
            prefix.push(x);
            go(n - x, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::new(), &mut out);
    out
}

pub fn random_row<R: Rng>(rng: &mut R, n: u64, m: usize) -> Vec<u64> {
    let mut row = vec![0u64; m];
    for _ in 0..n {
        row[rng.gen_range(0..m)] += 1;
    }
    row
}

pub fn random_tie<R: Rng>(rng: &mut R, m: usize) -> TieOrder {
    let mut ranking: Vec<usize> = (0..m).collect();
    ranking.shuffle(rng);
    TieOrder::new(ranking).unwrap()
}

pub fn random_rule<R: Rng>(rng: &mut R) -> Rule {
    if rng.gen_bool(0.5) {
        Rule::Pv
    } else {
        Rule::Pd
    }
}

/// Recount instance with up to `max_districts` districts, most of them
/// manipulated.
pub fn random_rec<R: Rng>(rng: &mut R, max_districts: usize, max_voters: u64) -> RecProblem {
    let m = rng.gen_range(2..=4);
    let k = rng.gen_range(1..=max_districts);
    let mut orig = Vec::with_capacity(k);
    let mut man = Vec::with_capacity(k);
    let mut params = Vec::with_capacity(k);
    for _ in 0..k {
        let n = rng.gen_range(0..=max_voters);
        let a = random_row(rng, n, m);
        let b = if rng.gen_bool(0.15) { a.clone() } else { random_row(rng, n, m) };
        params.push((rng.gen_range(1..=3), swap_distance(&a, &b).unwrap()));
        orig.push(a);
        man.push(b);
    }
    let inst = ElectionInstance::new(
        random_tie(rng, m),
        &params,
        VoteProfile::from_rows(orig).unwrap(),
        Some(VoteProfile::from_rows(man).unwrap()),
    )
    .unwrap();
    let p = rng.gen_range(0..m);
    let budget = rng.gen_range(0..=k);
    RecProblem::new(inst, p, budget, random_rule(rng)).unwrap()
}

pub fn random_man<R: Rng>(rng: &mut R, max_districts: usize, max_voters: u64, max_candidates: usize) -> ManProblem {
    let m = rng.gen_range(2..=max_candidates);
    let k = rng.gen_range(1..=max_districts);
    let mut rows = Vec::with_capacity(k);
    let mut params = Vec::with_capacity(k);
    for _ in 0..k {
        let n = rng.gen_range(0..=max_voters);
        rows.push(random_row(rng, n, m));
        params.push((rng.gen_range(1..=3), rng.gen_range(0..=n)));
    }
    let inst = ElectionInstance::new(random_tie(rng, m), &params, VoteProfile::from_rows(rows).unwrap(), None).unwrap();
    let p = rng.gen_range(0..m);
    let tie = if rng.gen_bool(0.5) {
        DefenderTie::Pessimistic
    } else {
        DefenderTie::Optimistic
    };
    ManProblem::new(inst, p, rng.gen_range(0..=k), rng.gen_range(0..=2), random_rule(rng))
        .unwrap()
        .with_defender_tie(tie)
}

/// First recount set in (size, lex) order that elects `p`, found by
/// rebuilding the profile for every subset of the differing districts.
pub fn naive_rec(problem: &RecProblem) -> Option<BTreeSet<usize>> {
    let inst = &problem.instance;
    let man = inst.manipulated().unwrap();
    let all: BTreeSet<usize> = (0..inst.num_districts()).collect();
    let diff: Vec<usize> = (0..inst.num_districts())
        .filter(|&i| inst.original().row(i) != man.row(i))
        .collect();
    for size in 0..=problem.budget.min(diff.len()) {
        for r in diff.iter().copied().combinations(size) {
            let set = RecountSet(r.iter().copied().collect());
            let profile = apply_recount(inst.original(), man, &all, &set).unwrap();
            if winner(problem.rule, &profile, inst) == problem.preferred {
                return Some(set.0);
            }
        }
    }
    None
}

/// Does `p` survive the defender's welfare-maximizing responses to `manipulated`?
pub fn naive_survives(problem: &ManProblem, manipulated: &VoteProfile) -> bool {
    let inst = &problem.instance;
    let touched: BTreeSet<usize> = (0..inst.num_districts())
        .filter(|&i| inst.original().row(i) != manipulated.row(i))
        .collect();
    let mut outcomes = Vec::new();
    for size in 0..=problem.budget_defender.min(touched.len()) {
        for r in touched.iter().copied().combinations(size) {
            let set = RecountSet(r.into_iter().collect());
            let profile = apply_recount(inst.original(), manipulated, &touched, &set).unwrap();
            let w = winner(problem.rule, &profile, inst);
            outcomes.push((scores(problem.rule, &profile, inst)[w], w));
        }
    }
    let best = outcomes.iter().map(|&(s, _)| s).max().unwrap();
    let mut optimal = outcomes.into_iter().filter(|&(s, _)| s == best).map(|(_, w)| w);
    match problem.defender_tie {
        DefenderTie::Pessimistic => optimal.all(|w| w == problem.preferred),
        DefenderTie::Optimistic => optimal.any(|w| w == problem.preferred),
    }
}

/// Full enumeration of manipulated profiles within the attacker's budget.
pub fn naive_man(problem: &ManProblem) -> bool {
    let inst = &problem.instance;
    let m = inst.num_candidates();
    let choices: Vec<Vec<Vec<u64>>> = inst
        .districts()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let row = inst.original().row(i);
            compositions(d.size, m)
                .into_iter()
                .filter(|r| swap_distance(row, r).unwrap() <= d.gamma)
                .collect()
        })
        .collect();
    choices.into_iter().multi_cartesian_product().any(|rows| {
        let touched = (0..rows.len()).filter(|&i| rows[i] != inst.original().row(i)).count();
        touched <= problem.budget_attacker && naive_survives(problem, &VoteProfile::from_rows(rows).unwrap())
    })
}

/// Cheapest number of single-vote moves making `target` win the row.
pub fn naive_min_swaps(row: &[u64], target: usize, tie: &TieOrder) -> Option<u64> {
    compositions(row.iter().sum(), row.len())
        .into_iter()
        .filter(|r| row_winner(r, tie) == target)
        .map(|r| swap_distance(row, &r).unwrap())
        .min()
}
