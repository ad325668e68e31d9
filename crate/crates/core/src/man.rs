//! Exact manipulation: does the attacker have a strategy that survives the
//! defender's optimal recount?
//!
//! The defender maximizes the social welfare of the resulting winner. When
//! several recount sets reach that maximum, [`DefenderTie`] decides whether
//! the attacker must win against all of them or against one.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manipulation::{apply_recount, validate_manipulation};
use crate::model::{
    Candidate, District, DistrictId, ElectionInstance, ManipulationStrategy, RecountSet, Rule, TieOrder, VoteProfile,
};
use crate::recount::{district_delta, signed_scores};
use crate::search::{first_hit, SearchOptions};
use crate::voting::{beats_unchecked, row_winner, scores, winner, winner_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefenderTie {
    /// The attacker must win under every welfare-maximizing recount.
    #[default]
    Pessimistic,
    /// Winning under one welfare-maximizing recount suffices.
    Optimistic,
}

impl std::fmt::Display for DefenderTie {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DefenderTie::Pessimistic => f.write_str("pessimistic"),
            DefenderTie::Optimistic => f.write_str("optimistic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManProblem {
    pub instance: ElectionInstance,
    pub preferred: Candidate,
    pub budget_attacker: usize,
    pub budget_defender: usize,
    pub rule: Rule,
    pub defender_tie: DefenderTie,
}

impl ManProblem {
    pub fn new(
        instance: ElectionInstance,
        preferred: Candidate,
        budget_attacker: usize,
        budget_defender: usize,
        rule: Rule,
    ) -> Result<Self> {
        if instance.manipulated().is_some() {
            return Err(Error::UnexpectedManipulated);
        }
        instance.check_candidate(preferred)?;
        Ok(ManProblem {
            instance,
            preferred,
            budget_attacker,
            budget_defender,
            rule,
            defender_tie: DefenderTie::default(),
        })
    }

    pub fn with_defender_tie(self, defender_tie: DefenderTie) -> Self {
        ManProblem { defender_tie, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManAnswer {
    pub witness: Option<ManipulationStrategy>,
    /// Strategy/recount pairs evaluated.
    pub nodes: u64,
}

impl ManAnswer {
    pub fn is_yes(&self) -> bool {
        self.witness.is_some()
    }
}

/// All recount sets `R ⊆ touched`, `|R| ≤ budget`, that maximize the welfare
/// of the resulting winner. Built from the profile operations only.
pub fn defender_best_responses(
    rule: Rule,
    instance: &ElectionInstance,
    manipulated: &VoteProfile,
    touched: &BTreeSet<DistrictId>,
    budget: usize,
) -> Result<BTreeSet<RecountSet>> {
    let mut best: Option<u64> = None;
    let mut responses = BTreeSet::new();
    let members: Vec<DistrictId> = touched.iter().copied().collect();
    for size in 0..=budget.min(members.len()) {
        for pick in members.iter().copied().combinations(size) {
            let recount: RecountSet = pick.into_iter().collect();
            let u = apply_recount(instance.original(), manipulated, touched, &recount)?;
            let sc = scores(rule, &u, instance);
            let welfare = sc[winner_of(&sc.0, instance.tie())];
            match best {
                Some(b) if welfare < b => {}
                Some(b) if welfare == b => {
                    responses.insert(recount);
                }
                _ => {
                    best = Some(welfare);
                    responses.clear();
                    responses.insert(recount);
                }
            }
        }
    }
    Ok(responses)
}

/// Does `strategy` make the preferred candidate win after the defender's
/// optimal recount?
pub fn attacker_wins(problem: &ManProblem, strategy: &ManipulationStrategy) -> Result<bool> {
    let inst = &problem.instance;
    validate_manipulation(inst, strategy, problem.budget_attacker).map_err(Error::InvalidStrategy)?;
    let manipulated = strategy.apply(inst.original());
    let touched = strategy.touched();
    let responses = defender_best_responses(problem.rule, inst, &manipulated, &touched, problem.budget_defender)?;
    let mut outcomes = responses.iter().map(|r| {
        let u = apply_recount(inst.original(), &manipulated, &touched, r)?;
        Ok(winner(problem.rule, &u, inst) == problem.preferred)
    });
    match problem.defender_tie {
        DefenderTie::Pessimistic => outcomes.try_fold(true, |acc, x: Result<bool>| Ok(acc && x?)),
        DefenderTie::Optimistic => outcomes.try_fold(false, |acc, x: Result<bool>| Ok(acc || x?)),
    }
}

/// Greedy transfer of votes into `target` until it wins the district: each
/// step takes one vote from the strongest candidate still beating `target`
/// (highest count, then earliest in the tie order). Returns the final row and
/// the number of transfers, or `None` for an empty district `target` cannot win.
pub fn min_swap_row(row: &[u64], target: Candidate, tie: &TieOrder) -> Option<(Vec<u64>, u64)> {
    let n: u64 = row.iter().sum();
    if n == 0 {
        return (row_winner(row, tie) == target).then(|| (row.to_vec(), 0));
    }
    let mut r = row.to_vec();
    let mut swaps = 0;
    loop {
        let donor = (0..r.len())
            .filter(|&d| d != target && beats_unchecked(d, target, &r, tie))
            .max_by(|&a, &b| r[a].cmp(&r[b]).then(tie.position(b).cmp(&tie.position(a))));
        match donor {
            None => return Some((r, swaps)),
            Some(d) => {
                r[d] -= 1;
                r[target] += 1;
                swaps += 1;
            }
        }
    }
}

pub fn min_swaps_to_win_district(row: &[u64], target: Candidate, tie: &TieOrder) -> Option<u64> {
    min_swap_row(row, target, tie).map(|(_, s)| s)
}

/// Candidates that can be made district winner with at most `gamma` swaps.
pub fn pd_achievable_winners(row: &[u64], gamma: u64, tie: &TieOrder) -> BTreeSet<Candidate> {
    (0..row.len())
        .filter(|&c| min_swaps_to_win_district(row, c, tie).is_some_and(|s| s <= gamma))
        .collect()
}

/// Drops candidates that receive no vote in any district of either profile,
/// keeping `p` (and the tie favorite when some district is empty, since PD
/// hands empty districts to it). Returns the reduced instance and the map
/// from new to old candidate indices.
pub fn prune_candidates(instance: &ElectionInstance, p: Candidate) -> Result<(ElectionInstance, Vec<Candidate>)> {
    instance.check_candidate(p)?;
    if instance.total_voters() == 0 {
        return Err(Error::EmptyElectorate);
    }
    let m = instance.num_candidates();
    let mut keep = vec![false; m];
    keep[p] = true;
    let profiles = std::iter::once(instance.original()).chain(instance.manipulated());
    for prof in profiles {
        for row in prof.rows() {
            for (c, &x) in row.iter().enumerate() {
                keep[c] |= x > 0;
            }
        }
    }
    if instance.districts().iter().any(|d| d.size == 0) {
        keep[instance.tie().most_favored()] = true;
    }
    let map: Vec<Candidate> = (0..m).filter(|&c| keep[c]).collect();
    let mut new_index = vec![usize::MAX; m];
    for (j, &c) in map.iter().enumerate() {
        new_index[c] = j;
    }
    let restrict = |prof: &VoteProfile| {
        VoteProfile::from_rows(
            prof.rows()
                .map(|row| map.iter().map(|&c| row[c]).collect())
                .collect(),
        )
    };
    let tie = TieOrder::new(
        instance
            .tie()
            .ranking()
            .iter()
            .filter(|&&c| keep[c])
            .map(|&c| new_index[c])
            .collect(),
    )?;
    let reduced = ElectionInstance::from_districts(
        tie,
        instance.districts().to_vec(),
        restrict(instance.original())?,
        instance.manipulated().map(restrict).transpose()?,
    )?;
    Ok((reduced, map))
}

pub fn solve_man(problem: &ManProblem, opts: &SearchOptions) -> Result<ManAnswer> {
    match problem.rule {
        Rule::Pv => solve_pv_man(problem, opts),
        Rule::Pd => solve_pd_man(problem, opts),
    }
}

/// PD manipulation. Only district winners matter, so each touched district
/// ranges over its achievable winners, realized by the greedy min-swap row.
pub fn solve_pd_man(problem: &ManProblem, opts: &SearchOptions) -> Result<ManAnswer> {
    if problem.rule != Rule::Pd {
        return Err(Error::WrongRule { expected: Rule::Pd });
    }
    let inst = &problem.instance;
    let tie = inst.tie();
    let mut moves = Vec::with_capacity(inst.num_districts());
    for (i, d) in inst.districts().iter().enumerate() {
        let row = inst.original().row(i);
        let current = row_winner(row, tie);
        let options = pd_achievable_winners(row, d.gamma, tie)
            .into_iter()
            .filter(|&c| c != current)
            .map(|c| {
                let (r, _) = min_swap_row(row, c, tie).expect("achievable");
                Move::new(Rule::Pd, inst, i, r)
            })
            .collect::<Vec<_>>();
        moves.push(options);
    }
    ManSearch::new(problem, moves, opts).run()
}

/// PV manipulation.
///
/// With no defender budget every moved vote is best taken from a rival and
/// given to `p`, and moving more is never worse, so each district ranges over
/// the ways of taking `min(γ_i, n_i − v_ip)` votes from the other candidates.
/// With a defender budget, recount interactions can favor other rows, so each
/// district ranges over every row within `γ_i` swaps.
pub fn solve_pv_man(problem: &ManProblem, opts: &SearchOptions) -> Result<ManAnswer> {
    if problem.rule != Rule::Pv {
        return Err(Error::WrongRule { expected: Rule::Pv });
    }
    let inst = &problem.instance;
    let p = problem.preferred;
    let mut moves = Vec::with_capacity(inst.num_districts());
    let mut generated = 0u64;
    for (i, d) in inst.districts().iter().enumerate() {
        let row = inst.original().row(i);
        let rows = if problem.budget_defender == 0 {
            take_vectors(row, p, d)
        } else {
            rows_within(row, d.gamma, opts, &mut generated)?
        };
        moves.push(rows.into_iter().map(|r| Move::new(Rule::Pv, inst, i, r)).collect());
    }
    ManSearch::new(problem, moves, opts).run()
}

/// Rows obtained by moving exactly `min(γ, n − row[p])` votes from other
/// candidates to `p`, in lexicographic order of the take vector.
fn take_vectors(row: &[u64], p: Candidate, district: &District) -> Vec<Vec<u64>> {
    let total = district.gamma.min(district.size - row[p]);
    if total == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut take = vec![0u64; row.len()];
    fn rec(row: &[u64], p: Candidate, c: usize, left: u64, take: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if c == row.len() {
            if left == 0 {
                let mut r = row.to_vec();
                for (x, &t) in r.iter_mut().zip(take.iter()) {
                    *x -= t;
                }
                r[p] += take.iter().sum::<u64>();
                out.push(r);
            }
            return;
        }
        if c == p {
            return rec(row, p, c + 1, left, take, out);
        }
        let rest: u64 = row[c + 1..]
            .iter()
            .enumerate()
            .filter(|&(j, _)| c + 1 + j != p)
            .map(|(_, &x)| x)
            .sum();
        let lo = left.saturating_sub(rest);
        for t in lo..=row[c].min(left) {
            take[c] = t;
            rec(row, p, c + 1, left - t, take, out);
        }
        take[c] = 0;
    }
    rec(row, p, 0, total, &mut take, &mut out);
    out
}

/// Every row with the same voter count at swap distance `1..=gamma`, in
/// lexicographic order.
fn rows_within(row: &[u64], gamma: u64, opts: &SearchOptions, generated: &mut u64) -> Result<Vec<Vec<u64>>> {
    let n: u64 = row.iter().sum();
    let mut out = Vec::new();
    if gamma == 0 {
        return Ok(out);
    }
    let mut cur = vec![0u64; row.len()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        row: &[u64],
        c: usize,
        left: u64,
        dist2: u64,
        gamma2: u64,
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        opts: &SearchOptions,
        generated: &mut u64,
    ) -> Result<()> {
        if c + 1 == row.len() {
            cur[c] = left;
            let d = dist2 + left.abs_diff(row[c]);
            if d > 0 && d <= gamma2 {
                *generated += 1;
                opts.check(*generated)?;
                out.push(cur.clone());
            }
            return Ok(());
        }
        // votes still to place must be absorbed by the remaining candidates
        for x in 0..=left {
            let d = dist2 + x.abs_diff(row[c]);
            if d > gamma2 {
                if x > row[c] {
                    break;
                }
                continue;
            }
            cur[c] = x;
            rec(row, c + 1, left - x, d, gamma2, cur, out, opts, generated)?;
        }
        Ok(())
    }
    rec(row, 0, n, 0, 2 * gamma, &mut cur, &mut out, opts, generated)?;
    Ok(out)
}

/// One replacement row for a district with its sparse score change.
struct Move {
    district: DistrictId,
    row: Vec<u64>,
    delta: Vec<(Candidate, i64)>,
}

impl Move {
    fn new(rule: Rule, inst: &ElectionInstance, district: DistrictId, row: Vec<u64>) -> Self {
        let d = district_delta(rule, inst, district, inst.original().row(district), &row);
        let delta = d.into_iter().enumerate().filter(|&(_, x)| x != 0).collect();
        Move { district, row, delta }
    }
}

struct ManSearch<'a> {
    problem: &'a ManProblem,
    opts: &'a SearchOptions,
    base: Vec<i64>,
    /// Districts with at least one move, and their moves.
    eligible: Vec<Vec<Move>>,
}

impl<'a> ManSearch<'a> {
    fn new(problem: &'a ManProblem, moves: Vec<Vec<Move>>, opts: &'a SearchOptions) -> Self {
        let inst = &problem.instance;
        let base = signed_scores(problem.rule, inst, inst.original());
        let eligible = moves.into_iter().filter(|m| !m.is_empty()).collect();
        ManSearch {
            problem,
            opts,
            base,
            eligible,
        }
    }

    fn run(&self) -> Result<ManAnswer> {
        self.opts.install(|| {
            let depth = self.problem.budget_attacker.min(self.eligible.len());
            let mut total = 0u64;
            for size in 0..=depth {
                let mut combos = (0..self.eligible.len()).combinations(size);
                loop {
                    let chunk: Vec<Vec<usize>> = combos.by_ref().take(4096).collect();
                    if chunk.is_empty() {
                        break;
                    }
                    let (hit, nodes) = first_hit(self.opts, total, &chunk, |set| self.touch(set))?;
                    total += nodes;
                    if let Some(choice) = hit {
                        return Ok(ManAnswer {
                            witness: Some(self.strategy(&choice)),
                            nodes: total,
                        });
                    }
                }
            }
            Ok(ManAnswer { witness: None, nodes: total })
        })
    }

    fn strategy(&self, choice: &[(usize, usize)]) -> ManipulationStrategy {
        let mut s = ManipulationStrategy::new();
        for &(e, k) in choice {
            let mv = &self.eligible[e][k];
            s.insert(mv.district, mv.row.clone());
        }
        s
    }

    /// Tries every move combination on one touched set, in odometer order.
    fn touch(&self, set: &[usize]) -> Result<(Option<Vec<(usize, usize)>>, u64)> {
        let mut idx = vec![0usize; set.len()];
        let mut nodes = 0u64;
        loop {
            let chosen: Vec<&Move> = set.iter().zip(&idx).map(|(&e, &k)| &self.eligible[e][k]).collect();
            let (wins, n) = self.survives(&chosen);
            nodes += n;
            self.opts.check(nodes)?;
            if wins {
                return Ok((Some(set.iter().copied().zip(idx).collect()), nodes));
            }
            // advance the odometer, last district fastest
            let mut pos = set.len();
            loop {
                if pos == 0 {
                    return Ok((None, nodes));
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.eligible[set[pos]].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Attacker outcome for one manipulation, plus the recounts evaluated.
    fn survives(&self, chosen: &[&Move]) -> (bool, u64) {
        let problem = self.problem;
        let tie = problem.instance.tie();
        let mut manipulated = self.base.clone();
        for mv in chosen {
            for &(c, x) in &mv.delta {
                manipulated[c] += x;
            }
        }
        let budget = problem.budget_defender.min(chosen.len());
        if budget == 0 {
            return (winner_of(&manipulated, tie) == problem.preferred, 1);
        }
        let mut best = i64::MIN;
        let mut all_p = true;
        let mut any_p = false;
        let mut nodes = 0;
        let mut scores = manipulated.clone();
        for size in 0..=budget {
            for pick in (0..chosen.len()).combinations(size) {
                nodes += 1;
                scores.copy_from_slice(&manipulated);
                for &j in &pick {
                    for &(c, x) in &chosen[j].delta {
                        scores[c] -= x;
                    }
                }
                let w = winner_of(&scores, tie);
                let welfare = scores[w];
                let is_p = w == problem.preferred;
                if welfare > best {
                    best = welfare;
                    all_p = is_p;
                    any_p = is_p;
                } else if welfare == best {
                    all_p &= is_p;
                    any_p |= is_p;
                }
            }
        }
        let wins = match problem.defender_tie {
            DefenderTie::Pessimistic => all_p,
            DefenderTie::Optimistic => any_p,
        };
        (wins, nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(rows: Vec<Vec<u64>>, params: &[(u64, u64)], tie: Vec<usize>) -> ElectionInstance {
        ElectionInstance::new(
            TieOrder::new(tie).unwrap(),
            params,
            VoteProfile::from_rows(rows).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn min_swaps_examples() {
        let t = TieOrder::identity(3);
        assert_eq!(min_swaps_to_win_district(&[3, 1, 0], 0, &t), Some(0));
        // c last in the tie order: two transfers from a give (1, 1, 2)
        assert_eq!(min_swap_row(&[3, 1, 0], 2, &t), Some((vec![1, 1, 2], 2)));
        assert_eq!(min_swaps_to_win_district(&[0, 0, 0], 0, &t), Some(0));
        assert_eq!(min_swaps_to_win_district(&[0, 0, 0], 1, &t), None);
    }

    #[test]
    fn achievable_winners_examples() {
        let t = TieOrder::identity(3);
        assert_eq!(pd_achievable_winners(&[1, 2, 0], 0, &t), BTreeSet::from([1]));
        assert_eq!(pd_achievable_winners(&[1, 2, 0], 3, &t), BTreeSet::from([0, 1, 2]));
        assert_eq!(pd_achievable_winners(&[0, 0, 0], 0, &t), BTreeSet::from([0]));
    }

    #[test]
    fn zero_defender_budget_has_only_the_empty_response() {
        let inst = instance(vec![vec![2, 0], vec![0, 1]], &[(1, 2), (1, 1)], vec![0, 1]);
        let man = VoteProfile::from_rows(vec![vec![0, 2], vec![0, 1]]).unwrap();
        let touched = BTreeSet::from([0]);
        let r = defender_best_responses(Rule::Pv, &inst, &man, &touched, 0).unwrap();
        assert_eq!(r, BTreeSet::from([RecountSet::empty()]));
        let r = defender_best_responses(Rule::Pv, &inst, &man, &BTreeSet::new(), 3).unwrap();
        assert_eq!(r, BTreeSet::from([RecountSet::empty()]));
    }

    #[test]
    fn zero_attack_budget_keeps_original_winner() {
        let inst = instance(vec![vec![2, 1]], &[(1, 3)], vec![0, 1]);
        for rule in [Rule::Pv, Rule::Pd] {
            let p = ManProblem::new(inst.clone(), 1, 0, 0, rule).unwrap();
            assert!(!solve_man(&p, &SearchOptions::default()).unwrap().is_yes());
            let p = ManProblem::new(inst.clone(), 0, 0, 0, rule).unwrap();
            let a = solve_man(&p, &SearchOptions::default()).unwrap();
            assert_eq!(a.witness, Some(ManipulationStrategy::new()));
        }
    }

    #[test]
    fn single_district_full_control_always_wins_without_defender() {
        let inst = instance(vec![vec![3, 1, 0]], &[(2, 4)], vec![0, 1, 2]);
        for p in 0..3 {
            let prob = ManProblem::new(inst.clone(), p, 1, 0, Rule::Pd).unwrap();
            let a = solve_pd_man(&prob, &SearchOptions::default()).unwrap();
            let s = a.witness.expect("yes");
            assert!(attacker_wins(&prob, &s).unwrap());
        }
    }

    #[test]
    fn rule_mismatch_is_rejected() {
        let inst = instance(vec![vec![1, 0]], &[(1, 1)], vec![0, 1]);
        let p = ManProblem::new(inst, 1, 1, 0, Rule::Pv).unwrap();
        assert_eq!(solve_pd_man(&p, &SearchOptions::default()), Err(Error::WrongRule { expected: Rule::Pd }));
    }

    #[test]
    fn attacker_wins_rejects_invalid_strategy() {
        let inst = instance(vec![vec![2, 0]], &[(1, 1)], vec![0, 1]);
        let p = ManProblem::new(inst, 1, 1, 0, Rule::Pv).unwrap();
        let s = ManipulationStrategy::new().with_row(0, vec![0, 2]);
        assert!(matches!(attacker_wins(&p, &s), Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn take_vectors_move_everything_allowed_to_p() {
        let d = District {
            size: 4,
            weight: 1,
            gamma: 2,
        };
        let rows = take_vectors(&[1, 1, 2], 0, &d);
        assert_eq!(rows, vec![vec![3, 1, 0], vec![3, 0, 1]]);
    }

    #[test]
    fn rows_within_counts_match_brute_force() {
        let opts = SearchOptions::default();
        let row = [2u64, 1, 0];
        for gamma in 0..=3 {
            let mut g = 0;
            let got = rows_within(&row, gamma, &opts, &mut g).unwrap();
            let mut expected = Vec::new();
            for a in 0..=3u64 {
                for b in 0..=3 - a {
                    let r = vec![a, b, 3 - a - b];
                    let d = crate::manipulation::swap_distance(&row, &r).unwrap();
                    if d > 0 && d <= gamma {
                        expected.push(r);
                    }
                }
            }
            assert_eq!(got, expected, "gamma {gamma}");
        }
    }

    #[test]
    fn prune_keeps_voted_candidates_and_p() {
        let inst = instance(
            vec![vec![0, 2, 0, 0, 1], vec![0, 0, 0, 3, 0]],
            &[(1, 0), (1, 0)],
            vec![4, 3, 2, 1, 0],
        );
        let (r, map) = prune_candidates(&inst, 2).unwrap();
        assert_eq!(map, vec![1, 2, 3, 4]);
        assert_eq!(r.num_candidates(), 4);
        assert_eq!(r.tie().ranking(), &[3, 2, 1, 0]);
        let empty = instance(vec![vec![0, 0]], &[(1, 0)], vec![0, 1]);
        assert_eq!(prune_candidates(&empty, 0).unwrap_err(), Error::EmptyElectorate);
    }
}
