//! Exact recounting: can the defender make `w` win by restoring at most `B_D`
//! manipulated districts?
//!
//! The search enumerates recount sets by increasing size and then
//! lexicographically, so the first hit is a minimum-cardinality,
//! lexicographically least witness. Branches are cut when some rival can no
//! longer be brought behind `w` by the best remaining districts.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Candidate, DistrictId, ElectionInstance, RecountSet, Rule};
use crate::recount::{district_delta, signed_scores};
use crate::search::{first_hit, SearchOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecProblem {
    pub instance: ElectionInstance,
    pub preferred: Candidate,
    pub budget: usize,
    pub rule: Rule,
}

impl RecProblem {
    pub fn new(instance: ElectionInstance, preferred: Candidate, budget: usize, rule: Rule) -> Result<Self> {
        if instance.manipulated().is_none() {
            return Err(Error::MissingManipulated);
        }
        instance.check_candidate(preferred)?;
        Ok(RecProblem {
            instance,
            preferred,
            budget,
            rule,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecAnswer {
    /// Present exactly when the answer is yes.
    pub witness: Option<RecountSet>,
    /// Search nodes visited.
    pub nodes: u64,
}

impl RecAnswer {
    pub fn is_yes(&self) -> bool {
        self.witness.is_some()
    }
}

/// Districts whose manipulated row differs from the original one. Recounting
/// anywhere else is a no-op, so this is the canonical `M` for recounting.
pub fn diff_districts(instance: &ElectionInstance) -> Result<BTreeSet<DistrictId>> {
    let man = instance.manipulated().ok_or(Error::MissingManipulated)?;
    Ok(instance.original().differing_rows(man))
}

pub fn solve_rec(problem: &RecProblem, opts: &SearchOptions) -> Result<RecAnswer> {
    let search = RecSearch::new(problem, problem.budget, opts)?;
    opts.install(|| search.run(problem.budget))
}

/// Smallest number of recounts that makes the preferred candidate win, or
/// `None` when even restoring every manipulated district fails. The problem's
/// budget is ignored.
pub fn min_recount(problem: &RecProblem, opts: &SearchOptions) -> Result<Option<usize>> {
    let search = RecSearch::new(problem, usize::MAX, opts)?;
    let all = search.diff.len();
    let answer = opts.install(|| search.run(all))?;
    Ok(answer.witness.map(|r| r.len()))
}

struct RecSearch<'o> {
    opts: &'o SearchOptions,
    diff: Vec<DistrictId>,
    /// `score(w) − score(c)` on the manipulated profile.
    margin: Vec<i64>,
    /// Required margin per candidate: 0 when `w` is favored by the tie order, else 1.
    need: Vec<i64>,
    /// Sparse margin change per diff district.
    effects: Vec<Vec<(Candidate, i64)>>,
    /// Candidates worth bounding, and for each the best achievable margin gain
    /// `gain[a][start][r]` from `r` districts taken from `diff[start..]`.
    active: Vec<Candidate>,
    gain: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone)]
struct State {
    margin: Vec<i64>,
    deficits: usize,
}

impl<'o> RecSearch<'o> {
    fn new(problem: &RecProblem, budget: usize, opts: &'o SearchOptions) -> Result<Self> {
        let inst = &problem.instance;
        let w = problem.preferred;
        inst.check_candidate(w)?;
        let man = inst.manipulated().ok_or(Error::MissingManipulated)?;
        let orig = inst.original();
        let diff: Vec<_> = orig.differing_rows(man).into_iter().collect();
        let m = inst.num_candidates();

        let scores = signed_scores(problem.rule, inst, man);
        let margin: Vec<i64> = (0..m).map(|c| scores[w] - scores[c]).collect();
        let need: Vec<i64> = (0..m)
            .map(|c| i64::from(c != w && !inst.tie().prefers(w, c)))
            .collect();

        let effects: Vec<Vec<(Candidate, i64)>> = diff
            .iter()
            .map(|&i| {
                let d = district_delta(problem.rule, inst, i, man.row(i), orig.row(i));
                (0..m)
                    .filter(|&c| c != w)
                    .map(|c| (c, d[w] - d[c]))
                    .filter(|&(_, x)| x != 0)
                    .collect()
            })
            .collect();

        let mut touched = vec![false; m];
        for e in &effects {
            for &(c, _) in e {
                touched[c] = true;
            }
        }
        let active: Vec<Candidate> = (0..m)
            .filter(|&c| c != w && (touched[c] || margin[c] < need[c]))
            .collect();

        let depth = budget.min(diff.len());
        let gain = if opts.prune {
            active
                .iter()
                .map(|&c| suffix_gains(&effects, c, depth))
                .collect()
        } else {
            Vec::new()
        };

        Ok(RecSearch {
            opts,
            diff,
            margin,
            need,
            effects,
            active,
            gain,
        })
    }

    fn initial_state(&self) -> State {
        let deficits = self
            .active
            .iter()
            .filter(|&&c| self.margin[c] < self.need[c])
            .count();
        State {
            margin: self.margin.clone(),
            deficits,
        }
    }

    fn apply(&self, state: &mut State, j: usize) {
        for &(c, d) in &self.effects[j] {
            let before = state.margin[c] < self.need[c];
            state.margin[c] += d;
            let after = state.margin[c] < self.need[c];
            match (before, after) {
                (true, false) => state.deficits -= 1,
                (false, true) => state.deficits += 1,
                _ => {}
            }
        }
    }

    fn undo(&self, state: &mut State, j: usize) {
        for &(c, d) in &self.effects[j] {
            let before = state.margin[c] < self.need[c];
            state.margin[c] -= d;
            let after = state.margin[c] < self.need[c];
            match (before, after) {
                (true, false) => state.deficits -= 1,
                (false, true) => state.deficits += 1,
                _ => {}
            }
        }
    }

    /// Can `remaining` more districts from `diff[start..]` still close every deficit?
    fn feasible(&self, state: &State, start: usize, remaining: usize) -> bool {
        if !self.opts.prune || state.deficits == 0 {
            return true;
        }
        self.active.iter().enumerate().all(|(a, &c)| {
            let deficit = self.need[c] - state.margin[c];
            deficit <= 0 || deficit <= self.gain[a][start][remaining]
        })
    }

    fn run(&self, budget: usize) -> Result<RecAnswer> {
        let depth = budget.min(self.diff.len());
        let mut total = 0u64;
        for size in 0..=depth {
            let (hit, nodes) = self.level(size, total)?;
            total += nodes;
            if let Some(picks) = hit {
                let witness = picks.into_iter().map(|j| self.diff[j]).collect();
                return Ok(RecAnswer {
                    witness: Some(witness),
                    nodes: total,
                });
            }
        }
        Ok(RecAnswer {
            witness: None,
            nodes: total,
        })
    }

    /// All recount sets of exactly `size` districts, lexicographically.
    fn level(&self, size: usize, already: u64) -> Result<(Option<Vec<usize>>, u64)> {
        let root = self.initial_state();
        if size == 0 {
            return Ok(((root.deficits == 0).then(Vec::new), 1));
        }
        if !self.feasible(&root, 0, size) {
            return Ok((None, 1));
        }
        let firsts: Vec<usize> = (0..=self.diff.len() - size).collect();
        let (hit, nodes) = first_hit(self.opts, already + 1, &firsts, |&first| {
            let mut state = root.clone();
            let mut picks = vec![first];
            let mut nodes = 0u64;
            self.apply(&mut state, first);
            let found = self.dfs(&mut state, first + 1, size - 1, &mut picks, &mut nodes, already)?;
            Ok((found.then_some(picks), nodes))
        })?;
        Ok((hit, nodes + 1))
    }

    fn dfs(
        &self,
        state: &mut State,
        start: usize,
        remaining: usize,
        picks: &mut Vec<usize>,
        nodes: &mut u64,
        already: u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes & 0xfff == 0 {
            self.opts.check(already + *nodes)?;
        }
        if remaining == 0 {
            return Ok(state.deficits == 0);
        }
        if !self.feasible(state, start, remaining) {
            return Ok(false);
        }
        for j in start..=self.diff.len() - remaining {
            self.apply(state, j);
            picks.push(j);
            if self.dfs(state, j + 1, remaining - 1, picks, nodes, already)? {
                return Ok(true);
            }
            picks.pop();
            self.undo(state, j);
        }
        Ok(false)
    }
}

/// `out[start][r]`: sum of the `r` largest positive margin gains for `c`
/// among districts `start..`.
fn suffix_gains(effects: &[Vec<(Candidate, i64)>], c: Candidate, depth: usize) -> Vec<Vec<i64>> {
    let d = effects.len();
    let mut out = vec![vec![0i64; depth + 1]; d + 1];
    let mut best: Vec<i64> = Vec::new();
    for start in (0..d).rev() {
        let g = effects[start]
            .iter()
            .find(|&&(x, _)| x == c)
            .map_or(0, |&(_, g)| g);
        if g > 0 {
            let pos = best.partition_point(|&x| x >= g);
            best.insert(pos, g);
        }
        let row = &mut out[start];
        let mut acc = 0i64;
        for r in 1..=depth {
            if let Some(&x) = best.get(r - 1) {
                acc += x;
            }
            row[r] = acc;
        }
    }
    out
}
