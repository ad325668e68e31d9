//! Election instances built from Dominating Set and Multicolored Clique
//! inputs, with a role map for translating witnesses back to the graph.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphWitness};
use crate::man::ManProblem;
use crate::manipulation::swap_distance;
use crate::model::{Candidate, DistrictId, ElectionInstance, Rule, TieOrder, VoteProfile};
use crate::rec::RecProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionFamily {
    DsPvRec,
    MccPvMan,
    MccPdRec,
}

impl std::fmt::Display for ReductionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReductionFamily::DsPvRec => "pv-rec",
            ReductionFamily::MccPvMan => "pv-man",
            ReductionFamily::MccPdRec => "pd-rec",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum CandidateRole {
    Special,
    Main { vertex: usize },
    Dummy { vertex: usize },
    /// Padding candidate for one extra voter of a district.
    Padding { district: DistrictId, voter: usize },
    ClassChallenger { class: usize },
    PairChallenger { from: usize, to: usize },
    Helper { edge: usize },
    Auxiliary { edge: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum DistrictRole {
    Baseline,
    /// Weight `lambda` pins `candidate`'s score.
    CandidateBaseline { candidate: Candidate, lambda: u64 },
    Primary { vertex: usize },
    Critical { vertex: usize },
    /// Directed edge district, `from` first.
    Secondary { edge: usize, from: usize, to: usize },
    Support { edge: usize },
    Transfer { edge: usize, vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLayout {
    pub family: ReductionFamily,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub classes: usize,
    pub candidates: Vec<CandidateRole>,
    pub districts: Vec<DistrictRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_f: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_w: Option<u64>,
}

impl ReductionLayout {
    fn edge_label(&self, edge: usize) -> String {
        let (u, v) = self.edges[edge];
        format!("{}_{}", u + 1, v + 1)
    }

    pub fn candidate_name(&self, c: Candidate) -> String {
        match self.candidates[c] {
            CandidateRole::Special => "w".into(),
            CandidateRole::Main { vertex } => format!("c{}", vertex + 1),
            CandidateRole::Dummy { vertex } => format!("d{}", vertex + 1),
            CandidateRole::Padding { district, voter } => format!("x{}_{}", district, voter + 1),
            CandidateRole::ClassChallenger { class } => format!("R{}", class + 1),
            CandidateRole::PairChallenger { from, to } => format!("R{}_{}", from + 1, to + 1),
            CandidateRole::Helper { edge } => format!("h{}", self.edge_label(edge)),
            CandidateRole::Auxiliary { edge } => format!("a{}", self.edge_label(edge)),
        }
    }

    pub fn district_name(&self, d: DistrictId) -> String {
        match self.districts[d] {
            DistrictRole::Baseline => "D0".into(),
            DistrictRole::CandidateBaseline { candidate, .. } => format!("B_{}", self.candidate_name(candidate)),
            DistrictRole::Primary { vertex } => format!("D{}", vertex + 1),
            DistrictRole::Critical { vertex } => format!("Dstar{}", vertex + 1),
            DistrictRole::Secondary { from, to, .. } => format!("D{}_{}", from + 1, to + 1),
            DistrictRole::Support { edge } => format!("S{}", self.edge_label(edge)),
            DistrictRole::Transfer { edge, vertex } => format!("T{}_{}", self.edge_label(edge), vertex + 1),
        }
    }

    pub fn candidate_names(&self) -> Vec<String> {
        (0..self.candidates.len()).map(|c| self.candidate_name(c)).collect()
    }

    pub fn district_names(&self) -> Vec<String> {
        (0..self.districts.len()).map(|d| self.district_name(d)).collect()
    }

    pub fn find_candidate(&self, role: CandidateRole) -> Option<Candidate> {
        self.candidates.iter().position(|&r| r == role)
    }

    pub fn find_district(&self, role: DistrictRole) -> Option<DistrictId> {
        self.districts.iter().position(|&r| r == role)
    }

    pub fn special(&self) -> Candidate {
        self.find_candidate(CandidateRole::Special).expect("every layout has w")
    }

    /// Districts that are identical in both profiles by construction.
    pub fn is_baseline(&self, d: DistrictId) -> bool {
        matches!(
            self.districts.get(d),
            Some(DistrictRole::Baseline | DistrictRole::CandidateBaseline { .. })
        )
    }

    /// `s(c)` of the PD-Rec family: what `c` collects outside its baseline.
    pub fn manipulated_share(&self, c: Candidate) -> Option<u64> {
        let lambda_w = self.lambda_w?;
        self.districts.iter().find_map(|r| match *r {
            DistrictRole::CandidateBaseline { candidate, lambda } if candidate == c => Some(lambda_w - lambda),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction<P> {
    pub problem: P,
    pub layout: ReductionLayout,
}

/// Recount instance whose defender succeeds iff `g` has a dominating set of
/// size at most `k`.
pub fn reduce_ds_to_pv_rec(g: &ColoredGraph, k: usize) -> Result<Reduction<RecProblem>> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::Reduction("graph has no vertices".into()));
    }
    let w = n;
    let main = |v: usize| v;
    let dummy = |v: usize| n + 1 + v;
    let m = 2 * n + 1;
    let mut candidates = vec![CandidateRole::Special; m];
    let mut districts = vec![DistrictRole::Baseline];
    for v in 0..n {
        candidates[main(v)] = CandidateRole::Main { vertex: v };
        candidates[dummy(v)] = CandidateRole::Dummy { vertex: v };
        districts.push(DistrictRole::Primary { vertex: v });
    }

    let mut original = VoteProfile::zeros(n + 1, m);
    for v in 0..n {
        original.set(0, main(v), (n - g.degree(v) - 1) as u64);
    }
    original.set(0, w, n as u64);
    let mut manipulated = original.clone();
    for v in 0..n {
        original.set(1 + v, dummy(v), g.degree(v) as u64 + 1);
        manipulated.set(1 + v, main(v), 1);
        for &u in g.neighbors(v) {
            manipulated.set(1 + v, main(u), 1);
        }
    }
    let params = gammas(&original, &manipulated)?.into_iter().map(|gamma| (1, gamma)).collect::<Vec<_>>();
    let instance = ElectionInstance::new(TieOrder::identity(m), &params, original, Some(manipulated))?;
    let layout = ReductionLayout {
        family: ReductionFamily::DsPvRec,
        vertices: n,
        edges: g.edges().to_vec(),
        classes: 0,
        candidates,
        districts,
        ell: None,
        big_f: None,
        lambda_w: None,
    };
    Ok(Reduction {
        problem: RecProblem::new(instance, w, k, Rule::Pv)?,
        layout,
    })
}

fn gammas(original: &VoteProfile, manipulated: &VoteProfile) -> Result<Vec<u64>> {
    (0..original.num_districts())
        .map(|i| swap_distance(original.row(i), manipulated.row(i)))
        .collect()
}

fn pair_index(k: usize, i: usize, j: usize) -> usize {
    i * (k - 1) + if j > i { j - 1 } else { j }
}

fn challenger_roles(k: usize) -> Vec<CandidateRole> {
    let mut roles: Vec<CandidateRole> = (0..k).map(|class| CandidateRole::ClassChallenger { class }).collect();
    for from in 0..k {
        for to in (0..k).filter(|&to| to != from) {
            roles.push(CandidateRole::PairChallenger { from, to });
        }
    }
    roles
}

/// Manipulation instance (`B_D = 0`) where the attacker succeeds iff `g` has a
/// multicolored clique. The coloring of `g` supplies `k`.
pub fn reduce_mcc_to_pv_man(g: &ColoredGraph) -> Result<Reduction<ManProblem>> {
    let col = g.require_proper_coloring()?;
    let k = g.num_classes();
    let n = g.num_vertices();

    let pairs = k * (k - 1);
    let main = |v: usize| k + pairs + v;
    let w = k + pairs + n;

    let mut districts = vec![DistrictRole::Baseline];
    districts.extend((0..n).map(|vertex| DistrictRole::Primary { vertex }));
    for (edge, &(u, v)) in g.edges().iter().enumerate() {
        districts.push(DistrictRole::Secondary { edge, from: u, to: v });
        districts.push(DistrictRole::Secondary { edge, from: v, to: u });
    }

    // votes before padding, as (candidate, count) lists
    let mut rows: Vec<Vec<(Candidate, u64)>> = vec![Vec::new(); districts.len()];
    for (d, role) in districts.iter().enumerate() {
        match *role {
            DistrictRole::Primary { vertex } => {
                rows[d].push((col[vertex], 1));
                if k > 1 {
                    rows[d].push((main(vertex), k as u64 - 1));
                }
            }
            DistrictRole::Secondary { from, to, .. } => {
                rows[d].push((k + pair_index(k, col[from], col[to]), 1));
                for v in (0..n).filter(|&v| v != from && col[v] == col[from]) {
                    rows[d].push((main(v), 1));
                }
            }
            _ => {}
        }
    }
    let ell = rows[1..].iter().map(|r| r.iter().map(|&(_, x)| x).sum::<u64>()).max().unwrap_or(0);
    let big_f = ell * (k * k) as u64;

    let mut candidates = challenger_roles(k);
    candidates.extend((0..n).map(|vertex| CandidateRole::Main { vertex }));
    candidates.push(CandidateRole::Special);
    for (d, row) in rows.iter_mut().enumerate().skip(1) {
        let filled: u64 = row.iter().map(|&(_, x)| x).sum();
        for voter in 0..(ell - filled) as usize {
            row.push((candidates.len(), 1));
            candidates.push(CandidateRole::Padding { district: d, voter });
        }
    }
    let m = candidates.len();

    // baseline tops every challenger up to F and every main up to F + k − 2
    let mut collected = vec![0u64; m];
    for row in &rows[1..] {
        for &(c, x) in row {
            collected[c] += x;
        }
    }
    for c in 0..k + pairs + n {
        let target = if c < k + pairs { big_f } else { big_f + k as u64 - 2 };
        let need = target.checked_sub(collected[c]).ok_or_else(|| {
            Error::Reduction(format!(
                "baseline entry for candidate {c} would be negative ({} > {target})",
                collected[c]
            ))
        })?;
        rows[0].push((c, need));
    }

    let mut original = VoteProfile::zeros(districts.len(), m);
    for (d, row) in rows.iter().enumerate() {
        for &(c, x) in row {
            original.set(d, c, x);
        }
    }
    let params: Vec<(u64, u64)> = (0..districts.len()).map(|d| (1, if d == 0 { 0 } else { ell })).collect();
    let instance = ElectionInstance::new(TieOrder::identity(m), &params, original, None)?;
    let layout = ReductionLayout {
        family: ReductionFamily::MccPvMan,
        vertices: n,
        edges: g.edges().to_vec(),
        classes: k,
        candidates,
        districts,
        ell: Some(ell),
        big_f: Some(big_f),
        lambda_w: None,
    };
    Ok(Reduction {
        problem: ManProblem::new(instance, w, k * k, 0, Rule::Pv)?,
        layout,
    })
}

/// Weighted recount instance where the defender succeeds iff `g` has a
/// multicolored clique. The coloring of `g` supplies `k`.
pub fn reduce_mcc_to_pd_rec(g: &ColoredGraph) -> Result<Reduction<RecProblem>> {
    let col = g.require_proper_coloring()?;
    let k = g.num_classes();
    let n = g.num_vertices();
    let edges = g.edges();
    let me = edges.len();

    let mut candidates = challenger_roles(k);
    let w = candidates.len();
    candidates.push(CandidateRole::Special);
    let main0 = candidates.len();
    candidates.extend((0..n).map(|vertex| CandidateRole::Main { vertex }));
    let aux0 = candidates.len();
    candidates.extend((0..me).map(|edge| CandidateRole::Auxiliary { edge }));
    let helper0 = candidates.len();
    candidates.extend((0..me).map(|edge| CandidateRole::Helper { edge }));
    let dummy0 = candidates.len();
    candidates.extend((0..n).map(|vertex| CandidateRole::Dummy { vertex }));
    let m = candidates.len();
    let pair = |i: usize, j: usize| k + pair_index(k, i, j);

    // (role, weight, original winner, manipulated winner)
    let mut plan: Vec<(DistrictRole, u64, Candidate, Candidate)> = Vec::new();
    for v in 0..n {
        plan.push((DistrictRole::Primary { vertex: v }, 1, main0 + v, col[v]));
        plan.push((DistrictRole::Critical { vertex: v }, k as u64, dummy0 + v, main0 + v));
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        let (h, a) = (helper0 + e, aux0 + e);
        plan.push((DistrictRole::Secondary { edge: e, from: u, to: v }, 1, h, pair(col[u], col[v])));
        plan.push((DistrictRole::Secondary { edge: e, from: v, to: u }, 1, h, pair(col[v], col[u])));
        plan.push((DistrictRole::Support { edge: e }, 2, a, h));
        plan.push((DistrictRole::Transfer { edge: e, vertex: u }, 1, main0 + u, a));
        plan.push((DistrictRole::Transfer { edge: e, vertex: v }, 1, main0 + v, a));
    }

    let lambda_w = ((n as u64 + 1) * k as u64)
        .checked_add(6 * me as u64)
        .ok_or(Error::Overflow)?;
    let mut share = vec![0u64; m];
    for &(_, weight, _, winner) in &plan {
        share[winner] += weight;
    }
    for c in 0..dummy0 {
        let lambda = lambda_w
            .checked_sub(share[c])
            .filter(|&l| l >= 1)
            .ok_or_else(|| Error::Reduction(format!("candidate {c} collects {} ≥ λ_w = {lambda_w}", share[c])))?;
        plan.push((DistrictRole::CandidateBaseline { candidate: c, lambda }, lambda, c, c));
    }

    let mut original = VoteProfile::zeros(plan.len(), m);
    let mut manipulated = VoteProfile::zeros(plan.len(), m);
    for (d, &(_, _, before, after)) in plan.iter().enumerate() {
        original.set(d, before, 1);
        manipulated.set(d, after, 1);
    }
    let params: Vec<(u64, u64)> = plan
        .iter()
        .enumerate()
        .map(|(d, &(_, weight, _, _))| Ok((weight, swap_distance(original.row(d), manipulated.row(d))?)))
        .collect::<Result<_>>()?;
    let tie = TieOrder::identity(m);
    let instance = ElectionInstance::new(tie, &params, original, Some(manipulated))?;
    let budget = 2 * k + 5 * (k * k.saturating_sub(1) / 2);
    let layout = ReductionLayout {
        family: ReductionFamily::MccPdRec,
        vertices: n,
        edges: edges.to_vec(),
        classes: k,
        candidates,
        districts: plan.into_iter().map(|(role, ..)| role).collect(),
        ell: None,
        big_f: None,
        lambda_w: Some(lambda_w),
    };
    Ok(Reduction {
        problem: RecProblem::new(instance, w, budget, Rule::Pd)?,
        layout,
    })
}

/// Translates a recount set (rec families) or touched set (man family) back
/// to the graph.
pub fn decode_witness(layout: &ReductionLayout, districts: &BTreeSet<DistrictId>) -> Result<GraphWitness> {
    let mut out = GraphWitness::default();
    for &d in districts {
        let role = layout.districts.get(d).ok_or_else(|| {
            Error::Witness(format!(
                "district {d} is not part of the layout ({} districts)",
                layout.districts.len()
            ))
        })?;
        match (layout.family, *role) {
            (ReductionFamily::DsPvRec | ReductionFamily::MccPvMan, DistrictRole::Primary { vertex }) => {
                out.vertices.insert(vertex);
            }
            (ReductionFamily::MccPvMan, DistrictRole::Secondary { edge, .. }) => {
                out.edges.insert(layout.edges[edge]);
            }
            (ReductionFamily::MccPdRec, DistrictRole::Critical { vertex }) => {
                out.vertices.insert(vertex);
            }
            (ReductionFamily::MccPdRec, DistrictRole::Support { edge }) => {
                out.edges.insert(layout.edges[edge]);
            }
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voting::{pd_scores, pv_scores};

    fn path3() -> ColoredGraph {
        ColoredGraph::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    fn edge2() -> ColoredGraph {
        ColoredGraph::new(2, vec![(0, 1)]).unwrap().with_coloring(vec![0, 1], 2).unwrap()
    }

    #[test]
    fn ds_structure_and_scores() {
        let r = reduce_ds_to_pv_rec(&path3(), 1).unwrap();
        let inst = &r.problem.instance;
        assert_eq!(inst.num_districts(), 4);
        assert_eq!(inst.num_candidates(), 7);
        let man = pv_scores(inst.manipulated().unwrap());
        assert_eq!(&man.0[..4], &[3, 3, 3, 3]);
        assert_eq!(pv_scores(inst.original()).0[3], 3);
        assert_eq!(r.problem.budget, 1);
        assert_eq!(r.layout.district_names(), vec!["D0", "D1", "D2", "D3"]);
        assert_eq!(r.layout.candidate_name(3), "w");
    }

    #[test]
    fn pv_man_triangle() {
        let tri = ColoredGraph::new(3, vec![(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .with_coloring(vec![0, 1, 2], 3)
            .unwrap();
        let r = reduce_mcc_to_pv_man(&tri).unwrap();
        assert_eq!(r.layout.ell, Some(3));
        assert_eq!(r.layout.big_f, Some(27));
        assert_eq!(r.problem.instance.num_districts(), 10);
        let s = pv_scores(r.problem.instance.original());
        let (k, pairs) = (3, 6);
        assert!(s.0[..k + pairs].iter().all(|&x| x == 27));
        assert!(s.0[k + pairs..k + pairs + 3].iter().all(|&x| x == 28));
        assert_eq!(s.0[r.layout.special()], 0);
    }

    #[test]
    fn pv_man_rejects_bad_colorings() {
        let g = ColoredGraph::new(2, vec![(0, 1)]).unwrap();
        assert!(reduce_mcc_to_pv_man(&g).is_err());
        let same = g.clone().with_coloring(vec![0, 0], 2).unwrap();
        assert!(reduce_mcc_to_pv_man(&same).is_err());
        assert!(reduce_mcc_to_pd_rec(&same).is_err());
    }

    #[test]
    fn pd_rec_single_edge() {
        let r = reduce_mcc_to_pd_rec(&edge2()).unwrap();
        let inst = &r.problem.instance;
        let non_baseline = (0..inst.num_districts()).filter(|&d| !r.layout.is_baseline(d)).count();
        assert_eq!(non_baseline, 9);
        assert_eq!(r.problem.budget, 9);
        let lw = r.layout.lambda_w.unwrap();
        assert_eq!(lw, 3 * 2 + 6);
        let s = pd_scores(inst.manipulated().unwrap(), &inst.weights(), inst.tie());
        for (c, role) in r.layout.candidates.iter().enumerate() {
            let expected = if matches!(role, CandidateRole::Dummy { .. }) { 0 } else { lw };
            assert_eq!(s.0[c], expected, "{}", r.layout.candidate_name(c));
        }
        let c1 = r.layout.find_candidate(CandidateRole::Main { vertex: 0 }).unwrap();
        assert_eq!(r.layout.manipulated_share(c1), Some(2));
    }

    #[test]
    fn decode_and_reject() {
        let r = reduce_ds_to_pv_rec(&path3(), 1).unwrap();
        let got = decode_witness(&r.layout, &BTreeSet::from([2])).unwrap();
        assert_eq!(got.vertices, BTreeSet::from([1]));
        assert!(decode_witness(&r.layout, &BTreeSet::new()).unwrap().vertices.is_empty());
        assert!(decode_witness(&r.layout, &BTreeSet::from([4])).is_err());
    }

    #[test]
    fn layout_json_round_trip() {
        let r = reduce_mcc_to_pd_rec(&edge2()).unwrap();
        let text = serde_json::to_string(&r.layout).unwrap();
        let back: ReductionLayout = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r.layout);
        let names = r.layout.district_names();
        let unique: BTreeSet<_> = names.iter().collect();
        assert_eq!(unique.len(), names.len());
    }
}
