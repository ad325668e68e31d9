//! Text formats: election files (TOML), graph files and witness files.
//!
//! Election files have a canonical form that `emit_election` produces byte
//! for byte: top-level lists, then `[[districts]]`, `[votes_original]`,
//! optional `[votes_manipulated]` and `[problem]`, with every district and
//! candidate in declared order and zero counts omitted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::man::{DefenderTie, ManProblem};
use crate::model::{Candidate, DistrictId, ElectionInstance, ManipulationStrategy, RecountSet, Rule, TieOrder, VoteProfile};
use crate::rec::RecProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    Rec(RecProblem),
    Man(ManProblem),
}

impl Problem {
    pub fn instance(&self) -> &ElectionInstance {
        match self {
            Problem::Rec(p) => &p.instance,
            Problem::Man(p) => &p.instance,
        }
    }

    pub fn rule(&self) -> Rule {
        match self {
            Problem::Rec(p) => p.rule,
            Problem::Man(p) => p.rule,
        }
    }

    pub fn preferred(&self) -> Candidate {
        match self {
            Problem::Rec(p) => p.preferred,
            Problem::Man(p) => p.preferred,
        }
    }
}

/// A problem together with the names used for its candidates and districts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionFile {
    pub candidates: Vec<String>,
    pub districts: Vec<String>,
    pub problem: Problem,
}

impl ElectionFile {
    pub fn candidate_index(&self, name: &str) -> Option<Candidate> {
        self.candidates.iter().position(|c| c == name)
    }

    pub fn district_index(&self, name: &str) -> Option<DistrictId> {
        self.districts.iter().position(|d| d == name)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElection {
    candidates: Vec<String>,
    tie_order: Vec<String>,
    districts: Vec<RawDistrict>,
    votes_original: BTreeMap<String, BTreeMap<String, i64>>,
    votes_manipulated: Option<BTreeMap<String, BTreeMap<String, i64>>>,
    problem: RawProblem,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistrict {
    name: String,
    weight: i64,
    gamma: i64,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Rec,
    Man,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: Kind,
    rule: Rule,
    preferred: String,
    budget_attacker: Option<i64>,
    budget_defender: i64,
    defender_tie: Option<DefenderTie>,
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn non_negative(path: &str, x: i64) -> Result<u64> {
    u64::try_from(x).map_err(|_| fmt_err(format!("{path}: count must be non-negative, got {x}")))
}

fn index_names(what: &str, names: &[String]) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(fmt_err(format!("{what}[{i}]: name must not be empty")));
        }
        if map.insert(n.clone(), i).is_some() {
            return Err(fmt_err(format!("{what}: duplicate name {n:?}")));
        }
    }
    Ok(map)
}

fn read_profile(
    field: &str,
    raw: &BTreeMap<String, BTreeMap<String, i64>>,
    districts: &HashMap<String, usize>,
    candidates: &HashMap<String, usize>,
) -> Result<VoteProfile> {
    let mut profile = VoteProfile::zeros(districts.len(), candidates.len());
    for (dname, row) in raw {
        let d = *districts
            .get(dname)
            .ok_or_else(|| fmt_err(format!("{field}.{dname}: unknown district")))?;
        for (cname, &count) in row {
            let path = format!("{field}.{dname}.{cname}");
            let c = *candidates
                .get(cname)
                .ok_or_else(|| fmt_err(format!("{path}: unknown candidate")))?;
            profile.set(d, c, non_negative(&path, count)?);
        }
    }
    if let Some(missing) = districts.keys().find(|d| !raw.contains_key(*d)) {
        return Err(fmt_err(format!("{field}: no row for district {missing:?}")));
    }
    Ok(profile)
}

/// Rewrites errors that carry district or candidate indices to use names.
fn name_error(e: Error, districts: &[String], candidates: &[String]) -> Error {
    match e {
        Error::RowSumMismatch {
            district,
            original,
            manipulated,
        } => fmt_err(format!(
            "district {:?}: original votes total {original} but manipulated votes total {manipulated}; \
             manipulation must keep every district's voter count",
            districts[district]
        )),
        Error::GammaTooLarge { district, gamma, size } => fmt_err(format!(
            "districts.{}.gamma: {gamma} exceeds the {size} voters of the district",
            districts[district]
        )),
        Error::ZeroWeight { district } => {
            fmt_err(format!("districts.{}.weight: must be at least 1", districts[district]))
        }
        Error::UnknownCandidate(c) if c < candidates.len() => fmt_err(format!("unknown candidate {}", candidates[c])),
        other => other,
    }
}

pub fn parse_election(text: &str) -> Result<ElectionFile> {
    let raw: RawElection = toml::from_str(text).map_err(|e| fmt_err(e.to_string()))?;
    let cand_idx = index_names("candidates", &raw.candidates)?;
    let district_names: Vec<String> = raw.districts.iter().map(|d| d.name.clone()).collect();
    let dist_idx = index_names("districts", &district_names)?;

    let ranking = raw
        .tie_order
        .iter()
        .map(|n| {
            cand_idx
                .get(n)
                .copied()
                .ok_or_else(|| fmt_err(format!("tie_order: unknown candidate {n:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let tie = TieOrder::new(ranking).map_err(|e| fmt_err(format!("tie_order: {e}")))?;

    let mut params = Vec::with_capacity(raw.districts.len());
    for d in &raw.districts {
        let path = format!("districts.{}", d.name);
        let weight = non_negative(&format!("{path}.weight"), d.weight)?;
        let gamma = non_negative(&format!("{path}.gamma"), d.gamma)?;
        params.push((weight, gamma));
    }
    let original = read_profile("votes_original", &raw.votes_original, &dist_idx, &cand_idx)?;
    let manipulated = raw
        .votes_manipulated
        .as_ref()
        .map(|m| read_profile("votes_manipulated", m, &dist_idx, &cand_idx))
        .transpose()?;
    let named = |e| name_error(e, &district_names, &raw.candidates);
    let instance = ElectionInstance::new(tie, &params, original, manipulated).map_err(named)?;

    let p = &raw.problem;
    let preferred = *cand_idx
        .get(&p.preferred)
        .ok_or_else(|| fmt_err(format!("problem.preferred: unknown candidate {:?}", p.preferred)))?;
    let budget_defender = non_negative("problem.budget_defender", p.budget_defender)? as usize;
    let problem = match p.kind {
        Kind::Rec => {
            if p.budget_attacker.is_some() {
                return Err(fmt_err("problem.budget_attacker: not used by recount problems"));
            }
            if p.defender_tie.is_some() {
                return Err(fmt_err("problem.defender_tie: not used by recount problems"));
            }
            if instance.manipulated().is_none() {
                return Err(fmt_err("votes_manipulated: required for recount problems"));
            }
            Problem::Rec(RecProblem::new(instance, preferred, budget_defender, p.rule).map_err(named)?)
        }
        Kind::Man => {
            let ba = p
                .budget_attacker
                .ok_or_else(|| fmt_err("problem.budget_attacker: required for manipulation problems"))?;
            let ba = non_negative("problem.budget_attacker", ba)? as usize;
            if instance.manipulated().is_some() {
                return Err(fmt_err("votes_manipulated: manipulation problems take the original votes only"));
            }
            let mp = ManProblem::new(instance, preferred, ba, budget_defender, p.rule).map_err(named)?;
            Problem::Man(mp.with_defender_tie(p.defender_tie.unwrap_or_default()))
        }
    };
    Ok(ElectionFile {
        candidates: raw.candidates,
        districts: district_names,
        problem,
    })
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

fn key(s: &str) -> String {
    let bare = !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if bare {
        s.to_owned()
    } else {
        quote(s)
    }
}

fn name_list(names: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    let items: Vec<String> = names.into_iter().map(|n| quote(n.as_ref())).collect();
    format!("[{}]", items.join(", "))
}

fn emit_row(out: &mut String, district: &str, row: &[u64], candidates: &[String]) {
    let cells: Vec<String> = row
        .iter()
        .enumerate()
        .filter(|&(_, &x)| x > 0)
        .map(|(c, x)| format!("{} = {x}", key(&candidates[c])))
        .collect();
    if cells.is_empty() {
        let _ = writeln!(out, "{} = {{}}", key(district));
    } else {
        let _ = writeln!(out, "{} = {{ {} }}", key(district), cells.join(", "));
    }
}

fn emit_profile(out: &mut String, header: &str, profile: &VoteProfile, file: &ElectionFile) {
    let _ = writeln!(out, "\n[{header}]");
    for (d, name) in file.districts.iter().enumerate() {
        emit_row(out, name, profile.row(d), &file.candidates);
    }
}

pub fn emit_election(file: &ElectionFile) -> String {
    let inst = file.problem.instance();
    let mut out = String::new();
    let _ = writeln!(out, "candidates = {}", name_list(&file.candidates));
    let tie = inst.tie().ranking().iter().map(|&c| &file.candidates[c]);
    let _ = writeln!(out, "tie_order = {}", name_list(tie));
    for (d, name) in file.districts.iter().enumerate() {
        let district = inst.district(d);
        let _ = writeln!(out, "\n[[districts]]");
        let _ = writeln!(out, "name = {}", quote(name));
        let _ = writeln!(out, "weight = {}", district.weight);
        let _ = writeln!(out, "gamma = {}", district.gamma);
    }
    emit_profile(&mut out, "votes_original", inst.original(), file);
    if let Some(m) = inst.manipulated() {
        emit_profile(&mut out, "votes_manipulated", m, file);
    }
    let _ = writeln!(out, "\n[problem]");
    match &file.problem {
        Problem::Rec(p) => {
            let _ = writeln!(out, "kind = \"rec\"");
            let _ = writeln!(out, "rule = \"{}\"", p.rule);
            let _ = writeln!(out, "preferred = {}", quote(&file.candidates[p.preferred]));
            let _ = writeln!(out, "budget_defender = {}", p.budget);
        }
        Problem::Man(p) => {
            let _ = writeln!(out, "kind = \"man\"");
            let _ = writeln!(out, "rule = \"{}\"", p.rule);
            let _ = writeln!(out, "preferred = {}", quote(&file.candidates[p.preferred]));
            let _ = writeln!(out, "budget_attacker = {}", p.budget_attacker);
            let _ = writeln!(out, "budget_defender = {}", p.budget_defender);
            let _ = writeln!(out, "defender_tie = \"{}\"", p.defender_tie);
        }
    }
    out
}

/// Graph file: `c` comment lines, a header `p N M [k]`, `M` edge lines `u v`
/// and, when `k` is given, `N` coloring lines `vertex class`. Everything is
/// 1-based.
pub fn parse_graph(text: &str) -> Result<ColoredGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
    let num = |line: usize, tok: &str| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| fmt_err(format!("line {line}: expected a non-negative integer, got {tok:?}")))
    };
    let (hl, header) = lines.next().ok_or_else(|| fmt_err("graph file has no `p` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"p") || !(3..=4).contains(&toks.len()) {
        return Err(fmt_err(format!("line {hl}: expected `p N M [k]`")));
    }
    let n = num(hl, toks[1])?;
    let m = num(hl, toks[2])?;
    let k = toks.get(3).map(|t| num(hl, t)).transpose()?;

    let pair = |line: usize, l: &str, what: &str| -> Result<(usize, usize)> {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            return Err(fmt_err(format!("line {line}: expected `{what}`")));
        }
        Ok((num(line, t[0])?, num(line, t[1])?))
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, l) = lines
            .next()
            .ok_or_else(|| fmt_err(format!("expected {m} edge lines, found {}", edges.len())))?;
        let (u, v) = pair(line, l, "u v")?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(fmt_err(format!("line {line}: vertex out of range 1..={n}")));
        }
        if u == v {
            return Err(fmt_err(format!("line {line}: self-loop at vertex {u}")));
        }
        if edges.iter().any(|&(a, b)| (a, b) == (u - 1, v - 1) || (b, a) == (u - 1, v - 1)) {
            return Err(fmt_err(format!("line {line}: duplicate edge {u} {v}")));
        }
        edges.push((u - 1, v - 1));
    }
    let mut g = ColoredGraph::new(n, edges)?;
    if let Some(k) = k {
        let mut coloring: Vec<Option<usize>> = vec![None; n];
        for _ in 0..n {
            let (line, l) = lines.next().ok_or_else(|| fmt_err(format!("expected {n} coloring lines")))?;
            let (v, c) = pair(line, l, "vertex class")?;
            if v == 0 || v > n {
                return Err(fmt_err(format!("line {line}: vertex out of range 1..={n}")));
            }
            if c == 0 || c > k {
                return Err(fmt_err(format!("line {line}: class out of range 1..={k}")));
            }
            if coloring[v - 1].replace(c - 1).is_some() {
                return Err(fmt_err(format!("line {line}: vertex {v} colored twice")));
            }
        }
        let coloring = coloring.into_iter().map(|c| c.expect("n distinct vertices")).collect();
        g = g.with_coloring(coloring, k)?;
    }
    if let Some((line, _)) = lines.next() {
        return Err(fmt_err(format!("line {line}: unexpected trailing content")));
    }
    Ok(g)
}

pub fn emit_graph(g: &ColoredGraph) -> String {
    let mut out = String::new();
    match g.coloring() {
        Some(_) => {
            let _ = writeln!(out, "p {} {} {}", g.num_vertices(), g.num_edges(), g.num_classes());
        }
        None => {
            let _ = writeln!(out, "p {} {}", g.num_vertices(), g.num_edges());
        }
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    if let Some(col) = g.coloring() {
        for (v, c) in col.iter().enumerate() {
            let _ = writeln!(out, "{} {}", v + 1, c + 1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Recount(RecountSet),
    Manipulation(ManipulationStrategy),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitness {
    recount: Option<Vec<String>>,
    manipulation: Option<BTreeMap<String, BTreeMap<String, i64>>>,
}

/// Witness file: `recount = [names]` or a `[manipulation]` table of full
/// replacement rows.
pub fn parse_witness(text: &str, file: &ElectionFile) -> Result<Witness> {
    let raw: RawWitness = toml::from_str(text).map_err(|e| fmt_err(e.to_string()))?;
    match (raw.recount, raw.manipulation) {
        (Some(names), None) => {
            let mut set = BTreeSet::new();
            for n in names {
                let d = file
                    .district_index(&n)
                    .ok_or_else(|| fmt_err(format!("recount: unknown district {n:?}")))?;
                if !set.insert(d) {
                    return Err(fmt_err(format!("recount: district {n:?} listed twice")));
                }
            }
            Ok(Witness::Recount(RecountSet(set)))
        }
        (None, Some(rows)) => {
            let mut strategy = ManipulationStrategy::new();
            for (dname, row) in rows {
                let d = file
                    .district_index(&dname)
                    .ok_or_else(|| fmt_err(format!("manipulation.{dname}: unknown district")))?;
                let mut full = vec![0u64; file.candidates.len()];
                for (cname, count) in row {
                    let path = format!("manipulation.{dname}.{cname}");
                    let c = file
                        .candidate_index(&cname)
                        .ok_or_else(|| fmt_err(format!("{path}: unknown candidate")))?;
                    full[c] = non_negative(&path, count)?;
                }
                strategy.insert(d, full);
            }
            Ok(Witness::Manipulation(strategy))
        }
        _ => Err(fmt_err("witness needs exactly one of `recount` or `[manipulation]`")),
    }
}

pub fn emit_witness(witness: &Witness, file: &ElectionFile) -> String {
    let mut out = String::new();
    match witness {
        Witness::Recount(r) => {
            let _ = writeln!(out, "recount = {}", name_list(r.iter().map(|d| &file.districts[d])));
        }
        Witness::Manipulation(s) => {
            let _ = writeln!(out, "[manipulation]");
            for (d, row) in s.iter() {
                emit_row(&mut out, &file.districts[d], row, &file.candidates);
            }
        }
    }
    out
}
