//! Brute-force Dominating Set and Multicolored Clique deciders.
//!
//! These exist to cross-check the reductions on small graphs and refuse
//! inputs beyond desk scale instead of running for hours.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;

pub const DS_MAX_VERTICES: usize = 16;
pub const MCC_MAX_PRODUCT: u64 = 1_000_000;

pub fn is_dominating_set(g: &ColoredGraph, set: &[usize]) -> bool {
    let mut covered = vec![false; g.num_vertices()];
    for &v in set {
        if v >= g.num_vertices() {
            return false;
        }
        covered[v] = true;
        for &u in g.neighbors(v) {
            covered[u] = true;
        }
    }
    covered.into_iter().all(|x| x)
}

/// A dominating set of size at most `k`, the first one in (size, lex) order.
pub fn dominating_set_exists(g: &ColoredGraph, k: usize) -> Result<Option<Vec<usize>>> {
    let n = g.num_vertices();
    if n > DS_MAX_VERTICES {
        return Err(Error::OracleLimit(format!(
            "dominating set oracle handles at most {DS_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |acc, &u| acc | 1 << u))
        .collect();
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    for size in 0..=k.min(n) {
        for set in (0..n).combinations(size) {
            let cover = set.iter().fold(0u32, |acc, &v| acc | closed[v]);
            if cover == all {
                return Ok(Some(set));
            }
        }
    }
    Ok(None)
}

pub fn domination_number(g: &ColoredGraph) -> Result<usize> {
    Ok(dominating_set_exists(g, g.num_vertices())?
        .map(|s| s.len())
        .expect("the whole vertex set dominates"))
}

/// One vertex from each class, pairwise adjacent.
pub fn is_multicolored_clique(g: &ColoredGraph, set: &[usize]) -> bool {
    let Some(col) = g.coloring() else {
        return false;
    };
    if set.len() != g.num_classes() || set.iter().any(|&v| v >= g.num_vertices()) {
        return false;
    }
    let mut classes: Vec<usize> = set.iter().map(|&v| col[v]).collect();
    classes.sort_unstable();
    classes.dedup();
    classes.len() == set.len() && set.iter().tuple_combinations().all(|(&u, &v)| g.has_edge(u, v))
}

/// A multicolored clique, scanning the product of the classes in lex order.
/// Returns the vertices ordered by class.
pub fn multicolored_clique_exists(g: &ColoredGraph) -> Result<Option<Vec<usize>>> {
    let col = g
        .coloring()
        .ok_or_else(|| Error::Graph("multicolored clique needs a coloring".into()))?;
    let k = g.num_classes();
    let classes: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..g.num_vertices()).filter(|&v| col[v] == i).collect())
        .collect();
    if classes.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let product = classes
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if product > MCC_MAX_PRODUCT {
        return Err(Error::OracleLimit(format!(
            "class product {product} exceeds {MCC_MAX_PRODUCT}"
        )));
    }
    let mut pick = Vec::with_capacity(k);
    Ok(extend_clique(g, &classes, &mut pick).then_some(pick))
}

fn extend_clique(g: &ColoredGraph, classes: &[Vec<usize>], pick: &mut Vec<usize>) -> bool {
    let i = pick.len();
    if i == classes.len() {
        return true;
    }
    for &v in &classes[i] {
        if pick.iter().all(|&u| g.has_edge(u, v)) {
            pick.push(v);
            if extend_clique(g, classes, pick) {
                return true;
            }
            pick.pop();
        }
    }
    false
}
