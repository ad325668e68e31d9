//! Simple undirected graphs with an optional vertex coloring.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    coloring: Option<Vec<usize>>,
    classes: usize,
}

impl ColoredGraph {
    /// Edges are stored as `(min, max)` in the given order.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge {u}-{v} out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Graph(format!("duplicate edge {}-{}", e.0, e.1)));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push(e);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(ColoredGraph {
            n,
            edges: normalized,
            adjacency,
            coloring: None,
            classes: 0,
        })
    }

    /// Attaches a coloring into `classes` classes (`0..classes`).
    pub fn with_coloring(mut self, coloring: Vec<usize>, classes: usize) -> Result<Self> {
        if coloring.len() != self.n {
            return Err(Error::Graph(format!(
                "coloring has {} entries for {} vertices",
                coloring.len(),
                self.n
            )));
        }
        if let Some((v, &c)) = coloring.iter().enumerate().find(|&(_, &c)| c >= classes) {
            return Err(Error::Graph(format!("vertex {v} has class {c}, only {classes} classes")));
        }
        self.coloring = Some(coloring);
        self.classes = classes;
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn coloring(&self) -> Option<&[usize]> {
        self.coloring.as_deref()
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn class_members(&self, class: usize) -> Vec<usize> {
        match &self.coloring {
            Some(col) => (0..self.n).filter(|&v| col[v] == class).collect(),
            None => Vec::new(),
        }
    }

    /// Coloring, all classes inhabited and no edge inside a class.
    pub fn require_proper_coloring(&self) -> Result<&[usize]> {
        let col = self
            .coloring
            .as_deref()
            .ok_or_else(|| Error::Graph("a vertex coloring is required".into()))?;
        if self.classes == 0 {
            return Err(Error::Graph("at least one color class is required".into()));
        }
        let mut inhabited = vec![false; self.classes];
        for &c in col {
            inhabited[c] = true;
        }
        if let Some(c) = inhabited.iter().position(|&x| !x) {
            return Err(Error::Graph(format!("color class {c} is empty")));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| col[u] == col[v]) {
            return Err(Error::Graph(format!("edge {u}-{v} joins two vertices of class {}", col[u])));
        }
        Ok(col)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

/// A vertex set and an edge set decoded from an election witness.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphWitness {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

/// One representative of every isomorphism class of graphs on `n` vertices
/// (optionally only connected ones). Exhaustive over labelings, so meant for
/// `n ≤ 7`.
pub fn nonisomorphic_graphs(n: usize, connected_only: bool) -> Vec<ColoredGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let pair_index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        pairs.iter().position(|&p| p == (a, b)).expect("pair")
    };
    let perms: Vec<Vec<usize>> = (0..n)
        .permutations(n)
        .map(|perm| pairs.iter().map(|&(u, v)| pair_index(perm[u], perm[v])).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let canonical = perms
            .iter()
            .map(|map| {
                map.iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .fold(0u64, |acc, (_, &j)| acc | 1 << j)
            })
            .min()
            .unwrap_or(0);
        if canonical != mask || !seen.insert(canonical) {
            continue;
        }
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = ColoredGraph::new(n, edges).expect("simple by construction");
        if !connected_only || g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Random graph on `n ≥ classes` vertices whose coloring inhabits every class,
/// with each cross-class pair present with probability `p`, keeping at most
/// `max_edges` edges.
pub fn random_colored_graph<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    classes: usize,
    p: f64,
    max_edges: Option<usize>,
) -> ColoredGraph {
    assert!(classes >= 1 && n >= classes, "need at least one vertex per class");
    let mut coloring: Vec<usize> = (0..n).map(|v| if v < classes { v } else { rng.gen_range(0..classes) }).collect();
    coloring.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..n)
        .tuple_combinations()
        .filter(|&(u, v)| coloring[u] != coloring[v] && rng.gen_bool(p))
        .collect();
    if let Some(limit) = max_edges {
        edges.shuffle(rng);
        edges.truncate(limit);
        edges.sort_unstable();
    }
    ColoredGraph::new(n, edges)
        .and_then(|g| g.with_coloring(coloring, classes))
        .expect("valid by construction")
}
