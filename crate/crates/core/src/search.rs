//! Search configuration and the ordered, optionally parallel branch driver
//! shared by the solvers.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_NODE_LIMIT: u64 = 500_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; `1` runs everything on the calling thread.
    pub threads: usize,
    /// Abort with [`Error::SearchSpaceExceeded`] after this many nodes.
    pub node_limit: Option<u64>,
    /// Bound-based pruning in the recount search. Never changes answers.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: 1,
            node_limit: Some(DEFAULT_NODE_LIMIT),
            prune: true,
        }
    }
}

impl SearchOptions {
    pub fn with_threads(self, threads: usize) -> Self {
        SearchOptions { threads, ..self }
    }

    pub fn unpruned(self) -> Self {
        SearchOptions { prune: false, ..self }
    }

    pub fn unlimited(self) -> Self {
        SearchOptions {
            node_limit: None,
            ..self
        }
    }

    pub(crate) fn check(&self, nodes: u64) -> Result<()> {
        match self.node_limit {
            Some(limit) if nodes > limit => Err(Error::SearchSpaceExceeded { limit }),
            _ => Ok(()),
        }
    }

    /// Runs `f` inside a dedicated pool when more than one thread is requested.
    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.threads <= 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

/// Outcome of one independent branch: a hit (if any) and the nodes spent.
pub(crate) type BranchResult<T> = Result<(Option<T>, u64)>;

/// Evaluates `branch` on `items` in order and returns the first hit together
/// with the node count of every branch up to and including it.
///
/// Branches are self-contained, so the parallel path evaluates a chunk at a
/// time and then scans it in order. Result and node count are the same for
/// any thread count.
pub(crate) fn first_hit<I, T, F>(
    opts: &SearchOptions,
    already: u64,
    items: &[I],
    branch: F,
) -> Result<(Option<T>, u64)>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> BranchResult<T> + Sync,
{
    let mut nodes = 0u64;
    if opts.threads <= 1 {
        for item in items {
            let (hit, n) = branch(item)?;
            nodes += n;
            opts.check(already + nodes)?;
            if hit.is_some() {
                return Ok((hit, nodes));
            }
        }
        return Ok((None, nodes));
    }
    let chunk = 64 * opts.threads;
    for block in items.chunks(chunk) {
        let results: Vec<BranchResult<T>> = block.par_iter().map(&branch).collect();
        for r in results {
            let (hit, n) = r?;
            nodes += n;
            opts.check(already + nodes)?;
            if hit.is_some() {
                return Ok((hit, nodes));
            }
        }
    }
    Ok((None, nodes))
}
