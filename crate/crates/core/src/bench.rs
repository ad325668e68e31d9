//! Timing harness: synthetic recount instances whose search cost depends on
//! the number of manipulated districts only, plus runs over the reduction
//! families.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::random_colored_graph;
use crate::man::solve_man;
use crate::model::{ElectionInstance, Rule, TieOrder, VoteProfile};
use crate::rec::{solve_rec, RecProblem};
use crate::reduction::{reduce_ds_to_pv_rec, reduce_mcc_to_pd_rec, reduce_mcc_to_pv_man, ReductionFamily};
use crate::search::SearchOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    /// Total voters for synthetic instances, graph vertices for reductions.
    #[serde(rename = "N")]
    pub n: u64,
    pub k: usize,
    pub budget_a: Option<usize>,
    pub budget_d: usize,
    pub decision: bool,
    pub nodes: u64,
    pub wall_ms: f64,
}

/// No-instance with `k` manipulated districts of `voters` voters each.
///
/// Candidates `a ≻ b ≻ w`, `w` preferred. Alternate districts moved all votes
/// from `a` to `b` or from `b` to `a`, and a baseline gives `w` half the
/// manipulated votes, rounded down. `a` and `b` always split the `k·voters`
/// votes between them, so one of them keeps at least `w`'s score and no
/// recount works. The per-rival bound only cuts branches whose remaining
/// districts are all of one type, so the search still visits a constant
/// fraction of all subsets.
pub fn scaling_instance(k: usize, voters: u64) -> Result<RecProblem> {
    if k == 0 || voters == 0 {
        return Err(Error::Format("scaling instances need k ≥ 1 and at least one voter".into()));
    }
    let baseline = voters * k as u64 / 2;
    let mut original = vec![vec![0, 0, baseline]];
    let mut manipulated = vec![vec![0, 0, baseline]];
    for i in 0..k {
        if i % 2 == 0 {
            original.push(vec![voters, 0, 0]);
            manipulated.push(vec![0, voters, 0]);
        } else {
            original.push(vec![0, voters, 0]);
            manipulated.push(vec![voters, 0, 0]);
        }
    }
    let mut params = vec![(1, 0)];
    params.extend(std::iter::repeat((1, voters)).take(k));
    let instance = ElectionInstance::new(
        TieOrder::identity(3),
        &params,
        VoteProfile::from_rows(original)?,
        Some(VoteProfile::from_rows(manipulated)?),
    )?;
    RecProblem::new(instance, 2, k, Rule::Pv)
}

pub fn run_rec(id: impl Into<String>, n: u64, k: usize, problem: &RecProblem, opts: &SearchOptions) -> Result<BenchRow> {
    timed_rec(id, n, k, problem, opts, Duration::ZERO)
}

/// Like `run_rec`, but repeats the solve until `min_wall` has elapsed and
/// reports the mean time per solve.
pub fn timed_rec(
    id: impl Into<String>,
    n: u64,
    k: usize,
    problem: &RecProblem,
    opts: &SearchOptions,
    min_wall: Duration,
) -> Result<BenchRow> {
    let start = Instant::now();
    let mut runs = 0u32;
    let answer = loop {
        let answer = solve_rec(problem, opts)?;
        runs += 1;
        if start.elapsed() >= min_wall {
            break answer;
        }
    };
    Ok(BenchRow {
        instance_id: id.into(),
        n,
        k,
        budget_a: None,
        budget_d: problem.budget,
        decision: answer.is_yes(),
        nodes: answer.nodes,
        wall_ms: start.elapsed().as_secs_f64() * 1e3 / f64::from(runs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub ks: Vec<usize>,
    pub voters: Vec<u64>,
    #[serde(default = "one")]
    pub repeats: usize,
    /// Repeat each solve for at least this long and report the mean.
    #[serde(default)]
    pub min_wall_ms: u64,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub family: ReductionFamily,
    pub vertices: usize,
    /// Budget for dominating set, number of classes for clique families.
    pub k: usize,
    pub edge_probability: f64,
    pub max_edges: Option<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub seed: u64,
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub graphs: Vec<GraphConfig>,
}

pub fn run_scaling(cfg: &ScalingConfig, opts: &SearchOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &k in &cfg.ks {
        for &v in &cfg.voters {
            let problem = scaling_instance(k, v)?;
            for rep in 0..cfg.repeats {
                let n = problem.instance.total_voters();
                let id = format!("scaling-k{k}-v{v}-r{rep}");
                rows.push(timed_rec(id, n, k, &problem, opts, Duration::from_millis(cfg.min_wall_ms))?);
            }
        }
    }
    Ok(rows)
}

pub fn run_graphs(cfg: &GraphConfig, seed: u64, opts: &SearchOptions) -> Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // one class per vertex makes every pair eligible for an edge
    let classes = match cfg.family {
        ReductionFamily::DsPvRec => cfg.vertices,
        _ => cfg.k,
    };
    if cfg.vertices < classes.max(1) {
        return Err(Error::Format("graph bench needs at least one vertex per class".into()));
    }
    let mut rows = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let g = random_colored_graph(&mut rng, cfg.vertices, classes, cfg.edge_probability, cfg.max_edges);
        let id = format!("{}-n{}-k{}-{i}", cfg.family, cfg.vertices, cfg.k);
        let n = cfg.vertices as u64;
        let row = match cfg.family {
            ReductionFamily::DsPvRec => {
                let plain = crate::graph::ColoredGraph::new(g.num_vertices(), g.edges().to_vec())?;
                run_rec(id, n, cfg.k, &reduce_ds_to_pv_rec(&plain, cfg.k)?.problem, opts)?
            }
            ReductionFamily::MccPdRec => run_rec(id, n, cfg.k, &reduce_mcc_to_pd_rec(&g)?.problem, opts)?,
            ReductionFamily::MccPvMan => {
                let problem = reduce_mcc_to_pv_man(&g)?.problem;
                let start = Instant::now();
                let answer = solve_man(&problem, opts)?;
                BenchRow {
                    instance_id: id,
                    n,
                    k: cfg.k,
                    budget_a: Some(problem.budget_attacker),
                    budget_d: problem.budget_defender,
                    decision: answer.is_yes(),
                    nodes: answer.nodes,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_config(cfg: &BenchConfig, opts: &SearchOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    if let Some(s) = &cfg.scaling {
        rows.extend(run_scaling(s, opts)?);
    }
    for (i, g) in cfg.graphs.iter().enumerate() {
        rows.extend(run_graphs(g, cfg.seed.wrapping_add(i as u64), opts)?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_instance_is_a_no_instance() {
        let p = scaling_instance(4, 3).unwrap();
        let r = run_rec("t", 0, 4, &p, &SearchOptions::default()).unwrap();
        assert!(!r.decision);
        assert!(r.nodes >= 16);
        for k in [8, 10] {
            let p = scaling_instance(k, 1).unwrap();
            let pruned = solve_rec(&p, &SearchOptions::default()).unwrap().nodes;
            let full = solve_rec(&p, &SearchOptions::default().unpruned()).unwrap().nodes;
            assert!(2 * pruned >= 1 << k && pruned <= full, "{pruned} {full}");
        }
        assert!(!run_rec("t", 0, 3, &scaling_instance(3, 2).unwrap(), &SearchOptions::default()).unwrap().decision);
        assert!(scaling_instance(0, 1).is_err());
    }

    #[test]
    fn dominating_set_graphs_have_edges() {
        let cfg = GraphConfig {
            family: ReductionFamily::DsPvRec,
            vertices: 5,
            k: 1,
            edge_probability: 1.0,
            max_edges: None,
            count: 3,
        };
        let rows = run_graphs(&cfg, 1, &SearchOptions::default()).unwrap();
        // complete graphs are dominated by any single vertex
        assert!(rows.iter().all(|r| r.decision));
    }

    #[test]
    fn csv_header_and_rows() {
        let row = BenchRow {
            instance_id: "x".into(),
            n: 3,
            k: 2,
            budget_a: None,
            budget_d: 2,
            decision: false,
            nodes: 4,
            wall_ms: 0.5,
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "instance_id,N,k,budget_a,budget_d,decision,nodes,wall_ms\nx,3,2,,2,false,4,0.5\n");
    }
}
