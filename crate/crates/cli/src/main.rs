use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use electiongame::bench::{run_config, write_csv, BenchConfig};
use electiongame::format::{emit_election, emit_witness, parse_election, parse_graph, parse_witness, ElectionFile, Problem, Witness};
use electiongame::graph::ColoredGraph;
use electiongame::manipulation::apply_recount;
use electiongame::oracle::{dominating_set_exists, multicolored_clique_exists};
use electiongame::reduction::{decode_witness, reduce_ds_to_pv_rec, reduce_mcc_to_pd_rec, reduce_mcc_to_pv_man, ReductionLayout};
use electiongame::search::DEFAULT_NODE_LIMIT;
use electiongame::verify::{verify_manipulation, verify_recount, Verdict};
use electiongame::voting::scores;
use electiongame::{solve_man, solve_rec, DefenderTie, Rule, SearchOptions, VoteProfile};

#[derive(Debug, Parser)]
#[command(name = "electiongame", version, about = "Recount and manipulation games on districted elections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Pv,
    Pd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieArg {
    Pessimistic,
    Optimistic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    PvRec,
    PvMan,
    PdRec,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    Ds,
    Mcc,
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    /// Worker threads for the search.
    #[arg(long, env = "ELECTIONGAME_THREADS", default_value_t = 1)]
    threads: usize,
    /// Abort once this many search nodes were explored (0 = no limit).
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    limit_nodes: u64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        let opts = SearchOptions::default().with_threads(self.threads.max(1));
        if self.limit_nodes == 0 {
            opts.unlimited()
        } else {
            SearchOptions {
                node_limit: Some(self.limit_nodes),
                ..opts
            }
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the problem in an election file. Exit 0 = yes, 1 = no, 2 = error.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        rule: Option<RuleArg>,
        #[arg(long)]
        budget_a: Option<usize>,
        #[arg(long)]
        budget_d: Option<usize>,
        #[arg(long, value_enum)]
        defender_tie: Option<TieArg>,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the witness here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Layout sidecar of a reduced instance; translates the witness back to the graph.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Build an election file (and `<out>.layout.json`) from a graph file.
    Reduce {
        graph: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// Dominating set size; clique families take k from the coloring.
        #[arg(long)]
        k: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Re-check a witness file. Exit 0 = valid, 1 = invalid, 2 = error.
    Verify { file: PathBuf, witness: PathBuf },
    /// Run a benchmark configuration and write CSV rows.
    Bench {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Brute-force graph deciders. Exit 0 = yes, 1 = no, 2 = error.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_election(path: &Path) -> Result<ElectionFile> {
    parse_election(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_graph(path: &Path) -> Result<ColoredGraph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn score_line(label: &str, file: &ElectionFile, profile: &VoteProfile, rule: Rule) -> String {
    let sc = scores(rule, profile, file.problem.instance());
    let cells: Vec<String> = file
        .candidates
        .iter()
        .zip(sc.as_slice())
        .map(|(n, s)| format!("{n}={s}"))
        .collect();
    format!("{label:<14}{}", cells.join(" "))
}

fn apply_overrides(
    file: &mut ElectionFile,
    rule: Option<RuleArg>,
    budget_a: Option<usize>,
    budget_d: Option<usize>,
    tie: Option<TieArg>,
) -> Result<()> {
    let rule = rule.map(|r| match r {
        RuleArg::Pv => Rule::Pv,
        RuleArg::Pd => Rule::Pd,
    });
    match &mut file.problem {
        Problem::Rec(p) => {
            if budget_a.is_some() || tie.is_some() {
                bail!("--budget-a and --defender-tie apply to manipulation problems only");
            }
            p.rule = rule.unwrap_or(p.rule);
            p.budget = budget_d.unwrap_or(p.budget);
        }
        Problem::Man(p) => {
            p.rule = rule.unwrap_or(p.rule);
            p.budget_attacker = budget_a.unwrap_or(p.budget_attacker);
            p.budget_defender = budget_d.unwrap_or(p.budget_defender);
            if let Some(t) = tie {
                p.defender_tie = match t {
                    TieArg::Pessimistic => DefenderTie::Pessimistic,
                    TieArg::Optimistic => DefenderTie::Optimistic,
                };
            }
        }
    }
    Ok(())
}

fn print_graph_witness(layout: &ReductionLayout, districts: &BTreeSet<usize>) -> Result<()> {
    let g = decode_witness(layout, districts)?;
    let vs: Vec<String> = g.vertices.iter().map(|v| (v + 1).to_string()).collect();
    println!("vertices:     {}", vs.join(" "));
    if !g.edges.is_empty() {
        let es: Vec<String> = g.edges.iter().map(|(u, v)| format!("{}-{}", u + 1, v + 1)).collect();
        println!("edges:        {}", es.join(" "));
    }
    Ok(())
}

fn solve(
    file: ElectionFile,
    opts: &SearchOptions,
    witness_out: Option<&Path>,
    layout: Option<&ReductionLayout>,
) -> Result<bool> {
    let inst = file.problem.instance().clone();
    let rule = file.problem.rule();
    println!("candidates:   {}", file.candidates.join(" "));
    let (witness, nodes) = match &file.problem {
        Problem::Rec(p) => {
            let answer = solve_rec(p, opts)?;
            let manipulated = inst.manipulated().expect("recount problems carry a manipulated profile");
            println!("decision:     {}", if answer.is_yes() { "yes" } else { "no" });
            println!("{}", score_line("manipulated:", &file, manipulated, rule));
            if let Some(r) = &answer.witness {
                let names: Vec<&str> = r.iter().map(|d| file.districts[d].as_str()).collect();
                println!("recount:      {}", names.join(" "));
                let touched = (0..inst.num_districts()).collect();
                let after = apply_recount(inst.original(), manipulated, &touched, r)?;
                println!("{}", score_line("after:", &file, &after, rule));
            }
            (answer.witness.map(Witness::Recount), answer.nodes)
        }
        Problem::Man(p) => {
            let answer = solve_man(p, opts)?;
            println!("decision:     {}", if answer.is_yes() { "yes" } else { "no" });
            println!("{}", score_line("original:", &file, inst.original(), rule));
            if let Some(s) = &answer.witness {
                for (d, row) in s.iter() {
                    let cells: Vec<String> = row
                        .iter()
                        .enumerate()
                        .filter(|&(_, &x)| x > 0)
                        .map(|(c, x)| format!("{}={x}", file.candidates[c]))
                        .collect();
                    println!("manipulate:   {} -> {}", file.districts[d], cells.join(" "));
                }
                println!("{}", score_line("manipulated:", &file, &s.apply(inst.original()), rule));
            }
            (answer.witness.map(Witness::Manipulation), answer.nodes)
        }
    };
    println!("nodes:        {nodes}");
    if let (Some(layout), Some(w)) = (layout, &witness) {
        let districts = match w {
            Witness::Recount(r) => r.0.clone(),
            Witness::Manipulation(s) => s.touched(),
        };
        print_graph_witness(layout, &districts)?;
    }
    if let (Some(path), Some(w)) = (witness_out, &witness) {
        write(path, &emit_witness(w, &file))?;
    }
    Ok(witness.is_some())
}

fn layout_path(out: &Path) -> PathBuf {
    out.with_extension("layout.json")
}

fn reduce(graph: &Path, target: Target, k: Option<usize>, out: &Path) -> Result<()> {
    let g = load_graph(graph)?;
    let (problem, layout) = match target {
        Target::PvRec => {
            let k = k.context("--k is required for pv-rec")?;
            let r = reduce_ds_to_pv_rec(&g, k)?;
            (Problem::Rec(r.problem), r.layout)
        }
        Target::PvMan => {
            let r = reduce_mcc_to_pv_man(&g)?;
            (Problem::Man(r.problem), r.layout)
        }
        Target::PdRec => {
            let r = reduce_mcc_to_pd_rec(&g)?;
            (Problem::Rec(r.problem), r.layout)
        }
    };
    let file = ElectionFile {
        candidates: layout.candidate_names(),
        districts: layout.district_names(),
        problem,
    };
    write(out, &emit_election(&file))?;
    let sidecar = layout_path(out);
    write(&sidecar, &(serde_json::to_string_pretty(&layout)? + "\n"))?;
    println!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}

fn verify(file: &Path, witness: &Path) -> Result<bool> {
    let file = load_election(file)?;
    let w = parse_witness(&read(witness)?, &file).with_context(|| format!("parsing {}", witness.display()))?;
    let verdict = match (&file.problem, &w) {
        (Problem::Rec(p), Witness::Recount(r)) => verify_recount(p, r)?,
        (Problem::Man(p), Witness::Manipulation(s)) => verify_manipulation(p, s)?,
        (Problem::Rec(_), _) => bail!("a recount problem needs a `recount` witness"),
        (Problem::Man(_), _) => bail!("a manipulation problem needs a `[manipulation]` witness"),
    };
    match verdict {
        Verdict::Valid => {
            println!("ok");
            Ok(true)
        }
        Verdict::Invalid(why) => {
            println!("fail: {why}");
            Ok(false)
        }
    }
}

fn oracle(kind: OracleKind, graph: &Path, k: Option<usize>) -> Result<bool> {
    let g = load_graph(graph)?;
    let found = match kind {
        OracleKind::Ds => dominating_set_exists(&g, k.context("--k is required for ds")?)?,
        OracleKind::Mcc => multicolored_clique_exists(&g)?,
    };
    match &found {
        Some(s) => {
            let vs: Vec<String> = s.iter().map(|v| (v + 1).to_string()).collect();
            println!("yes: {}", vs.join(" "));
        }
        None => println!("no"),
    }
    Ok(found.is_some())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            file,
            rule,
            budget_a,
            budget_d,
            defender_tie,
            search,
            witness_out,
            layout,
        } => {
            let mut f = load_election(&file)?;
            apply_overrides(&mut f, rule, budget_a, budget_d, defender_tie)?;
            let layout = layout
                .map(|p| -> Result<ReductionLayout> {
                    serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))
                })
                .transpose()?;
            solve(f, &search.options(), witness_out.as_deref(), layout.as_ref())
        }
        Command::Reduce { graph, target, k, out } => reduce(&graph, target, k, &out).map(|_| true),
        Command::Verify { file, witness } => verify(&file, &witness),
        Command::Bench { config, out, search } => {
            let cfg: BenchConfig = toml::from_str(&read(&config)?).with_context(|| format!("parsing {}", config.display()))?;
            let rows = run_config(&cfg, &search.options())?;
            match out {
                Some(p) => {
                    let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_csv(&rows, f)?;
                }
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Oracle { kind, graph, k } => oracle(kind, &graph, k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
