use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use flexnet::cuts::{is_ring_family, is_uncrossable, violated_cuts_for_augmentation, CutFamily, Uncrossability};
use flexnet::fgc::{ratio_bound, solve_fgc_with, stage_family, ExactBase, FgcOptions, StageMode, Strategy};
use flexnet::flex_st::solve_22;
use flexnet::format::{parse_instance, parse_solution, serialize_instance, serialize_solution};
use flexnet::graph::{cost_to_f64, format_cost, EdgeSet};
use flexnet::instances::{gen_paper, gen_random, Instance, PaperInstance, RandomParams};
use flexnet::lp::cutting_plane_solve;
use flexnet::oracle::opt_flex;
use flexnet::steiner::{solve_rooted_steiner, ExactPairSolver, Flex22Solver, PairSolver};
use flexnet::{check_feasible, Feasibility, FlexError, FlexGraph, Requirement, Scope, Solution};

#[derive(Parser)]
#[command(name = "flexnet", version, about = "Network design with safe and unsafe edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an approximation algorithm and print the solution.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Seed for the terminal order of the Steiner algorithm.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Root for terminal requirements (default: smallest terminal).
        #[arg(long)]
        root: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Exact optimum by branch-and-bound.
    Opt {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// LP relaxation value and fractional solution.
    Lp { instance: PathBuf },
    /// Generate a named or random instance.
    Gen {
        #[command(subcommand)]
        what: GenKind,
    },
    /// Uncrossable and ring verdicts for an augmentation family.
    Check {
        #[command(flatten)]
        source: Source,
        /// Current edge set F1; defaults to the drawn edges of a named instance.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Use the stage family with exactly this many safe edges instead of
        /// the deficient-cut family.
        #[arg(long)]
        stage: Option<u32>,
    },
    /// Compare the algorithm against the exact optimum and the LP bound.
    Ratio {
        instance: Option<PathBuf>,
        /// Random batch, `a..b` (half-open).
        #[arg(long, requires = "n")]
        seeds: Option<String>,
        #[command(flatten)]
        random: RandomArgs,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Skip the LP column.
        #[arg(long)]
        no_lp: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// A named construction: GAP, FIG-ST22, FIG-FGC32, FIG-FGC-P4ODD, FIG-FGC44.
    Named {
        name: String,
        /// `key=value`, e.g. `k=4`, `p=5`, `extended=1`.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the drawn edge set as a solution file.
        #[arg(long)]
        drawn: Option<PathBuf>,
    },
    /// A random instance feasible for its requirement.
    Random {
        #[command(flatten)]
        random: RandomArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Named construction (see `gen named`).
    #[arg(long)]
    paper: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, i64)>,
}

#[derive(Args, Clone)]
struct RandomArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// `spanning`, `pair:S:T` or `terminals:A,B,...`.
    #[arg(long, default_value = "spanning")]
    scope: String,
    #[arg(long, default_value_t = 0.5)]
    safe_prob: f64,
    #[arg(long, default_value_t = 1)]
    cost_lo: i64,
    #[arg(long, default_value_t = 9)]
    cost_hi: i64,
    #[arg(long, default_value_t = 1)]
    cost_den: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Pick by scope: (2,2) pair, spanning, or terminals.
    Auto,
    Flex22,
    Fgc,
    FgcStaged,
    Steiner,
    Exact,
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.to_ascii_lowercase(), v))
}

fn parse_scope(s: &str) -> anyhow::Result<Scope> {
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or("");
    match kind {
        "spanning" => Ok(Scope::Spanning),
        "pair" => {
            let a = parts.next().ok_or_else(|| anyhow!("pair scope needs pair:S:T"))?.parse()?;
            let b = parts.next().ok_or_else(|| anyhow!("pair scope needs pair:S:T"))?.parse()?;
            Ok(Scope::Pair(a, b))
        }
        "terminals" => {
            let list = parts.next().ok_or_else(|| anyhow!("terminal scope needs terminals:A,B,..."))?;
            Ok(Scope::Terminals(list.split(',').map(str::parse).collect::<Result<_, _>>()?))
        }
        other => bail!("unknown scope `{other}`"),
    }
}

impl RandomArgs {
    fn params(&self) -> anyhow::Result<RandomParams> {
        let n = self.n.ok_or_else(|| anyhow!("--n is required for random instances"))?;
        let m = self.m.unwrap_or(2 * n);
        let mut params = RandomParams::new(n, m, Requirement::new(self.p, self.q, parse_scope(&self.scope)?));
        params.safe_prob = self.safe_prob;
        params.cost_lo = self.cost_lo;
        params.cost_hi = self.cost_hi;
        params.cost_den = self.cost_den;
        Ok(params)
    }
}

/// Failure that maps to exit code 1 after its report is printed.
#[derive(Debug)]
struct Violated(String);

impl std::fmt::Display for Violated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violated {}

fn read_instance(path: &Path) -> anyhow::Result<(FlexGraph, Requirement)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(graph: &FlexGraph, req: &Requirement, algo: Algo, seed: u64, root: Option<usize>) -> anyhow::Result<(Solution, &'static str)> {
    let algo = match (algo, &req.scope) {
        (Algo::Auto, Scope::Pair(..)) if (req.p, req.q) == (2, 2) => Algo::Flex22,
        (Algo::Auto, Scope::Pair(..)) => Algo::Exact,
        (Algo::Auto, Scope::Spanning) => Algo::Fgc,
        (Algo::Auto, Scope::Terminals(_)) => Algo::Steiner,
        (a, _) => a,
    };
    Ok(match algo {
        Algo::Flex22 => {
            let Scope::Pair(s, t) = req.scope else {
                bail!("flex22 needs a pair requirement");
            };
            if (req.p, req.q) != (2, 2) {
                bail!("flex22 solves (2,2) only");
            }
            (solve_22(graph, s, t)?.solution, "flex22")
        }
        Algo::Fgc | Algo::FgcStaged => {
            if req.scope != Scope::Spanning {
                bail!("fgc needs a spanning requirement");
            }
            let options = FgcOptions {
                strategy: if algo == Algo::Fgc { Strategy::Auto } else { Strategy::Staged },
                mode: StageMode::Guaranteed,
            };
            let name = if algo == Algo::Fgc { "fgc" } else { "fgc-staged" };
            (solve_fgc_with(graph, req.p, req.q, options, &ExactBase)?.solution, name)
        }
        Algo::Steiner => {
            let Scope::Terminals(ts) = &req.scope else {
                bail!("steiner needs a terminal requirement");
            };
            let root = root.or_else(|| ts.iter().copied().min()).ok_or_else(|| anyhow!("no terminals"))?;
            let solver: Box<dyn PairSolver> = if (req.p, req.q) == (2, 2) {
                Box::new(Flex22Solver)
            } else {
                Box::new(ExactPairSolver { p: req.p, q: req.q })
            };
            (solve_rooted_steiner(graph, ts, root, seed, solver.as_ref())?.solution, "steiner")
        }
        Algo::Exact => (opt_flex(graph, req)?, "exact"),
        Algo::Auto => unreachable!(),
    })
}

fn proven_bound(req: &Requirement, algo: &str) -> Option<u32> {
    match (algo, &req.scope) {
        ("flex22", _) => Some(5),
        ("exact", _) => Some(1),
        ("fgc", Scope::Spanning) => ratio_bound(req.p, req.q, Strategy::Auto),
        ("fgc-staged", Scope::Spanning) => ratio_bound(req.p, req.q, Strategy::Staged),
        _ => None,
    }
}

struct RatioRow {
    label: String,
    alg: Solution,
    opt: Solution,
    lp: Option<f64>,
    bound: Option<u32>,
}

impl RatioRow {
    fn within_bound(&self) -> bool {
        self.bound.map_or(true, |b| self.alg.cost <= self.opt.cost * flexnet::Cost::from_integer(b.into()))
    }

    fn line(&self) -> String {
        let alg = cost_to_f64(&self.alg.cost);
        let opt = cost_to_f64(&self.opt.cost);
        let ratio = if opt > 0.0 { alg / opt } else { 1.0 };
        let mut s = format!(
            "{} alg={} opt={} alg/opt={:.4}",
            self.label,
            format_cost(&self.alg.cost),
            format_cost(&self.opt.cost),
            ratio
        );
        if let Some(lp) = self.lp {
            s.push_str(&format!(" lp={lp:.6} alg/lp={:.4}", if lp > 0.0 { alg / lp } else { 1.0 }));
        }
        if let Some(b) = self.bound {
            s.push_str(&format!(" bound={b} {}", if self.within_bound() { "ok" } else { "VIOLATED" }));
        }
        s
    }
}

fn ratio_row(label: String, graph: &FlexGraph, req: &Requirement, algo: Algo, with_lp: bool) -> anyhow::Result<RatioRow> {
    let (alg, name) = solve(graph, req, algo, 0, None)?;
    let opt = opt_flex(graph, req)?;
    let lp = if with_lp { Some(cutting_plane_solve(graph, req)?.value) } else { None };
    Ok(RatioRow {
        label,
        alg,
        opt,
        lp,
        bound: proven_bound(req, name),
    })
}

fn parse_seed_range(s: &str) -> anyhow::Result<std::ops::Range<u64>> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("expected a..b, got `{s}`"))?;
    let range = a.trim().parse()?..b.trim().parse()?;
    if range.is_empty() {
        bail!("empty seed range `{s}`");
    }
    Ok(range)
}

fn family_for_check(graph: &FlexGraph, req: &Requirement, f1: &EdgeSet, stage: Option<u32>) -> anyhow::Result<CutFamily> {
    Ok(match stage {
        Some(i) => stage_family(graph, f1, req.p, req.q.saturating_sub(1), i)?,
        None => violated_cuts_for_augmentation(graph, f1, req)?,
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve {
            instance,
            algo,
            seed,
            root,
            output,
        } => {
            let (graph, req) = read_instance(&instance)?;
            let (sol, name) = solve(&graph, &req, algo, seed, root)?;
            emit(&output, &format!("# algorithm {name}\n{}", serialize_solution(&sol)))
        }
        Command::Verify { instance, solution } => {
            let (graph, req) = read_instance(&instance)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let sol = parse_solution(&graph, &text)?;
            match check_feasible(&graph, &sol.edges, &req)? {
                Feasibility::Feasible => {
                    println!("feasible cost {}", format_cost(&sol.cost));
                    Ok(())
                }
                Feasibility::Infeasible { witness, safe, total } => {
                    println!("infeasible witness {witness} safe {safe} total {total}");
                    Err(Violated("solution violates the requirement".into()).into())
                }
            }
        }
        Command::Opt { instance, output } => {
            let (graph, req) = read_instance(&instance)?;
            let sol = opt_flex(&graph, &req)?;
            emit(&output, &format!("# algorithm exact\n{}", serialize_solution(&sol)))
        }
        Command::Lp { instance } => {
            let (graph, req) = read_instance(&instance)?;
            let lp = cutting_plane_solve(&graph, &req)?;
            println!("value {:.9}", lp.value);
            println!("rounds {}", lp.rounds);
            for (e, v) in lp.x.values.iter().enumerate() {
                if *v > 1e-9 {
                    println!("x {e} {v:.9}");
                }
            }
            Ok(())
        }
        Command::Gen { what } => match what {
            GenKind::Named {
                name,
                params,
                output,
                drawn,
            } => {
                let inst = gen_paper(PaperInstance::parse(&name, &params)?)?;
                let (_, old_to_new) = inst.graph.canonicalized();
                emit(&output, &serialize_instance(&inst.graph, &inst.requirement))?;
                if let Some(path) = drawn {
                    let d = inst.drawn.as_ref().ok_or_else(|| anyhow!("{name} has no drawn edge set"))?;
                    let (canon, _) = inst.graph.canonicalized();
                    let mapped: EdgeSet = d.iter().map(|&e| old_to_new[e]).collect();
                    emit(&Some(path), &serialize_solution(&Solution::new(&canon, mapped)))?;
                }
                Ok(())
            }
            GenKind::Random { random, seed, output } => {
                let inst = gen_random(&random.params()?, seed)?;
                emit(&output, &serialize_instance(&inst.graph, &inst.requirement))
            }
        },
        Command::Check { source, from, stage } => {
            let (graph, req, f1) = match (&source.instance, &source.paper) {
                (Some(path), _) => {
                    let (graph, req) = read_instance(path)?;
                    let from = from.as_ref().ok_or_else(|| anyhow!("--from is required with --instance"))?;
                    let text = fs::read_to_string(from).with_context(|| format!("reading {}", from.display()))?;
                    let f1 = parse_solution(&graph, &text)?.edges;
                    (graph, req, f1)
                }
                (None, Some(name)) => {
                    let Instance {
                        graph,
                        requirement,
                        drawn,
                        ..
                    } = gen_paper(PaperInstance::parse(name, &source.params)?)?;
                    let f1 = match &from {
                        Some(path) => parse_solution(&graph, &fs::read_to_string(path)?)?.edges,
                        None => drawn.ok_or_else(|| anyhow!("{name} has no drawn edge set; pass --from"))?,
                    };
                    (graph, requirement, f1)
                }
                (None, None) => unreachable!("clap enforces one source"),
            };
            let family = family_for_check(&graph, &req, &f1, stage)?;
            println!("family {} cuts {}", family.provenance, family.len());
            for s in family.iter() {
                println!("cut {s}");
            }
            println!("ring {:?}", is_ring_family(&family));
            match is_uncrossable(&family) {
                Uncrossability::Uncrossable => {
                    println!("uncrossable");
                    Ok(())
                }
                Uncrossability::CrossingPair(a, b) => {
                    println!("crossing {a} {b}");
                    Err(Violated("family is not uncrossable".into()).into())
                }
            }
        }
        Command::Ratio {
            instance,
            seeds,
            random,
            algo,
            no_lp,
        } => {
            let rows: Vec<RatioRow> = match (instance, seeds) {
                (Some(path), None) => {
                    let (graph, req) = read_instance(&path)?;
                    vec![ratio_row(path.display().to_string(), &graph, &req, algo, !no_lp)?]
                }
                (None, Some(range)) => {
                    let params = random.params()?;
                    let seeds: Vec<u64> = parse_seed_range(&range)?.collect();
                    seeds
                        .par_iter()
                        .map(|&seed| {
                            let inst = gen_random(&params, seed)?;
                            ratio_row(format!("seed={seed}"), &inst.graph, &inst.requirement, algo, !no_lp)
                        })
                        .collect::<anyhow::Result<_>>()?
                }
                _ => bail!("give either an instance file or --seeds"),
            };
            let mut bad = 0;
            for row in &rows {
                println!("{}", row.line());
                if !row.within_bound() {
                    bad += 1;
                }
            }
            if bad > 0 {
                return Err(Violated(format!("{bad} instance(s) exceed the proven ratio")).into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<Violated>().is_some() {
                eprintln!("flexnet: {e}");
                return ExitCode::from(1);
            }
            if let Some(FlexError::Infeasible { reason, cut }) = e.downcast_ref::<FlexError>() {
                match cut {
                    Some(c) => println!("infeasible witness {c}"),
                    None => println!("infeasible"),
                }
                eprintln!("flexnet: {reason}");
                return ExitCode::from(1);
            }
            eprintln!("flexnet: {e:#}");
            ExitCode::from(2)
        }
    }
}
