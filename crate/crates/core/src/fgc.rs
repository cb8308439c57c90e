//! Spanning (p,q) solvers: an exact (p,0) base, one-shot augmentation by a
//! single uncrossable family, and staged augmentation that splits the
//! deficient cuts by their number of safe edges.

use crate::cover::{wgmv_cover, CoverOutcome};
use crate::cuts::{cuts_by_counts, is_uncrossable, violated_cuts_for_augmentation, CutFamily, Uncrossability};
use crate::error::{FlexError, Result};
use crate::graph::{check_feasible, scope_cuts, EdgeSet, FlexGraph, Requirement, Scope, Solution, DEFAULT_ENUMERATION_BOUND};
use crate::search::{self, Problem, NEVER};

/// Produces a spanning edge set where every cut has at least `p` edges.
pub trait BaseSolver {
    fn solve(&self, graph: &FlexGraph, p: u32) -> Result<Solution>;
}

/// Exact minimum-cost p-edge-connected spanning subgraph by branch-and-bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactBase;

impl BaseSolver for ExactBase {
    fn solve(&self, graph: &FlexGraph, p: u32) -> Result<Solution> {
        base_p0(graph, p)
    }
}

pub fn base_p0(graph: &FlexGraph, p: u32) -> Result<Solution> {
    let req = Requirement::spanning(p, 0);
    let all = graph.all_edges();
    if let Some(w) = check_feasible(graph, &all, &req)?.witness() {
        return Err(FlexError::infeasible(
            format!("graph is not {p}-edge-connected"),
            Some(w.members),
        ));
    }
    if p == 0 {
        return Ok(Solution::empty());
    }
    let cuts = scope_cuts(graph, &Scope::Spanning, DEFAULT_ENUMERATION_BOUND)?;
    let problem = Problem::new(graph, all.iter().copied().collect(), cuts.into_iter().map(|s| (s, NEVER, p)))?;
    let opt = search::cut_branching(&problem)
        .ok_or_else(|| FlexError::Internal("connected graph without a base".into()))?;
    Ok(Solution::new(graph, problem.selection(opt.mask).into_iter().collect()))
}

/// One augmentation round and what it covered.
#[derive(Clone, Debug)]
pub struct AugmentStep {
    pub solution: Solution,
    pub family: CutFamily,
    pub cover: CoverOutcome,
}

fn candidates_outside(graph: &FlexGraph, h: &EdgeSet) -> EdgeSet {
    graph.all_edges().difference(h).copied().collect()
}

/// Raises a (p,q)-feasible `f1` to (p,q+1) by covering all deficient cuts at
/// once. Only valid for p = 2 or q = 0, where that family is uncrossable.
pub fn augment_one_level(graph: &FlexGraph, f1: &Solution, p: u32, q: u32) -> Result<AugmentStep> {
    if !(p == 2 || q == 0) {
        return Err(FlexError::Unsupported {
            p,
            q,
            reason: "a single augmentation family is uncrossable only for p = 2 or q = 0".into(),
        });
    }
    let target = Requirement::spanning(p, q + 1);
    let family = violated_cuts_for_augmentation(graph, &f1.edges, &target)?;
    if let Uncrossability::CrossingPair(a, b) = is_uncrossable(&family) {
        return Err(FlexError::Internal(format!(
            "augmentation family ({p},{q}) -> ({p},{}) crosses at {a} and {b}",
            q + 1
        )));
    }
    let cover = wgmv_cover(graph, &candidates_outside(graph, &f1.edges), &family)?;
    let solution = f1.union(graph, &cover.solution.edges);
    if let Some(w) = check_feasible(graph, &solution.edges, &target)?.witness() {
        return Err(FlexError::Internal(format!("augmented set misses cut {}", w.members)));
    }
    Ok(AugmentStep {
        solution,
        family,
        cover,
    })
}

/// Whether stage families are known to be uncrossable for (p,q) → (p,q+1).
pub fn staged_is_guaranteed(p: u32, q: u32) -> bool {
    q <= 2 || (q == 3 && p % 2 == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StageMode {
    /// Refuse (p,q) outside the range where stages are known to uncross.
    #[default]
    Guaranteed,
    /// Run anyway and stop at the first crossing pair.
    BestEffort,
}

#[derive(Clone, Debug)]
pub struct StageRecord {
    pub stage: u32,
    pub family: CutFamily,
    pub cover: CoverOutcome,
}

#[derive(Clone, Debug)]
pub struct StagedOutcome {
    pub solution: Solution,
    pub stages: Vec<StageRecord>,
}

/// Cuts crossed by exactly p+q edges of `h`, `i` of them safe.
pub fn stage_family(graph: &FlexGraph, h: &EdgeSet, p: u32, q: u32, i: u32) -> Result<CutFamily> {
    let total = (p + q) as usize;
    cuts_by_counts(
        graph,
        h,
        &Scope::Spanning,
        format!("augmentation ({p},{q}) -> ({p},{}) stage {i}", q + 1),
        |safe, t| t == total && safe == i as usize,
    )
}

/// Raises a (p,q)-feasible `f` to (p,q+1) in p stages; stage i covers the
/// cuts with exactly p+q edges of which exactly i are safe, recomputed from
/// the current edge set.
pub fn staged_augment(graph: &FlexGraph, f: &Solution, p: u32, q: u32, mode: StageMode) -> Result<StagedOutcome> {
    let guaranteed = staged_is_guaranteed(p, q);
    if !guaranteed && mode == StageMode::Guaranteed {
        return Err(FlexError::Unsupported {
            p,
            q,
            reason: "stage families may cross for q >= 4, or q = 3 with odd p".into(),
        });
    }
    let current = Requirement::spanning(p, q);
    if let Some(w) = check_feasible(graph, &f.edges, &current)?.witness() {
        return Err(FlexError::precondition(
            format!("edge set is not ({p},{q})-feasible"),
            Some(w.members),
        ));
    }
    let mut h = f.clone();
    let mut stages = Vec::with_capacity(p as usize);
    for i in 0..p {
        // every tight cut must already carry at least i safe edges
        for below in 0..i {
            let leftover = stage_family(graph, &h.edges, p, q, below)?;
            if let Some(&s) = leftover.cuts().first() {
                return Err(FlexError::Internal(format!(
                    "stage {i} starts with tight cut {s} carrying only {below} safe edges"
                )));
            }
        }
        let family = stage_family(graph, &h.edges, p, q, i)?;
        if let Uncrossability::CrossingPair(a, b) = is_uncrossable(&family) {
            return Err(if guaranteed {
                FlexError::Internal(format!("stage {i} family crosses at {a} and {b}"))
            } else {
                FlexError::NotUncrossable { a, b }
            });
        }
        let cover = wgmv_cover(graph, &candidates_outside(graph, &h.edges), &family)?;
        h = h.union(graph, &cover.solution.edges);
        stages.push(StageRecord { stage: i, family, cover });
    }
    if let Some(w) = check_feasible(graph, &h.edges, &Requirement::spanning(p, q + 1))?.witness() {
        return Err(FlexError::Internal(format!("staged output misses cut {}", w.members)));
    }
    Ok(StagedOutcome { solution: h, stages })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// p = 2: one uncrossable family per level. Otherwise one family from
    /// (p,0) to (p,1), then stages.
    #[default]
    Auto,
    /// One family from (p,0) to (p,1), then stages for every later level.
    Staged,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FgcOptions {
    pub strategy: Strategy,
    pub mode: StageMode,
}

/// Is (p,q) inside the range with a proven guarantee?
pub fn supported(p: u32, q: u32) -> bool {
    p >= 1 && (p == 2 || q <= 3 || (q == 4 && p % 2 == 0))
}

/// Proven approximation factor of the pipeline with an exact base.
pub fn ratio_bound(p: u32, q: u32, strategy: Strategy) -> Option<u32> {
    if !supported(p, q) {
        return None;
    }
    if q == 0 {
        return Some(1);
    }
    if p == 2 && strategy == Strategy::Auto {
        return Some(2 * q + 2);
    }
    match q {
        1 => Some(4),
        2 => Some(2 * p + 4),
        3 => Some(4 * p + 4),
        4 => Some(6 * p + 4),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct LevelRecord {
    /// The level this round started from; it ends at `from_q + 1`.
    pub from_q: u32,
    pub solution: Solution,
    pub families: Vec<CutFamily>,
}

#[derive(Clone, Debug)]
pub struct FgcOutcome {
    pub solution: Solution,
    pub base: Solution,
    pub levels: Vec<LevelRecord>,
}

pub fn solve_fgc(graph: &FlexGraph, p: u32, q: u32) -> Result<FgcOutcome> {
    solve_fgc_with(graph, p, q, FgcOptions::default(), &ExactBase)
}

pub fn solve_fgc_with(
    graph: &FlexGraph,
    p: u32,
    q: u32,
    options: FgcOptions,
    base_solver: &dyn BaseSolver,
) -> Result<FgcOutcome> {
    if p == 0 {
        return Err(FlexError::Unsupported {
            p,
            q,
            reason: "p must be at least 1".into(),
        });
    }
    if !supported(p, q) && options.mode == StageMode::Guaranteed {
        return Err(FlexError::Unsupported {
            p,
            q,
            reason: "no guarantee outside p = 2, q <= 3, or q = 4 with even p".into(),
        });
    }
    if let Some(w) = check_feasible(graph, &graph.all_edges(), &Requirement::spanning(p, q))?.witness() {
        return Err(FlexError::infeasible(
            format!("no ({p},{q}) spanning solution exists"),
            Some(w.members),
        ));
    }
    let base = base_solver.solve(graph, p)?;
    let mut h = base.clone();
    let mut levels = Vec::new();
    for level in 0..q {
        let single = level == 0 || (p == 2 && options.strategy == Strategy::Auto);
        let record = if single {
            let step = augment_one_level(graph, &h, p, level)?;
            LevelRecord {
                from_q: level,
                solution: step.solution,
                families: vec![step.family],
            }
        } else {
            let staged = staged_augment(graph, &h, p, level, options.mode)?;
            LevelRecord {
                from_q: level,
                solution: staged.solution,
                families: staged.stages.into_iter().map(|s| s.family).collect(),
            }
        };
        h = record.solution.clone();
        levels.push(record);
    }
    if let Some(w) = check_feasible(graph, &h.edges, &Requirement::spanning(p, q))?.witness() {
        return Err(FlexError::Internal(format!("({p},{q}) output misses cut {}", w.members)));
    }
    Ok(FgcOutcome {
        solution: h,
        base,
        levels,
    })
}
