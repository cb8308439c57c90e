//! Exact optima by branch-and-bound, for checking approximation ratios.

use crate::cover::first_uncovered;
use crate::cuts::CutFamily;
use crate::error::{FlexError, Result};
use crate::graph::{check_feasible, scope_cuts, EdgeSet, FlexGraph, Requirement, Solution, DEFAULT_ENUMERATION_BOUND};
use crate::search::{self, Problem, NEVER};

pub const DEFAULT_EDGE_BOUND: usize = 26;
pub const DEFAULT_CANDIDATE_BOUND: usize = 40;

fn edge_bound(what: &'static str, actual: usize, bound: usize) -> Result<()> {
    if actual > bound {
        Err(FlexError::Capacity { what, bound, actual })
    } else {
        Ok(())
    }
}

/// Minimum-cost edge set meeting `req`.
pub fn opt_flex(graph: &FlexGraph, req: &Requirement) -> Result<Solution> {
    opt_flex_bounded(graph, req, DEFAULT_EDGE_BOUND)
}

pub fn opt_flex_bounded(graph: &FlexGraph, req: &Requirement, bound: usize) -> Result<Solution> {
    edge_bound("edge count for the exact oracle", graph.edge_count(), bound)?;
    let all = graph.all_edges();
    if let Some(w) = check_feasible(graph, &all, req)?.witness() {
        return Err(FlexError::infeasible("even the full edge set is infeasible", Some(w.members)));
    }
    let cuts = scope_cuts(graph, &req.scope, DEFAULT_ENUMERATION_BOUND)?;
    let problem = Problem::new(
        graph,
        all.iter().copied().collect(),
        cuts.into_iter().map(|s| (s, req.p, req.p + req.q)),
    )?;
    let opt = search::include_exclude(&problem)
        .ok_or_else(|| FlexError::Internal("feasible instance without an optimum".into()))?;
    let sol = Solution::new(graph, problem.selection(opt.mask).into_iter().collect());
    debug_assert_eq!(sol.cost, opt.cost);
    if !check_feasible(graph, &sol.edges, req)?.is_feasible() {
        return Err(FlexError::Internal("exact search returned an infeasible set".into()));
    }
    Ok(sol)
}

/// Minimum-cost subset of `candidates` crossing every member of `family`.
pub fn opt_cover(graph: &FlexGraph, candidates: &EdgeSet, family: &CutFamily) -> Result<Solution> {
    opt_cover_bounded(graph, candidates, family, DEFAULT_CANDIDATE_BOUND)
}

pub fn opt_cover_bounded(
    graph: &FlexGraph,
    candidates: &EdgeSet,
    family: &CutFamily,
    bound: usize,
) -> Result<Solution> {
    graph.check_edges(candidates)?;
    edge_bound("candidate count for the exact oracle", candidates.len(), bound)?;
    if let Some(s) = first_uncovered(graph, candidates, family) {
        return Err(FlexError::infeasible("no candidate edge crosses the cut", Some(s)));
    }
    if family.is_empty() {
        return Ok(Solution::empty());
    }
    let problem = Problem::new(
        graph,
        candidates.iter().copied().collect(),
        family.iter().map(|s| (s, NEVER, 1)),
    )?;
    let opt = search::include_exclude(&problem)
        .ok_or_else(|| FlexError::Internal("coverable family without a cover".into()))?;
    Ok(Solution::new(graph, problem.selection(opt.mask).into_iter().collect()))
}
