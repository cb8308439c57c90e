//! Covering cut families with edges: the primal-dual 2-approximation for
//! uncrossable families and an exact cover for ring families.

use std::collections::BTreeMap;

use num::Zero;

use crate::cuts::{is_ring_family, is_uncrossable, minimal_members, CutFamily, RingVerdict, Uncrossability};
use crate::error::{FlexError, Result};
use crate::graph::{cut_counts, Cost, EdgeId, EdgeSet, FlexGraph, Solution, VertexSet};
use crate::search::{self, Problem, NEVER};

/// One dual-growth step.
#[derive(Clone, Debug)]
pub struct GrowthEvent {
    /// Total growth time after this step.
    pub time: Cost,
    /// Minimal violated sets whose duals were raised.
    pub active: Vec<VertexSet>,
    /// Edges that went tight, in id order.
    pub added: Vec<EdgeId>,
    /// Every candidate edge had load ≤ cost after the step.
    pub dual_feasible: bool,
}

#[derive(Clone, Debug)]
pub struct CoverOutcome {
    pub solution: Solution,
    pub duals: BTreeMap<VertexSet, Cost>,
    pub dual_total: Cost,
    pub events: Vec<GrowthEvent>,
    /// Edges in the order they went tight, before reverse delete.
    pub picked: Vec<EdgeId>,
}

/// First family member not crossed by `edges`.
pub fn first_uncovered(graph: &FlexGraph, edges: &EdgeSet, family: &CutFamily) -> Option<VertexSet> {
    let ev: Vec<EdgeId> = edges.iter().copied().collect();
    family.iter().find(|&s| cut_counts(graph, &ev, s).1 == 0)
}

fn check_inputs(graph: &FlexGraph, candidates: &EdgeSet, family: &CutFamily) -> Result<()> {
    graph.check_edges(candidates)?;
    if family.vertex_count() != graph.vertex_count() {
        return Err(FlexError::structural("family and graph disagree on vertex count"));
    }
    if let Some(s) = first_uncovered(graph, candidates, family) {
        return Err(FlexError::infeasible("no candidate edge crosses the cut", Some(s)));
    }
    Ok(())
}

/// Primal-dual cover of an uncrossable family followed by reverse delete.
///
/// For a symmetric family both sides of each cut take part in the growth.
pub fn wgmv_cover(graph: &FlexGraph, candidates: &EdgeSet, family: &CutFamily) -> Result<CoverOutcome> {
    if let Uncrossability::CrossingPair(a, b) = is_uncrossable(family) {
        return Err(FlexError::NotUncrossable { a, b });
    }
    check_inputs(graph, candidates, family)?;

    let sets = family.expanded();
    let cand: Vec<EdgeId> = candidates.iter().copied().collect();
    let mut load: BTreeMap<EdgeId, Cost> = cand.iter().map(|&e| (e, Cost::zero())).collect();
    let mut duals: BTreeMap<VertexSet, Cost> = BTreeMap::new();
    let mut picked: Vec<EdgeId> = Vec::new();
    let mut events = Vec::new();
    let mut time = Cost::zero();

    loop {
        let active = minimal_members(sets.iter().copied().filter(|&s| cut_counts(graph, &picked, s).1 == 0));
        if active.is_empty() {
            break;
        }
        // crossing multiplicity of each unpicked candidate against the active sets
        let mut rate: Vec<(EdgeId, i128)> = Vec::new();
        for &e in &cand {
            if picked.contains(&e) {
                continue;
            }
            let rec = graph.edge(e);
            let r = active.iter().filter(|&&s| rec.crosses(s)).count() as i128;
            if r > 0 {
                rate.push((e, r));
            }
        }
        let step = rate
            .iter()
            .map(|&(e, r)| (graph.edge(e).cost - load[&e]) / Cost::from_integer(r))
            .min()
            .ok_or_else(|| FlexError::Internal("active set with no crossing candidate".into()))?;
        time += step;
        for &s in &active {
            *duals.entry(s).or_insert_with(Cost::zero) += step;
        }
        let mut added = Vec::new();
        for &(e, r) in &rate {
            let l = load.get_mut(&e).expect("candidate");
            *l += step * Cost::from_integer(r);
            if *l == graph.edge(e).cost {
                added.push(e);
            }
        }
        let dual_feasible = cand.iter().all(|e| load[e] <= graph.edge(*e).cost);
        picked.extend(added.iter().copied());
        events.push(GrowthEvent {
            time,
            active,
            added,
            dual_feasible,
        });
        if !dual_feasible {
            return Err(FlexError::Internal("dual packing exceeded an edge cost".into()));
        }
    }

    let mut keep: EdgeSet = picked.iter().copied().collect();
    for &e in picked.iter().rev() {
        keep.remove(&e);
        if first_uncovered(graph, &keep, family).is_some() {
            keep.insert(e);
        }
    }
    let dual_total = duals.values().fold(Cost::zero(), |a, b| a + b);
    Ok(CoverOutcome {
        solution: Solution::new(graph, keep),
        duals,
        dual_total,
        events,
        picked,
    })
}

/// Minimum-cost candidate subset covering every member of a ring family.
pub fn ring_cover_exact(graph: &FlexGraph, candidates: &EdgeSet, family: &CutFamily) -> Result<Solution> {
    match is_ring_family(family) {
        RingVerdict::Ring => {}
        RingVerdict::ClosureViolation(a, b) => {
            return Err(FlexError::precondition(
                format!("not a ring family: {a} and {b} lack union or intersection"),
                Some(a),
            ))
        }
        RingVerdict::TwoMinimal(a, b) => {
            return Err(FlexError::precondition(
                format!("not a ring family: {a} and {b} are both minimal"),
                Some(a),
            ))
        }
    }
    exact_cover(graph, candidates, family)
}

/// Exact cover by cut branching; no structural precondition on the family.
pub(crate) fn exact_cover(graph: &FlexGraph, candidates: &EdgeSet, family: &CutFamily) -> Result<Solution> {
    check_inputs(graph, candidates, family)?;
    if family.is_empty() {
        return Ok(Solution::empty());
    }
    let problem = Problem::new(
        graph,
        candidates.iter().copied().collect(),
        family.iter().map(|s| (s, NEVER, 1)),
    )?;
    let opt = search::cut_branching(&problem)
        .ok_or_else(|| FlexError::Internal("coverable family without a cover".into()))?;
    let edges: EdgeSet = problem.selection(opt.mask).into_iter().collect();
    Ok(Solution::new(graph, edges))
}
