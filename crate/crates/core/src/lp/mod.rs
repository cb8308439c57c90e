//! LP relaxation for flexible connectivity.
//!
//! For every scope cut S the relaxation has one constraint per set B of at
//! most q unsafe edges, `x(δ(S) − B) ≥ p`, plus the capacitated constraint
//! `(p+q)·x(δ(S) ∩ safe) + p·x(δ(S) ∩ unsafe) ≥ p(p+q)`, with `0 ≤ x ≤ 1`.

mod simplex;

use std::collections::{BTreeMap, BTreeSet};

use crate::cuts::{violated_cuts_for_augmentation, weighted_min_cut};
use crate::error::{FlexError, Result};
use crate::graph::{
    check_feasible, cost_to_f64, scope_cuts, Cut, EdgeId, EdgeSet, FlexGraph, Requirement, Scope, VertexSet,
    DEFAULT_ENUMERATION_BOUND,
};
use simplex::DualSimplex;

pub const FEAS_TOL: f64 = 1e-7;
/// Largest q for which `separate_general` enumerates B sets.
pub const DEFAULT_Q_BOUND: u32 = 3;
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;
const MAX_PIVOTS_PER_ROUND: usize = 200_000;

/// One value per edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    pub values: Vec<f64>,
}

impl FractionalSolution {
    pub fn new(graph: &FlexGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(FlexError::structural(format!(
                "{} values for {} edges",
                values.len(),
                graph.edge_count()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= -FEAS_TOL && **v <= 1.0 + FEAS_TOL)) {
            return Err(FlexError::structural(format!("LP value {v} outside [0,1]")));
        }
        Ok(FractionalSolution { values })
    }

    pub fn uniform(graph: &FlexGraph, value: f64) -> Result<Self> {
        Self::new(graph, vec![value; graph.edge_count()])
    }

    /// Indicator vector of an edge set.
    pub fn indicator(graph: &FlexGraph, f: &EdgeSet) -> Result<Self> {
        graph.check_edges(f)?;
        Ok(FractionalSolution {
            values: (0..graph.edge_count()).map(|e| if f.contains(&e) { 1.0 } else { 0.0 }).collect(),
        })
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e]
    }

    pub fn cost(&self, graph: &FlexGraph) -> f64 {
        graph.edges().iter().zip(&self.values).map(|(r, x)| cost_to_f64(&r.cost) * x).sum()
    }

    /// x(δ(S)) restricted to edges accepted by `keep`.
    fn mass(&self, graph: &FlexGraph, side: VertexSet, mut keep: impl FnMut(EdgeId) -> bool) -> f64 {
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(e, r)| r.crosses(side) && keep(*e))
            .map(|(e, _)| self.values[e])
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// `x(δ(S) − removed) ≥ p`.
    BCut { removed: EdgeSet },
    /// `(p+q)·x(δ(S) ∩ safe) + p·x(δ(S) ∩ unsafe) ≥ p(p+q)`.
    Capacitated,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LpConstraint {
    pub kind: ConstraintKind,
    pub cut: Cut,
    pub p: u32,
    pub q: u32,
}

impl LpConstraint {
    pub fn coefficients(&self, graph: &FlexGraph) -> Vec<(EdgeId, f64)> {
        let (p, q) = (self.p as f64, self.q as f64);
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.crosses(self.cut.members))
            .filter_map(|(e, r)| match &self.kind {
                ConstraintKind::BCut { removed } => (!removed.contains(&e)).then_some((e, 1.0)),
                ConstraintKind::Capacitated => Some((e, if r.is_safe() { p + q } else { p })),
            })
            .collect()
    }

    pub fn rhs(&self) -> f64 {
        let (p, q) = (self.p as f64, self.q as f64);
        match self.kind {
            ConstraintKind::BCut { .. } => p,
            ConstraintKind::Capacitated => p * (p + q),
        }
    }

    pub fn lhs(&self, graph: &FlexGraph, x: &FractionalSolution) -> f64 {
        self.coefficients(graph).iter().map(|&(e, a)| a * x.get(e)).sum()
    }

    /// Positive when violated.
    pub fn violation(&self, graph: &FlexGraph, x: &FractionalSolution) -> f64 {
        self.rhs() - self.lhs(graph, x)
    }

    pub fn is_violated(&self, graph: &FlexGraph, x: &FractionalSolution) -> bool {
        self.violation(graph, x) > FEAS_TOL
    }
}

fn check_x(graph: &FlexGraph, x: &FractionalSolution) -> Result<()> {
    FractionalSolution::new(graph, x.values.clone()).map(|_| ())
}

fn capacitated_weights(graph: &FlexGraph, req: &Requirement, x: &FractionalSolution) -> Vec<f64> {
    let (p, q) = (req.p as f64, req.q as f64);
    graph
        .edges()
        .iter()
        .zip(&x.values)
        .map(|(r, v)| v.max(0.0) * if r.is_safe() { p + q } else { p })
        .collect()
}

fn capacitated_violation(graph: &FlexGraph, req: &Requirement, x: &FractionalSolution) -> Result<Option<LpConstraint>> {
    let (value, cut) = weighted_min_cut(graph, &capacitated_weights(graph, req, x), &req.scope)?;
    let rhs = (req.p * (req.p + req.q)) as f64;
    Ok((value < rhs - FEAS_TOL).then(|| LpConstraint {
        kind: ConstraintKind::Capacitated,
        cut,
        p: req.p,
        q: req.q,
    }))
}

/// Calls `visit` with every B of size `min(q, #candidates)` drawn from
/// unsafe edges of positive value, treating parallel edges with equal value
/// as interchangeable. Stops early when `visit` returns true.
fn for_each_maximal_b(
    graph: &FlexGraph,
    q: u32,
    x: &FractionalSolution,
    mut visit: impl FnMut(&[EdgeId]) -> Result<bool>,
) -> Result<bool> {
    let mut classes: BTreeMap<(usize, usize, u64), Vec<EdgeId>> = BTreeMap::new();
    for (e, r) in graph.edges().iter().enumerate() {
        if !r.is_safe() && x.get(e) > 0.0 {
            classes.entry((r.u.min(r.v), r.u.max(r.v), x.get(e).to_bits())).or_default().push(e);
        }
    }
    let classes: Vec<Vec<EdgeId>> = classes.into_values().collect();
    let available: usize = classes.iter().map(Vec::len).sum();
    let size = (q as usize).min(available);
    // suffix capacities prune impossible count vectors
    let mut suffix = vec![0usize; classes.len() + 1];
    for i in (0..classes.len()).rev() {
        suffix[i] = suffix[i + 1] + classes[i].len();
    }
    let mut chosen: Vec<EdgeId> = Vec::with_capacity(size);
    fn rec(
        i: usize,
        left: usize,
        classes: &[Vec<EdgeId>],
        suffix: &[usize],
        chosen: &mut Vec<EdgeId>,
        visit: &mut dyn FnMut(&[EdgeId]) -> Result<bool>,
    ) -> Result<bool> {
        if left == 0 {
            return visit(chosen);
        }
        if i == classes.len() || suffix[i] < left {
            return Ok(false);
        }
        let most = left.min(classes[i].len());
        for take in 0..=most {
            chosen.extend_from_slice(&classes[i][..take]);
            let stop = rec(i + 1, left - take, classes, suffix, chosen, visit)?;
            chosen.truncate(chosen.len() - take);
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    rec(0, size, &classes, &suffix, &mut chosen, &mut visit)
}

/// Exact separation by enumerating B sets, checking each with a min cut.
pub fn separate_general(graph: &FlexGraph, req: &Requirement, x: &FractionalSolution) -> Result<Option<LpConstraint>> {
    separate_general_bounded(graph, req, x, DEFAULT_Q_BOUND)
}

pub fn separate_general_bounded(
    graph: &FlexGraph,
    req: &Requirement,
    x: &FractionalSolution,
    q_bound: u32,
) -> Result<Option<LpConstraint>> {
    check_x(graph, x)?;
    if req.q > q_bound {
        return Err(FlexError::Capacity {
            what: "q for B-set enumeration",
            bound: q_bound as usize,
            actual: req.q as usize,
        });
    }
    if let Some(c) = capacitated_violation(graph, req, x)? {
        return Ok(Some(c));
    }
    // removing more edges only lowers x(δ(S) − B), so maximal B suffice
    let mut found = None;
    let mut weights = x.values.iter().map(|v| v.max(0.0)).collect::<Vec<_>>();
    for_each_maximal_b(graph, req.q, x, |b| {
        for &e in b {
            weights[e] = 0.0;
        }
        let (value, cut) = weighted_min_cut(graph, &weights, &req.scope)?;
        for &e in b {
            weights[e] = x.get(e).max(0.0);
        }
        if value < req.p as f64 - FEAS_TOL {
            let removed = b.iter().copied().filter(|&e| graph.edge(e).crosses(cut.members)).collect();
            found = Some(LpConstraint {
                kind: ConstraintKind::BCut { removed },
                cut,
                p: req.p,
                q: req.q,
            });
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

/// For a fixed cut, the most damaging B: the q unsafe crossing edges of
/// largest value, ties to the lower id.
pub fn prefix_b(graph: &FlexGraph, q: u32, x: &FractionalSolution, side: VertexSet) -> EdgeSet {
    let mut unsafe_edges: Vec<EdgeId> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_safe() && r.crosses(side))
        .map(|(e, _)| e)
        .collect();
    unsafe_edges.sort_by(|&a, &b| x.get(b).total_cmp(&x.get(a)).then(a.cmp(&b)));
    unsafe_edges.into_iter().take(q as usize).collect()
}

fn prefix_violation(
    graph: &FlexGraph,
    req: &Requirement,
    x: &FractionalSolution,
    side: VertexSet,
) -> Result<Option<LpConstraint>> {
    let removed = prefix_b(graph, req.q, x, side);
    let lhs = x.mass(graph, side, |e| !removed.contains(&e));
    if lhs < req.p as f64 - FEAS_TOL {
        return Ok(Some(LpConstraint {
            kind: ConstraintKind::BCut { removed },
            cut: Cut::new(side, req.scope.anchor(), graph.vertex_count())?,
            p: req.p,
            q: req.q,
        }));
    }
    Ok(None)
}

/// Separation for spanning requirements. After the capacitated check, only
/// cuts of small x-weight can carry a violated B-cut constraint; each is
/// tested with its prefix B.
pub fn separate_fgc(graph: &FlexGraph, req: &Requirement, x: &FractionalSolution) -> Result<Option<LpConstraint>> {
    check_x(graph, x)?;
    if req.scope != Scope::Spanning {
        return Err(FlexError::precondition("separate_fgc needs a spanning requirement", None));
    }
    let cap = capacitated_weights(graph, req, x);
    let (lambda, cut) = weighted_min_cut(graph, &cap, &req.scope)?;
    let rhs = (req.p * (req.p + req.q)) as f64;
    if lambda < rhs - FEAS_TOL {
        return Ok(Some(LpConstraint {
            kind: ConstraintKind::Capacitated,
            cut,
            p: req.p,
            q: req.q,
        }));
    }
    // A violated B-cut carries capacitated weight below p(p+q) from its
    // safe part, p·p from its unsafe part outside B and p·q from B, so it is
    // within twice the capacitated min cut.
    let window = 2.0 * lambda + FEAS_TOL;
    for side in scope_cuts(graph, &req.scope, DEFAULT_ENUMERATION_BOUND)? {
        let weight: f64 = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.crosses(side))
            .map(|(e, _)| cap[e])
            .sum();
        if weight > window {
            continue;
        }
        if let Some(c) = prefix_violation(graph, req, x, side)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Exact separation for any scope and any q by scanning all canonical cuts.
/// Returns the most violated capacitated constraint if there is one, and
/// otherwise the most violated prefix-B constraint.
pub fn separate_by_cut_scan(
    graph: &FlexGraph,
    req: &Requirement,
    x: &FractionalSolution,
) -> Result<Option<LpConstraint>> {
    check_x(graph, x)?;
    let cuts = scope_cuts(graph, &req.scope, DEFAULT_ENUMERATION_BOUND)?;
    let n = graph.vertex_count();
    let anchor = req.scope.anchor();
    let (p, q) = (req.p as f64, req.q as f64);
    let mut worst: Option<(f64, VertexSet)> = None;
    for &side in &cuts {
        let lhs: f64 = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.crosses(side))
            .map(|(e, r)| x.get(e) * if r.is_safe() { p + q } else { p })
            .sum();
        let gap = p * (p + q) - lhs;
        if gap > FEAS_TOL && worst.map_or(true, |(w, _)| gap > w) {
            worst = Some((gap, side));
        }
    }
    if let Some((_, side)) = worst {
        return Ok(Some(LpConstraint {
            kind: ConstraintKind::Capacitated,
            cut: Cut::new(side, anchor, n)?,
            p: req.p,
            q: req.q,
        }));
    }
    let mut worst: Option<(f64, LpConstraint)> = None;
    for &side in &cuts {
        if let Some(c) = prefix_violation(graph, req, x, side)? {
            let gap = c.violation(graph, x);
            if worst.as_ref().map_or(true, |(w, _)| gap > *w) {
                worst = Some((gap, c));
            }
        }
    }
    Ok(worst.map(|(_, c)| c))
}

/// The oracle the cutting-plane loop uses for `req`.
pub fn separate(graph: &FlexGraph, req: &Requirement, x: &FractionalSolution) -> Result<Option<LpConstraint>> {
    if req.scope == Scope::Spanning {
        separate_fgc(graph, req, x)
    } else if req.q <= DEFAULT_Q_BOUND {
        separate_general(graph, req, x)
    } else {
        separate_by_cut_scan(graph, req, x)
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    /// Objective of the final dual basis; matches `value` up to round-off.
    pub dual_value: f64,
    pub x: FractionalSolution,
    pub rounds: usize,
    pub pool: Vec<LpConstraint>,
}

pub fn cutting_plane_solve(graph: &FlexGraph, req: &Requirement) -> Result<LpSolution> {
    cutting_plane_solve_with(graph, req, DEFAULT_MAX_ROUNDS)
}

pub fn cutting_plane_solve_with(graph: &FlexGraph, req: &Requirement, max_rounds: usize) -> Result<LpSolution> {
    if let Some(w) = check_feasible(graph, &graph.all_edges(), req)?.witness() {
        return Err(FlexError::infeasible("even the full edge set is infeasible", Some(w.members)));
    }
    let costs: Vec<f64> = graph.edges().iter().map(|r| cost_to_f64(&r.cost)).collect();
    let mut lp = DualSimplex::new(costs.clone());
    let mut pool: Vec<LpConstraint> = Vec::new();
    let mut seen: BTreeSet<LpConstraint> = BTreeSet::new();
    for round in 0..max_rounds {
        lp.solve(MAX_PIVOTS_PER_ROUND)?;
        let x = FractionalSolution { values: lp.primal() };
        match separate(graph, req, &x)? {
            None => {
                let value = costs.iter().zip(&x.values).map(|(c, v)| c * v).sum();
                return Ok(LpSolution {
                    value,
                    dual_value: lp.objective(),
                    x,
                    rounds: round + 1,
                    pool,
                });
            }
            Some(c) => {
                if !seen.insert(c.clone()) {
                    return Err(FlexError::Internal(format!(
                        "separation returned pooled constraint on cut {} again",
                        c.cut
                    )));
                }
                lp.add_constraint(&c.coefficients(graph), c.rhs());
                pool.push(c);
            }
        }
    }
    Err(FlexError::NonConvergence { iterations: max_rounds })
}

/// Checks that every cut deficient for F1 carries x-mass at least 1 outside
/// F1. Returns the first cut where it does not.
pub fn check_augmentation_validity(
    graph: &FlexGraph,
    req: &Requirement,
    x: &FractionalSolution,
    f1: &EdgeSet,
) -> Result<Option<VertexSet>> {
    if let Some(c) = separate_by_cut_scan(graph, req, x)? {
        return Err(FlexError::precondition("x is not LP-feasible", Some(c.cut.members)));
    }
    let family = violated_cuts_for_augmentation(graph, f1, req)?;
    for side in family.iter() {
        if x.mass(graph, side, |e| !f1.contains(&e)) < 1.0 - FEAS_TOL {
            return Ok(Some(side));
        }
    }
    Ok(None)
}
