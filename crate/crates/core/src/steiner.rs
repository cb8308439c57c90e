//! Rooted Flex-Steiner by repeated single-pair solves: terminals are taken
//! in a seeded random order, and each one is connected to the root in the
//! graph where the root has absorbed all earlier terminals.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FlexError, Result};
use crate::flex_st::solve_22;
use crate::graph::{check_feasible, contract, Cost, EdgeSet, FlexGraph, Requirement, Scope, Solution, Vertex, VertexSet};
use crate::oracle::opt_flex;

/// A single-pair solver for one fixed (p,q).
pub trait PairSolver {
    fn requirement(&self) -> (u32, u32);
    fn solve_pair(&self, graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<Solution>;
}

/// The (2,2) 5-approximation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Flex22Solver;

impl PairSolver for Flex22Solver {
    fn requirement(&self) -> (u32, u32) {
        (2, 2)
    }

    fn solve_pair(&self, graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<Solution> {
        Ok(solve_22(graph, s, t)?.solution)
    }
}

/// Exact pair optimum, for any (p,q) at desk scale.
#[derive(Clone, Copy, Debug)]
pub struct ExactPairSolver {
    pub p: u32,
    pub q: u32,
}

impl PairSolver for ExactPairSolver {
    fn requirement(&self) -> (u32, u32) {
        (self.p, self.q)
    }

    fn solve_pair(&self, graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<Solution> {
        opt_flex(graph, &Requirement::pair(self.p, self.q, s, t))
    }
}

#[derive(Clone, Debug)]
pub struct SteinerOutcome {
    pub solution: Solution,
    pub seed: u64,
    /// Terminals in the order they were connected.
    pub order: Vec<Vertex>,
    /// Original edge ids chosen by each pair solve.
    pub steps: Vec<EdgeSet>,
}

fn terminals_without_root(graph: &FlexGraph, terminals: &[Vertex], root: Vertex) -> Result<Vec<Vertex>> {
    graph.check_vertex(root)?;
    for &t in terminals {
        graph.check_vertex(t)?;
    }
    let ts: Vec<Vertex> = terminals
        .iter()
        .copied()
        .filter(|&t| t != root)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if ts.is_empty() {
        return Err(FlexError::precondition("no terminal other than the root", None));
    }
    Ok(ts)
}

fn rooted_requirement(p: u32, q: u32, ts: &[Vertex], root: Vertex) -> Requirement {
    let mut all = ts.to_vec();
    all.push(root);
    all.sort_unstable();
    Requirement::new(p, q, Scope::Terminals(all))
}

pub fn solve_rooted_steiner(
    graph: &FlexGraph,
    terminals: &[Vertex],
    root: Vertex,
    seed: u64,
    solver: &dyn PairSolver,
) -> Result<SteinerOutcome> {
    let mut order = terminals_without_root(graph, terminals, root)?;
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = solve_rooted_steiner_in_order(graph, &order, root, solver)?;
    out.seed = seed;
    Ok(out)
}

/// Same as [`solve_rooted_steiner`] with a caller-chosen order.
pub fn solve_rooted_steiner_in_order(
    graph: &FlexGraph,
    order: &[Vertex],
    root: Vertex,
    solver: &dyn PairSolver,
) -> Result<SteinerOutcome> {
    let ts = terminals_without_root(graph, order, root)?;
    if ts.len() != order.len() {
        return Err(FlexError::precondition("order must list distinct non-root terminals", None));
    }
    let (p, q) = solver.requirement();
    let req = rooted_requirement(p, q, &ts, root);
    if let Some(w) = check_feasible(graph, &graph.all_edges(), &req)?.witness() {
        return Err(FlexError::infeasible("terminals cannot be flex-connected to the root", Some(w.members)));
    }
    let mut merged = VertexSet::singleton(root);
    let mut edges = EdgeSet::new();
    let mut steps = Vec::with_capacity(order.len());
    for &t in order {
        let c = contract(graph, merged, root)?;
        let local = solver.solve_pair(&c.graph, c.vertex_map[t], c.vertex_map[root])?;
        let step: EdgeSet = local.edges.iter().map(|&e| c.edge_origin[e]).collect();
        edges.extend(step.iter().copied());
        steps.push(step);
        merged.insert(t);
    }
    let solution = Solution::new(graph, edges);
    if let Some(w) = check_feasible(graph, &solution.edges, &req)?.witness() {
        return Err(FlexError::Internal(format!("rooted Steiner output violates cut {w}")));
    }
    Ok(SteinerOutcome {
        solution,
        seed: 0,
        order: order.to_vec(),
        steps,
    })
}

/// For each terminal t, the exact cost of flex-connecting t to the root
/// once every other terminal is merged into the root.
pub fn beta_shares(graph: &FlexGraph, terminals: &[Vertex], root: Vertex, p: u32, q: u32) -> Result<BTreeMap<Vertex, Cost>> {
    let ts = terminals_without_root(graph, terminals, root)?;
    let mut out = BTreeMap::new();
    for &t in &ts {
        let mut merge = VertexSet::singleton(root);
        for &o in ts.iter().filter(|&&o| o != t) {
            merge.insert(o);
        }
        let c = contract(graph, merge, root)?;
        let sol = opt_flex(&c.graph, &Requirement::pair(p, q, c.vertex_map[t], c.vertex_map[root]))?;
        out.insert(t, sol.cost);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Safety;

    fn star() -> FlexGraph {
        // root 0, terminals 1 and 2, each tied to the root by two safe edges
        let mut g = FlexGraph::new(3).unwrap();
        for v in [1, 2] {
            g.add(0, v, v as i64, Safety::Safe).unwrap();
            g.add(0, v, v as i64, Safety::Safe).unwrap();
        }
        g.add(1, 2, 5, Safety::Unsafe).unwrap();
        g
    }

    #[test]
    fn single_terminal_is_one_pair_solve() {
        let g = star();
        let out = solve_rooted_steiner(&g, &[1], 0, 7, &Flex22Solver).unwrap();
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.solution.edges, EdgeSet::from([0, 1]));
    }

    #[test]
    fn root_in_terminals_is_dropped() {
        let g = star();
        let out = solve_rooted_steiner(&g, &[0, 1, 2], 0, 1, &Flex22Solver).unwrap();
        assert_eq!(out.order.len(), 2);
        assert_eq!(out.solution.cost, Cost::from_integer(6));
        assert!(matches!(
            solve_rooted_steiner(&g, &[0], 0, 1, &Flex22Solver),
            Err(FlexError::Precondition { .. })
        ));
    }

    #[test]
    fn zero_cost_neighbour_has_zero_share() {
        let mut g = star();
        g.add(0, 1, 0, Safety::Safe).unwrap();
        g.add(0, 1, 0, Safety::Safe).unwrap();
        let beta = beta_shares(&g, &[1, 2], 0, 2, 2).unwrap();
        assert_eq!(beta[&1], Cost::from_integer(0));
        assert_eq!(beta[&2], Cost::from_integer(4));
    }
}
