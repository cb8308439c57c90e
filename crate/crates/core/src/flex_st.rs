//! (2,2) single-pair solver: a cheap base where every s–t cut has two safe
//! edges, four edges, or one safe plus two unsafe edges; then exact covers
//! of three ring families that together contain every deficient cut.

use crate::cover::ring_cover_exact;
use crate::cuts::{cuts_by_counts, is_ring_family, CutFamily, RingVerdict};
use crate::error::{FlexError, Result};
use crate::flow::{decompose, max_flow, min_cost_flow, CapacitatedNet, Path};
use crate::graph::{
    boundary, check_feasible, scope_cuts, EdgeId, EdgeSet, FlexGraph, Requirement, Scope, Solution, Vertex,
    VertexSet, DEFAULT_ENUMERATION_BOUND,
};

fn check_pair(graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<()> {
    Scope::Pair(s, t).validate(graph)
}

/// Support of a minimum-cost flow of value 4 where each safe edge may carry
/// two units (as two unit copies) and each unsafe edge one.
pub fn base_solution(graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<Solution> {
    check_pair(graph, s, t)?;
    let net = CapacitatedNet::duplicated_safe(graph, &graph.all_edges());
    match min_cost_flow(&net, s, t, 4) {
        Ok(flow) => Ok(Solution::new(graph, flow.support)),
        Err(FlexError::Infeasible { cut, .. }) => Err(FlexError::infeasible(
            "no (2,2) solution: some s-t cut has capacity below 4",
            cut.map(|c| c.canonical(t, graph.vertex_count())),
        )),
        Err(e) => Err(e),
    }
}

/// First s–t cut of `f` that has fewer than two safe edges, fewer than four
/// edges, and is not one safe plus two unsafe.
pub fn trichotomy_failure(graph: &FlexGraph, f: &EdgeSet, s: Vertex, t: Vertex) -> Result<Option<VertexSet>> {
    for set in scope_cuts(graph, &Scope::Pair(s, t), DEFAULT_ENUMERATION_BOUND)? {
        let b = boundary(graph, f, set)?;
        let ok = b.safe >= 2 || b.total() >= 4 || (b.safe == 1 && b.unsafe_count == 2);
        if !ok {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

/// s-side cuts crossed by exactly one safe and two unsafe edges of `f`.
pub fn violated_family(graph: &FlexGraph, f: &EdgeSet, s: Vertex, t: Vertex) -> Result<CutFamily> {
    check_pair(graph, s, t)?;
    cuts_by_counts(graph, f, &Scope::Pair(s, t), "(2,2) base deficiency", |safe, total| {
        safe == 1 && total == 3
    })
}

/// Safe edges of `f` crossing some member of `family`.
pub fn family_safe_edges(graph: &FlexGraph, f: &EdgeSet, family: &CutFamily) -> Result<EdgeSet> {
    let mut out = EdgeSet::new();
    for set in family.iter() {
        let b = boundary(graph, f, set)?;
        out.extend(b.edges.iter().copied().filter(|&e| graph.edge(e).is_safe()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SupportPaths {
    /// The full unit-path decomposition of the flow of value 4.
    pub all: Vec<Path>,
    /// The first three paths; the last one is dropped.
    pub chosen: Vec<Path>,
}

/// Decomposes a maximum flow on `f` (safe capacity 2, unsafe 1) into four
/// unit paths and keeps three of them; every safe edge of a deficient cut
/// lies on at least one kept path.
pub fn support_paths(graph: &FlexGraph, f: &EdgeSet, s: Vertex, t: Vertex) -> Result<SupportPaths> {
    let family = violated_family(graph, f, s, t)?;
    if family.is_empty() {
        return Err(FlexError::precondition("no deficient cut, nothing to route", None));
    }
    let net = CapacitatedNet::by_safety(graph, f, 2, 1);
    let flow = max_flow(&net, s, t)?;
    if flow.value != 4 {
        return Err(FlexError::Internal(format!(
            "flow on the base solution is {}, expected exactly 4",
            flow.value
        )));
    }
    let all = decompose(graph, &flow.edge_flow, s, t)?;
    let chosen = all[..3].to_vec();
    for e in family_safe_edges(graph, f, &family)? {
        if !chosen.iter().any(|p| p.contains_edge(e)) {
            return Err(FlexError::Internal(format!("safe edge {e} missed by the kept paths")));
        }
    }
    Ok(SupportPaths { all, chosen })
}

/// Splits `family` by which kept path carries each cut's safe edge. A cut
/// whose safe edge is on several paths joins each of their families.
pub fn partition_families(
    graph: &FlexGraph,
    family: &CutFamily,
    paths: &[Path],
    f: &EdgeSet,
) -> Result<Vec<CutFamily>> {
    let mut safe_edge_of = Vec::with_capacity(family.len());
    for set in family.iter() {
        let b = boundary(graph, f, set)?;
        let safe: Vec<EdgeId> = b.edges.iter().copied().filter(|&e| graph.edge(e).is_safe()).collect();
        if safe.len() != 1 {
            return Err(FlexError::precondition(
                format!("cut has {} safe edges, expected one", safe.len()),
                Some(set),
            ));
        }
        if !paths.iter().any(|p| p.contains_edge(safe[0])) {
            return Err(FlexError::precondition(
                format!("safe edge {} of the cut lies on no path", safe[0]),
                Some(set),
            ));
        }
        safe_edge_of.push((set, safe[0]));
    }
    let mut parts = Vec::with_capacity(paths.len());
    for (i, path) in paths.iter().enumerate() {
        let members: Vec<VertexSet> = safe_edge_of
            .iter()
            .filter(|(_, e)| path.contains_edge(*e))
            .map(|(s, _)| *s)
            .collect();
        let part = family.filter(format!("{} via path {}", family.provenance, i + 1), |s| members.contains(&s));
        match is_ring_family(&part) {
            RingVerdict::Ring => {}
            verdict => {
                return Err(FlexError::Internal(format!("family for path {} is not a ring: {verdict:?}", i + 1)))
            }
        }
        parts.push(part);
    }
    let mut union: Vec<VertexSet> = parts.iter().flat_map(|p| p.iter()).collect();
    union.sort_unstable();
    union.dedup();
    if union != family.cuts() {
        return Err(FlexError::Internal("path families do not cover the deficient cuts".into()));
    }
    Ok(parts)
}

/// First pair of crossing deficient cuts breaking the crossing structure:
/// either union and intersection are both deficient, or one of them is
/// crossed by exactly two safe edges and the other by exactly four unsafe.
pub fn crossing_structure_failure(
    graph: &FlexGraph,
    f: &EdgeSet,
    family: &CutFamily,
) -> Result<Option<(VertexSet, VertexSet)>> {
    let kind = |set: VertexSet| -> Result<(usize, usize)> {
        let b = boundary(graph, f, set)?;
        Ok((b.safe, b.unsafe_count))
    };
    let cuts = family.cuts();
    for (i, &a) in cuts.iter().enumerate() {
        for &b in &cuts[i + 1..] {
            if !a.properly_intersects(b) {
                continue;
            }
            let (u, x) = (a.union(b), a.intersection(b));
            if family.contains(u) && family.contains(x) {
                continue;
            }
            let (ku, kx) = (kind(u)?, kind(x)?);
            if (ku == (2, 0) && kx == (0, 4)) || (ku == (0, 4) && kx == (2, 0)) {
                continue;
            }
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Every stage of one (2,2) solve.
#[derive(Clone, Debug)]
pub struct Flex22Outcome {
    pub solution: Solution,
    pub base: Solution,
    pub family: CutFamily,
    pub paths: Option<SupportPaths>,
    pub parts: Vec<CutFamily>,
    pub covers: Vec<Solution>,
}

/// Base solution plus exact covers of the three path families, using the
/// edges outside the base at their own cost with safety ignored.
pub fn solve_22(graph: &FlexGraph, s: Vertex, t: Vertex) -> Result<Flex22Outcome> {
    let base = base_solution(graph, s, t)?;
    let family = violated_family(graph, &base.edges, s, t)?;
    if family.is_empty() {
        return finish(graph, s, t, base.clone(), base, family, None, Vec::new(), Vec::new());
    }
    let paths = support_paths(graph, &base.edges, s, t)?;
    let parts = partition_families(graph, &family, &paths.chosen, &base.edges)?;
    let candidates: EdgeSet = graph.all_edges().difference(&base.edges).copied().collect();
    let mut covers = Vec::with_capacity(parts.len());
    for part in &parts {
        covers.push(ring_cover_exact(graph, &candidates, part)?);
    }
    let mut edges = base.edges.clone();
    for c in &covers {
        edges.extend(c.edges.iter().copied());
    }
    let solution = Solution::new(graph, edges);
    finish(graph, s, t, solution, base, family, Some(paths), parts, covers)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    graph: &FlexGraph,
    s: Vertex,
    t: Vertex,
    solution: Solution,
    base: Solution,
    family: CutFamily,
    paths: Option<SupportPaths>,
    parts: Vec<CutFamily>,
    covers: Vec<Solution>,
) -> Result<Flex22Outcome> {
    if let Some(w) = check_feasible(graph, &solution.edges, &Requirement::pair(2, 2, s, t))?.witness() {
        return Err(FlexError::Internal(format!("(2,2) output misses cut {}", w.members)));
    }
    Ok(Flex22Outcome {
        solution,
        base,
        family,
        paths,
        parts,
        covers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Cost, Safety};
    use crate::instances::{gen_paper, PaperInstance};

    #[test]
    fn two_safe_paths_are_the_base() {
        let mut g = FlexGraph::new(4).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        g.add(1, 3, 1, Safety::Safe).unwrap();
        g.add(0, 2, 1, Safety::Safe).unwrap();
        g.add(2, 3, 1, Safety::Safe).unwrap();
        g.add(0, 3, 10, Safety::Unsafe).unwrap();
        let base = base_solution(&g, 0, 3).unwrap();
        assert_eq!(base.edges, EdgeSet::from([0, 1, 2, 3]));
        let out = solve_22(&g, 0, 3).unwrap();
        assert!(out.family.is_empty());
        assert_eq!(out.solution, base);
    }

    #[test]
    fn four_unsafe_paths_are_all_used() {
        let mut g = FlexGraph::new(6).unwrap();
        for mid in 1..5 {
            g.add(0, mid, 1, Safety::Unsafe).unwrap();
            g.add(mid, 5, 1, Safety::Unsafe).unwrap();
        }
        let base = base_solution(&g, 0, 5).unwrap();
        assert_eq!(base.edges, g.all_edges());
        assert_eq!(base.cost, Cost::from_integer(8));
    }

    #[test]
    fn infeasible_pair_reports_cut() {
        let mut g = FlexGraph::new(3).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        g.add(1, 2, 1, Safety::Safe).unwrap();
        g.add(1, 2, 1, Safety::Safe).unwrap();
        match base_solution(&g, 0, 2) {
            Err(FlexError::Infeasible { cut: Some(c), .. }) => assert!(!c.contains(2)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn figure_base_and_family() {
        let inst = gen_paper(PaperInstance::St22 { extended: true }).unwrap();
        let (s, t) = (inst.label("s"), inst.label("t"));
        let base = base_solution(&inst.graph, s, t).unwrap();
        assert_eq!(Some(&base.edges), inst.drawn.as_ref());
        assert_eq!(trichotomy_failure(&inst.graph, &base.edges, s, t).unwrap(), None);
        let fam = violated_family(&inst.graph, &base.edges, s, t).unwrap();
        assert_eq!(fam.cuts(), &[inst.set(&["s", "x1"]), inst.set(&["s", "x2"])]);
        assert_eq!(crossing_structure_failure(&inst.graph, &base.edges, &fam).unwrap(), None);
        let out = solve_22(&inst.graph, s, t).unwrap();
        for set in fam.iter() {
            assert!(boundary(&inst.graph, &out.solution.edges, set).unwrap().total() >= 4);
        }
    }

    #[test]
    fn support_paths_need_a_deficient_cut() {
        let mut g = FlexGraph::new(2).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        assert!(matches!(
            support_paths(&g, &g.all_edges(), 0, 1),
            Err(FlexError::Precondition { .. })
        ));
    }
}
