//! Cut families: enumeration, augmentation families, uncrossability and ring
//! checks, minimal violated sets, weighted minimum cuts.

use std::collections::HashSet;

use crate::error::{FlexError, Result};
use crate::flow::max_flow_real;
use crate::graph::{
    check_feasible_bounded, cut_counts, scope_cuts, Cut, EdgeId, EdgeSet, Feasibility, FlexGraph,
    Requirement, Scope, VertexSet, DEFAULT_ENUMERATION_BOUND,
};

/// A deduplicated, sorted list of cuts.
///
/// A family built with an anchor stands for a symmetric set function: every
/// cut is stored by its side without the anchor, and membership queries
/// accept either side. A family without an anchor is taken literally.
#[derive(Clone, Debug)]
pub struct CutFamily {
    n: usize,
    anchor: Option<usize>,
    cuts: Vec<VertexSet>,
    index: HashSet<VertexSet>,
    pub provenance: String,
}

impl PartialEq for CutFamily {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.anchor == other.anchor && self.cuts == other.cuts
    }
}

impl CutFamily {
    fn build(
        n: usize,
        anchor: Option<usize>,
        sets: impl IntoIterator<Item = VertexSet>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let full = VertexSet::full(n);
        let mut cuts = Vec::new();
        for s in sets {
            if s.is_empty() || s == full || !s.is_subset(full) {
                return Err(FlexError::structural(format!(
                    "{s} is not a nonempty proper subset of 0..{n}"
                )));
            }
            cuts.push(match anchor {
                Some(a) => s.canonical(a, n),
                None => s,
            });
        }
        cuts.sort_unstable();
        cuts.dedup();
        let index = cuts.iter().copied().collect();
        Ok(CutFamily {
            n,
            anchor,
            cuts,
            index,
            provenance: provenance.into(),
        })
    }

    /// A symmetric family stored by canonical sides relative to `anchor`.
    pub fn symmetric(
        n: usize,
        anchor: usize,
        sets: impl IntoIterator<Item = VertexSet>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if anchor >= n {
            return Err(FlexError::structural(format!("anchor {anchor} outside 0..{n}")));
        }
        Self::build(n, Some(anchor), sets, provenance)
    }

    /// A family taken literally, with no complement identification.
    pub fn from_sets(n: usize, sets: impl IntoIterator<Item = VertexSet>) -> Result<Self> {
        Self::build(n, None, sets, "explicit")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn anchor(&self) -> Option<usize> {
        self.anchor
    }

    pub fn cuts(&self) -> &[VertexSet] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.cuts.iter().copied()
    }

    /// Member test, identifying complements in a symmetric family.
    pub fn contains(&self, s: VertexSet) -> bool {
        match self.anchor {
            Some(a) => {
                if s.is_empty() || s == VertexSet::full(self.n) {
                    return false;
                }
                self.index.contains(&s.canonical(a, self.n))
            }
            None => self.index.contains(&s),
        }
    }

    /// Literal member test.
    pub fn contains_literal(&self, s: VertexSet) -> bool {
        self.index.contains(&s)
    }

    /// Every set the family stands for: both sides when symmetric.
    pub fn expanded(&self) -> Vec<VertexSet> {
        let mut out = self.cuts.clone();
        if self.anchor.is_some() {
            out.extend(self.cuts.iter().map(|c| c.complement(self.n)));
            out.sort_unstable();
            out.dedup();
        }
        out
    }

    /// Members satisfying `keep`, same anchor.
    pub fn filter(&self, provenance: impl Into<String>, mut keep: impl FnMut(VertexSet) -> bool) -> CutFamily {
        let cuts: Vec<VertexSet> = self.cuts.iter().copied().filter(|&c| keep(c)).collect();
        let index = cuts.iter().copied().collect();
        CutFamily {
            n: self.n,
            anchor: self.anchor,
            cuts,
            index,
            provenance: provenance.into(),
        }
    }

    pub fn union(&self, other: &CutFamily) -> Result<CutFamily> {
        if self.n != other.n || self.anchor != other.anchor {
            return Err(FlexError::structural("cannot merge families over different ground sets"));
        }
        Self::build(
            self.n,
            self.anchor,
            self.cuts.iter().chain(other.cuts.iter()).copied(),
            format!("{} + {}", self.provenance, other.provenance),
        )
    }
}

/// Every canonical cut separating `scope`.
pub fn enumerate_cuts(graph: &FlexGraph, scope: &Scope) -> Result<CutFamily> {
    enumerate_cuts_bounded(graph, scope, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_cuts_bounded(graph: &FlexGraph, scope: &Scope, bound: usize) -> Result<CutFamily> {
    let cuts = scope_cuts(graph, scope, bound)?;
    CutFamily::symmetric(graph.vertex_count(), scope.anchor(), cuts, format!("all cuts, {scope}"))
}

/// Scope cuts whose (safe, total) counts in `f` satisfy `select`.
pub fn cuts_by_counts(
    graph: &FlexGraph,
    f: &EdgeSet,
    scope: &Scope,
    provenance: impl Into<String>,
    mut select: impl FnMut(usize, usize) -> bool,
) -> Result<CutFamily> {
    graph.check_edges(f)?;
    let fv: Vec<EdgeId> = f.iter().copied().collect();
    let cuts = scope_cuts(graph, scope, DEFAULT_ENUMERATION_BOUND)?;
    let chosen = cuts.into_iter().filter(|&s| {
        let (safe, total) = cut_counts(graph, &fv, s);
        select(safe, total)
    });
    CutFamily::symmetric(graph.vertex_count(), scope.anchor(), chosen, provenance)
}

/// Cuts that block raising `f1` from (p, q−1) to `req` = (p, q): exactly
/// p+q−1 edges of `f1` cross and fewer than p of them are safe.
pub fn violated_cuts_for_augmentation(graph: &FlexGraph, f1: &EdgeSet, req: &Requirement) -> Result<CutFamily> {
    if req.q == 0 {
        return Err(FlexError::precondition("augmentation target needs q >= 1", None));
    }
    let lower = Requirement::new(req.p, req.q - 1, req.scope.clone());
    if let Feasibility::Infeasible { witness, .. } = check_feasible_bounded(graph, f1, &lower, DEFAULT_ENUMERATION_BOUND)? {
        return Err(FlexError::precondition(
            format!("edge set is not ({},{})-feasible", lower.p, lower.q),
            Some(witness.members),
        ));
    }
    let p = req.p as usize;
    let target = (req.p + req.q - 1) as usize;
    cuts_by_counts(
        graph,
        f1,
        &req.scope,
        format!("augmentation ({},{}) -> ({},{})", req.p, req.q - 1, req.p, req.q),
        |safe, total| total == target && safe < p,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uncrossability {
    Uncrossable,
    /// `a` and `b` properly intersect but neither {a∪b, a∩b} nor {a−b, b−a}
    /// lies in the family.
    CrossingPair(VertexSet, VertexSet),
}

impl Uncrossability {
    pub fn is_uncrossable(&self) -> bool {
        matches!(self, Uncrossability::Uncrossable)
    }
}

/// Do `a` and `b` uncross within `family`?
pub fn uncross(family: &CutFamily, a: VertexSet, b: VertexSet) -> bool {
    if !a.properly_intersects(b) {
        return true;
    }
    let n = family.vertex_count();
    let union = a.union(b);
    if union == VertexSet::full(n) && family.anchor().is_some() {
        // the differences are complements of members
        return true;
    }
    (family.contains(union) && family.contains(a.intersection(b)))
        || (family.contains(a.difference(b)) && family.contains(b.difference(a)))
}

/// Reports the first crossing pair in sorted order, if any. For a symmetric
/// family, checking canonical pairs covers every pair of sides.
pub fn is_uncrossable(family: &CutFamily) -> Uncrossability {
    let cuts = family.cuts();
    for (i, &a) in cuts.iter().enumerate() {
        for &b in &cuts[i + 1..] {
            if !uncross(family, a, b) {
                return Uncrossability::CrossingPair(a, b);
            }
        }
    }
    Uncrossability::Uncrossable
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingVerdict {
    Ring,
    /// Properly intersecting members whose union or intersection is missing.
    ClosureViolation(VertexSet, VertexSet),
    /// Two incomparable minimal members.
    TwoMinimal(VertexSet, VertexSet),
}

impl RingVerdict {
    pub fn is_ring(&self) -> bool {
        matches!(self, RingVerdict::Ring)
    }
}

/// Ring test over the literal members. The empty family counts as a ring.
pub fn is_ring_family(family: &CutFamily) -> RingVerdict {
    let cuts = family.cuts();
    for (i, &a) in cuts.iter().enumerate() {
        for &b in &cuts[i + 1..] {
            if a.properly_intersects(b)
                && !(family.contains_literal(a.union(b)) && family.contains_literal(a.intersection(b)))
            {
                return RingVerdict::ClosureViolation(a, b);
            }
        }
    }
    let minimal = minimal_members(cuts.iter().copied());
    if minimal.len() >= 2 {
        return RingVerdict::TwoMinimal(minimal[0], minimal[1]);
    }
    RingVerdict::Ring
}

/// Inclusion-minimal sets among `sets`, in sorted order.
pub(crate) fn minimal_members(sets: impl IntoIterator<Item = VertexSet>) -> Vec<VertexSet> {
    let mut all: Vec<VertexSet> = sets.into_iter().collect();
    all.sort_unstable();
    all.dedup();
    all.iter()
        .copied()
        .filter(|&s| !all.iter().any(|&o| o != s && o.is_subset(s)))
        .collect()
}

/// Minimal family members not crossed by any edge of `a`.
pub fn minimal_violated_sets(graph: &FlexGraph, family: &CutFamily, a: &EdgeSet) -> Result<Vec<VertexSet>> {
    graph.check_edges(a)?;
    if family.vertex_count() != graph.vertex_count() {
        return Err(FlexError::structural("family and graph disagree on vertex count"));
    }
    let av: Vec<EdgeId> = a.iter().copied().collect();
    Ok(minimal_members(
        family.iter().filter(|&s| cut_counts(graph, &av, s).1 == 0),
    ))
}

/// Minimum total weight of a scope-separating cut. Pair scope takes one
/// flow, terminal scope one flow per other terminal to the smallest, spanning
/// scope one flow per vertex to vertex 0.
pub fn weighted_min_cut(graph: &FlexGraph, weights: &[f64], scope: &Scope) -> Result<(f64, Cut)> {
    scope.validate(graph)?;
    if weights.len() != graph.edge_count() {
        return Err(FlexError::structural(format!(
            "{} weights for {} edges",
            weights.len(),
            graph.edge_count()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(FlexError::structural("edge weights must be nonnegative"));
    }
    let n = graph.vertex_count();
    let arcs: Vec<(usize, usize, f64)> = graph
        .edges()
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(r, &w)| (r.u, r.v, w))
        .collect();
    let anchor = scope.anchor();
    let sources: Vec<usize> = match scope {
        Scope::Pair(s, _) => vec![*s],
        Scope::Terminals(ts) => {
            let mut ts: Vec<usize> = ts.iter().copied().filter(|&v| v != anchor).collect();
            ts.sort_unstable();
            ts.dedup();
            ts
        }
        Scope::Spanning => (1..n).collect(),
    };
    let mut best: Option<(f64, VertexSet)> = None;
    for src in sources {
        let (value, side) = max_flow_real(n, &arcs, src, anchor);
        if best.map_or(true, |(b, _)| value < b) {
            best = Some((value, side));
        }
    }
    let (value, side) = best.ok_or_else(|| FlexError::Internal("scope without cuts".into()))?;
    Ok((value, Cut::new(side, anchor, n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Safety;
    use crate::instances::gap_instance;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_vertices(v.iter().copied())
    }

    #[test]
    fn enumeration_counts() {
        let g = FlexGraph::new(3).unwrap();
        assert_eq!(enumerate_cuts(&g, &Scope::Spanning).unwrap().len(), 3);
        let g = FlexGraph::new(4).unwrap();
        assert_eq!(enumerate_cuts(&g, &Scope::Pair(0, 3)).unwrap().len(), 4);
        let gap = gap_instance(2).unwrap();
        let scope = Scope::Pair(gap.label("s"), gap.label("t"));
        assert_eq!(enumerate_cuts(&gap.graph, &scope).unwrap().len(), 8);
    }

    #[test]
    fn enumeration_bound_is_reported() {
        let g = FlexGraph::new(21).unwrap();
        match enumerate_cuts(&g, &Scope::Spanning) {
            Err(FlexError::Capacity { bound, .. }) => assert_eq!(bound, 20),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_family_is_uncrossable_but_not_ring() {
        let fam = CutFamily::from_sets(4, [vs(&[0]), vs(&[1])]).unwrap();
        assert!(is_uncrossable(&fam).is_uncrossable());
        assert!(matches!(is_ring_family(&fam), RingVerdict::TwoMinimal(..)));
    }

    #[test]
    fn chain_is_ring() {
        let fam = CutFamily::from_sets(5, [vs(&[0]), vs(&[0, 1]), vs(&[0, 1, 2])]).unwrap();
        assert_eq!(is_ring_family(&fam), RingVerdict::Ring);
        assert_eq!(is_ring_family(&CutFamily::from_sets(5, []).unwrap()), RingVerdict::Ring);
    }

    #[test]
    fn duplicates_and_order_do_not_matter() {
        let a = CutFamily::from_sets(5, [vs(&[0, 1]), vs(&[1, 2]), vs(&[0, 1])]).unwrap();
        let b = CutFamily::from_sets(5, [vs(&[1, 2]), vs(&[0, 1])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(is_uncrossable(&a), is_uncrossable(&b));
        assert_eq!(is_uncrossable(&a), Uncrossability::CrossingPair(vs(&[0, 1]), vs(&[1, 2])));
    }

    #[test]
    fn symmetric_membership_accepts_both_sides() {
        let fam = CutFamily::symmetric(4, 0, [vs(&[0, 1])], "t").unwrap();
        assert_eq!(fam.cuts(), &[vs(&[2, 3])]);
        assert!(fam.contains(vs(&[0, 1])));
        assert!(fam.contains(vs(&[2, 3])));
        assert!(!fam.contains_literal(vs(&[0, 1])));
    }

    #[test]
    fn feasible_edge_set_has_empty_augmentation_family() {
        let mut g = FlexGraph::new(3).unwrap();
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            g.add(u, v, 1, Safety::Safe).unwrap();
            g.add(u, v, 1, Safety::Safe).unwrap();
        }
        let fam = violated_cuts_for_augmentation(&g, &g.all_edges(), &Requirement::spanning(2, 1)).unwrap();
        assert!(fam.is_empty());
    }

    #[test]
    fn augmentation_precondition_carries_witness() {
        let mut g = FlexGraph::new(3).unwrap();
        g.add(0, 1, 1, Safety::Unsafe).unwrap();
        g.add(1, 2, 1, Safety::Unsafe).unwrap();
        match violated_cuts_for_augmentation(&g, &g.all_edges(), &Requirement::spanning(2, 1)) {
            Err(FlexError::Precondition { cut: Some(c), .. }) => assert_eq!(c, vs(&[1, 2])),
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn minimal_violated_sets_respect_cover() {
        let mut g = FlexGraph::new(4).unwrap();
        g.add(1, 2, 1, Safety::Unsafe).unwrap();
        let fam = CutFamily::from_sets(4, [vs(&[1]), vs(&[1, 2]), vs(&[2]), vs(&[1, 3])]).unwrap();
        assert_eq!(
            minimal_violated_sets(&g, &fam, &EdgeSet::new()).unwrap(),
            vec![vs(&[1]), vs(&[2])]
        );
        // edge 1-2 covers {1} and {2} but not {1,2}; {1,2} ⊂ nothing else smaller
        assert_eq!(
            minimal_violated_sets(&g, &fam, &EdgeSet::from([0])).unwrap(),
            vec![vs(&[1, 2])]
        );
    }

    #[test]
    fn weighted_min_cut_examples() {
        let mut tree = FlexGraph::new(4).unwrap();
        tree.add(0, 1, 1, Safety::Safe).unwrap();
        tree.add(1, 2, 1, Safety::Safe).unwrap();
        tree.add(1, 3, 1, Safety::Safe).unwrap();
        let (v, _) = weighted_min_cut(&tree, &[1.0; 3], &Scope::Spanning).unwrap();
        assert_eq!(v, 1.0);

        let mut g = FlexGraph::new(3).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        let (v, c) = weighted_min_cut(&g, &[1.0], &Scope::Pair(0, 2)).unwrap();
        assert_eq!(v, 0.0);
        assert!(!c.members.contains(2));

        let gap = gap_instance(3).unwrap();
        let w: Vec<f64> = gap
            .graph
            .edges()
            .iter()
            .map(|r| if r.is_safe() { 4.0 } else { 1.0 })
            .collect();
        let scope = Scope::Pair(gap.label("s"), gap.label("t"));
        let (v, _) = weighted_min_cut(&gap.graph, &w, &scope).unwrap();
        // each v_i costs min(4 safe, 2 unsafe) on whichever side it sits
        let brute = enumerate_cuts(&gap.graph, &scope)
            .unwrap()
            .iter()
            .map(|c| {
                gap.graph
                    .edges()
                    .iter()
                    .zip(&w)
                    .filter(|(r, _)| r.crosses(c))
                    .map(|(_, w)| *w)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((v - 8.0).abs() < 1e-9);
        assert!((brute - 8.0).abs() < 1e-9);
    }
}
