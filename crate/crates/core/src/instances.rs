//! Named constructions and random instance generation.
//!
//! The named figure instances are rebuilt from their documented cut
//! properties; every one is checked against a property list before it is
//! returned, and a failed check is an error rather than a silent drift.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuts::{is_uncrossable, violated_cuts_for_augmentation, Uncrossability};
use crate::error::{FlexError, Result};
use crate::graph::{
    boundary, check_feasible, Cost, EdgeSet, FlexGraph, Requirement, Safety, Vertex, VertexSet,
};

/// A graph, a requirement and optional metadata from its construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub graph: FlexGraph,
    pub requirement: Requirement,
    /// Edge set drawn in the construction (for figure instances this is the
    /// current solution the augmentation starts from).
    pub drawn: Option<EdgeSet>,
    /// Named vertices.
    pub labels: Vec<(String, Vertex)>,
    /// The pair of cuts the construction is about, if any.
    pub highlighted: Option<(VertexSet, VertexSet)>,
}

impl Instance {
    pub fn try_label(&self, name: &str) -> Option<Vertex> {
        self.labels.iter().find(|(l, _)| l == name).map(|(_, v)| *v)
    }

    /// Vertex with the given label. Panics on an unknown label.
    pub fn label(&self, name: &str) -> Vertex {
        self.try_label(name)
            .unwrap_or_else(|| panic!("instance {} has no vertex labelled {name}", self.name))
    }

    pub fn set(&self, names: &[&str]) -> VertexSet {
        VertexSet::from_vertices(names.iter().map(|n| self.label(n)))
    }

    fn plain(name: String, graph: FlexGraph, requirement: Requirement) -> Instance {
        Instance {
            name,
            graph,
            requirement,
            drawn: None,
            labels: Vec::new(),
            highlighted: None,
        }
    }
}

/// The named constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaperInstance {
    /// Integrality-gap family for (1,k) single-pair instances.
    Gap { k: u32 },
    /// (2,2) single-pair instance whose violated cuts cross. With
    /// `extended`, extra candidate edges make the augmentation nontrivial.
    St22 { extended: bool },
    /// (3,1) → (3,2) spanning augmentation with a crossing pair.
    Fgc32,
    /// (p,3) → (p,4) spanning augmentation for odd p.
    FgcP4Odd { p: u32 },
    /// (4,4) → (4,5) spanning augmentation.
    Fgc44,
}

impl PaperInstance {
    pub const NAMES: [&'static str; 5] = ["GAP", "FIG-ST22", "FIG-FGC32", "FIG-FGC-P4ODD", "FIG-FGC44"];

    /// Parses a name plus `key=value` parameters (`k` for GAP, `p` for
    /// FIG-FGC-P4ODD, `extended` for FIG-ST22).
    pub fn parse(name: &str, params: &[(String, i64)]) -> Result<PaperInstance> {
        let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        let positive = |key: &str, default: Option<i64>| -> Result<u32> {
            let v = get(key)
                .or(default)
                .ok_or_else(|| FlexError::structural(format!("{name} needs parameter {key}")))?;
            u32::try_from(v)
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| FlexError::structural(format!("parameter {key} must be a positive integer")))
        };
        match name.to_ascii_uppercase().as_str() {
            "GAP" => Ok(PaperInstance::Gap { k: positive("k", None)? }),
            "FIG-ST22" => Ok(PaperInstance::St22 {
                extended: get("extended").unwrap_or(0) != 0,
            }),
            "FIG-FGC32" => Ok(PaperInstance::Fgc32),
            "FIG-FGC-P4ODD" => Ok(PaperInstance::FgcP4Odd { p: positive("p", Some(3))? }),
            "FIG-FGC44" => Ok(PaperInstance::Fgc44),
            other => Err(FlexError::structural(format!(
                "unknown instance `{other}`; known: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for PaperInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaperInstance::Gap { k } => write!(f, "GAP(k={k})"),
            PaperInstance::St22 { extended: false } => write!(f, "FIG-ST22"),
            PaperInstance::St22 { extended: true } => write!(f, "FIG-ST22(extended)"),
            PaperInstance::Fgc32 => write!(f, "FIG-FGC32"),
            PaperInstance::FgcP4Odd { p } => write!(f, "FIG-FGC-P4ODD(p={p})"),
            PaperInstance::Fgc44 => write!(f, "FIG-FGC44"),
        }
    }
}

/// Builds a named instance and checks its documented properties.
pub fn gen_paper(which: PaperInstance) -> Result<Instance> {
    let inst = match which {
        PaperInstance::Gap { k } => build_gap(k)?,
        PaperInstance::St22 { extended } => build_st22(extended)?,
        PaperInstance::Fgc32 => build_fgc32()?,
        PaperInstance::FgcP4Odd { p } => build_p4odd(p)?,
        PaperInstance::Fgc44 => build_fgc44()?,
    };
    verify(which, &inst)?;
    Ok(inst)
}

pub fn gap_instance(k: u32) -> Result<Instance> {
    gen_paper(PaperInstance::Gap { k })
}

/// Adds `count` parallel unit-cost edges.
fn bundle(g: &mut FlexGraph, drawn: &mut EdgeSet, u: Vertex, v: Vertex, safety: Safety, count: u32) -> Result<()> {
    for _ in 0..count {
        drawn.insert(g.add(u, v, 1, safety)?);
    }
    Ok(())
}

/// Sorts edges canonically and remaps the drawn set.
fn finish(mut inst: Instance) -> Instance {
    let (graph, map) = inst.graph.canonicalized();
    inst.graph = graph;
    inst.drawn = inst.drawn.map(|d| d.iter().map(|&e| map[e]).collect());
    inst
}

fn labelled(names: &[&str]) -> Vec<(String, Vertex)> {
    names.iter().enumerate().map(|(i, n)| (n.to_string(), i)).collect()
}

fn build_gap(k: u32) -> Result<Instance> {
    if k == 0 {
        return Err(FlexError::structural("GAP needs k >= 1"));
    }
    let n = k as usize + 3;
    let mut g = FlexGraph::new(n)?;
    let (s, t) = (0, 1);
    let half = Cost::new(1, 2);
    let heavy = Cost::from_integer(i128::from(k) + 1);
    let mut labels = vec![("s".to_string(), s), ("t".to_string(), t)];
    for i in 1..=k as usize + 1 {
        let v = i + 1;
        labels.push((format!("v{i}"), v));
        g.add_edge(s, v, half, Safety::Unsafe)?;
        g.add_edge(s, v, half, Safety::Unsafe)?;
        g.add_edge(v, t, heavy, Safety::Safe)?;
    }
    let all = g.all_edges();
    Ok(finish(Instance {
        name: PaperInstance::Gap { k }.to_string(),
        graph: g,
        requirement: Requirement::pair(1, k, s, t),
        drawn: Some(all),
        labels,
        highlighted: None,
    }))
}

fn build_st22(extended: bool) -> Result<Instance> {
    // s, x1, x2, t
    let mut g = FlexGraph::new(4)?;
    let mut drawn = EdgeSet::new();
    bundle(&mut g, &mut drawn, 0, 1, Safety::Safe, 1)?;
    bundle(&mut g, &mut drawn, 0, 2, Safety::Safe, 1)?;
    bundle(&mut g, &mut drawn, 1, 3, Safety::Unsafe, 2)?;
    bundle(&mut g, &mut drawn, 2, 3, Safety::Unsafe, 2)?;
    if extended {
        // priced so that the drawn edges remain the cheapest base
        g.add(1, 2, 2, Safety::Unsafe)?;
        g.add(1, 3, 3, Safety::Unsafe)?;
        g.add(0, 3, 5, Safety::Unsafe)?;
    }
    Ok(finish(Instance {
        name: PaperInstance::St22 { extended }.to_string(),
        graph: g,
        requirement: Requirement::pair(2, 2, 0, 3),
        drawn: Some(drawn),
        labels: labelled(&["s", "x1", "x2", "t"]),
        highlighted: Some((VertexSet::from_vertices([0, 1]), VertexSet::from_vertices([0, 2]))),
    }))
}

fn spanning_figure(
    name: String,
    target: Requirement,
    bundles: &[(Vertex, Vertex, u32, u32)],
) -> Result<Instance> {
    let mut g = FlexGraph::new(4)?;
    let mut drawn = EdgeSet::new();
    for &(u, v, safe, unsafe_count) in bundles {
        bundle(&mut g, &mut drawn, u, v, Safety::Safe, safe)?;
        bundle(&mut g, &mut drawn, u, v, Safety::Unsafe, unsafe_count)?;
    }
    Ok(finish(Instance {
        name,
        graph: g,
        requirement: target,
        drawn: Some(drawn),
        labels: labelled(&["r", "x1", "x2", "x3"]),
        highlighted: Some((VertexSet::from_vertices([1, 2]), VertexSet::from_vertices([2, 3]))),
    }))
}

fn build_fgc32() -> Result<Instance> {
    spanning_figure(
        PaperInstance::Fgc32.to_string(),
        Requirement::spanning(3, 2),
        &[(0, 1, 1, 1), (0, 3, 2, 0), (1, 2, 0, 2), (2, 3, 1, 1)],
    )
}

fn build_p4odd(p: u32) -> Result<Instance> {
    if p < 3 || p % 2 == 0 {
        return Err(FlexError::structural("FIG-FGC-P4ODD needs an odd p >= 3"));
    }
    let a = (p - 1) / 2;
    spanning_figure(
        PaperInstance::FgcP4Odd { p }.to_string(),
        Requirement::spanning(p, 4),
        &[(0, 1, a, 2), (0, 3, a + 1, 0), (1, 2, a - 1, 4), (2, 3, a, 2)],
    )
}

fn build_fgc44() -> Result<Instance> {
    spanning_figure(
        PaperInstance::Fgc44.to_string(),
        Requirement::spanning(4, 5),
        &[(0, 1, 1, 3), (0, 3, 3, 0), (1, 2, 0, 5), (2, 3, 2, 2)],
    )
}

fn check(cond: bool, which: PaperInstance, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(FlexError::Internal(format!("{which} reconstruction fails: {what}")))
    }
}

/// (safe, total) of the drawn edges across `set`.
fn counts(inst: &Instance, set: VertexSet) -> Result<(usize, usize)> {
    let drawn = inst.drawn.as_ref().expect("figure instances record their drawn edges");
    let b = boundary(&inst.graph, drawn, set)?;
    Ok((b.safe, b.total()))
}

fn verify(which: PaperInstance, inst: &Instance) -> Result<()> {
    match which {
        PaperInstance::Gap { k } => {
            let kk = k as usize;
            let g = &inst.graph;
            check(g.vertex_count() == kk + 3, which, "vertex count")?;
            check(g.edge_count() == 3 * (kk + 1), which, "edge count")?;
            let safe_cost = g.cost_of(&g.safe_edges());
            check(
                safe_cost == Cost::from_integer(((kk + 1) * (kk + 1)) as i128),
                which,
                "total safe cost",
            )?;
            let (s, t) = (inst.label("s"), inst.label("t"));
            for rec in g.edges() {
                let ok = if rec.is_safe() {
                    (rec.u == t || rec.v == t) && rec.cost == Cost::from_integer(i128::from(k) + 1)
                } else {
                    (rec.u == s || rec.v == s) && rec.cost == Cost::new(1, 2)
                };
                check(ok, which, "edge placement")?;
            }
        }
        PaperInstance::St22 { .. } => {
            let a = inst.set(&["s", "x1"]);
            let b = inst.set(&["s", "x2"]);
            check(counts(inst, a)? == (1, 3), which, "A has one safe and two unsafe edges")?;
            check(counts(inst, b)? == (1, 3), which, "B has one safe and two unsafe edges")?;
            check(counts(inst, a.union(b))? == (0, 4), which, "A ∪ B has four unsafe edges")?;
            check(counts(inst, a.intersection(b))? == (2, 2), which, "A ∩ B has two safe edges")?;
            let verdict = check_feasible(&inst.graph, inst.drawn.as_ref().unwrap(), &inst.requirement)?;
            check(verdict.witness().map(|w| w.members) == Some(a), which, "witness is A")?;
            let fam = violated_cuts_for_augmentation(
                &inst.graph,
                inst.drawn.as_ref().unwrap(),
                &Requirement::pair(2, 2, inst.label("s"), inst.label("t")),
            )?;
            check(
                is_uncrossable(&fam) == Uncrossability::CrossingPair(a, b),
                which,
                "A and B cross",
            )?;
        }
        PaperInstance::Fgc32 => {
            let (a, b) = inst.highlighted.unwrap();
            for s in [a, b] {
                check(counts(inst, s)? == (2, 4), which, "A, B have two safe and two unsafe edges")?;
            }
            check(counts(inst, a.union(b))?.0 == 3, which, "A ∪ B has three safe edges")?;
            check(counts(inst, b.difference(a))?.0 == 3, which, "B − A has three safe edges")?;
            verify_crossing(which, inst)?;
        }
        PaperInstance::FgcP4Odd { p } => {
            let p = p as usize;
            let (a, b) = inst.highlighted.unwrap();
            for s in [a, b] {
                check(counts(inst, s)? == (p - 1, p + 3), which, "A, B have p−1 safe and 4 unsafe edges")?;
            }
            check(counts(inst, a.union(b))?.0 == p, which, "A ∪ B has p safe edges")?;
            check(counts(inst, b.difference(a))?.0 == p, which, "B − A has p safe edges")?;
            check(counts(inst, a.intersection(b))?.1 == p + 4, which, "A ∩ B has p+4 edges")?;
            check(counts(inst, a.difference(b))?.1 == p + 4, which, "A − B has p+4 edges")?;
            verify_crossing(which, inst)?;
        }
        PaperInstance::Fgc44 => {
            let (a, b) = inst.highlighted.unwrap();
            for s in [a, b] {
                check(counts(inst, s)? == (3, 8), which, "A, B have 3 safe of 8 edges")?;
            }
            check(counts(inst, a.union(b))?.0 >= 4, which, "A ∪ B has 4 safe edges")?;
            check(counts(inst, b.difference(a))?.0 >= 4, which, "B − A has 4 safe edges")?;
            check(counts(inst, a.intersection(b))?.1 == 9, which, "A ∩ B has 9 edges")?;
            check(counts(inst, a.difference(b))?.1 == 9, which, "A − B has 9 edges")?;
            verify_crossing(which, inst)?;
        }
    }
    Ok(())
}

/// The drawn edges meet the level below the target, and the highlighted
/// pair crosses within the augmentation family.
fn verify_crossing(which: PaperInstance, inst: &Instance) -> Result<()> {
    let (a, b) = inst.highlighted.unwrap();
    let fam = violated_cuts_for_augmentation(&inst.graph, inst.drawn.as_ref().unwrap(), &inst.requirement)?;
    check(fam.contains(a) && fam.contains(b), which, "A and B are violated")?;
    check(
        !(fam.contains(a.union(b)) && fam.contains(a.intersection(b)))
            && !(fam.contains(a.difference(b)) && fam.contains(b.difference(a))),
        which,
        "A and B do not uncross",
    )
}

/// Parameters for random instances.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    /// Total edge count, at least n − 1.
    pub m: usize,
    /// Probability that an edge is safe.
    pub safe_prob: f64,
    /// Costs are drawn uniformly from {lo, lo + 1/den, …, hi}.
    pub cost_lo: i64,
    pub cost_hi: i64,
    pub cost_den: i64,
    pub requirement: Requirement,
    pub max_attempts: usize,
}

impl RandomParams {
    pub fn new(n: usize, m: usize, requirement: Requirement) -> RandomParams {
        RandomParams {
            n,
            m,
            safe_prob: 0.5,
            cost_lo: 1,
            cost_hi: 9,
            cost_den: 1,
            requirement,
            max_attempts: 1000,
        }
    }
}

/// A connected random multigraph meeting `params.requirement` with all its
/// edges. Deterministic in `seed`.
pub fn gen_random(params: &RandomParams, seed: u64) -> Result<Instance> {
    let n = params.n;
    if n < 2 {
        return Err(FlexError::structural("random instances need n >= 2"));
    }
    if params.m < n - 1 {
        return Err(FlexError::structural(format!("m = {} cannot connect {n} vertices", params.m)));
    }
    if !(0.0..=1.0).contains(&params.safe_prob) {
        return Err(FlexError::structural("safety probability must lie in [0, 1]"));
    }
    if params.cost_den < 1 || params.cost_lo < 0 || params.cost_hi < params.cost_lo {
        return Err(FlexError::structural("bad cost range"));
    }
    let probe = FlexGraph::new(n)?;
    params.requirement.scope.validate(&probe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.max_attempts {
        let g = random_graph(params, &mut rng)?;
        if check_feasible(&g, &g.all_edges(), &params.requirement)?.is_feasible() {
            let (g, _) = g.canonicalized();
            return Ok(Instance::plain(format!("random(n={n},m={},seed={seed})", params.m), g, params.requirement.clone()));
        }
    }
    Err(FlexError::Capacity {
        what: "generation attempts",
        bound: params.max_attempts,
        actual: params.max_attempts + 1,
    })
}

fn random_graph(params: &RandomParams, rng: &mut ChaCha8Rng) -> Result<FlexGraph> {
    let n = params.n;
    let mut g = FlexGraph::new(n)?;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::with_capacity(params.m);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        pairs.push((order[i], order[j]));
    }
    while pairs.len() < params.m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            pairs.push((u, v));
        }
    }
    let steps = (params.cost_hi - params.cost_lo) * params.cost_den;
    for (u, v) in pairs {
        let safety = if rng.gen_bool(params.safe_prob) {
            Safety::Safe
        } else {
            Safety::Unsafe
        };
        let k = rng.gen_range(0..=steps);
        let cost = Cost::new(
            i128::from(params.cost_lo * params.cost_den + k),
            i128::from(params.cost_den),
        );
        g.add_edge(u, v, cost, safety)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap3_shape() {
        let inst = gap_instance(3).unwrap();
        assert_eq!(inst.graph.vertex_count(), 6);
        assert_eq!(inst.graph.edge_count(), 12);
        assert_eq!(inst.graph.cost_of(&inst.graph.safe_edges()), Cost::from_integer(16));
        assert!(inst.graph.is_canonical());
    }

    #[test]
    fn every_named_instance_verifies() {
        for which in [
            PaperInstance::Gap { k: 1 },
            PaperInstance::Gap { k: 11 },
            PaperInstance::St22 { extended: false },
            PaperInstance::St22 { extended: true },
            PaperInstance::Fgc32,
            PaperInstance::FgcP4Odd { p: 3 },
            PaperInstance::FgcP4Odd { p: 5 },
            PaperInstance::FgcP4Odd { p: 7 },
            PaperInstance::Fgc44,
        ] {
            gen_paper(which).unwrap_or_else(|e| panic!("{which}: {e}"));
        }
    }

    #[test]
    fn even_p_is_rejected_for_the_odd_construction() {
        assert!(gen_paper(PaperInstance::FgcP4Odd { p: 4 }).is_err());
        assert!(PaperInstance::parse("nope", &[]).is_err());
        assert_eq!(
            PaperInstance::parse("gap", &[("k".into(), 4)]).unwrap(),
            PaperInstance::Gap { k: 4 }
        );
    }

    #[test]
    fn random_generation_is_deterministic() {
        let params = RandomParams::new(7, 14, Requirement::spanning(2, 1));
        let a = gen_random(&params, 42).unwrap();
        let b = gen_random(&params, 42).unwrap();
        assert_eq!(a, b);
        assert!(check_feasible(&a.graph, &a.graph.all_edges(), &a.requirement)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn all_safe_generation_reduces_to_edge_connectivity() {
        let mut params = RandomParams::new(6, 12, Requirement::spanning(2, 3));
        params.safe_prob = 1.0;
        let inst = gen_random(&params, 7).unwrap();
        assert!(inst.graph.edges().iter().all(|r| r.is_safe()));
        let plain = Requirement::spanning(2, 0);
        assert!(check_feasible(&inst.graph, &inst.graph.all_edges(), &plain)
            .unwrap()
            .is_feasible());
    }
}
