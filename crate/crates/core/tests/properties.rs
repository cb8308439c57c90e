//! Property tests: cut-function identities, agreement between independent
//! implementations, and monotonicity facts.

use proptest::prelude::*;

use flexnet::cuts::{uncross, CutFamily};
use flexnet::flow::{decompose, max_flow, min_cost_flow, CapacitatedNet};
use flexnet::graph::{
    boundary, is_flex_connected_pair, is_flex_connected_pair_by_flow, scope_cuts, Cost, EdgeSet, VertexSet,
};
use flexnet::lp::{
    cutting_plane_solve, prefix_b, separate_by_cut_scan, separate_general, FractionalSolution, LpConstraint,
};
use flexnet::oracle::{opt_cover, opt_flex};
use flexnet::{check_feasible, FlexGraph, Requirement, Safety, Scope};

#[derive(Clone, Debug)]
struct Spec {
    n: usize,
    edges: Vec<(usize, usize, bool, i64)>,
}

impl Spec {
    fn graph(&self) -> FlexGraph {
        let mut g = FlexGraph::new(self.n).unwrap();
        for &(u, v, safe, c) in &self.edges {
            let safety = if safe { Safety::Safe } else { Safety::Unsafe };
            g.add(u, v, c, safety).unwrap();
        }
        g
    }
}

fn graph_spec(max_n: usize, max_m: usize) -> impl Strategy<Value = Spec> {
    (3..=max_n).prop_flat_map(move |n| {
        let edge = (0..n, 1..n, any::<bool>(), 1i64..10).prop_map(move |(u, d, s, c)| (u, (u + d) % n, s, c));
        proptest::collection::vec(edge, 1..=max_m).prop_map(move |edges| Spec { n, edges })
    })
}

fn subset(m: usize, bits: u64) -> EdgeSet {
    (0..m).filter(|e| bits >> (e % 64) & 1 == 1).collect()
}

fn delta(g: &FlexGraph, f: &EdgeSet, s: VertexSet) -> usize {
    boundary(g, f, s).unwrap().total()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_function_identities(spec in graph_spec(7, 14), fbits: u64, a: u64, b: u64) {
        let g = spec.graph();
        let n = g.vertex_count();
        let f = subset(g.edge_count(), fbits);
        let full = VertexSet::full(n);
        let a = VertexSet(a).intersection(full);
        let b = VertexSet(b).intersection(full);
        // symmetry
        prop_assert_eq!(delta(&g, &f, a), delta(&g, &f, a.complement(n)));
        // submodularity and posimodularity
        prop_assert!(delta(&g, &f, a) + delta(&g, &f, b)
            >= delta(&g, &f, a.union(b)) + delta(&g, &f, a.intersection(b)));
        prop_assert!(delta(&g, &f, a) + delta(&g, &f, b)
            >= delta(&g, &f, a.difference(b)) + delta(&g, &f, b.difference(a)));
    }

    #[test]
    fn feasibility_is_monotone(spec in graph_spec(6, 14), fbits: u64, extra: u64, p in 1u32..3, q in 0u32..3) {
        let g = spec.graph();
        let f = subset(g.edge_count(), fbits);
        let bigger: EdgeSet = f.union(&subset(g.edge_count(), extra)).copied().collect();
        let req = Requirement::spanning(p, q);
        if check_feasible(&g, &f, &req).unwrap().is_feasible() {
            prop_assert!(check_feasible(&g, &bigger, &req).unwrap().is_feasible());
        }
    }

    #[test]
    fn pair_checks_agree(spec in graph_spec(6, 14), fbits: u64, p in 1u32..4, q in 0u32..4) {
        let g = spec.graph();
        let f = subset(g.edge_count(), fbits);
        let t = g.vertex_count() - 1;
        prop_assert_eq!(
            is_flex_connected_pair(&g, &f, 0, t, p, q).unwrap(),
            is_flex_connected_pair_by_flow(&g, &f, 0, t, p, q).unwrap()
        );
    }

    #[test]
    fn flex_connectivity_is_transitive(spec in graph_spec(6, 16), fbits: u64, p in 1u32..3, q in 0u32..3) {
        let g = spec.graph();
        let f = subset(g.edge_count(), fbits);
        let n = g.vertex_count();
        let (u, v, w) = (0, 1, n - 1);
        if is_flex_connected_pair(&g, &f, u, v, p, q).unwrap() && is_flex_connected_pair(&g, &f, v, w, p, q).unwrap() {
            prop_assert!(is_flex_connected_pair(&g, &f, u, w, p, q).unwrap());
        }
    }

    #[test]
    fn max_flow_equals_min_cut(spec in graph_spec(7, 16), caps in proptest::collection::vec(1i64..4, 16)) {
        let g = spec.graph();
        let n = g.vertex_count();
        let all = g.all_edges();
        let mut net = CapacitatedNet::uniform(&g, &all, 1);
        for (arc, c) in net.arcs.iter_mut().zip(&caps) {
            arc.cap = *c;
        }
        let flow = max_flow(&net, 0, n - 1).unwrap();
        let brute = scope_cuts(&g, &Scope::Pair(0, n - 1), 20)
            .unwrap()
            .into_iter()
            .map(|side| {
                net.arcs.iter().filter(|a| side.contains(a.u) != side.contains(a.v)).map(|a| a.cap).sum::<i64>()
            })
            .min()
            .unwrap();
        prop_assert_eq!(flow.value, brute);
    }

    #[test]
    fn unit_flow_decomposes_into_value_paths(spec in graph_spec(7, 16)) {
        let g = spec.graph();
        let n = g.vertex_count();
        let net = CapacitatedNet::uniform(&g, &g.all_edges(), 1);
        let flow = max_flow(&net, 0, n - 1).unwrap();
        let paths = decompose(&g, &flow.edge_flow, 0, n - 1).unwrap();
        prop_assert_eq!(paths.len() as i64, flow.value);
        let mut used = EdgeSet::new();
        for p in &paths {
            prop_assert_eq!(p.vertices.first().copied(), Some(0));
            prop_assert_eq!(p.vertices.last().copied(), Some(n - 1));
            for &e in &p.edges {
                prop_assert!(used.insert(e), "edge {} on two unit paths", e);
            }
        }
    }

    #[test]
    fn min_cost_flow_matches_exact_k_connectivity(spec in graph_spec(6, 12), k in 1i64..3) {
        // cheapest k edge-disjoint s-t paths == cheapest (k,0) edge set
        let g = spec.graph();
        let n = g.vertex_count();
        let req = Requirement::pair(k as u32, 0, 0, n - 1);
        let net = CapacitatedNet::uniform(&g, &g.all_edges(), 1);
        match opt_flex(&g, &req) {
            Ok(opt) => {
                let flow = min_cost_flow(&net, 0, n - 1, k).unwrap();
                prop_assert_eq!(flow.cost, opt.cost);
            }
            Err(_) => prop_assert!(min_cost_flow(&net, 0, n - 1, k).is_err()),
        }
    }

    #[test]
    fn lp_is_a_lower_bound(spec in graph_spec(6, 12), p in 1u32..3, q in 0u32..3) {
        let g = spec.graph();
        let n = g.vertex_count();
        let req = Requirement::pair(p, q, 0, n - 1);
        if let Ok(opt) = opt_flex(&g, &req) {
            let lp = cutting_plane_solve(&g, &req).unwrap();
            prop_assert!(lp.value <= flexnet::graph::cost_to_f64(&opt.cost) + 1e-6);
            prop_assert!((lp.value - lp.dual_value).abs() < 1e-6);
            prop_assert!(separate_by_cut_scan(&g, &req, &lp.x).unwrap().is_none());
        }
    }

    #[test]
    fn general_and_scan_oracles_agree(spec in graph_spec(6, 12), vals in proptest::collection::vec(0.0f64..=1.0, 12), p in 1u32..3, q in 0u32..4) {
        let g = spec.graph();
        let n = g.vertex_count();
        let req = Requirement::pair(p, q, 0, n - 1);
        let x = FractionalSolution::new(&g, vals[..g.edge_count()].to_vec()).unwrap();
        let a = separate_general(&g, &req, &x).unwrap();
        let b = separate_by_cut_scan(&g, &req, &x).unwrap();
        prop_assert_eq!(a.is_some(), b.is_some());
        for c in a.iter().chain(b.iter()) {
            prop_assert!(c.is_violated(&g, &x));
        }
    }

    #[test]
    fn prefix_b_is_the_worst_b(spec in graph_spec(6, 12), vals in proptest::collection::vec(0.0f64..=1.0, 12), side: u64, q in 0u32..4) {
        let g = spec.graph();
        let n = g.vertex_count();
        let side = VertexSet(side).intersection(VertexSet::full(n).difference(VertexSet::singleton(n - 1)));
        prop_assume!(!side.is_empty());
        let x = FractionalSolution::new(&g, vals[..g.edge_count()].to_vec()).unwrap();
        let mass = |removed: &EdgeSet| -> f64 {
            (0..g.edge_count())
                .filter(|e| g.edge(*e).crosses(side) && !removed.contains(e))
                .map(|e| x.get(e))
                .sum()
        };
        let prefix = mass(&prefix_b(&g, q, &x, side));
        let crossing_unsafe: Vec<usize> =
            (0..g.edge_count()).filter(|&e| !g.edge(e).is_safe() && g.edge(e).crosses(side)).collect();
        for bits in 0u32..(1 << crossing_unsafe.len()) {
            if bits.count_ones() > q {
                continue;
            }
            let b: EdgeSet = crossing_unsafe.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
            prop_assert!(prefix <= mass(&b) + 1e-12);
        }
    }

    #[test]
    fn exact_optimum_is_minimal(spec in graph_spec(6, 12), p in 1u32..3, q in 0u32..3) {
        let g = spec.graph();
        let req = Requirement::pair(p, q, 0, g.vertex_count() - 1);
        if let Ok(opt) = opt_flex(&g, &req) {
            for &e in &opt.edges {
                let mut less = opt.edges.clone();
                less.remove(&e);
                prop_assert!(!check_feasible(&g, &less, &req).unwrap().is_feasible());
            }
        }
    }

    #[test]
    fn opt_cover_grows_with_the_family(spec in graph_spec(6, 14), a in proptest::collection::vec(1u64..63, 1..4), b in proptest::collection::vec(1u64..63, 1..4)) {
        let g = spec.graph();
        let n = g.vertex_count();
        let full = VertexSet::full(n);
        let clean = |v: &Vec<u64>| -> Vec<VertexSet> {
            v.iter().map(|&s| VertexSet(s).intersection(full)).filter(|s| !s.is_empty() && *s != full).collect()
        };
        let (sa, sb) = (clean(&a), clean(&b));
        prop_assume!(!sa.is_empty() && !sb.is_empty());
        let fa = CutFamily::from_sets(n, sa).unwrap();
        let fb = CutFamily::from_sets(n, sb).unwrap();
        let both = fa.union(&fb).unwrap();
        let all = g.all_edges();
        if let Ok(ob) = opt_cover(&g, &all, &both) {
            let oa = opt_cover(&g, &all, &fa).unwrap();
            let oc = opt_cover(&g, &all, &fb).unwrap();
            prop_assert!(ob.cost >= oa.cost.max(oc.cost));
        }
    }
}

#[test]
fn uncross_matches_definition() {
    let n = 5;
    let sets = [0b00011u64, 0b00110, 0b00010, 0b00111, 0b00001, 0b00100];
    let fam = CutFamily::from_sets(n, sets.iter().map(|&s| VertexSet(s))).unwrap();
    let (a, b) = (VertexSet(0b00011), VertexSet(0b00110));
    assert!(uncross(&fam, a, b));
    let without_union = CutFamily::from_sets(n, [a, b, VertexSet(0b00001)]).unwrap();
    assert!(!uncross(&without_union, a, b));
}

#[test]
fn lp_is_monotone_in_q_on_gap() {
    let inst = flexnet::instances::gap_instance(4).unwrap();
    let Scope::Pair(s, t) = inst.requirement.scope else { unreachable!() };
    let mut last = 0.0;
    for q in 0..=4 {
        let lp = cutting_plane_solve(&inst.graph, &Requirement::pair(1, q, s, t)).unwrap();
        assert!(lp.value >= last - 1e-7, "LP dropped from {last} to {} at q = {q}", lp.value);
        last = lp.value;
    }
}

#[test]
fn pooled_constraints_hold_at_the_optimum() {
    let inst = flexnet::instances::gap_instance(3).unwrap();
    let lp = cutting_plane_solve(&inst.graph, &inst.requirement).unwrap();
    assert!(!lp.pool.is_empty());
    for c in &lp.pool {
        let c: &LpConstraint = c;
        assert!(!c.is_violated(&inst.graph, &lp.x));
    }
    assert_eq!(separate_general(&inst.graph, &inst.requirement, &lp.x).unwrap(), None);
    let zero_cost = Cost::from_integer(0);
    assert!(inst.graph.edges().iter().all(|r| r.cost > zero_cost));
}
