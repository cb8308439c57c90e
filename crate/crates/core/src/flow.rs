//! Integral max-flow, min-cost flow of a prescribed value, and path
//! decomposition over undirected capacitated multigraphs.

use std::collections::{BTreeMap, VecDeque};

use num::Zero;

use crate::error::{FlexError, Result};
use crate::graph::{Cost, EdgeId, EdgeSet, FlexGraph, Vertex, VertexSet};

/// One undirected unit of capacity, tagged with the graph edge it realizes.
/// Several arcs may share an origin (duplicated edges).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetArc {
    pub origin: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub cap: i64,
    pub cost: Cost,
}

#[derive(Clone, Debug)]
pub struct CapacitatedNet {
    pub n: usize,
    pub arcs: Vec<NetArc>,
}

impl CapacitatedNet {
    pub fn new(n: usize, arcs: Vec<NetArc>) -> Result<Self> {
        for a in &arcs {
            if a.cap < 1 {
                return Err(FlexError::structural(format!(
                    "arc for edge {} has non-positive capacity {}",
                    a.origin, a.cap
                )));
            }
            if a.u >= n || a.v >= n || a.u == a.v {
                return Err(FlexError::structural(format!("bad arc endpoints for edge {}", a.origin)));
            }
        }
        Ok(CapacitatedNet { n, arcs })
    }

    fn arc(graph: &FlexGraph, e: EdgeId, cap: i64) -> NetArc {
        let rec = graph.edge(e);
        NetArc {
            origin: e,
            u: rec.u,
            v: rec.v,
            cap,
            cost: rec.cost,
        }
    }

    /// Every edge of `edges` with the same capacity.
    pub fn uniform(graph: &FlexGraph, edges: &EdgeSet, cap: i64) -> Self {
        let arcs = edges.iter().map(|&e| Self::arc(graph, e, cap)).collect();
        CapacitatedNet {
            n: graph.vertex_count(),
            arcs,
        }
    }

    /// Safe edges get `safe_cap`, unsafe edges `unsafe_cap`.
    pub fn by_safety(graph: &FlexGraph, edges: &EdgeSet, safe_cap: i64, unsafe_cap: i64) -> Self {
        let arcs = edges
            .iter()
            .map(|&e| {
                let cap = if graph.edge(e).is_safe() { safe_cap } else { unsafe_cap };
                Self::arc(graph, e, cap)
            })
            .collect();
        CapacitatedNet {
            n: graph.vertex_count(),
            arcs,
        }
    }

    /// Unit arcs where every safe edge appears twice, at its full cost per copy.
    pub fn duplicated_safe(graph: &FlexGraph, edges: &EdgeSet) -> Self {
        let mut arcs = Vec::new();
        for &e in edges {
            arcs.push(Self::arc(graph, e, 1));
            if graph.edge(e).is_safe() {
                arcs.push(Self::arc(graph, e, 1));
            }
        }
        CapacitatedNet {
            n: graph.vertex_count(),
            arcs,
        }
    }
}

/// Net flow per arc, positive in the arc's `u → v` direction.
#[derive(Clone, Debug)]
pub struct FlowResult {
    pub value: i64,
    pub arc_flow: Vec<i64>,
    /// Arc flows summed per originating edge (only nonzero entries).
    pub edge_flow: BTreeMap<EdgeId, i64>,
    /// Source side of a minimum cut.
    pub source_side: VertexSet,
}

fn aggregate(net: &CapacitatedNet, arc_flow: &[i64]) -> BTreeMap<EdgeId, i64> {
    let mut out = BTreeMap::new();
    for (a, &f) in net.arcs.iter().zip(arc_flow) {
        *out.entry(a.origin).or_insert(0) += f;
    }
    out.retain(|_, f| *f != 0);
    out
}

fn adjacency(net: &CapacitatedNet) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); net.n];
    for (i, a) in net.arcs.iter().enumerate() {
        adj[a.u].push(i);
        adj[a.v].push(i);
    }
    adj
}

/// Integral maximum `s`–`t` flow (shortest augmenting paths).
pub fn max_flow(net: &CapacitatedNet, s: Vertex, t: Vertex) -> Result<FlowResult> {
    if s >= net.n || t >= net.n {
        return Err(FlexError::structural("flow terminal out of range"));
    }
    if s == t {
        return Err(FlexError::structural("max flow needs s != t"));
    }
    let adj = adjacency(net);
    let mut flow = vec![0i64; net.arcs.len()];
    let residual = |flow: &[i64], arc: usize, from: Vertex| -> i64 {
        let a = &net.arcs[arc];
        if from == a.u {
            a.cap - flow[arc]
        } else {
            a.cap + flow[arc]
        }
    };
    let mut value = 0i64;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; net.n];
        let mut seen = vec![false; net.n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &arc in &adj[x] {
                let y = if net.arcs[arc].u == x { net.arcs[arc].v } else { net.arcs[arc].u };
                if !seen[y] && residual(&flow, arc, x) > 0 {
                    seen[y] = true;
                    pred[y] = Some(arc);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            let source_side = VertexSet::from_vertices((0..net.n).filter(|&v| seen[v]));
            return Ok(FlowResult {
                value,
                edge_flow: aggregate(net, &flow),
                arc_flow: flow,
                source_side,
            });
        }
        let mut bottleneck = i64::MAX;
        let mut y = t;
        while y != s {
            let arc = pred[y].expect("path");
            let x = if net.arcs[arc].u == y { net.arcs[arc].v } else { net.arcs[arc].u };
            bottleneck = bottleneck.min(residual(&flow, arc, x));
            y = x;
        }
        let mut y = t;
        while y != s {
            let arc = pred[y].expect("path");
            let a = &net.arcs[arc];
            let x = if a.u == y { a.v } else { a.u };
            if x == a.u {
                flow[arc] += bottleneck;
            } else {
                flow[arc] -= bottleneck;
            }
            y = x;
        }
        value += bottleneck;
    }
}

#[derive(Clone, Debug)]
pub struct CostFlow {
    pub value: i64,
    /// Σ over arcs of |flow| · cost.
    pub cost: Cost,
    pub arc_flow: Vec<i64>,
    pub edge_flow: BTreeMap<EdgeId, i64>,
    /// Edges carrying nonzero net flow.
    pub support: EdgeSet,
}

struct DirEdge {
    to: Vertex,
    cap: i64,
    cost: Cost,
    arc: usize,
    forward: bool,
}

/// Minimum-cost integral `s`–`t` flow of exactly `target` units, by successive
/// shortest paths with vertex potentials.
pub fn min_cost_flow(net: &CapacitatedNet, s: Vertex, t: Vertex, target: i64) -> Result<CostFlow> {
    if s >= net.n || t >= net.n || s == t {
        return Err(FlexError::structural("min-cost flow needs distinct in-range terminals"));
    }
    // Each undirected arc becomes two directed edges, each with a residual reverse.
    let mut edges: Vec<DirEdge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); net.n];
    for (i, a) in net.arcs.iter().enumerate() {
        for (from, to, forward) in [(a.u, a.v, true), (a.v, a.u, false)] {
            adj[from].push(edges.len());
            edges.push(DirEdge {
                to,
                cap: a.cap,
                cost: a.cost,
                arc: i,
                forward,
            });
            adj[to].push(edges.len());
            edges.push(DirEdge {
                to: from,
                cap: 0,
                cost: -a.cost,
                arc: i,
                forward: !forward,
            });
        }
    }
    let mut potential = vec![Cost::zero(); net.n];
    let mut value = 0i64;
    let mut total_cost = Cost::zero();
    while value < target {
        // Dense Dijkstra on reduced costs.
        let mut dist: Vec<Option<Cost>> = vec![None; net.n];
        let mut pred: Vec<Option<usize>> = vec![None; net.n];
        let mut done = vec![false; net.n];
        dist[s] = Some(Cost::zero());
        loop {
            let mut best: Option<(Vertex, Cost)> = None;
            for v in 0..net.n {
                if done[v] {
                    continue;
                }
                if let Some(d) = dist[v] {
                    if best.as_ref().map_or(true, |(_, bd)| d < *bd) {
                        best = Some((v, d));
                    }
                }
            }
            let Some((x, dx)) = best else { break };
            done[x] = true;
            for &ei in &adj[x] {
                let e = &edges[ei];
                if e.cap <= 0 || done[e.to] {
                    continue;
                }
                let nd = dx + e.cost + potential[x] - potential[e.to];
                if dist[e.to].map_or(true, |d| nd < d) {
                    dist[e.to] = Some(nd);
                    pred[e.to] = Some(ei);
                }
            }
        }
        if dist[t].is_none() {
            let reach = VertexSet::from_vertices((0..net.n).filter(|&v| dist[v].is_some()));
            return Err(FlexError::infeasible(
                format!("flow value {target} unattainable; maximum is {value}"),
                Some(reach),
            ));
        }
        for v in 0..net.n {
            if let Some(d) = dist[v] {
                potential[v] += d;
            }
        }
        let mut push = target - value;
        let mut y = t;
        while y != s {
            let ei = pred[y].expect("path");
            push = push.min(edges[ei].cap);
            y = edges[ei ^ 1].to;
        }
        let mut y = t;
        while y != s {
            let ei = pred[y].expect("path");
            edges[ei].cap -= push;
            edges[ei ^ 1].cap += push;
            total_cost += edges[ei].cost * Cost::from_integer(i128::from(push));
            y = edges[ei ^ 1].to;
        }
        value += push;
    }
    let mut arc_flow = vec![0i64; net.arcs.len()];
    // flow on a directed edge is the capacity sitting on its reverse
    for pair in 0..edges.len() / 2 {
        let fwd = &edges[2 * pair];
        let used = edges[2 * pair + 1].cap;
        if fwd.forward {
            arc_flow[fwd.arc] += used;
        } else {
            arc_flow[fwd.arc] -= used;
        }
    }
    let edge_flow = aggregate(net, &arc_flow);
    let support = edge_flow.keys().copied().collect();
    Ok(CostFlow {
        value,
        cost: total_cost,
        arc_flow,
        edge_flow,
        support,
    })
}

/// An `s`–`t` path without repeated vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<Vertex>,
}

impl Path {
    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }
}

/// Splits an integral flow (signed per edge, relative to the edge's `u → v`)
/// into unit `s`–`t` paths after cancelling flow cycles.
pub fn decompose(
    graph: &FlexGraph,
    edge_flow: &BTreeMap<EdgeId, i64>,
    s: Vertex,
    t: Vertex,
) -> Result<Vec<Path>> {
    let n = graph.vertex_count();
    if s >= n || t >= n || s == t {
        return Err(FlexError::structural("decomposition needs distinct in-range terminals"));
    }
    // directed units: (edge, from, to, count)
    let mut units: Vec<(EdgeId, Vertex, Vertex, i64)> = Vec::new();
    let mut balance = vec![0i64; n];
    for (&e, &f) in edge_flow {
        if e >= graph.edge_count() {
            return Err(FlexError::structural(format!("flow on unknown edge {e}")));
        }
        if f == 0 {
            continue;
        }
        let rec = graph.edge(e);
        let (from, to) = if f > 0 { (rec.u, rec.v) } else { (rec.v, rec.u) };
        units.push((e, from, to, f.abs()));
        balance[from] += f.abs();
        balance[to] -= f.abs();
    }
    for v in 0..n {
        if v != s && v != t && balance[v] != 0 {
            return Err(FlexError::structural(format!(
                "flow conservation fails at vertex {v} (excess {})",
                -balance[v]
            )));
        }
    }
    if balance[s] + balance[t] != 0 || balance[s] < 0 {
        return Err(FlexError::structural("flow does not run from s to t"));
    }
    let value = balance[s];
    units.sort_by_key(|u| u.0);

    while let Some(cycle) = find_cycle(n, &units) {
        let m = cycle.iter().map(|&i| units[i].3).min().unwrap_or(0);
        for &i in &cycle {
            units[i].3 -= m;
        }
    }

    let mut paths = Vec::with_capacity(value as usize);
    for _ in 0..value {
        let mut vertices = vec![s];
        let mut path_edges = Vec::new();
        let mut x = s;
        while x != t {
            let next = units
                .iter()
                .position(|u| u.1 == x && u.3 > 0)
                .ok_or_else(|| FlexError::Internal("flow path got stuck".into()))?;
            units[next].3 -= 1;
            path_edges.push(units[next].0);
            x = units[next].2;
            vertices.push(x);
            if vertices.len() > n {
                return Err(FlexError::Internal("cycle survived cancellation".into()));
            }
        }
        paths.push(Path {
            edges: path_edges,
            vertices,
        });
    }
    Ok(paths)
}

/// Indices of units forming a directed cycle in the positive-count support.
fn find_cycle(n: usize, units: &[(EdgeId, Vertex, Vertex, i64)]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = finished
    let mut color = vec![0u8; n];
    let mut via: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(Vertex, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&mut (x, ref mut cursor)) = stack.last_mut() {
            let mut advanced = false;
            while *cursor < units.len() {
                let i = *cursor;
                *cursor += 1;
                let (_, from, to, c) = units[i];
                if from != x || c <= 0 {
                    continue;
                }
                if color[to] == 1 {
                    let mut cycle = vec![i];
                    let mut y = x;
                    while y != to {
                        let j = via[y].expect("stack predecessor");
                        cycle.push(j);
                        y = units[j].1;
                    }
                    return Some(cycle);
                }
                if color[to] == 0 {
                    color[to] = 1;
                    via[to] = Some(i);
                    stack.push((to, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                color[x] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Real-valued max flow on undirected arcs `(u, v, capacity)`. Returns the
/// value and the source side of a minimum cut.
pub fn max_flow_real(n: usize, arcs: &[(Vertex, Vertex, f64)], s: Vertex, t: Vertex) -> (f64, VertexSet) {
    const EPS: f64 = 1e-12;
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v, _)) in arcs.iter().enumerate() {
        adj[u].push(i);
        adj[v].push(i);
    }
    let mut flow = vec![0.0f64; arcs.len()];
    let residual = |flow: &[f64], i: usize, from: Vertex| -> f64 {
        let (u, _, c) = arcs[i];
        if from == u {
            c - flow[i]
        } else {
            c + flow[i]
        }
    };
    let mut value = 0.0;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &i in &adj[x] {
                let y = if arcs[i].0 == x { arcs[i].1 } else { arcs[i].0 };
                if !seen[y] && residual(&flow, i, x) > EPS {
                    seen[y] = true;
                    pred[y] = Some(i);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return (value, VertexSet::from_vertices((0..n).filter(|&v| seen[v])));
        }
        let mut bottleneck = f64::INFINITY;
        let mut y = t;
        while y != s {
            let i = pred[y].expect("path");
            let x = if arcs[i].0 == y { arcs[i].1 } else { arcs[i].0 };
            bottleneck = bottleneck.min(residual(&flow, i, x));
            y = x;
        }
        let mut y = t;
        while y != s {
            let i = pred[y].expect("path");
            let x = if arcs[i].0 == y { arcs[i].1 } else { arcs[i].0 };
            if x == arcs[i].0 {
                flow[i] += bottleneck;
            } else {
                flow[i] -= bottleneck;
            }
            y = x;
        }
        value += bottleneck;
    }
}
