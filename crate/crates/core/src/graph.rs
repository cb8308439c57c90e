//! Multigraph with safe/unsafe edges, cut arithmetic, contraction and the
//! ground-truth feasibility checker for (p,q)-flex-connectivity.
//!
//! A pair `u, v` is (p,q)-flex-connected in an edge set `F` when every cut
//! separating them carries at least `p` safe edges of `F` or at least `p + q`
//! edges of `F` in total. Equivalently, `u` and `v` stay `p`-edge-connected
//! after deleting any `q` unsafe edges of `F`.

use std::collections::BTreeSet;
use std::fmt;

use num::rational::Ratio;
use num::{ToPrimitive, Zero};

use crate::error::{FlexError, Result};
use crate::flow::{self, CapacitatedNet};

/// Exact nonnegative edge cost.
pub type Cost = Ratio<i128>;
pub type EdgeId = usize;
pub type Vertex = usize;
pub type EdgeSet = BTreeSet<EdgeId>;

/// Hard limit on vertex count; vertex sets are 64-bit masks.
pub const MAX_VERTICES: usize = 64;
/// Default bound on the vertex count for exhaustive cut enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 20;

pub fn cost_to_f64(c: &Cost) -> f64 {
    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
}

/// Parses a nonnegative decimal (`0.5`, `12`, `3.125`) or fraction (`1/3`) exactly.
pub fn parse_cost(text: &str) -> std::result::Result<Cost, String> {
    let text = text.trim();
    if text.starts_with('-') {
        return Err(format!("negative cost `{text}`"));
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: i128 = n.parse().map_err(|_| format!("bad cost `{text}`"))?;
        let d: i128 = d.parse().map_err(|_| format!("bad cost `{text}`"))?;
        if d <= 0 {
            return Err(format!("bad denominator in `{text}`"));
        }
        return Ok(Cost::new(n, d));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err("empty cost".to_string());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("bad cost `{text}`"));
    }
    if frac_part.len() > 30 {
        return Err(format!("too many decimal places in `{text}`"));
    }
    let whole: i128 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| format!("cost `{text}` out of range"))?
    };
    let mut numer = whole;
    let mut denom: i128 = 1;
    for ch in frac_part.chars() {
        let digit = i128::from(ch.to_digit(10).unwrap_or(0));
        numer = numer
            .checked_mul(10)
            .and_then(|v| v.checked_add(digit))
            .ok_or_else(|| format!("cost `{text}` out of range"))?;
        denom *= 10;
    }
    Ok(Cost::new(numer, denom))
}

/// Formats a cost as a terminating decimal when possible, otherwise as `a/b`.
pub fn format_cost(c: &Cost) -> String {
    let mut d = *c.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", c.numer(), c.denom());
    }
    let places = twos.max(fives);
    let scale = 10i128.pow(places);
    let scaled = c.numer() * (scale / c.denom());
    if places == 0 {
        return scaled.to_string();
    }
    let int_part = scaled / scale;
    let frac = scaled % scale;
    let frac = format!("{:0width$}", frac, width = places as usize);
    format!("{int_part}.{}", frac.trim_end_matches('0'))
}

/// A set of vertices stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(vs: I) -> Self {
        VertexSet(vs.into_iter().fold(0u64, |m, v| m | (1u64 << v)))
    }

    #[inline]
    pub fn contains(self, v: Vertex) -> bool {
        (self.0 >> v) & 1 == 1
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0 |= 1u64 << v;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & Self::full(n).0)
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// `A ∩ B`, `A − B` and `B − A` all nonempty.
    pub fn properly_intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0 && self.0 & !other.0 != 0 && other.0 & !self.0 != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Vertex> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// Side of the cut not containing `anchor`.
    pub fn canonical(self, anchor: Vertex, n: usize) -> Self {
        if self.contains(anchor) {
            self.complement(n)
        } else {
            self
        }
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Safety {
    Safe,
    Unsafe,
}

impl Safety {
    pub fn is_safe(self) -> bool {
        self == Safety::Safe
    }

    pub fn tag(self) -> char {
        match self {
            Safety::Safe => 'S',
            Safety::Unsafe => 'U',
        }
    }
}

/// An undirected edge; endpoints are stored with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub u: Vertex,
    pub v: Vertex,
    pub cost: Cost,
    pub safety: Safety,
}

impl EdgeRecord {
    #[inline]
    pub fn crosses(&self, set: VertexSet) -> bool {
        set.contains(self.u) != set.contains(self.v)
    }

    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn is_safe(&self) -> bool {
        self.safety.is_safe()
    }

    fn sort_key(&self) -> (Vertex, Vertex, Safety, Cost) {
        (self.u, self.v, self.safety, self.cost)
    }
}

/// Undirected multigraph whose edges are partitioned into safe and unsafe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlexGraph {
    n: usize,
    edges: Vec<EdgeRecord>,
}

impl FlexGraph {
    pub fn new(vertex_count: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(FlexError::structural("graph needs at least one vertex"));
        }
        if vertex_count > MAX_VERTICES {
            return Err(FlexError::Capacity {
                what: "vertex count",
                bound: MAX_VERTICES,
                actual: vertex_count,
            });
        }
        Ok(FlexGraph {
            n: vertex_count,
            edges: Vec::new(),
        })
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, cost: Cost, safety: Safety) -> Result<EdgeId> {
        if u >= self.n || v >= self.n {
            return Err(FlexError::structural(format!(
                "edge {u}-{v} references a vertex outside 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(FlexError::structural(format!("self-loop at vertex {u}")));
        }
        if cost < Cost::zero() {
            return Err(FlexError::structural(format!("negative cost on edge {u}-{v}")));
        }
        self.edges.push(EdgeRecord {
            u: u.min(v),
            v: u.max(v),
            cost,
            safety,
        });
        Ok(self.edges.len() - 1)
    }

    /// Convenience for integer costs.
    pub fn add(&mut self, u: Vertex, v: Vertex, cost: i64, safety: Safety) -> Result<EdgeId> {
        self.add_edge(u, v, Cost::from_integer(i128::from(cost)), safety)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRecord {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn all_edges(&self) -> EdgeSet {
        (0..self.edges.len()).collect()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn cost_of<'a, I: IntoIterator<Item = &'a EdgeId>>(&self, ids: I) -> Cost {
        ids.into_iter()
            .fold(Cost::zero(), |acc, &e| acc + self.edges[e].cost)
    }

    pub fn safe_edges(&self) -> EdgeSet {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_safe()).collect()
    }

    pub fn unsafe_edges(&self) -> EdgeSet {
        (0..self.edges.len()).filter(|&e| !self.edges[e].is_safe()).collect()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(FlexError::structural(format!(
                "vertex {v} outside 0..{}",
                self.n
            )))
        }
    }

    pub fn check_edges(&self, f: &EdgeSet) -> Result<()> {
        match f.iter().next_back() {
            Some(&e) if e >= self.edges.len() => Err(FlexError::structural(format!(
                "edge id {e} outside 0..{}",
                self.edges.len()
            ))),
            _ => Ok(()),
        }
    }

    pub fn check_set(&self, s: VertexSet) -> Result<()> {
        if s.is_subset(self.vertices()) {
            Ok(())
        } else {
            Err(FlexError::structural(format!(
                "vertex set {s} is not within 0..{}",
                self.n
            )))
        }
    }

    /// Reorders edges by (endpoints, safety, cost). Returns the sorted graph and
    /// the map from old edge id to new edge id.
    pub fn canonicalized(&self) -> (FlexGraph, Vec<EdgeId>) {
        let mut order: Vec<EdgeId> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            self.edges[a]
                .sort_key()
                .cmp(&self.edges[b].sort_key())
                .then(a.cmp(&b))
        });
        let mut old_to_new = vec![0; self.edges.len()];
        for (new, &old) in order.iter().enumerate() {
            old_to_new[old] = new;
        }
        let edges = order.iter().map(|&e| self.edges[e].clone()).collect();
        (FlexGraph { n: self.n, edges }, old_to_new)
    }

    pub fn is_canonical(&self) -> bool {
        self.edges
            .windows(2)
            .all(|w| w[0].sort_key() <= w[1].sort_key())
    }
}

/// Where a connectivity requirement applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    Pair(Vertex, Vertex),
    Terminals(Vec<Vertex>),
    Spanning,
}

impl Scope {
    /// The vertex that canonical cuts exclude.
    pub fn anchor(&self) -> Vertex {
        match self {
            Scope::Pair(_, t) => *t,
            Scope::Terminals(ts) => ts.iter().copied().min().unwrap_or(0),
            Scope::Spanning => 0,
        }
    }

    /// Does the (arbitrary-side) set separate two scope vertices?
    pub fn separated_by(&self, set: VertexSet, n: usize) -> bool {
        if set.is_empty() || set == VertexSet::full(n) {
            return false;
        }
        match self {
            Scope::Pair(s, t) => set.contains(*s) != set.contains(*t),
            Scope::Terminals(ts) => {
                let inside = ts.iter().filter(|&&v| set.contains(v)).count();
                inside > 0 && inside < ts.len()
            }
            Scope::Spanning => true,
        }
    }

    pub fn validate(&self, graph: &FlexGraph) -> Result<()> {
        match self {
            Scope::Pair(s, t) => {
                graph.check_vertex(*s)?;
                graph.check_vertex(*t)?;
                if s == t {
                    return Err(FlexError::structural("pair scope needs s != t"));
                }
            }
            Scope::Terminals(ts) => {
                for &v in ts {
                    graph.check_vertex(v)?;
                }
                let distinct: BTreeSet<_> = ts.iter().collect();
                if distinct.len() < 2 {
                    return Err(FlexError::structural(
                        "terminal scope needs at least two distinct terminals",
                    ));
                }
            }
            Scope::Spanning => {
                if graph.vertex_count() < 2 {
                    return Err(FlexError::structural("spanning scope needs two vertices"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Pair(s, t) => write!(f, "pair {s} {t}"),
            Scope::Terminals(ts) => {
                write!(f, "terminals")?;
                for v in ts {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
            Scope::Spanning => write!(f, "spanning"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Requirement {
    pub p: u32,
    pub q: u32,
    pub scope: Scope,
}

impl Requirement {
    pub fn new(p: u32, q: u32, scope: Scope) -> Self {
        Requirement { p, q, scope }
    }

    pub fn pair(p: u32, q: u32, s: Vertex, t: Vertex) -> Self {
        Requirement::new(p, q, Scope::Pair(s, t))
    }

    pub fn spanning(p: u32, q: u32) -> Self {
        Requirement::new(p, q, Scope::Spanning)
    }

    /// Cut condition: `p` safe edges or `p + q` edges in total.
    #[inline]
    pub fn satisfied_by(&self, safe: usize, total: usize) -> bool {
        safe >= self.p as usize || total >= (self.p + self.q) as usize
    }
}

/// A chosen edge set with its cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub edges: EdgeSet,
    pub cost: Cost,
}

impl Solution {
    pub fn new(graph: &FlexGraph, edges: EdgeSet) -> Self {
        let cost = graph.cost_of(&edges);
        Solution { edges, cost }
    }

    pub fn empty() -> Self {
        Solution {
            edges: EdgeSet::new(),
            cost: Cost::zero(),
        }
    }

    pub fn union(&self, graph: &FlexGraph, other: &EdgeSet) -> Solution {
        let edges = self.edges.union(other).copied().collect();
        Solution::new(graph, edges)
    }

    pub fn cost_is_consistent(&self, graph: &FlexGraph) -> bool {
        graph.cost_of(&self.edges) == self.cost
    }
}

/// A cut stored by the side that excludes its anchor vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    pub members: VertexSet,
    pub anchor: Vertex,
}

impl Cut {
    /// Canonicalizes `side` against `anchor`. Fails on the empty set or all of V.
    pub fn new(side: VertexSet, anchor: Vertex, n: usize) -> Result<Cut> {
        if !side.is_subset(VertexSet::full(n)) || anchor >= n {
            return Err(FlexError::structural(format!("cut {side} is not within 0..{n}")));
        }
        let members = side.canonical(anchor, n);
        if members.is_empty() {
            return Err(FlexError::structural("a cut must be a nonempty proper subset"));
        }
        Ok(Cut { members, anchor })
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.members)
    }
}

/// Edges of some `F` crossing a cut, with safe/unsafe counts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Boundary {
    pub edges: Vec<EdgeId>,
    pub safe: usize,
    pub unsafe_count: usize,
}

impl Boundary {
    pub fn total(&self) -> usize {
        self.edges.len()
    }
}

/// δ_F(S): edges of `f` with exactly one endpoint in `side`.
pub fn boundary(graph: &FlexGraph, f: &EdgeSet, side: VertexSet) -> Result<Boundary> {
    graph.check_set(side)?;
    graph.check_edges(f)?;
    Ok(boundary_unchecked(graph, f.iter().copied(), side))
}

pub(crate) fn boundary_unchecked<I: IntoIterator<Item = EdgeId>>(
    graph: &FlexGraph,
    f: I,
    side: VertexSet,
) -> Boundary {
    let mut b = Boundary::default();
    for e in f {
        let rec = graph.edge(e);
        if rec.crosses(side) {
            b.edges.push(e);
            if rec.is_safe() {
                b.safe += 1;
            } else {
                b.unsafe_count += 1;
            }
        }
    }
    b
}

/// (safe, total) counts of `f` across `side`.
#[inline]
pub(crate) fn cut_counts(graph: &FlexGraph, f: &[EdgeId], side: VertexSet) -> (usize, usize) {
    let mut safe = 0;
    let mut total = 0;
    for &e in f {
        let rec = &graph.edges[e];
        if rec.crosses(side) {
            total += 1;
            if rec.is_safe() {
                safe += 1;
            }
        }
    }
    (safe, total)
}

/// All canonical cuts separating `scope`, in ascending mask order.
pub fn scope_cuts(graph: &FlexGraph, scope: &Scope, bound: usize) -> Result<Vec<VertexSet>> {
    scope.validate(graph)?;
    let n = graph.vertex_count();
    if n > bound {
        return Err(FlexError::Capacity {
            what: "vertex count for cut enumeration",
            bound,
            actual: n,
        });
    }
    let anchor = scope.anchor();
    let others: Vec<Vertex> = (0..n).filter(|&v| v != anchor).collect();
    let k = others.len();
    let mut out = Vec::new();
    for bits in 1u64..(1u64 << k) {
        let mut set = 0u64;
        let mut b = bits;
        while b != 0 {
            let i = b.trailing_zeros() as usize;
            set |= 1u64 << others[i];
            b &= b - 1;
        }
        let set = VertexSet(set);
        if scope.separated_by(set, n) {
            out.push(set);
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// `witness` is the lexicographically smallest violated canonical cut.
    Infeasible {
        witness: Cut,
        safe: usize,
        total: usize,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn witness(&self) -> Option<Cut> {
        match self {
            Feasibility::Feasible => None,
            Feasibility::Infeasible { witness, .. } => Some(*witness),
        }
    }
}

/// Decides whether `f` meets `req`, scanning every canonical scope cut.
pub fn check_feasible(graph: &FlexGraph, f: &EdgeSet, req: &Requirement) -> Result<Feasibility> {
    check_feasible_bounded(graph, f, req, DEFAULT_ENUMERATION_BOUND)
}

pub fn check_feasible_bounded(
    graph: &FlexGraph,
    f: &EdgeSet,
    req: &Requirement,
    bound: usize,
) -> Result<Feasibility> {
    graph.check_edges(f)?;
    let cuts = scope_cuts(graph, &req.scope, bound)?;
    let fv: Vec<EdgeId> = f.iter().copied().collect();
    let mut best: Option<(Vec<Vertex>, VertexSet, usize, usize)> = None;
    for set in cuts {
        let (safe, total) = cut_counts(graph, &fv, set);
        if !req.satisfied_by(safe, total) {
            let key = set.to_vec();
            if best.as_ref().map_or(true, |(k, ..)| key < *k) {
                best = Some((key, set, safe, total));
            }
        }
    }
    Ok(match best {
        None => Feasibility::Feasible,
        Some((_, set, safe, total)) => Feasibility::Infeasible {
            witness: Cut {
                members: set,
                anchor: req.scope.anchor(),
            },
            safe,
            total,
        },
    })
}

/// Pairwise flex-connectivity via the cut condition over every `u`–`v` cut.
pub fn is_flex_connected_pair(
    graph: &FlexGraph,
    f: &EdgeSet,
    u: Vertex,
    v: Vertex,
    p: u32,
    q: u32,
) -> Result<bool> {
    let req = Requirement::pair(p, q, u, v);
    Ok(check_feasible(graph, f, &req)?.is_feasible())
}

/// Pairwise flex-connectivity by deleting every set of at most `q` unsafe
/// edges of `f` and measuring `u`–`v` edge connectivity with a max flow.
pub fn is_flex_connected_pair_by_flow(
    graph: &FlexGraph,
    f: &EdgeSet,
    u: Vertex,
    v: Vertex,
    p: u32,
    q: u32,
) -> Result<bool> {
    graph.check_vertex(u)?;
    graph.check_vertex(v)?;
    graph.check_edges(f)?;
    if u == v {
        return Err(FlexError::structural("flex-connectivity needs u != v"));
    }
    let unsafe_in_f: Vec<EdgeId> = f.iter().copied().filter(|&e| !graph.edge(e).is_safe()).collect();
    let max_removed = (q as usize).min(unsafe_in_f.len());
    let mut removed = Vec::with_capacity(max_removed);
    let mut ok = true;
    for_each_subset_upto(&unsafe_in_f, max_removed, &mut removed, &mut |b: &[EdgeId]| {
        let kept: EdgeSet = f.iter().copied().filter(|e| !b.contains(e)).collect();
        let net = CapacitatedNet::uniform(graph, &kept, 1);
        let value = flow::max_flow(&net, u, v).map(|r| r.value).unwrap_or(0);
        if value < i64::from(p) {
            ok = false;
        }
        ok
    });
    Ok(ok)
}

/// Visits every subset of `items` with at most `k` elements; stops when `visit` returns false.
fn for_each_subset_upto<T: Copy>(
    items: &[T],
    k: usize,
    current: &mut Vec<T>,
    visit: &mut dyn FnMut(&[T]) -> bool,
) -> bool {
    fn rec<T: Copy>(
        items: &[T],
        start: usize,
        k: usize,
        current: &mut Vec<T>,
        visit: &mut dyn FnMut(&[T]) -> bool,
    ) -> bool {
        if !visit(current) {
            return false;
        }
        if current.len() == k {
            return true;
        }
        for i in start..items.len() {
            current.push(items[i]);
            let keep_going = rec(items, i + 1, k, current, visit);
            current.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(items, 0, k, current, visit)
}

/// Result of identifying a vertex set into one vertex.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: FlexGraph,
    /// New edge id → original edge id.
    pub edge_origin: Vec<EdgeId>,
    /// Original vertex → new vertex.
    pub vertex_map: Vec<Vertex>,
}

/// Identifies every vertex of `merge` with `into`. Self-loops are dropped,
/// parallel edges kept, and the surviving vertices renumbered in order.
pub fn contract(graph: &FlexGraph, merge: VertexSet, into: Vertex) -> Result<Contraction> {
    graph.check_set(merge)?;
    graph.check_vertex(into)?;
    if !merge.contains(into) {
        return Err(FlexError::structural(format!(
            "contraction target {into} is not in the merge set {merge}"
        )));
    }
    let n = graph.vertex_count();
    let mut vertex_map = vec![0; n];
    let mut next = 0;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if merge.contains(v) && v != into {
            continue;
        }
        *slot = next;
        next += 1;
    }
    for v in merge.iter() {
        vertex_map[v] = vertex_map[into];
    }
    let mut out = FlexGraph::new(next)?;
    let mut edge_origin = Vec::new();
    for (e, rec) in graph.edges().iter().enumerate() {
        let (a, b) = (vertex_map[rec.u], vertex_map[rec.v]);
        if a == b {
            continue;
        }
        out.add_edge(a, b, rec.cost, rec.safety)?;
        edge_origin.push(e);
    }
    Ok(Contraction {
        graph: out,
        edge_origin,
        vertex_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gap_instance;

    fn triangle() -> FlexGraph {
        let mut g = FlexGraph::new(3).unwrap();
        g.add(0, 1, 1, Safety::Safe).unwrap();
        g.add(1, 2, 1, Safety::Safe).unwrap();
        g.add(0, 2, 1, Safety::Safe).unwrap();
        g
    }

    #[test]
    fn rejects_self_loops_and_bad_vertices() {
        let mut g = FlexGraph::new(3).unwrap();
        assert!(matches!(g.add(1, 1, 1, Safety::Safe), Err(FlexError::Structural(_))));
        assert!(g.add(0, 3, 1, Safety::Safe).is_err());
        assert!(g.add_edge(0, 1, Cost::new(-1, 2), Safety::Safe).is_err());
    }

    #[test]
    fn degree_cut_on_triangle() {
        let g = triangle();
        let b = boundary(&g, &g.all_edges(), VertexSet::singleton(0)).unwrap();
        assert_eq!(b.edges, vec![0, 2]);
        assert_eq!((b.safe, b.unsafe_count, b.total()), (2, 0, 2));
        let b = boundary(&g, &EdgeSet::new(), VertexSet::singleton(1)).unwrap();
        assert!(b.edges.is_empty());
        assert!(boundary(&g, &g.all_edges(), VertexSet::singleton(5)).is_err());
    }

    #[test]
    fn gap3_boundary_of_s_v1() {
        let inst = gap_instance(3).unwrap();
        let s = inst.label("s");
        let v1 = inst.label("v1");
        let b = boundary(&inst.graph, &inst.graph.all_edges(), VertexSet::from_vertices([s, v1])).unwrap();
        assert_eq!(b.safe, 1);
        assert_eq!(b.unsafe_count, 6);
    }

    #[test]
    fn parallel_safe_edges_are_flex_connected() {
        let mut g = FlexGraph::new(2).unwrap();
        for _ in 0..3 {
            g.add(0, 1, 1, Safety::Safe).unwrap();
        }
        for q in 0..4 {
            assert!(is_flex_connected_pair(&g, &g.all_edges(), 0, 1, 3, q).unwrap());
            assert!(is_flex_connected_pair_by_flow(&g, &g.all_edges(), 0, 1, 3, q).unwrap());
        }
    }

    #[test]
    fn single_unsafe_edge_is_not_1_1_connected() {
        let mut g = FlexGraph::new(2).unwrap();
        g.add(0, 1, 1, Safety::Unsafe).unwrap();
        assert!(!is_flex_connected_pair(&g, &g.all_edges(), 0, 1, 1, 1).unwrap());
        assert!(!is_flex_connected_pair_by_flow(&g, &g.all_edges(), 0, 1, 1, 1).unwrap());
        assert!(is_flex_connected_pair(&g, &g.all_edges(), 0, 1, 1, 0).unwrap());
    }

    #[test]
    fn gap3_is_1_3_connected() {
        let inst = gap_instance(3).unwrap();
        let (s, t) = (inst.label("s"), inst.label("t"));
        let all = inst.graph.all_edges();
        assert!(is_flex_connected_pair(&inst.graph, &all, s, t, 1, 3).unwrap());
        assert!(is_flex_connected_pair_by_flow(&inst.graph, &all, s, t, 1, 3).unwrap());
    }

    #[test]
    fn spanning_tree_is_1_0_feasible() {
        let mut g = FlexGraph::new(4).unwrap();
        g.add(0, 1, 1, Safety::Unsafe).unwrap();
        g.add(1, 2, 1, Safety::Safe).unwrap();
        g.add(1, 3, 1, Safety::Unsafe).unwrap();
        let v = check_feasible(&g, &g.all_edges(), &Requirement::spanning(1, 0)).unwrap();
        assert_eq!(v, Feasibility::Feasible);
        let mut missing = g.all_edges();
        missing.remove(&2);
        let v = check_feasible(&g, &missing, &Requirement::spanning(1, 0)).unwrap();
        assert_eq!(v.witness().unwrap().members, VertexSet::singleton(3));
    }

    #[test]
    fn gap3_with_one_safe_edge_has_explicit_witness() {
        let inst = gap_instance(3).unwrap();
        let g = &inst.graph;
        let (s, t) = (inst.label("s"), inst.label("t"));
        // all unsafe edges plus the safe edge v1-t
        let mut f = g.unsafe_edges();
        let v1 = inst.label("v1");
        let v1t = (0..g.edge_count())
            .find(|&e| g.edge(e).is_safe() && (g.edge(e).u, g.edge(e).v) == (v1.min(t), v1.max(t)))
            .unwrap();
        f.insert(v1t);
        let verdict = check_feasible(g, &f, &Requirement::pair(1, 3, s, t)).unwrap();
        let expected = VertexSet::from_vertices([s, inst.label("v2"), inst.label("v3"), inst.label("v4")]);
        assert_eq!(verdict.witness().unwrap().members, expected);
    }

    #[test]
    fn contraction_examples() {
        let g = triangle();
        let c = contract(&g, VertexSet::singleton(2), 2).unwrap();
        assert_eq!(c.graph, g);
        assert_eq!(c.edge_origin, vec![0, 1, 2]);

        let c = contract(&g, VertexSet::from_vertices([0, 1]), 0).unwrap();
        assert_eq!(c.graph.vertex_count(), 2);
        assert_eq!(c.graph.edge_count(), 2);
        assert_eq!(c.edge_origin, vec![1, 2]);
        assert!(contract(&g, VertexSet::from_vertices([0, 1]), 2).is_err());
    }

    #[test]
    fn gap2_contract_v1_into_t() {
        let inst = gap_instance(2).unwrap();
        let g = &inst.graph;
        let (s, t, v1) = (inst.label("s"), inst.label("t"), inst.label("v1"));
        let c = contract(g, VertexSet::from_vertices([t, v1]), t).unwrap();
        let (ns, nt) = (c.vertex_map[s], c.vertex_map[t]);
        let mut st_unsafe = 0;
        for (new_e, &orig) in c.edge_origin.iter().enumerate() {
            let rec = c.graph.edge(new_e);
            let o = g.edge(orig);
            assert_eq!((rec.cost, rec.safety), (o.cost, o.safety));
            if rec.u.min(rec.v) == ns.min(nt) && rec.u.max(rec.v) == ns.max(nt) {
                assert!(!rec.is_safe());
                assert!(o.u == s || o.v == s);
                assert!(o.u == v1 || o.v == v1);
                st_unsafe += 1;
            }
        }
        assert_eq!(st_unsafe, 2);
        // the safe v1-t edge became a self-loop and is gone
        assert_eq!(c.graph.edge_count(), g.edge_count() - 1);
        assert!(c
            .edge_origin
            .iter()
            .all(|&o| !(g.edge(o).is_safe() && (g.edge(o).u == v1 || g.edge(o).v == v1))));
    }

    #[test]
    fn cost_parsing_and_formatting() {
        assert_eq!(parse_cost("0.5").unwrap(), Cost::new(1, 2));
        assert_eq!(parse_cost("12").unwrap(), Cost::from_integer(12));
        assert_eq!(parse_cost("1/3").unwrap(), Cost::new(1, 3));
        assert!(parse_cost("-1").is_err());
        assert!(parse_cost("abc").is_err());
        assert_eq!(format_cost(&Cost::new(1, 2)), "0.5");
        assert_eq!(format_cost(&Cost::new(7, 1)), "7");
        assert_eq!(format_cost(&Cost::new(1, 3)), "1/3");
        assert_eq!(format_cost(&Cost::new(5, 8)), "0.625");
    }
}
