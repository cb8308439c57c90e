//! Exact minimum-cost edge selection under cut constraints of the form
//! "at least `need_safe` safe edges or at least `need_total` edges".
//!
//! Two independent engines: include/exclude branching over edges (used by
//! the exact oracle) and branching on the most constrained unsatisfied cut
//! (used by the exact ring cover and the exact base solver).

use num::integer::Integer;

use crate::error::{FlexError, Result};
use crate::graph::{Cost, EdgeId, FlexGraph, VertexSet};

pub(crate) const NEVER: u32 = u32::MAX;

/// Edge masks are over local indices `0..k`, `k ≤ 128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Constraint {
    pub safe: u128,
    pub all: u128,
    pub need_safe: u32,
    pub need_total: u32,
}

impl Constraint {
    #[inline]
    fn ok(&self, safe: u32, total: u32) -> bool {
        safe >= self.need_safe || total >= self.need_total
    }

    pub fn satisfied(&self, x: u128) -> bool {
        self.ok((x & self.safe).count_ones(), (x & self.all).count_ones())
    }
}

/// Candidate edges with integer-scaled costs and the constraints over them.
pub(crate) struct Problem {
    pub edges: Vec<EdgeId>,
    costs: Vec<i128>,
    scale: i128,
    pub constraints: Vec<Constraint>,
}

pub(crate) const MAX_LOCAL_EDGES: usize = 128;

impl Problem {
    /// `cuts` are vertex sets whose boundary among `edges` must satisfy the
    /// requirement `(need_safe, need_total)` given per cut.
    pub fn new(
        graph: &FlexGraph,
        edges: Vec<EdgeId>,
        cuts: impl IntoIterator<Item = (VertexSet, u32, u32)>,
    ) -> Result<Problem> {
        if edges.len() > MAX_LOCAL_EDGES {
            return Err(FlexError::Capacity {
                what: "candidate edges for exact search",
                bound: MAX_LOCAL_EDGES,
                actual: edges.len(),
            });
        }
        let scale = edges
            .iter()
            .fold(1i128, |acc, &e| acc.lcm(graph.edge(e).cost.denom()));
        let costs = edges
            .iter()
            .map(|&e| {
                let c = graph.edge(e).cost;
                c.numer() * (scale / c.denom())
            })
            .collect();
        let mut constraints = Vec::new();
        for (set, need_safe, need_total) in cuts {
            let mut safe = 0u128;
            let mut all = 0u128;
            for (i, &e) in edges.iter().enumerate() {
                let rec = graph.edge(e);
                if rec.crosses(set) {
                    all |= 1 << i;
                    if rec.is_safe() {
                        safe |= 1 << i;
                    }
                }
            }
            constraints.push(Constraint {
                safe,
                all,
                need_safe,
                need_total,
            });
        }
        constraints.sort_unstable_by_key(|c| (c.all, c.safe, c.need_safe, c.need_total));
        constraints.dedup();
        Ok(Problem {
            edges,
            costs,
            scale,
            constraints,
        })
    }

    fn mask_cost(&self, x: u128) -> i128 {
        bits(x).map(|i| self.costs[i]).sum()
    }

    pub fn feasible(&self, x: u128) -> bool {
        self.constraints.iter().all(|c| c.satisfied(x))
    }

    fn full_mask(&self) -> u128 {
        if self.edges.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.edges.len()) - 1
        }
    }

    fn to_cost(&self, scaled: i128) -> Cost {
        Cost::new(scaled, self.scale)
    }

    pub fn selection(&self, x: u128) -> Vec<EdgeId> {
        bits(x).map(|i| self.edges[i]).collect()
    }

    /// Drops edges greedily, most expensive first, while feasibility holds.
    fn greedy_upper_bound(&self) -> Option<u128> {
        let mut x = self.full_mask();
        if !self.feasible(x) {
            return None;
        }
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| self.costs[b].cmp(&self.costs[a]).then(a.cmp(&b)));
        for i in order {
            let y = x & !(1u128 << i);
            if self.feasible(y) {
                x = y;
            }
        }
        Some(x)
    }
}

fn bits(mut x: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i)
        }
    })
}

/// Sum of the `k` cheapest costs among `mask`, or `None` if fewer than `k`.
fn cheapest(costs: &[i128], by_rank: &[usize], mask: u128, k: u32) -> Option<i128> {
    if k == 0 {
        return Some(0);
    }
    if mask.count_ones() < k {
        return None;
    }
    // walk ranks from cheapest upward
    let mut remaining = k;
    let mut sum = 0;
    for &i in by_rank {
        if mask >> i & 1 == 1 {
            sum += costs[i];
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    Some(sum)
}

/// Result of an exact search.
pub(crate) struct Optimum {
    pub mask: u128,
    pub cost: Cost,
}

impl Optimum {
    fn new(problem: &Problem, mask: u128) -> Optimum {
        Optimum {
            mask,
            cost: problem.to_cost(problem.mask_cost(mask)),
        }
    }
}

/// Completion lower bound: the largest over unsatisfied constraints of the
/// cheapest way to satisfy it from `avail`.
fn completion_bound(
    problem: &Problem,
    by_rank: &[usize],
    chosen: u128,
    avail: u128,
) -> Option<i128> {
    let mut lb = 0i128;
    for c in &problem.constraints {
        let hs = (chosen & c.safe).count_ones();
        let ht = (chosen & c.all).count_ones();
        if c.ok(hs, ht) {
            continue;
        }
        let via_safe = if c.need_safe == NEVER {
            None
        } else {
            cheapest(&problem.costs, by_rank, avail & c.safe, c.need_safe - hs)
        };
        let via_total = cheapest(&problem.costs, by_rank, avail & c.all, c.need_total - ht);
        let best = match (via_safe, via_total) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return None,
        };
        lb = lb.max(best);
    }
    Some(lb)
}

fn cost_rank(problem: &Problem) -> Vec<usize> {
    let mut by_rank: Vec<usize> = (0..problem.edges.len()).collect();
    by_rank.sort_by(|&a, &b| problem.costs[a].cmp(&problem.costs[b]).then(a.cmp(&b)));
    by_rank
}

/// Include/exclude branching, edges in descending cost order, exclude first.
pub(crate) fn include_exclude(problem: &Problem) -> Option<Optimum> {
    let start = problem.greedy_upper_bound()?;
    let k = problem.edges.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| problem.costs[b].cmp(&problem.costs[a]).then(a.cmp(&b)));
    let by_rank = cost_rank(problem);

    struct State<'a> {
        problem: &'a Problem,
        order: Vec<usize>,
        by_rank: Vec<usize>,
        best_mask: u128,
        best_cost: i128,
    }

    fn rec(st: &mut State, depth: usize, chosen: u128, avail: u128, cost: i128) {
        if cost >= st.best_cost {
            return;
        }
        let lb = match completion_bound(st.problem, &st.by_rank, chosen, avail & !chosen) {
            None => return,
            Some(lb) => lb,
        };
        if lb == 0 && st.problem.feasible(chosen) {
            st.best_cost = cost;
            st.best_mask = chosen;
            return;
        }
        if cost + lb >= st.best_cost || depth == st.order.len() {
            return;
        }
        let i = st.order[depth];
        let bit = 1u128 << i;
        rec(st, depth + 1, chosen, avail & !bit, cost);
        let c = st.problem.costs[i];
        rec(st, depth + 1, chosen | bit, avail, cost + c);
    }

    let mut st = State {
        problem,
        order,
        by_rank,
        best_mask: start,
        best_cost: problem.mask_cost(start),
    };
    rec(&mut st, 0, 0, problem.full_mask(), 0);
    Some(Optimum::new(problem, st.best_mask))
}

/// Branches on the unsatisfied constraint with the fewest available edges:
/// the j-th child takes its j-th cheapest edge and forbids the cheaper ones.
pub(crate) fn cut_branching(problem: &Problem) -> Option<Optimum> {
    let full = problem.full_mask();
    if !problem.feasible(full) {
        return None;
    }
    let by_rank = cost_rank(problem);

    struct State<'a> {
        problem: &'a Problem,
        by_rank: Vec<usize>,
        best: Option<(i128, u128)>,
    }

    fn rec(st: &mut State, chosen: u128, avail: u128, cost: i128) {
        let lb = match completion_bound(st.problem, &st.by_rank, chosen, avail) {
            None => return,
            Some(lb) => lb,
        };
        if let Some((b, _)) = st.best {
            if cost + lb >= b {
                return;
            }
        }
        let mut pick: Option<u128> = None;
        for c in &st.problem.constraints {
            if c.satisfied(chosen) {
                continue;
            }
            let open = avail & c.all;
            if pick.map_or(true, |p| open.count_ones() < p.count_ones()) {
                pick = Some(open);
            }
        }
        let Some(open) = pick else {
            st.best = Some((cost, chosen));
            return;
        };
        let mut forbidden = 0u128;
        let ranked: Vec<usize> = st.by_rank.iter().copied().filter(|&i| open >> i & 1 == 1).collect();
        for i in ranked {
            let bit = 1u128 << i;
            rec(st, chosen | bit, avail & !bit & !forbidden, cost + st.problem.costs[i]);
            forbidden |= bit;
        }
    }

    let mut st = State {
        problem,
        by_rank,
        best: None,
    };
    rec(&mut st, 0, full, 0);
    let (_, mask) = st.best?;
    Some(Optimum::new(problem, mask))
}
