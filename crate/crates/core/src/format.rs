//! Line-oriented text format for instances and solutions.
//!
//! ```text
//! flexnet 1
//! n 4
//! e 0 1 0.5 U 2
//! e 1 3 4 S
//! req 2 2 pair 0 3
//! ```
//!
//! Blank lines and `#` comments are ignored. Edge lines take an optional
//! multiplicity. Solutions are `sol <ids...>` followed by `cost <value>`.

use crate::error::{FlexError, Result};
use crate::graph::{format_cost, parse_cost, Cost, EdgeSet, FlexGraph, Requirement, Safety, Scope, Solution};

pub const MAGIC: &str = "flexnet";
pub const VERSION: u32 = 1;

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number<T: std::str::FromStr>(line: usize, word: Option<&&str>, what: &str) -> Result<T> {
    let w = word.ok_or_else(|| FlexError::parse(line, format!("missing {what}")))?;
    w.parse().map_err(|_| FlexError::parse(line, format!("bad {what} `{w}`")))
}

fn parse_requirement(line: usize, words: &[&str]) -> Result<Requirement> {
    let p = number(line, words.get(1), "p")?;
    let q = number(line, words.get(2), "q")?;
    let kind = words.get(3).ok_or_else(|| FlexError::parse(line, "missing scope"))?;
    let scope = match kind.to_ascii_lowercase().as_str() {
        "pair" => {
            if words.len() != 6 {
                return Err(FlexError::parse(line, "pair scope takes exactly two vertices"));
            }
            Scope::Pair(number(line, words.get(4), "vertex")?, number(line, words.get(5), "vertex")?)
        }
        "terminals" => Scope::Terminals(
            words[4..]
                .iter()
                .map(|w| number(line, Some(w), "vertex"))
                .collect::<Result<_>>()?,
        ),
        "spanning" => {
            if words.len() != 4 {
                return Err(FlexError::parse(line, "spanning scope takes no vertices"));
            }
            Scope::Spanning
        }
        other => return Err(FlexError::parse(line, format!("unknown scope `{other}`"))),
    };
    Ok(Requirement::new(p, q, scope))
}

/// Parses an instance. The graph keeps edges in file order with
/// multiplicities expanded.
pub fn parse_instance(text: &str) -> Result<(FlexGraph, Requirement)> {
    let mut it = lines(text);
    let (l, header) = it.next().ok_or_else(|| FlexError::parse(1, "empty file"))?;
    if header.len() != 2 || header[0] != MAGIC {
        return Err(FlexError::parse(l, format!("expected `{MAGIC} {VERSION}`")));
    }
    if number::<u32>(l, header.get(1), "version")? != VERSION {
        return Err(FlexError::parse(l, format!("unsupported version `{}`", header[1])));
    }
    let (l, nline) = it.next().ok_or_else(|| FlexError::parse(l + 1, "missing vertex count"))?;
    if nline.len() != 2 || nline[0] != "n" {
        return Err(FlexError::parse(l, "expected `n <vertex_count>`"));
    }
    let mut graph = FlexGraph::new(number(l, nline.get(1), "vertex count")?).map_err(|e| FlexError::parse(l, e.to_string()))?;
    let mut req = None;
    let mut last = l;
    for (l, words) in it {
        last = l;
        match words[0] {
            "e" => {
                if !(5..=6).contains(&words.len()) {
                    return Err(FlexError::parse(l, "expected `e <u> <v> <cost> <S|U> [<multiplicity>]`"));
                }
                let u = number(l, words.get(1), "vertex")?;
                let v = number(l, words.get(2), "vertex")?;
                let cost = parse_cost(words[3]).map_err(|m| FlexError::parse(l, m))?;
                let safety = match words[4].to_ascii_uppercase().as_str() {
                    "S" => Safety::Safe,
                    "U" => Safety::Unsafe,
                    other => return Err(FlexError::parse(l, format!("unknown safety tag `{other}`"))),
                };
                let mult: usize = match words.get(5) {
                    Some(w) => number(l, Some(w), "multiplicity")?,
                    None => 1,
                };
                if mult == 0 {
                    return Err(FlexError::parse(l, "multiplicity must be positive"));
                }
                for _ in 0..mult {
                    graph.add_edge(u, v, cost, safety).map_err(|e| FlexError::parse(l, e.to_string()))?;
                }
            }
            "req" => {
                if req.is_some() {
                    return Err(FlexError::parse(l, "second requirement line"));
                }
                let r = parse_requirement(l, &words)?;
                r.scope.validate(&graph).map_err(|e| FlexError::parse(l, e.to_string()))?;
                req = Some(r);
            }
            other => return Err(FlexError::parse(l, format!("unknown directive `{other}`"))),
        }
    }
    let req = req.ok_or_else(|| FlexError::parse(last + 1, "missing `req` line"))?;
    Ok((graph, req))
}

/// Canonical text: edges sorted by (endpoints, safety, cost) with identical
/// neighbours folded into a multiplicity.
pub fn serialize_instance(graph: &FlexGraph, req: &Requirement) -> String {
    let (canon, _) = graph.canonicalized();
    let mut out = format!("{MAGIC} {VERSION}\nn {}\n", canon.vertex_count());
    let edges = canon.edges();
    let mut i = 0;
    while i < edges.len() {
        let r = &edges[i];
        let mut j = i + 1;
        while j < edges.len() && edges[j] == *r {
            j += 1;
        }
        out.push_str(&format!("e {} {} {} {}", r.u, r.v, format_cost(&r.cost), r.safety.tag()));
        if j - i > 1 {
            out.push_str(&format!(" {}", j - i));
        }
        out.push('\n');
        i = j;
    }
    out.push_str(&format!("req {} {} {}\n", req.p, req.q, req.scope));
    out
}

pub fn serialize_solution(solution: &Solution) -> String {
    let mut out = String::from("sol");
    for e in &solution.edges {
        out.push_str(&format!(" {e}"));
    }
    out.push_str(&format!("\ncost {}\n", format_cost(&solution.cost)));
    out
}

/// Parses a solution against `graph`. A `cost` line, when present, must
/// match the recomputed cost.
pub fn parse_solution(graph: &FlexGraph, text: &str) -> Result<Solution> {
    let mut edges = EdgeSet::new();
    let mut stated: Option<(usize, Cost)> = None;
    let mut seen_sol = false;
    for (l, words) in lines(text) {
        match words[0] {
            "sol" => {
                seen_sol = true;
                for w in &words[1..] {
                    let e: usize = number(l, Some(w), "edge id")?;
                    if e >= graph.edge_count() {
                        return Err(FlexError::parse(l, format!("edge {e} out of range")));
                    }
                    edges.insert(e);
                }
            }
            "cost" => {
                let w = words.get(1).ok_or_else(|| FlexError::parse(l, "missing cost"))?;
                stated = Some((l, parse_cost(w).map_err(|m| FlexError::parse(l, m))?));
            }
            other => return Err(FlexError::parse(l, format!("unknown directive `{other}`"))),
        }
    }
    if !seen_sol {
        return Err(FlexError::parse(1, "missing `sol` line"));
    }
    let sol = Solution::new(graph, edges);
    if let Some((l, c)) = stated {
        if c != sol.cost {
            return Err(FlexError::parse(
                l,
                format!("stated cost {} but edges cost {}", format_cost(&c), format_cost(&sol.cost)),
            ));
        }
    }
    Ok(sol)
}
