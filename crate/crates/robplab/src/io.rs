//! Text formats: PACE `.gr` graphs, DIMACS `.cnf` formulas, PACE `.td` tree
//! decompositions, and the branching-program formats.
//!
//! Writers emit canonical, byte-stable output; parsers skip `c` comment
//! lines and blank lines. Graph and decomposition files use 1-based ids on
//! disk, branching programs 0-based ids.

use crate::bp::{BpEdge, Nrobp, TEdge, TraditionalNrobp};
use crate::cnf::{CnfFormula, Literal};
use crate::error::{Error, Result};
use crate::family::{TreeDecomposition, TreeGraph};
use crate::graph::Graph;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: line + 1,
        msg: msg.into(),
    }
}

/// Numbered content lines: comments and blanks skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'))
}

fn parse_fields<const N: usize>(line: usize, text: &str) -> Result<[u32; N]> {
    let mut out = [0u32; N];
    let mut parts = text.split_whitespace();
    for slot in &mut out {
        let tok = parts
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {N} numeric fields")))?;
        *slot = tok
            .parse()
            .map_err(|_| parse_err(line, format!("bad number `{tok}`")))?;
    }
    if parts.next().is_some() {
        return Err(parse_err(line, format!("expected exactly {N} fields")));
    }
    Ok(out)
}

/// `p tw <n> <m>` header, one `u v` line per edge, 1-based.
pub fn write_gr(g: &Graph) -> String {
    let mut out = format!("p tw {} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn parse_gr(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing `p tw` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("tw") {
        return Err(parse_err(ln, "expected `p tw <n> <m>`"));
    }
    let rest: Vec<&str> = parts.collect();
    if rest.len() != 2 {
        return Err(parse_err(ln, "expected `p tw <n> <m>`"));
    }
    let n: u32 = rest[0]
        .parse()
        .map_err(|_| parse_err(ln, "bad vertex count"))?;
    let m: usize = rest[1]
        .parse()
        .map_err(|_| parse_err(ln, "bad edge count"))?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let [u, v] = parse_fields::<2>(ln, line)?;
        if u == 0 || v == 0 {
            return Err(parse_err(ln, "vertex ids are 1-based"));
        }
        edges.push((u - 1, v - 1));
    }
    if edges.len() != m {
        return Err(parse_err(
            0,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

/// DIMACS: `p cnf <vars> <clauses>`, clauses as signed 1-based literals
/// terminated by `0`.
pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.variable_count(), f.clauses().len());
    for clause in f.clauses() {
        for lit in clause {
            let v = (lit.var + 1) as i64;
            out.push_str(&format!("{} ", if lit.positive { v } else { -v }));
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing `p cnf` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("cnf") {
        return Err(parse_err(ln, "expected `p cnf <vars> <clauses>`"));
    }
    let rest: Vec<&str> = parts.collect();
    if rest.len() != 2 {
        return Err(parse_err(ln, "expected `p cnf <vars> <clauses>`"));
    }
    let n: u32 = rest[0]
        .parse()
        .map_err(|_| parse_err(ln, "bad variable count"))?;
    let m: usize = rest[1]
        .parse()
        .map_err(|_| parse_err(ln, "bad clause count"))?;
    let mut clauses = Vec::with_capacity(m);
    let mut current: Vec<Literal> = Vec::new();
    for (ln, line) in lines {
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                let var = (v.unsigned_abs() - 1) as u32;
                current.push(Literal {
                    var,
                    positive: v > 0,
                });
            }
        }
    }
    if !current.is_empty() {
        return Err(parse_err(0, "unterminated clause at end of input"));
    }
    if clauses.len() != m {
        return Err(parse_err(
            0,
            format!("header announces {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses)
}

/// PACE `.td`: `s td <#bags> <width+1> <n>`, `b <id> <vertices..>` lines,
/// then decomposition-tree edges. Bag 1 is taken as the root.
pub fn write_td(td: &TreeDecomposition) -> String {
    let width_plus = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    let n = td
        .bags
        .iter()
        .flat_map(|b| b.iter())
        .max()
        .map_or(0, |&v| v + 1);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), width_plus, n);
    for (i, bag) in td.bags.iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for &v in bag {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for &(a, b) in td.tree.graph().edges() {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing `s td` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("s") || parts.next() != Some("td") {
        return Err(parse_err(ln, "expected `s td <bags> <width+1> <n>`"));
    }
    let rest: Vec<&str> = parts.collect();
    if rest.len() != 3 {
        return Err(parse_err(ln, "expected `s td <bags> <width+1> <n>`"));
    }
    let bag_count: usize = rest[0]
        .parse()
        .map_err(|_| parse_err(ln, "bad bag count"))?;
    let mut bags: Vec<Option<Vec<u32>>> = vec![None; bag_count];
    let mut tree_edges = Vec::new();
    for (ln, line) in lines {
        if let Some(bag_line) = line.strip_prefix("b ").or(if line == "b" {
            Some("")
        } else {
            None
        }) {
            let mut nums = bag_line.split_whitespace();
            let id: usize = nums
                .next()
                .ok_or_else(|| parse_err(ln, "bag line without id"))?
                .parse()
                .map_err(|_| parse_err(ln, "bad bag id"))?;
            if id == 0 || id > bag_count {
                return Err(parse_err(ln, format!("bag id {id} out of range")));
            }
            let mut content = Vec::new();
            for tok in nums {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| parse_err(ln, format!("bad vertex `{tok}`")))?;
                if v == 0 {
                    return Err(parse_err(ln, "vertex ids are 1-based"));
                }
                content.push(v - 1);
            }
            content.sort_unstable();
            if bags[id - 1].replace(content).is_some() {
                return Err(parse_err(ln, format!("bag {id} defined twice")));
            }
        } else {
            let [a, b] = parse_fields::<2>(ln, line)?;
            if a == 0 || b == 0 || a as usize > bag_count || b as usize > bag_count {
                return Err(parse_err(ln, "tree edge out of range"));
            }
            tree_edges.push((a - 1, b - 1));
        }
    }
    let bags: Vec<Vec<u32>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(0, format!("bag {} missing", i + 1))))
        .collect::<Result<_>>()?;
    let tree = TreeGraph::new(Graph::new(bag_count as u32, tree_edges)?, 0)?;
    Ok(TreeDecomposition { tree, bags })
}

fn literal_token(label: Option<Literal>) -> String {
    match label {
        None => ".".into(),
        Some(l) => format!("{}v{}", if l.positive { "+" } else { "-" }, l.var),
    }
}

/// `nrobp <#nodes> <#edges> <#vars>` header; `n <id> [root|leaf]` per node;
/// `e <tail> <head> <label>` per edge with label `+v<k>`, `-v<k>` or `.`.
pub fn write_bp(z: &Nrobp) -> String {
    let mut out = format!(
        "nrobp {} {} {}\n",
        z.node_count(),
        z.edge_count(),
        z.num_vars()
    );
    for v in 0..z.node_count() {
        out.push_str(&format!("n {v}"));
        if v == z.root() {
            out.push_str(" root");
        }
        if v == z.leaf() {
            out.push_str(" leaf");
        }
        out.push('\n');
    }
    for e in z.edges() {
        out.push_str(&format!(
            "e {} {} {}\n",
            e.tail,
            e.head,
            literal_token(e.label)
        ));
    }
    out
}

fn parse_literal_token(ln: usize, tok: &str) -> Result<Option<Literal>> {
    if tok == "." {
        return Ok(None);
    }
    let (sign, rest) = match tok.split_at_checked(1) {
        Some(("+", rest)) => (true, rest),
        Some(("-", rest)) => (false, rest),
        _ => return Err(parse_err(ln, format!("bad label `{tok}`"))),
    };
    let var = rest
        .strip_prefix('v')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| parse_err(ln, format!("bad label `{tok}`")))?;
    Ok(Some(Literal {
        var,
        positive: sign,
    }))
}

pub fn parse_bp(text: &str) -> Result<Nrobp> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing `nrobp` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("nrobp") {
        return Err(parse_err(ln, "expected `nrobp <nodes> <edges> <vars>`"));
    }
    let rest: Vec<&str> = parts.collect();
    if rest.len() != 3 {
        return Err(parse_err(ln, "expected `nrobp <nodes> <edges> <vars>`"));
    }
    let nodes: u32 = rest[0].parse().map_err(|_| parse_err(ln, "bad node count"))?;
    let edge_count: usize = rest[1].parse().map_err(|_| parse_err(ln, "bad edge count"))?;
    let vars: u32 = rest[2].parse().map_err(|_| parse_err(ln, "bad var count"))?;
    let mut seen_nodes = vec![false; nodes as usize];
    let mut root = None;
    let mut leaf = None;
    let mut edges = Vec::with_capacity(edge_count);
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("n") => {
                let id: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "node line without id"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad node id"))?;
                if id >= nodes {
                    return Err(parse_err(ln, format!("node id {id} out of range")));
                }
                if std::mem::replace(&mut seen_nodes[id as usize], true) {
                    return Err(parse_err(ln, format!("node {id} declared twice")));
                }
                for marker in toks {
                    match marker {
                        "root" => {
                            if root.replace(id).is_some() {
                                return Err(parse_err(ln, "two roots declared"));
                            }
                        }
                        "leaf" => {
                            if leaf.replace(id).is_some() {
                                return Err(parse_err(ln, "two leaves declared"));
                            }
                        }
                        other => return Err(parse_err(ln, format!("bad marker `{other}`"))),
                    }
                }
            }
            Some("e") => {
                let tail: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "edge line needs tail, head, label"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad tail id"))?;
                let head: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "edge line needs tail, head, label"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad head id"))?;
                let label = parse_literal_token(
                    ln,
                    toks.next()
                        .ok_or_else(|| parse_err(ln, "edge line needs tail, head, label"))?,
                )?;
                if toks.next().is_some() {
                    return Err(parse_err(ln, "trailing tokens on edge line"));
                }
                edges.push(BpEdge { tail, head, label });
            }
            _ => return Err(parse_err(ln, "expected `n` or `e` line")),
        }
    }
    if let Some(missing) = seen_nodes.iter().position(|s| !s) {
        return Err(parse_err(0, format!("node {missing} not declared")));
    }
    if edges.len() != edge_count {
        return Err(parse_err(
            0,
            format!("header announces {edge_count} edges, found {}", edges.len()),
        ));
    }
    let root = root.ok_or_else(|| parse_err(0, "no root declared"))?;
    let leaf = leaf.ok_or_else(|| parse_err(0, "no leaf declared"))?;
    Nrobp::new(vars, nodes, root, leaf, edges)
}

/// `tnrobp <#nodes> <#edges> <#vars>` header; node markers `root`, `tleaf`,
/// `fleaf` and `v<k>` (decision variable); edge labels `t`, `f` or `.`.
pub fn write_tbp(t: &TraditionalNrobp) -> String {
    let mut out = format!("tnrobp {} {} {}\n", t.num_nodes, t.edges.len(), t.num_vars);
    for v in 0..t.num_nodes {
        out.push_str(&format!("n {v}"));
        if v == t.root {
            out.push_str(" root");
        }
        if v == t.true_leaf {
            out.push_str(" tleaf");
        }
        if v == t.false_leaf {
            out.push_str(" fleaf");
        }
        if let Some(x) = t.var_label[v as usize] {
            out.push_str(&format!(" v{x}"));
        }
        out.push('\n');
    }
    for e in &t.edges {
        let lbl = match e.label {
            None => ".",
            Some(true) => "t",
            Some(false) => "f",
        };
        out.push_str(&format!("e {} {} {}\n", e.tail, e.head, lbl));
    }
    out
}

pub fn parse_tbp(text: &str) -> Result<TraditionalNrobp> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing `tnrobp` header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("tnrobp") {
        return Err(parse_err(ln, "expected `tnrobp <nodes> <edges> <vars>`"));
    }
    let rest: Vec<&str> = parts.collect();
    if rest.len() != 3 {
        return Err(parse_err(ln, "expected `tnrobp <nodes> <edges> <vars>`"));
    }
    let nodes: u32 = rest[0].parse().map_err(|_| parse_err(ln, "bad node count"))?;
    let edge_count: usize = rest[1].parse().map_err(|_| parse_err(ln, "bad edge count"))?;
    let vars: u32 = rest[2].parse().map_err(|_| parse_err(ln, "bad var count"))?;
    let mut seen = vec![false; nodes as usize];
    let mut var_label = vec![None; nodes as usize];
    let (mut root, mut tleaf, mut fleaf) = (None, None, None);
    let mut edges = Vec::with_capacity(edge_count);
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("n") => {
                let id: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "node line without id"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad node id"))?;
                if id >= nodes {
                    return Err(parse_err(ln, format!("node id {id} out of range")));
                }
                if std::mem::replace(&mut seen[id as usize], true) {
                    return Err(parse_err(ln, format!("node {id} declared twice")));
                }
                for marker in toks {
                    match marker {
                        "root" => {
                            root.replace(id)
                                .map_or(Ok(()), |_| Err(parse_err(ln, "two roots")))?;
                        }
                        "tleaf" => {
                            tleaf
                                .replace(id)
                                .map_or(Ok(()), |_| Err(parse_err(ln, "two true leaves")))?;
                        }
                        "fleaf" => {
                            fleaf
                                .replace(id)
                                .map_or(Ok(()), |_| Err(parse_err(ln, "two false leaves")))?;
                        }
                        v if v.starts_with('v') => {
                            let x: u32 = v[1..]
                                .parse()
                                .map_err(|_| parse_err(ln, format!("bad variable `{v}`")))?;
                            var_label[id as usize] = Some(x);
                        }
                        other => return Err(parse_err(ln, format!("bad marker `{other}`"))),
                    }
                }
            }
            Some("e") => {
                let tail: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "edge line needs tail, head, label"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad tail id"))?;
                let head: u32 = toks
                    .next()
                    .ok_or_else(|| parse_err(ln, "edge line needs tail, head, label"))?
                    .parse()
                    .map_err(|_| parse_err(ln, "bad head id"))?;
                let label = match toks.next() {
                    Some(".") => None,
                    Some("t") => Some(true),
                    Some("f") => Some(false),
                    other => {
                        return Err(parse_err(ln, format!("bad edge label `{other:?}`")));
                    }
                };
                edges.push(TEdge { tail, head, label });
            }
            _ => return Err(parse_err(ln, "expected `n` or `e` line")),
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(parse_err(0, format!("node {missing} not declared")));
    }
    if edges.len() != edge_count {
        return Err(parse_err(
            0,
            format!("header announces {edge_count} edges, found {}", edges.len()),
        ));
    }
    let root = root.ok_or_else(|| parse_err(0, "no root declared"))?;
    let tleaf = tleaf.ok_or_else(|| parse_err(0, "no true leaf declared"))?;
    let fleaf = fleaf.ok_or_else(|| parse_err(0, "no false leaf declared"))?;
    TraditionalNrobp::new(vars, nodes, root, tleaf, fleaf, var_label, edges)
}
