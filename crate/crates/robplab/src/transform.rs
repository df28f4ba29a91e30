//! Cleaning, uniformization and conversions between the edge-labelled and
//! the traditional node-labelled program models.
//!
//! In-degrees count distinct in-neighbours: parallel edges between one pair
//! of nodes form a single bundle. A program is *clean* when every labelled
//! edge enters an in-degree-1 node whose bundle is label-homogeneous (all
//! edges unlabelled, or all labelled with literals of one variable). The
//! uniformization chain introduces complementary pairs, which homogeneous
//! bundles keep legal.

use serde::Serialize;

use crate::bitset::VarSet;
use crate::bp::{BpEdge, Nrobp, TEdge, TraditionalNrobp};
use crate::cnf::Literal;
use crate::error::{Error, Result};

/// Variables with a literal on some root-to-`v` path.
pub fn ivar(z: &Nrobp, v: u32) -> Result<VarSet> {
    if v >= z.node_count() {
        return Err(Error::NodeOutOfRange {
            node: v,
            count: z.node_count(),
        });
    }
    Ok(z.ivar_sets().swap_remove(v as usize))
}

/// Classification of one edge relative to the cleaning invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    /// Head has a single in-neighbour.
    Irrelevant,
    /// Head has several in-neighbours and `IVar(tail) = IVar(head)`.
    Regular,
    /// Head has several in-neighbours and `IVar(tail)` is a proper subset.
    Irregular,
}

/// Indices of labelled edges violating cleanliness: the head has several
/// in-neighbours, or the head's bundle from one neighbour mixes variables
/// (or labelled and unlabelled edges).
fn violating_edges(z: &Nrobp) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, e) in z.edges().iter().enumerate() {
        let Some(lit) = e.label else { continue };
        if z.in_neighbour_count(e.head) > 1 {
            out.push(i);
            continue;
        }
        let homogeneous = z.in_edges(e.head).iter().all(|&ei| {
            z.edges()[ei as usize]
                .label
                .is_some_and(|l| l.var == lit.var)
        });
        if !homogeneous {
            out.push(i);
        }
    }
    out
}

pub fn is_clean(z: &Nrobp) -> bool {
    violating_edges(z).is_empty()
}

/// Subdivide every violating labelled edge, moving the label onto the first
/// half. Adds one edge per violation, so at most doubles the edge count, and
/// preserves the computed function. Already-clean programs are returned
/// unchanged.
pub fn make_clean(z: &Nrobp) -> Nrobp {
    let violating = violating_edges(z);
    if violating.is_empty() {
        return z.clone();
    }
    let mut edges = z.edges().to_vec();
    let mut next_node = z.node_count();
    let mut appended = Vec::new();
    for &i in &violating {
        let e = edges[i];
        let w = next_node;
        next_node += 1;
        edges[i] = BpEdge::labeled(e.tail, w, e.label.unwrap());
        appended.push(BpEdge::unlabeled(w, e.head));
    }
    edges.extend(appended);
    Nrobp::new(z.num_vars(), next_node, z.root(), z.leaf(), edges)
        .expect("subdivision preserves structural validity")
}

/// Per-edge classification. Requires a clean program.
pub fn classify_edges(z: &Nrobp) -> Result<Vec<EdgeClass>> {
    if let Some(&i) = violating_edges(z).first() {
        return Err(Error::NotClean(i));
    }
    let ivar = z.ivar_sets();
    Ok(z.edges()
        .iter()
        .map(|e| {
            if z.in_neighbour_count(e.head) <= 1 {
                EdgeClass::Irrelevant
            } else if ivar[e.tail as usize] == ivar[e.head as usize] {
                EdgeClass::Regular
            } else {
                EdgeClass::Irregular
            }
        })
        .collect())
}

/// Result of one irregular-edge elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub program: Nrobp,
    /// Fresh chain node ids in chain order; provenance: every one of them
    /// stems from the eliminated edge.
    pub new_nodes: Vec<u32>,
    pub eliminated: (u32, u32),
    /// The variables `IVar(head) \ IVar(tail)`, ascending.
    pub gap_vars: Vec<u32>,
}

/// Replace the irregular edge by a chain `u = u0, u1, .., uq, v` with two
/// complementary edges per gap variable and a final unlabelled edge. The
/// result is clean, computes the same function, and has strictly fewer
/// irregular edges.
pub fn eliminate_irregular_edge(z: &Nrobp, edge: usize) -> Result<Elimination> {
    let classes = classify_edges(z)?;
    if classes.get(edge) != Some(&EdgeClass::Irregular) {
        return Err(Error::EdgeNotIrregular(edge));
    }
    let e = z.edges()[edge];
    let ivar = z.ivar_sets();
    let gap = ivar[e.head as usize].clone();
    let tail_set = &ivar[e.tail as usize];
    let gap_vars: Vec<u32> = gap.iter().filter(|&v| !tail_set.contains(v)).collect();

    let mut edges: Vec<BpEdge> = z
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != edge)
        .map(|(_, e)| *e)
        .collect();
    let mut new_nodes = Vec::with_capacity(gap_vars.len());
    let mut prev = e.tail;
    let mut next_node = z.node_count();
    for &x in &gap_vars {
        let u = next_node;
        next_node += 1;
        new_nodes.push(u);
        edges.push(BpEdge::labeled(prev, u, Literal::pos(x)));
        edges.push(BpEdge::labeled(prev, u, Literal::neg(x)));
        prev = u;
    }
    edges.push(BpEdge::unlabeled(prev, e.head));
    let program = Nrobp::new(z.num_vars(), next_node, z.root(), z.leaf(), edges)
        .expect("chain insertion preserves structural validity");
    Ok(Elimination {
        program,
        new_nodes,
        eliminated: (e.tail, e.head),
        gap_vars,
    })
}

/// One uniformization rewrite, for `--trace` style reporting.
#[derive(Clone, Debug, Serialize)]
pub struct RewriteStep {
    pub eliminated: (u32, u32),
    pub gap_vars: Vec<u32>,
    pub edges_added: usize,
}

/// Outcome of uniformization.
#[derive(Clone, Debug)]
pub struct UniformizeOutcome {
    pub program: Nrobp,
    /// Edge count after the cleaning pass, the baseline of the `2qn` bound.
    pub cleaned_edge_count: usize,
    /// Irregular edges in the cleaned program (`q` in the `2qn` bound).
    pub initial_irregular_count: usize,
    pub steps: Vec<RewriteStep>,
}

/// Clean the program and eliminate irregular edges, lexicographically by
/// `(tail, head, edge index)`, until none remain. Each elimination covers a
/// gap of at most `n` variables, so the result has at most `2 q n` edges more
/// than the cleaned program. Already-uniform inputs are returned unchanged.
///
/// The result always has consistent per-node variable sets; it is uniform
/// whenever every declared variable occurs in the program at all (a variable
/// occurring nowhere cannot be introduced by edge rewrites).
pub fn uniformize(z: &Nrobp) -> UniformizeOutcome {
    if z.check_read_once() && z.check_uniform() {
        return UniformizeOutcome {
            program: z.clone(),
            cleaned_edge_count: z.edge_count(),
            initial_irregular_count: 0,
            steps: vec![],
        };
    }
    let mut cur = make_clean(z);
    let cleaned_edge_count = cur.edge_count();
    let mut steps = Vec::new();
    let mut irregular = irregular_indices(&cur);
    let initial_irregular_count = irregular.len();
    while let Some(&edge) = irregular.first() {
        let before = irregular.len();
        let el = eliminate_irregular_edge(&cur, edge).expect("loop picks irregular edges");
        steps.push(RewriteStep {
            eliminated: el.eliminated,
            gap_vars: el.gap_vars.clone(),
            edges_added: 2 * el.gap_vars.len() + 1,
        });
        cur = el.program;
        irregular = irregular_indices(&cur);
        assert!(irregular.len() < before, "irregular count must decrease");
    }
    UniformizeOutcome {
        program: cur,
        cleaned_edge_count,
        initial_irregular_count,
        steps,
    }
}

/// Irregular edge indices ordered by `(tail, head, index)`.
fn irregular_indices(z: &Nrobp) -> Vec<usize> {
    let classes = classify_edges(z).expect("caller keeps the program clean");
    let mut idx: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == EdgeClass::Irregular)
        .map(|(i, _)| i)
        .collect();
    idx.sort_by_key(|&i| {
        let e = z.edges()[i];
        (e.tail, e.head, i)
    });
    idx
}

/// Convert to the traditional node-labelled model: subdivide each labelled
/// edge through a fresh decision node wired to the continuation and to a new
/// false leaf. At most triples the edge count.
pub fn to_traditional(z: &Nrobp) -> TraditionalNrobp {
    if z.node_count() == 1 {
        // Constant-true single-node program.
        return TraditionalNrobp::new(
            z.num_vars(),
            3,
            0,
            1,
            2,
            vec![None, None, None],
            vec![TEdge {
                tail: 0,
                head: 1,
                label: None,
            }],
        )
        .expect("three-node constant program is valid");
    }
    let labeled = z.edges().iter().filter(|e| e.label.is_some()).count() as u32;
    let num_nodes = z.node_count() + labeled + 1;
    let false_leaf = num_nodes - 1;
    let mut var_label = vec![None; num_nodes as usize];
    let mut edges = Vec::with_capacity(z.edge_count() + 2 * labeled as usize);
    let mut next = z.node_count();
    for e in z.edges() {
        match e.label {
            None => edges.push(TEdge {
                tail: e.tail,
                head: e.head,
                label: None,
            }),
            Some(lit) => {
                let w = next;
                next += 1;
                var_label[w as usize] = Some(lit.var);
                edges.push(TEdge {
                    tail: e.tail,
                    head: w,
                    label: None,
                });
                edges.push(TEdge {
                    tail: w,
                    head: e.head,
                    label: Some(lit.positive),
                });
                edges.push(TEdge {
                    tail: w,
                    head: false_leaf,
                    label: Some(!lit.positive),
                });
            }
        }
    }
    TraditionalNrobp::new(
        z.num_vars(),
        num_nodes,
        z.root(),
        z.leaf(),
        false_leaf,
        var_label,
        edges,
    )
    .expect("subdivision yields a valid traditional program")
}

/// Convert a traditional program to the edge-labelled model: drop the false
/// leaf and every node not reaching the true leaf, then move each decision
/// node's variable onto its surviving out-edges as literals. Fails on
/// constant-false programs, which have no root-to-true-leaf path.
pub fn to_arosrn(t: &TraditionalNrobp) -> Result<Nrobp> {
    let n = t.num_nodes as usize;
    // Backward reachability from the true leaf.
    let mut reaches = vec![false; n];
    reaches[t.true_leaf as usize] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for e in &t.edges {
            if reaches[e.head as usize] && !reaches[e.tail as usize] {
                reaches[e.tail as usize] = true;
                changed = true;
            }
        }
    }
    if !reaches[t.root as usize] {
        return Err(Error::ConstantFalse);
    }
    let mut remap = vec![u32::MAX; n];
    let mut kept = 0u32;
    for v in 0..n {
        if reaches[v] {
            remap[v] = kept;
            kept += 1;
        }
    }
    let edges: Vec<BpEdge> = t
        .edges
        .iter()
        .filter(|e| reaches[e.tail as usize] && reaches[e.head as usize])
        .map(|e| BpEdge {
            tail: remap[e.tail as usize],
            head: remap[e.head as usize],
            label: e.label.map(|branch| Literal {
                var: t.var_label[e.tail as usize].expect("branch edges leave labelled nodes"),
                positive: branch,
            }),
        })
        .collect();
    Nrobp::new(
        t.num_vars,
        kept,
        remap[t.root as usize],
        remap[t.true_leaf as usize],
        edges,
    )
}
