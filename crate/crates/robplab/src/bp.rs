//! Branching programs in the edge-labelled, single-root single-leaf model,
//! plus the traditional node-labelled variant.
//!
//! A program accepts an assignment iff some root-leaf path carries only
//! literals of the assignment. Structural well-formedness (acyclic, one
//! source, one sink, every node on a root-leaf path) is enforced by the
//! constructor; read-once and uniformity are separate predicates so that
//! transformation intermediates can be represented.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::VarSet;
use crate::cnf::{assignment_mask, CnfFormula, Literal, LiteralSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mw::Permutation;

/// A directed edge of a branching program, optionally labelled by a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpEdge {
    pub tail: u32,
    pub head: u32,
    pub label: Option<Literal>,
}

impl BpEdge {
    pub fn unlabeled(tail: u32, head: u32) -> Self {
        BpEdge {
            tail,
            head,
            label: None,
        }
    }

    pub fn labeled(tail: u32, head: u32, lit: Literal) -> Self {
        BpEdge {
            tail,
            head,
            label: Some(lit),
        }
    }
}

/// Edge-labelled branching program: a DAG (multi-edges allowed) with one
/// root, one leaf, and every node on some root-leaf path.
#[derive(Clone, Debug)]
pub struct Nrobp {
    num_vars: u32,
    num_nodes: u32,
    root: u32,
    leaf: u32,
    edges: Vec<BpEdge>,
    out_edges: Vec<Vec<u32>>,
    in_edges: Vec<Vec<u32>>,
    topo: Vec<u32>,
}

impl PartialEq for Nrobp {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars
            && self.num_nodes == other.num_nodes
            && self.root == other.root
            && self.leaf == other.leaf
            && self.edges == other.edges
    }
}

impl Eq for Nrobp {}

impl Nrobp {
    pub fn new(
        num_vars: u32,
        num_nodes: u32,
        root: u32,
        leaf: u32,
        edges: Vec<BpEdge>,
    ) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidParameter(
                "program needs at least one node".into(),
            ));
        }
        for node in [root, leaf] {
            if node >= num_nodes {
                return Err(Error::NodeOutOfRange {
                    node,
                    count: num_nodes,
                });
            }
        }
        if (root == leaf) != (num_nodes == 1) {
            return Err(Error::InvalidParameter(
                "root may coincide with the leaf only in a single-node program".into(),
            ));
        }
        let mut out_edges = vec![Vec::new(); num_nodes as usize];
        let mut in_edges = vec![Vec::new(); num_nodes as usize];
        for (i, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node >= num_nodes {
                    return Err(Error::NodeOutOfRange {
                        node,
                        count: num_nodes,
                    });
                }
            }
            if let Some(lit) = e.label {
                if lit.var >= num_vars {
                    return Err(Error::VariableOutOfRange {
                        var: lit.var,
                        count: num_vars,
                    });
                }
            }
            out_edges[e.tail as usize].push(i as u32);
            in_edges[e.head as usize].push(i as u32);
        }
        // Kahn's algorithm; also catches cycles.
        let mut indeg: Vec<usize> = in_edges.iter().map(|v| v.len()).collect();
        let mut queue: Vec<u32> = (0..num_nodes).filter(|&v| indeg[v as usize] == 0).collect();
        let mut topo = Vec::with_capacity(num_nodes as usize);
        let mut qi = 0;
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            topo.push(v);
            for &ei in &out_edges[v as usize] {
                let h = edges[ei as usize].head as usize;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push(h as u32);
                }
            }
        }
        if topo.len() != num_nodes as usize {
            return Err(Error::CyclicProgram);
        }
        for v in 0..num_nodes {
            if in_edges[v as usize].is_empty() && v != root {
                return Err(Error::ExtraSource(v));
            }
            if out_edges[v as usize].is_empty() && v != leaf {
                return Err(Error::ExtraSink(v));
            }
        }
        if !in_edges[root as usize].is_empty() {
            return Err(Error::MalformedNode(root, "the root has in-edges".into()));
        }
        if !out_edges[leaf as usize].is_empty() {
            return Err(Error::MalformedNode(leaf, "the leaf has out-edges".into()));
        }
        Ok(Nrobp {
            num_vars,
            num_nodes,
            root,
            leaf,
            edges,
            out_edges,
            in_edges,
            topo,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn node_count(&self) -> u32 {
        self.num_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn leaf(&self) -> u32 {
        self.leaf
    }

    pub fn edges(&self) -> &[BpEdge] {
        &self.edges
    }

    pub fn out_edges(&self, v: u32) -> &[u32] {
        &self.out_edges[v as usize]
    }

    pub fn in_edges(&self, v: u32) -> &[u32] {
        &self.in_edges[v as usize]
    }

    /// Number of distinct in-neighbours (parallel edges count once).
    pub fn in_neighbour_count(&self, v: u32) -> usize {
        let mut tails: Vec<u32> = self.in_edges[v as usize]
            .iter()
            .map(|&ei| self.edges[ei as usize].tail)
            .collect();
        tails.sort_unstable();
        tails.dedup();
        tails.len()
    }

    /// Nodes in topological order (root first, leaf last).
    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    /// For each node, the variables with a literal on some root-to-node path.
    pub fn ivar_sets(&self) -> Vec<VarSet> {
        let mut ivar = vec![VarSet::with_capacity(self.num_vars); self.num_nodes as usize];
        for &v in &self.topo {
            for &ei in &self.in_edges[v as usize] {
                let e = &self.edges[ei as usize];
                let tail_set = ivar[e.tail as usize].clone();
                ivar[v as usize].union_with(&tail_set);
                if let Some(lit) = e.label {
                    ivar[v as usize].insert(lit.var);
                }
            }
        }
        ivar
    }

    /// True iff no root-leaf path carries two literals of one variable.
    pub fn check_read_once(&self) -> bool {
        self.read_once_violation().is_none()
    }

    /// A violating root-leaf path (as edge indices) if the program is not
    /// read-once, found through the reachable-variable DP rather than path
    /// enumeration.
    pub fn read_once_violation(&self) -> Option<Vec<u32>> {
        let ivar = self.ivar_sets();
        let bad = self
            .edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.label.is_some_and(|l| ivar[e.tail as usize].contains(l.var)))?;
        let (bad_idx, bad_edge) = bad;
        let x = bad_edge.label.unwrap().var;
        // Nodes from which bad_edge.tail is reachable.
        let mut reaches_tail = vec![false; self.num_nodes as usize];
        reaches_tail[bad_edge.tail as usize] = true;
        for &v in self.topo.iter().rev() {
            if reaches_tail[v as usize] {
                continue;
            }
            reaches_tail[v as usize] = self.out_edges[v as usize]
                .iter()
                .any(|&ei| reaches_tail[self.edges[ei as usize].head as usize]);
        }
        // An earlier x-labelled edge whose head reaches the tail.
        let first = self.edges.iter().position(|e| {
            e.label.is_some_and(|l| l.var == x) && reaches_tail[e.head as usize]
        })?;
        let mut path = self.any_path(self.root, self.edges[first].tail);
        path.push(first as u32);
        path.extend(self.any_path(self.edges[first].head, bad_edge.tail));
        path.push(bad_idx as u32);
        path.extend(self.any_path(bad_edge.head, self.leaf));
        Some(path)
    }

    /// Some directed path `from -> to` as edge indices (empty when equal).
    fn any_path(&self, from: u32, to: u32) -> Vec<u32> {
        if from == to {
            return Vec::new();
        }
        let mut via: Vec<Option<u32>> = vec![None; self.num_nodes as usize];
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &ei in &self.out_edges[v as usize] {
                let h = self.edges[ei as usize].head;
                if via[h as usize].is_none() && h != from {
                    via[h as usize] = Some(ei);
                    queue.push_back(h);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let ei = via[cur as usize].expect("target reachable in a connected program");
            path.push(ei);
            cur = self.edges[ei as usize].tail;
        }
        path.reverse();
        path
    }

    /// Per-node variable sets when the program is uniform: every in-edge of a
    /// node must agree on `IVar(tail) + edge variable`, and the leaf must see
    /// every variable. Returns `None` if uniformity fails.
    pub fn consistent_ivar(&self) -> Option<Vec<VarSet>> {
        let mut ivar = vec![None::<VarSet>; self.num_nodes as usize];
        ivar[self.root as usize] = Some(VarSet::with_capacity(self.num_vars));
        for &v in &self.topo {
            for &ei in &self.in_edges[v as usize] {
                let e = &self.edges[ei as usize];
                let mut cand = ivar[e.tail as usize].clone()?;
                if let Some(lit) = e.label {
                    if cand.contains(lit.var) {
                        return None; // a repeated variable cannot be uniform-consistent
                    }
                    cand.insert(lit.var);
                }
                match &ivar[v as usize] {
                    None => ivar[v as usize] = Some(cand),
                    Some(prev) if *prev == cand => {}
                    Some(_) => return None,
                }
            }
        }
        let leaf_set = ivar[self.leaf as usize].clone()?;
        if leaf_set.len() != self.num_vars {
            return None;
        }
        ivar.into_iter().collect()
    }

    /// True iff every node sees one well-defined variable set along all
    /// root-to-node paths and root-leaf paths mention every variable.
    /// Meaningful on read-once programs.
    pub fn check_uniform(&self) -> bool {
        self.consistent_ivar().is_some()
    }

    /// True iff some root-leaf path's labels are contained in the full
    /// assignment `a`.
    pub fn accepts(&self, a: &LiteralSet) -> Result<bool> {
        if a.num_vars() != self.num_vars {
            return Err(Error::PartialAssignment(
                a.num_vars().min(self.num_vars),
            ));
        }
        if let Some(v) = a.first_unassigned() {
            return Err(Error::PartialAssignment(v));
        }
        Ok(self.accepts_mask(assignment_mask(a)))
    }

    pub(crate) fn accepts_mask(&self, mask: u64) -> bool {
        let mut reach = vec![false; self.num_nodes as usize];
        reach[self.root as usize] = true;
        for &v in &self.topo {
            if !reach[v as usize] {
                continue;
            }
            for &ei in &self.out_edges[v as usize] {
                let e = &self.edges[ei as usize];
                let ok = match e.label {
                    None => true,
                    Some(lit) => (mask >> lit.var & 1 == 1) == lit.positive,
                };
                if ok {
                    reach[e.head as usize] = true;
                }
            }
        }
        reach[self.leaf as usize]
    }

    /// All root-leaf paths as edge-index sequences; `None` once more than
    /// `cap` paths exist.
    pub fn enumerate_root_leaf_paths(&self, cap: usize) -> Option<Vec<Vec<u32>>> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((v, path)) = stack.pop() {
            if v == self.leaf {
                out.push(path);
                if out.len() > cap {
                    return None;
                }
                continue;
            }
            for &ei in self.out_edges[v as usize].iter().rev() {
                let mut p = path.clone();
                p.push(ei);
                stack.push((self.edges[ei as usize].head, p));
            }
        }
        Some(out)
    }

    pub fn path_literals(&self, path: &[u32]) -> Vec<Literal> {
        path.iter()
            .filter_map(|&ei| self.edges[ei as usize].label)
            .collect()
    }
}

/// Exhaustive equivalence of two programs over all assignments.
pub fn equivalent(z1: &Nrobp, z2: &Nrobp, limit: u32) -> Result<bool> {
    if z1.num_vars != z2.num_vars {
        return Ok(false);
    }
    check_var_limit(z1.num_vars, limit)?;
    Ok((0..1u64 << z1.num_vars).all(|m| z1.accepts_mask(m) == z2.accepts_mask(m)))
}

/// Exhaustive equivalence of a program and a CNF formula.
pub fn equivalent_to_cnf(z: &Nrobp, f: &CnfFormula, limit: u32) -> Result<bool> {
    if z.num_vars != f.variable_count() {
        return Ok(false);
    }
    check_var_limit(z.num_vars, limit)?;
    Ok((0..1u64 << z.num_vars).all(|m| z.accepts_mask(m) == f.satisfies_mask(m)))
}

fn check_var_limit(n: u32, limit: u32) -> Result<()> {
    let limit = limit.min(25);
    if n > limit {
        return Err(Error::SizeLimit {
            what: "exhaustive equivalence check",
            limit: limit as u64,
            actual: n as u64,
        });
    }
    Ok(())
}

/// Build the frontier OBDD of `phi(g)` along the variable order `sv`.
///
/// The state after a prefix is the set of prefix vertices assigned false
/// that still have unprocessed neighbors; assigning `v` false is rejected
/// when a processed neighbor of `v` is false. The result is a uniform,
/// read-once program, oblivious with respect to `sv`.
pub fn build_frontier_obdd(g: &Graph, sv: &Permutation) -> Result<Nrobp> {
    if let Some(v) = g.isolated_vertices().next() {
        return Err(Error::IsolatedVertex(v));
    }
    let n = g.vertex_count();
    if sv.as_slice().len() != n as usize {
        return Err(Error::NotAPermutation);
    }
    if n == 0 {
        // phi of the empty graph is the empty CNF: constant true.
        return Nrobp::new(0, 1, 0, 0, vec![]);
    }
    let mut pos = vec![0u32; n as usize];
    for (k, &v) in sv.as_slice().iter().enumerate() {
        pos[v as usize] = k as u32;
    }
    // Position of each vertex's last neighbor in the order.
    let last_nb: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| pos[w as usize])
                .max()
                .expect("no isolated vertices")
        })
        .collect();

    let mut edges: Vec<BpEdge> = Vec::new();
    let mut current: BTreeMap<VarSet, u32> = BTreeMap::new();
    current.insert(VarSet::with_capacity(n), 0);
    let mut next_id = 1u32;
    for k in 0..n {
        let v = sv.as_slice()[k as usize];
        let retire = |state: &VarSet| {
            let mut s = VarSet::with_capacity(n);
            for u in state.iter() {
                if last_nb[u as usize] > k {
                    s.insert(u);
                }
            }
            s
        };
        // Collect successor states first so their ids follow the canonical
        // (sorted-encoding) order within the layer.
        let mut transitions: Vec<(u32, VarSet, Option<VarSet>)> = Vec::new();
        let mut states: std::collections::BTreeSet<VarSet> = std::collections::BTreeSet::new();
        for (state, &id) in &current {
            let s_true = retire(state);
            states.insert(s_true.clone());
            let clash = g.neighbors(v).iter().any(|&w| state.contains(w));
            let s_false = if clash {
                None
            } else {
                let mut s = state.clone();
                if last_nb[v as usize] > k {
                    s.insert(v);
                }
                let s = retire(&s);
                states.insert(s.clone());
                Some(s)
            };
            transitions.push((id, s_true, s_false));
        }
        let mut next: BTreeMap<VarSet, u32> = BTreeMap::new();
        for s in states {
            next.insert(s, next_id);
            next_id += 1;
        }
        for (id, s_true, s_false) in transitions {
            edges.push(BpEdge::labeled(id, next[&s_true], Literal::pos(v)));
            if let Some(s) = s_false {
                edges.push(BpEdge::labeled(id, next[&s], Literal::neg(v)));
            }
        }
        current = next;
    }
    debug_assert_eq!(current.len(), 1, "all vertices processed, frontier empty");
    let leaf = *current.values().next().unwrap();
    Nrobp::new(n, next_id, 0, leaf, edges)
}

/// A t-node with its maximal guaranteed-positive witness set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TNode {
    pub node: u32,
    pub witness: Vec<u32>,
}

/// Nodes whose maximal guaranteed-positive set has size at least `t`.
///
/// For a node `a` the set is `{v in IVar(a): v labels positively every
/// root-to-a path}` united with `{v not in IVar(a): v labels positively every
/// a-to-leaf path}`, computed by two intersection DPs. Requires a uniform
/// program, whose structure makes that set exactly the variables positive on
/// every root-leaf path through `a`.
pub fn t_nodes(z: &Nrobp, t: u32) -> Result<Vec<TNode>> {
    if !z.check_read_once() {
        return Err(Error::NotReadOnce);
    }
    let Some(ivar) = z.consistent_ivar() else {
        return Err(Error::NotUniform);
    };
    let n = z.node_count() as usize;
    // forward[a]: variables positive on every root-to-a path.
    let mut forward = vec![None::<VarSet>; n];
    forward[z.root() as usize] = Some(VarSet::with_capacity(z.num_vars()));
    for &v in z.topo_order() {
        for &ei in z.in_edges(v) {
            let e = &z.edges()[ei as usize];
            let mut cand = forward[e.tail as usize].clone().expect("topo order");
            if let Some(lit) = e.label {
                if lit.positive {
                    cand.insert(lit.var);
                }
            }
            match &mut forward[v as usize] {
                slot @ None => *slot = Some(cand),
                Some(acc) => acc.intersect_with(&cand),
            }
        }
    }
    // backward[a]: variables positive on every a-to-leaf path.
    let mut backward = vec![None::<VarSet>; n];
    backward[z.leaf() as usize] = Some(VarSet::with_capacity(z.num_vars()));
    for &v in z.topo_order().iter().rev() {
        for &ei in z.out_edges(v) {
            let e = &z.edges()[ei as usize];
            let mut cand = backward[e.head as usize].clone().expect("reverse topo");
            if let Some(lit) = e.label {
                if lit.positive {
                    cand.insert(lit.var);
                }
            }
            match &mut backward[v as usize] {
                slot @ None => *slot = Some(cand),
                Some(acc) => acc.intersect_with(&cand),
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..z.node_count() {
        let mut witness = forward[a as usize].clone().expect("all nodes reachable");
        let mut outside = backward[a as usize].clone().expect("all nodes reach leaf");
        // Restrict the backward part to variables unseen before `a`.
        let mut seen = ivar[a as usize].clone();
        seen.intersect_with(&outside);
        for v in seen.iter() {
            outside.remove(v);
        }
        witness.union_with(&outside);
        if witness.len() >= t {
            out.push(TNode {
                node: a,
                witness: witness.to_vec(),
            });
        }
    }
    Ok(out)
}

/// True iff every root-leaf path meets `nodes`.
pub fn is_root_leaf_cut(z: &Nrobp, nodes: &[u32]) -> bool {
    let mut blocked = vec![false; z.node_count() as usize];
    for &v in nodes {
        if (v as usize) < blocked.len() {
            blocked[v as usize] = true;
        }
    }
    if blocked[z.root() as usize] || blocked[z.leaf() as usize] {
        return true;
    }
    let mut reach = vec![false; z.node_count() as usize];
    reach[z.root() as usize] = true;
    for &v in z.topo_order() {
        if !reach[v as usize] || blocked[v as usize] {
            continue;
        }
        for &ei in z.out_edges(v) {
            let h = z.edges()[ei as usize].head;
            reach[h as usize] = true;
        }
    }
    !reach[z.leaf() as usize]
}

/// Seeded generator of structurally valid, clean, read-once programs built
/// from chains, series splits and parallel joins over variable subsets.
/// Parallel joins over unequal subsets give the programs ragged variable
/// sets, so most outputs are not uniform.
pub fn random_clean_nrobp(num_vars: u32, seed: u64) -> Nrobp {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = BpBuilder::default();
    let entry = builder.fresh();
    let exit = builder.fresh();
    let vars: Vec<u32> = (0..num_vars).collect();
    gadget(&mut builder, &mut rng, &vars, entry, exit, 3);
    let edges = builder.edges;
    Nrobp::new(num_vars, builder.nodes, entry, exit, edges)
        .expect("generated programs are structurally valid")
}

#[derive(Default)]
struct BpBuilder {
    nodes: u32,
    edges: Vec<BpEdge>,
}

impl BpBuilder {
    fn fresh(&mut self) -> u32 {
        self.nodes += 1;
        self.nodes - 1
    }
}

fn gadget(b: &mut BpBuilder, rng: &mut ChaCha8Rng, vars: &[u32], entry: u32, exit: u32, depth: u32) {
    let op = if depth == 0 || vars.len() <= 1 {
        0
    } else {
        rng.gen_range(0..3)
    };
    match op {
        // Chain: every variable once, random signs, occasional unlabeled link.
        0 => {
            let mut order = vars.to_vec();
            shuffle(&mut order, rng);
            let mut cur = entry;
            for (i, &v) in order.iter().enumerate() {
                let last = i + 1 == order.len();
                let nxt = if last { exit } else { b.fresh() };
                let lit = if rng.gen_bool(0.5) {
                    Literal::pos(v)
                } else {
                    Literal::neg(v)
                };
                b.edges.push(BpEdge::labeled(cur, nxt, lit));
                cur = nxt;
                if !last && rng.gen_bool(0.2) {
                    let mid = b.fresh();
                    b.edges.push(BpEdge::unlabeled(cur, mid));
                    cur = mid;
                }
            }
            if order.is_empty() {
                b.edges.push(BpEdge::unlabeled(entry, exit));
            }
        }
        // Series: disjoint split, glued by an unlabeled edge.
        1 => {
            let mut order = vars.to_vec();
            shuffle(&mut order, rng);
            let cut = rng.gen_range(1..order.len());
            let (left, right) = order.split_at(cut);
            let mid_a = b.fresh();
            let mid_b = b.fresh();
            gadget(b, rng, left, entry, mid_a, depth - 1);
            b.edges.push(BpEdge::unlabeled(mid_a, mid_b));
            gadget(b, rng, right, mid_b, exit, depth - 1);
        }
        // Parallel: branches over independently chosen subsets, joined by
        // unlabeled edges so the join node stays clean. Every variable must
        // land in some branch, otherwise it would vanish from the program
        // and the leaf could never see the full variable set.
        _ => {
            let branches = rng.gen_range(2..=3);
            let mut subs: Vec<Vec<u32>> = (0..branches)
                .map(|_| vars.iter().copied().filter(|_| rng.gen_bool(0.7)).collect())
                .collect();
            for &v in vars {
                if !subs.iter().any(|s| s.contains(&v)) {
                    let i = rng.gen_range(0..branches);
                    subs[i].push(v);
                }
            }
            for sub in subs {
                let en = b.fresh();
                let ex = b.fresh();
                b.edges.push(BpEdge::unlabeled(entry, en));
                gadget(b, rng, &sub, en, ex, depth - 1);
                b.edges.push(BpEdge::unlabeled(ex, exit));
            }
        }
    }
}

fn shuffle(xs: &mut [u32], rng: &mut ChaCha8Rng) {
    use rand::seq::SliceRandom;
    xs.shuffle(rng);
}

/// Traditional node-labelled branching program: labelled nodes branch on
/// true/false edges, unlabelled nodes guess, and there are separate true and
/// false leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraditionalNrobp {
    pub num_vars: u32,
    pub num_nodes: u32,
    pub root: u32,
    pub true_leaf: u32,
    pub false_leaf: u32,
    /// Variable labelling each decision node.
    pub var_label: Vec<Option<u32>>,
    pub edges: Vec<TEdge>,
}

/// Edge of a traditional program; `label` is the branch taken at a labelled
/// tail node, `None` out of guess nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TEdge {
    pub tail: u32,
    pub head: u32,
    pub label: Option<bool>,
}

impl TraditionalNrobp {
    pub fn new(
        num_vars: u32,
        num_nodes: u32,
        root: u32,
        true_leaf: u32,
        false_leaf: u32,
        var_label: Vec<Option<u32>>,
        edges: Vec<TEdge>,
    ) -> Result<Self> {
        if num_nodes < 2 {
            return Err(Error::InvalidParameter(
                "traditional program needs a root and two leaves".into(),
            ));
        }
        for node in [root, true_leaf, false_leaf] {
            if node >= num_nodes {
                return Err(Error::NodeOutOfRange {
                    node,
                    count: num_nodes,
                });
            }
        }
        if true_leaf == false_leaf || root == true_leaf || root == false_leaf {
            return Err(Error::InvalidParameter(
                "root and the two leaves must be distinct".into(),
            ));
        }
        if var_label.len() != num_nodes as usize {
            return Err(Error::InvalidParameter(
                "one variable label slot per node required".into(),
            ));
        }
        let t = TraditionalNrobp {
            num_vars,
            num_nodes,
            root,
            true_leaf,
            false_leaf,
            var_label,
            edges,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_nodes as usize;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (i, e) in self.edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node >= self.num_nodes {
                    return Err(Error::NodeOutOfRange {
                        node,
                        count: self.num_nodes,
                    });
                }
            }
            out[e.tail as usize].push(i);
            indeg[e.head as usize] += 1;
        }
        for (v, lbl) in self.var_label.iter().enumerate() {
            let v = v as u32;
            if let Some(x) = lbl {
                if *x >= self.num_vars {
                    return Err(Error::VariableOutOfRange {
                        var: *x,
                        count: self.num_vars,
                    });
                }
                if v == self.true_leaf || v == self.false_leaf {
                    return Err(Error::MalformedNode(v, "leaves cannot be labelled".into()));
                }
                let mut seen = (false, false);
                if out[v as usize].len() != 2 {
                    return Err(Error::MalformedNode(
                        v,
                        "labelled node must have exactly two out-edges".into(),
                    ));
                }
                for &ei in &out[v as usize] {
                    match self.edges[ei].label {
                        Some(true) => seen.0 = true,
                        Some(false) => seen.1 = true,
                        None => {
                            return Err(Error::MalformedNode(
                                v,
                                "out-edges of a labelled node must carry true/false".into(),
                            ))
                        }
                    }
                }
                if !(seen.0 && seen.1) {
                    return Err(Error::MalformedNode(
                        v,
                        "labelled node needs one true and one false out-edge".into(),
                    ));
                }
            } else if out[v as usize].iter().any(|&ei| self.edges[ei].label.is_some()) {
                return Err(Error::MalformedNode(
                    v,
                    "guess node cannot have labelled out-edges".into(),
                ));
            }
        }
        for leaf in [self.true_leaf, self.false_leaf] {
            if !out[leaf as usize].is_empty() {
                return Err(Error::MalformedNode(leaf, "leaves have no out-edges".into()));
            }
        }
        // Acyclicity via Kahn.
        let mut indeg2 = indeg.clone();
        let mut queue: Vec<u32> = (0..self.num_nodes)
            .filter(|&v| indeg2[v as usize] == 0)
            .collect();
        let mut seen = 0;
        let mut qi = 0;
        let mut reach_var: Vec<VarSet> = vec![VarSet::with_capacity(self.num_vars); n];
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            seen += 1;
            // Either leaf may be disconnected in degenerate constant
            // programs.
            if v != self.root
                && indeg[v as usize] == 0
                && v != self.false_leaf
                && v != self.true_leaf
            {
                return Err(Error::ExtraSource(v));
            }
            if let Some(x) = self.var_label[v as usize] {
                if reach_var[v as usize].contains(x) {
                    return Err(Error::NotReadOnce);
                }
            }
            for &ei in &out[v as usize] {
                let h = self.edges[ei].head as usize;
                let mut s = reach_var[v as usize].clone();
                if let Some(x) = self.var_label[v as usize] {
                    s.insert(x);
                }
                reach_var[h].union_with(&s);
                indeg2[h] -= 1;
                if indeg2[h] == 0 {
                    queue.push(h as u32);
                }
            }
        }
        if seen != self.num_nodes {
            return Err(Error::CyclicProgram);
        }
        for v in 0..self.num_nodes {
            if out[v as usize].is_empty() && v != self.true_leaf && v != self.false_leaf {
                return Err(Error::ExtraSink(v));
            }
        }
        Ok(())
    }

    /// True iff some root-to-true-leaf path is consistent with the full
    /// assignment `a`.
    pub fn accepts(&self, a: &LiteralSet) -> Result<bool> {
        if a.num_vars() != self.num_vars {
            return Err(Error::PartialAssignment(a.num_vars().min(self.num_vars)));
        }
        if let Some(v) = a.first_unassigned() {
            return Err(Error::PartialAssignment(v));
        }
        Ok(self.accepts_mask(assignment_mask(a)))
    }

    pub(crate) fn accepts_mask(&self, mask: u64) -> bool {
        let n = self.num_nodes as usize;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.tail as usize].push(i);
        }
        let mut reach = vec![false; n];
        let mut stack = vec![self.root];
        reach[self.root as usize] = true;
        while let Some(v) = stack.pop() {
            for &ei in &out[v as usize] {
                let e = &self.edges[ei];
                let ok = match (e.label, self.var_label[v as usize]) {
                    (None, _) => true,
                    (Some(branch), Some(x)) => (mask >> x & 1 == 1) == branch,
                    (Some(_), None) => false,
                };
                if ok && !reach[e.head as usize] {
                    reach[e.head as usize] = true;
                    stack.push(e.head);
                }
            }
        }
        reach[self.true_leaf as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::phi;

    fn single_edge_program() -> Nrobp {
        Nrobp::new(1, 2, 0, 1, vec![BpEdge::labeled(0, 1, Literal::pos(0))]).unwrap()
    }

    #[test]
    fn structural_validation() {
        assert!(Nrobp::new(0, 1, 0, 0, vec![]).is_ok());
        // Cycle.
        assert!(matches!(
            Nrobp::new(
                0,
                3,
                0,
                2,
                vec![
                    BpEdge::unlabeled(0, 1),
                    BpEdge::unlabeled(1, 1),
                    BpEdge::unlabeled(1, 2)
                ]
            ),
            Err(Error::CyclicProgram)
        ));
        // Extra source.
        assert!(matches!(
            Nrobp::new(
                0,
                3,
                0,
                2,
                vec![BpEdge::unlabeled(0, 2), BpEdge::unlabeled(1, 2)]
            ),
            Err(Error::ExtraSource(1))
        ));
        // Extra sink.
        assert!(matches!(
            Nrobp::new(
                0,
                3,
                0,
                2,
                vec![BpEdge::unlabeled(0, 1), BpEdge::unlabeled(0, 2)]
            ),
            Err(Error::ExtraSink(1))
        ));
    }

    #[test]
    fn read_once_check() {
        assert!(single_edge_program().check_read_once());

        let z = Nrobp::new(
            1,
            3,
            0,
            2,
            vec![
                BpEdge::labeled(0, 1, Literal::pos(0)),
                BpEdge::labeled(1, 2, Literal::neg(0)),
            ],
        )
        .unwrap();
        assert!(!z.check_read_once());
        let path = z.read_once_violation().unwrap();
        assert_eq!(path, vec![0, 1]);
    }

    #[test]
    fn uniformity_check() {
        // Two parallel root-leaf edges labelled with different variables over
        // a 2-variable function: leaf sees inconsistent variable sets.
        let z = Nrobp::new(
            2,
            2,
            0,
            1,
            vec![
                BpEdge::labeled(0, 1, Literal::pos(0)),
                BpEdge::labeled(0, 1, Literal::pos(1)),
            ],
        )
        .unwrap();
        assert!(z.check_read_once());
        assert!(!z.check_uniform());

        // Single chain mentioning every variable once.
        let z = Nrobp::new(
            2,
            3,
            0,
            2,
            vec![
                BpEdge::labeled(0, 1, Literal::pos(0)),
                BpEdge::labeled(1, 2, Literal::neg(1)),
            ],
        )
        .unwrap();
        assert!(z.check_uniform());

        // A chain that misses a variable is not uniform.
        let z = Nrobp::new(2, 2, 0, 1, vec![BpEdge::labeled(0, 1, Literal::pos(0))]).unwrap();
        assert!(!z.check_uniform());
    }

    #[test]
    fn obdd_of_k2() {
        let g = Graph::complete(2);
        let z = build_frontier_obdd(&g, &Permutation::identity(2)).unwrap();
        assert_eq!(z.node_count(), 4);
        assert!(z.check_read_once());
        assert!(z.check_uniform());
        let f = phi(&g).unwrap();
        assert!(equivalent_to_cnf(&z, &f, 20).unwrap());
        // Accepted positive sets: {0}, {1}, {0,1}.
        for (mask, expect) in [(0b00, false), (0b01, true), (0b10, true), (0b11, true)] {
            assert_eq!(z.accepts_mask(mask), expect);
        }
    }

    #[test]
    fn obdd_of_p3_accepts_vertex_covers() {
        let g = Graph::path(3);
        let z = build_frontier_obdd(&g, &Permutation::identity(3)).unwrap();
        let f = phi(&g).unwrap();
        assert!(equivalent_to_cnf(&z, &f, 20).unwrap());
        // Positive sets are exactly those containing {1} or {0, 2}.
        for mask in 0u64..8 {
            let has = |v: u64| mask >> v & 1 == 1;
            let expect = has(1) || (has(0) && has(2));
            assert_eq!(z.accepts_mask(mask), expect, "mask {mask:03b}");
        }
    }

    #[test]
    fn obdd_state_count_bound() {
        for g in [Graph::cycle(5), Graph::complete(4), Graph::path(6)] {
            let n = g.vertex_count();
            let sv = Permutation::identity(n);
            let z = build_frontier_obdd(&g, &sv).unwrap();
            // frontier(prefix k) = prefix vertices with a neighbor at or
            // beyond position k.
            let mut bound = 2u64;
            for k in 1..n {
                let frontier = (0..k)
                    .filter(|&v| g.neighbors(v).iter().any(|&w| w >= k))
                    .count();
                bound += 1u64 << frontier;
            }
            assert!(z.node_count() as u64 <= bound);
        }
    }

    #[test]
    fn accepts_requires_full_assignment() {
        let z = single_edge_program();
        let mut a = LiteralSet::new(1);
        assert!(matches!(z.accepts(&a), Err(Error::PartialAssignment(0))));
        a.set(Literal::pos(0));
        assert!(z.accepts(&a).unwrap());
    }

    #[test]
    fn equivalence_checks() {
        let g = Graph::complete(3);
        let f = phi(&g).unwrap();
        let a = build_frontier_obdd(&g, &Permutation::identity(3)).unwrap();
        let b = build_frontier_obdd(&g, &Permutation::new(vec![2, 0, 1], 3).unwrap()).unwrap();
        assert!(equivalent(&a, &a, 20).unwrap());
        assert!(equivalent(&a, &b, 20).unwrap());
        assert!(equivalent_to_cnf(&b, &f, 20).unwrap());

        let z1 = single_edge_program();
        assert!(!equivalent(&a, &z1, 20).unwrap());
    }

    #[test]
    fn equivalence_respects_limit() {
        let z = single_edge_program();
        assert!(matches!(
            equivalent(&z, &z, 0),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn t_nodes_of_k2_obdd() {
        let g = Graph::complete(2);
        let z = build_frontier_obdd(&g, &Permutation::identity(2)).unwrap();
        let ones = t_nodes(&z, 1).unwrap();
        // The state reached by assigning v0 false guarantees {v1}; the root
        // and the leaf guarantee nothing.
        assert!(ones.iter().all(|t| t.node != z.root() && t.node != z.leaf()));
        assert!(ones.iter().any(|t| t.witness == vec![1]));
        // After +v0 the remaining paths may still refute v1: no witness.
        let twos = t_nodes(&z, 2).unwrap();
        assert!(twos.is_empty());
    }

    #[test]
    fn t_nodes_rejects_non_uniform() {
        let z = Nrobp::new(
            2,
            2,
            0,
            1,
            vec![
                BpEdge::labeled(0, 1, Literal::pos(0)),
                BpEdge::labeled(0, 1, Literal::pos(1)),
            ],
        )
        .unwrap();
        assert!(matches!(t_nodes(&z, 1), Err(Error::NotUniform)));
    }

    #[test]
    fn leaf_of_k3_obdd_is_not_a_2_node() {
        let g = Graph::complete(3);
        let z = build_frontier_obdd(&g, &Permutation::identity(3)).unwrap();
        let twos = t_nodes(&z, 2).unwrap();
        assert!(twos.iter().all(|t| t.node != z.leaf()));
    }

    #[test]
    fn root_leaf_cut_examples() {
        let g = Graph::complete(3);
        let z = build_frontier_obdd(&g, &Permutation::identity(3)).unwrap();
        assert!(is_root_leaf_cut(&z, &[z.root()]));
        assert!(is_root_leaf_cut(&z, &[z.leaf()]));
        assert!(!is_root_leaf_cut(&z, &[]));
    }

    #[test]
    fn forced_nodes_cut_k4() {
        // mw(K4) = 2; the 2-nodes of any uniform program for phi(K4) must
        // form a root-leaf cut.
        let g = Graph::complete(4);
        let z = build_frontier_obdd(&g, &Permutation::identity(4)).unwrap();
        let witnesses = t_nodes(&z, 2).unwrap();
        let nodes: Vec<u32> = witnesses.iter().map(|t| t.node).collect();
        assert!(is_root_leaf_cut(&z, &nodes));
    }

    #[test]
    fn path_labels_of_uniform_program_cover_all_vars() {
        let g = Graph::cycle(4);
        let z = build_frontier_obdd(&g, &Permutation::identity(4)).unwrap();
        let paths = z.enumerate_root_leaf_paths(10_000).unwrap();
        assert!(!paths.is_empty());
        for p in paths {
            let lits = z.path_literals(&p);
            let mut vars: Vec<u32> = lits.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 4, "every variable exactly once");
        }
    }

    #[test]
    fn random_programs_are_clean_and_read_once() {
        for seed in 0..40 {
            let z = random_clean_nrobp(3 + (seed % 10) as u32, seed);
            assert!(z.check_read_once(), "seed {seed}");
            for e in z.edges() {
                if e.label.is_some() {
                    assert_eq!(z.in_neighbour_count(e.head), 1, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn random_programs_are_deterministic_per_seed() {
        let a = random_clean_nrobp(8, 123);
        let b = random_clean_nrobp(8, 123);
        assert_eq!(a, b);
    }

    #[test]
    fn traditional_validation() {
        // Single decision node on one variable.
        let t = TraditionalNrobp::new(
            1,
            3,
            0,
            1,
            2,
            vec![Some(0), None, None],
            vec![
                TEdge {
                    tail: 0,
                    head: 1,
                    label: Some(true),
                },
                TEdge {
                    tail: 0,
                    head: 2,
                    label: Some(false),
                },
            ],
        )
        .unwrap();
        assert!(t.accepts_mask(0b1));
        assert!(!t.accepts_mask(0b0));

        // Labelled node missing its false edge.
        assert!(TraditionalNrobp::new(
            1,
            3,
            0,
            1,
            2,
            vec![Some(0), None, None],
            vec![
                TEdge {
                    tail: 0,
                    head: 1,
                    label: Some(true)
                },
                TEdge {
                    tail: 0,
                    head: 2,
                    label: Some(true)
                },
            ],
        )
        .is_err());
    }
}
