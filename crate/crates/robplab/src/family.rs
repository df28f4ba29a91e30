//! The hard instance family: complete binary trees, paths, the tree product
//! `T(H)`, its canonical tree decomposition, and the matching-width bound
//! formula.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Matching};

/// A rooted tree: a connected acyclic graph plus a designated root and the
/// induced parent mapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeGraph {
    graph: Graph,
    root: u32,
    parent: Vec<Option<u32>>,
    depth: Vec<u32>,
}

impl TreeGraph {
    pub fn new(graph: Graph, root: u32) -> Result<Self> {
        let n = graph.vertex_count();
        if root >= n {
            return Err(Error::VertexOutOfRange {
                vertex: root,
                count: n,
            });
        }
        if graph.edge_count() + 1 != n as usize || !graph.is_connected() {
            return Err(Error::InvalidParameter(
                "tree graph must be connected and acyclic".into(),
            ));
        }
        let mut parent = vec![None; n as usize];
        let mut depth = vec![0u32; n as usize];
        let mut seen = vec![false; n as usize];
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root as usize] = true;
        while let Some(v) = queue.pop_front() {
            for &w in graph.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = Some(v);
                    depth[w as usize] = depth[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(TreeGraph {
            graph,
            root,
            parent,
            depth,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn vertex_count(&self) -> u32 {
        self.graph.vertex_count()
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    /// The unique path between two tree vertices, endpoints included.
    pub fn path_between(&self, a: u32, b: u32) -> Vec<u32> {
        let (mut x, mut y) = (a, b);
        let mut from_a = vec![a];
        let mut from_b = vec![b];
        while self.depth[x as usize] > self.depth[y as usize] {
            x = self.parent[x as usize].unwrap();
            from_a.push(x);
        }
        while self.depth[y as usize] > self.depth[x as usize] {
            y = self.parent[y as usize].unwrap();
            from_b.push(y);
        }
        while x != y {
            x = self.parent[x as usize].unwrap();
            y = self.parent[y as usize].unwrap();
            from_a.push(x);
            from_b.push(y);
        }
        from_b.pop();
        from_b.reverse();
        from_a.extend(from_b);
        from_a
    }
}

/// Complete binary tree of height `r` (root-leaf distance), rooted at 0 with
/// vertices numbered in level order: the children of `i` are `2i+1`, `2i+2`.
pub fn complete_binary_tree(r: u32) -> TreeGraph {
    let n: u32 = (1 << (r + 1)) - 1;
    let edges = (1..n).map(|v| ((v - 1) / 2, v));
    TreeGraph::new(Graph::new(n, edges).unwrap(), 0).unwrap()
}

/// Path of `q` vertices `v0 - v1 - ... - v(q-1)`.
pub fn path_graph(q: u32) -> Result<Graph> {
    if q < 1 {
        return Err(Error::InvalidParameter(
            "path needs at least 1 vertex".into(),
        ));
    }
    Ok(Graph::path(q))
}

/// The product `T(H)`: one copy of `H` per tree vertex, with same-labelled
/// vertices of adjacent copies joined. Vertex `(t, h)` gets id
/// `t * |V(H)| + h`.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    graph: Graph,
    tree: TreeGraph,
    template: Graph,
}

impl ProductGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tree(&self) -> &TreeGraph {
        &self.tree
    }

    pub fn template(&self) -> &Graph {
        &self.template
    }

    pub fn vertex(&self, tree_vertex: u32, template_vertex: u32) -> u32 {
        tree_vertex * self.template.vertex_count() + template_vertex
    }

    /// Tree vertex whose copy of `H` contains `v`.
    pub fn copy_of(&self, v: u32) -> u32 {
        v / self.template.vertex_count()
    }

    /// Template vertex (label) of `v` within its copy.
    pub fn label_of(&self, v: u32) -> u32 {
        v % self.template.vertex_count()
    }
}

pub fn tree_product(tree: &TreeGraph, template: &Graph) -> ProductGraph {
    let nt = tree.vertex_count();
    let nh = template.vertex_count();
    let mut edges = Vec::new();
    for t in 0..nt {
        for &(a, b) in template.edges() {
            edges.push((t * nh + a, t * nh + b));
        }
    }
    for &(t1, t2) in tree.graph().edges() {
        for h in 0..nh {
            edges.push((t1 * nh + h, t2 * nh + h));
        }
    }
    let labels = (0..nt)
        .flat_map(|t| (0..nh).map(move |h| format!("t{t}.h{h}")))
        .collect();
    let graph = Graph::new(nt * nh, edges).unwrap().with_labels(labels);
    ProductGraph {
        graph,
        tree: tree.clone(),
        template: template.clone(),
    }
}

/// Parameters and product graph of the family `T_r(P_{(k-y+1)/2})`.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub product: ProductGraph,
    pub params: FamilyParams,
}

/// Derived family parameters; `n` is the vertex count of the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub k: u32,
    pub y: u32,
    pub q: u32,
    pub p: u32,
    pub r: u32,
    pub n: u32,
}

/// Instantiate the family for treewidth target `k >= 3` and height `r`:
/// `y` is the unique value in `0..=3` making `k - y + 1` divisible by 4,
/// `q = (k - y + 1) / 2`, `p = q / 2`, and the graph is `T_r(P_q)`.
pub fn family_graph(k: u32, r: u32) -> Result<FamilyInstance> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!(
            "family requires k >= 3, got {k}"
        )));
    }
    let y = (0..=3)
        .find(|y| (k - y + 1).is_multiple_of(4))
        .expect("one residue in 0..=3 matches");
    let p = (k - y + 1) / 4;
    let q = 2 * p;
    let tree = complete_binary_tree(r);
    let template = path_graph(q)?;
    let product = tree_product(&tree, &template);
    let n = product.graph().vertex_count();
    Ok(FamilyInstance {
        product,
        params: FamilyParams { k, y, q, p, r, n },
    })
}

/// A tree decomposition: a tree plus one bag of decomposed-graph vertices per
/// tree vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub tree: TreeGraph,
    pub bags: Vec<Vec<u32>>,
}

impl TreeDecomposition {
    pub fn width(&self) -> u32 {
        self.bags
            .iter()
            .map(|b| b.len() as u32)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

/// The decomposition from the family construction: the decomposition tree is
/// the product's tree; the root bag is its own copy of `V(H)`, every other
/// bag is its own copy plus the parent's copy.
pub fn canonical_tree_decomposition(pg: &ProductGraph) -> TreeDecomposition {
    let tree = pg.tree().clone();
    let nh = pg.template().vertex_count();
    let bags = (0..tree.vertex_count())
        .map(|t| {
            let mut bag: Vec<u32> = (0..nh).map(|h| pg.vertex(t, h)).collect();
            if let Some(par) = tree.parent(t) {
                bag.extend((0..nh).map(|h| pg.vertex(par, h)));
            }
            bag.sort_unstable();
            bag
        })
        .collect();
    TreeDecomposition { tree, bags }
}

/// First violated tree-decomposition rule, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TdViolation {
    /// Union rule: this vertex appears in no bag.
    MissingVertex(u32),
    /// Containment rule: no bag contains both endpoints of this edge.
    UncoveredEdge(u32, u32),
    /// Connectedness rule: the bags holding this vertex do not induce a
    /// subtree.
    DisconnectedVertex(u32),
}

/// Outcome of validating a tree decomposition against a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdCheck {
    Valid { width: u32 },
    Invalid(TdViolation),
}

/// Check the union, containment and connectedness rules in that order,
/// returning the width on success or the first violation found.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdCheck {
    let n = g.vertex_count() as usize;
    let mut occurrences: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if (v as usize) < n {
                occurrences[v as usize].push(b as u32);
            }
        }
    }
    if let Some(v) = occurrences.iter().position(|o| o.is_empty()) {
        return TdCheck::Invalid(TdViolation::MissingVertex(v as u32));
    }
    'edges: for &(u, v) in g.edges() {
        for b in &occurrences[u as usize] {
            if td.bags[*b as usize].contains(&v) {
                continue 'edges;
            }
        }
        return TdCheck::Invalid(TdViolation::UncoveredEdge(u, v));
    }
    for (v, occ) in occurrences.iter().enumerate() {
        let in_occ: std::collections::HashSet<u32> = occ.iter().copied().collect();
        let mut seen = std::collections::HashSet::from([occ[0]]);
        let mut stack = vec![occ[0]];
        while let Some(b) = stack.pop() {
            for &c in td.tree.graph().neighbors(b) {
                if in_occ.contains(&c) && seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        if seen.len() != occ.len() {
            return TdCheck::Invalid(TdViolation::DisconnectedVertex(v as u32));
        }
    }
    TdCheck::Valid { width: td.width() }
}

pub fn max_degree(g: &Graph) -> u32 {
    g.max_degree()
}

pub fn ceil_log2(p: u32) -> u32 {
    assert!(p >= 1);
    32 - (p - 1).leading_zeros()
}

/// The matching-width bound for products of a connected `2p`-vertex template:
/// `(r + 1 - ceil(log2 p)) * p / 2`, exact.
pub fn mw_lower_bound_formula(p: u32, r: u32) -> Result<Ratio<u64>> {
    if p < 1 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    let c = ceil_log2(p);
    if r < c {
        return Err(Error::InvalidParameter(format!(
            "formula requires r >= ceil(log2 p) = {c}, got r = {r}"
        )));
    }
    Ok(Ratio::new((r as u64 + 1 - c as u64) * p as u64, 2))
}

/// Constructive cross matching between two copies whose labelled vertices in
/// `labels` fall on opposite sides of a vertex partition: walk the tree path
/// between the copies and, per label, take the first consecutive pair that
/// switches sides.
///
/// `side[v]` gives the partition class of product vertex `v`. Preconditions:
/// for each label `u`, `side` differs between the copies of `u` in `t1` and
/// `t2`, and the labels are distinct.
pub fn cross_matching_via_tree_path(
    pg: &ProductGraph,
    side: &[bool],
    t1: u32,
    t2: u32,
    labels: &[u32],
) -> Result<Matching> {
    let path = pg.tree().path_between(t1, t2);
    let mut edges = Vec::with_capacity(labels.len());
    for &u in labels {
        let start = side[pg.vertex(t1, u) as usize];
        let end = side[pg.vertex(t2, u) as usize];
        if start == end {
            return Err(Error::InvalidParameter(format!(
                "label {u} does not separate the two copies"
            )));
        }
        let pair = path.windows(2).find(|w| {
            side[pg.vertex(w[0], u) as usize] == start && side[pg.vertex(w[1], u) as usize] == end
        });
        let Some(w) = pair else {
            return Err(Error::InvalidParameter(format!(
                "no switching edge along the tree path for label {u}"
            )));
        };
        let (a, b) = (pg.vertex(w[0], u), pg.vertex(w[1], u));
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    let m = Matching::from_edges(edges);
    // Distinct labels give disjoint ends by construction; validate anyway.
    let s1: Vec<u32> = (0..pg.graph().vertex_count())
        .filter(|&v| side[v as usize])
        .collect();
    if !m.is_valid_cut_matching(pg.graph(), &s1) {
        return Err(Error::InvalidParameter(
            "constructed edges do not form a cut matching".into(),
        ));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mw::{exact_mw, permutation_width, Permutation};

    #[test]
    fn binary_tree_sizes() {
        assert_eq!(complete_binary_tree(0).vertex_count(), 1);
        assert_eq!(complete_binary_tree(2).vertex_count(), 7);
        assert_eq!(complete_binary_tree(2).graph().edge_count(), 6);
        assert_eq!(complete_binary_tree(3).vertex_count(), 15);
        let t = complete_binary_tree(3);
        assert_eq!(t.depth(0), 0);
        assert_eq!(t.depth(14), 3);
    }

    #[test]
    fn path_graphs() {
        assert_eq!(path_graph(1).unwrap().edge_count(), 0);
        assert_eq!(path_graph(2).unwrap(), Graph::complete(2));
        assert_eq!(path_graph(3).unwrap().edge_count(), 2);
        assert!(path_graph(0).is_err());
    }

    #[test]
    fn tree_path_between() {
        let t = complete_binary_tree(2);
        assert_eq!(t.path_between(3, 4), vec![3, 1, 4]);
        assert_eq!(t.path_between(3, 6), vec![3, 1, 0, 2, 6]);
        assert_eq!(t.path_between(5, 5), vec![5]);
        assert_eq!(t.path_between(0, 5), vec![0, 2, 5]);
    }

    #[test]
    fn product_examples() {
        let t3p3 = tree_product(&complete_binary_tree(3), &Graph::path(3));
        assert_eq!(t3p3.graph().vertex_count(), 45);

        let h = Graph::cycle(4);
        let t0 = tree_product(&complete_binary_tree(0), &h);
        assert_eq!(t0.graph().edges(), h.edges());

        let t1k2 = tree_product(&complete_binary_tree(1), &Graph::complete(2));
        assert_eq!(t1k2.graph().vertex_count(), 6);
        assert_eq!(t1k2.graph().edge_count(), 7); // 3 copies + 2 tree edges * 2 labels
    }

    #[test]
    fn product_adjacency_rule() {
        let pg = tree_product(&complete_binary_tree(2), &Graph::path(3));
        let g = pg.graph();
        for u in 0..g.vertex_count() {
            for v in u + 1..g.vertex_count() {
                let (tu, hu) = (pg.copy_of(u), pg.label_of(u));
                let (tv, hv) = (pg.copy_of(v), pg.label_of(v));
                let expected = if tu == tv {
                    pg.template().has_edge(hu, hv)
                } else {
                    hu == hv && pg.tree().graph().has_edge(tu, tv)
                };
                assert_eq!(g.has_edge(u, v), expected, "({u},{v})");
            }
        }
    }

    #[test]
    fn family_parameter_selection() {
        let f = family_graph(3, 1).unwrap();
        assert_eq!((f.params.y, f.params.q, f.params.p), (0, 2, 1));
        let f = family_graph(7, 1).unwrap();
        assert_eq!((f.params.y, f.params.q), (0, 4));
        let f = family_graph(5, 1).unwrap();
        assert_eq!((f.params.y, f.params.q), (2, 2));
        assert!(family_graph(2, 1).is_err());
    }

    #[test]
    fn family_vertex_count_formula() {
        for k in [3, 5, 7, 9, 11] {
            for r in 0..=4 {
                let f = family_graph(k, r).unwrap();
                let expect = ((1u32 << (r + 1)) - 1) * (k - f.params.y + 1) / 2;
                assert_eq!(f.params.n, expect);
            }
        }
    }

    #[test]
    fn canonical_td_valid_and_width() {
        let f = family_graph(3, 2).unwrap();
        let td = canonical_tree_decomposition(&f.product);
        // All non-root bags have size 2|V(H)| = 4.
        assert!(td.bags.iter().skip(1).all(|b| b.len() == 4));
        assert_eq!(
            validate_td(f.product.graph(), &td),
            TdCheck::Valid { width: 3 }
        );

        let f = family_graph(7, 3).unwrap();
        let td = canonical_tree_decomposition(&f.product);
        assert_eq!(
            validate_td(f.product.graph(), &td),
            TdCheck::Valid { width: 7 }
        );

        let h = Graph::cycle(5);
        let t0 = tree_product(&complete_binary_tree(0), &h);
        let td = canonical_tree_decomposition(&t0);
        assert_eq!(td.bags.len(), 1);
        assert_eq!(validate_td(t0.graph(), &td), TdCheck::Valid { width: 4 });
    }

    #[test]
    fn validate_td_trivial_and_violations() {
        let g = Graph::cycle(4);
        let single = TreeDecomposition {
            tree: TreeGraph::new(Graph::empty(1), 0).unwrap(),
            bags: vec![vec![0, 1, 2, 3]],
        };
        assert_eq!(validate_td(&g, &single), TdCheck::Valid { width: 3 });

        // Two bags never joining the endpoints of edge (0, 3).
        let two = TreeDecomposition {
            tree: TreeGraph::new(Graph::path(2), 0).unwrap(),
            bags: vec![vec![0, 1, 2], vec![1, 2, 3]],
        };
        assert_eq!(
            validate_td(&g, &two),
            TdCheck::Invalid(TdViolation::UncoveredEdge(0, 3))
        );

        let missing = TreeDecomposition {
            tree: TreeGraph::new(Graph::empty(1), 0).unwrap(),
            bags: vec![vec![0, 1, 2]],
        };
        assert_eq!(
            validate_td(&g, &missing),
            TdCheck::Invalid(TdViolation::MissingVertex(3))
        );

        let disconnected = TreeDecomposition {
            tree: TreeGraph::new(Graph::path(3), 0).unwrap(),
            bags: vec![vec![0, 1], vec![1, 2], vec![0, 2, 3]],
        };
        assert_eq!(
            validate_td(&Graph::cycle(4), &disconnected),
            TdCheck::Invalid(TdViolation::DisconnectedVertex(0))
        );
    }

    #[test]
    fn max_degree_of_family() {
        // Small-path templates (q = 2) top out at 4, longer ones reach 5.
        for (k, expect) in [(3, 4), (5, 4), (7, 5), (9, 5), (11, 5)] {
            let f = family_graph(k, 2).unwrap();
            assert_eq!(max_degree(f.product.graph()), expect, "k = {k}");
        }
        assert_eq!(max_degree(&Graph::path(5)), 2);
        assert_eq!(max_degree(&Graph::complete(5)), 4);
    }

    #[test]
    fn bound_formula_values() {
        assert_eq!(mw_lower_bound_formula(1, 1).unwrap(), Ratio::new(1, 1));
        assert_eq!(mw_lower_bound_formula(1, 3).unwrap(), Ratio::new(2, 1));
        assert_eq!(mw_lower_bound_formula(2, 1).unwrap(), Ratio::new(1, 1));
        assert_eq!(mw_lower_bound_formula(3, 2).unwrap(), Ratio::new(3, 2));
        assert!(mw_lower_bound_formula(2, 0).is_err());
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn product_mw_monotone_in_height() {
        let mut prev = 0;
        for r in 0..=2 {
            let pg = tree_product(&complete_binary_tree(r), &Graph::complete(2));
            let w = exact_mw(pg.graph(), 22).unwrap().width;
            assert!(w >= prev, "r = {r}");
            prev = w;
        }
    }

    #[test]
    fn constructive_cross_matching() {
        // Partition T_2(P_4) by a prefix of the identity order; copies 0 and
        // 6 then disagree on a label set.
        let pg = tree_product(&complete_binary_tree(2), &Graph::path(4));
        let g = pg.graph();
        let n = g.vertex_count();
        let side: Vec<bool> = (0..n).map(|v| v < n / 2).collect();
        let labels: Vec<u32> = (0..4)
            .filter(|&h| side[pg.vertex(0, h) as usize] != side[pg.vertex(6, h) as usize])
            .collect();
        assert!(!labels.is_empty());
        let m = cross_matching_via_tree_path(&pg, &side, 0, 6, &labels).unwrap();
        assert_eq!(m.size() as usize, labels.len());
    }

    #[test]
    fn product_width_bound_exact_cases() {
        for (h, p, r) in [
            (Graph::complete(2), 1u32, 0u32),
            (Graph::complete(2), 1, 1),
            (Graph::complete(2), 1, 2),
            (Graph::path(4), 2, 1),
        ] {
            let pg = tree_product(&complete_binary_tree(r), &h);
            let lb = mw_lower_bound_formula(p, r).unwrap();
            let w = exact_mw(pg.graph(), 22).unwrap().width;
            assert!(
                Ratio::from_integer(w as u64) >= lb,
                "T_{r}(H) with p = {p}: mw = {w}, bound = {lb}"
            );
        }
    }

    #[test]
    fn product_width_of_identity_order_is_sane() {
        let pg = tree_product(&complete_binary_tree(1), &Graph::complete(2));
        let g = pg.graph();
        let w = permutation_width(g, &Permutation::identity(g.vertex_count())).unwrap();
        assert!(w >= 1);
    }
}
