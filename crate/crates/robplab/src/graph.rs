//! Undirected simple graphs, vertex covers and cut matchings.

use crate::error::{Error, Result};

/// Undirected simple graph with vertices `0..vertex_count`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically, so
/// that every derived output is canonical.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: u32,
    edges: Vec<(u32, u32)>,
    labels: Option<Vec<String>>,
    adj: Vec<Vec<u32>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(vertex_count: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut norm: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); vertex_count as usize];
        for &(u, v) in &norm {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: norm,
            labels: None,
            adj,
        })
    }

    pub fn empty(vertex_count: u32) -> Self {
        Graph::new(vertex_count, []).unwrap()
    }

    pub fn complete(n: u32) -> Self {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn path(n: u32) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    pub fn cycle(n: u32) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.vertex_count as usize);
        self.labels = Some(labels);
        self
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.vertex_count
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].len() as u32
    }

    pub fn max_degree(&self) -> u32 {
        self.adj.iter().map(|a| a.len() as u32).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj
            .get(u as usize)
            .is_some_and(|a| a.binary_search(&v).is_ok())
    }

    pub fn label(&self, v: u32) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v as usize].as_str())
    }

    pub fn isolated_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices().filter(|&v| self.degree(v) == 0)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count as usize];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// True iff every edge has an endpoint in `s`.
    pub fn is_vertex_cover(&self, s: &[u32]) -> Result<bool> {
        let mut in_s = vec![false; self.vertex_count as usize];
        for &v in s {
            if v >= self.vertex_count {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    count: self.vertex_count,
                });
            }
            in_s[v as usize] = true;
        }
        Ok(self
            .edges
            .iter()
            .all(|&(u, v)| in_s[u as usize] || in_s[v as usize]))
    }

    /// All inclusion-minimal vertex covers, each sorted ascending, the list in
    /// lexicographic order of the sorted vertex lists.
    ///
    /// Brute force over all `2^n` subsets; `n` must not exceed `limit`.
    pub fn enumerate_minimal_vcs(&self, limit: u32) -> Result<Vec<Vec<u32>>> {
        Ok(self
            .minimal_vc_masks(limit)?
            .into_iter()
            .map(mask_to_vec)
            .collect())
    }

    /// Minimal vertex covers as bit masks, in lexicographic order of the
    /// sorted vertex lists they encode.
    pub(crate) fn minimal_vc_masks(&self, limit: u32) -> Result<Vec<u64>> {
        let n = self.vertex_count;
        if n > limit.min(25) {
            return Err(Error::SizeLimit {
                what: "minimal vertex cover enumeration",
                limit: limit.min(25) as u64,
                actual: n as u64,
            });
        }
        let adj_mask: Vec<u64> = (0..n)
            .map(|v| {
                self.neighbors(v)
                    .iter()
                    .fold(0u64, |m, &w| m | (1u64 << w))
            })
            .collect();
        let mut out = Vec::new();
        'subsets: for s in 0u64..1u64 << n {
            // s is a VC iff its complement is an independent set.
            let comp = !s & ((1u64 << n) - 1);
            let mut c = comp;
            while c != 0 {
                let v = c.trailing_zeros();
                c &= c - 1;
                if adj_mask[v as usize] & comp != 0 {
                    continue 'subsets;
                }
            }
            // Minimal iff every member covers some edge on its own, i.e. has a
            // neighbor outside s.
            let mut m = s;
            while m != 0 {
                let v = m.trailing_zeros();
                m &= m - 1;
                if adj_mask[v as usize] & !s == 0 {
                    continue 'subsets;
                }
            }
            out.push(s);
        }
        out.sort_by(|a, b| mask_lex_cmp(*a, *b));
        Ok(out)
    }

    /// Maximum matching among the edges crossing the cut `(s1, V \ s1)`,
    /// with a witness. Computed by augmenting-path search with vertices
    /// scanned in ascending id order, so the witness is deterministic.
    pub fn max_cut_matching(&self, s1: &[u32]) -> Result<(u32, Matching)> {
        let mut in_s1 = vec![false; self.vertex_count as usize];
        for &v in s1 {
            if v >= self.vertex_count {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    count: self.vertex_count,
                });
            }
            in_s1[v as usize] = true;
        }
        let mut scratch = CutMatcher::new(self.vertex_count);
        let size = scratch.run(self, &in_s1, u32::MAX);
        let mut edges = scratch.matched_edges(&in_s1);
        edges.sort_unstable();
        Ok((size, Matching { edges }))
    }
}

fn mask_to_vec(mut m: u64) -> Vec<u32> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        v.push(m.trailing_zeros());
        m &= m - 1;
    }
    v
}

/// Lexicographic comparison of two vertex sets by their sorted element lists.
fn mask_lex_cmp(a: u64, b: u64) -> std::cmp::Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return std::cmp::Ordering::Equal,
            (true, false) => return std::cmp::Ordering::Less,
            (false, true) => return std::cmp::Ordering::Greater,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// A matching: vertex-disjoint edges of a host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<(u32, u32)>,
}

impl Matching {
    pub(crate) fn from_edges(edges: Vec<(u32, u32)>) -> Self {
        Matching { edges }
    }

    pub fn size(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Check the cut-matching invariants: every pair is an edge of `g`
    /// crossing the cut `(s1, V \ s1)` and no two pairs share an endpoint.
    pub fn is_valid_cut_matching(&self, g: &Graph, s1: &[u32]) -> bool {
        let mut in_s1 = vec![false; g.vertex_count() as usize];
        for &v in s1 {
            if v as usize >= in_s1.len() {
                return false;
            }
            in_s1[v as usize] = true;
        }
        let mut used = vec![false; g.vertex_count() as usize];
        for &(u, v) in &self.edges {
            if !g.has_edge(u, v) || in_s1[u as usize] == in_s1[v as usize] {
                return false;
            }
            if used[u as usize] || used[v as usize] {
                return false;
            }
            used[u as usize] = true;
            used[v as usize] = true;
        }
        true
    }
}

/// Reusable scratch space for repeated cut-matching computations.
///
/// `run` finds a maximum matching among edges with exactly one endpoint in
/// `s1`, stopping early once `cap` edges are matched (so the result is exact
/// whenever it is below `cap`).
pub(crate) struct CutMatcher {
    cross_adj: Vec<Vec<u32>>,
    left: Vec<u32>,
    matched_to: Vec<u32>,
    visited: Vec<u32>,
    stamp: u32,
}

const UNMATCHED: u32 = u32::MAX;

impl CutMatcher {
    pub(crate) fn new(n: u32) -> Self {
        CutMatcher {
            cross_adj: vec![Vec::new(); n as usize],
            left: Vec::new(),
            matched_to: vec![UNMATCHED; n as usize],
            visited: vec![0; n as usize],
            stamp: 0,
        }
    }

    pub(crate) fn run(&mut self, g: &Graph, in_s1: &[bool], cap: u32) -> u32 {
        for a in &mut self.cross_adj {
            a.clear();
        }
        self.left.clear();
        self.matched_to.fill(UNMATCHED);
        for &(u, v) in g.edges() {
            match (in_s1[u as usize], in_s1[v as usize]) {
                (true, false) => self.cross_adj[u as usize].push(v),
                (false, true) => self.cross_adj[v as usize].push(u),
                _ => {}
            }
        }
        for v in 0..g.vertex_count() {
            if in_s1[v as usize] && !self.cross_adj[v as usize].is_empty() {
                self.left.push(v);
            }
        }
        let mut size = 0;
        for i in 0..self.left.len() {
            if size >= cap {
                return cap;
            }
            let u = self.left[i];
            self.stamp += 1;
            if self.augment(u) {
                size += 1;
            }
        }
        size.min(cap)
    }

    fn augment(&mut self, u: u32) -> bool {
        for i in 0..self.cross_adj[u as usize].len() {
            let v = self.cross_adj[u as usize][i];
            if self.visited[v as usize] == self.stamp {
                continue;
            }
            self.visited[v as usize] = self.stamp;
            let owner = self.matched_to[v as usize];
            if owner == UNMATCHED || self.augment(owner) {
                self.matched_to[v as usize] = u;
                return true;
            }
        }
        false
    }

    fn matched_edges(&self, in_s1: &[bool]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (v, &u) in self.matched_to.iter().enumerate() {
            if u != UNMATCHED && !in_s1[v] {
                out.push((u.min(v as u32), u.max(v as u32)));
            }
        }
        out
    }
}
