//! Matching width: exact subset DP, heuristic upper bounds and the
//! lower-bound falsification harness.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CutMatcher, Graph};

/// Default cap on the subset DP (memory grows as `2^n`).
pub const DEFAULT_EXACT_LIMIT: u32 = 22;

/// Hard cap: masks are kept in `u32` and the DP tables in memory.
const ABSOLUTE_EXACT_LIMIT: u32 = 26;

/// A permutation of the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(order: Vec<u32>, vertex_count: u32) -> Result<Self> {
        if order.len() != vertex_count as usize {
            return Err(Error::NotAPermutation);
        }
        let mut seen = vec![false; vertex_count as usize];
        for &v in &order {
            if v >= vertex_count || seen[v as usize] {
                return Err(Error::NotAPermutation);
            }
            seen[v as usize] = true;
        }
        Ok(Permutation(order))
    }

    pub fn identity(vertex_count: u32) -> Self {
        Permutation((0..vertex_count).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

/// Result of a matching-width computation.
#[derive(Clone, Debug, Serialize)]
pub struct MwResult {
    pub width: u32,
    /// Permutation attaining `width`.
    pub permutation: Vec<u32>,
    /// Prefix lengths of the witness permutation whose cut attains `width`.
    pub prefix_lengths: Vec<u32>,
}

/// The matching width of a permutation: the maximum over its prefixes of the
/// largest matching crossing the prefix cut.
pub fn permutation_width(g: &Graph, sv: &Permutation) -> Result<u32> {
    if sv.as_slice().len() != g.vertex_count() as usize {
        return Err(Error::NotAPermutation);
    }
    Permutation::new(sv.as_slice().to_vec(), g.vertex_count())?;
    let mut scratch = EvalScratch::new(g.vertex_count());
    Ok(width_capped(g, sv.as_slice(), u32::MAX, &mut scratch))
}

pub(crate) struct EvalScratch {
    matcher: CutMatcher,
    in_s1: Vec<bool>,
}

impl EvalScratch {
    pub(crate) fn new(n: u32) -> Self {
        EvalScratch {
            matcher: CutMatcher::new(n),
            in_s1: vec![false; n as usize],
        }
    }
}

/// Width of `order`, computed exactly when it is `< cap`; returns `cap` as
/// soon as some prefix cut reaches it.
pub(crate) fn width_capped(g: &Graph, order: &[u32], cap: u32, scratch: &mut EvalScratch) -> u32 {
    let n = order.len();
    scratch.in_s1.fill(false);
    let mut best = 0;
    for &v in order.iter().take(n.saturating_sub(1)) {
        scratch.in_s1[v as usize] = true;
        let m = scratch.matcher.run(g, &scratch.in_s1, cap);
        best = best.max(m);
        if best >= cap {
            return cap;
        }
    }
    best
}

fn prefix_lengths_attaining(g: &Graph, order: &[u32], width: u32) -> Vec<u32> {
    let mut scratch = EvalScratch::new(g.vertex_count());
    let mut out = Vec::new();
    for (k, &v) in order.iter().enumerate().take(order.len().saturating_sub(1)) {
        scratch.in_s1[v as usize] = true;
        if scratch.matcher.run(g, &scratch.in_s1, u32::MAX) == width {
            out.push(k as u32 + 1);
        }
    }
    out
}

/// Exact matching width by dynamic programming over vertex subsets:
/// `best(S) = min over v in S of max(best(S \ {v}), cut(S))`, answer
/// `best(V)`. Memory and time grow as `2^n`; `n` must not exceed `limit`.
pub fn exact_mw(g: &Graph, limit: u32) -> Result<MwResult> {
    let n = g.vertex_count();
    let limit = limit.min(ABSOLUTE_EXACT_LIMIT);
    if n > limit {
        return Err(Error::SizeLimit {
            what: "exact matching-width DP",
            limit: limit as u64,
            actual: n as u64,
        });
    }
    if n == 0 {
        return Ok(MwResult {
            width: 0,
            permutation: vec![],
            prefix_lengths: vec![],
        });
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut cut = vec![0u8; full as usize + 1];
    let mut best = vec![0u8; full as usize + 1];
    let mut scratch = EvalScratch::new(n);
    for mask in 1..=full {
        scratch.in_s1.fill(false);
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros();
            m &= m - 1;
            scratch.in_s1[v as usize] = true;
        }
        cut[mask as usize] = scratch.matcher.run(g, &scratch.in_s1, u32::MAX) as u8;
        let mut inner = u8::MAX;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros();
            m &= m - 1;
            inner = inner.min(best[(mask & !(1 << v)) as usize]);
        }
        best[mask as usize] = inner.max(cut[mask as usize]);
    }

    // Reconstruct a witness, smallest vertex id first at every backtracking
    // step: the chosen vertex is the last of the current prefix set.
    let mut order = vec![0u32; n as usize];
    let mut mask = full;
    for k in (0..n as usize).rev() {
        let target = best[mask as usize].max(cut[mask as usize]);
        let mut chosen = None;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros();
            m &= m - 1;
            if best[(mask & !(1 << v)) as usize].max(cut[mask as usize]) <= target {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("DP table admits a witness");
        order[k] = v;
        mask &= !(1 << v);
    }

    let width = best[full as usize] as u32;
    let prefix_lengths = prefix_lengths_attaining(g, &order, width);
    Ok(MwResult {
        width,
        permutation: order,
        prefix_lengths,
    })
}

/// Seeded local search for a low-width permutation: steepest descent over
/// adjacent transpositions and single-vertex reinsertions, with random
/// restarts. One unit of `budget` is one permutation evaluation. The result
/// width is an upper bound on `mw(g)` and is deterministic in
/// `(budget, seed)`.
pub fn heuristic_mw_upper(g: &Graph, budget: u64, seed: u64) -> MwResult {
    let outcome = ordering_search(g, budget, seed, None);
    let prefix_lengths = prefix_lengths_attaining(g, &outcome.best_order, outcome.best_width);
    MwResult {
        width: outcome.best_width,
        permutation: outcome.best_order,
        prefix_lengths,
    }
}

/// Search for a permutation of width strictly below `bound`; `Some` refutes
/// the claim `mw(g) >= bound`. Deterministic in `(budget, seed)`.
pub fn falsify_lower_bound(g: &Graph, bound: u32, budget: u64, seed: u64) -> Option<Permutation> {
    if bound == 0 {
        return None;
    }
    let outcome = ordering_search(g, budget, seed, Some(bound));
    outcome
        .below_target
        .map(|order| Permutation::new(order, g.vertex_count()).expect("search keeps permutations"))
}

struct SearchOutcome {
    best_width: u32,
    best_order: Vec<u32>,
    below_target: Option<Vec<u32>>,
}

fn ordering_search(g: &Graph, budget: u64, seed: u64, target: Option<u32>) -> SearchOutcome {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = EvalScratch::new(n);
    let mut best_order: Vec<u32> = (0..n).collect();
    let mut best_width = u32::MAX;
    let mut left = budget.max(1);

    let mut current = best_order.clone();
    let mut fresh_restart = true; // first candidate is the identity order
    'outer: loop {
        if !fresh_restart {
            current = best_order.clone();
            current.shuffle(&mut rng);
        }
        fresh_restart = false;
        // Evaluation cap: anything >= the best seen so far is not useful.
        let mut cur_width = eval(g, &current, best_width, &mut scratch, &mut left);
        if cur_width < best_width {
            best_width = cur_width;
            best_order = current.clone();
            if target.is_some_and(|t| best_width < t) {
                break 'outer;
            }
        }
        if left == 0 {
            break;
        }
        // Steepest descent over the move neighborhood.
        loop {
            let mut best_move: Option<Vec<u32>> = None;
            let mut best_move_width = cur_width;
            for cand in neighborhood(&current) {
                if left == 0 {
                    break 'outer;
                }
                let w = eval(g, &cand, best_move_width, &mut scratch, &mut left);
                if w < best_move_width {
                    best_move_width = w;
                    best_move = Some(cand);
                }
            }
            let Some(cand) = best_move else { break };
            current = cand;
            cur_width = best_move_width;
            if cur_width < best_width {
                best_width = cur_width;
                best_order = current.clone();
                if target.is_some_and(|t| best_width < t) {
                    break 'outer;
                }
            }
        }
        if left == 0 {
            break;
        }
    }

    // `best_width` may equal the cap used during its evaluation; make the
    // reported value exact.
    let exact = width_capped(g, &best_order, u32::MAX, &mut scratch);
    let below = target.filter(|&t| exact < t).map(|_| best_order.clone());
    SearchOutcome {
        best_width: exact,
        best_order,
        below_target: below,
    }
}

fn eval(g: &Graph, order: &[u32], cap: u32, scratch: &mut EvalScratch, left: &mut u64) -> u32 {
    *left = left.saturating_sub(1);
    width_capped(g, order, cap.saturating_add(1), scratch)
}

/// Adjacent transpositions followed by single-vertex reinsertions.
fn neighborhood(order: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    let n = order.len();
    let swaps = (0..n.saturating_sub(1)).map(move |i| {
        let mut c = order.to_vec();
        c.swap(i, i + 1);
        c
    });
    let inserts = (0..n).flat_map(move |i| {
        (0..n).filter_map(move |j| {
            if i == j || (j > i && j == i + 1) {
                return None; // no-ops and duplicates of adjacent swaps
            }
            let mut c = order.to_vec();
            let v = c.remove(i);
            c.insert(if j > i { j - 1 } else { j }, v);
            Some(c)
        })
    });
    swaps.chain(inserts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 1, 2], 3).is_ok());
        assert!(matches!(
            Permutation::new(vec![0, 1, 1], 3),
            Err(Error::NotAPermutation)
        ));
        assert!(matches!(
            Permutation::new(vec![0, 1], 3),
            Err(Error::NotAPermutation)
        ));
    }

    #[test]
    fn permutation_width_examples() {
        let c4 = Graph::cycle(4);
        let sv = Permutation::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(permutation_width(&c4, &sv).unwrap(), 2);

        let k2 = Graph::complete(2);
        assert_eq!(
            permutation_width(&k2, &Permutation::identity(2)).unwrap(),
            1
        );

        let e = Graph::empty(4);
        assert_eq!(permutation_width(&e, &Permutation::identity(4)).unwrap(), 0);
    }

    #[test]
    fn exact_mw_complete_graphs() {
        for n in 2..=8 {
            let r = exact_mw(&Graph::complete(n), DEFAULT_EXACT_LIMIT).unwrap();
            assert_eq!(r.width, n / 2, "K_{n}");
        }
    }

    #[test]
    fn exact_mw_cycles() {
        assert_eq!(exact_mw(&Graph::complete(3), 22).unwrap().width, 1);
        for n in 4..=12 {
            let r = exact_mw(&Graph::cycle(n), DEFAULT_EXACT_LIMIT).unwrap();
            assert_eq!(r.width, 2, "C_{n}");
        }
    }

    #[test]
    fn exact_mw_witness_consistent() {
        for g in [
            Graph::complete(5),
            Graph::cycle(6),
            Graph::path(6),
            Graph::new(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap(),
        ] {
            let r = exact_mw(&g, 22).unwrap();
            let sv = Permutation::new(r.permutation.clone(), g.vertex_count()).unwrap();
            assert_eq!(permutation_width(&g, &sv).unwrap(), r.width);
            for &k in &r.prefix_lengths {
                let prefix = &r.permutation[..k as usize];
                assert_eq!(g.max_cut_matching(prefix).unwrap().0, r.width);
            }
        }
    }

    #[test]
    fn exact_mw_small_full_enumeration() {
        // Cross-check against enumeration of all |V|! permutations.
        fn brute(g: &Graph) -> u32 {
            let n = g.vertex_count();
            let mut order: Vec<u32> = (0..n).collect();
            let mut best = u32::MAX;
            permutohedron_heap(&mut order, &mut |p| {
                let sv = Permutation::new(p.to_vec(), n).unwrap();
                best = best.min(permutation_width(g, &sv).unwrap());
            });
            best
        }
        // Heap's algorithm, no external deps.
        fn permutohedron_heap(a: &mut [u32], f: &mut impl FnMut(&[u32])) {
            let n = a.len();
            let mut c = vec![0usize; n];
            f(a);
            let mut i = 0;
            while i < n {
                if c[i] < i {
                    if i % 2 == 0 {
                        a.swap(0, i);
                    } else {
                        a.swap(c[i], i);
                    }
                    f(a);
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
        }
        for g in [
            Graph::complete(5),
            Graph::cycle(5),
            Graph::path(5),
            Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap(),
            Graph::new(6, [(0, 3), (1, 4), (2, 5), (0, 4), (1, 5)]).unwrap(),
        ] {
            assert_eq!(exact_mw(&g, 22).unwrap().width, brute(&g));
        }
    }

    #[test]
    fn exact_mw_monotone_under_edge_addition() {
        let base = Graph::new(5, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let more = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        assert!(exact_mw(&more, 22).unwrap().width >= exact_mw(&base, 22).unwrap().width);
    }

    #[test]
    fn exact_mw_respects_limit() {
        let g = Graph::empty(23);
        assert!(matches!(
            exact_mw(&g, DEFAULT_EXACT_LIMIT),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn heuristic_examples() {
        // Every permutation of K_6 has width exactly 3.
        let r = heuristic_mw_upper(&Graph::complete(6), 100, 7);
        assert_eq!(r.width, 3);

        let r = heuristic_mw_upper(&Graph::empty(5), 10, 0);
        assert_eq!(r.width, 0);

        let r = heuristic_mw_upper(&Graph::cycle(8), 5_000, 1);
        assert_eq!(r.width, 2);
    }

    #[test]
    fn heuristic_is_upper_bound_and_deterministic() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (1, 5)])
            .unwrap();
        let exact = exact_mw(&g, 22).unwrap().width;
        let a = heuristic_mw_upper(&g, 2_000, 42);
        let b = heuristic_mw_upper(&g, 2_000, 42);
        assert!(a.width >= exact);
        assert_eq!(a.width, b.width);
        assert_eq!(a.permutation, b.permutation);
    }

    #[test]
    fn falsify_examples() {
        let k4 = Graph::complete(4);
        assert!(falsify_lower_bound(&k4, 2, 10_000, 3).is_none());
        let found = falsify_lower_bound(&k4, 3, 10_000, 3).expect("every order of K4 has width 2");
        assert_eq!(permutation_width(&k4, &found).unwrap(), 2);

        // A graph with edges has no width-0 permutation.
        let t1k2 = Graph::new(6, [(0, 1), (2, 3), (4, 5), (0, 2), (1, 3), (0, 4), (1, 5)]).unwrap();
        assert!(falsify_lower_bound(&t1k2, 1, 5_000, 3).is_none());
    }
}
