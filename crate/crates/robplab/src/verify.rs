//! Runnable property suites: every module's invariants, exercised at a
//! configurable scale with seeded randomness. Used by `robplab verify` and
//! reused by the integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds;
use crate::bp::{self, build_frontier_obdd, random_clean_nrobp};
use crate::cnf::{phi, LiteralSet};
use crate::family::{
    canonical_tree_decomposition, complete_binary_tree, family_graph, cross_matching_via_tree_path,
    mw_lower_bound_formula, tree_product, TdCheck,
};
use crate::graph::Graph;
use crate::io;
use crate::mw::{exact_mw, falsify_lower_bound, permutation_width, Permutation};
use crate::transform::{
    classify_edges, eliminate_irregular_edge, is_clean, make_clean, to_arosrn, to_traditional,
    uniformize, EdgeClass,
};

/// Scale knobs for the suites.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Full scale: larger catalogs, more trials, bigger budgets.
    pub full: bool,
    pub mc_trials: u32,
    pub falsify_budget: u64,
}

impl VerifyConfig {
    pub fn quick(seed: u64) -> Self {
        VerifyConfig {
            seed,
            full: false,
            mc_trials: 20_000,
            falsify_budget: 20_000,
        }
    }

    pub fn full(seed: u64) -> Self {
        VerifyConfig {
            seed,
            full: true,
            mc_trials: 100_000,
            falsify_budget: 1_000_000,
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u128,
}

type Check = (&'static str, fn(&VerifyConfig, &mut ChaCha8Rng) -> std::result::Result<(), String>);

const CHECKS: &[Check] = &[
    ("graph.cover_correspondence", check_cover_correspondence),
    ("graph.cover_equivalence", check_cover_equivalence),
    ("graph.cut_symmetry", check_cut_symmetry),
    ("graph.matching_witness", check_matching_witness),
    ("mw.exact_vs_bruteforce", check_exact_vs_bruteforce),
    ("mw.witness_consistent", check_witness_consistent),
    ("mw.edge_monotone", check_edge_monotone),
    ("mw.product_height_monotone", check_product_height_monotone),
    ("family.path_switch_matching", check_path_switch_matching),
    ("family.balanced_partition_matching", check_balanced_partition_matching),
    ("family.width_bound_exact", check_width_bound_exact),
    ("family.width_bound_search", check_width_bound_search),
    ("family.canonical_td", check_canonical_td),
    ("family.vertex_count", check_vertex_count),
    ("bp.obdd_phi", check_obdd_phi),
    ("bp.path_permutation", check_path_permutation),
    ("bp.obdd_checks", check_obdd_checks),
    ("bp.forced_node_cut", check_forced_node_cut),
    ("transform.ivar_preserved", check_ivar_preserved),
    ("transform.counts_monotone", check_counts_monotone),
    ("transform.function_preserved", check_function_preserved),
    ("transform.uniformize_checks", check_uniformize_checks),
    ("bounds.cover_size_bound", check_cover_size_bound),
    ("bounds.orientation_vc", check_orientation_vc),
    ("bounds.mc_bound", check_mc_bound),
    ("bounds.certificate", check_certificate),
    ("bounds.independent_product", check_independent_product),
    ("io.roundtrip", check_io_roundtrip),
];

/// Run every suite; failures carry a witness description.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let start = std::time::Instant::now();
            let result = f(cfg, &mut rng);
            CheckOutcome {
                check: name,
                passed: result.is_ok(),
                witness: result.err(),
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

/// Fixed catalog of small named graphs.
pub fn small_graph_catalog() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = vec![
        ("K2".into(), Graph::complete(2)),
        ("K3".into(), Graph::complete(3)),
        ("K4".into(), Graph::complete(4)),
        ("P3".into(), Graph::path(3)),
        ("P5".into(), Graph::path(5)),
        ("C4".into(), Graph::cycle(4)),
        ("C6".into(), Graph::cycle(6)),
        (
            "star5".into(),
            Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(),
        ),
    ];
    let t1k2 = tree_product(&complete_binary_tree(1), &Graph::complete(2));
    out.push(("T1(K2)".into(), t1k2.graph().clone()));
    out
}

/// Seeded Erdos-Renyi-style graph.
pub fn random_graph(n: u32, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect::<Vec<_>>();
    Graph::new(n, edges).unwrap()
}

/// Apply `f` to every labeled graph on exactly `n` vertices that is
/// connected; `n <= 6` keeps this affordable.
pub fn for_each_connected_graph(n: u32, mut f: impl FnMut(&Graph)) {
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    for mask in 0u64..1 << pairs.len() {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        let g = Graph::new(n, edges).unwrap();
        if g.is_connected() {
            f(&g);
        }
    }
}

/// Matching width by enumeration of every permutation, with per-subset cut
/// caching. Independent of the subset-DP recurrence in `exact_mw`.
pub fn brute_force_mw(g: &Graph) -> u32 {
    let n = g.vertex_count();
    assert!(n <= 12, "factorial enumeration");
    if n == 0 {
        return 0;
    }
    let mut cut = vec![u32::MAX; 1usize << n];
    let mut best = u32::MAX;
    let mut order: Vec<u32> = (0..n).collect();
    heap_permutations(&mut order, &mut |p| {
        let mut width = 0;
        let mut mask = 0usize;
        for &v in &p[..p.len() - 1] {
            mask |= 1 << v;
            if cut[mask] == u32::MAX {
                let s1: Vec<u32> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
                cut[mask] = g.max_cut_matching(&s1).unwrap().0;
            }
            width = width.max(cut[mask]);
        }
        best = best.min(width);
    });
    best
}

fn heap_permutations(a: &mut [u32], f: &mut impl FnMut(&[u32])) {
    let n = a.len();
    if n == 0 {
        f(a);
        return;
    }
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

fn check_cover_correspondence(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let mut graphs = small_graph_catalog();
    if cfg.full {
        graphs.push(("C12".into(), Graph::cycle(12)));
    }
    for (name, g) in graphs {
        if g.isolated_vertices().next().is_some() {
            continue;
        }
        let f = phi(&g).map_err(|e| e.to_string())?;
        let n = g.vertex_count();
        for mask in 0u64..1 << n {
            let a = LiteralSet::from_positives(
                n,
                &(0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>(),
            );
            let sat = f.satisfies(&a).map_err(|e| e.to_string())?;
            let vc = g.is_vertex_cover(&a.positives()).map_err(|e| e.to_string())?;
            if sat != vc {
                return Err(format!("{name}: assignment {mask:b} satisfies={sat} vc={vc}"));
            }
        }
    }
    Ok(())
}

fn check_cover_equivalence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 60 } else { 25 };
    for round in 0..rounds {
        let n = rng.gen_range(2..=7u32);
        let g = random_graph(n, 0.5, rng);
        let t = rng.gen_range(0..=2u32);
        let members = rng.gen_range(1..=3usize);
        let sets: Vec<Vec<u32>> = (0..members)
            .map(|_| {
                let mut s: Vec<u32> =
                    (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                while (s.len() as u32) < t {
                    let v = rng.gen_range(0..n);
                    if !s.contains(&v) {
                        s.push(v);
                    }
                }
                s
            })
            .collect();
        let family = bounds::CoverFamily::new(sets, t).map_err(|e| e.to_string())?;
        let fast = bounds::is_t_cover(&family, &g, t, 20).map_err(|e| e.to_string())?;
        // Brute force: check every vertex cover, not only the minimal ones.
        let mut slow = true;
        'all: for mask in 0u64..1 << n {
            let s: Vec<u32> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !g.is_vertex_cover(&s).unwrap() {
                continue;
            }
            let covered = family
                .sets()
                .iter()
                .any(|m| m.iter().all(|v| s.contains(v)));
            if !covered {
                slow = false;
                break 'all;
            }
        }
        if fast != slow {
            return Err(format!("round {round}: minimal-VC check {fast} vs full check {slow}"));
        }
    }
    Ok(())
}

fn check_cut_symmetry(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 200 } else { 60 };
    for _ in 0..rounds {
        let n = rng.gen_range(2..=9u32);
        let g = random_graph(n, 0.45, rng);
        let s1: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let s2: Vec<u32> = (0..n).filter(|v| !s1.contains(v)).collect();
        let a = g.max_cut_matching(&s1).unwrap().0;
        let b = g.max_cut_matching(&s2).unwrap().0;
        if a != b {
            return Err(format!("{g:?} s1={s1:?}: {a} != {b}"));
        }
    }
    Ok(())
}

fn check_matching_witness(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 200 } else { 60 };
    for _ in 0..rounds {
        let n = rng.gen_range(2..=9u32);
        let g = random_graph(n, 0.45, rng);
        let s1: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let (size, m) = g.max_cut_matching(&s1).unwrap();
        if m.size() != size || !m.is_valid_cut_matching(&g, &s1) {
            return Err(format!("{g:?} s1={s1:?}: invalid witness"));
        }
    }
    Ok(())
}

fn check_exact_vs_bruteforce(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let max_n = if cfg.full { 5 } else { 4 };
    for n in 2..=max_n {
        let mut bad = None;
        for_each_connected_graph(n, |g| {
            if bad.is_some() {
                return;
            }
            let dp = exact_mw(g, 22).unwrap().width;
            let brute = brute_force_mw(g);
            if dp != brute {
                bad = Some(format!("{g:?}: dp {dp} vs brute {brute}"));
            }
        });
        if let Some(b) = bad {
            return Err(b);
        }
    }
    let rounds = if cfg.full { 40 } else { 10 };
    for _ in 0..rounds {
        let g = random_graph(7, 0.5, rng);
        let dp = exact_mw(&g, 22).unwrap().width;
        let brute = brute_force_mw(&g);
        if dp != brute {
            return Err(format!("{g:?}: dp {dp} vs brute {brute}"));
        }
    }
    Ok(())
}

fn check_witness_consistent(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 60 } else { 20 };
    for _ in 0..rounds {
        let n = rng.gen_range(2..=9u32);
        let g = random_graph(n, 0.5, rng);
        let r = exact_mw(&g, 22).unwrap();
        let sv = Permutation::new(r.permutation.clone(), n).unwrap();
        let w = permutation_width(&g, &sv).unwrap();
        if w != r.width {
            return Err(format!("{g:?}: witness width {w} != reported {}", r.width));
        }
    }
    Ok(())
}

fn check_edge_monotone(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 40 } else { 15 };
    for _ in 0..rounds {
        let n = rng.gen_range(3..=8u32);
        let sparse = random_graph(n, 0.3, rng);
        let mut edges = sparse.edges().to_vec();
        for u in 0..n {
            for v in u + 1..n {
                if !sparse.has_edge(u, v) && rng.gen_bool(0.3) {
                    edges.push((u, v));
                }
            }
        }
        let dense = Graph::new(n, edges).unwrap();
        let a = exact_mw(&sparse, 22).unwrap().width;
        let b = exact_mw(&dense, 22).unwrap().width;
        if b < a {
            return Err(format!("adding edges dropped width {a} -> {b}"));
        }
    }
    Ok(())
}

fn check_product_height_monotone(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let mut prev = 0;
    for r in 0..=2 {
        let pg = tree_product(&complete_binary_tree(r), &Graph::complete(2));
        let w = exact_mw(pg.graph(), 22).unwrap().width;
        if w < prev {
            return Err(format!("mw(T_{r}(K2)) = {w} < mw(T_{}(K2)) = {prev}", r - 1));
        }
        prev = w;
    }
    Ok(())
}

fn check_path_switch_matching(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 60 } else { 25 };
    for round in 0..rounds {
        let r = rng.gen_range(1..=2u32);
        let h = if rng.gen_bool(0.5) {
            Graph::path(rng.gen_range(2..=4))
        } else {
            Graph::complete(rng.gen_range(2..=3))
        };
        let pg = tree_product(&complete_binary_tree(r), &h);
        let n = pg.graph().vertex_count();
        let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let nt = pg.tree().vertex_count();
        let t1 = rng.gen_range(0..nt);
        let t2 = rng.gen_range(0..nt);
        if t1 == t2 {
            continue;
        }
        let labels: Vec<u32> = (0..h.vertex_count())
            .filter(|&u| side[pg.vertex(t1, u) as usize] != side[pg.vertex(t2, u) as usize])
            .collect();
        if labels.is_empty() {
            continue;
        }
        let m = cross_matching_via_tree_path(&pg, &side, t1, t2, &labels)
            .map_err(|e| format!("round {round}: {e}"))?;
        if m.size() as usize != labels.len() {
            return Err(format!(
                "round {round}: matching size {} != label count {}",
                m.size(),
                labels.len()
            ));
        }
    }
    Ok(())
}

fn check_balanced_partition_matching(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    // Trees with >= p vertices, connected H with >= 2p vertices, both classes
    // >= p^2: a cross matching of size p exists.
    let rounds = if cfg.full { 80 } else { 30 };
    for _ in 0..rounds {
        let p = rng.gen_range(1..=2u32);
        let r = rng.gen_range(1..=2u32);
        let h = Graph::path(2 * p + rng.gen_range(0..=2));
        let pg = tree_product(&complete_binary_tree(r), &h);
        let n = pg.graph().vertex_count();
        if n < 2 * p * p {
            continue;
        }
        // Random partition; skip draws where a class is below p^2.
        let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let count = side.iter().filter(|&&b| b).count() as u32;
        if count < p * p || n - count < p * p {
            continue;
        }
        let s1: Vec<u32> = (0..n).filter(|&v| side[v as usize]).collect();
        let (size, _) = pg.graph().max_cut_matching(&s1).unwrap();
        if size < p {
            return Err(format!(
                "T_{r}(P_{}) with |V1|={}: cut matching {size} < p = {p}",
                h.vertex_count(),
                s1.len()
            ));
        }
    }
    Ok(())
}

fn check_width_bound_exact(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (h, p, r) in [
        (Graph::complete(2), 1u32, 0u32),
        (Graph::complete(2), 1, 1),
        (Graph::complete(2), 1, 2),
        (Graph::path(4), 2, 1),
    ] {
        let pg = tree_product(&complete_binary_tree(r), &h);
        let bound = mw_lower_bound_formula(p, r).unwrap();
        let w = exact_mw(pg.graph(), 22).unwrap().width;
        if num_rational::Ratio::from_integer(w as u64) < bound {
            return Err(format!("T_{r}: mw {w} below bound {bound}"));
        }
    }
    Ok(())
}

fn check_width_bound_search(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (h, p, r, seed) in [
        (Graph::complete(2), 1u32, 3u32, 11u64),
        (Graph::path(4), 2, 2, 13),
    ] {
        let pg = tree_product(&complete_binary_tree(r), &h);
        let bound = mw_lower_bound_formula(p, r).unwrap();
        let t = bound.ceil().to_integer() as u32;
        if let Some(sv) = falsify_lower_bound(pg.graph(), t, cfg.falsify_budget, seed) {
            return Err(format!(
                "T_{r}(H) with p={p}: found permutation of width {} < {t}: {:?}",
                permutation_width(pg.graph(), &sv).unwrap(),
                sv.as_slice()
            ));
        }
    }
    Ok(())
}

fn check_canonical_td(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (r, h) in [
        (0u32, Graph::path(3)),
        (1, Graph::path(2)),
        (2, Graph::path(4)),
        (2, Graph::complete(3)),
        (3, Graph::path(2)),
    ] {
        let pg = tree_product(&complete_binary_tree(r), &h);
        let td = canonical_tree_decomposition(&pg);
        match crate::family::validate_td(pg.graph(), &td) {
            TdCheck::Valid { width } => {
                let expect = if r == 0 {
                    h.vertex_count() - 1
                } else {
                    2 * h.vertex_count() - 1
                };
                if width != expect {
                    return Err(format!("T_{r}: width {width} != {expect}"));
                }
            }
            TdCheck::Invalid(v) => return Err(format!("T_{r}: violation {v:?}")),
        }
    }
    Ok(())
}

fn check_vertex_count(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for k in [3u32, 5, 7, 9, 11] {
        for r in 0..=4 {
            let f = family_graph(k, r).unwrap();
            let expect = ((1u32 << (r + 1)) - 1) * (k - f.params.y + 1) / 2;
            if f.params.n != expect {
                return Err(format!("k={k} r={r}: n={} != {expect}", f.params.n));
            }
        }
    }
    Ok(())
}

fn check_obdd_phi(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (name, g) in small_graph_catalog() {
        let n = g.vertex_count();
        let order = {
            let mut o: Vec<u32> = (0..n).collect();
            if cfg.full {
                use rand::seq::SliceRandom;
                o.shuffle(rng);
            }
            Permutation::new(o, n).unwrap()
        };
        let z = build_frontier_obdd(&g, &order).unwrap();
        let f = phi(&g).unwrap();
        if !bp::equivalent_to_cnf(&z, &f, 20).unwrap() {
            return Err(format!("{name}: OBDD differs from phi"));
        }
        // Path-wise: positive sets of accepted paths are vertex covers, and
        // every vertex cover appears on some path.
        let paths = z
            .enumerate_root_leaf_paths(100_000)
            .ok_or_else(|| format!("{name}: too many paths"))?;
        let mut seen = std::collections::BTreeSet::new();
        for p in &paths {
            let pos: Vec<u32> = z
                .path_literals(p)
                .iter()
                .filter(|l| l.positive)
                .map(|l| l.var)
                .collect();
            if !g.is_vertex_cover(&pos).unwrap() {
                return Err(format!("{name}: path positives {pos:?} not a cover"));
            }
            seen.insert(pos.iter().fold(0u64, |m, &v| m | 1 << v));
        }
        for mask in 0u64..1 << n {
            let s: Vec<u32> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if g.is_vertex_cover(&s).unwrap() && !seen.contains(&mask) {
                return Err(format!("{name}: cover {s:?} missing from paths"));
            }
        }
    }
    Ok(())
}

fn check_path_permutation(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (name, g) in small_graph_catalog() {
        let n = g.vertex_count();
        let z = build_frontier_obdd(&g, &Permutation::identity(n)).unwrap();
        let paths = z
            .enumerate_root_leaf_paths(100_000)
            .ok_or_else(|| format!("{name}: too many paths"))?;
        for p in paths {
            let mut vars: Vec<u32> = z.path_literals(&p).iter().map(|l| l.var).collect();
            let len = vars.len();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != len || vars.len() != n as usize {
                return Err(format!("{name}: path labels not a permutation"));
            }
        }
    }
    Ok(())
}

fn check_obdd_checks(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (name, g) in small_graph_catalog() {
        let n = g.vertex_count();
        let orders = if cfg.full { 3 } else { 1 };
        for _ in 0..orders {
            let mut o: Vec<u32> = (0..n).collect();
            use rand::seq::SliceRandom;
            o.shuffle(rng);
            let z = build_frontier_obdd(&g, &Permutation::new(o, n).unwrap()).unwrap();
            if !z.check_read_once() {
                return Err(format!("{name}: OBDD not read-once"));
            }
            if !z.check_uniform() {
                return Err(format!("{name}: OBDD not uniform"));
            }
        }
    }
    Ok(())
}

fn check_forced_node_cut(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let t1k2 = tree_product(&complete_binary_tree(1), &Graph::complete(2));
    for (name, g) in [
        ("K4".to_string(), Graph::complete(4)),
        ("C6".to_string(), Graph::cycle(6)),
        ("P3".to_string(), Graph::path(3)),
        ("T1(K2)".to_string(), t1k2.graph().clone()),
    ] {
        let mw = exact_mw(&g, 22).unwrap().width;
        let z = build_frontier_obdd(&g, &Permutation::identity(g.vertex_count())).unwrap();
        for t in 1..=mw {
            let nodes: Vec<u32> = bp::t_nodes(&z, t).unwrap().iter().map(|w| w.node).collect();
            if !bp::is_root_leaf_cut(&z, &nodes) {
                return Err(format!("{name}: {t}-nodes do not cut"));
            }
        }
    }
    Ok(())
}

/// Random programs together with one irregular edge, if any.
fn programs_with_irregular(
    count: u64,
    base_seed: u64,
) -> impl Iterator<Item = (crate::bp::Nrobp, Option<usize>)> {
    (0..count).map(move |i| {
        let z = random_clean_nrobp(2 + (i % 9) as u32, base_seed.wrapping_add(i));
        let idx = classify_edges(&z)
            .ok()
            .and_then(|cs| cs.iter().position(|c| *c == EdgeClass::Irregular));
        (z, idx)
    })
}

fn check_ivar_preserved(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let count = if cfg.full { 120 } else { 40 };
    for (z, idx) in programs_with_irregular(count, 0x5eed_0001) {
        let Some(edge) = idx else { continue };
        let before = z.ivar_sets();
        let el = eliminate_irregular_edge(&z, edge).unwrap();
        let after = el.program.ivar_sets();
        for v in 0..z.node_count() {
            if before[v as usize] != after[v as usize] {
                return Err(format!("node {v}: ivar changed by elimination"));
            }
        }
    }
    Ok(())
}

fn check_counts_monotone(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let count = if cfg.full { 120 } else { 40 };
    for (z, idx) in programs_with_irregular(count, 0x5eed_0002) {
        let Some(edge) = idx else { continue };
        let count_class = |cs: &[EdgeClass], c: EdgeClass| cs.iter().filter(|x| **x == c).count();
        let before = classify_edges(&z).unwrap();
        let el = eliminate_irregular_edge(&z, edge).unwrap();
        let after = classify_edges(&el.program).unwrap();
        if count_class(&after, EdgeClass::Irregular) >= count_class(&before, EdgeClass::Irregular) {
            return Err("irregular count did not decrease".into());
        }
        if count_class(&after, EdgeClass::Regular) <= count_class(&before, EdgeClass::Regular) {
            return Err("regular count did not increase".into());
        }
    }
    Ok(())
}

fn check_function_preserved(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let count = if cfg.full { 80 } else { 30 };
    for i in 0..count {
        let n = 1 + (i % 8) as u32;
        let z = random_clean_nrobp(n, 0x5eed_0003u64.wrapping_add(i));
        let cleaned = make_clean(&z);
        if !is_clean(&cleaned) || !bp::equivalent(&z, &cleaned, 20).unwrap() {
            return Err(format!("seed {i}: make_clean broke the function"));
        }
        let uni = uniformize(&z);
        if !bp::equivalent(&z, &uni.program, 20).unwrap() {
            return Err(format!("seed {i}: uniformize broke the function"));
        }
        let t = to_traditional(&z);
        let back = to_arosrn(&t).map_err(|e| format!("seed {i}: {e}"))?;
        if !bp::equivalent(&z, &back, 20).unwrap() {
            return Err(format!("seed {i}: traditional round trip broke the function"));
        }
        // The traditional program itself agrees pointwise.
        for mask in 0u64..1 << n {
            let a = LiteralSet::from_positives(
                n,
                &(0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>(),
            );
            if t.accepts(&a).unwrap() != z.accepts(&a).unwrap() {
                return Err(format!("seed {i}: traditional differs at {mask:b}"));
            }
        }
    }
    Ok(())
}

fn check_uniformize_checks(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let count = if cfg.full { 120 } else { 40 };
    for i in 0..count {
        let n = 2 + (i % 11) as u32;
        let z = random_clean_nrobp(n, 0x5eed_0004u64.wrapping_add(i));
        let out = uniformize(&z);
        if !out.program.check_read_once() || !out.program.check_uniform() {
            return Err(format!("seed {i}: output not uniform/read-once"));
        }
        let growth = out.program.edge_count() - out.cleaned_edge_count;
        if growth > 2 * out.initial_irregular_count * n as usize {
            return Err(format!(
                "seed {i}: growth {growth} exceeds 2qn with q = {}",
                out.initial_irregular_count
            ));
        }
    }
    Ok(())
}

fn check_cover_size_bound(cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let max_n = if cfg.full { 6 } else { 5 };
    for n in 2..=max_n {
        let mut bad = None;
        for_each_connected_graph(n, |g| {
            if bad.is_some() {
                return;
            }
            let vcs = g.minimal_vc_masks(20).unwrap();
            let x = g.max_degree();
            for t in 1..=3u32 {
                if !vcs.iter().all(|vc| vc.count_ones() >= t) {
                    continue;
                }
                let size = bounds::min_t_cover_size(g, t).unwrap() as f64;
                let bound = 2f64.powf(t as f64 / bounds::f_const(x));
                if size < bound * (1.0 - 1e-9) {
                    bad = Some(format!("{g:?} t={t}: {size} < {bound}"));
                    return;
                }
            }
        });
        if let Some(b) = bad {
            return Err(b);
        }
    }
    Ok(())
}

fn check_orientation_vc(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 400 } else { 100 };
    for _ in 0..rounds {
        let n = rng.gen_range(2..=10u32);
        let g = random_graph(n, 0.5, rng);
        let seed: u64 = rng.gen();
        let sample = bounds::sample_out(&g, seed);
        if !g.is_vertex_cover(&sample.endpoint_set()).unwrap() {
            return Err(format!("seed {seed}: endpoints not a cover on {g:?}"));
        }
    }
    Ok(())
}

fn check_mc_bound(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let pairs: Vec<(Graph, Vec<u32>)> = vec![
        (Graph::complete(2), vec![0]),
        (Graph::path(3), vec![0, 2]),
        (Graph::path(3), vec![1]),
        (Graph::cycle(4), vec![0, 2]),
        (Graph::cycle(5), vec![0, 2]),
        (Graph::complete(4), vec![0, 1]),
        (Graph::complete(4), vec![3]),
        (Graph::path(6), vec![0, 2, 4]),
        (random_graph(6, 0.5, rng), vec![0, 5]),
        (random_graph(7, 0.4, rng), vec![1, 3]),
    ];
    // Worst-case binomial standard error at p = 1/2.
    let sigma = 0.5 / (cfg.mc_trials as f64).sqrt();
    for (g, s) in pairs {
        let (est, bound) =
            bounds::estimate_containment_prob(&g, &s, cfg.mc_trials, 0xabcd).unwrap();
        if est > bound + 4.0 * sigma {
            return Err(format!("{g:?} s={s:?}: estimate {est} above bound {bound}"));
        }
    }
    Ok(())
}

fn check_certificate(_cfg: &VerifyConfig, _rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for (name, g) in small_graph_catalog() {
        let n = g.vertex_count();
        let mw = exact_mw(&g, 22).unwrap().width;
        let z = build_frontier_obdd(&g, &Permutation::identity(n)).unwrap();
        for t in 1..=mw {
            let cert = bounds::certificate_from_nrobp(&z, &g, t, 20)
                .map_err(|e| format!("{name} t={t}: {e}"))?;
            let mut sources = cert.sources.clone();
            sources.sort_unstable();
            sources.dedup();
            if sources.len() != cert.family.len() {
                return Err(format!("{name} t={t}: duplicate source nodes"));
            }
            if (cert.family.len() as f64) < cert.implied_bound * (1.0 - 1e-9) {
                return Err(format!(
                    "{name} t={t}: {} sets below the implied bound {}",
                    cert.family.len(),
                    cert.implied_bound
                ));
            }
            if (z.node_count() as usize) < cert.family.len() {
                return Err(format!("{name} t={t}: more sets than program nodes"));
            }
        }
    }
    Ok(())
}

fn check_independent_product(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 60 } else { 25 };
    for _ in 0..rounds {
        let n = rng.gen_range(3..=8u32);
        let g = random_graph(n, 0.4, rng);
        // Greedy independent set in ascending id order.
        let mut indep: Vec<u32> = Vec::new();
        for v in 0..n {
            if g.degree(v) > 0 && indep.iter().all(|&u| !g.has_edge(u, v)) {
                indep.push(v);
            }
        }
        if indep.is_empty() {
            continue;
        }
        let exact = match bounds::exact_containment_prob(&g, &indep) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let product: f64 = indep
            .iter()
            .map(|&u| 1.0 - 2f64.powi(-(g.degree(u) as i32)))
            .product();
        if (exact - product).abs() > 1e-9 {
            return Err(format!("{g:?} I={indep:?}: {exact} != {product}"));
        }
    }
    Ok(())
}

fn check_io_roundtrip(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let rounds = if cfg.full { 40 } else { 15 };
    for i in 0..rounds {
        let n = rng.gen_range(1..=9u32);
        let g = random_graph(n, 0.5, rng);
        if io::parse_gr(&io::write_gr(&g)).map_err(|e| e.to_string())? != g {
            return Err(format!("gr round trip failed on {g:?}"));
        }
        if g.isolated_vertices().next().is_none() {
            let f = phi(&g).unwrap();
            if io::parse_dimacs(&io::write_dimacs(&f)).map_err(|e| e.to_string())? != f {
                return Err(format!("dimacs round trip failed on {g:?}"));
            }
        }
        let z = random_clean_nrobp(rng.gen_range(1..=8), 0x10_0000 + i);
        if io::parse_bp(&io::write_bp(&z)).map_err(|e| e.to_string())? != z {
            return Err("bp round trip failed".into());
        }
        let t = to_traditional(&z);
        if io::parse_tbp(&io::write_tbp(&t)).map_err(|e| e.to_string())? != t {
            return Err("tbp round trip failed".into());
        }
    }
    let fam = family_graph(5, 2).unwrap();
    let td = canonical_tree_decomposition(&fam.product);
    let parsed = io::parse_td(&io::write_td(&td)).map_err(|e| e.to_string())?;
    if parsed.bags != td.bags {
        return Err("td round trip failed".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let outcomes = run_all(&VerifyConfig::quick(7));
        let failures: Vec<&CheckOutcome> = outcomes.iter().filter(|o| !o.passed).collect();
        assert!(failures.is_empty(), "failing checks: {failures:?}");
        assert_eq!(outcomes.len(), 28);
    }

    #[test]
    fn brute_force_mw_matches_known_values() {
        assert_eq!(brute_force_mw(&Graph::complete(4)), 2);
        assert_eq!(brute_force_mw(&Graph::cycle(5)), 2);
        assert_eq!(brute_force_mw(&Graph::path(5)), 1);
        assert_eq!(brute_force_mw(&Graph::empty(3)), 0);
    }
}
