//! The lower-bound engine: the max-degree constant `f(x)`, t-covers, the
//! minimum t-cover oracle, the random edge-orientation sampler, cover
//! certificates extracted from branching programs, and the separation
//! calculator.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bp::{t_nodes, Nrobp};
use crate::error::{Error, Result};
use crate::family::ceil_log2;
use crate::graph::Graph;

/// Identifier of the seeded generator behind every randomized operation,
/// recorded in reports so runs are reproducible across implementations.
pub const RNG_ALGORITHM: &str = "chacha8";

/// The constant with `2^(-1/f(x)) = (1 - 2^-x)^(1/(x+1))`, i.e.
/// `f(x) = -(x+1) / log2(1 - 2^-x)`, for max-degree `x >= 1`.
pub fn f_const(x: u32) -> f64 {
    assert!(x >= 1, "f(x) needs max-degree at least 1");
    -(x as f64 + 1.0) / (1.0 - 2f64.powi(-(x as i32))).log2()
}

/// A family of vertex sets, each of size at least `floor`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverFamily {
    sets: Vec<Vec<u32>>,
    floor: u32,
}

impl CoverFamily {
    pub fn new(mut sets: Vec<Vec<u32>>, floor: u32) -> Result<Self> {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if (s.len() as u32) < floor {
                return Err(Error::InvalidParameter(format!(
                    "cover member {s:?} is smaller than the floor {floor}"
                )));
            }
        }
        sets.sort();
        Ok(CoverFamily { sets, floor })
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn floor(&self) -> u32 {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// True iff every member has size at least `t` and every vertex cover of `g`
/// contains some member. Covering is monotone under supersets, so checking
/// the inclusion-minimal vertex covers suffices; those are enumerated by
/// brute force within `vc_limit`.
pub fn is_t_cover(family: &CoverFamily, g: &Graph, t: u32, vc_limit: u32) -> Result<bool> {
    for s in family.sets() {
        if (s.len() as u32) < t {
            return Ok(false);
        }
        for &v in s {
            if v >= g.vertex_count() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    count: g.vertex_count(),
                });
            }
        }
    }
    Ok(uncovered_minimal_vc(family, g, vc_limit)?.is_none())
}

/// A minimal vertex cover containing no member of the family, if any.
pub fn uncovered_minimal_vc(
    family: &CoverFamily,
    g: &Graph,
    vc_limit: u32,
) -> Result<Option<Vec<u32>>> {
    let masks = g.minimal_vc_masks(vc_limit)?;
    let set_masks: Vec<u64> = family
        .sets()
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    for vc in masks {
        if !set_masks.iter().any(|&s| s & !vc == 0) {
            return Ok(Some(mask_vec(vc)));
        }
    }
    Ok(None)
}

fn mask_vec(mut m: u64) -> Vec<u32> {
    let mut v = Vec::new();
    while m != 0 {
        v.push(m.trailing_zeros());
        m &= m - 1;
    }
    v
}

/// Exact minimum cardinality of a t-cover of the vertex covers of `g`,
/// via branch-and-bound set cover over the minimal vertex covers. Members of
/// size exactly `t` suffice: shrinking a member only enlarges its coverage.
///
/// Guarded to `|V| <= 10` and `t <= 4`; fails with `NoTCover` when a minimal
/// vertex cover is smaller than `t`.
pub fn min_t_cover_size(g: &Graph, t: u32) -> Result<u32> {
    let n = g.vertex_count();
    if n > 10 {
        return Err(Error::SizeLimit {
            what: "minimum t-cover search",
            limit: 10,
            actual: n as u64,
        });
    }
    if t > 4 {
        return Err(Error::SizeLimit {
            what: "minimum t-cover floor",
            limit: 4,
            actual: t as u64,
        });
    }
    let vcs = g.minimal_vc_masks(20)?;
    if let Some(&small) = vcs.iter().find(|&&vc| vc.count_ones() < t) {
        return Err(Error::NoTCover {
            t,
            smallest: small.count_ones(),
        });
    }
    if vcs.is_empty() {
        unreachable!("every graph has minimal vertex covers");
    }
    // Candidates: all size-t subsets of the vertex set.
    let mut cands: Vec<u64> = Vec::new();
    let mut pick = |mask: u64| cands.push(mask);
    subsets_of_size(n, t, &mut pick);
    // covers[c] = bitmask over minimal VCs covered by candidate c.
    let covers: Vec<u128> = cands
        .iter()
        .map(|&c| {
            vcs.iter()
                .enumerate()
                .filter(|(_, &vc)| c & vc == c)
                .fold(0u128, |m, (i, _)| m | 1 << i)
        })
        .collect();
    if vcs.len() > 128 {
        return Err(Error::SizeLimit {
            what: "minimal vertex covers in t-cover search",
            limit: 128,
            actual: vcs.len() as u64,
        });
    }
    let all: u128 = if vcs.len() == 128 {
        u128::MAX
    } else {
        (1u128 << vcs.len()) - 1
    };
    // Greedy upper bound.
    let mut best = {
        let mut covered = 0u128;
        let mut count = 0u32;
        while covered != all {
            let (_, add) = covers
                .iter()
                .map(|&c| ((c & !covered).count_ones(), c))
                .max()
                .expect("feasibility established above");
            if add & !covered == 0 {
                break;
            }
            covered |= add;
            count += 1;
        }
        if covered == all {
            count
        } else {
            u32::MAX
        }
    };
    let max_gain = covers.iter().map(|c| c.count_ones()).max().unwrap_or(1).max(1);
    branch(&vcs, &covers, all, 0, 0, max_gain, &mut best);
    Ok(best)
}

fn branch(
    vcs: &[u64],
    covers: &[u128],
    all: u128,
    covered: u128,
    chosen: u32,
    max_gain: u32,
    best: &mut u32,
) {
    if covered == all {
        *best = (*best).min(chosen);
        return;
    }
    let uncovered = (all & !covered).count_ones();
    if chosen + uncovered.div_ceil(max_gain) >= *best {
        return;
    }
    // Branch on the uncovered minimal VC with the fewest covering candidates.
    let mut target = usize::MAX;
    let mut target_count = usize::MAX;
    for i in 0..vcs.len() {
        if covered >> i & 1 == 1 {
            continue;
        }
        let count = covers.iter().filter(|&&c| c >> i & 1 == 1).count();
        if count < target_count {
            target_count = count;
            target = i;
        }
    }
    if target_count == 0 {
        return; // some minimal VC cannot be covered at all
    }
    for (ci, &c) in covers.iter().enumerate() {
        if c >> target & 1 == 1 {
            let _ = ci;
            branch(vcs, covers, all, covered | c, chosen + 1, max_gain, best);
        }
    }
}

fn subsets_of_size(n: u32, t: u32, emit: &mut impl FnMut(u64)) {
    fn rec(n: u32, t: u32, start: u32, acc: u64, emit: &mut impl FnMut(u64)) {
        if t == 0 {
            emit(acc);
            return;
        }
        for v in start..n {
            if n - v < t {
                break;
            }
            rec(n, t - 1, v + 1, acc | 1 << v, emit);
        }
    }
    rec(n, t, 0, 0, emit);
}

/// One random orientation of the edges: a fair coin per edge picks an
/// endpoint. The chosen endpoints always form a vertex cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationSample {
    /// Chosen endpoint per edge, aligned with the graph's edge order.
    pub chosen: Vec<u32>,
    pub seed: u64,
}

impl OrientationSample {
    /// The endpoint set `Out(E)`, sorted and deduplicated.
    pub fn endpoint_set(&self) -> Vec<u32> {
        let mut v = self.chosen.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Draw one orientation with a ChaCha8 generator seeded by `seed`.
pub fn sample_out(g: &Graph, seed: u64) -> OrientationSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = g
        .edges()
        .iter()
        .map(|&(u, v)| if rng.next_u32() & 1 == 0 { u } else { v })
        .collect();
    OrientationSample { chosen, seed }
}

fn sample_endpoint_mask(g: &Graph, rng: &mut ChaCha8Rng) -> u64 {
    let mut mask = 0u64;
    for &(u, v) in g.edges() {
        mask |= 1 << if rng.next_u32() & 1 == 0 { u } else { v };
    }
    mask
}

/// Monte-Carlo estimate of `Pr(s ⊆ Out(E))` together with the analytic bound
/// `(1 - 2^-x)^(|s|/(x+1))`, `x` the max-degree. Trial `i` draws from the
/// seed's ChaCha8 stream `i + 1`, so results do not depend on scheduling.
pub fn estimate_containment_prob(
    g: &Graph,
    s: &[u32],
    trials: u32,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if g.vertex_count() > 64 {
        return Err(Error::SizeLimit {
            what: "orientation sampling mask",
            limit: 64,
            actual: g.vertex_count() as u64,
        });
    }
    let mut s_mask = 0u64;
    for &v in s {
        if v >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                count: g.vertex_count(),
            });
        }
        s_mask |= 1 << v;
    }
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let out = sample_endpoint_mask(g, &mut rng);
            u64::from(s_mask & !out == 0)
        })
        .sum();
    let x = g.max_degree();
    let bound = if s.is_empty() {
        1.0
    } else if x == 0 {
        0.0
    } else {
        (1.0 - 2f64.powi(-(x as i32))).powf(s_mask.count_ones() as f64 / (x as f64 + 1.0))
    };
    Ok((hits as f64 / trials as f64, bound))
}

/// Exact `Pr(s ⊆ Out(E))` by enumerating the orientations of the edges
/// incident to `s` (the remaining coins cannot put vertices into `s`).
pub fn exact_containment_prob(g: &Graph, s: &[u32]) -> Result<f64> {
    let mut s_mask = 0u64;
    for &v in s {
        if v >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                count: g.vertex_count(),
            });
        }
        s_mask |= 1u64 << v;
    }
    if s_mask == 0 {
        return Ok(1.0);
    }
    let incident: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| s_mask >> u & 1 == 1 || s_mask >> v & 1 == 1)
        .collect();
    if incident.len() > 25 {
        return Err(Error::SizeLimit {
            what: "exact orientation enumeration",
            limit: 25,
            actual: incident.len() as u64,
        });
    }
    let mut hits = 0u64;
    for pick in 0u64..1 << incident.len() {
        let mut out = 0u64;
        for (i, &(u, v)) in incident.iter().enumerate() {
            out |= 1 << if pick >> i & 1 == 0 { u } else { v };
        }
        if s_mask & !out == 0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / (1u64 << incident.len()) as f64)
}

/// The size bound `2^(mw / f(x))` on programs computing `phi(g)`, `x` the
/// max-degree of `g`.
///
/// # Panics
/// When `mw_value > 0` on an edgeless graph, where `phi` is undefined.
pub fn nrobp_size_lower_bound(g: &Graph, mw_value: u32) -> f64 {
    if mw_value == 0 {
        return 1.0;
    }
    assert!(
        g.edge_count() > 0,
        "positive matching width requires edges"
    );
    2f64.powf(mw_value as f64 / f_const(g.max_degree()))
}

/// A t-cover extracted from the t-nodes of a branching program. The number
/// of sets bounds the program's node count from below.
#[derive(Clone, Debug, Serialize)]
pub struct CoverCertificate {
    pub family: CoverFamily,
    /// One distinct program node per set, aligned with `family.sets()`.
    pub sources: Vec<u32>,
    /// `2^(t / f(max_degree))`, the guaranteed set count.
    pub implied_bound: f64,
    pub t: u32,
}

/// Collect the t-node witness sets of `z`, deduplicate them while retaining
/// one source node per set, and verify that they form a t-cover of the
/// vertex covers of `g`. Verification failure signals that `z` does not
/// compute `phi(g)` or that `t` exceeds the matching width.
pub fn certificate_from_nrobp(
    z: &Nrobp,
    g: &Graph,
    t: u32,
    vc_limit: u32,
) -> Result<CoverCertificate> {
    if t == 0 {
        // The empty set is a subset of every vertex cover.
        return Ok(CoverCertificate {
            family: CoverFamily::new(vec![vec![]], 0)?,
            sources: vec![z.root()],
            implied_bound: 1.0,
            t: 0,
        });
    }
    let witnesses = t_nodes(z, t)?;
    let mut by_set: std::collections::BTreeMap<Vec<u32>, u32> = std::collections::BTreeMap::new();
    for w in witnesses {
        // Keep the smallest node id carrying each distinct set.
        by_set.entry(w.witness).or_insert(w.node);
    }
    let (sets, sources): (Vec<Vec<u32>>, Vec<u32>) = by_set.into_iter().unzip();
    let family = CoverFamily::new(sets, t)?;
    if let Some(vc) = uncovered_minimal_vc(&family, g, vc_limit)? {
        return Err(Error::CertificateInvalid(format!(
            "minimal vertex cover {vc:?} contains no witness set; \
             the program may not compute phi of this graph, or t = {t} exceeds its matching width"
        )));
    }
    let implied_bound = if t == 0 {
        1.0
    } else {
        2f64.powf(t as f64 / f_const(g.max_degree()))
    };
    Ok(CoverCertificate {
        family,
        sources,
        implied_bound,
        t,
    })
}

/// Regime annotations for a separation row: whether the implied treewidth
/// parameter is in the large-parameter regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    /// `k = 4r - 1` (the family parameter matching the template `P_2r`) is
    /// at least 50.
    pub k_at_least_50: bool,
    /// `r >= 5 * ceil(log2 k)`.
    pub r_at_least_5_log_k: bool,
}

/// One row of the separation table for the family `T_r(P_2r)`.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationRow {
    pub r: u32,
    /// `(2^(r+1) - 1) * 2r`, exact.
    #[serde(serialize_with = "ser_biguint")]
    pub n: BigUint,
    /// `(r + 1 - ceil(log2 r)) * r / 2`, exact as a dyadic double.
    pub mw_bound: f64,
    /// `2^(mw_bound / f(5))`.
    pub nrobp_lb: f64,
    /// `2^(4r) * n`, exact.
    #[serde(serialize_with = "ser_biguint")]
    pub ddnnf_ub: BigUint,
    /// `nrobp_lb / ddnnf_ub`; may underflow for large `r`.
    pub ratio: f64,
    /// `log2(nrobp_lb) - log2(ddnnf_ub)`, stable for all `r`.
    pub log2_ratio: f64,
    pub regime: RegimeFlags,
}

fn ser_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Separation table rows: the matching-width bound for `T_r(P_2r)`, the
/// program-size lower bound it implies at max-degree 5, and the
/// treewidth-based compilation upper-bound formula `2^t * n` with `t = 4r`.
pub fn separation_report(rs: &[u32]) -> Result<Vec<SeparationRow>> {
    rs.iter().map(|&r| separation_row(r)).collect()
}

pub fn separation_row(r: u32) -> Result<SeparationRow> {
    if r < 1 {
        return Err(Error::InvalidParameter("separation rows need r >= 1".into()));
    }
    let n = (BigUint::from(1u32) << (r + 1)) - 1u32;
    let n = n * (2u64 * r as u64);
    let mw_bound = (r as u64 + 1 - ceil_log2(r) as u64) as f64 * r as f64 / 2.0;
    let f5 = f_const(5);
    let nrobp_lb = 2f64.powf(mw_bound / f5);
    let ddnnf_ub = n.clone() << (4 * r);
    let log2_ratio = mw_bound / f5 - log2_biguint(&ddnnf_ub);
    let ratio = log2_ratio.exp2();
    let k = 4 * r as u64 - 1;
    let regime = RegimeFlags {
        k_at_least_50: k >= 50,
        r_at_least_5_log_k: r as u64 >= 5 * ceil_log2(k as u32) as u64,
    };
    Ok(SeparationRow {
        r,
        n,
        mw_bound,
        nrobp_lb,
        ddnnf_ub,
        ratio,
        log2_ratio,
        regime,
    })
}

/// `log2` of a positive big integer through its top 53 bits.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let top: BigUint = x >> (bits - 53);
    let v: u64 = top.iter_u64_digits().next().unwrap();
    (v as f64).log2() + (bits - 53) as f64
}
