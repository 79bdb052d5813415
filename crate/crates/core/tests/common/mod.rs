//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wsm_core::arith::{vertex_ample, CurveClass, Rational, TargetProfile, WeightData};
use wsm_core::chambers::{wall_subsets, WallKind};
use wsm_core::graph::{canonical_form, CanonKey, WGraph};
use wsm_core::strata::{splittings, StrataQuery};

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

pub fn weights(ws: &[Rational]) -> WeightData {
    WeightData::from_weights(ws.to_vec()).unwrap()
}

/// All ways to write `total` as an ordered sum of `parts` naturals.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ordered splittings of a class into `parts` classes.
pub fn class_splits(beta: &CurveClass, parts: usize) -> Vec<Vec<CurveClass>> {
    let mut out: Vec<Vec<CurveClass>> = vec![vec![CurveClass(Vec::new()); parts]];
    for &c in beta.coords() {
        let mut next = Vec::new();
        for partial in &out {
            for comp in compositions(c, parts) {
                let mut p = partial.clone();
                for (k, x) in comp.into_iter().enumerate() {
                    p[k].0.push(x);
                }
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Set partitions of `0..n` into exactly `k` blocks, as restricted growth
/// strings.
pub fn growth_strings(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if max == k {
                out.push(cur.clone());
            }
            return;
        }
        let left = n - cur.len();
        if max + left < k {
            return;
        }
        for b in 0..=(max.min(k - 1)) {
            cur.push(b);
            go(n, k, cur, max.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k <= 1 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, k, &mut Vec::new(), 0, &mut out);
    out
}

/// Raw strata oracle: for every edge count and vertex count, every
/// assignment of the tail and edge flags to vertices (the involution pairs
/// edge flags `2i, 2i + 1`), every distribution of genus and class; keep the
/// connected stable ones and deduplicate by canonical form.
pub fn strata_brute_force(qr: &StrataQuery) -> BTreeMap<CanonKey, WGraph> {
    let n = qr.weights.len();
    let mut found = BTreeMap::new();
    for e in 0..=qr.max_edges {
        for nv in 1..=e + 1 {
            let h1 = e + 1 - nv;
            if h1 as u32 > qr.genus_total {
                continue;
            }
            let genus_splits = compositions((qr.genus_total - h1 as u32) as u64, nv);
            let classes = class_splits(&qr.beta_total, nv);
            for assign in growth_strings(n + 2 * e, nv) {
                for gs in &genus_splits {
                    for cs in &classes {
                        let mut g = WGraph::new(qr.profile.clone());
                        for v in 0..nv {
                            g.add_vertex(gs[v] as u32, cs[v].clone());
                        }
                        for i in 0..n {
                            g.add_labeled_tail(assign[i], qr.weights.weight(i).clone(), qr.weights.label(i));
                        }
                        for k in 0..e {
                            g.add_edge(assign[n + 2 * k], assign[n + 2 * k + 1]);
                        }
                        if g.is_connected() && g.is_stable() {
                            let c = canonical_form(&g);
                            found.entry(c.key).or_insert(c.graph);
                        }
                    }
                }
            }
        }
    }
    found
}

/// Fine chamber signatures seen by uniform samples `k / 2^40`, compared
/// exactly in integers. Samples on a wall are skipped.
pub fn monte_carlo_signatures(n: usize, samples: usize, rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    const ONE: u128 = 1 << 40;
    let walls = wall_subsets(n, WallKind::Fine);
    let mut seen = BTreeSet::new();
    let mut x = vec![0u128; n];
    'outer: for _ in 0..samples {
        for xi in x.iter_mut() {
            *xi = rng.gen_range(1..=ONE as u64) as u128;
        }
        let mut code = String::with_capacity(walls.len());
        for &m in &walls {
            let s: u128 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| x[i]).sum();
            code.push(match s.cmp(&ONE) {
                std::cmp::Ordering::Less => '-',
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => '+',
            });
        }
        seen.insert(code);
    }
    seen
}

pub fn random_fraction(rng: &mut ChaCha8Rng, max_denom: i64) -> Rational {
    let d = rng.gen_range(1..=max_denom);
    let p = rng.gen_range(1..=d);
    q(p, d)
}

/// A random valid graph, not necessarily stable or connected.
pub fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_flags: usize) -> WGraph {
    let rank = rng.gen_range(0..3usize);
    let profile = TargetProfile::new(rng.gen_range(0..5), (0..rank).map(|_| rng.gen_range(-4..3)).collect());
    let mut g = WGraph::new(profile);
    let nv = rng.gen_range(1..=max_vertices);
    for _ in 0..nv {
        let class = CurveClass((0..rank).map(|_| if rng.gen_bool(0.7) { 0 } else { rng.gen_range(1..4) }).collect());
        g.add_vertex(if rng.gen_bool(0.7) { 0 } else { rng.gen_range(1..3) }, class);
    }
    let ne = rng.gen_range(0..=max_flags / 2);
    for _ in 0..ne {
        let (u, v) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
        g.add_edge(u, v);
    }
    let nt = rng.gen_range(0..=max_flags - 2 * ne);
    for k in 0..nt {
        let v = rng.gen_range(0..nv);
        let w = if rng.gen_bool(0.5) { Rational::one() } else { random_fraction(rng, 12) };
        if rng.gen_bool(0.5) {
            g.add_labeled_tail(v, w, &format!("p{k}"));
        } else {
            g.add_tail(v, w);
        }
    }
    g
}

/// A random stable connected graph with labeled tails: a one-vertex graph
/// split `depth` times at random.
pub fn random_stratum(rng: &mut ChaCha8Rng, qr: &StrataQuery, depth: usize) -> WGraph {
    let mut g = qr.top();
    for _ in 0..depth {
        let options = splittings(&g);
        if options.is_empty() {
            break;
        }
        g = options[rng.gen_range(0..options.len())].clone();
    }
    g
}

/// Graphs for the stabilization suite: every multigraph on at most three
/// vertices with at most three edges and three tails (tail weights in
/// {1, 1/2}, vertex genus in {0, 1}, point target), plus every labeled tree
/// on four to six vertices with tails filling the remaining flags and a
/// class on the first vertex over a line.
pub fn stabilization_suite() -> Vec<WGraph> {
    let mut out = Vec::new();
    for nv in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u..nv).map(move |v| (u, v))).collect();
        for ne in 0..=3usize {
            for edges in multisets(pairs.len(), ne) {
                for nt in 0..=3usize {
                    for places in multisets(nv, nt) {
                        for wmask in 0..(1u32 << nt) {
                            for gmask in 0..(1u32 << nv) {
                                let mut g = WGraph::new(TargetProfile::point());
                                for v in 0..nv {
                                    g.add_vertex(gmask >> v & 1, CurveClass(vec![]));
                                }
                                for &e in &edges {
                                    g.add_edge(pairs[e].0, pairs[e].1);
                                }
                                for (k, &v) in places.iter().enumerate() {
                                    g.add_tail(v, if wmask >> k & 1 == 1 { q(1, 2) } else { Rational::one() });
                                }
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
    }
    for nv in 4..=6usize {
        for code in prufer_codes(nv) {
            let edges = prufer_tree(&code, nv);
            let free = 10 - 2 * edges.len();
            for places in multisets(nv, free.min(2)) {
                for class in [0u64, 1] {
                    let mut g = WGraph::new(TargetProfile::projective(1));
                    for v in 0..nv {
                        g.add_vertex(0, CurveClass(vec![if v == 0 { class } else { 0 }]));
                    }
                    for &(u, v) in &edges {
                        g.add_edge(u, v);
                    }
                    for &v in &places {
                        g.add_tail(v, Rational::one());
                    }
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Nondecreasing sequences of length `k` over `0..n`.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(n, k, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn prufer_codes(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n - 2 {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                (0..n).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}

fn prufer_tree(code: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in code {
        degree[x] += 1;
    }
    let mut edges = Vec::new();
    for &x in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Whether the one-vertex data are stable.
pub fn admissible(qr: &StrataQuery) -> bool {
    vertex_ample(qr.genus_total, qr.weights.weights(), &qr.beta_total)
}

/// Queries for the strata oracle: up to five tails, total class coordinate
/// sum at most two, up to two edges.
pub fn strata_queries() -> Vec<StrataQuery> {
    let patterns: Vec<Vec<Rational>> = vec![
        vec![],
        vec![Rational::one()],
        vec![Rational::one(), q(1, 2)],
        vec![Rational::one(); 3],
        vec![q(1, 3); 3],
        vec![Rational::one(), q(1, 2), q(1, 2), q(1, 3)],
        vec![Rational::one(); 4],
        vec![q(1, 2); 5],
        vec![Rational::one(), Rational::one(), q(1, 3), q(1, 3), q(1, 3)],
        vec![Rational::one(); 5],
    ];
    let targets: Vec<(TargetProfile, Vec<CurveClass>)> = vec![
        (TargetProfile::point(), vec![CurveClass(vec![])]),
        (TargetProfile::projective(2), vec![CurveClass(vec![0]), CurveClass(vec![1]), CurveClass(vec![2])]),
        (TargetProfile::new(2, vec![-2, -2]), vec![CurveClass(vec![1, 1]), CurveClass(vec![0, 1])]),
    ];
    let mut out = Vec::new();
    for (profile, classes) in &targets {
        for beta in classes {
            for ws in &patterns {
                for genus in 0..=1u32 {
                    for max_edges in [1usize, 2] {
                        let qr = StrataQuery {
                            genus_total: genus,
                            weights: weights(ws),
                            beta_total: beta.clone(),
                            profile: profile.clone(),
                            max_edges,
                        };
                        if admissible(&qr) {
                            out.push(qr);
                        }
                    }
                }
            }
        }
    }
    out
}
