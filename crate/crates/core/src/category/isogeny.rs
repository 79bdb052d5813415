//! Isogenies, absolute stabilization and the cartesian isogeny pullback.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_additivity, check_collapse, into_result, validate_comb, ClassMap, CombinatorialMorphism, MorphismViolation};
use crate::arith::{CurveClass, Rational, WeightData};
use crate::chambers::is_small_tail_index;
use crate::error::{Error, Result};
use crate::graph::{canonical_form, stabilize::stabilize_with, Flag, WGraph};

/// Collapse of connected edge subgraphs together with forgetting small
/// tails: `flag_inj` sends target flags into the source, `vertex_surj` sends
/// source vertices onto the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isogeny {
    pub source: WGraph,
    pub target: WGraph,
    pub flag_inj: Vec<usize>,
    pub vertex_surj: Vec<usize>,
}

impl Isogeny {
    pub fn identity(g: &WGraph) -> Self {
        Isogeny {
            source: g.clone(),
            target: g.clone(),
            flag_inj: (0..g.flags.len()).collect(),
            vertex_surj: (0..g.vertices.len()).collect(),
        }
    }

    /// Source tails outside the image of the flag map.
    pub fn dropped_tails(&self) -> Vec<usize> {
        let hit: HashSet<usize> = self.flag_inj.iter().copied().collect();
        self.source.tails().into_iter().filter(|f| !hit.contains(f)).collect()
    }
}

/// Whether the flags of `removable` can be forgotten one at a time, each a
/// small tail of the weights still present.
fn forgettable(weights: &[Rational], removable: &[usize]) -> bool {
    fn go(weights: &[Rational], alive: u64, left: u64, failed: &mut HashSet<u64>) -> bool {
        if left == 0 {
            return true;
        }
        if failed.contains(&left) {
            return false;
        }
        let idx: Vec<usize> = (0..weights.len()).filter(|i| alive >> i & 1 == 1).collect();
        let wd = WeightData::from_weights(idx.iter().map(|&i| weights[i].clone()).collect())
            .expect("flag weights lie in (0, 1]");
        for (local, &i) in idx.iter().enumerate() {
            if left >> i & 1 == 1
                && is_small_tail_index(&wd, local)
                && go(weights, alive & !(1 << i), left & !(1 << i), failed)
            {
                return true;
            }
        }
        failed.insert(left);
        false
    }
    assert!(weights.len() < 64, "too many flags at one vertex");
    let all = (1u64 << weights.len()) - 1;
    let left = removable.iter().fold(0u64, |m, &i| m | 1 << i);
    go(weights, all, left, &mut HashSet::new())
}

/// Conditions: (1) boundary maps commute, (2) genus and class additivity
/// over the collapsed subgraphs, (3) weights preserved, (4) at every source
/// vertex, with its edges cut into weight-one tails, the tails outside the
/// image can be forgotten as a sequence of small tails. Contracted edges
/// are not forgotten; they are collapsed.
pub fn validate_isogeny(i: &Isogeny) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    let Some(n_contracted) = check_collapse(&i.source, &i.target, &i.flag_inj, &i.vertex_surj, &mut out) else {
        return out;
    };
    check_additivity(&i.source, &i.target, &i.vertex_surj, &n_contracted, 2, 2, &mut out);
    for (f, fl) in i.target.flags.iter().enumerate() {
        let w = &i.source.flags[i.flag_inj[f]].weight;
        if *w != fl.weight {
            out.push(MorphismViolation::new(3, format!("flag {f}: weight {} != {w}", fl.weight)));
        }
    }
    let dropped: HashSet<usize> = i.dropped_tails().into_iter().collect();
    for v in 0..i.source.vertices.len() {
        let flags = i.source.flags_at(v);
        let removable: Vec<usize> = (0..flags.len()).filter(|&k| dropped.contains(&flags[k])).collect();
        if removable.is_empty() {
            continue;
        }
        let weights: Vec<Rational> = flags
            .iter()
            .map(|&f| if i.source.is_tail(f) { i.source.flags[f].weight.clone() } else { Rational::one() })
            .collect();
        if !forgettable(&weights, &removable) {
            let names: Vec<String> = removable.iter().map(|&k| flags[k].to_string()).collect();
            out.push(MorphismViolation::new(
                4,
                format!("vertex {v}: tails {} are not a contraction of small tails", names.join(",")),
            ));
        }
    }
    out
}

/// Stabilization with classes ignored. Returns the stable modular graph
/// (classes zeroed) and its morphism into the input with classes zeroed.
pub fn absolute_stabilization(g: &WGraph) -> (WGraph, CombinatorialMorphism) {
    let s = stabilize_with(g, true);
    let gs = s.graph.forget_classes();
    let b = CombinatorialMorphism {
        source: gs.clone(),
        target: g.forget_classes(),
        flag_map: s.flag_map,
        vertex_map: s.vertex_map,
        xi: ClassMap::identity(g.rank()),
    };
    (gs, b)
}

/// One member of a cartesian isogeny pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackBranch {
    pub graph: WGraph,
    /// `tau^s -> graph`, both with classes forgotten.
    pub stabilization: CombinatorialMorphism,
    pub isogeny: Isogeny,
}

/// The graph `tau'` with its modular isogeny onto `sigma`; vertex classes
/// are left at zero.
struct Skeleton {
    graph: WGraph,
    flag_inj: Vec<usize>,
    vertex_surj: Vec<usize>,
    n_stable_vertices: usize,
}

fn skeleton(sigma: &WGraph, b: &CombinatorialMorphism, phi: &Isogeny) -> Result<Skeleton> {
    let ts = &phi.source;
    let nf = sigma.flags.len();
    let mut inv_b = vec![usize::MAX; nf];
    for (x, &s) in b.flag_map.iter().enumerate() {
        if inv_b[s] != usize::MAX {
            return Err(Error::Mismatch("stabilization map is not injective on flags".into()));
        }
        inv_b[s] = x;
    }
    let mut kept = vec![false; sigma.vertices.len()];
    for &v in &b.vertex_map {
        kept[v] = true;
    }
    let mut graph = WGraph::new(sigma.profile.clone());
    for v in &ts.vertices {
        graph.add_vertex(v.genus, CurveClass::zero(sigma.rank()));
    }
    let mut vcopy = vec![usize::MAX; sigma.vertices.len()];
    for (v, vert) in sigma.vertices.iter().enumerate() {
        if !kept[v] {
            vcopy[v] = graph.add_vertex(vert.genus, CurveClass::zero(sigma.rank()));
        }
    }
    let mut fcopy = vec![usize::MAX; nf];
    let mut next = ts.flags.len();
    for s in 0..nf {
        if inv_b[s] == usize::MAX {
            if kept[sigma.flags[s].vertex] {
                return Err(Error::Mismatch(format!("flag {s} at a kept vertex is missed by the stabilization map")));
            }
            fcopy[s] = next;
            next += 1;
        }
    }
    // sigma flag -> its flag in tau'
    let image = |s: usize| if inv_b[s] == usize::MAX { fcopy[s] } else { phi.flag_inj[inv_b[s]] };
    let mut hit = vec![usize::MAX; ts.flags.len()];
    for (x, &y) in phi.flag_inj.iter().enumerate() {
        hit[y] = x;
    }
    let mut flags = Vec::with_capacity(next);
    for (y, fl) in ts.flags.iter().enumerate() {
        if hit[y] == usize::MAX {
            flags.push(fl.clone());
        } else {
            let s = b.flag_map[hit[y]];
            let sf = &sigma.flags[s];
            flags.push(Flag { vertex: fl.vertex, partner: image(sf.partner), weight: sf.weight.clone(), label: sf.label.clone() });
        }
    }
    for s in 0..nf {
        if fcopy[s] != usize::MAX {
            let sf = &sigma.flags[s];
            flags.push(Flag {
                vertex: vcopy[sf.vertex],
                partner: image(sf.partner),
                weight: sf.weight.clone(),
                label: sf.label.clone(),
            });
        }
    }
    graph.flags = flags;
    let mut vertex_surj: Vec<usize> = phi.vertex_surj.iter().map(|&u| b.vertex_map[u]).collect();
    vertex_surj.extend((0..sigma.vertices.len()).filter(|&v| !kept[v]));
    let flag_inj = (0..nf).map(image).collect();
    graph.ensure_valid()?;
    Ok(Skeleton { graph, flag_inj, vertex_surj, n_stable_vertices: ts.vertices.len() })
}

/// All ways to write `n` as an ordered sum of `parts` naturals.
fn compositions(n: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All ways to split `c` over `parts` vertices.
fn class_splittings(c: &CurveClass, parts: usize) -> Vec<Vec<CurveClass>> {
    let mut out: Vec<Vec<CurveClass>> = vec![vec![CurveClass::zero(c.rank()); parts]];
    for (j, &cj) in c.coords().iter().enumerate() {
        let mut next = Vec::new();
        for partial in &out {
            for comp in compositions(cj, parts) {
                let mut p = partial.clone();
                for (k, &x) in comp.iter().enumerate() {
                    p[k].0[j] = x;
                }
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn branch(sk: &Skeleton, sigma: &WGraph, ts: &WGraph, classes: &[CurveClass]) -> Option<PullbackBranch> {
    let mut graph = sk.graph.clone();
    for (v, c) in classes.iter().enumerate() {
        graph.vertices[v].class = c.clone();
    }
    if !graph.is_stable() {
        return None;
    }
    let isogeny = Isogeny {
        source: graph.clone(),
        target: sigma.clone(),
        flag_inj: sk.flag_inj.clone(),
        vertex_surj: sk.vertex_surj.clone(),
    };
    if !validate_isogeny(&isogeny).is_empty() {
        return None;
    }
    // tau^s keeps its indices inside tau'
    let stabilization = CombinatorialMorphism {
        source: ts.clone(),
        target: graph.forget_classes(),
        flag_map: (0..ts.flags.len()).collect(),
        vertex_map: (0..sk.n_stable_vertices).collect(),
        xi: ClassMap::identity(sigma.rank()),
    };
    Some(PullbackBranch { graph, stabilization, isogeny })
}

/// Cartesian pullback of `sigma` along `phi: tau^s -> sigma^s`, where
/// `b: sigma^s -> sigma` is given explicitly (classes of `b`'s target are
/// ignored). Each long edge and long tail of `sigma` replaces the
/// corresponding edge or tail of `tau^s`; then every splitting of the
/// classes of `sigma` over the fibers that leaves all vertices stable
/// yields one branch, in lexicographic order of the splittings.
pub fn cartesian_pullback_along(
    sigma: &WGraph,
    b: &CombinatorialMorphism,
    phi: &Isogeny,
) -> Result<Vec<PullbackBranch>> {
    into_result(validate_isogeny(phi))?;
    into_result(validate_comb(b))?;
    if b.source.forget_classes() != phi.target.forget_classes() || b.target.forget_classes() != sigma.forget_classes() {
        return Err(Error::Mismatch("stabilization map does not join the isogeny target to sigma".into()));
    }
    let sk = skeleton(sigma, b, phi)?;
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); sigma.vertices.len()];
    for (v, &w) in sk.vertex_surj.iter().enumerate() {
        fibers[w].push(v);
    }
    let mut assignments: Vec<Vec<CurveClass>> = vec![vec![CurveClass::zero(sigma.rank()); sk.graph.vertices.len()]];
    for (w, fiber) in fibers.iter().enumerate() {
        let splits = class_splittings(&sigma.vertices[w].class, fiber.len());
        let mut next = Vec::with_capacity(assignments.len() * splits.len());
        for a in &assignments {
            for s in &splits {
                let mut a = a.clone();
                for (k, &v) in fiber.iter().enumerate() {
                    a[v] = s[k].clone();
                }
                next.push(a);
            }
        }
        assignments = next;
    }
    let ts = phi.source.forget_classes();
    Ok(assignments.par_iter().filter_map(|a| branch(&sk, sigma, &ts, a)).collect())
}

/// Cartesian pullback with `sigma^s` the absolute stabilization of `sigma`.
/// `phi.target` may be any isomorphic copy of `sigma^s`.
pub fn cartesian_isogeny_pullback(sigma: &WGraph, phi: &Isogeny) -> Result<Vec<PullbackBranch>> {
    let (ss, b) = absolute_stabilization(sigma);
    let phi = retarget_isogeny(phi, &ss)?;
    cartesian_pullback_along(sigma, &b, &phi)
}

/// The same isogeny with its target replaced by `target`, an isomorphic
/// copy once classes are forgotten.
pub fn retarget_isogeny(phi: &Isogeny, target: &WGraph) -> Result<Isogeny> {
    let current = phi.target.forget_classes();
    if current == *target {
        return Ok(Isogeny { target: target.clone(), ..phi.clone() });
    }
    let c1 = canonical_form(&current);
    let c2 = canonical_form(target);
    if c1.graph != c2.graph {
        return Err(Error::Mismatch("isogeny target is not isomorphic to the requested graph".into()));
    }
    let mut inv1_f = vec![0; current.flags.len()];
    for (i, &c) in c1.flag_perm.iter().enumerate() {
        inv1_f[c] = i;
    }
    let mut inv2_v = vec![0; target.vertices.len()];
    for (i, &c) in c2.vertex_perm.iter().enumerate() {
        inv2_v[c] = i;
    }
    Ok(Isogeny {
        source: phi.source.clone(),
        target: target.clone(),
        flag_inj: (0..target.flags.len()).map(|s| phi.flag_inj[inv1_f[c2.flag_perm[s]]]).collect(),
        vertex_surj: phi.vertex_surj.iter().map(|&u| inv2_v[c1.vertex_perm[u]]).collect(),
    })
}

/// Independent enumeration: every assignment of classes bounded by the total
/// class of `sigma` to the vertices of `tau'`, kept when the result is
/// stable and maps to `sigma` by an isogeny.
pub fn brute_force_pullback(sigma: &WGraph, b: &CombinatorialMorphism, phi: &Isogeny) -> Result<Vec<WGraph>> {
    let sk = skeleton(sigma, b, phi)?;
    let bound = sigma.stats().beta_total.below();
    let n = sk.graph.vertices.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let classes: Vec<CurveClass> = idx.iter().map(|&i| bound[i].clone()).collect();
        let mut g = sk.graph.clone();
        for (v, c) in classes.into_iter().enumerate() {
            g.vertices[v].class = c;
        }
        let iso = Isogeny { source: g.clone(), target: sigma.clone(), flag_inj: sk.flag_inj.clone(), vertex_surj: sk.vertex_surj.clone() };
        if g.is_stable() && validate_isogeny(&iso).is_empty() {
            out.push(g);
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < bound.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
