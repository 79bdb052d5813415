//! Boundary strata of a moduli problem: the stable connected weighted graphs
//! with fixed total genus, total class and tail set, up to isomorphism, and
//! the poset they form under single-edge contraction.
//!
//! Strata are grown level by level. Contracting any edge of a stable graph
//! leaves a stable graph with one edge fewer, so every stratum with `k`
//! edges arises from one with `k - 1` edges by either splitting a vertex in
//! two (distributing its flags, genus and class) or trading one unit of
//! vertex genus for a loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{vertex_ample, CurveClass, TargetProfile, WeightData};
use crate::category::{contract_edges, validate_contraction, Contraction};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, CanonKey, WGraph};
use crate::reduction::{check_pair, reduce_graph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataQuery {
    pub genus_total: u32,
    pub weights: WeightData,
    pub beta_total: CurveClass,
    pub profile: TargetProfile,
    pub max_edges: usize,
}

impl StrataQuery {
    pub fn check(&self) -> Result<()> {
        self.profile.check_rank(&self.beta_total)?;
        if !self.weights.all_positive() {
            let i = (0..self.weights.len()).find(|&i| !self.weights.weight(i).is_positive()).unwrap_or(0);
            return Err(Error::ZeroWeight(self.weights.label(i).to_string()));
        }
        if !vertex_ample(self.genus_total, self.weights.weights(), &self.beta_total) {
            return Err(Error::Inadmissible(format!(
                "genus {}, weights {}, class {} is not stable",
                self.genus_total,
                self.weights.to_list_string(),
                self.beta_total
            )));
        }
        Ok(())
    }

    /// The open stratum: one vertex carrying everything.
    pub fn top(&self) -> WGraph {
        WGraph::one_vertex(self.profile.clone(), self.genus_total, self.beta_total.clone(), &self.weights)
    }
}

/// All strata of `q`, ordered by number of edges, then canonical form. Each
/// graph is returned in canonical layout.
pub fn enumerate_strata(q: &StrataQuery) -> Result<Vec<WGraph>> {
    q.check()?;
    let top = canonical_form(&q.top());
    let mut levels: Vec<BTreeMap<CanonKey, WGraph>> = vec![BTreeMap::from([(top.key, top.graph)])];
    for _ in 0..q.max_edges {
        let prev: Vec<&WGraph> = levels.last().expect("nonempty").values().collect();
        let found: Vec<Vec<(CanonKey, WGraph)>> = prev
            .par_iter()
            .map(|g| splittings(g).into_iter().map(|h| {
                let c = canonical_form(&h);
                (c.key, c.graph)
            }).collect())
            .collect();
        let next: BTreeMap<CanonKey, WGraph> = found.into_iter().flatten().collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok(levels.into_iter().flat_map(|l| l.into_values()).collect())
}

/// Stable graphs with one more edge that contract back onto `g`: each vertex
/// split in two in every way, and each unit of vertex genus traded for a
/// loop. Isomorphic results are not merged.
pub fn splittings(g: &WGraph) -> Vec<WGraph> {
    let mut out = Vec::new();
    for v in 0..g.vertices.len() {
        if g.vertices[v].genus > 0 {
            let mut h = g.clone();
            h.vertices[v].genus -= 1;
            h.add_edge(v, v);
            out.push(h);
        }
        let flags = g.flags_at(v);
        let genus = g.vertices[v].genus;
        let classes = g.vertices[v].class.below();
        // the flag mask fixes which flags move to the new vertex; the mirror
        // image gives the same graph, so the first flag always stays
        let n = flags.len();
        for mask in 0u64..(1u64 << n) {
            if n > 0 && mask & 1 == 1 {
                continue;
            }
            for g1 in 0..=genus {
                for c1 in &classes {
                    let c2 = g.vertices[v].class.checked_sub(c1).expect("below");
                    let mut h = g.clone();
                    h.vertices[v].genus = g1;
                    h.vertices[v].class = c1.clone();
                    let w = h.add_vertex(genus - g1, c2);
                    for (i, &f) in flags.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            h.flags[f].vertex = w;
                        }
                    }
                    h.add_edge(v, w);
                    if h.vertex_is_stable(v) && h.vertex_is_stable(w) {
                        out.push(h);
                    }
                }
            }
        }
    }
    out
}

/// Single-edge contraction `upper -> lower` between two strata, with the
/// contracted edge as witness.
#[derive(Clone, Debug)]
pub struct Cover {
    pub upper: usize,
    pub lower: usize,
    pub edge: (usize, usize),
    pub contraction: Contraction,
}

#[derive(Clone, Debug)]
pub struct StratumPoset {
    pub nodes: Vec<WGraph>,
    /// One cover per related pair, ordered by `(upper, lower)`.
    pub covers: Vec<Cover>,
}

impl StratumPoset {
    /// Graphviz digraph: one node per stratum labeled `codim/vdim`, arrows
    /// pointing towards the contraction.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph strata {\n");
        for (i, g) in self.nodes.iter().enumerate() {
            let st = g.stats();
            let _ = writeln!(s, "  s{i} [label=\"{}/{}\"];", st.n_edges, st.vdim);
        }
        for c in &self.covers {
            let _ = writeln!(s, "  s{} -> s{};", c.upper, c.lower);
        }
        s.push_str("}\n");
        s
    }
}

pub fn contraction_poset(strata: &[WGraph]) -> StratumPoset {
    let canon: Vec<_> = strata.iter().map(canonical_form).collect();
    let index: BTreeMap<&CanonKey, usize> = canon.iter().enumerate().map(|(i, c)| (&c.key, i)).collect();
    let mut covers: BTreeMap<(usize, usize), Cover> = BTreeMap::new();
    for (upper, tau) in strata.iter().enumerate() {
        for (a, b) in tau.edges() {
            let Ok(c) = contract_edges(tau, &[a]) else { continue };
            let cf = canonical_form(&c.target);
            let Some(&lower) = index.get(&cf.key) else { continue };
            if covers.contains_key(&(upper, lower)) {
                continue;
            }
            // route through the shared canonical layout: stored flag -> slot
            // -> flag of the contracted graph, and back for vertices
            let lower_graph = strata[lower].clone();
            let mut target_of_slot = vec![0; cf.flag_perm.len()];
            for (t, &slot) in cf.flag_perm.iter().enumerate() {
                target_of_slot[slot] = t;
            }
            let flag_inj = canon[lower].flag_perm.iter().map(|&slot| c.flag_inj[target_of_slot[slot]]).collect();
            let mut stored_of_slot = vec![0; lower_graph.vertices.len()];
            for (s, &slot) in canon[lower].vertex_perm.iter().enumerate() {
                stored_of_slot[slot] = s;
            }
            let vertex_surj = c.vertex_surj.iter().map(|&v| stored_of_slot[cf.vertex_perm[v]]).collect();
            let contraction = Contraction { source: tau.clone(), target: lower_graph, flag_inj, vertex_surj };
            if validate_contraction(&contraction).is_empty() {
                covers.insert((upper, lower), Cover { upper, lower, edge: (a, b), contraction });
            }
        }
    }
    StratumPoset { nodes: strata.to_vec(), covers: covers.into_values().collect() }
}

/// Image of one source stratum under reduction.
#[derive(Clone, Debug, Serialize)]
pub struct DiffEntry {
    pub source: usize,
    pub image: usize,
    /// The image has fewer edges than the source.
    pub contracted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChamberDiff {
    pub sources: Vec<WGraph>,
    /// Distinct images, in first-seen order.
    pub images: Vec<WGraph>,
    pub entries: Vec<DiffEntry>,
    /// Source indices grouped by image.
    pub fibers: Vec<Vec<usize>>,
}

/// Enumerates the strata of `q` with weights `a` and reduces each to `b`.
pub fn chamber_diff(q: &StrataQuery, a: &WeightData, b: &WeightData) -> Result<ChamberDiff> {
    check_pair(a, b)?;
    let qa = StrataQuery { weights: a.clone(), ..q.clone() };
    chamber_diff_of(&enumerate_strata(&qa)?, b)
}

/// Reduction report for an explicit list of strata.
pub fn chamber_diff_of(strata: &[WGraph], b: &WeightData) -> Result<ChamberDiff> {
    let reduced: Vec<WGraph> = strata.iter().map(|g| reduce_graph(g, b)).collect::<Result<_>>()?;
    let mut images: Vec<WGraph> = Vec::new();
    let mut keys: BTreeMap<CanonKey, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    let mut fibers: Vec<Vec<usize>> = Vec::new();
    for (i, r) in reduced.iter().enumerate() {
        let c = canonical_form(r);
        let image = *keys.entry(c.key).or_insert_with(|| {
            images.push(c.graph);
            fibers.push(Vec::new());
            images.len() - 1
        });
        fibers[image].push(i);
        let contracted = r.edges().len() < strata[i].edges().len();
        entries.push(DiffEntry { source: i, image, contracted });
    }
    Ok(ChamberDiff { sources: strata.to_vec(), images, entries, fibers })
}

impl ChamberDiff {
    /// Whether every source maps to its own image without contraction.
    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|e| !e.contracted) && self.fibers.iter().all(|f| f.len() == 1)
    }

    pub fn contracted(&self) -> BTreeSet<usize> {
        self.entries.iter().filter(|e| e.contracted).map(|e| e.source).collect()
    }
}

#[cfg(test)]
mod tests;
