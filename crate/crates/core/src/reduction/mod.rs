//! Weight changes `A >= B`: breakpoints of the segment between them, the
//! boundary divisors the reduction contracts, and graph-level reduction
//! together with the elementary operations (forgetting, combining and gluing
//! tails, cutting edges, pushing classes forward).
//!
//! Graph reduction moves the tails of a contracted vertex onto its
//! neighbour, because sections survive the geometric reduction morphism.
//! This differs from [`crate::graph::stabilize`], whose pruning step drops
//! them; the two are not interchangeable.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{vertex_ample, Rational, TargetProfile, WeightData};
use crate::category::ClassMap;
use crate::chambers::{subset_elements, wall_subsets, WallKind};
use crate::error::{Error, Result};
use crate::graph::WGraph;

/// Breakpoints of the segment `B(lambda) = lambda A + (1 - lambda) B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionPath {
    pub from: WeightData,
    pub to: WeightData,
    /// Decreasing, inside `(0, 1)`.
    pub breakpoints: Vec<Rational>,
    /// Wall subsets (bit masks over the labels) met at each breakpoint.
    pub crossed_walls: BTreeMap<Rational, Vec<u64>>,
}

impl ReductionPath {
    pub fn weights_at(&self, lambda: &Rational) -> WeightData {
        self.to.interpolate(&self.from, lambda)
    }

    /// `1 = lambda_0 > lambda_1 > ... > lambda_N = 0`.
    pub fn lambdas(&self) -> Vec<Rational> {
        let mut out = vec![Rational::one()];
        out.extend(self.breakpoints.iter().cloned());
        out.push(Rational::zero());
        out
    }

    /// The elementary reductions, first to last, as (source, target) pairs.
    pub fn factorization(&self) -> Vec<(WeightData, WeightData)> {
        self.lambdas().windows(2).map(|w| (self.weights_at(&w[0]), self.weights_at(&w[1]))).collect()
    }
}

pub(crate) fn check_pair(a: &WeightData, b: &WeightData) -> Result<()> {
    for w in [a, b] {
        if let Some(i) = (0..w.len()).find(|&i| !w.weight(i).is_positive()) {
            return Err(Error::ZeroWeight(w.label(i).to_string()));
        }
    }
    if a.labels() != b.labels() {
        return Err(Error::Mismatch("weight data over different labels".into()));
    }
    if !a.dominates(b) {
        return Err(Error::Incomparable);
    }
    if a.len() > 63 {
        return Err(Error::TooLarge { n: a.len(), max: 63 });
    }
    Ok(())
}

pub fn reduction_path(a: &WeightData, b: &WeightData) -> Result<ReductionPath> {
    check_pair(a, b)?;
    let mut crossed: BTreeMap<Rational, Vec<u64>> = BTreeMap::new();
    for mask in wall_subsets(a.len(), WallKind::Fine) {
        let sa = a.subset_sum(mask);
        if sa.is_one() {
            continue;
        }
        let sb = b.subset_sum(mask);
        let denom = &sa - &sb;
        if denom.is_zero() {
            continue;
        }
        let lambda = (Rational::one() - &sb) / denom;
        if lambda.is_positive() && lambda < Rational::one() {
            crossed.entry(lambda).or_default().push(mask);
        }
    }
    let breakpoints = crossed.keys().rev().cloned().collect();
    Ok(ReductionPath { from: a.clone(), to: b.clone(), breakpoints, crossed_walls: crossed })
}

/// Boundary divisor `D_{I,J}` contracted by the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractedDivisor {
    /// Bit mask of `I`.
    pub i: u64,
    /// Bit mask of `J`, the complement.
    pub j: u64,
    pub is_exceptional: bool,
    /// `sum_I B = 1`: the target weight lies on the wall of `I`.
    pub on_wall: bool,
}

impl ContractedDivisor {
    pub fn i_elements(&self) -> Vec<usize> {
        subset_elements(self.i)
    }
}

/// Every `I` with `sum_I A > 1 >= sum_I B`, by increasing size then mask.
pub fn contracted_divisors(a: &WeightData, b: &WeightData) -> Result<Vec<ContractedDivisor>> {
    check_pair(a, b)?;
    let full = if a.len() == 64 { u64::MAX } else { (1u64 << a.len()) - 1 };
    Ok(wall_subsets(a.len(), WallKind::Fine)
        .into_iter()
        .filter(|&m| a.subset_sum(m).cmp_one().is_gt() && b.subset_sum(m).cmp_one().is_le())
        .map(|m| ContractedDivisor {
            i: m,
            j: full & !m,
            is_exceptional: m.count_ones() > 2,
            on_wall: b.subset_sum(m).is_one(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "subset", rename_all = "kebab-case")]
pub enum ReductionKind {
    Isomorphism,
    Blowup(u64),
    General,
}

pub fn classify_reduction(a: &WeightData, b: &WeightData) -> Result<ReductionKind> {
    let divisors = contracted_divisors(a, b)?;
    Ok(if divisors.iter().all(|d| d.i.count_ones() == 2) {
        ReductionKind::Isomorphism
    } else if divisors.len() == 1 {
        ReductionKind::Blowup(divisors[0].i)
    } else {
        ReductionKind::General
    })
}

/// Contracts genus-0, class-0 vertices that are unstable: one with a single
/// edge goes away and its tails move to the neighbour; one with two edges
/// and no tails is spliced out. An unstable vertex with no way out means the
/// data are inadmissible.
pub(crate) fn contract_unstable(g: &WGraph) -> Result<WGraph> {
    let mut g = g.clone();
    let mut alive_v = vec![true; g.vertices.len()];
    let mut alive_f = vec![true; g.flags.len()];
    loop {
        let flags_at = |g: &WGraph, alive_f: &[bool], v: usize| -> Vec<usize> {
            (0..g.flags.len()).filter(|&f| alive_f[f] && g.flags[f].vertex == v).collect()
        };
        let unstable = (0..g.vertices.len()).find(|&v| {
            alive_v[v] && {
                let ws: Vec<Rational> = flags_at(&g, &alive_f, v).iter().map(|&f| g.flags[f].weight.clone()).collect();
                !vertex_ample(g.vertices[v].genus, &ws, &g.vertices[v].class)
            }
        });
        let Some(v) = unstable else { break };
        let flags = flags_at(&g, &alive_f, v);
        let outgoing: Vec<usize> = flags
            .iter()
            .copied()
            .filter(|&f| !g.is_tail(f) && g.flags[g.flags[f].partner].vertex != v)
            .collect();
        let tails: Vec<usize> = flags.iter().copied().filter(|&f| g.is_tail(f)).collect();
        let looped = flags.len() != outgoing.len() + tails.len();
        match (outgoing.len(), tails.len()) {
            (1, _) if !looped => {
                let f0 = outgoing[0];
                let p = g.flags[f0].partner;
                let u = g.flags[p].vertex;
                alive_v[v] = false;
                alive_f[f0] = false;
                alive_f[p] = false;
                for t in tails {
                    g.flags[t].vertex = u;
                }
            }
            (2, 0) if !looped => {
                let (p, q) = (g.flags[outgoing[0]].partner, g.flags[outgoing[1]].partner);
                alive_v[v] = false;
                alive_f[outgoing[0]] = false;
                alive_f[outgoing[1]] = false;
                g.flags[p].partner = q;
                g.flags[q].partner = p;
            }
            _ => {
                return Err(Error::Inadmissible(format!(
                    "vertex {v} (genus {}, class {}) cannot be stabilized",
                    g.vertices[v].genus, g.vertices[v].class
                )))
            }
        }
    }
    let vs: Vec<usize> = (0..alive_v.len()).filter(|&v| alive_v[v]).collect();
    let fs: Vec<usize> = (0..alive_f.len()).filter(|&f| alive_f[f]).collect();
    Ok(g.restrict(&vs, &fs))
}

/// Name under which a tail is matched against weight data: its label, or
/// `t<flag>` when unlabeled.
pub fn tail_key(g: &WGraph, f: usize) -> String {
    g.flags[f].label.clone().unwrap_or_else(|| format!("t{f}"))
}

/// Lowers the tail weights to `b` (matched by label) and contracts the
/// components that become unstable, moving their tails along.
pub fn reduce_graph(g: &WGraph, b: &WeightData) -> Result<WGraph> {
    g.ensure_valid()?;
    if !g.is_stable() {
        return Err(Error::Inadmissible("input graph is not stable for its own weights".into()));
    }
    let tails = g.tails();
    if tails.len() != b.len() {
        return Err(Error::Mismatch(format!("graph has {} tails, weight data has {} labels", tails.len(), b.len())));
    }
    let mut out = g.clone();
    for t in tails {
        let key = tail_key(g, t);
        let i = b.index_of(&key)?;
        let w = b.weight(i);
        if !w.is_positive() {
            return Err(Error::ZeroWeight(key));
        }
        if *w > g.flags[t].weight {
            return Err(Error::Incomparable);
        }
        out.flags[t].weight = w.clone();
    }
    contract_unstable(&out)
}

/// Removes tail `t` and contracts what becomes unstable.
pub fn forget_tail(g: &WGraph, t: usize) -> Result<WGraph> {
    if t >= g.flags.len() || !g.is_tail(t) {
        return Err(Error::NotATail(t));
    }
    let vs: Vec<usize> = (0..g.vertices.len()).collect();
    let fs: Vec<usize> = (0..g.flags.len()).filter(|&f| f != t).collect();
    contract_unstable(&g.restrict(&vs, &fs))
}

/// Replaces tails at one vertex by a single tail carrying their total
/// weight. The new tail takes the place of the first one; labels are joined
/// with `+`.
pub fn combine_tails(g: &WGraph, group: &[usize]) -> Result<WGraph> {
    let mut group = group.to_vec();
    group.sort_unstable();
    group.dedup();
    let Some(&first) = group.first() else {
        return Err(Error::Usage("empty group of tails".into()));
    };
    for &t in &group {
        if t >= g.flags.len() || !g.is_tail(t) {
            return Err(Error::NotATail(t));
        }
        if g.flags[t].vertex != g.flags[first].vertex {
            return Err(Error::NotColocated);
        }
    }
    let total: Rational = group.iter().map(|&t| &g.flags[t].weight).sum();
    if total > Rational::one() {
        return Err(Error::WeightOverflow(total.to_string()));
    }
    let labels: Vec<&str> = group.iter().filter_map(|&t| g.flags[t].label.as_deref()).collect();
    let mut out = g.clone();
    out.flags[first].weight = total;
    out.flags[first].label = (!labels.is_empty()).then(|| labels.join("+"));
    let vs: Vec<usize> = (0..g.vertices.len()).collect();
    let fs: Vec<usize> = (0..g.flags.len()).filter(|f| *f == first || !group.contains(f)).collect();
    Ok(out.restrict(&vs, &fs))
}

fn check_glue_tail(g: &WGraph, t: usize) -> Result<()> {
    if t >= g.flags.len() || !g.is_tail(t) {
        return Err(Error::NotATail(t));
    }
    if !g.flags[t].weight.is_one() {
        return Err(Error::GluingWeight { flag: t, weight: g.flags[t].weight.to_string() });
    }
    Ok(())
}

/// Disjoint union with `t1` of `g1` and `t2` of `g2` joined into an edge.
/// Flags of `g2` are numbered after those of `g1`.
pub fn glue(g1: &WGraph, t1: usize, g2: &WGraph, t2: usize) -> Result<WGraph> {
    check_glue_tail(g1, t1)?;
    check_glue_tail(g2, t2)?;
    let u = g1.disjoint_union(g2)?;
    self_glue(&u, t1, t2 + g1.flags.len())
}

/// Joins two weight-one tails of one graph into an edge.
pub fn self_glue(g: &WGraph, t1: usize, t2: usize) -> Result<WGraph> {
    check_glue_tail(g, t1)?;
    check_glue_tail(g, t2)?;
    if t1 == t2 {
        return Err(Error::Usage("cannot glue a tail to itself".into()));
    }
    let mut out = g.clone();
    out.flags[t1].partner = t2;
    out.flags[t2].partner = t1;
    out.flags[t1].label = None;
    out.flags[t2].label = None;
    Ok(out)
}

/// Cuts the edge containing flag `f` into two weight-one tails.
pub fn cut_edge(g: &WGraph, f: usize) -> Result<WGraph> {
    if f >= g.flags.len() || g.is_tail(f) {
        return Err(Error::NotAnEdge(f));
    }
    let p = g.flags[f].partner;
    let mut out = g.clone();
    out.flags[f].partner = f;
    out.flags[p].partner = p;
    Ok(out)
}

/// Pushes every vertex class forward along `xi` into `profile` and
/// contracts the components that become unstable.
pub fn push_forward_classes(g: &WGraph, xi: &ClassMap, profile: &TargetProfile) -> Result<WGraph> {
    if xi.cols != g.rank() || xi.rows != profile.rank() {
        return Err(Error::RankMismatch { expected: profile.rank(), found: xi.rows });
    }
    let mut out = g.clone();
    out.profile = profile.clone();
    for v in &mut out.vertices {
        v.class = xi.apply(&v.class);
    }
    contract_unstable(&out)
}
