//! Weighted modular V-graphs, stored flag-centrically: every flag knows its
//! vertex, its partner under the involution (itself for a tail) and its
//! weight; vertices carry only genus and curve class.

pub mod canonical;
pub mod dot;
pub mod stabilize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{vertex_ample, CurveClass, Rational, TargetProfile, WeightData};
use crate::error::{Error, Result};

pub use canonical::{canonical_form, canonical_form_colored, is_isomorphic, CanonKey, Canonical};
pub use stabilize::{stabilize, StabilizationStep, Stabilized};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    pub class: CurveClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flag {
    pub vertex: usize,
    /// Image under the involution; equal to the flag's own index for tails.
    pub partner: usize,
    pub weight: Rational,
    /// Marking label of a tail, if any.
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WGraph {
    pub profile: TargetProfile,
    pub vertices: Vec<Vertex>,
    pub flags: Vec<Flag>,
}

/// A broken structural axiom. `code` is stable across releases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

impl Violation {
    pub(crate) fn new(code: &'static str, detail: impl Into<String>) -> Self {
        Violation { code, detail: detail.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

/// Totals attached to a graph: class, Euler characteristic, genus and
/// virtual dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub beta_total: CurveClass,
    pub euler: i64,
    pub genus_total: i64,
    pub vdim: i64,
    pub n_tails: usize,
    pub n_edges: usize,
    pub n_components: usize,
}

impl WGraph {
    pub fn new(profile: TargetProfile) -> Self {
        WGraph { profile, vertices: Vec::new(), flags: Vec::new() }
    }

    pub fn add_vertex(&mut self, genus: u32, class: CurveClass) -> usize {
        self.vertices.push(Vertex { genus, class });
        self.vertices.len() - 1
    }

    pub fn add_tail(&mut self, vertex: usize, weight: Rational) -> usize {
        let id = self.flags.len();
        self.flags.push(Flag { vertex, partner: id, weight, label: None });
        id
    }

    pub fn add_labeled_tail(&mut self, vertex: usize, weight: Rational, label: &str) -> usize {
        let id = self.add_tail(vertex, weight);
        self.flags[id].label = Some(label.to_string());
        id
    }

    /// Joins `u` and `v` by an edge of two weight-one flags.
    pub fn add_edge(&mut self, u: usize, v: usize) -> (usize, usize) {
        let a = self.flags.len();
        let b = a + 1;
        self.flags.push(Flag { vertex: u, partner: b, weight: Rational::one(), label: None });
        self.flags.push(Flag { vertex: v, partner: a, weight: Rational::one(), label: None });
        (a, b)
    }

    /// One vertex carrying all of `weights` as labeled tails.
    pub fn one_vertex(profile: TargetProfile, genus: u32, class: CurveClass, weights: &WeightData) -> Self {
        let mut g = WGraph::new(profile);
        let v = g.add_vertex(genus, class);
        for (label, w) in weights.labels().iter().zip(weights.weights()) {
            g.add_labeled_tail(v, w.clone(), label);
        }
        g
    }

    pub fn rank(&self) -> usize {
        self.profile.rank()
    }

    pub fn is_tail(&self, f: usize) -> bool {
        self.flags[f].partner == f
    }

    pub fn tails(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&f| self.is_tail(f)).collect()
    }

    /// Edges as `(f, j(f))` with `f < j(f)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.flags.len())
            .filter(|&f| self.flags[f].partner > f)
            .map(|f| (f, self.flags[f].partner))
            .collect()
    }

    pub fn is_loop(&self, f: usize) -> bool {
        !self.is_tail(f) && self.flags[self.flags[f].partner].vertex == self.flags[f].vertex
    }

    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.flags.len()).filter(|&f| self.flags[f].vertex == v).collect()
    }

    pub fn tail_with_label(&self, label: &str) -> Option<usize> {
        (0..self.flags.len()).find(|&f| self.is_tail(f) && self.flags[f].label.as_deref() == Some(label))
    }

    /// Sum of the weights of the flags at `v`, edge flags counting one.
    pub fn weight_at(&self, v: usize) -> Rational {
        self.flags.iter().filter(|f| f.vertex == v).map(|f| &f.weight).sum()
    }

    pub fn vertex_is_stable(&self, v: usize) -> bool {
        let ws: Vec<Rational> = self.flags.iter().filter(|f| f.vertex == v).map(|f| f.weight.clone()).collect();
        vertex_ample(self.vertices[v].genus, &ws, &self.vertices[v].class)
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.vertex_is_stable(v))
    }

    /// Connected component index of every vertex, numbered by first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b) in self.edges() {
            let ra = find(&mut parent, self.flags[a].vertex);
            let rb = find(&mut parent, self.flags[b].vertex);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut ids = BTreeMap::new();
        (0..self.vertices.len())
            .map(|v| {
                let r = find(&mut parent, v);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn n_components(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.n_components() <= 1
    }

    /// Structural axioms: involution, weight range, weight one on edge flags,
    /// class ranks and vertex references.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nf = self.flags.len();
        for (i, f) in self.flags.iter().enumerate() {
            if f.vertex >= self.vertices.len() {
                out.push(Violation::new("dangling-vertex", format!("flag {i} points at missing vertex {}", f.vertex)));
            }
            if f.partner >= nf {
                out.push(Violation::new("involution", format!("flag {i} has missing partner {}", f.partner)));
                continue;
            }
            if self.flags[f.partner].partner != i {
                out.push(Violation::new("involution", format!("j(j({i})) != {i}")));
            }
            if !f.weight.is_positive() || f.weight > Rational::one() {
                out.push(Violation::new("weight-range", format!("flag {i} has weight {}", f.weight)));
            }
            if f.partner != i && !f.weight.is_one() {
                out.push(Violation::new("edge-flag-weight", format!("edge flag {i} has weight {}", f.weight)));
            }
            if f.partner != i && f.label.is_some() {
                out.push(Violation::new("edge-flag-label", format!("edge flag {i} carries a label")));
            }
        }
        for (v, vert) in self.vertices.iter().enumerate() {
            if vert.class.rank() != self.profile.rank() {
                out.push(Violation::new(
                    "rank",
                    format!("vertex {v} class has rank {}, profile rank {}", vert.class.rank(), self.profile.rank()),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.flags {
            if let Some(l) = &f.label {
                if !seen.insert(l.clone()) {
                    out.push(Violation::new("duplicate-label", format!("label `{l}` used twice")));
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v.iter().map(|x| x.to_string()).collect()))
        }
    }

    /// Class, Euler characteristic `chi(|tau|) - sum g(v)`, genus `1 - chi`
    /// and `dim = chi (dim V - 3) - K.beta + |S| - |E|`.
    pub fn stats(&self) -> GraphStats {
        let beta_total = CurveClass::sum(self.rank(), self.vertices.iter().map(|v| &v.class));
        let n_edges = self.edges().len();
        let n_tails = self.tails().len();
        let n_components = self.n_components();
        let b1 = n_edges as i64 - self.vertices.len() as i64 + n_components as i64;
        let chi_top = n_components as i64 - b1;
        let euler = chi_top - self.vertices.iter().map(|v| v.genus as i64).sum::<i64>();
        let k_beta: i64 = self.profile.kappa.iter().zip(beta_total.coords()).map(|(k, b)| k * *b as i64).sum();
        let vdim = euler * (self.profile.dim_v as i64 - 3) - k_beta + n_tails as i64 - n_edges as i64;
        GraphStats { beta_total, euler, genus_total: 1 - euler, vdim, n_tails, n_edges, n_components }
    }

    /// First Betti number of the geometric realization.
    pub fn betti1(&self) -> i64 {
        self.edges().len() as i64 - self.vertices.len() as i64 + self.n_components() as i64
    }

    /// Copy with every class set to zero, as absolute stabilization sees it.
    pub fn forget_classes(&self) -> WGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.class = CurveClass::zero(self.rank());
        }
        g
    }

    /// Keeps the listed vertices and flags (both increasing), renumbering
    /// densely. Partners must stay inside the kept flags.
    pub(crate) fn restrict(&self, vertices: &[usize], flags: &[usize]) -> WGraph {
        let mut vmap = vec![usize::MAX; self.vertices.len()];
        for (new, &old) in vertices.iter().enumerate() {
            vmap[old] = new;
        }
        let mut fmap = vec![usize::MAX; self.flags.len()];
        for (new, &old) in flags.iter().enumerate() {
            fmap[old] = new;
        }
        WGraph {
            profile: self.profile.clone(),
            vertices: vertices.iter().map(|&v| self.vertices[v].clone()).collect(),
            flags: flags
                .iter()
                .map(|&f| {
                    let fl = &self.flags[f];
                    Flag {
                        vertex: vmap[fl.vertex],
                        partner: fmap[fl.partner],
                        weight: fl.weight.clone(),
                        label: fl.label.clone(),
                    }
                })
                .collect(),
        }
    }

    /// Disjoint union; the flags and vertices of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &WGraph) -> Result<WGraph> {
        if self.profile != other.profile {
            return Err(Error::Mismatch("graphs over different target profiles".into()));
        }
        let mut g = self.clone();
        let nv = g.vertices.len();
        let nf = g.flags.len();
        g.vertices.extend(other.vertices.iter().cloned());
        g.flags.extend(other.flags.iter().map(|f| Flag {
            vertex: f.vertex + nv,
            partner: f.partner + nf,
            weight: f.weight.clone(),
            label: f.label.clone(),
        }));
        Ok(g)
    }

    /// Weights of the tails as labeled weight data (tail order); unlabeled
    /// tails are named `t<flag>`.
    pub fn tail_weights(&self) -> Result<WeightData> {
        WeightData::new(
            self.tails()
                .into_iter()
                .map(|f| {
                    let name = self.flags[f].label.clone().unwrap_or_else(|| format!("t{f}"));
                    (name, self.flags[f].weight.clone())
                })
                .collect(),
        )
    }
}
