//! Morphisms of weighted stable marked graphs: combinatorial morphisms,
//! contractions, their composites, isogenies and cartesian isogeny
//! pullbacks.
//!
//! A combinatorial morphism points from the graph with more information to
//! the one it maps onto (cutting an edge, adding tails, combining tails) and
//! is contravariant for the geometric maps; a contraction collapses edges and
//! is covariant. A morphism of the category pairs the two through a middle
//! graph.

mod isogeny;
mod pullback;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{CurveClass, Rational};
use crate::error::{Error, Result};
use crate::graph::{canonical_form_colored, CanonKey, Flag, Vertex, WGraph};

pub use isogeny::{
    absolute_stabilization, brute_force_pullback, cartesian_isogeny_pullback, cartesian_pullback_along,
    retarget_isogeny, validate_isogeny, Isogeny, PullbackBranch,
};
pub use pullback::{compose, stable_pullback, Pullback};

/// A monoid map `N^cols -> N^rows` given by a non-negative integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<u64>,
}

impl ClassMap {
    pub fn identity(rank: usize) -> Self {
        let mut entries = vec![0; rank * rank];
        for i in 0..rank {
            entries[i * rank + i] = 1;
        }
        ClassMap { rows: rank, cols: rank, entries }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Mismatch("ragged class map matrix".into()));
        }
        Ok(ClassMap { rows: rows.len(), cols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn is_identity(&self) -> bool {
        *self == ClassMap::identity(self.rows)
    }

    pub fn apply(&self, c: &CurveClass) -> CurveClass {
        assert_eq!(c.rank(), self.cols, "class rank does not match the class map");
        CurveClass(
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.entries[i * self.cols + j] * c.0[j]).sum()).collect(),
        )
    }

    /// `self` after `first`: the matrix product `self * first`.
    pub fn after(&self, first: &ClassMap) -> ClassMap {
        assert_eq!(self.cols, first.rows);
        let mut entries = vec![0; self.rows * first.cols];
        for i in 0..self.rows {
            for j in 0..first.cols {
                entries[i * first.cols + j] =
                    (0..self.cols).map(|k| self.entries[i * self.cols + k] * first.entries[k * first.cols + j]).sum();
            }
        }
        ClassMap { rows: self.rows, cols: first.cols, entries }
    }
}

/// A failed axiom of a morphism; `condition` is the number of the defining
/// condition, 0 for structural problems (sizes, ranges, bijectivity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismViolation {
    pub condition: u8,
    pub detail: String,
}

impl MorphismViolation {
    fn new(condition: u8, detail: impl Into<String>) -> Self {
        MorphismViolation { condition, detail: detail.into() }
    }
}

impl std::fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {}", self.condition, self.detail)
    }
}

pub(crate) fn into_result(v: Vec<MorphismViolation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidMorphism(v.iter().map(|x| x.to_string()).collect()))
    }
}

/// `(xi, a)`: flag and vertex maps from `source` to `target` together with
/// the class map `xi` from the target's classes to the source's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialMorphism {
    pub source: WGraph,
    pub target: WGraph,
    pub flag_map: Vec<usize>,
    pub vertex_map: Vec<usize>,
    pub xi: ClassMap,
}

impl CombinatorialMorphism {
    pub fn identity(g: &WGraph) -> Self {
        CombinatorialMorphism {
            source: g.clone(),
            target: g.clone(),
            flag_map: (0..g.flags.len()).collect(),
            vertex_map: (0..g.vertices.len()).collect(),
            xi: ClassMap::identity(g.rank()),
        }
    }

    /// `next` after `self`.
    pub fn then(&self, next: &CombinatorialMorphism) -> Result<CombinatorialMorphism> {
        if self.target != next.source {
            return Err(Error::Mismatch("combinatorial morphisms are not composable".into()));
        }
        Ok(CombinatorialMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            flag_map: self.flag_map.iter().map(|&f| next.flag_map[f]).collect(),
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            xi: self.xi.after(&next.xi),
        })
    }
}

/// Whether some chain of target edges leads from flag `start` to flag `end`
/// (`end` being the far flag of the last edge), passing only through
/// vertices accepted by `through`.
pub(crate) fn chain_exists(g: &WGraph, start: usize, end: usize, through: impl Fn(usize) -> bool) -> bool {
    if g.is_tail(start) {
        return false;
    }
    let mut seen = vec![false; g.flags.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        let p = g.flags[s].partner;
        if p == end {
            return true;
        }
        let u = g.flags[p].vertex;
        if !through(u) {
            continue;
        }
        for next in g.flags_at(u) {
            if next != p && !g.is_tail(next) && !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    false
}

pub fn validate_comb(m: &CombinatorialMorphism) -> Vec<MorphismViolation> {
    let (s, t) = (&m.source, &m.target);
    let mut out = Vec::new();
    if m.flag_map.len() != s.flags.len() || m.vertex_map.len() != s.vertices.len() {
        out.push(MorphismViolation::new(0, "map sizes do not match the source graph"));
        return out;
    }
    if m.flag_map.iter().any(|&f| f >= t.flags.len()) || m.vertex_map.iter().any(|&v| v >= t.vertices.len()) {
        out.push(MorphismViolation::new(0, "map values out of range"));
        return out;
    }
    if m.xi.cols != t.rank() || m.xi.rows != s.rank() {
        out.push(MorphismViolation::new(
            0,
            format!("class map is {}x{}, graphs have ranks {} and {}", m.xi.rows, m.xi.cols, s.rank(), t.rank()),
        ));
        return out;
    }

    for (f, fl) in s.flags.iter().enumerate() {
        if m.vertex_map[fl.vertex] != t.flags[m.flag_map[f]].vertex {
            out.push(MorphismViolation::new(1, format!("flag {f}: a_V(d f) != d a_F(f)")));
        }
    }

    let mut fibers: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (f, fl) in s.flags.iter().enumerate() {
        *fibers.entry((fl.vertex, m.flag_map[f])).or_insert_with(Rational::zero) += fl.weight.clone();
    }
    for ((v, tf), sum) in fibers {
        if sum > t.flags[tf].weight {
            out.push(MorphismViolation::new(
                2,
                format!("flags of vertex {v} over target flag {tf} weigh {sum} > {}", t.flags[tf].weight),
            ));
        }
    }

    let zero: Vec<bool> = t.vertices.iter().map(|v| m.xi.apply(&v.class).is_zero()).collect();
    for (f, fb) in s.edges() {
        if !chain_exists(t, m.flag_map[f], m.flag_map[fb], |u| zero[u]) {
            out.push(MorphismViolation::new(3, format!("edge {{{f}, {fb}}} does not map to a chain of edges")));
        }
    }

    for (v, vert) in s.vertices.iter().enumerate() {
        let w = &t.vertices[m.vertex_map[v]];
        if vert.class != m.xi.apply(&w.class) {
            out.push(MorphismViolation::new(4, format!("vertex {v}: class {} != xi({})", vert.class, w.class)));
        }
        if vert.genus != w.genus {
            out.push(MorphismViolation::new(5, format!("vertex {v}: genus {} != {}", vert.genus, w.genus)));
        }
    }
    out
}

/// Collapse of `source` onto `target`: `flag_inj` sends target flags into
/// the source, `vertex_surj` sends source vertices onto the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    pub source: WGraph,
    pub target: WGraph,
    pub flag_inj: Vec<usize>,
    pub vertex_surj: Vec<usize>,
}

impl Contraction {
    pub fn identity(g: &WGraph) -> Self {
        Contraction {
            source: g.clone(),
            target: g.clone(),
            flag_inj: (0..g.flags.len()).collect(),
            vertex_surj: (0..g.vertices.len()).collect(),
        }
    }

    /// Source flags outside the image, as edges `(f, j f)` with `f < j f`.
    pub fn contracted_edges(&self) -> Vec<(usize, usize)> {
        let mut hit = vec![false; self.source.flags.len()];
        for &f in &self.flag_inj {
            if f < hit.len() {
                hit[f] = true;
            }
        }
        self.source.edges().into_iter().filter(|&(a, b)| !hit[a] && !hit[b]).collect()
    }

    /// `next` after `self`.
    pub fn then(&self, next: &Contraction) -> Result<Contraction> {
        if self.target != next.source {
            return Err(Error::Mismatch("contractions are not composable".into()));
        }
        Ok(Contraction {
            source: self.source.clone(),
            target: next.target.clone(),
            flag_inj: next.flag_inj.iter().map(|&f| self.flag_inj[f]).collect(),
            vertex_surj: self.vertex_surj.iter().map(|&v| next.vertex_surj[v]).collect(),
        })
    }
}

/// Contracts the edges containing the given flags. Each connected piece of
/// the contracted subgraph becomes one vertex carrying the summed genus plus
/// its first Betti number and the summed class; new vertices are ordered by
/// their smallest old vertex and surviving flags keep their relative order.
pub fn contract_edges(g: &WGraph, edge_flags: &[usize]) -> Result<Contraction> {
    let mut contracted = vec![false; g.flags.len()];
    for &f in edge_flags {
        if f >= g.flags.len() || g.is_tail(f) {
            return Err(Error::NotAnEdge(f));
        }
        contracted[f] = true;
        contracted[g.flags[f].partner] = true;
    }
    let nv = g.vertices.len();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in g.edges() {
        if contracted[a] {
            let ra = find(&mut parent, g.flags[a].vertex);
            let rb = find(&mut parent, g.flags[b].vertex);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut new_id: BTreeMap<usize, usize> = BTreeMap::new();
    let vertex_surj: Vec<usize> = (0..nv)
        .map(|v| {
            let r = find(&mut parent, v);
            let next = new_id.len();
            *new_id.entry(r).or_insert(next)
        })
        .collect();
    let n_new = new_id.len();
    let mut genus = vec![0i64; n_new];
    let mut class = vec![CurveClass::zero(g.rank()); n_new];
    let mut size = vec![0i64; n_new];
    for (v, vert) in g.vertices.iter().enumerate() {
        let w = vertex_surj[v];
        genus[w] += vert.genus as i64;
        class[w] = class[w].add(&vert.class);
        size[w] += 1;
    }
    for (a, _) in g.edges() {
        if contracted[a] {
            genus[vertex_surj[g.flags[a].vertex]] += 1;
        }
    }
    // each piece is a tree plus b1 extra edges: add edges, remove vertices - 1
    for w in 0..n_new {
        genus[w] -= size[w] - 1;
    }
    let flag_inj: Vec<usize> = (0..g.flags.len()).filter(|&f| !contracted[f]).collect();
    let mut pos = vec![usize::MAX; g.flags.len()];
    for (i, &f) in flag_inj.iter().enumerate() {
        pos[f] = i;
    }
    let target = WGraph {
        profile: g.profile.clone(),
        vertices: (0..n_new).map(|w| Vertex { genus: genus[w] as u32, class: class[w].clone() }).collect(),
        flags: flag_inj
            .iter()
            .map(|&f| {
                let fl = &g.flags[f];
                Flag {
                    vertex: vertex_surj[fl.vertex],
                    partner: pos[fl.partner],
                    weight: fl.weight.clone(),
                    label: fl.label.clone(),
                }
            })
            .collect(),
    };
    Ok(Contraction { source: g.clone(), target, flag_inj, vertex_surj })
}

/// Structural part shared by contractions and isogenies: sizes, ranges,
/// injectivity, surjectivity, compatibility with the boundary maps, and
/// connectivity of each collapsed subgraph along the unmatched edges.
/// Returns the per-target-vertex contracted edge counts when sound.
pub(crate) fn check_collapse(
    source: &WGraph,
    target: &WGraph,
    flag_inj: &[usize],
    vertex_surj: &[usize],
    out: &mut Vec<MorphismViolation>,
) -> Option<Vec<i64>> {
    if source.profile != target.profile {
        out.push(MorphismViolation::new(0, "source and target have different target profiles"));
    }
    if flag_inj.len() != target.flags.len() || vertex_surj.len() != source.vertices.len() {
        out.push(MorphismViolation::new(0, "map sizes do not match the graphs"));
        return None;
    }
    if flag_inj.iter().any(|&f| f >= source.flags.len()) || vertex_surj.iter().any(|&v| v >= target.vertices.len()) {
        out.push(MorphismViolation::new(0, "map values out of range"));
        return None;
    }
    let mut hit = vec![false; source.flags.len()];
    for &f in flag_inj {
        if std::mem::replace(&mut hit[f], true) {
            out.push(MorphismViolation::new(0, format!("flag map not injective at source flag {f}")));
        }
    }
    let mut covered = vec![false; target.vertices.len()];
    for &w in vertex_surj {
        covered[w] = true;
    }
    if let Some(w) = covered.iter().position(|c| !c) {
        out.push(MorphismViolation::new(0, format!("vertex map misses target vertex {w}")));
    }
    if !out.is_empty() {
        return None;
    }
    for (f, fl) in target.flags.iter().enumerate() {
        if vertex_surj[source.flags[flag_inj[f]].vertex] != fl.vertex {
            out.push(MorphismViolation::new(1, format!("target flag {f}: boundary maps do not commute")));
        }
        if flag_inj[fl.partner] != source.flags[flag_inj[f]].partner {
            out.push(MorphismViolation::new(0, format!("target flag {f}: involutions do not commute")));
        }
    }
    let mut parent: Vec<usize> = (0..source.vertices.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut n_contracted = vec![0i64; target.vertices.len()];
    for (a, b) in source.edges() {
        if hit[a] || hit[b] {
            continue;
        }
        let (u, v) = (source.flags[a].vertex, source.flags[b].vertex);
        if vertex_surj[u] != vertex_surj[v] {
            out.push(MorphismViolation::new(0, format!("contracted edge {{{a}, {b}}} joins different fibers")));
            continue;
        }
        n_contracted[vertex_surj[u]] += 1;
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru.max(rv)] = ru.min(rv);
    }
    let mut roots: Vec<Option<usize>> = vec![None; target.vertices.len()];
    for v in 0..source.vertices.len() {
        let r = find(&mut parent, v);
        let w = vertex_surj[v];
        match roots[w] {
            None => roots[w] = Some(r),
            Some(r0) if r0 != r => {
                out.push(MorphismViolation::new(0, format!("collapsed subgraph over vertex {w} is disconnected")));
                roots[w] = Some(usize::MAX);
            }
            _ => {}
        }
    }
    Some(n_contracted)
}

/// Class and genus additivity over the collapsed subgraphs.
pub(crate) fn check_additivity(
    source: &WGraph,
    target: &WGraph,
    vertex_surj: &[usize],
    n_contracted: &[i64],
    genus_condition: u8,
    class_condition: u8,
    out: &mut Vec<MorphismViolation>,
) {
    let nt = target.vertices.len();
    let mut genus = vec![0i64; nt];
    let mut size = vec![0i64; nt];
    let mut class = vec![CurveClass::zero(source.rank()); nt];
    for (v, vert) in source.vertices.iter().enumerate() {
        let w = vertex_surj[v];
        genus[w] += vert.genus as i64;
        size[w] += 1;
        class[w] = class[w].add(&vert.class);
    }
    for (w, vert) in target.vertices.iter().enumerate() {
        if class[w] != vert.class {
            out.push(MorphismViolation::new(
                class_condition,
                format!("vertex {w}: class {} != sum {} of its preimage", vert.class, class[w]),
            ));
        }
        let b1 = n_contracted[w] - size[w] + 1;
        if vert.genus as i64 != genus[w] + b1 {
            out.push(MorphismViolation::new(
                genus_condition,
                format!("vertex {w}: genus {} != {} + h1 {}", vert.genus, genus[w], b1),
            ));
        }
    }
}

pub fn validate_contraction(c: &Contraction) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    let Some(n_contracted) = check_collapse(&c.source, &c.target, &c.flag_inj, &c.vertex_surj, &mut out) else {
        return out;
    };
    check_additivity(&c.source, &c.target, &c.vertex_surj, &n_contracted, 2, 1, &mut out);
    let hit: std::collections::HashSet<usize> = c.flag_inj.iter().copied().collect();
    for f in c.source.tails() {
        if !hit.contains(&f) {
            out.push(MorphismViolation::new(0, format!("source tail {f} is not in the image")));
        }
    }
    for f in c.target.tails() {
        let w = &c.source.flags[c.flag_inj[f]].weight;
        if *w != c.target.flags[f].weight {
            out.push(MorphismViolation::new(3, format!("tail {f}: weight {} != {w}", c.target.flags[f].weight)));
        }
    }
    out
}

/// A morphism `source -> target` of the category: `a: middle -> source`
/// (with its class map) and `phi: middle -> target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMorphism {
    pub a: CombinatorialMorphism,
    pub phi: Contraction,
}

/// Isomorphism invariant of a morphism with fixed ends.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorphismKey {
    xi: ClassMap,
    middle: CanonKey,
}

impl GraphMorphism {
    pub fn identity(g: &WGraph) -> Self {
        GraphMorphism { a: CombinatorialMorphism::identity(g), phi: Contraction::identity(g) }
    }

    pub fn from_contraction(c: Contraction) -> Self {
        GraphMorphism { a: CombinatorialMorphism::identity(&c.source), phi: c }
    }

    pub fn source(&self) -> &WGraph {
        &self.a.target
    }

    pub fn target(&self) -> &WGraph {
        &self.phi.target
    }

    pub fn middle(&self) -> &WGraph {
        &self.a.source
    }

    pub fn xi(&self) -> &ClassMap {
        &self.a.xi
    }

    /// Key under which two morphisms between the same ends are equal exactly
    /// when their middle graphs are isomorphic compatibly with both maps.
    pub fn canonical_key(&self) -> MorphismKey {
        let mid = self.middle();
        let vcolor: Vec<u64> = (0..mid.vertices.len())
            .map(|v| ((self.a.vertex_map[v] as u64) << 32) | self.phi.vertex_surj[v] as u64)
            .collect();
        let mut preimage = vec![0u64; mid.flags.len()];
        for (s, &f) in self.phi.flag_inj.iter().enumerate() {
            preimage[f] = s as u64 + 1;
        }
        let fcolor: Vec<u64> =
            (0..mid.flags.len()).map(|f| ((self.a.flag_map[f] as u64) << 32) | preimage[f]).collect();
        MorphismKey { xi: self.a.xi.clone(), middle: canonical_form_colored(mid, &vcolor, &fcolor).key }
    }

    pub fn same_as(&self, other: &GraphMorphism) -> bool {
        self.source() == other.source() && self.target() == other.target() && self.canonical_key() == other.canonical_key()
    }
}

pub fn validate_morphism(m: &GraphMorphism) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    if m.a.source != m.phi.source {
        out.push(MorphismViolation::new(0, "combinatorial part and contraction start at different graphs"));
        return out;
    }
    if !m.middle().is_stable() {
        out.push(MorphismViolation::new(0, "middle graph is not stable"));
    }
    for v in validate_comb(&m.a) {
        out.push(MorphismViolation { condition: v.condition, detail: format!("a: {}", v.detail) });
    }
    for v in validate_contraction(&m.phi) {
        out.push(MorphismViolation { condition: v.condition, detail: format!("phi: {}", v.detail) });
    }
    out
}
