//! Stabilization of weighted graphs by the three classical steps:
//!
//! 1. an unstable vertex forming a whole component is deleted;
//! 2. an unstable vertex with one edge loses itself and all its flags, the
//!    far flag of the edge becomes a weight-one tail (the vertex's own tails
//!    are dropped);
//! 3. an unstable vertex with two edges is removed and the two far flags are
//!    spliced into one edge.
//!
//! Each step removes at least one vertex and one flag, so `|V| + |F|`
//! strictly decreases. The reduction module has a different, tail-preserving
//! contraction; the two are not interchangeable.

use serde::Serialize;

use super::WGraph;
use crate::arith::{vertex_ample, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum StabilizationStep {
    /// Step 1: `vertex` and all of its flags (loops included) were deleted.
    RemoveComponent { vertex: usize, flags: Vec<usize> },
    /// Step 2: `vertex` with edge flag `edge_flag` was deleted; `new_tail`
    /// (the far flag) became a weight-one tail; `dropped_tails` were lost.
    Prune { vertex: usize, edge_flag: usize, new_tail: usize, dropped_tails: Vec<usize> },
    /// Step 3: `vertex` and its flags `removed` were deleted; `joined` now
    /// form an edge.
    Splice { vertex: usize, removed: [usize; 2], joined: [usize; 2] },
}

impl StabilizationStep {
    pub fn vertex(&self) -> usize {
        match self {
            StabilizationStep::RemoveComponent { vertex, .. }
            | StabilizationStep::Prune { vertex, .. }
            | StabilizationStep::Splice { vertex, .. } => *vertex,
        }
    }
}

/// Result of stabilization. Vertices and flags of `graph` are a subset of
/// the input's; `vertex_map` and `flag_map` send new indices to old ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    pub graph: WGraph,
    pub vertex_map: Vec<usize>,
    pub flag_map: Vec<usize>,
    pub trace: Vec<StabilizationStep>,
}

/// A graph part-way through stabilization, indexed like the input.
#[derive(Clone, Debug)]
pub struct StabilizationState {
    graph: WGraph,
    alive_v: Vec<bool>,
    alive_f: Vec<bool>,
    /// Ignore curve classes when judging stability.
    absolute: bool,
    trace: Vec<StabilizationStep>,
}

impl StabilizationState {
    pub fn new(graph: &WGraph, absolute: bool) -> Self {
        StabilizationState {
            graph: graph.clone(),
            alive_v: vec![true; graph.vertices.len()],
            alive_f: vec![true; graph.flags.len()],
            absolute,
            trace: Vec::new(),
        }
    }

    /// `|V| + |F|` of the live part.
    pub fn size(&self) -> usize {
        self.alive_v.iter().filter(|&&a| a).count() + self.alive_f.iter().filter(|&&a| a).count()
    }

    fn live_flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.graph.flags.len()).filter(|&f| self.alive_f[f] && self.graph.flags[f].vertex == v).collect()
    }

    fn unstable(&self, v: usize) -> bool {
        let ws: Vec<Rational> = self.live_flags_at(v).into_iter().map(|f| self.graph.flags[f].weight.clone()).collect();
        let vert = &self.graph.vertices[v];
        let class = if self.absolute { crate::arith::CurveClass::zero(vert.class.rank()) } else { vert.class.clone() };
        !vertex_ample(vert.genus, &ws, &class)
    }

    /// Every step applicable right now, by increasing vertex index.
    pub fn eligible(&self) -> Vec<StabilizationStep> {
        let mut out = Vec::new();
        for v in 0..self.graph.vertices.len() {
            if !self.alive_v[v] || !self.unstable(v) {
                continue;
            }
            let flags = self.live_flags_at(v);
            let g = &self.graph;
            let outgoing: Vec<usize> =
                flags.iter().copied().filter(|&f| g.flags[f].partner != f && g.flags[g.flags[f].partner].vertex != v).collect();
            let tails: Vec<usize> = flags.iter().copied().filter(|&f| g.flags[f].partner == f).collect();
            match outgoing.len() {
                0 => out.push(StabilizationStep::RemoveComponent { vertex: v, flags }),
                1 => {
                    let f0 = outgoing[0];
                    out.push(StabilizationStep::Prune {
                        vertex: v,
                        edge_flag: f0,
                        new_tail: g.flags[f0].partner,
                        dropped_tails: tails,
                    })
                }
                2 if flags.len() == 2 => out.push(StabilizationStep::Splice {
                    vertex: v,
                    removed: [outgoing[0], outgoing[1]],
                    joined: [g.flags[outgoing[0]].partner, g.flags[outgoing[1]].partner],
                }),
                // an unstable vertex has total weight at most 2, so the
                // cases above are exhaustive
                _ => unreachable!("unstable vertex {v} with {} outgoing edges", outgoing.len()),
            }
        }
        out
    }

    pub fn apply(&mut self, step: StabilizationStep) {
        let before = self.size();
        match &step {
            StabilizationStep::RemoveComponent { vertex, flags } => {
                self.alive_v[*vertex] = false;
                for &f in flags {
                    self.alive_f[f] = false;
                }
            }
            StabilizationStep::Prune { vertex, edge_flag, new_tail, dropped_tails } => {
                self.alive_v[*vertex] = false;
                self.alive_f[*edge_flag] = false;
                for &f in dropped_tails {
                    self.alive_f[f] = false;
                }
                let t = &mut self.graph.flags[*new_tail];
                t.partner = *new_tail;
                t.weight = Rational::one();
            }
            StabilizationStep::Splice { vertex, removed, joined } => {
                self.alive_v[*vertex] = false;
                for &f in removed {
                    self.alive_f[f] = false;
                }
                self.graph.flags[joined[0]].partner = joined[1];
                self.graph.flags[joined[1]].partner = joined[0];
            }
        }
        debug_assert!(self.size() < before, "stabilization step must shrink |V| + |F|");
        self.trace.push(step);
    }

    pub fn finish(self) -> Stabilized {
        let vertex_map: Vec<usize> = (0..self.alive_v.len()).filter(|&v| self.alive_v[v]).collect();
        let flag_map: Vec<usize> = (0..self.alive_f.len()).filter(|&f| self.alive_f[f]).collect();
        let graph = self.graph.restrict(&vertex_map, &flag_map);
        Stabilized { graph, vertex_map, flag_map, trace: self.trace }
    }
}

/// Stabilization, always applying the eligible step at the lowest vertex.
pub fn stabilize(g: &WGraph) -> Stabilized {
    stabilize_with(g, false)
}

/// With `absolute`, curve classes are ignored when judging stability (the
/// classes themselves are kept on surviving vertices).
pub fn stabilize_with(g: &WGraph, absolute: bool) -> Stabilized {
    let mut state = StabilizationState::new(g, absolute);
    while let Some(step) = state.eligible().into_iter().next() {
        state.apply(step);
    }
    state.finish()
}

/// Results of every possible order of steps, for confluence checks. Stops
/// exploring after `limit` complete runs.
pub fn all_step_orders(g: &WGraph, absolute: bool, limit: usize) -> Vec<Stabilized> {
    fn go(state: StabilizationState, out: &mut Vec<Stabilized>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let steps = state.eligible();
        if steps.is_empty() {
            out.push(state.finish());
            return;
        }
        for s in steps {
            let mut next = state.clone();
            next.apply(s);
            go(next, out, limit);
        }
    }
    let mut out = Vec::new();
    go(StabilizationState::new(g, absolute), &mut out, limit);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{CurveClass, TargetProfile};

    fn z() -> CurveClass {
        CurveClass::zero(0)
    }

    fn tripod_at(g: &mut WGraph, v: usize, n: usize) {
        for _ in 0..n {
            g.add_tail(v, Rational::one());
        }
    }

    #[test]
    fn stable_input_is_a_fixed_point() {
        let mut g = WGraph::new(TargetProfile::point());
        let v = g.add_vertex(0, z());
        tripod_at(&mut g, v, 3);
        let s = stabilize(&g);
        assert_eq!(s.graph, g);
        assert!(s.trace.is_empty());
    }

    #[test]
    fn chain_middle_vertex_is_spliced() {
        let mut g = WGraph::new(TargetProfile::point());
        let v1 = g.add_vertex(1, z());
        let v2 = g.add_vertex(0, z());
        let v3 = g.add_vertex(1, z());
        let (_, a) = g.add_edge(v1, v2);
        let (b, _) = g.add_edge(v2, v3);
        let s = stabilize(&g);
        assert_eq!(s.graph.vertices.len(), 2);
        assert_eq!(s.graph.edges().len(), 1);
        assert!(matches!(s.trace[..], [StabilizationStep::Splice { vertex: 1, removed, .. }] if removed == [a, b]));
        assert!(s.graph.is_stable());
    }

    #[test]
    fn pruning_drops_the_tails_of_the_removed_vertex() {
        let mut g = WGraph::new(TargetProfile::point());
        let v1 = g.add_vertex(0, z());
        let v2 = g.add_vertex(0, z());
        let half = g.add_tail(v1, Rational::new(1, 2));
        let (_, far) = g.add_edge(v1, v2);
        tripod_at(&mut g, v2, 2);
        let s = stabilize(&g);
        assert_eq!(s.graph.vertices.len(), 1);
        assert_eq!(s.graph.tails().len(), 3);
        assert!(s.graph.flags.iter().all(|f| f.weight.is_one()));
        assert_eq!(
            s.trace,
            vec![StabilizationStep::Prune { vertex: v1, edge_flag: 1, new_tail: far, dropped_tails: vec![half] }]
        );
    }

    #[test]
    fn whole_unstable_component_disappears() {
        let mut g = WGraph::new(TargetProfile::point());
        let v = g.add_vertex(0, z());
        g.add_edge(v, v);
        let s = stabilize(&g);
        assert!(s.graph.vertices.is_empty() && s.graph.flags.is_empty());
    }

    #[test]
    fn absolute_mode_ignores_classes() {
        let mut g = WGraph::new(TargetProfile::projective(2));
        let a = g.add_vertex(0, CurveClass(vec![1]));
        let b = g.add_vertex(0, CurveClass(vec![0]));
        g.add_edge(a, b);
        for _ in 0..3 {
            g.add_tail(b, Rational::one());
        }
        assert!(stabilize(&g).trace.is_empty());
        let abs = stabilize_with(&g, true);
        assert_eq!(abs.graph.vertices.len(), 1);
        assert_eq!(abs.vertex_map, vec![b]);
    }
}
