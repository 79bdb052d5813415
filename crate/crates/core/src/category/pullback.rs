//! Stable pullback of a combinatorial morphism along a contraction, and the
//! composition law it induces.

use super::{
    contract_edges, into_result, validate_comb, validate_contraction, CombinatorialMorphism, Contraction, GraphMorphism,
};
use crate::arith::{vertex_ample, Rational};
use crate::error::{Error, Result};
use crate::graph::{Vertex, WGraph};

/// `psi: graph -> rho` and `b: graph -> sigma` completing the square over
/// `a: rho -> tau` and `phi: sigma -> tau`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub graph: WGraph,
    pub psi: Contraction,
    pub b: CombinatorialMorphism,
}

/// Splits `phi` into contractions of at most one edge each, loops of the
/// source first and then edges by increasing flag. The last step lands on
/// `phi.target` itself.
fn factor(phi: &Contraction) -> Result<Vec<Contraction>> {
    let sigma = &phi.source;
    let mut edges = phi.contracted_edges();
    edges.sort_by_key(|&(f, _)| (!sigma.is_loop(f), f));
    if edges.is_empty() {
        return Ok(vec![phi.clone()]);
    }
    let mut steps = Vec::new();
    let mut current = sigma.clone();
    // position of each sigma flag in `current`, and image of each sigma vertex
    let mut pos: Vec<usize> = (0..sigma.flags.len()).collect();
    let mut comp: Vec<usize> = (0..sigma.vertices.len()).collect();
    for &(f, _) in &edges[..edges.len() - 1] {
        let c = contract_edges(&current, &[pos[f]])?;
        let mut inv = vec![usize::MAX; current.flags.len()];
        for (i, &old) in c.flag_inj.iter().enumerate() {
            inv[old] = i;
        }
        for p in pos.iter_mut() {
            if *p != usize::MAX {
                *p = inv[*p];
            }
        }
        for w in comp.iter_mut() {
            *w = c.vertex_surj[*w];
        }
        current = c.target.clone();
        steps.push(c);
    }
    let mut vertex_surj = vec![usize::MAX; current.vertices.len()];
    for (w, &u) in comp.iter().enumerate() {
        vertex_surj[u] = phi.vertex_surj[w];
    }
    steps.push(Contraction {
        source: current,
        target: phi.target.clone(),
        flag_inj: phi.flag_inj.iter().map(|&f| pos[f]).collect(),
        vertex_surj,
    });
    Ok(steps)
}

/// Pullback along a contraction of at most one edge.
fn elementary(a: &CombinatorialMorphism, phi: &Contraction) -> Pullback {
    let rho = &a.source;
    let sigma = &phi.source;
    let contracted = phi.contracted_edges();
    let mut pre = vec![usize::MAX; phi.target.vertices.len()];
    for (w, &u) in phi.vertex_surj.iter().enumerate() {
        if pre[u] == usize::MAX {
            pre[u] = w;
        }
    }
    let mut pi = rho.clone();
    let mut b_vertex: Vec<usize> = a.vertex_map.iter().map(|&u| pre[u]).collect();
    let mut b_flag: Vec<usize> = a.flag_map.iter().map(|&t| phi.flag_inj[t]).collect();
    let mut psi_vertex: Vec<usize> = (0..rho.vertices.len()).collect();

    if let Some(&(f, fb)) = contracted.first() {
        let v1 = sigma.flags[f].vertex;
        let v2 = sigma.flags[fb].vertex;
        let v = phi.vertex_surj[v1];
        for w in 0..rho.vertices.len() {
            if a.vertex_map[w] != v {
                continue;
            }
            if v1 == v2 {
                let (l, lb) = pi.add_edge(w, w);
                pi.vertices[w].genus -= 1;
                b_vertex[w] = v1;
                b_flag.extend([f, fb]);
                debug_assert_eq!((l, lb), (b_flag.len() - 2, b_flag.len() - 1));
                continue;
            }
            let flags = rho.flags_at(w);
            let on_first: Vec<bool> = flags.iter().map(|&x| sigma.flags[b_flag[x]].vertex == v1).collect();
            let side = |first: bool, vi: usize| {
                let mut ws: Vec<Rational> =
                    flags.iter().zip(&on_first).filter(|(_, &s)| s == first).map(|(&x, _)| rho.flags[x].weight.clone()).collect();
                ws.push(Rational::one());
                let class = a.xi.apply(&sigma.vertices[vi].class);
                vertex_ample(sigma.vertices[vi].genus, &ws, &class)
            };
            let (stable1, stable2) = (side(true, v1), side(false, v2));
            if stable1 && stable2 {
                let w2 = pi.add_vertex(sigma.vertices[v2].genus, a.xi.apply(&sigma.vertices[v2].class));
                pi.vertices[w] = Vertex { genus: sigma.vertices[v1].genus, class: a.xi.apply(&sigma.vertices[v1].class) };
                for (&x, &first) in flags.iter().zip(&on_first) {
                    if !first {
                        pi.flags[x].vertex = w2;
                    }
                }
                pi.add_edge(w, w2);
                b_vertex[w] = v1;
                b_vertex.push(v2);
                b_flag.extend([f, fb]);
                psi_vertex.push(w);
            } else {
                // the unstable half folds back onto the contracted edge
                let (keep, edge_flag) = if stable1 { (true, f) } else { (false, fb) };
                b_vertex[w] = if keep { v1 } else { v2 };
                for (&x, &first) in flags.iter().zip(&on_first) {
                    if first != keep {
                        b_flag[x] = edge_flag;
                    }
                }
            }
        }
    }

    let psi = Contraction {
        source: pi.clone(),
        target: rho.clone(),
        flag_inj: (0..rho.flags.len()).collect(),
        vertex_surj: psi_vertex,
    };
    let b = CombinatorialMorphism {
        source: pi.clone(),
        target: sigma.clone(),
        flag_map: b_flag,
        vertex_map: b_vertex,
        xi: a.xi.clone(),
    };
    Pullback { graph: pi, psi, b }
}

/// Stable pullback of `a: rho -> tau` under `phi: sigma -> tau`, built one
/// elementary contraction at a time starting next to `tau`.
pub fn stable_pullback(a: &CombinatorialMorphism, phi: &Contraction) -> Result<Pullback> {
    if a.target != phi.target {
        return Err(Error::Mismatch("morphism and contraction do not share a target".into()));
    }
    into_result(validate_comb(a))?;
    into_result(validate_contraction(phi))?;
    let mut current = a.clone();
    let mut psi = Contraction::identity(&a.source);
    for step in factor(phi)?.iter().rev() {
        let pb = elementary(&current, step);
        psi = pb.psi.then(&psi)?;
        current = pb.b;
    }
    Ok(Pullback { graph: current.source.clone(), psi, b: current })
}

/// `m2 after m1`, through the stable pullback of `m2`'s middle graph under
/// `m1`'s contraction.
pub fn compose(m2: &GraphMorphism, m1: &GraphMorphism) -> Result<GraphMorphism> {
    if m1.target() != m2.source() {
        return Err(Error::Mismatch("morphisms are not composable".into()));
    }
    let pb = stable_pullback(&m2.a, &m1.phi)?;
    Ok(GraphMorphism { a: pb.b.then(&m1.a)?, phi: pb.psi.then(&m2.phi)? })
}

