//! Canonical representatives of weighted graphs up to isomorphism.
//!
//! Vertices are partitioned by iterated color refinement; ties are broken by
//! individualizing each candidate of the first non-singleton cell in turn.
//! Every discrete ordering yields an encoding (vertex data in order plus the
//! sorted multiset of flag descriptors) and the smallest encoding wins. The
//! search is exponential in the worst case, which is fine for graphs with a
//! few dozen flags. Optional vertex and flag colors let callers canonicalize
//! decorated graphs such as morphism data.

use std::collections::{BTreeMap, HashMap};

use super::{Flag, Vertex, WGraph};
use crate::arith::{CurveClass, Rational, TargetProfile};

/// Descriptor of one flag relative to a vertex ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct FlagDesc {
    vertex: usize,
    weight: Rational,
    label: Option<String>,
    color: u64,
    /// `(vertex, color)` of the partner; `None` for tails.
    partner: Option<(usize, u64)>,
}

/// Complete isomorphism invariant of a (decorated) graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonKey {
    profile: TargetProfile,
    vertices: Vec<(u32, CurveClass, u64)>,
    flags: Vec<FlagDesc>,
}

/// Canonical graph plus the relabeling that produced it.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub graph: WGraph,
    /// Old vertex index to canonical index.
    pub vertex_perm: Vec<usize>,
    /// Old flag index to canonical index.
    pub flag_perm: Vec<usize>,
    pub key: CanonKey,
}

pub fn canonical_form(g: &WGraph) -> Canonical {
    canonical_form_colored(g, &vec![0; g.vertices.len()], &vec![0; g.flags.len()])
}

pub fn is_isomorphic(a: &WGraph, b: &WGraph) -> bool {
    canonical_form(a).key == canonical_form(b).key
}

/// Canonical form where isomorphisms must also preserve the given colors.
pub fn canonical_form_colored(g: &WGraph, vcolor: &[u64], fcolor: &[u64]) -> Canonical {
    assert_eq!(vcolor.len(), g.vertices.len());
    assert_eq!(fcolor.len(), g.flags.len());
    let n = g.vertices.len();
    let mut flags_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in g.flags.iter().enumerate() {
        flags_at[f.vertex].push(i);
    }

    // initial colors from local data
    let local: Vec<_> = (0..n)
        .map(|v| {
            let mut fl: Vec<_> = flags_at[v]
                .iter()
                .map(|&f| {
                    let fd = &g.flags[f];
                    let partner = (fd.partner != f).then(|| (fcolor[fd.partner], g.flags[fd.partner].vertex == v));
                    (fd.weight.clone(), fd.label.clone(), fcolor[f], partner)
                })
                .collect();
            fl.sort();
            (g.vertices[v].genus, g.vertices[v].class.clone(), vcolor[v], fl)
        })
        .collect();
    let colors = rank(&local);
    let colors = refine(g, &flags_at, fcolor, colors);

    let mut best: Option<(CanonKey, Vec<usize>)> = None;
    search(g, &flags_at, vcolor, fcolor, colors, &mut best);
    let (key, order) = best.expect("search visits at least one leaf");
    build(g, fcolor, &order, key)
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items.iter().map(|x| sorted.binary_search(x).expect("present")).collect()
}

fn refine(g: &WGraph, flags_at: &[Vec<usize>], fcolor: &[u64], mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let sig: Vec<_> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(u64, u64, usize)> = flags_at[v]
                    .iter()
                    .filter(|&&f| g.flags[f].partner != f)
                    .map(|&f| {
                        let p = g.flags[f].partner;
                        (fcolor[f], fcolor[p], colors[g.flags[p].vertex])
                    })
                    .collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&sig);
        let before = colors.iter().collect::<std::collections::HashSet<_>>().len();
        let after = next.iter().collect::<std::collections::HashSet<_>>().len();
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn search(
    g: &WGraph,
    flags_at: &[Vec<usize>],
    vcolor: &[u64],
    fcolor: &[u64],
    colors: Vec<usize>,
    best: &mut Option<(CanonKey, Vec<usize>)>,
) {
    let n = colors.len();
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        cells.entry(colors[v]).or_default().push(v);
    }
    match cells.values().find(|c| c.len() > 1) {
        None => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| colors[v]);
            let key = encode(g, vcolor, fcolor, &order);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                *best = Some((key, order));
            }
        }
        Some(cell) => {
            let cell = cell.clone();
            for &v in &cell {
                // individualize v: it sorts first within its cell
                let bumped: Vec<(usize, usize)> =
                    (0..n).map(|u| (colors[u], usize::from(u != v || colors[u] != colors[v]))).collect();
                let indiv = rank(&bumped);
                let refined = refine(g, flags_at, fcolor, indiv);
                search(g, flags_at, vcolor, fcolor, refined, best);
            }
        }
    }
}

fn encode(g: &WGraph, vcolor: &[u64], fcolor: &[u64], order: &[usize]) -> CanonKey {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let vertices =
        order.iter().map(|&v| (g.vertices[v].genus, g.vertices[v].class.clone(), vcolor[v])).collect();
    let mut flags: Vec<FlagDesc> = (0..g.flags.len()).map(|f| describe(g, fcolor, &pos, f)).collect();
    flags.sort();
    CanonKey { profile: g.profile.clone(), vertices, flags }
}

fn describe(g: &WGraph, fcolor: &[u64], pos: &[usize], f: usize) -> FlagDesc {
    let fd = &g.flags[f];
    FlagDesc {
        vertex: pos[fd.vertex],
        weight: fd.weight.clone(),
        label: fd.label.clone(),
        color: fcolor[f],
        partner: (fd.partner != f).then(|| (pos[g.flags[fd.partner].vertex], fcolor[fd.partner])),
    }
}

/// Lays out the canonical graph: flags in descriptor order, and parallel
/// flags with equal descriptors paired position by position.
fn build(g: &WGraph, fcolor: &[u64], order: &[usize], key: CanonKey) -> Canonical {
    let mut vertex_perm = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        vertex_perm[v] = i;
    }
    let nf = g.flags.len();
    let descs: Vec<FlagDesc> = (0..nf).map(|f| describe(g, fcolor, &vertex_perm, f)).collect();

    // positions available for each descriptor, in canonical order
    let mut slots: HashMap<&FlagDesc, std::collections::VecDeque<usize>> = HashMap::new();
    for (i, d) in key.flags.iter().enumerate() {
        slots.entry(d).or_default().push_back(i);
    }
    let mut flag_perm = vec![usize::MAX; nf];
    for f in 0..nf {
        if flag_perm[f] != usize::MAX {
            continue;
        }
        let slot = slots.get_mut(&descs[f]).and_then(|q| q.pop_front()).expect("descriptor slot");
        flag_perm[f] = slot;
        let p = g.flags[f].partner;
        if p != f {
            let pslot = slots.get_mut(&descs[p]).and_then(|q| q.pop_front()).expect("partner slot");
            flag_perm[p] = pslot;
        }
    }

    let mut flags: Vec<Option<Flag>> = vec![None; nf];
    for f in 0..nf {
        let fd = &g.flags[f];
        flags[flag_perm[f]] = Some(Flag {
            vertex: vertex_perm[fd.vertex],
            partner: flag_perm[fd.partner],
            weight: fd.weight.clone(),
            label: fd.label.clone(),
        });
    }
    let graph = WGraph {
        profile: g.profile.clone(),
        vertices: order.iter().map(|&v| Vertex { genus: g.vertices[v].genus, class: g.vertices[v].class.clone() }).collect(),
        flags: flags.into_iter().map(|f| f.expect("every slot filled")).collect(),
    };
    Canonical { graph, vertex_perm, flag_perm, key }
}
