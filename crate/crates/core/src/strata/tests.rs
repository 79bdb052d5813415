use std::collections::BTreeSet;

use super::*;
use crate::arith::{Rational, TargetProfile};
use crate::graph::is_isomorphic;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

fn query(genus: u32, ws: &[(i64, i64)], beta: Vec<u64>, profile: TargetProfile, max_edges: usize) -> StrataQuery {
    StrataQuery {
        genus_total: genus,
        weights: WeightData::from_weights(ws.iter().map(|&(p, d)| q(p, d)).collect()).unwrap(),
        beta_total: CurveClass(beta),
        profile,
        max_edges,
    }
}

fn tripod(max_edges: usize) -> StrataQuery {
    query(0, &[(1, 1), (1, 1), (1, 1)], vec![], TargetProfile::point(), max_edges)
}

#[test]
fn tripod_has_one_stratum() {
    assert_eq!(enumerate_strata(&tripod(0)).unwrap().len(), 1);
    assert_eq!(enumerate_strata(&tripod(1)).unwrap().len(), 1);
}

#[test]
fn inadmissible_query_is_rejected() {
    let bad = query(0, &[(1, 2), (1, 2)], vec![], TargetProfile::point(), 1);
    assert!(matches!(enumerate_strata(&bad), Err(Error::Inadmissible(_))));
}

/// Two-vertex strata over a one-edge budget, from tail partitions and class
/// splittings, as unordered pairs of sides.
fn one_edge_oracle(qr: &StrataQuery) -> usize {
    let n = qr.weights.len();
    let mut seen = BTreeSet::new();
    for mask in 0u64..(1 << n) {
        for c1 in qr.beta_total.below() {
            let c2 = qr.beta_total.checked_sub(&c1).unwrap();
            let side = |m: u64, c: &CurveClass| {
                let mut ws: Vec<Rational> = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| qr.weights.weight(i).clone()).collect();
                ws.push(Rational::one());
                vertex_ample(0, &ws, c)
            };
            let full = (1u64 << n) - 1;
            if side(mask, &c1) && side(full & !mask, &c2) {
                let a = (mask, c1.0.clone());
                let b = (full & !mask, c2.0.clone());
                seen.insert(if a <= b { (a, b) } else { (b, a) });
            }
        }
    }
    1 + seen.len()
}

#[test]
fn thirds_in_the_plane_match_partition_oracle() {
    let qr = query(0, &[(1, 3), (1, 3), (1, 3)], vec![1], TargetProfile::projective(2), 1);
    assert_eq!(enumerate_strata(&qr).unwrap().len(), one_edge_oracle(&qr));
    for ws in [[(1, 1), (1, 1), (1, 1), (1, 1)], [(1, 1), (1, 2), (1, 2), (1, 3)]] {
        for beta in [vec![0], vec![1], vec![2]] {
            let qr = query(0, &ws, beta, TargetProfile::projective(1), 1);
            assert_eq!(enumerate_strata(&qr).unwrap().len(), one_edge_oracle(&qr), "{ws:?}");
        }
    }
}

#[test]
fn codim_and_vdim_track_edges() {
    let qr = query(0, &[(1, 1), (1, 1), (1, 2), (1, 2), (1, 1)], vec![1], TargetProfile::projective(2), 2);
    let strata = enumerate_strata(&qr).unwrap();
    let top = qr.top().stats().vdim;
    let mut last = 0;
    for s in &strata {
        let st = s.stats();
        assert!(s.is_stable() && s.is_connected());
        assert_eq!(st.vdim, top - st.n_edges as i64);
        assert!(st.n_edges >= last);
        last = st.n_edges;
    }
    for (i, a) in strata.iter().enumerate() {
        for b in &strata[i + 1..] {
            assert!(!is_isomorphic(a, b));
        }
    }
}

#[test]
fn genus_one_with_a_tail() {
    let qr = query(1, &[(1, 1)], vec![], TargetProfile::point(), 1);
    let strata = enumerate_strata(&qr).unwrap();
    assert_eq!(strata.len(), 2);
    assert!(strata[1].is_loop(strata[1].edges()[0].0));
}

#[test]
fn poset_examples() {
    let single = enumerate_strata(&tripod(1)).unwrap();
    assert!(contraction_poset(&single).covers.is_empty());

    let qr = query(0, &[(1, 1); 4], vec![], TargetProfile::point(), 1);
    let top = canonical_form(&qr.top()).graph;
    let mut two = WGraph::new(TargetProfile::point());
    let a = two.add_vertex(0, CurveClass(vec![]));
    let b = two.add_vertex(0, CurveClass(vec![]));
    for (v, l) in [(a, "1"), (a, "2"), (b, "3"), (b, "4")] {
        two.add_labeled_tail(v, Rational::one(), l);
    }
    two.add_edge(a, b);
    let poset = contraction_poset(&[two.clone(), top]);
    assert_eq!(poset.covers.len(), 1);
    let c = &poset.covers[0];
    assert_eq!((c.upper, c.lower), (0, 1));
    assert_eq!(poset.nodes[c.lower].stats().vdim - poset.nodes[c.upper].stats().vdim, 1);
    assert!(poset.to_dot().contains("s0 -> s1"));
    assert!(poset.to_dot().contains("label=\"1/0\""));
}

#[test]
fn diamond_contractions_agree() {
    let mut chain = WGraph::new(TargetProfile::point());
    let vs: Vec<usize> = (0..3).map(|_| chain.add_vertex(0, CurveClass(vec![]))).collect();
    let (e1, _) = chain.add_edge(vs[0], vs[1]);
    let (e2, _) = chain.add_edge(vs[1], vs[2]);
    for (v, l) in [(0, "1"), (0, "2"), (1, "3"), (2, "4"), (2, "5")] {
        chain.add_labeled_tail(vs[v], Rational::one(), l);
    }
    let first = contract_edges(&chain, &[e1]).unwrap();
    let left = contract_edges(&first.target, &[first.flag_inj.iter().position(|&f| f == e2).unwrap()]).unwrap();
    let second = contract_edges(&chain, &[e2]).unwrap();
    let right = contract_edges(&second.target, &[second.flag_inj.iter().position(|&f| f == e1).unwrap()]).unwrap();
    assert_eq!(canonical_form(&left.target).key, canonical_form(&right.target).key);
    assert_eq!(left.target.vertices.len(), 1);

    let qr = query(0, &[(1, 1); 5], vec![], TargetProfile::point(), 2);
    let strata = enumerate_strata(&qr).unwrap();
    let poset = contraction_poset(&strata);
    for c in &poset.covers {
        assert!(validate_contraction(&c.contraction).is_empty());
        assert_eq!(c.contraction.source, poset.nodes[c.upper]);
        assert_eq!(c.contraction.target, poset.nodes[c.lower]);
        assert_eq!(poset.nodes[c.upper].edges().len(), poset.nodes[c.lower].edges().len() + 1);
    }
    let chain_idx = strata.iter().position(|s| is_isomorphic(s, &chain)).unwrap();
    let downs: Vec<usize> = poset.covers.iter().filter(|c| c.upper == chain_idx).map(|c| c.lower).collect();
    assert_eq!(downs.len(), 2);
    let top_paths: BTreeSet<usize> = downs
        .iter()
        .flat_map(|&d| poset.covers.iter().filter(move |c| c.upper == d).map(|c| c.lower))
        .collect();
    assert_eq!(top_paths, BTreeSet::from([0]));
}

#[test]
fn chamber_diff_examples() {
    let qr = query(0, &[(1, 1); 4], vec![], TargetProfile::point(), 1);
    let a = qr.weights.clone();
    let near = WeightData::from_weights(vec![q(9, 10); 4]).unwrap();
    let d = chamber_diff(&qr, &a, &near).unwrap();
    assert!(d.is_identity());
    assert_eq!(d.sources.len(), 4);

    let b = WeightData::from_weights(vec![q(1, 1), q(1, 1), q(1, 2), q(1, 2)]).unwrap();
    let d = chamber_diff(&qr, &a, &b).unwrap();
    let top = d.sources.iter().position(|s| s.vertices.len() == 1).unwrap();
    let dij = d
        .sources
        .iter()
        .position(|s| {
            s.vertices.len() == 2 && {
                let t3 = s.tail_with_label("3").unwrap();
                let t4 = s.tail_with_label("4").unwrap();
                s.flags[t3].vertex == s.flags[t4].vertex && s.flags_at(s.flags[t3].vertex).len() == 3
            }
        })
        .unwrap();
    assert_eq!(d.entries[dij].image, d.entries[top].image);
    assert!(d.entries[dij].contracted);
    assert_eq!(d.contracted(), BTreeSet::from([dij]));

    let empty = chamber_diff_of(&[], &b).unwrap();
    assert!(empty.entries.is_empty() && empty.images.is_empty());

    assert_eq!(chamber_diff(&qr, &b, &a).unwrap_err(), Error::Incomparable);
}
