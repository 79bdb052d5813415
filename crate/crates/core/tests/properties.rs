mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use wsm_core::arith::{CurveClass, TargetProfile};
use wsm_core::category::{compose, contract_edges, validate_contraction, GraphMorphism};
use wsm_core::chambers::{walls_between, walls_through, WallKind};
use wsm_core::cli::{parse_graph, serialize_graph};
use wsm_core::graph::{canonical_form, Flag, Vertex, WGraph};
use wsm_core::reduction::{reduce_graph, reduction_path};
use wsm_core::strata::StrataQuery;

fn relabel(g: &WGraph, rng: &mut ChaCha8Rng) -> WGraph {
    let mut vp: Vec<usize> = (0..g.vertices.len()).collect();
    let mut fp: Vec<usize> = (0..g.flags.len()).collect();
    vp.shuffle(rng);
    fp.shuffle(rng);
    let mut vertices = vec![None; vp.len()];
    for (v, &to) in vp.iter().enumerate() {
        vertices[to] = Some(Vertex { genus: g.vertices[v].genus, class: g.vertices[v].class.clone() });
    }
    let mut flags = vec![None; fp.len()];
    for (f, &to) in fp.iter().enumerate() {
        let fl = &g.flags[f];
        flags[to] = Some(Flag { vertex: vp[fl.vertex], partner: fp[fl.partner], weight: fl.weight.clone(), label: fl.label.clone() });
    }
    WGraph {
        profile: g.profile.clone(),
        vertices: vertices.into_iter().map(Option::unwrap).collect(),
        flags: flags.into_iter().map(Option::unwrap).collect(),
    }
}

fn stratum(seed: u64) -> WGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qr = StrataQuery {
        genus_total: (seed % 2) as u32,
        weights: weights(&[q(1, 1), q(1, 2), q(1, 2), q(2, 3)]),
        beta_total: CurveClass(vec![seed % 3]),
        profile: TargetProfile::projective(2),
        max_edges: 0,
    };
    random_stratum(&mut rng, &qr, (seed % 4) as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_numbering(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5, 12);
        let h = relabel(&g, &mut rng);
        let (cg, ch) = (canonical_form(&g), canonical_form(&h));
        prop_assert_eq!(&cg.key, &ch.key);
        prop_assert_eq!(&cg.graph, &ch.graph);
        prop_assert_eq!(canonical_form(&cg.graph).graph, cg.graph);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6, 14);
        let text = serialize_graph(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn path_midpoints_avoid_walls(a in proptest::collection::vec(1i64..=12, 2..6), cut in proptest::collection::vec(1i64..=12, 6)) {
        let a: Vec<_> = a.iter().map(|&k| q(k, 12)).collect();
        let b: Vec<_> = a.iter().zip(&cut).map(|(w, &c)| w * &q(c, 12)).collect();
        let (a, b) = (weights(&a), weights(&b));
        let path = reduction_path(&a, &b).unwrap();
        let separating = walls_between(&a, &b, WallKind::Fine).unwrap();
        for masks in path.crossed_walls.values() {
            for m in masks {
                prop_assert!(separating.contains(m) || b.subset_sum(*m).is_one());
            }
        }
        let lambdas = path.lambdas();
        for w in lambdas.windows(2) {
            let mid = path.weights_at(&w[0].midpoint(&w[1]));
            for m in walls_through(&mid, WallKind::Fine) {
                prop_assert!(a.subset_sum(m).is_one() && b.subset_sum(m).is_one());
            }
        }
    }

    #[test]
    fn reducing_twice_matches_once(seed in any::<u64>(), k1 in 1i64..=6, k2 in 1i64..=6) {
        let g = stratum(seed);
        let a = g.tail_weights().unwrap();
        let scale = |w: &wsm_core::arith::WeightData, k: i64| {
            let ws: Vec<_> = w.weights().iter().enumerate().map(|(i, x)| if i == 0 { x.clone() } else { x * &q(k, 6) }).collect();
            wsm_core::arith::WeightData::new(w.labels().iter().cloned().zip(ws).collect()).unwrap()
        };
        let b = scale(&a, k1);
        let c = scale(&b, k2);
        let once = reduce_graph(&g, &c);
        let twice = reduce_graph(&g, &b).and_then(|m| reduce_graph(&m, &c));
        match (once, twice) {
            (Ok(x), Ok(y)) => prop_assert_eq!(canonical_form(&x).key, canonical_form(&y).key),
            (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
        }
    }

    #[test]
    fn contractions_compose_with_identities(seed in any::<u64>()) {
        let g = stratum(seed);
        if let Some(&(f, _)) = g.edges().first() {
            let c = contract_edges(&g, &[f]).unwrap();
            prop_assert!(validate_contraction(&c).is_empty());
            let m = GraphMorphism::from_contraction(c.clone());
            prop_assert!(compose(&GraphMorphism::identity(&c.target), &m).unwrap().same_as(&m));
            prop_assert!(compose(&m, &GraphMorphism::identity(&g)).unwrap().same_as(&m));
        }
    }
}
