//! Dimension bookkeeping for weighted correlators with descendants. A
//! correlator can only be nonzero when the insertion degrees add up to the
//! virtual dimension of the moduli space.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{vertex_ample, CurveClass, TargetProfile, WeightData};
use crate::error::{Error, Result};

/// `tau_k(gamma)` at the marking `weight_label`, with `gamma` of
/// algebraic codimension `codim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    pub codim: u32,
    pub descendant_power: u32,
    pub weight_label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "deficit", rename_all = "kebab-case")]
pub enum Gate {
    Passes,
    /// Insertion degree minus virtual dimension.
    Fails(i64),
}

/// `(1 - g)(dim V - 3) - K.beta + |S|`. The weights only decide
/// admissibility.
pub fn vdim_moduli(g: u32, weights: &WeightData, beta: &CurveClass, profile: &TargetProfile) -> Result<i64> {
    let k_beta = profile.pairing(beta)?;
    if !vertex_ample(g, weights.weights(), beta) {
        return Err(Error::Inadmissible(format!(
            "genus {g}, weights {}, class {beta} is not stable",
            weights.to_list_string()
        )));
    }
    Ok((1 - g as i64) * (profile.dim_v as i64 - 3) - k_beta + weights.len() as i64)
}

pub fn dimension_gate(
    g: u32,
    weights: &WeightData,
    beta: &CurveClass,
    profile: &TargetProfile,
    insertions: &[Insertion],
) -> Result<Gate> {
    let mut seen = BTreeSet::new();
    for ins in insertions {
        weights.index_of(&ins.weight_label)?;
        if !seen.insert(ins.weight_label.as_str()) {
            return Err(Error::DuplicateLabel(ins.weight_label.clone()));
        }
    }
    let vdim = vdim_moduli(g, weights, beta, profile)?;
    let degree: i64 = insertions.iter().map(|i| i.codim as i64 + i.descendant_power as i64).sum();
    Ok(if degree == vdim { Gate::Passes } else { Gate::Fails(degree - vdim) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::graph::WGraph;
    use proptest::prelude::*;

    fn ones(n: usize) -> WeightData {
        WeightData::from_weights(vec![Rational::one(); n]).unwrap()
    }

    fn ins(codim: u32, k: u32, label: &str) -> Insertion {
        Insertion { codim, descendant_power: k, weight_label: label.into() }
    }

    #[test]
    fn vdim_examples() {
        let p3 = TargetProfile::projective(3);
        assert_eq!(p3.kappa, vec![-4]);
        assert_eq!(vdim_moduli(0, &ones(0), &CurveClass(vec![1]), &p3).unwrap(), 4);
        for n in 3..8 {
            assert_eq!(vdim_moduli(0, &ones(n), &CurveClass(vec![]), &TargetProfile::point()).unwrap(), n as i64 - 3);
        }
        let cy = TargetProfile::new(3, vec![0]);
        assert_eq!(vdim_moduli(1, &ones(0), &CurveClass(vec![2]), &cy).unwrap(), 0);
        assert!(matches!(
            vdim_moduli(0, &ones(2), &CurveClass(vec![]), &TargetProfile::point()),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn gate_examples() {
        let p3 = TargetProfile::projective(3);
        let line = CurveClass(vec![1]);
        let s = ones(2);
        let two_points = [ins(3, 0, "1"), ins(3, 0, "2")];
        assert_eq!(dimension_gate(0, &s, &line, &p3, &two_points).unwrap(), Gate::Passes);
        let s3 = ones(3);
        let extra = [ins(3, 0, "1"), ins(3, 0, "2"), ins(0, 1, "3")];
        assert_eq!(vdim_moduli(0, &s3, &line, &p3).unwrap(), 7);
        assert_eq!(dimension_gate(0, &s, &line, &p3, &[ins(3, 1, "1"), ins(3, 0, "2")]).unwrap(), Gate::Fails(1));
        assert_eq!(dimension_gate(0, &s, &line, &p3, &[ins(3, 0, "1")]).unwrap(), Gate::Fails(-3));
        assert_eq!(dimension_gate(0, &s3, &line, &p3, &extra).unwrap(), Gate::Passes);
        let cy = TargetProfile::new(3, vec![0]);
        assert_eq!(dimension_gate(1, &ones(0), &CurveClass(vec![1]), &cy, &[]).unwrap(), Gate::Passes);
        assert_eq!(
            dimension_gate(0, &s, &line, &p3, &[ins(3, 0, "1"), ins(3, 0, "1")]).unwrap_err(),
            Error::DuplicateLabel("1".into())
        );
        assert_eq!(dimension_gate(0, &s, &line, &p3, &[ins(3, 0, "9")]).unwrap_err(), Error::UnknownLabel("9".into()));
    }

    #[test]
    fn gluing_additivity() {
        // one edge between (g1, beta1, S1 + node) and (g2, beta2, S2 + node)
        let p2 = TargetProfile::projective(2);
        for (g1, g2, b1, b2, n1, n2) in [(0, 0, 1, 1, 1, 2), (1, 0, 0, 2, 1, 0), (0, 2, 3, 0, 2, 1)] {
            let mut g = WGraph::new(p2.clone());
            let u = g.add_vertex(g1, CurveClass(vec![b1]));
            let v = g.add_vertex(g2, CurveClass(vec![b2]));
            g.add_edge(u, v);
            for _ in 0..n1 {
                g.add_tail(u, Rational::one());
            }
            for _ in 0..n2 {
                g.add_tail(v, Rational::one());
            }
            let d1 = vdim_moduli(g1, &ones(n1 + 1), &CurveClass(vec![b1]), &p2).unwrap();
            let d2 = vdim_moduli(g2, &ones(n2 + 1), &CurveClass(vec![b2]), &p2).unwrap();
            assert_eq!(g.stats().vdim, d1 + d2 - p2.dim_v as i64);
        }
    }

    proptest! {
        #[test]
        fn weights_do_not_enter(n in 3usize..7, nums in proptest::collection::vec(1i64..=12, 7), beta in 0u64..4, g in 0u32..3) {
            let p = TargetProfile::projective(2);
            let beta = CurveClass(vec![beta]);
            let w = WeightData::from_weights(nums[..n].iter().map(|&k| Rational::new(k, 12)).collect()).unwrap();
            if let Ok(d) = vdim_moduli(g, &w, &beta, &p) {
                prop_assert_eq!(d, vdim_moduli(g, &ones(n), &beta, &p).unwrap());
            }
        }
    }
}
