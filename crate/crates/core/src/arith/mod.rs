//! Exact rationals, weight data, curve classes and the pointwise stability
//! predicates everything else is built on.

pub mod rational;
pub mod weights;

pub use rational::Rational;
pub use weights::{
    coincidence_ok, is_admissible, vertex_ample, AdmissibleData, CurveClass, TargetProfile, WeightData,
};
