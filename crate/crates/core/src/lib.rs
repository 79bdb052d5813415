//! Exact combinatorics of weighted stable maps.
//!
//! The crate covers weight data and stability predicates ([`arith`]), the
//! wall and chamber structure of weight space ([`chambers`]), weighted dual
//! graphs ([`graph`]) and their category of morphisms ([`category`]),
//! wall-crossing of reduction morphisms ([`reduction`]), boundary strata
//! ([`strata`]), virtual-dimension bookkeeping ([`gw_dim`]) and the command
//! line front end ([`cli`]). All arithmetic is exact.

pub mod arith;
pub mod category;
pub mod chambers;
pub mod cli;
pub mod error;
pub mod graph;
pub mod gw_dim;
pub mod reduction;
pub mod strata;

pub use error::{Error, Result};
