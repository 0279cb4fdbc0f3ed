//! Expansive flows, shadowing and entropy at finite resolution.
//!
//! The crate models continuous flows on compact metric spaces through the
//! [`flow::FlowSystem`] trait and ships concrete systems in [`systems`]:
//! shifts, the cat map, the cat map blown up along a disc, and their
//! suspensions (regular or slowed down to a singular point). On top of these
//! it provides pseudo-orbit shadowing, cross sections and symbolic coding,
//! expansivity tests, entropy estimates with a certified lower bound, and the
//! specification property for homeomorphisms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod entropy;
pub mod error;
pub mod expansivity;
pub mod flow;
pub mod io;
pub mod sections;
pub mod shadowing;
pub mod specification;
pub mod suspension;
pub mod symbolic;
pub mod systems;

pub use error::{Error, Result};
