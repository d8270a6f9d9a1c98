//! Simulation and causality verification for operational probabilistic circuits.
//!
//! A closed circuit is a DAG of *tests* (collections of alternative events
//! indexed by a finite outcome space) joined by wires typed by *systems*.
//! This crate provides:
//!
//! - [`circuit`]: the graph model, validation, the causal partial order,
//!   past/future cones and preparation/observation bipartitions.
//! - [`quantum`]: finite-dimensional quantum theory (Kraus maps, density
//!   operators, POVM effects) with sequential/parallel composition,
//!   coarse-graining and a Choi-matrix positivity check.
//! - [`classical`]: classical theory as substochastic Markov matrices, plus
//!   its embedding into the quantum backend as a diagonal restriction.
//! - [`engine`]: contraction of closed circuits into joint outcome
//!   distributions and the causality checks (marginal invariance,
//!   no-signaling from the future, deterministic-effect uniqueness and the
//!   two-test falsification cascade), including a table-driven negative
//!   control backend.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. File formats, reports and the command-line front-end live in
//! the companion `optcausal` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod circuit;
pub mod classical;
pub mod engine;
pub mod linalg;
pub mod quantum;
pub mod tolerance;

pub use circuit::{Circuit, CircuitBuilder, NodeId, TestNode, WireId};
pub use engine::{Backend, CausalityReport, CheckKind, JointDistribution, Verdict};
