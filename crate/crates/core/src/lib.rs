//! Inter-seasonal, multi-objective hydrogen supply chain optimization.
//!
//! The crate models an island hydrogen supply chain as a mixed-integer
//! linear program: renewable-powered electrolysis, pressurized/liquid
//! storage, truck transport between spatial grids and refuelling stations,
//! under monthly water-vulnerability and energy-availability constraints.
//! Three objectives (system cost, GHG emissions, risk index) are minimized
//! either in isolation or jointly through an epsilon-constraint sweep whose
//! Pareto front is ranked with a modified TOPSIS procedure.
//!
//! Everything here is pure computation over an immutable [`scenario::Scenario`];
//! file formats, the ready-made datasets and the command line live in the
//! companion `hsc-cli` crate. The crate is `no_std`-compatible (alloc
//! required); the default `std` feature only enables solver logging and
//! wall-clock limits.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod demand;
pub mod model;
pub mod moo;
pub mod resources;
pub mod scenario;
pub mod solver;
pub mod synth;

pub(crate) mod float;
