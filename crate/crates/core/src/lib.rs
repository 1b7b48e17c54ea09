//! Core algorithms for stabiliser groups whose measurement rounds can be
//! undone: conjugate generating sets, reversible transitions between
//! instantaneous stabiliser groups, logical-operator tracking through a
//! measurement schedule, and small dense-matrix oracles that certify the
//! algebraic identities behind all of it.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`]: packed bit vectors and GF(2) linear algebra;
//! * [`pauli`]: signed Pauli operators in binary symplectic form;
//! * [`group`]: abelian stabiliser groups, canonical forms, measurement
//!   updates and normaliser (logical) bases;
//! * [`conjugacy`]: intersection of groups, detection of reversible pairs
//!   and construction of biorthogonal conjugate bases;
//! * [`lattice`]: Euclidean qubit layouts, operator diameters, local
//!   reversibility checks, relocalisation and error classification;
//! * [`floquet`]: periodic measurement sequences, run state, logical
//!   rewriting and the symplectic action of a full period;
//! * [`dense`]: explicit state-vector/matrix oracle for small systems;
//! * [`genu`]: generalised logical unitaries interleaved with reversible
//!   measurements, with condition checks, canonical decomposition and
//!   connected correlations;
//! * [`catalog`]: built-in example codes, including a honeycomb schedule
//!   on a torus;
//! * [`clifford`]: Clifford-circuit conjugation used to generate random
//!   test instances.
//!
//! Everything here is `no_std` (with `alloc`); file formats and the command
//! line driver live in the companion `floq-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
pub mod catalog;
pub mod clifford;
pub mod conjugacy;
pub mod dense;
pub mod error;
pub mod floquet;
pub mod genu;
pub mod group;
pub mod lattice;
pub mod outcome;
pub mod pauli;

pub use error::{Error, Result};
pub use pauli::{PauliOperator, Sign};
