//! Lattice full vertex algebras `F_{L,p}`, their Schwinger functions and numerical checks of
//! the conformal Osterwalder–Schrader properties.

pub mod axioms;
pub mod correlators;
pub mod fock;
pub mod geometry;
pub mod lattice;
pub mod vertex;
