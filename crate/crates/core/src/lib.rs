//! Wall-crossing bookkeeping and exact feasibility certificates for
//! semi-free Hamiltonian circle actions on symplectic 6-manifolds.

pub mod affine;
pub mod catalog;
pub mod cone;
pub mod crossing;
pub mod document;
pub mod feasibility;
pub mod lattice;
pub mod report;
pub mod verify;
