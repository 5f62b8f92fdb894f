//! Zeta functions of ADE root lattices attached to their Weil representations.

pub mod cli;
pub mod context;
pub mod lattice;
pub mod linalg;
pub mod numerics;
pub mod report;
pub mod theta;
pub mod verify;
pub mod weil;
pub mod zeta;
