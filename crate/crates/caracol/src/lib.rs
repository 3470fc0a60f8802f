//! Flow polytopes of ν-caracol graphs.
//!
//! For a lattice path ν the caracol graph car(ν) carries a flow polytope
//! whose normalized volume is the ν-Catalan number. Two framings of the
//! graph induce unimodular triangulations whose dual graphs are the Hasse
//! diagrams of the ν-Tamari lattice and of the ideal of partitions under
//! λ(ν) in Young's lattice. This crate builds all of those objects
//! explicitly and cross-checks every count by independent methods.

pub mod caracol;
pub mod enumeration;
pub mod framing;
pub mod geom;
pub mod lattice;
pub mod path;

pub use caracol::{build_caracol, in_degree_vector, CaracolGraph, Edge, EdgeId, InDegreeVector, Route};
pub use lattice::{tamari_lattice, young_ideal, FiniteLattice};
pub use path::{horiz, nu_dyck_paths, tamari_rotate, LatticePath, LatticePoint, Partition, Step};
