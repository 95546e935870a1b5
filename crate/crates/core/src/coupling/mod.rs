//! Angular-momentum coupling: Clebsch–Gordan coefficients, coupling trees,
//! coupled bases and exchange symmetry.

mod basis;
mod cg;
mod exchange;
mod tree;

pub use basis::{couple, scheme_overlap, BasisTransform, CoupledBasis, CoupledState, Intermediate};
pub use cg::{cg, cg_coefficient, MAX_J};
pub use exchange::{classify_exchange, exchange_operator, like_particle_pairs, Parity};
pub use tree::{CouplingTree, LabelStyle, Node, Preset};
