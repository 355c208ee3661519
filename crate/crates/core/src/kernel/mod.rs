//! Disc automorphisms, Blaschke products, the node quadratic and Pick feasibility.

mod blaschke;
pub mod hermitian;
mod moebius;
mod pick;
mod quadratic;

pub use blaschke::BlaschkeDisc;
pub use moebius::{moebius, moebius_defect, pseudo_hyperbolic, MoebiusTransform};
pub use pick::{pick_entry, pick_feasible, PickProblem, PickVerdict, FEASIBILITY_TOL, NODE_SEPARATION};
pub use quadratic::{solve_node_quadratic, NodeRoots};
