//! p-spectral radii and Lagrangians of r-uniform hypergraphs.
//!
//! The crate is organised around four modules:
//!
//! * [`hypergraph`]: the combinatorial object, links, shadows, colex
//!   constructions, edge shifting and isomorphism-free enumeration.
//! * [`binomials`]: the generalized binomial `p_r(x)`, its inverse, the
//!   `rm / s^{r/p}` bound and the analytic functions `A`, `B`, `F`, `h`
//!   together with grid checkers for their inequalities.
//! * [`spectral`]: numerical `rho_p(H)` with eigen-equation certificates,
//!   a grid oracle and an exact clique-number oracle.
//! * [`extremal`]: exhaustive verification harness producing reports.

// `!(x >= y)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binomials;
pub mod error;
pub mod extremal;
pub mod hypergraph;
pub mod spectral;

pub use binomials::{nikiforov_bound, p_r, p_r_inverse, BoundContext};
pub use error::{Error, Result};
pub use hypergraph::{Edge, Hypergraph, SetFamily};
pub use spectral::{solve_rho, SolverConfig, SpectralSolution, WeightVector};
