//! Riemannian center of mass of weighted point sets on the model spaces
//! ℝⁿ, Sⁿ, Hⁿ (hyperboloid) and SO(n).
//!
//! The center is the unique zero, inside a convex ball containing the mass
//! points, of the averaged logarithm field `V(x) = Σ mᵢ·logₓ(pᵢ)`. It is found
//! by iterated geodesic Euler steps `x ← expₓ(V(x))` ([`solver`]), and can be
//! cross-checked against the explicit ambient constructions on Sⁿ and Hⁿ
//! ([`closed_form`]) and against brute-force grid minimization of the Fréchet
//! function ([`verification`]).

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod manifold;
pub mod solver;
pub mod spaces;
pub mod verification;

pub use error::{Error, Result};
pub use manifold::{
    frechet_value, mass_vector_field, numerical_covariant_differential, AmbientPoint,
    CurvatureData, PointCheck, TangentVector, WeightedSample,
};
pub use solver::{
    check_admissible_ball, euler_step, initial_guess, solve_center, BallCheck, BallReport,
    ConvergenceReport, SolverConfig, Status,
};
pub use spaces::{Isometry, ModelSpace, NormFlavor, SpaceKind};
