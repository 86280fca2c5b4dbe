//! Mirror-prox solvers for monotone variational inequalities on products
//! of probability simplices.
//!
//! The problem: given a monotone affine mapping `F(x) = Mx + c` and the
//! feasible set `X` (a product of standard simplices), find `x*` with
//! `<F(x*), x - x*> >= 0` for all `x` in `X`. Two extragradient-family
//! methods are provided over interchangeable mirror geometries:
//!
//! - [`Method::Popov`] re-uses the previous leader evaluation and pays one
//!   fresh mapping evaluation per iteration;
//! - [`Method::Korpelevich`] is the classic extragradient scheme with two
//!   evaluations per iteration.
//!
//! Geometry is captured by [`MirrorMap`]: entropic (multiplicative updates,
//! 1-strongly-convex w.r.t. `||.||_1` per block) or Euclidean (simplex
//! projections). Solution quality is certified by the dual gap
//! `G(x) = max_u <F(u), x - u>`, estimated by feasible-point sampling
//! ([`estimate_gap_sampling`]) or, on two 2-simplices, by a dense grid
//! oracle ([`gap_grid_oracle`]); both only ever under-estimate, so any
//! reported gap is a valid certificate. [`theorem_bound`] gives the a
//! priori `O(1/t)` guarantee the averaged iterates must beat.
//!
//! Every random draw flows through seeded ChaCha streams; identical seeds
//! give bit-identical runs, traces, and serialized instances.

pub mod error;
pub mod game;
pub mod gap;
pub mod linalg;
pub mod mirror;
pub mod problem;
pub mod rng;
pub mod set;
pub mod simplex;
pub mod solver;
pub mod tol;
pub mod vector;

pub use error::{Error, Result};
pub use game::{
    generate_game, load_spec, matching_pennies, save_spec, spec_from_str, spec_to_string,
    ProblemSpec,
};
pub use gap::{estimate_gap_sampling, gap_grid_oracle, theorem_bound, GapEstimate, GapMethod};
pub use linalg::{spectral_norm, symmetric_eigenvalues, Matrix};
pub use mirror::{MirrorKind, MirrorMap};
pub use problem::VIProblem;
pub use set::FeasibleSet;
pub use simplex::{entropic_update, euclidean_update, project_simplex_bisection, BlockLayout};
pub use solver::{
    compute_step_diagnostics, korpelevich_step, popov_step, run, DiagnosticsMode, Gamma, Method,
    RunInfo, SolverConfig, StepDiagnostics, StepOutcome, StepRecord, Trace,
};
pub use vector::{dot, DualPoint, Vector};
