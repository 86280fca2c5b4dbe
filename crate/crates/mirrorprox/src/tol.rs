//! Central numeric tolerances.
//!
//! Every inequality the crate checks — feasibility, monotonicity, the
//! per-step solver diagnostics — carries an explicit absolute slack chosen
//! for f64 arithmetic at the problem scales this crate targets (mapping
//! norms up to a few hundred, dimensions in the tens). Keeping them in one
//! place makes the contracts auditable.

/// A simplex block must be entrywise `>= -FEASIBILITY` and sum to 1 within
/// `FEASIBILITY`.
pub const FEASIBILITY: f64 = 1e-9;

/// Minimum eigenvalue of the symmetric part of a mapping matrix may sit this
/// far below zero and still count as monotone (round-off from eigensolves).
pub const MONOTONE_MIN_EIG: f64 = -1e-10;

/// A stored Lipschitz constant must be at least the spectral norm minus this.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

/// A problem file's recorded `l_computed` must match the recomputed spectral
/// norm within this.
pub const L_RECOMPUTED: f64 = 1e-8;

/// Eigenvalues of the symmetric part of a generated mapping must lie within
/// the requested range widened by this much per side.
pub const EIG_RANGE_SLACK: f64 = 1e-8;

/// Entropic-map coordinates are clamped below at this floor before logs, so
/// analytically-positive values that underflowed stay in the domain. Negative
/// coordinates are still rejected.
pub const ENTROPIC_FLOOR: f64 = 1e-100;

/// Bisection for the simplex projection stops once the bracket is narrower
/// than this (or after `BISECTION_MAX_ITERS` halvings).
pub const BISECTION_WIDTH: f64 = 1e-12;
pub const BISECTION_MAX_ITERS: usize = 200;

/// Slack for the prox-step distance bound
/// `||y_next - x_next|| <= (gamma/alpha) ||xi - eta||`.
pub const STEP_DISTANCE_SLACK: f64 = 1e-8;

/// Slack for the per-step ordering `delta_t <= eps_t`.
pub const DELTA_LE_EPS_SLACK: f64 = 1e-9;

/// Slack for the per-step bound
/// `eps_t <= (gamma^2/alpha)||xi - eta||^2 - (alpha/2)(...)`.
pub const EPS_BOUND_SLACK: f64 = 1e-8;

/// Slack for the telescoped sum `sum_t eps_t <= (2 gamma^2 L^2 / alpha) ||y0 - x0||^2`.
pub const EPS_SUM_SLACK: f64 = 1e-6;

/// Prox optimality residuals (minimized over the feasible set) must be at
/// least this; exact arithmetic gives `>= 0`.
pub const OPT_RESIDUAL_FLOOR: f64 = -1e-6;

/// Gap estimates are nonnegative up to this much round-off.
pub const GAP_NONNEG_FLOOR: f64 = -1e-12;

/// Slack for cross-checks of closed forms against dense-grid oracles.
pub const GRID_ORACLE: f64 = 1e-6;

/// Slack for the prox-mapping 1/alpha-Lipschitz property in its dual argument.
pub const PROX_LIPSCHITZ_SLACK: f64 = 1e-8;
