//! Mirror-prox iterations for monotone VIs.
//!
//! Two update rules share the prox kernel:
//!
//! * Popov: `y_next = P_x(gamma F(y))`, `x_next = P_x(gamma F(y_next))`,
//!   reusing the cached `F(y)` from the previous step, so each iteration
//!   costs one fresh mapping evaluation (plus a single warm-up evaluation
//!   of `F(y0)`);
//! * Korpelevich (extragradient): `y_next = P_x(gamma F(x))`,
//!   `x_next = P_x(gamma F(y_next))`, two fresh evaluations per iteration.
//!
//! The certified output is the running average of the `y` iterates. With
//! `gamma = alpha / (2 L)` the averaged iterate's dual gap after `T` steps
//! is at most `2 L max_u B(u, x0) / (T alpha) + L ||y0 - x0||^2 / T`.
//!
//! When diagnostics are on, every step records the scalars `delta_t` and
//! `eps_t` and their bounding inequalities (the step-distance bound,
//! `delta_t <= eps_t`, the eps upper bound, and prox optimality residuals),
//! which is what `verify` replays.

use crate::error::{Error, Result};
use crate::mirror::{MirrorKind, MirrorMap};
use crate::problem::VIProblem;
use crate::simplex::BlockLayout;
use crate::tol;
use crate::vector::{DualPoint, Vector};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Popov,
    Korpelevich,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Popov => write!(f, "popov"),
            Method::Korpelevich => write!(f, "korpelevich"),
        }
    }
}

impl Method {
    /// Step size used when the caller asks for `auto`:
    /// `alpha/(2L)` for Popov, `alpha/(sqrt(2) L)` for Korpelevich.
    pub fn auto_gamma(&self, alpha: f64, lipschitz: f64) -> Result<f64> {
        if lipschitz <= 0.0 {
            return Err(Error::Contract(
                "auto step size undefined for a zero Lipschitz constant; pass gamma explicitly"
                    .into(),
            ));
        }
        Ok(match self {
            Method::Popov => alpha / (2.0 * lipschitz),
            Method::Korpelevich => alpha / (std::f64::consts::SQRT_2 * lipschitz),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagnosticsMode {
    /// No per-step diagnostics.
    #[default]
    Off,
    /// Record diagnostics in the trace.
    Record,
    /// Record and abort the run on the first violated inequality.
    Strict,
}

/// Run parameters; `x0`/`y0` default to the uniform point.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub mirror: MirrorMap,
    pub gamma: Gamma,
    pub max_iters: usize,
    pub x0: Option<Vector>,
    pub y0: Option<Vector>,
    pub diagnostics: DiagnosticsMode,
}

impl SolverConfig {
    pub fn new(method: Method, mirror: MirrorMap) -> Self {
        SolverConfig {
            method,
            mirror,
            gamma: Gamma::Auto,
            max_iters: 1000,
            x0: None,
            y0: None,
            diagnostics: DiagnosticsMode::Off,
        }
    }

    /// The concrete step size this config uses on `problem`.
    pub fn resolve_gamma(&self, problem: &VIProblem) -> Result<f64> {
        match self.gamma {
            Gamma::Auto => self
                .method
                .auto_gamma(self.mirror.alpha(), problem.lipschitz()),
            Gamma::Fixed(g) => {
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::Contract(format!(
                        "step size must be a positive finite real, got {g}"
                    )));
                }
                Ok(g)
            }
        }
    }
}

/// Scalars tracked for one step `t`: the certification increment `delta_t`,
/// its upper bound `eps_t`, the distances entering their inequalities, and
/// the prox optimality residuals.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub t: usize,
    pub delta: f64,
    pub eps: f64,
    /// `||y_next - x_next||_2`
    pub dist_y_xnext: f64,
    /// `||y_next - x_t||_2`
    pub dist_y_xprev: f64,
    /// `||xi - eta||_2` (dual norm of the two gradients used by the step)
    pub dual_diff_norm: f64,
    /// `min_z <gamma xi - grad psi(x_t) + grad psi(y_next), z - y_next>` over the set
    pub opt_residual_y: f64,
    /// `min_z <gamma eta - grad psi(x_t) + grad psi(x_next), z - x_next>` over the set
    pub opt_residual_x: f64,
}

impl StepDiagnostics {
    /// `||y_next - x_next|| - (gamma/alpha) ||xi - eta||`; nonpositive in
    /// exact arithmetic.
    pub fn distance_slack(&self, gamma: f64, alpha: f64) -> f64 {
        self.dist_y_xnext - (gamma / alpha) * self.dual_diff_norm
    }

    /// `delta_t - eps_t`; nonpositive in exact arithmetic.
    pub fn delta_le_eps_slack(&self) -> f64 {
        self.delta - self.eps
    }

    /// `eps_t` minus its step bound
    /// `(gamma^2/alpha)||xi - eta||^2 - (alpha/2)(||y_next - x_t||^2 + ||y_next - x_next||^2)`;
    /// nonpositive in exact arithmetic.
    pub fn eps_bound_slack(&self, gamma: f64, alpha: f64) -> f64 {
        let bound = gamma * gamma / alpha * self.dual_diff_norm.powi(2)
            - 0.5 * alpha * (self.dist_y_xprev.powi(2) + self.dist_y_xnext.powi(2));
        self.eps - bound
    }
}

/// Minimum of the linear form `v` over the product of simplices, which is
/// the sum of per-block coordinate minima.
fn min_over_set(v: &[f64], layout: &BlockLayout) -> f64 {
    layout
        .blocks()
        .map(|b| v[b].iter().cloned().fold(f64::INFINITY, f64::min))
        .sum()
}

/// Diagnostics for a completed step given the dual vectors the step actually
/// used: `xi` for the `y_next` prox and `eta = F(y_next)` for the `x_next`
/// prox. Popov passes its cached `F(y_t)` as `xi`; Korpelevich passes
/// `F(x_t)`.
#[allow(clippy::too_many_arguments)]
pub fn step_diagnostics_with_duals(
    t: usize,
    x_t: &Vector,
    y_next: &Vector,
    x_next: &Vector,
    xi: &DualPoint,
    eta: &DualPoint,
    map: &MirrorMap,
    layout: &BlockLayout,
    gamma: f64,
) -> Result<StepDiagnostics> {
    let psi_x = map.psi(x_t)?;
    let psi_xnext = map.psi(x_next)?;
    let grad_x = map.grad_psi(x_t)?;
    let grad_ynext = map.grad_psi(y_next)?;
    let grad_xnext = map.grad_psi(x_next)?;

    let ymx_next: Vec<f64> = diff(y_next, x_next);
    let delta = gamma * eta.pair(&ymx_next) + psi_x + grad_x.pair(&diff(x_next, x_t)) - psi_xnext;
    let eta_minus_xi = eta.sub(xi);
    let eps = gamma * eta_minus_xi.pair(&ymx_next)
        + psi_x
        + grad_x.pair(&diff(y_next, x_t))
        + grad_ynext.pair(&diff(x_next, y_next))
        - psi_xnext;

    // optimality residuals of the two prox subproblems, minimized exactly
    // over the set (the minimum of a linear form sits at a block vertex)
    let vy: Vec<f64> = (0..x_t.dim())
        .map(|i| gamma * xi.coords()[i] - grad_x.coords()[i] + grad_ynext.coords()[i])
        .collect();
    let opt_residual_y = min_over_set(&vy, layout) - crate::vector::dot(&vy, y_next.coords());
    let vx: Vec<f64> = (0..x_t.dim())
        .map(|i| gamma * eta.coords()[i] - grad_x.coords()[i] + grad_xnext.coords()[i])
        .collect();
    let opt_residual_x = min_over_set(&vx, layout) - crate::vector::dot(&vx, x_next.coords());

    Ok(StepDiagnostics {
        t,
        delta,
        eps,
        dist_y_xnext: y_next.dist2(x_next),
        dist_y_xprev: y_next.dist2(x_t),
        dual_diff_norm: eta_minus_xi.norm2(),
        opt_residual_y,
        opt_residual_x,
    })
}

/// Diagnostics under the Popov identification `xi = F(y_t)`,
/// `eta = F(y_next)`, evaluating the mapping afresh.
#[allow(clippy::too_many_arguments)]
pub fn compute_step_diagnostics(
    t: usize,
    x_t: &Vector,
    y_t: &Vector,
    y_next: &Vector,
    x_next: &Vector,
    problem: &VIProblem,
    map: &MirrorMap,
    gamma: f64,
) -> Result<StepDiagnostics> {
    let xi = problem.eval_mapping(y_t)?;
    let eta = problem.eval_mapping(y_next)?;
    step_diagnostics_with_duals(
        t,
        x_t,
        y_next,
        x_next,
        &xi,
        &eta,
        map,
        problem.set().layout(),
        gamma,
    )
}

fn diff(a: &Vector, b: &Vector) -> Vec<f64> {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x - y)
        .collect()
}

/// Output of one solver step, carrying the dual vectors used so callers can
/// compute diagnostics and keep eval counters honest.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub y_next: Vector,
    pub x_next: Vector,
    /// Dual used for the `y_next` prox: cached `F(y_t)` (Popov) or fresh `F(x_t)`.
    pub xi: DualPoint,
    /// `F(y_next)`, used for the `x_next` prox and cached by Popov.
    pub eta: DualPoint,
    /// Fresh mapping evaluations performed: 1 for Popov, 2 for Korpelevich.
    pub fresh_evals: usize,
}

/// One Popov step from `x_t` with the cached `f_y = F(y_t)`.
/// Performs exactly one fresh mapping evaluation (at `y_next`).
pub fn popov_step(
    x_t: &Vector,
    f_y: &DualPoint,
    problem: &VIProblem,
    map: &MirrorMap,
    gamma: f64,
) -> Result<StepOutcome> {
    let set = problem.set();
    let y_next = map.prox_map(x_t, &f_y.scale(gamma), set)?;
    let eta = problem.eval_mapping(&y_next)?;
    let x_next = map.prox_map(x_t, &eta.scale(gamma), set)?;
    Ok(StepOutcome {
        y_next,
        x_next,
        xi: f_y.clone(),
        eta,
        fresh_evals: 1,
    })
}

/// One Korpelevich (extragradient) step from `x_t`: two fresh mapping
/// evaluations, at `x_t` and at `y_next`.
pub fn korpelevich_step(
    x_t: &Vector,
    problem: &VIProblem,
    map: &MirrorMap,
    gamma: f64,
) -> Result<StepOutcome> {
    let set = problem.set();
    let xi = problem.eval_mapping(x_t)?;
    let y_next = map.prox_map(x_t, &xi.scale(gamma), set)?;
    let eta = problem.eval_mapping(&y_next)?;
    let x_next = map.prox_map(x_t, &eta.scale(gamma), set)?;
    Ok(StepOutcome {
        y_next,
        x_next,
        xi,
        eta,
        fresh_evals: 2,
    })
}

/// Snapshot of the fully-resolved run parameters stored in a trace.
#[derive(Debug, Clone)]
pub struct RunInfo {
    pub method: Method,
    pub mirror: MirrorKind,
    pub gamma: f64,
    pub max_iters: usize,
    pub diagnostics: DiagnosticsMode,
    pub lipschitz: f64,
    pub alpha: f64,
}

/// State after step `t` (0-based): the new iterates, the running average of
/// the `y` iterates, timing, and the cumulative fresh-evaluation count.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub t: usize,
    pub x: Vector,
    pub y: Vector,
    pub y_avg: Vector,
    pub wall_nanos: u64,
    pub map_evals: usize,
    pub diagnostics: Option<StepDiagnostics>,
}

/// Full run history: initial state plus one record per completed step.
#[derive(Debug, Clone)]
pub struct Trace {
    pub info: RunInfo,
    pub x0: Vector,
    pub y0: Vector,
    pub records: Vec<StepRecord>,
    /// Total fresh mapping evaluations: `max_iters + 1` for Popov
    /// (one warm-up), `2 * max_iters` for Korpelevich.
    pub map_evals: usize,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Averaged iterate after `steps` steps (1-based; `steps == len()` gives
    /// the final average).
    pub fn y_avg_at(&self, steps: usize) -> Option<&Vector> {
        if steps == 0 {
            return None;
        }
        self.records.get(steps - 1).map(|r| &r.y_avg)
    }

    pub fn final_y_avg(&self) -> Option<&Vector> {
        self.records.last().map(|r| &r.y_avg)
    }

    pub fn total_wall_nanos(&self) -> u64 {
        self.records.iter().map(|r| r.wall_nanos).sum()
    }

    /// `sum_t eps_t` over recorded diagnostics, if every step has them.
    pub fn eps_sum(&self) -> Option<f64> {
        let mut acc = 0.0;
        for r in &self.records {
            acc += r.diagnostics?.eps;
        }
        Some(acc)
    }
}

fn check_strict(d: &StepDiagnostics, gamma: f64, alpha: f64) -> Result<()> {
    let dist = d.distance_slack(gamma, alpha);
    if dist > tol::STEP_DISTANCE_SLACK {
        return Err(Error::Diagnostics {
            t: d.t,
            check: "step distance bound",
            lhs: d.dist_y_xnext,
            rhs: (gamma / alpha) * d.dual_diff_norm + tol::STEP_DISTANCE_SLACK,
        });
    }
    if d.delta_le_eps_slack() > tol::DELTA_LE_EPS_SLACK {
        return Err(Error::Diagnostics {
            t: d.t,
            check: "delta <= eps",
            lhs: d.delta,
            rhs: d.eps + tol::DELTA_LE_EPS_SLACK,
        });
    }
    if d.eps_bound_slack(gamma, alpha) > tol::EPS_BOUND_SLACK {
        return Err(Error::Diagnostics {
            t: d.t,
            check: "eps step bound",
            lhs: d.eps,
            rhs: d.eps - d.eps_bound_slack(gamma, alpha) + tol::EPS_BOUND_SLACK,
        });
    }
    if d.opt_residual_y < tol::OPT_RESIDUAL_FLOOR {
        return Err(Error::Diagnostics {
            t: d.t,
            check: "y-prox optimality residual",
            lhs: -d.opt_residual_y,
            rhs: -tol::OPT_RESIDUAL_FLOOR,
        });
    }
    if d.opt_residual_x < tol::OPT_RESIDUAL_FLOOR {
        return Err(Error::Diagnostics {
            t: d.t,
            check: "x-prox optimality residual",
            lhs: -d.opt_residual_x,
            rhs: -tol::OPT_RESIDUAL_FLOOR,
        });
    }
    Ok(())
}

/// Runs the configured method for `config.max_iters` steps.
///
/// The trace records, per step, the iterates, the running `y` average, wall
/// time, the cumulative fresh-evaluation count, and (when enabled) the step
/// diagnostics. With `DiagnosticsMode::Strict` the first violated
/// inequality aborts the run; the telescoped `sum eps_t` bound is also
/// enforced at the end whenever the step size qualifies
/// (`gamma <= alpha/(2L)`).
pub fn run(problem: &VIProblem, config: &SolverConfig) -> Result<Trace> {
    let set = problem.set();
    let map = &config.mirror;
    let gamma = config.resolve_gamma(problem)?;
    let alpha = map.alpha();

    let x0 = match &config.x0 {
        Some(x) => x.clone(),
        None => set.uniform_point(),
    };
    let y0 = match &config.y0 {
        Some(y) => y.clone(),
        None => x0.clone(),
    };
    for (name, p) in [("x0", &x0), ("y0", &y0)] {
        if !set.contains(p) {
            return Err(Error::Contract(format!(
                "{name} is not a feasible point of the product of simplices"
            )));
        }
    }

    let info = RunInfo {
        method: config.method,
        mirror: map.kind(),
        gamma,
        max_iters: config.max_iters,
        diagnostics: config.diagnostics,
        lipschitz: problem.lipschitz(),
        alpha,
    };
    let mut trace = Trace {
        info,
        x0: x0.clone(),
        y0: y0.clone(),
        records: Vec::with_capacity(config.max_iters),
        map_evals: 0,
    };
    if config.max_iters == 0 {
        return Ok(trace);
    }

    let mut x = x0.clone();
    // Popov's cache; the single warm-up evaluation
    let mut f_y = if config.method == Method::Popov {
        trace.map_evals += 1;
        Some(problem.eval_mapping(&y0)?)
    } else {
        None
    };

    let mut y_sum = vec![0.0; set.dim()];
    for t in 0..config.max_iters {
        let started = Instant::now();
        let out = match config.method {
            Method::Popov => {
                popov_step(&x, f_y.as_ref().expect("popov cache"), problem, map, gamma)?
            }
            Method::Korpelevich => korpelevich_step(&x, problem, map, gamma)?,
        };
        trace.map_evals += out.fresh_evals;

        let diagnostics = if config.diagnostics != DiagnosticsMode::Off {
            let d = step_diagnostics_with_duals(
                t,
                &x,
                &out.y_next,
                &out.x_next,
                &out.xi,
                &out.eta,
                map,
                set.layout(),
                gamma,
            )?;
            if config.diagnostics == DiagnosticsMode::Strict {
                check_strict(&d, gamma, alpha)?;
                for p in [&out.y_next, &out.x_next] {
                    if !set.contains(p) {
                        return Err(Error::Diagnostics {
                            t,
                            check: "iterate feasibility",
                            lhs: f64::NAN,
                            rhs: tol::FEASIBILITY,
                        });
                    }
                }
            }
            Some(d)
        } else {
            None
        };

        for (s, yi) in y_sum.iter_mut().zip(out.y_next.coords()) {
            *s += yi;
        }
        let y_avg = Vector::new(y_sum.iter().map(|s| s / (t + 1) as f64).collect())?;

        trace.records.push(StepRecord {
            t,
            x: out.x_next.clone(),
            y: out.y_next.clone(),
            y_avg,
            wall_nanos: started.elapsed().as_nanos() as u64,
            map_evals: trace.map_evals,
            diagnostics,
        });

        if config.method == Method::Popov {
            f_y = Some(out.eta.clone());
        }
        x = out.x_next;
    }

    if config.diagnostics == DiagnosticsMode::Strict
        && gamma <= alpha / (2.0 * problem.lipschitz().max(f64::MIN_POSITIVE)) * (1.0 + 1e-12)
    {
        let eps_sum = trace.eps_sum().expect("diagnostics recorded every step");
        let cap = 2.0 * gamma * gamma * problem.lipschitz().powi(2) / alpha * y0.dist2(&x0).powi(2);
        if eps_sum > cap + tol::EPS_SUM_SLACK {
            return Err(Error::Diagnostics {
                t: config.max_iters - 1,
                check: "telescoped eps sum bound",
                lhs: eps_sum,
                rhs: cap + tol::EPS_SUM_SLACK,
            });
        }
    }

    Ok(trace)
}
