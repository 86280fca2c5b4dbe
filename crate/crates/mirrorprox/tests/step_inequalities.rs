//! Full-run certification: the per-step inequalities behind the O(1/t)
//! rate hold along real trajectories of both methods and both geometries,
//! the eps sum obeys its telescoped bound, and the averaged iterate beats
//! the a priori rate bound at every logged horizon.

use mirrorprox::solver::step_diagnostics_with_duals;
use mirrorprox::{
    estimate_gap_sampling, generate_game, matching_pennies, popov_step, theorem_bound,
    DiagnosticsMode, Gamma, Method, MirrorMap, SolverConfig, Trace, VIProblem, Vector,
};

fn problems() -> Vec<(&'static str, VIProblem)> {
    vec![
        ("matching-pennies", matching_pennies().to_problem().unwrap()),
        (
            "generated-42",
            generate_game(42, 0.0, 100.0).unwrap().to_problem().unwrap(),
        ),
    ]
}

fn tilted_start() -> Vector {
    Vector::new(vec![0.9, 0.1, 0.1, 0.9]).unwrap()
}

fn assert_step_inequalities(name: &str, trace: &Trace) {
    let gamma = trace.info.gamma;
    let alpha = trace.info.alpha;
    for rec in &trace.records {
        let d = rec.diagnostics.expect("diagnostics recorded");
        assert!(
            d.distance_slack(gamma, alpha) <= 1e-8,
            "{name} t={}: ||y-x|| exceeds (gamma/alpha)||xi-eta|| by {}",
            d.t,
            d.distance_slack(gamma, alpha)
        );
        assert!(
            d.delta_le_eps_slack() <= 1e-9,
            "{name} t={}: delta {} > eps {}",
            d.t,
            d.delta,
            d.eps
        );
        assert!(
            d.eps_bound_slack(gamma, alpha) <= 1e-8,
            "{name} t={}: eps exceeds its step bound by {}",
            d.t,
            d.eps_bound_slack(gamma, alpha)
        );
        assert!(
            d.opt_residual_y >= -1e-6 && d.opt_residual_x >= -1e-6,
            "{name} t={}: prox optimality residuals {} / {}",
            d.t,
            d.opt_residual_y,
            d.opt_residual_x
        );
    }
}

#[test]
fn per_step_inequalities_hold_on_all_method_mirror_combinations() {
    for (pname, problem) in problems() {
        for method in [Method::Popov, Method::Korpelevich] {
            for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
                let mut config = SolverConfig::new(method, map);
                config.max_iters = 500;
                config.y0 = Some(tilted_start());
                config.diagnostics = DiagnosticsMode::Record;
                let trace = mirrorprox::run(&problem, &config).unwrap();
                let name = format!("{pname}/{method}/{}", map.kind());
                assert_step_inequalities(&name, &trace);
            }
        }
    }
}

#[test]
fn eps_sum_obeys_telescoped_bound_with_distinct_starts() {
    // gamma = alpha/(2L) for both methods so the summed bound applies
    for (pname, problem) in problems() {
        let lips = problem.lipschitz();
        for method in [Method::Popov, Method::Korpelevich] {
            for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
                let gamma = map.alpha() / (2.0 * lips);
                let mut config = SolverConfig::new(method, map);
                config.gamma = Gamma::Fixed(gamma);
                config.max_iters = 500;
                config.y0 = Some(tilted_start());
                config.diagnostics = DiagnosticsMode::Record;
                let trace = mirrorprox::run(&problem, &config).unwrap();
                let x0 = problem.set().uniform_point();
                let dist0 = tilted_start().dist2(&x0);
                let bound = 2.0 * gamma * gamma * lips * lips / map.alpha() * dist0 * dist0;
                let got = trace.eps_sum().unwrap();
                assert!(
                    got <= bound + 1e-6,
                    "{pname}/{method}/{}: eps sum {got} exceeds {bound}",
                    map.kind()
                );
            }
        }
    }
}

#[test]
fn strict_mode_accepts_honest_runs_of_every_combination() {
    for (_, problem) in problems() {
        for method in [Method::Popov, Method::Korpelevich] {
            for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
                let mut config = SolverConfig::new(method, map);
                config.max_iters = 200;
                config.y0 = Some(tilted_start());
                config.diagnostics = DiagnosticsMode::Strict;
                mirrorprox::run(&problem, &config).unwrap();
            }
        }
    }
}

#[test]
fn eps_minus_delta_is_the_y_prox_optimality_pairing() {
    // eps - delta = <gamma*xi - grad psi(x) + grad psi(y_next), x_next - y_next>,
    // which the y-prox optimality condition keeps nonnegative
    let problem = generate_game(42, 0.0, 100.0).unwrap().to_problem().unwrap();
    for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
        let gamma = map.alpha() / (2.0 * problem.lipschitz());
        let mut x = problem.set().uniform_point();
        let mut f_y = problem.eval_mapping(&tilted_start()).unwrap();
        for t in 0..100 {
            let step = popov_step(&x, &f_y, &problem, &map, gamma).unwrap();
            let d = step_diagnostics_with_duals(
                t,
                &x,
                &step.y_next,
                &step.x_next,
                &step.xi,
                &step.eta,
                &map,
                problem.set().layout(),
                gamma,
            )
            .unwrap();
            let grad_x = map.grad_psi(&x).unwrap();
            let grad_y = map.grad_psi(&step.y_next).unwrap();
            let pairing: f64 = step
                .x_next
                .coords()
                .iter()
                .zip(step.y_next.coords())
                .enumerate()
                .map(|(i, (xn, yn))| {
                    (gamma * step.xi.coords()[i] - grad_x.coords()[i] + grad_y.coords()[i])
                        * (xn - yn)
                })
                .sum();
            assert!(
                ((d.eps - d.delta) - pairing).abs() <= 1e-10,
                "t={t}: eps-delta {} vs pairing {}",
                d.eps - d.delta,
                pairing
            );
            assert!(pairing >= -1e-12, "t={t}: pairing {pairing} negative");
            x = step.x_next;
            f_y = step.eta;
        }
    }
}

#[test]
fn averaged_iterates_beat_the_rate_bound_at_every_logged_horizon() {
    let problem = generate_game(42, 0.0, 100.0).unwrap().to_problem().unwrap();
    for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
        let mut config = SolverConfig::new(Method::Popov, map);
        config.max_iters = 1000;
        let trace = mirrorprox::run(&problem, &config).unwrap();
        let gamma = trace.info.gamma;
        let x0 = problem.set().uniform_point();
        for horizon in [10usize, 100, 1000] {
            let y_avg = trace.y_avg_at(horizon).unwrap();
            let est = estimate_gap_sampling(&problem, y_avg, 20_000, 7).unwrap();
            let bound = theorem_bound(&problem, &map, gamma, horizon, &x0, &x0).unwrap();
            assert!(
                est.value <= bound,
                "{:?} T={horizon}: sampled gap {} exceeds bound {bound}",
                map.kind(),
                est.value
            );
        }
    }
}
