//! Implementations of the five subcommands.

use crate::trace::{self, TraceMeta, TraceRow};
use crate::{svg, GapArgs, GenerateArgs, PlotArgs, ProblemArgs, SolveArgs, VerifyArgs};
use mirrorprox::error::{Error, Result};
use mirrorprox::rng::{seeded, standard_exponential, standard_normal, ChaCha8Rng};
use mirrorprox::{
    estimate_gap_sampling, gap_grid_oracle, generate_game, load_spec, matching_pennies, save_spec,
    symmetric_eigenvalues, theorem_bound, DiagnosticsMode, DualPoint, Method, MirrorKind,
    MirrorMap, SolverConfig, VIProblem, Vector,
};
use std::path::Path;

fn load_problem(args: &ProblemArgs) -> Result<(VIProblem, String)> {
    if let Some(path) = &args.problem {
        let spec = load_spec(path)?;
        return Ok((spec.to_problem()?, path.display().to_string()));
    }
    if args.pennies {
        return Ok((
            matching_pennies().to_problem()?,
            "matching-pennies".to_string(),
        ));
    }
    if let Some(seed) = args.gen_seed {
        let spec = generate_game(seed, args.eig[0], args.eig[1])?;
        let label = format!("gen:{seed}:[{},{}]", args.eig[0], args.eig[1]);
        return Ok((spec.to_problem()?, label));
    }
    Err(Error::Contract(
        "no problem source: pass --problem FILE, --pennies, or --gen-seed SEED".into(),
    ))
}

fn parse_point(text: &str, dim: usize) -> Result<Vector> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Contract(format!("bad coordinate {tok:?} in point {text:?}")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: coords.len(),
        });
    }
    Vector::new(coords)
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let spec = generate_game(args.seed, args.eig[0], args.eig[1])?;
    save_spec(&spec, &args.out)?;
    let eigs = symmetric_eigenvalues(&spec.mapping_matrix().symmetric_part());
    println!("wrote {}", args.out.display());
    println!("L_computed = {:e}", spec.l_computed);
    println!(
        "symmetric-part eigenvalues = [{}]",
        eigs.iter()
            .map(|e| format!("{e:.6e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

/// Iterations at which the gap is estimated: every `gap_every`-th plus the
/// final one.
fn logged_iters(iters: usize, gap_every: usize) -> Vec<usize> {
    let mut logged: Vec<usize> = (1..=iters).filter(|t| t % gap_every == 0).collect();
    if logged.last() != Some(&iters) {
        logged.push(iters);
    }
    logged
}

pub fn solve(args: SolveArgs) -> Result<()> {
    if args.iters == 0 {
        return Err(Error::Contract("--iters must be at least 1".into()));
    }
    if args.gap_every == 0 {
        return Err(Error::Contract("--gap-every must be at least 1".into()));
    }
    let (problem, label) = load_problem(&args.problem)?;
    let map = MirrorMap::of_kind(args.mirror.into());
    let mut config = SolverConfig::new(args.method.into(), map);
    config.gamma = crate::parse_gamma(&args.gamma)?;
    config.max_iters = args.iters;
    if let Some(s) = &args.x0 {
        config.x0 = Some(parse_point(s, problem.dim())?);
    }
    if let Some(s) = &args.y0 {
        config.y0 = Some(parse_point(s, problem.dim())?);
    }
    config.diagnostics = if args.strict {
        DiagnosticsMode::Strict
    } else {
        DiagnosticsMode::Off
    };

    let trace = mirrorprox::run(&problem, &config)?;
    let gamma = trace.info.gamma;

    let mut rows = Vec::new();
    for t in logged_iters(args.iters, args.gap_every) {
        let y_avg = trace.y_avg_at(t).expect("logged iteration inside trace");
        let bound = theorem_bound(&problem, &map, gamma, t, &trace.x0, &trace.y0).ok();
        let map_evals = trace.records[t - 1].map_evals;
        let sampled = estimate_gap_sampling(&problem, y_avg, args.gap_samples, args.seed)?;
        rows.push(TraceRow {
            iter: t,
            gap_estimate: sampled.value,
            gap_method: "sampling".into(),
            bound,
            map_evals,
        });
        if t == args.iters && problem.set().block_sizes() == [2, 2] {
            let grid = gap_grid_oracle(&problem, y_avg, args.gap_grid_step)?;
            rows.push(TraceRow {
                iter: t,
                gap_estimate: grid.value,
                gap_method: "grid".into(),
                bound,
                map_evals,
            });
        }
    }

    let meta = TraceMeta {
        method: trace.info.method.to_string(),
        mirror: trace.info.mirror.to_string(),
        gamma,
        iters: args.iters,
        seed: args.seed,
        lipschitz: trace.info.lipschitz,
        alpha: trace.info.alpha,
        problem: label.clone(),
    };
    std::fs::write(&args.out, trace::render(&meta, &rows)).map_err(|e| Error::io(&args.out, e))?;

    println!(
        "problem = {label} (L = {:e}, dim = {})",
        trace.info.lipschitz,
        problem.dim()
    );
    println!(
        "method = {}/{}, gamma = {:e}, iters = {}",
        meta.method, meta.mirror, gamma, args.iters
    );
    for row in rows
        .iter()
        .rev()
        .take(2)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
    {
        if row.iter == args.iters {
            println!(
                "final {} gap = {:e}{}",
                row.gap_method,
                row.gap_estimate,
                match row.bound {
                    Some(b) => format!(" (bound {b:e})"),
                    None => String::new(),
                }
            );
        }
    }
    println!("map evaluations = {}", trace.map_evals);
    println!("wall time = {} ms", trace.total_wall_nanos() / 1_000_000);
    println!("wrote {}", args.out.display());
    Ok(())
}

pub fn gap(args: GapArgs) -> Result<()> {
    let (problem, label) = load_problem(&args.problem)?;
    let point = match &args.at {
        Some(s) => parse_point(s, problem.dim())?,
        None => problem.set().uniform_point(),
    };
    if !problem.set().contains(&point) {
        return Err(Error::Contract(format!(
            "point {:?} is not in the product of simplices",
            point.coords()
        )));
    }
    println!("problem = {label}");
    let sampled = estimate_gap_sampling(&problem, &point, args.gap_samples, args.seed)?;
    println!(
        "sampling gap = {:e} (n = {}, seed = {})",
        sampled.value, args.gap_samples, args.seed
    );
    if problem.set().block_sizes() == [2, 2] {
        let grid = gap_grid_oracle(&problem, &point, args.gap_grid_step)?;
        println!(
            "grid gap     = {:e} (step = {:e})",
            grid.value, args.gap_grid_step
        );
        println!("difference   = {:e}", sampled.value - grid.value);
        println!(
            "ordering     = sampling <= grid + 1e-9: {}",
            if sampled.value <= grid.value + 1e-9 {
                "OK"
            } else {
                "VIOLATED"
            }
        );
    } else {
        println!("grid gap     = n/a (needs two 2-dimensional blocks)");
    }
    Ok(())
}

/// One named check with its worst observed slack (`value <= limit` passes)
/// or a reason it does not apply.
enum CheckResult {
    Applies { worst: f64, limit: f64 },
    NotApplicable(&'static str),
}

struct Check {
    name: &'static str,
    result: CheckResult,
}

impl Check {
    fn passed(&self) -> bool {
        match self.result {
            CheckResult::Applies { worst, limit } => worst <= limit,
            CheckResult::NotApplicable(_) => true,
        }
    }
}

/// A start point distinct from uniform: each block puts 0.9 on one
/// coordinate (the first for even blocks, the last for odd ones).
fn tilted_point(problem: &VIProblem) -> Vector {
    let layout = problem.set().layout();
    let mut coords = vec![0.0; layout.dim()];
    for (b, block) in layout.blocks().enumerate() {
        let len = block.len();
        if len == 1 {
            coords[block.start] = 1.0;
            continue;
        }
        let heavy = if b % 2 == 0 {
            block.start
        } else {
            block.end - 1
        };
        for i in block.clone() {
            coords[i] = if i == heavy {
                0.9
            } else {
                0.1 / (len - 1) as f64
            };
        }
    }
    Vector::new(coords).expect("tilted point is finite")
}

/// Random interior feasible point via exponential spacings.
fn random_feasible(problem: &VIProblem, rng: &mut ChaCha8Rng) -> Vector {
    let layout = problem.set().layout();
    let mut coords = vec![0.0; layout.dim()];
    for block in layout.blocks() {
        let mut sum = 0.0;
        for i in block.clone() {
            coords[i] = standard_exponential(rng);
            sum += coords[i];
        }
        for i in block {
            coords[i] /= sum;
        }
    }
    Vector::new(coords).expect("normalized exponentials are finite")
}

fn feasibility_violation(problem: &VIProblem, x: &Vector) -> f64 {
    let layout = problem.set().layout();
    let mut worst = f64::NEG_INFINITY;
    for block in layout.blocks() {
        let mut sum = 0.0;
        for i in block {
            worst = worst.max(-x.coords()[i]);
            sum += x.coords()[i];
        }
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}

fn verify_combination(
    problem: &VIProblem,
    method: Method,
    kind: MirrorKind,
    args: &VerifyArgs,
) -> Result<bool> {
    let map = MirrorMap::of_kind(kind);
    let mut config = SolverConfig::new(method, map);
    config.gamma = crate::parse_gamma(&args.gamma)?;
    config.max_iters = args.iters;
    config.x0 = match &args.x0 {
        Some(s) => Some(parse_point(s, problem.dim())?),
        None => None,
    };
    config.y0 = match &args.y0 {
        Some(s) => Some(parse_point(s, problem.dim())?),
        None => Some(tilted_point(problem)),
    };
    config.diagnostics = DiagnosticsMode::Record;
    let trace = mirrorprox::run(problem, &config)?;
    let gamma = trace.info.gamma;
    let alpha = trace.info.alpha;
    let lips = trace.info.lipschitz;

    println!(
        "== {method} / {kind} (gamma = {gamma:e}, T = {}) ==",
        args.iters
    );

    let mut checks = Vec::new();
    let diag = |rec: &mirrorprox::StepRecord| rec.diagnostics.expect("diagnostics recorded");

    let worst_distance = trace
        .records
        .iter()
        .map(|r| diag(r).distance_slack(gamma, alpha))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "step-distance-bound",
        result: CheckResult::Applies {
            worst: worst_distance,
            limit: 1e-8,
        },
    });

    let worst_delta = trace
        .records
        .iter()
        .map(|r| diag(r).delta_le_eps_slack())
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "delta-below-eps",
        result: CheckResult::Applies {
            worst: worst_delta,
            limit: 1e-9,
        },
    });

    let worst_eps = trace
        .records
        .iter()
        .map(|r| diag(r).eps_bound_slack(gamma, alpha))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "eps-step-bound",
        result: CheckResult::Applies {
            worst: worst_eps,
            limit: 1e-8,
        },
    });

    // prox optimality residuals must be nonnegative; flip sign so that
    // "worst <= limit" means "most negative residual above -1e-6"
    let worst_residual = trace
        .records
        .iter()
        .map(|r| {
            let d = diag(r);
            (-d.opt_residual_y).max(-d.opt_residual_x)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "prox-optimality-residuals",
        result: CheckResult::Applies {
            worst: worst_residual,
            limit: 1e-6,
        },
    });

    let eps_sum_applies = gamma <= alpha / (2.0 * lips) * (1.0 + 1e-12);
    checks.push(Check {
        name: "eps-sum-bound",
        result: if eps_sum_applies {
            let dist0 = trace.y0.dist2(&trace.x0);
            let bound = 2.0 * gamma * gamma * lips * lips / alpha * dist0 * dist0;
            CheckResult::Applies {
                worst: trace.eps_sum().expect("diagnostics recorded") - bound,
                limit: 1e-6,
            }
        } else {
            CheckResult::NotApplicable("needs gamma <= alpha/(2 L)")
        },
    });

    let worst_feasibility = trace
        .records
        .iter()
        .flat_map(|r| [&r.x, &r.y, &r.y_avg])
        .chain([&trace.x0, &trace.y0])
        .map(|v| feasibility_violation(problem, v))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "iterate-feasibility",
        result: CheckResult::Applies {
            worst: worst_feasibility,
            limit: 1e-9,
        },
    });

    // prox nonexpansiveness on random triples drawn around this problem
    let mut rng = seeded(args.seed);
    let mut worst_prox = f64::NEG_INFINITY;
    for _ in 0..200 {
        let x = random_feasible(problem, &mut rng);
        let draw = |rng: &mut ChaCha8Rng| -> Result<DualPoint> {
            DualPoint::new(
                (0..problem.dim())
                    .map(|_| standard_normal(rng))
                    .collect::<Vec<_>>(),
            )
        };
        let xi = draw(&mut rng)?;
        let eta = draw(&mut rng)?;
        let py = map.prox_map(&x, &xi, problem.set())?;
        let pe = map.prox_map(&x, &eta, problem.set())?;
        worst_prox = worst_prox.max(py.dist2(&pe) - xi.sub(&eta).norm2() / alpha);
    }
    checks.push(Check {
        name: "prox-nonexpansiveness",
        result: CheckResult::Applies {
            worst: worst_prox,
            limit: 1e-8,
        },
    });

    let y_final = trace.final_y_avg().expect("at least one iteration");
    let sampled = estimate_gap_sampling(problem, y_final, args.gap_samples, args.seed)?;
    checks.push(Check {
        name: "gap-underestimation-ordering",
        result: if problem.set().block_sizes() == [2, 2] {
            let grid = gap_grid_oracle(problem, y_final, args.gap_grid_step)?;
            CheckResult::Applies {
                worst: sampled.value - grid.value,
                limit: 1e-9,
            }
        } else {
            CheckResult::NotApplicable("needs two 2-dimensional blocks")
        },
    });

    checks.push(Check {
        name: "rate-certification",
        result: match theorem_bound(problem, &map, gamma, args.iters, &trace.x0, &trace.y0) {
            Ok(bound) => CheckResult::Applies {
                worst: sampled.value - bound,
                limit: 0.0,
            },
            Err(_) => CheckResult::NotApplicable("needs gamma = alpha/(2 L)"),
        },
    });

    let mut all_passed = true;
    for check in &checks {
        match check.result {
            CheckResult::Applies { worst, limit } => {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{status} {:<32} worst slack {worst:+.3e} (limit {limit:.0e})",
                    check.name
                );
            }
            CheckResult::NotApplicable(reason) => {
                println!("N/A  {:<32} {reason}", check.name);
            }
        }
        all_passed &= check.passed();
    }
    Ok(all_passed)
}

pub fn verify(args: VerifyArgs) -> Result<()> {
    if args.iters == 0 {
        return Err(Error::Contract("--iters must be at least 1".into()));
    }
    let (problem, label) = load_problem(&args.problem)?;
    println!("problem = {label} (L = {:e})", problem.lipschitz());
    let methods: Vec<Method> = match args.method {
        Some(m) => vec![m.into()],
        None => vec![Method::Popov, Method::Korpelevich],
    };
    let mirrors: Vec<MirrorKind> = match args.mirror {
        Some(m) => vec![m.into()],
        None => vec![MirrorKind::Entropic, MirrorKind::Euclidean],
    };
    let mut failures = 0usize;
    for &method in &methods {
        for &kind in &mirrors {
            if !verify_combination(&problem, method, kind, &args)? {
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(Error::Validation(format!(
            "verify: {failures} combination(s) had failing checks"
        )));
    }
    println!("all checks passed");
    Ok(())
}

pub fn plot(args: PlotArgs) -> Result<()> {
    let mut files = Vec::new();
    for path in &args.traces {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        files.push((path.clone(), trace::parse(&text, path)?));
    }
    let rendered = svg::render(&files);
    std::fs::write(&args.out, rendered).map_err(|e| Error::io(&args.out, e))?;

    let csv_path = args.out.with_extension("csv");
    let mut csv = String::from("file,iter,gap_estimate,gap_method,bound\n");
    for (path, file) in &files {
        for row in &file.rows {
            let bound = match row.bound {
                Some(b) => format!("{b:e}"),
                None => String::new(),
            };
            csv.push_str(&format!(
                "{},{},{:e},{},{}\n",
                stem(path),
                row.iter,
                row.gap_estimate,
                row.gap_method,
                bound
            ));
        }
    }
    std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
    println!("wrote {} and {}", args.out.display(), csv_path.display());
    Ok(())
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
