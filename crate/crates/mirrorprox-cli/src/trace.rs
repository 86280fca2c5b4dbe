//! Trace CSV format: one `# mirrorprox trace` metadata line, a header, then
//! one row per logged iteration. The final iteration may carry a second row
//! with the grid oracle's value. All content is deterministic for a given
//! problem, config, and seed, so identical runs produce identical bytes.

use mirrorprox::error::{Error, Result};
use std::path::Path;

pub const HEADER: &str = "iter,gap_estimate,gap_method,bound,map_evals";

#[derive(Debug, Clone)]
pub struct TraceMeta {
    pub method: String,
    pub mirror: String,
    pub gamma: f64,
    pub iters: usize,
    pub seed: u64,
    pub lipschitz: f64,
    pub alpha: f64,
    /// Problem label; always the last metadata field so it may contain
    /// spaces (e.g. file paths).
    pub problem: String,
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iter: usize,
    pub gap_estimate: f64,
    pub gap_method: String,
    /// Rate bound for this horizon; empty in the file when the step size
    /// is not the prescribed one.
    pub bound: Option<f64>,
    pub map_evals: usize,
}

#[derive(Debug, Clone)]
pub struct TraceFile {
    pub meta: TraceMeta,
    pub rows: Vec<TraceRow>,
}

pub fn render(meta: &TraceMeta, rows: &[TraceRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# mirrorprox trace method={} mirror={} gamma={:e} iters={} seed={} lipschitz={:e} alpha={:e} problem={}\n",
        meta.method,
        meta.mirror,
        meta.gamma,
        meta.iters,
        meta.seed,
        meta.lipschitz,
        meta.alpha,
        meta.problem
    ));
    out.push_str(HEADER);
    out.push('\n');
    for row in rows {
        let bound = match row.bound {
            Some(b) => format!("{b:e}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{:e},{},{},{}\n",
            row.iter, row.gap_estimate, row.gap_method, bound, row.map_evals
        ));
    }
    out
}

fn parse_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}:{line}: {msg}", path.display()))
}

pub fn parse(text: &str, path: &Path) -> Result<TraceFile> {
    let mut lines = text.lines().enumerate();

    let (_, meta_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty trace file"))?;
    let meta = parse_meta(meta_line).map_err(|m| parse_err(path, 1, m))?;

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing header row"))?;
    if header != HEADER {
        return Err(parse_err(
            path,
            2,
            format!("expected header {HEADER:?}, got {header:?}"),
        ));
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let iter: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad iter {:?}", fields[0])))?;
        let gap_estimate: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad gap_estimate {:?}", fields[1])))?;
        let gap_method = fields[2].to_string();
        if gap_method != "sampling" && gap_method != "grid" {
            return Err(parse_err(
                path,
                lineno,
                format!("bad gap_method {gap_method:?}"),
            ));
        }
        let bound = if fields[3].is_empty() {
            None
        } else {
            Some(
                fields[3]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, format!("bad bound {:?}", fields[3])))?,
            )
        };
        let map_evals: usize = fields[4]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad map_evals {:?}", fields[4])))?;
        rows.push(TraceRow {
            iter,
            gap_estimate,
            gap_method,
            bound,
            map_evals,
        });
    }
    Ok(TraceFile { meta, rows })
}

fn parse_meta(line: &str) -> std::result::Result<TraceMeta, String> {
    let rest = line
        .strip_prefix("# mirrorprox trace ")
        .ok_or("missing \"# mirrorprox trace\" metadata line")?;
    let mut method = None;
    let mut mirror = None;
    let mut gamma = None;
    let mut iters = None;
    let mut seed = None;
    let mut lipschitz = None;
    let mut alpha = None;

    // `problem=` is last and may contain spaces
    let (head, tail) = rest
        .split_once("problem=")
        .ok_or("metadata missing field problem")?;
    let problem = tail.to_string();
    for pair in head.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("bad metadata token {pair:?}"))?;
        let parse_f = || -> std::result::Result<f64, String> {
            value.parse().map_err(|_| format!("bad {key} {value:?}"))
        };
        match key {
            "method" => method = Some(value.to_string()),
            "mirror" => mirror = Some(value.to_string()),
            "gamma" => gamma = Some(parse_f()?),
            "iters" => iters = Some(value.parse().map_err(|_| format!("bad iters {value:?}"))?),
            "seed" => seed = Some(value.parse().map_err(|_| format!("bad seed {value:?}"))?),
            "lipschitz" => lipschitz = Some(parse_f()?),
            "alpha" => alpha = Some(parse_f()?),
            other => return Err(format!("unknown metadata field {other:?}")),
        }
    }
    Ok(TraceMeta {
        method: method.ok_or("metadata missing field method")?,
        mirror: mirror.ok_or("metadata missing field mirror")?,
        gamma: gamma.ok_or("metadata missing field gamma")?,
        iters: iters.ok_or("metadata missing field iters")?,
        seed: seed.ok_or("metadata missing field seed")?,
        lipschitz: lipschitz.ok_or("metadata missing field lipschitz")?,
        alpha: alpha.ok_or("metadata missing field alpha")?,
        problem,
    })
}
