//! Command-line surface: scenario-driven solves, factorizations, filtration
//! search, Green's function estimates, classification, basin rendering and
//! the acceptance suite.
//!
//! Exit codes: 0 success, 2 scenario/schema violation, 3 numeric failure,
//! 4 i/o failure. Flags override scenario fields (flag > file > default).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use nabasin::conjugation::{residual, solve_conjugation, ConjugationSolution};
use nabasin::dynamics::{
    classify_point, find_filtration_spec, green_functional_check, green_trace,
    lower_triangular_normalize_check, render_basin, write_pgm, Classification, FiltrationSpec,
    GreenStatus,
};
use nabasin::error::Error;
use nabasin::germ::GermMapJson;
use nabasin::maps::{lower_triangular_normalize, AutoSequence};
use nabasin::scenario::Scenario;
use nabasin::suite;

#[derive(Parser)]
#[command(
    name = "nabasin",
    about = "Non-autonomous basin toolkit: germ conjugation, weak-shift dynamics, Green's functions and basin rendering",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory (overrides the scenario's `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solver and Green tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Solve horizon override.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Seed override for seeded families and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (default: NABASIN_THREADS or all logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate the family by unitaries so every linear part is lower
    /// triangular, and report the triangularized linear data.
    Normalize,
    /// Solve the germ conjugation and emit the solution tables.
    Solve,
    /// Solve, then factor the target family (Hénon pair for k = 2, weak
    /// shifts for k >= 3) and verify the factors pointwise.
    Factorize,
    /// Search the filtration radius and sandwich constants of a perturbed
    /// weak-shift family.
    Filtration,
    /// Estimate Green's function values with certified tails at the probe
    /// points.
    Green,
    /// Classify the probe points as in-basin / escaping / undecided.
    Classify,
    /// Render the basin/escape classification over the scenario's slice.
    Render,
    /// Run the acceptance pack and report one line per criterion.
    Suite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("NABASIN_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("nabasin: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("nabasin: {err}");
            let code = match err {
                Error::Schema { .. } | Error::Parameter(_) => 2,
                Error::Io(_) => 4,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario, Error> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| Error::schema("--scenario", "a scenario file is required"))?;
    let text = std::fs::read_to_string(path)?;
    let mut sc = Scenario::from_json(&text)?;
    if let Some(tol) = cli.tol {
        sc.solver.tol = tol;
        sc.dynamics.green_tol = tol;
    }
    if let Some(h) = cli.horizon {
        sc.solver.horizon = h;
    }
    if let Some(s) = cli.seed {
        sc.seed = s;
    }
    if let Some(out) = &cli.out {
        sc.out_dir = out.to_string_lossy().into_owned();
    }
    Ok(sc)
}

fn out_dir(sc: &Scenario) -> Result<PathBuf, Error> {
    let dir = PathBuf::from(&sc.out_dir);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Write a file atomically: a temporary sibling is renamed into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_summary(
    dir: &Path,
    command: &str,
    status: &str,
    outputs: &[String],
    metrics: serde_json::Value,
) -> Result<(), Error> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let summary = json!({
        "command": command,
        "status": status,
        "timestamp": timestamp,
        "outputs": outputs,
        "metrics": metrics,
    });
    write_json(&dir.join("summary.json"), &summary)
}

/// Solve after ensuring lower-triangular linear parts, normalizing when the
/// scenario's family needs it.
fn solve_scenario(sc: &Scenario) -> Result<(AutoSequence, ConjugationSolution), Error> {
    let order = sc.solve_order()?;
    let mut seq = sc.sequence()?;
    let triangular = (0..sc.solver.horizon.min(8))
        .all(|n| seq.map(n).linear_part().is_lower_triangular(1e-9));
    if !triangular {
        seq = lower_triangular_normalize(&seq, sc.solver.horizon + 2)?;
    }
    let sol = solve_conjugation(&seq, order, sc.solver.horizon, sc.solver.tol)?;
    Ok((seq, sol))
}

fn filtration_for(sc: &Scenario) -> Result<FiltrationSpec, Error> {
    find_filtration_spec(&sc.perturbed_family()?)
}

fn run(cli: &Cli) -> Result<(), Error> {
    match cli.command {
        Command::Normalize => cmd_normalize(cli),
        Command::Solve => cmd_solve(cli),
        Command::Factorize => cmd_factorize(cli),
        Command::Filtration => cmd_filtration(cli),
        Command::Green => cmd_green(cli),
        Command::Classify => cmd_classify(cli),
        Command::Render => cmd_render(cli),
        Command::Suite => cmd_suite(cli),
    }
}

fn cmd_normalize(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let seq = sc.sequence()?;
    let horizon = sc.solver.horizon;
    let normalized = lower_triangular_normalize(&seq, horizon + 1)?;
    let check = lower_triangular_normalize_check(&seq, &normalized, horizon, sc.seed);
    let rows: Vec<serde_json::Value> = (0..horizon)
        .map(|n| {
            let lin = normalized.map(n).linear_part();
            let entries: Vec<Vec<[f64; 2]>> = (0..seq.k())
                .map(|i| (0..seq.k()).map(|j| [lin[(i, j)].re, lin[(i, j)].im]).collect())
                .collect();
            json!({"n": n, "linear_part": entries})
        })
        .collect();
    let report = json!({
        "k": seq.k(),
        "horizon": horizon,
        "orbit_norm_defect": check,
        "linear_parts": rows,
    });
    write_json(&dir.join("normalize.json"), &report)?;
    write_summary(
        &dir,
        "normalize",
        "ok",
        &["normalize.json".into()],
        json!({"orbit_norm_defect": check}),
    )?;
    println!("normalize: orbit-norm defect {check:.3e}");
    Ok(())
}

fn solution_json(sol: &ConjugationSolution) -> serde_json::Value {
    let h: Vec<GermMapJson> = sol.h_germs.iter().map(GermMapJson::from).collect();
    let g: Vec<GermMapJson> = (0..=sol.horizon)
        .map(|n| GermMapJson::from(&sol.g_germ(n)))
        .collect();
    json!({
        "k": sol.k,
        "order": sol.order,
        "horizon": sol.horizon,
        "residual": sol.residual,
        "bound_constant": sol.bound_constant,
        "top_degree_zero": sol.top_degree_zero,
        "per_degree_residual": sol.per_degree_residual,
        "h_germs": h,
        "g_germs": g,
    })
}

fn cmd_solve(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let (seq, sol) = solve_scenario(&sc)?;
    let recheck = residual(&sol, &seq, 0..sc.solver.horizon)?;
    write_json(&dir.join("solution.json"), &solution_json(&sol))?;
    let mut csv = String::from("degree,max_defect\n");
    for (d, v) in &sol.per_degree_residual {
        csv.push_str(&format!("{d},{v:e}\n"));
    }
    write_atomic(&dir.join("residuals.csv"), csv.as_bytes())?;
    write_summary(
        &dir,
        "solve",
        "ok",
        &["solution.json".into(), "residuals.csv".into()],
        json!({"residual": sol.residual, "recheck": recheck, "bound_constant": sol.bound_constant}),
    )?;
    println!(
        "solve: k = {}, order = {}, residual {:.3e} (recheck {recheck:.3e})",
        sol.k, sol.order, sol.residual
    );
    Ok(())
}

fn cmd_factorize(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let (_, sol) = solve_scenario(&sc)?;
    let mut rng_points: Vec<Vec<nabasin::Complex64>> = Vec::new();
    {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(sc.seed ^ 0xfac707);
        for _ in 0..200 {
            rng_points.push(
                (0..sol.k)
                    .map(|_| {
                        nabasin::Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
                    })
                    .collect(),
            );
        }
    }
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for n in 0..sc.solver.horizon.min(sol.horizon) {
        let g = sol.g_map(n);
        let factors: Vec<nabasin::maps::PolyMap> = if sol.k == 2 {
            let (a, c, p, q) = sol.henon_data(n).expect("k = 2 solution");
            let (first, second) = nabasin::maps::henon_factorize_k2(a, c, &p, &q)?;
            vec![second, first]
        } else {
            let t = sol.triangular_factors(n).expect("k >= 3 solution");
            nabasin::maps::shift_factorize(t)?
                .into_iter()
                .map(nabasin::maps::PolyMap::Shift)
                .collect()
        };
        let mut defect = 0.0f64;
        for z in &rng_points {
            let mut w = z.clone();
            for f in &factors {
                w = f.evaluate(&w);
            }
            let expect = g.evaluate(z);
            let scale = expect.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (x, y) in w.iter().zip(&expect) {
                defect = defect.max((x - y).norm() / scale);
            }
        }
        worst = worst.max(defect);
        rows.push(json!({"n": n, "factors": factors.len(), "pointwise_defect": defect}));
    }
    if worst > 1e-10 {
        return Err(Error::Convergence {
            residual: worst,
            tol: 1e-10,
            diagnostics: "factor composition deviates from the target map".into(),
        });
    }
    write_json(
        &dir.join("factorization.json"),
        &json!({"k": sol.k, "worst_pointwise_defect": worst, "per_n": rows}),
    )?;
    write_summary(
        &dir,
        "factorize",
        "ok",
        &["factorization.json".into()],
        json!({"worst_pointwise_defect": worst}),
    )?;
    println!("factorize: worst pointwise defect {worst:.3e}");
    Ok(())
}

fn spec_json(spec: &FiltrationSpec) -> serde_json::Value {
    json!({
        "k": spec.k,
        "degree": spec.degree,
        "radius": spec.radius,
        "m_low": spec.m_low,
        "m_high": spec.m_high,
        "m_tilde": spec.m_tilde,
    })
}

fn cmd_filtration(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let spec = filtration_for(&sc)?;
    write_json(&dir.join("filtration.json"), &spec_json(&spec))?;
    write_summary(
        &dir,
        "filtration",
        "ok",
        &["filtration.json".into()],
        spec_json(&spec),
    )?;
    println!(
        "filtration: R = {}, sandwich [{:.4}, {:.4}], log-scale constant {:.4}",
        spec.radius, spec.m_low, spec.m_high, spec.m_tilde
    );
    Ok(())
}

fn cmd_green(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let spec = filtration_for(&sc)?;
    let seq = sc.sequence()?;
    let points = sc.probe_points(spec.radius);
    let mut csv = String::from("point,n,sup_norm,green,tail\n");
    let mut rows = Vec::new();
    let mut functional = Vec::new();
    for (idx, z) in points.iter().enumerate() {
        let (est, trace) = green_trace(
            &seq,
            z,
            &spec,
            Some(sc.dynamics.r_tilde),
            sc.dynamics.green_tol,
            sc.dynamics.maxiter,
        )?;
        for row in &trace {
            csv.push_str(&format!(
                "{idx},{},{:e},{:e},{:e}\n",
                row.n, row.sup_norm, row.green_value, row.tail_bound
            ));
        }
        let status = match est.status {
            GreenStatus::Converged => "converged",
            GreenStatus::EscapedEarly => "escaped-early",
            GreenStatus::HitIterationCap => "hit-iteration-cap",
        };
        rows.push(json!({
            "point": idx,
            "value": est.value,
            "tail_bound": est.tail_bound,
            "iterations": est.iterations,
            "status": status,
        }));
        if sc.dynamics.period_check >= 1 {
            if let Ok(res) = green_functional_check(
                &seq,
                sc.dynamics.period_check,
                z,
                &spec,
                sc.dynamics.green_tol,
                sc.dynamics.maxiter,
            ) {
                functional.push(res);
            }
        }
    }
    let worst_functional = functional.iter().cloned().fold(0.0, f64::max);
    write_atomic(&dir.join("green.csv"), csv.as_bytes())?;
    write_json(
        &dir.join("green.json"),
        &json!({
            "spec": spec_json(&spec),
            "estimates": rows,
            "functional_equation": {
                "period": sc.dynamics.period_check,
                "checked": functional.len(),
                "worst_relative_residual": worst_functional,
            }
        }),
    )?;
    write_summary(
        &dir,
        "green",
        "ok",
        &["green.json".into(), "green.csv".into()],
        json!({"points": points.len(), "worst_functional_residual": worst_functional}),
    )?;
    println!(
        "green: {} points, worst functional-equation residual {worst_functional:.3e}",
        points.len()
    );
    Ok(())
}

fn cmd_classify(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let spec = filtration_for(&sc)?;
    let seq = sc.sequence()?;
    let points = sc.probe_points(spec.radius);
    let rows: Vec<serde_json::Value> = points
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let tag = classify_point(&seq, z, &spec, sc.dynamics.r_tilde, sc.dynamics.maxiter);
            let (name, at) = match tag {
                Classification::InBasin { at } => ("in-basin", Some(at)),
                Classification::Escaping { at } => ("escaping", Some(at)),
                Classification::Undecided { .. } => ("undecided", None),
            };
            json!({"point": idx, "tag": name, "at": at})
        })
        .collect();
    write_json(
        &dir.join("classifications.json"),
        &json!({"spec": spec_json(&spec), "points": rows}),
    )?;
    write_summary(
        &dir,
        "classify",
        "ok",
        &["classifications.json".into()],
        json!({"points": points.len()}),
    )?;
    println!("classify: {} points", points.len());
    Ok(())
}

fn cmd_render(cli: &Cli) -> Result<(), Error> {
    let sc = load_scenario(cli)?;
    let dir = out_dir(&sc)?;
    let spec = filtration_for(&sc)?;
    let seq = sc.sequence()?;
    let window = sc
        .render
        .clone()
        .ok_or_else(|| Error::schema("render", "render scenarios need a window"))?;
    let grids = render_basin(&seq, &window, &spec, sc.dynamics.r_tilde, sc.dynamics.maxiter)?;
    let class_path = dir.join("class.pgm");
    let time_path = dir.join("time.pgm");
    write_pgm(&class_path, grids.nx, grids.ny, &grids.class)?;
    write_pgm(&time_path, grids.nx, grids.ny, &grids.time)?;
    let basin = grids.class.iter().filter(|&&p| p == 255).count();
    let escaping = grids.class.iter().filter(|&&p| p == 0).count();
    let undecided = grids.class.len() - basin - escaping;
    write_json(
        &dir.join("render.json"),
        &json!({
            "window": window,
            "spec": spec_json(&spec),
            "r_tilde": sc.dynamics.r_tilde,
            "maxiter": sc.dynamics.maxiter,
            "counts": {"in_basin": basin, "escaping": escaping, "undecided": undecided},
        }),
    )?;
    write_summary(
        &dir,
        "render",
        "ok",
        &["class.pgm".into(), "time.pgm".into(), "render.json".into()],
        json!({"in_basin": basin, "escaping": escaping, "undecided": undecided}),
    )?;
    println!("render: {basin} in-basin, {escaping} escaping, {undecided} undecided");
    Ok(())
}

fn cmd_suite(cli: &Cli) -> Result<(), Error> {
    let reports = suite::run_all();
    let mut all_passed = true;
    for r in &reports {
        println!("{}", r.line());
        all_passed &= r.passed;
    }
    // Persist the report when an output directory is available.
    let dir = match (&cli.out, &cli.scenario) {
        (Some(out), _) => Some(out.clone()),
        (None, Some(path)) => load_scenario_quiet(path).map(|sc| PathBuf::from(sc.out_dir)),
        (None, None) => None,
    };
    if let Some(dir) = dir {
        std::fs::create_dir_all(&dir)?;
        let rows: Vec<serde_json::Value> = reports
            .iter()
            .map(|r| {
                json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail})
            })
            .collect();
        write_json(&dir.join("suite.json"), &json!({"criteria": rows}))?;
        write_summary(
            &dir,
            "suite",
            if all_passed { "ok" } else { "failed" },
            &["suite.json".into()],
            json!({"passed": reports.iter().filter(|r| r.passed).count(), "total": reports.len()}),
        )?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(Error::Inconclusive("one or more criteria failed".into()))
    }
}

fn load_scenario_quiet(path: &Path) -> Option<Scenario> {
    std::fs::read_to_string(path)
        .ok()
        .and_then(|text| Scenario::from_json(&text).ok())
}
