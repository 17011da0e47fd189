//! `pcmk`: batch front-end for the pseudo-cone Minkowski solver.
//!
//! Subcommands read a TOML problem file (version "1") and write a
//! machine-readable TOML report. Exit codes: 0 success, 2 invalid input,
//! 3 solver did not converge (report still written), 4 verification
//! failure.

mod problem;
mod report;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use pcmk_core::measures::{covolume_euler, covolume_radial, surface_measure};
use pcmk_core::oracle::nonuniqueness_pair;
use pcmk_core::solver::solve_minkowski;

use crate::problem::Problem;
use crate::report::ReportBuilder;

#[derive(Parser)]
#[command(name = "pcmk", version, about = "Weighted Minkowski problems on pseudo-cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Problem file (TOML, version "1").
    problem: PathBuf,
    /// Seed override for solver restarts and Monte Carlo suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance override for the solver.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output path; the report goes to standard output when omitted
    /// (for demo-nonuniqueness this names the SVG instead).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timing field so identical runs emit identical bytes.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the weighted Minkowski problem for the measure in the file.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate the surface area measure and covolume of the body in the
    /// file.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Tighten the body first; without it the facet-summation covolume
        /// of a slack body is refused.
        #[arg(long)]
        tighten: bool,
    },
    /// Run a verification suite against independent oracles.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// One of: mc, gradient, continuity, lemma71, lemma72.
        #[arg(long)]
        suite: String,
        /// Monte Carlo sample count (mc suite).
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Construct two distinct bodies with the same surface area measure.
    DemoNonuniqueness {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Solve { common } => run_solve(common),
        Command::Evaluate { common, tighten } => run_evaluate(common, *tighten),
        Command::Verify {
            common,
            suite,
            samples,
        } => verify::run(common, suite, *samples),
        Command::DemoNonuniqueness { common } => run_demo(common),
    };
    match code {
        Ok(c) => c,
        Err(message) => {
            eprintln!("pcmk: {message}");
            ExitCode::from(2)
        }
    }
}

pub(crate) fn load_problem(common: &CommonArgs) -> Result<Problem, String> {
    let text = std::fs::read_to_string(&common.problem)
        .map_err(|e| format!("cannot read {}: {e}", common.problem.display()))?;
    let mut p = problem::parse(&text)?;
    if let Some(seed) = common.seed {
        p.solver.seed = seed;
    }
    if let Some(tol) = common.tolerance {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(format!("tolerance {tol} outside (0,1)"));
        }
        p.solver.tolerance = tol;
    }
    Ok(p)
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), String> {
    debug_assert!(report::parse(text).is_ok(), "emitted report must parse");
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_solve(common: &CommonArgs) -> Result<ExitCode, String> {
    let p = load_problem(common)?;
    problem::require_solver_exponent(&p)?;
    let measure = p
        .measure
        .as_ref()
        .ok_or("solve requires a [[measure]] section")?;
    let t = Instant::now();
    let report = solve_minkowski(&p.cone, &p.weight, measure, &p.solver)
        .map_err(|e| format!("solve: {e}"))?;
    let timing = (!common.no_timing).then(|| t.elapsed().as_secs_f64());

    let mut rb = ReportBuilder::new("solve", p.solver.seed, timing);
    rb.echo_input(&p);
    rb.section("solution");
    rb.kv_bool("converged", report.converged);
    rb.kv_int("iterations", report.iterations as i64);
    rb.kv_int("restarts", report.restarts as i64);
    rb.kv_f64("lambda", report.lambda);
    rb.kv_vec("support", report.solution.support_numbers());
    rb.kv_f64("b_of_k", report.b_of_k);
    rb.kv_f64("lemma71_bound", report.lemma71_bound);
    rb.kv_bool("lemma71_ok", report.lemma71_ok);
    rb.kv_f64("max_residual", report.max_residual());
    rb.kv_vec("residuals", &report.residuals);
    rb.kv_vec("phi_trace", &report.phi_trace);
    rb.blank();
    rb.section("covolume");
    rb.kv_f64("euler", report.covolume_euler);
    rb.kv_f64("radial", report.covolume_radial);
    rb.kv_f64(
        "rel_gap",
        (report.covolume_euler - report.covolume_radial).abs() / report.covolume_euler,
    );
    rb.blank();
    rb.facets(&report.solution);
    emit(common, &rb.finish())?;
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn run_evaluate(common: &CommonArgs, tighten: bool) -> Result<ExitCode, String> {
    let p = load_problem(common)?;
    let body_raw = p.body.as_ref().ok_or("evaluate requires a [body] section")?;
    let body = if tighten {
        body_raw.tighten().map_err(|e| format!("tighten: {e}"))?
    } else {
        body_raw.clone()
    };
    let t = Instant::now();
    let s = surface_measure(&body, &p.weight, &p.quadrature)
        .map_err(|e| format!("surface measure: {e}"))?;
    // The facet-summation covolume demands a tightened representation; the
    // radial route does not care, so it is always reported.
    let euler = if p.weight.solver_valid() {
        match covolume_euler(&body, &p.weight, &p.quadrature) {
            Ok(v) => Ok(v.value),
            Err(pcmk_core::Error::NotTightened) => {
                Err("refused: body is not tightened (pass --tighten)".to_string())
            }
            Err(e) => return Err(format!("covolume: {e}")),
        }
    } else {
        Err(format!(
            "refused: q must lie in (n-1,n); got q = {}",
            p.weight.q()
        ))
    };
    let radial = if p.weight.solver_valid() {
        Some(
            covolume_radial(&body, &p.weight, &p.quadrature)
                .map_err(|e| format!("covolume: {e}"))?
                .value,
        )
    } else {
        None
    };
    let timing = (!common.no_timing).then(|| t.elapsed().as_secs_f64());

    let mut rb = ReportBuilder::new("evaluate", p.solver.seed, timing);
    rb.echo_input(&p);
    rb.section("surface_measure");
    rb.kv_vec("masses", &s.masses);
    rb.kv_f64("total", s.total);
    rb.blank();
    rb.section("covolume");
    match &euler {
        Ok(v) => rb.kv_f64("euler", *v),
        Err(msg) => rb.kv_str("euler_refused", msg),
    }
    if let Some(v) = radial {
        rb.kv_f64("radial", v);
    }
    rb.blank();
    rb.facets(&body);
    emit(common, &rb.finish())?;
    Ok(ExitCode::SUCCESS)
}

fn run_demo(common: &CommonArgs) -> Result<ExitCode, String> {
    let p = load_problem(common)?;
    problem::require_solver_exponent(&p)?;
    let t = Instant::now();
    let pair =
        nonuniqueness_pair(&p.weight, &p.quadrature).map_err(|e| format!("construction: {e}"))?;
    let verified = pair.verified(1e-8);
    let timing = (!common.no_timing).then(|| t.elapsed().as_secs_f64());

    let mut rb = ReportBuilder::new("demo-nonuniqueness", p.solver.seed, timing);
    rb.echo_input(&p);
    rb.section("pair");
    rb.kv_f64("t0", pair.t0);
    rb.kv_f64("t1", pair.t1);
    rb.kv_f64("shrink", pair.shrink);
    rb.kv_f64("mass_k", pair.mass_k);
    rb.kv_f64("mass_l", pair.mass_l);
    rb.kv_f64("hausdorff", pair.hausdorff);
    rb.kv_f64("trunc_height", pair.trunc_height);
    rb.kv_vec("k_support", pair.k.support_numbers());
    rb.kv_mat("l_base_vertices", &pair.l_base);
    rb.kv_bool("verified", verified);
    let text = rb.finish();

    debug_assert!(report::parse(&text).is_ok(), "emitted report must parse");
    if p.cone.dim() == 2 {
        if let Some(path) = &common.out {
            let k_trunc = pair
                .k
                .truncate(pair.trunc_height)
                .map_err(|e| format!("truncate: {e}"))?;
            let l_trunc = pair
                .l_truncated(&p.cone)
                .map_err(|e| format!("truncate: {e}"))?;
            let svg = svg::render_pair(&k_trunc, &l_trunc, p.cone.rays());
            std::fs::write(path, svg)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
    }
    print!("{text}");
    Ok(if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}
