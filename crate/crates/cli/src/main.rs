//! `rarefaction`: verification and convergence runs from the command line.
//!
//! Every subcommand prints one line per assertion and exits with status 0
//! exactly when all hard assertions pass.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rarefaction_nsf::check::{all_passed, Check};
use rarefaction_nsf::energy::{bregman_properties_check, uniform_bound_probe, UNIFORM_BOUND_RATIO};
use rarefaction_nsf::eos::{checks as eos_checks, EosParams};
use rarefaction_nsf::harness::report::{long_format, run_file_name, write_rows, RATE_COLUMNS};
use rarefaction_nsf::harness::{
    estimate_rates, monotonicity_violations, parse_config, read_report, run_single, sweep, write_report, ReportTables,
    RunStatus, SweepConfig,
};
use rarefaction_nsf::inequality::{certify, IneqGrid};
use rarefaction_nsf::solver::Grid;

/// Largest relative per-step mass imbalance accepted from a run.
const MASS_DEFECT_TOL: f64 = 1e-10;

const CONFIG_HELP: &str = "\
Configuration files are INI-style with '#' comments:

  [wave]    rho_L, theta_L, u_L, rho_R (required); family = 1 | 3 (1);
            margin (0.2): extra domain half-width fraction
  [grid]    N (1600); cfl (0.8); reconstruction = muscl | first-order (muscl);
            init = mollified | exact (mollified); init_width (max(4h, 0.01L));
            t0 (required with init = exact)
  [sweep]   eps (0.2, 0.1, 0.05, 0.025), strictly decreasing;
            a_rule = square | zero | power P (square, a = eps^2);
            T (0.5); probe_times (0.2T, 0.4T, 0.6T, 0.8T);
            mu_bar (1), eta_bar (0), kappa_bar (1), beta (6.5)
  [output]  dir (out)

Defaults in parentheses.";

#[derive(Parser)]
#[command(name = "rarefaction", version, about = "Rarefaction waves in the vanishing-dissipation limit", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural checks of the equation of state and the relative energy.
    VerifyEos {
        /// Junction value; repeat for several. Default 0.1, 1, 10.
        #[arg(long)]
        ztilde: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        bregman_samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Grid certification of the stability inequality.
    VerifyInequality {
        /// Junction value; repeat for several. Default 0.1, 1, 10.
        #[arg(long)]
        ztilde: Vec<f64>,
        /// Points per axis.
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Write the report rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample the exact wave at time T on the solver grid (CSV on stdout).
    Wave {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "t")]
        t: f64,
    },
    /// One solver run at dissipation scale E.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// The full eps-sweep with report files.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides [output] dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-read a sweep directory and check it is self-consistent.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VerifyEos { ztilde, eps, bregman_samples, seed } => verify_eos(&ztilde, eps, bregman_samples, seed),
        Command::VerifyInequality { ztilde, points, csv } => verify_inequality(&ztilde, points, csv.as_deref()),
        Command::Wave { config, t } => wave(&config, t),
        Command::Simulate { config, eps } => simulate(&config, eps),
        Command::Sweep { config, out } => run_sweep(&config, out),
        Command::Report { input } => report(&input),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some hard assertions failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn ztilde_list(given: &[f64]) -> Vec<f64> {
    if given.is_empty() {
        vec![0.1, 1.0, 10.0]
    } else {
        given.to_vec()
    }
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{c}");
    }
}

fn verify_eos(ztilde: &[f64], eps: f64, samples: usize, seed: u64) -> Result<bool> {
    let mut ok = true;
    for zt in ztilde_list(ztilde) {
        let params = EosParams::new(zt, eps)?;
        println!("# Ztilde = {zt}, eps = {eps}, a = {}", params.a_eps);
        let mut checks = eos_checks::verify(&params, seed);
        let bregman = bregman_properties_check(&params, samples, seed);
        checks.extend(bregman.checks());
        print_checks(&checks);
        println!("[INFO] {}", bregman.absolute_distance_check());
        ok &= all_passed(&checks);
    }
    Ok(ok)
}

fn verify_inequality(ztilde: &[f64], points: usize, csv: Option<&Path>) -> Result<bool> {
    let grid = IneqGrid {
        y_points: points,
        z_points: points,
        big_y_points: points,
        ..IneqGrid::default()
    };
    let mut ok = true;
    let mut buffer = Vec::new();
    for (k, zt) in ztilde_list(ztilde).into_iter().enumerate() {
        let start = std::time::Instant::now();
        let report = certify(&grid, zt)?;
        println!("{report}");
        println!("  elapsed {:.2} s", start.elapsed().as_secs_f64());
        ok &= report.passed();
        let mut rows = Vec::new();
        report.write_csv(&mut rows)?;
        // keep a single header across Ztilde values
        let text = String::from_utf8(rows)?;
        let body = if k == 0 { text.as_str() } else { text.split_once('\n').map_or("", |(_, b)| b) };
        buffer.extend_from_slice(body.as_bytes());
    }
    if let Some(path) = csv {
        std::fs::write(path, &buffer).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ok)
}

fn load(path: &Path) -> Result<SweepConfig> {
    Ok(parse_config(path)?)
}

fn wave(path: &Path, t: f64) -> Result<bool> {
    let config = load(path)?;
    if t.is_nan() || t <= 0.0 {
        bail!("--t must be > 0, found {t}");
    }
    let w = config.wave()?;
    let grid = Grid::new(w.halfwidth, config.cells)?;
    let mut out = csv::Writer::from_writer(std::io::stdout().lock());
    out.write_record(["x", "rho", "theta", "u"])?;
    let mut entropy_dev = 0.0f64;
    let mut worst_du = f64::INFINITY;
    let mut prev_u = None;
    for x in grid.centers() {
        let s = w.evaluate(t, x)?;
        out.write_record([x, s.rho, s.theta, s.u].map(|v| v.to_string()))?;
        entropy_dev = entropy_dev.max((1.5 * s.theta.ln() - s.rho.ln() - w.s_const).abs());
        if let Some(p) = prev_u {
            worst_du = worst_du.min(s.u - p);
        }
        prev_u = Some(s.u);
    }
    out.flush()?;
    let checks = [
        Check::at_most("entropy deviation from the constant", entropy_dev, 1e-12),
        Check::at_least("smallest velocity increment between cells", worst_du, 0.0),
    ];
    for c in &checks {
        eprintln!("{c}");
    }
    Ok(all_passed(&checks))
}

fn simulate(path: &Path, eps: f64) -> Result<bool> {
    let config = load(path)?;
    let run = run_single(&config, eps);
    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    let file = config.output_dir.join(run_file_name(eps));
    write_rows(std::fs::File::create(&file)?, &rarefaction_nsf::energy::REPORT_COLUMNS, &run.reports)?;
    let r = &run.record;
    println!("# eps = {eps}, a = {}, {} steps, wrote {}", r.a_eps, r.steps, file.display());
    for rep in &run.reports {
        println!(
            "t = {:<8} E_rel = {:.6e}  L1(rho) = {:.6e}  L1(theta) = {:.6e}  L1(m) = {:.6e}",
            rep.t, rep.e_rel_total, rep.l1_rho, rep.l1_theta, rep.l1_m
        );
    }
    let completed = r.status == RunStatus::Completed;
    let mut status = Check::at_least("run reached T", r.t_final, config.final_time);
    status.passed &= completed;
    if !completed {
        status = status.with_note(r.message.clone());
    }
    let checks = [status, Check::at_most("per-step mass defect", r.worst_mass_defect, MASS_DEFECT_TOL)];
    print_checks(&checks);
    Ok(all_passed(&checks))
}

fn run_sweep(path: &Path, out: Option<PathBuf>) -> Result<bool> {
    let mut config = load(path)?;
    if let Some(dir) = out {
        config.output_dir = dir;
    }
    let start = std::time::Instant::now();
    let outcome = sweep(&config);
    let aggregate = outcome.aggregate();
    let rates = estimate_rates(&aggregate);
    let tables = ReportTables::new(&outcome.runs, aggregate, rates);
    let written = write_report(&config.output_dir, &outcome.runs, &tables)?;
    std::fs::write(config.output_dir.join("config.ini"), config.to_ini())?;
    println!(
        "# {} runs in {:.1} s, {} files in {}",
        outcome.runs.len(),
        start.elapsed().as_secs_f64(),
        written.len() + 1,
        config.output_dir.display()
    );

    let mut checks = Vec::new();
    for r in &outcome.runs {
        let r = &r.record;
        let mut c = Check::at_most(format!("eps = {}: per-step mass defect", r.eps), r.worst_mass_defect, MASS_DEFECT_TOL);
        if r.status == RunStatus::Aborted {
            c.passed = false;
            c = c.with_note(format!("aborted: {}", r.message));
        }
        checks.push(c);
    }
    print_checks(&checks);
    for w in outcome.warnings() {
        println!("[WARN] {w}");
    }
    for rate in tables.rates.iter().filter(|r| r.metric == "E_rel_total") {
        println!("[INFO] E_rel_total slope at t = {}: {:.4} (rms residual {:.2e})", rate.t, rate.slope, rate.rms_residual);
    }
    let bound = uniform_bound_probe(&outcome.trajectories(), true);
    println!(
        "[INFO] uniform ballistic bound C = {:.4e}, worst ratio {:.4} (limit {UNIFORM_BOUND_RATIO})",
        bound.fitted_c,
        bound.worst_ratio()
    );
    Ok(all_passed(&checks))
}

fn report(dir: &Path) -> Result<bool> {
    let tables = read_report(dir)?;
    println!(
        "# {} runs, {} aggregate rows, {} rate rows",
        tables.runs.len(),
        tables.aggregate.len(),
        tables.rates.len()
    );
    let rates = estimate_rates(&tables.aggregate);
    let render = |rows: &[_]| -> Result<String> {
        let mut buf = Vec::new();
        write_rows(&mut buf, &RATE_COLUMNS, rows)?;
        Ok(String::from_utf8(buf)?)
    };
    let checks = [
        Check::at_most(
            "stored rates differ from a refit of aggregate.csv (rows)",
            (render(&rates)? != render(&tables.rates)?) as u8 as f64,
            0.0,
        ),
        Check::at_most(
            "long.csv differs from aggregate.csv (rows)",
            (format!("{:?}", long_format(&tables.aggregate)) != format!("{:?}", tables.long)) as u8 as f64,
            0.0,
        ),
    ];
    print_checks(&checks);
    for r in &tables.runs {
        if r.status == RunStatus::Aborted {
            println!("[WARN] eps = {} aborted at t = {}: {}", r.eps, r.t_final, r.message);
        }
    }
    for v in monotonicity_violations(&tables.aggregate) {
        println!(
            "[WARN] {} at t = {} increases from {:.6e} (eps = {}) to {:.6e} (eps = {})",
            v.metric, v.t, v.value_larger_eps, v.eps_larger, v.value_smaller_eps, v.eps_smaller
        );
    }
    let mut stdout = std::io::stdout().lock();
    for r in &tables.rates {
        writeln!(stdout, "[INFO] t = {} {}: slope {:.4}, points {} {}", r.t, r.metric, r.slope, r.points, r.note)?;
    }
    Ok(all_passed(&checks))
}
