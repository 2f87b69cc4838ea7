//! The ε-sweep: one independent solver run per dissipation scale.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::rates::{metric, METRICS};
use crate::energy::{EnergyProbe, EnergyReport};
use crate::solver::{run, BoundaryData, Grid, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Aborted,
}

/// Bookkeeping for one run; one row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub eps: f64,
    pub a_eps: f64,
    pub status: RunStatus,
    pub steps: usize,
    pub t_final: f64,
    pub worst_mass_defect: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub record: RunRecord,
    /// Every observation, including the start time and `T`.
    pub reports: Vec<EnergyReport>,
}

pub fn solver_config(config: &SweepConfig, eps: f64) -> Result<SolverConfig, String> {
    let wave = config.wave().map_err(|e| e.to_string())?;
    let eos = config.eos(eps).map_err(|e| e.to_string())?;
    let grid = Grid::new(wave.halfwidth, config.cells).map_err(|e| e.to_string())?;
    let sc = SolverConfig {
        grid,
        eos,
        boundary: BoundaryData::from_wave(&wave),
        cfl: config.cfl,
        final_time: config.final_time,
        init: config.init_mode(&grid),
        output_times: config.probe_times.clone(),
        reconstruction: config.reconstruction,
    };
    sc.validate().map_err(|e| e.to_string())?;
    Ok(sc)
}

/// Runs a single `ε`. Failures, including positivity aborts, end up in the
/// record rather than as an error.
pub fn run_single(config: &SweepConfig, eps: f64) -> RunResult {
    let mut record = RunRecord {
        eps,
        a_eps: config.a_rule.a_of(eps),
        status: RunStatus::Aborted,
        steps: 0,
        t_final: f64::NAN,
        worst_mass_defect: f64::NAN,
        message: String::new(),
    };
    let setup = solver_config(config, eps).and_then(|sc| {
        let wave = config.wave().map_err(|e| e.to_string())?;
        let probe = EnergyProbe::new(wave, sc.eos)?;
        Ok((sc, wave, probe))
    });
    let (sc, wave, mut probe) = match setup {
        Ok(s) => s,
        Err(msg) => {
            record.message = msg;
            return RunResult { record, reports: Vec::new() };
        }
    };
    match run(&sc, &wave, &mut probe) {
        Ok(summary) => {
            record.status = RunStatus::Completed;
            record.steps = summary.steps;
            record.t_final = summary.t_final;
            record.worst_mass_defect = summary.ledger.worst_step_defect;
        }
        Err(e) => {
            record.t_final = probe.reports.last().map_or(f64::NAN, |r| r.t);
            record.message = e.to_string();
        }
    }
    RunResult { record, reports: probe.reports }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub probe_times: Vec<f64>,
    /// In the order of the configured `ε` list.
    pub runs: Vec<RunResult>,
    pub cell_width: f64,
}

/// Runs every `ε` of the configuration, up to one worker thread per `ε`.
/// Results do not depend on scheduling.
pub fn sweep(config: &SweepConfig) -> SweepOutcome {
    let n = config.eps.len();
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunResult>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let result = run_single(config, config.eps[k]);
                slots.lock().expect("no worker panicked")[k] = Some(result);
            });
        }
    });
    let runs = slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every eps was run"))
        .collect();
    let cell_width = config
        .wave()
        .ok()
        .and_then(|w| Grid::new(w.halfwidth, config.cells).ok())
        .map_or(f64::NAN, |g| g.h);
    SweepOutcome {
        probe_times: config.probe_times.clone(),
        runs,
        cell_width,
    }
}

/// A metric that grew while `ε` decreased.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub t: f64,
    pub metric: &'static str,
    pub eps_larger: f64,
    pub eps_smaller: f64,
    pub value_larger_eps: f64,
    pub value_smaller_eps: f64,
}

/// Checks that each metric is non-increasing along decreasing `ε` at every
/// probe time. Rows are taken in table order per time.
pub fn monotonicity_violations(table: &[EnergyReport]) -> Vec<MonotonicityViolation> {
    let mut times: Vec<f64> = Vec::new();
    for r in table {
        if !times.contains(&r.t) {
            times.push(r.t);
        }
    }
    let mut out = Vec::new();
    for &t in &times {
        let mut rows: Vec<&EnergyReport> = table.iter().filter(|r| r.t == t).collect();
        rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        for name in METRICS {
            for w in rows.windows(2) {
                let (a, b) = (metric(w[0], name).unwrap(), metric(w[1], name).unwrap());
                if b > a || b.is_nan() {
                    out.push(MonotonicityViolation {
                        t,
                        metric: name,
                        eps_larger: w[0].eps,
                        eps_smaller: w[1].eps,
                        value_larger_eps: a,
                        value_smaller_eps: b,
                    });
                }
            }
        }
    }
    out
}

impl SweepOutcome {
    /// The probe-time rows of all runs, in run order then time.
    pub fn aggregate(&self) -> Vec<EnergyReport> {
        self.runs
            .iter()
            .flat_map(|run| run.reports.iter().filter(|r| self.probe_times.contains(&r.t)).copied())
            .collect()
    }

    pub fn trajectories(&self) -> Vec<Vec<EnergyReport>> {
        self.runs
            .iter()
            .filter(|r| r.record.status == RunStatus::Completed)
            .map(|r| r.reports.clone())
            .collect()
    }

    pub fn aborted(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().map(|r| &r.record).filter(|r| r.status == RunStatus::Aborted)
    }

    /// Soft findings: under-resolved dissipation layers, and metrics that
    /// do not decrease with `ε`.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let min_eps = self.runs.iter().map(|r| r.record.eps).fold(f64::INFINITY, f64::min);
        if self.cell_width > min_eps / 4.0 {
            out.push(format!(
                "cell width h = {:.4e} exceeds min(eps)/4 = {:.4e}; the smallest dissipation layers are under-resolved",
                self.cell_width,
                min_eps / 4.0
            ));
        }
        for v in monotonicity_violations(&self.aggregate()) {
            out.push(format!(
                "{} at t = {} increases from {:.6e} (eps = {}) to {:.6e} (eps = {})",
                v.metric, v.t, v.value_larger_eps, v.eps_larger, v.value_smaller_eps, v.eps_smaller
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config_str;

    fn small(eps: &str) -> SweepConfig {
        parse_config_str(&format!(
            "[wave]\nrho_L = 1\ntheta_L = 1\nu_L = 1\nrho_R = 0.5\n[grid]\nN = 64\n[sweep]\neps = {eps}\nT = 0.05\nprobe_times = 0.02, 0.04\n"
        ))
        .unwrap()
    }

    #[test]
    fn single_eps_gives_one_row_per_probe() {
        let out = sweep(&small("0.1"));
        assert_eq!(out.runs.len(), 1);
        assert_eq!(out.runs[0].record.status, RunStatus::Completed);
        // start, two probes, T
        assert_eq!(out.runs[0].reports.len(), 4);
        let agg = out.aggregate();
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].t, 0.02);
        assert!(out.runs[0].record.worst_mass_defect < 1e-12);
    }

    #[test]
    fn runs_are_independent_of_list_order() {
        let both = sweep(&small("0.2, 0.1"));
        let single = sweep(&small("0.1"));
        assert_eq!(both.runs[1].reports, single.runs[0].reports);
    }

    #[test]
    fn violations_carry_witnesses() {
        let row = |eps, v| EnergyReport {
            eps,
            t: 0.1,
            e_rel_total: v,
            l1_rho: 0.0,
            l1_theta: 0.0,
            l1_m: 0.0,
            ballistic_total: 0.0,
            dissipation_accum: 0.0,
        };
        let v = monotonicity_violations(&[row(0.1, 1.0), row(0.2, 2.0), row(0.05, 1.5)]);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].eps_larger, v[0].eps_smaller), (0.1, 0.05));
    }
}
