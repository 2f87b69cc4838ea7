//! Log-log least-squares convergence rates in `ε`.

use serde::{Deserialize, Serialize};

use crate::energy::EnergyReport;

pub const METRICS: [&str; 4] = ["E_rel_total", "L1_rho", "L1_theta", "L1_m"];

pub fn metric(r: &EnergyReport, name: &str) -> Option<f64> {
    match name {
        "E_rel_total" => Some(r.e_rel_total),
        "L1_rho" => Some(r.l1_rho),
        "L1_theta" => Some(r.l1_theta),
        "L1_m" => Some(r.l1_m),
        "ballistic_total" => Some(r.ballistic_total),
        "dissipation_accum" => Some(r.dissipation_accum),
        _ => None,
    }
}

/// Slope of `log(metric)` against `log(ε)` at one probe time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub t: f64,
    pub metric: String,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub rms_residual: f64,
    pub max_abs_residual: f64,
    pub points: usize,
    /// Excluded points or the reason no fit was possible.
    pub note: String,
}

pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub max_abs_residual: f64,
}

/// Ordinary least squares `y ≈ intercept + slope·x`. Needs two distinct `x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - intercept - slope * x).collect();
    Some(LineFit {
        slope,
        intercept,
        rms_residual: (res.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt(),
        max_abs_residual: res.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}

/// One estimate per (probe time, metric) in order of first appearance of
/// the time. Zero or non-finite values are left out and named in the note.
pub fn estimate_rates(table: &[EnergyReport]) -> Vec<RateEstimate> {
    let mut times: Vec<f64> = Vec::new();
    for r in table {
        if !times.contains(&r.t) {
            times.push(r.t);
        }
    }
    let mut out = Vec::new();
    for &t in &times {
        let rows: Vec<&EnergyReport> = table.iter().filter(|r| r.t == t).collect();
        for name in METRICS {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut excluded = Vec::new();
            for r in &rows {
                let v = metric(r, name).expect("known metric");
                if v > 0.0 && v.is_finite() && r.eps > 0.0 {
                    xs.push(r.eps.ln());
                    ys.push(v.ln());
                } else {
                    excluded.push(format!("eps={} ({v})", r.eps));
                }
            }
            let mut note = if excluded.is_empty() {
                String::new()
            } else {
                format!("excluded non-positive values: {}", excluded.join("; "))
            };
            let fit = if xs.len() >= MIN_FIT_POINTS { fit_line(&xs, &ys) } else { None };
            if fit.is_none() {
                let why = format!("no fit: {} usable points, need {MIN_FIT_POINTS} distinct eps", xs.len());
                note = if note.is_empty() { why } else { format!("{why}; {note}") };
            }
            let fit = fit.unwrap_or(LineFit {
                slope: f64::NAN,
                intercept: f64::NAN,
                rms_residual: f64::NAN,
                max_abs_residual: f64::NAN,
            });
            out.push(RateEstimate {
                t,
                metric: name.to_string(),
                slope: fit.slope,
                intercept: fit.intercept,
                rms_residual: fit.rms_residual,
                max_abs_residual: fit.max_abs_residual,
                points: xs.len(),
                note,
            });
        }
    }
    out
}
