//! Sampled structural checks of the equation of state, run by `verify-eos`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EosParams, ThermoState};
use crate::check::Check;

pub const JUNCTION_DELTA: f64 = 1e-8;
pub const JUNCTION_TOL: f64 = 1e-6;
pub const DECAY_TOL: f64 = 1e-3;
pub const ROUND_TRIP_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-6;

/// Gaps of `P`, `S` and their one-sided derivatives across the junction at
/// distance `delta`: `[P, P', S, S']`.
pub fn junction_gaps(params: &EosParams, delta: f64) -> [f64; 4] {
    let zt = params.ztilde;
    let (lo, hi) = (zt - delta * zt, zt + delta * zt);
    [
        (params.p_of_z(lo) - params.p_of_z(hi)).abs(),
        (params.dp_of_z(lo) - params.dp_of_z(hi)).abs(),
        (params.s_of_z(lo) - params.s_of_z(hi)).abs(),
        (params.ds_of_z(lo) - params.ds_of_z(hi)).abs() * zt,
    ]
}

/// Samples `P(Z)/Z^{5/3}` on a log grid over `[Z̃, 10⁶ Z̃]`. Returns the
/// largest increase between neighbours and the relative distance of the
/// last sample from `p_∞ = 3/5 Z̃^{-2/3}`.
pub fn decay_profile(params: &EosParams, points: usize) -> (f64, f64) {
    let zt = params.ztilde;
    let ratio = |z: f64| params.p_of_z(z) / z.powf(5.0 / 3.0);
    let mut worst_increase = f64::NEG_INFINITY;
    let mut prev = ratio(zt);
    let mut last = prev;
    for i in 1..points {
        let z = zt * 10f64.powf(6.0 * i as f64 / (points - 1) as f64);
        let r = ratio(z);
        worst_increase = worst_increase.max(r - prev);
        prev = r;
        last = r;
    }
    let p_inf = 0.6 * zt.powf(-2.0 / 3.0);
    (worst_increase, (last - p_inf).abs() / p_inf)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Condition number of `ϑ ↦ ρe` at fixed `ρ`, `ρe / (ϑ c_v)`. Deep in the
/// degenerate branch the cold energy swamps the thermal part and `ϑ` is
/// not recoverable from a rounded `ρe` at all.
pub fn energy_condition_number(params: &EosParams, st: &ThermoState) -> f64 {
    params.internal_energy(st) / (st.theta * params.heat_capacity(st))
}

pub const MAX_ROUND_TRIP_CONDITION: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    /// Worst `|ϑ' − ϑ|/ϑ` over states with condition number at most
    /// [`MAX_ROUND_TRIP_CONDITION`].
    pub forward: f64,
    pub forward_witness: ThermoState,
    /// Worst `|ρe(ϑ') − ρe|/ρe` over all states.
    pub backward: f64,
    pub conditioned: usize,
    pub samples: usize,
}

/// Round trip `ϑ → ρe → ϑ` over random states with `ρ, ϑ ∈ [1e-3, 1e3]`.
pub fn invert_round_trip(params: &EosParams, samples: usize, seed: u64) -> RoundTrip {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RoundTrip {
        forward: 0.0,
        forward_witness: ThermoState { rho: 1.0, theta: 1.0 },
        backward: 0.0,
        conditioned: 0,
        samples,
    };
    for _ in 0..samples {
        let st = ThermoState {
            rho: log_uniform(&mut rng, 1e-3, 1e3),
            theta: log_uniform(&mut rng, 1e-3, 1e3),
        };
        let rho_e = params.internal_energy(&st);
        let (fwd, bwd) = match params.invert_energy(st.rho, rho_e) {
            Ok(t) => {
                let back = ThermoState { rho: st.rho, theta: t };
                (
                    (t - st.theta).abs() / st.theta,
                    (params.internal_energy(&back) - rho_e).abs() / rho_e,
                )
            }
            Err(_) => (f64::INFINITY, f64::INFINITY),
        };
        out.backward = out.backward.max(bwd);
        if energy_condition_number(params, &st) <= MAX_ROUND_TRIP_CONDITION {
            out.conditioned += 1;
            if fwd > out.forward {
                out.forward = fwd;
                out.forward_witness = st;
            }
        }
    }
    out
}

/// Fitted constants of the entropy-by-energy domination bounds:
/// `ρs ≤ C (aϑ³ + ρ(1+|log ρ|) + ρ max(log ϑ, 0))` and
/// `ρe ≥ c (aϑ⁴ + ρ^{5/3} + ρϑ)`. Returns `(C, c)`.
pub fn domination_constants(params: &EosParams, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = params.a_eps;
    let mut upper: f64 = 0.0;
    let mut lower = f64::INFINITY;
    for _ in 0..samples {
        let st = ThermoState {
            rho: log_uniform(&mut rng, 1e-3, 1e3),
            theta: log_uniform(&mut rng, 1e-3, 1e3),
        };
        let (r, t) = (st.rho, st.theta);
        let rho_s = params.entropy(&st).density;
        let rho_e = params.internal_energy(&st);
        let s_scale = a * t.powi(3) + r * (1.0 + r.ln().abs()) + r * t.ln().max(0.0);
        let e_scale = a * t.powi(4) + r.powf(5.0 / 3.0) + r * t;
        upper = upper.max(rho_s / s_scale);
        lower = lower.min(rho_e / e_scale);
    }
    (upper, lower)
}

/// Worst relative mismatch between analytic `∂p/∂ρ`, `∂p/∂ϑ` and central
/// differences, with the number of states compared. Stencils straddling
/// the junction are skipped, as are states where rounding of `p` alone
/// would exceed `1e-8` of the derivative (cold degenerate gas, where `p`
/// barely depends on `ϑ`).
pub fn pressure_derivative_mismatch(params: &EosParams, samples: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let zt = params.ztilde;
    for _ in 0..samples {
        let st = ThermoState {
            rho: log_uniform(&mut rng, 1e-2, 1e2),
            theta: log_uniform(&mut rng, 1e-2, 1e2),
        };
        let (r, t) = (st.rho, st.theta);
        let hr = step * r;
        let ht = step * t;
        let straddles = |a: ThermoState, b: ThermoState| (a.z() - zt).signum() != (b.z() - zt).signum();
        let rp = ThermoState { rho: r + hr, theta: t };
        let rm = ThermoState { rho: r - hr, theta: t };
        let tp = ThermoState { rho: r, theta: t + ht };
        let tm = ThermoState { rho: r, theta: t - ht };
        if straddles(rp, rm) || straddles(tp, tm) {
            continue;
        }
        let fd_r = (params.pressure(&rp) - params.pressure(&rm)) / (2.0 * hr);
        let fd_t = (params.pressure(&tp) - params.pressure(&tm)) / (2.0 * ht);
        let an_r = params.dp_drho(&st);
        let an_t = params.dp_dtheta(&st);
        let noise = f64::EPSILON * params.pressure(&st);
        if noise / (hr * an_r.abs()) > 1e-8 || noise / (ht * an_t.abs()) > 1e-8 {
            continue;
        }
        compared += 1;
        worst = worst
            .max((fd_r - an_r).abs() / an_r.abs())
            .max((fd_t - an_t).abs() / an_t.abs());
    }
    (worst, compared)
}

/// Smallest margin `c_est - c_exact` over random states.
pub fn wave_speed_margin(params: &EosParams, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let st = ThermoState {
            rho: log_uniform(&mut rng, 1e-3, 1e3),
            theta: log_uniform(&mut rng, 1e-3, 1e3),
        };
        let margin = params.wave_speed_bound(&st) - params.sound_speed(&st);
        worst = worst.min(margin / params.sound_speed(&st));
    }
    worst
}

/// Runs the full structural suite.
pub fn verify(params: &EosParams, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let [gp, gdp, gs, gds] = junction_gaps(params, JUNCTION_DELTA);
    checks.push(Check::at_most("P continuity at junction", gp, JUNCTION_TOL));
    checks.push(Check::at_most("P' continuity at junction", gdp, JUNCTION_TOL));
    checks.push(Check::at_most("S continuity at junction", gs, JUNCTION_TOL));
    checks.push(Check::at_most("S' continuity at junction (scaled by Z~)", gds, JUNCTION_TOL));

    let (increase, dist) = decay_profile(params, 6001);
    checks.push(Check::at_most("P/Z^(5/3) non-increasing on [Z~, 1e6 Z~]", increase, 0.0));
    checks.push(Check::at_most("P/Z^(5/3) reaches p_inf at 1e6 Z~ (relative)", dist, DECAY_TOL));

    let zt = params.ztilde;
    let s_far = params.s_of_z(1e6 * zt);
    checks.push(Check::at_most("S(1e6 Z~) = 1e-6", (s_far - 1e-6).abs(), 1e-18));
    let max_ds = (0..=6000)
        .map(|i| params.ds_of_z(zt * 10f64.powf(-6.0 + 12.0 * i as f64 / 6000.0)))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("S' < 0 on [1e-6 Z~, 1e6 Z~]", max_ds, -f64::MIN_POSITIVE));

    let rt = invert_round_trip(params, 1000, seed);
    checks.push(
        Check::at_most("invert_energy round trip, relative error in theta", rt.forward, ROUND_TRIP_TOL)
            .with_note(format!(
                "{} of {} states with condition number <= {:.0e}; worst at rho={:.4e}, theta={:.4e}",
                rt.conditioned,
                rt.samples,
                MAX_ROUND_TRIP_CONDITION,
                rt.forward_witness.rho,
                rt.forward_witness.theta
            )),
    );
    checks.push(Check::at_most(
        "invert_energy round trip, relative residual in rho*e (all states)",
        rt.backward,
        ROUND_TRIP_TOL,
    ));

    let (upper, lower) = domination_constants(params, 1000, seed ^ 0x5eed);
    checks.push(Check::at_most("entropy dominated by energy: fitted C finite", upper, 1e6));
    checks.push(Check::at_least("energy coercivity: fitted c > 0", lower, f64::MIN_POSITIVE));

    let (fd, compared) = pressure_derivative_mismatch(params, 1000, seed ^ 0xfd);
    checks.push(
        Check::at_most("dp/drho, dp/dtheta match central differences", fd, FD_TOL)
            .with_note(format!("{compared} of 1000 states resolvable by differencing")),
    );

    let margin = wave_speed_margin(params, 1000, seed ^ 0xc5);
    checks.push(Check::at_least("wave_speed_bound exceeds sound speed (relative margin)", margin, 0.0));
    checks
}
