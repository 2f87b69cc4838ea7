use super::field::recover_cell;
use super::flux::{convective_flux, dissipative_flux};
use super::{initialize, FluidField, Reconstruction, SolverConfig, SolverError};
use crate::eos::{EosParams, ThermoState};
use crate::rarefaction::{PrimitiveState, RarefactionWave};

const GHOSTS: usize = 2;

/// Receives the field during [`run`].
pub trait Observer {
    /// Called at the start time, at every output time and at `T`.
    fn observe(&mut self, _field: &FluidField, _t: f64) -> Result<(), SolverError> {
        Ok(())
    }

    /// Called after every completed step with the new field, the new time
    /// and the step size.
    fn after_step(&mut self, _field: &FluidField, _t: f64, _dt: f64) {}
}

impl Observer for () {}

/// Running mass balance: interior mass plus cumulative outflow must equal
/// initial mass plus cumulative inflow.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MassLedger {
    pub initial: f64,
    pub inflow: f64,
    pub outflow: f64,
    /// Largest per-step relative imbalance seen so far.
    pub worst_step_defect: f64,
}

impl MassLedger {
    pub fn new(initial: f64) -> Self {
        MassLedger {
            initial,
            ..Default::default()
        }
    }

    /// Relative imbalance of the whole run given the current interior mass.
    pub fn defect(&self, current: f64) -> f64 {
        (current + self.outflow - self.initial - self.inflow).abs() / self.initial
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// Mass entering through the left face during the step.
    pub inflow: f64,
    /// Mass leaving through the right face during the step.
    pub outflow: f64,
}

/// Integrator with preallocated work arrays.
pub struct Solver {
    config: SolverConfig,
    ext: Vec<PrimitiveState>,
    rhs: [Vec<f64>; 3],
    saved: [Vec<f64>; 4],
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn limited(c: &PrimitiveState, back: &PrimitiveState, fwd: &PrimitiveState, sign: f64) -> PrimitiveState {
    let half = 0.5 * sign;
    PrimitiveState {
        rho: c.rho + half * minmod(c.rho - back.rho, fwd.rho - c.rho),
        theta: c.theta + half * minmod(c.theta - back.theta, fwd.theta - c.theta),
        u: c.u + half * minmod(c.u - back.u, fwd.u - c.u),
    }
}

/// Largest diffusivity among momentum and temperature at a state.
#[inline]
fn max_diffusivity(eos: &EosParams, w: &PrimitiveState) -> f64 {
    let momentum = eos.planar_viscosity(w.theta) / w.rho;
    let st = ThermoState {
        rho: w.rho,
        theta: w.theta,
    };
    let thermal = eos.conductivity(w.theta) / eos.heat_capacity(&st);
    momentum.max(thermal)
}

/// `CFL · min_i min(h/(|u|+c_est), h²/(2εν_max))`.
pub fn stable_dt(field: &FluidField, config: &SolverConfig) -> f64 {
    let eos = &config.eos;
    let h = field.grid.h;
    let mut dt = f64::INFINITY;
    for i in 0..field.len() {
        let w = field.primitive(i);
        let speed = w.u.abs() + eos.wave_speed_bound(&w.thermo());
        dt = dt.min(h / speed);
        if eos.eps > 0.0 {
            dt = dt.min(h * h / (2.0 * eos.eps * max_diffusivity(eos, &w)));
        }
    }
    config.cfl * dt
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let n = config.grid.cells;
        Ok(Solver {
            ext: vec![PrimitiveState::new(1.0, 1.0, 0.0); n + 2 * GHOSTS],
            rhs: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            saved: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            config,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Ghost states `(left, right)`: full Dirichlet data at the inflow;
    /// at the outflow `ϑ̃_R`, `ũ_R` and the last interior density.
    pub fn ghost_states(&self, field: &FluidField) -> (PrimitiveState, PrimitiveState) {
        let b = &self.config.boundary;
        (
            b.left_state(),
            PrimitiveState::new(field.rho[field.len() - 1], b.theta_right, b.u_right),
        )
    }

    /// Fills `rhs` with `−(F_{i+1/2} − F_{i−1/2})/h` and returns the mass
    /// fluxes through the two boundary faces.
    fn evaluate_rhs(&mut self, field: &FluidField) -> (f64, f64) {
        let n = field.len();
        let (gl, gr) = self.ghost_states(field);
        for g in 0..GHOSTS {
            self.ext[g] = gl;
            self.ext[n + GHOSTS + g] = gr;
        }
        for i in 0..n {
            self.ext[i + GHOSTS] = field.primitive(i);
        }
        let eos = self.config.eos;
        let h = field.grid.h;
        let muscl = self.config.reconstruction == Reconstruction::Muscl;
        let ext = &self.ext;
        let mut prev = [0.0; 3];
        let mut first = 0.0;
        for k in 0..=n {
            // Face k sits between ext[k + 1] and ext[k + 2].
            let (a, b) = (&ext[k + 1], &ext[k + 2]);
            let (wl, wr) = if muscl {
                (
                    limited(a, &ext[k], b, 1.0),
                    limited(b, a, &ext[k + 3], -1.0),
                )
            } else {
                (*a, *b)
            };
            let fc = convective_flux(&wl, &wr, &eos);
            let fd = dissipative_flux(a, b, h, &eos);
            let f = [fc[0] + fd[0], fc[1] + fd[1], fc[2] + fd[2]];
            if k == 0 {
                first = f[0];
            } else {
                for e in 0..3 {
                    self.rhs[e][k - 1] = (prev[e] - f[e]) / h;
                }
            }
            prev = f;
        }
        (first, prev[0])
    }

    /// One SSP-RK2 step of size `dt` starting at time `t`.
    pub fn step_with(&mut self, field: &mut FluidField, t: f64, dt: f64) -> Result<StepInfo, SolverError> {
        let n = field.len();
        self.saved[0].copy_from_slice(&field.rho);
        self.saved[1].copy_from_slice(&field.mom);
        self.saved[2].copy_from_slice(&field.energy);
        self.saved[3].copy_from_slice(&field.theta);

        let (in0, out0) = self.evaluate_rhs(field);
        for i in 0..n {
            field.rho[i] += dt * self.rhs[0][i];
            field.mom[i] += dt * self.rhs[1][i];
            field.energy[i] += dt * self.rhs[2][i];
        }
        self.recover(field, t + dt)?;

        let (in1, out1) = self.evaluate_rhs(field);
        for i in 0..n {
            field.rho[i] = 0.5 * self.saved[0][i] + 0.5 * (field.rho[i] + dt * self.rhs[0][i]);
            field.mom[i] = 0.5 * self.saved[1][i] + 0.5 * (field.mom[i] + dt * self.rhs[1][i]);
            field.energy[i] =
                0.5 * self.saved[2][i] + 0.5 * (field.energy[i] + dt * self.rhs[2][i]);
        }
        // Seed the inversion with the start-of-step temperature.
        field.theta.copy_from_slice(&self.saved[3]);
        self.recover(field, t + dt)?;

        let inflow = 0.5 * dt * (in0 + in1);
        let outflow = 0.5 * dt * (out0 + out1);
        Ok(StepInfo {
            dt,
            inflow,
            outflow,
        })
    }

    fn recover(&self, field: &mut FluidField, t: f64) -> Result<(), SolverError> {
        let eos = &self.config.eos;
        for i in 0..field.len() {
            match recover_cell(eos, field.rho[i], field.mom[i], field.energy[i], field.theta[i]) {
                Ok(theta) => field.theta[i] = theta,
                Err(reason) => {
                    return Err(SolverError::Positivity {
                        t,
                        cell: i,
                        x: field.grid.center(i),
                        rho: field.rho[i],
                        mom: field.mom[i],
                        energy: field.energy[i],
                        reason,
                    })
                }
            }
        }
        Ok(())
    }

    /// One step of the largest stable size not overshooting `t_stop`.
    pub fn step(&mut self, field: &mut FluidField, t: f64, t_stop: f64) -> Result<StepInfo, SolverError> {
        let mut dt = stable_dt(field, &self.config);
        let remaining = t_stop - t;
        if dt >= remaining {
            dt = remaining;
        } else if dt > 0.5 * remaining {
            // Split the remainder evenly instead of leaving a sliver.
            dt = 0.5 * remaining;
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::Config(format!(
                "time step {dt} is not positive at t = {t}"
            )));
        }
        self.step_with(field, t, dt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub field: FluidField,
    pub t_final: f64,
    pub steps: usize,
    pub ledger: MassLedger,
}

/// Integrates from the initial field to `T`, handing the field to
/// `observer` at the start, at each output time and at `T`.
pub fn run(
    config: &SolverConfig,
    wave: &RarefactionWave,
    observer: &mut dyn Observer,
) -> Result<RunSummary, SolverError> {
    let field = initialize(config, wave)?;
    run_from(config, field, observer)
}

/// [`run`] from a caller-supplied initial field.
pub fn run_from(
    config: &SolverConfig,
    mut field: FluidField,
    observer: &mut dyn Observer,
) -> Result<RunSummary, SolverError> {
    let mut solver = Solver::new(config.clone())?;
    let mut t = config.init.start_time();
    let mut ledger = MassLedger::new(field.total_mass());
    observer.observe(&field, t)?;
    let mut stops = config.output_times.clone();
    if stops.last().is_none_or(|&last| last < config.final_time) && config.final_time > t {
        stops.push(config.final_time);
    }
    let mut steps = 0;
    for stop in stops {
        while t < stop {
            let before = field.total_mass();
            let info = solver.step(&mut field, t, stop)?;
            t = if stop - t <= info.dt { stop } else { t + info.dt };
            steps += 1;
            ledger.inflow += info.inflow;
            ledger.outflow += info.outflow;
            let after = field.total_mass();
            let defect = (after - before - info.inflow + info.outflow).abs() / before;
            ledger.worst_step_defect = ledger.worst_step_defect.max(defect);
            observer.after_step(&field, t, info.dt);
        }
        observer.observe(&field, t)?;
    }
    Ok(RunSummary {
        field,
        t_final: t,
        steps,
        ledger,
    })
}
