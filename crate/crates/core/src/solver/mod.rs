//! Explicit finite-volume integrator for the planar Navier–Stokes–Fourier
//! system with dissipation scaled by `ε`.
//!
//! Conservative variables `(ρ, ρu, E)` with `E = ½ρu² + ρe` live on a
//! uniform grid of `[-L, L]`. Fluxes are Rusanov with optional minmod MUSCL
//! reconstruction of `(ρ, u, ϑ)` plus central viscous and heat fluxes; time
//! stepping is the two-stage SSP Runge–Kutta method.

mod field;
mod flux;
mod integrator;

pub use field::FluidField;
pub use flux::{convective_flux, dissipative_flux, euler_flux, Flux};
pub use integrator::{run, run_from, stable_dt, MassLedger, Observer, RunSummary, Solver, StepInfo};

use thiserror::Error;

use crate::eos::{EosError, EosParams};
use crate::rarefaction::{PrimitiveState, RarefactionWave};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "positivity lost at t = {t}, cell {cell} (x = {x}): rho = {rho}, m = {mom}, E = {energy}: {reason}"
    )]
    Positivity {
        t: f64,
        cell: usize,
        x: f64,
        rho: f64,
        mom: f64,
        energy: f64,
        reason: String,
    },
    #[error(transparent)]
    Eos(#[from] EosError),
}

/// Uniform grid on `[-L, L]` with `N` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub halfwidth: f64,
    pub cells: usize,
    pub h: f64,
}

pub const MIN_CELLS: usize = 16;

impl Grid {
    pub fn new(halfwidth: f64, cells: usize) -> Result<Self, SolverError> {
        if cells < MIN_CELLS {
            return Err(SolverError::Config(format!(
                "N = {cells} violates N >= {MIN_CELLS}"
            )));
        }
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(SolverError::Config(format!(
                "L = {halfwidth} violates L > 0"
            )));
        }
        Ok(Grid {
            halfwidth,
            cells,
            h: 2.0 * halfwidth / cells as f64,
        })
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        -self.halfwidth + (i as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(|i| self.center(i))
    }
}

/// Dirichlet data: `(ρ̃_L, ϑ̃_L, ũ_L)` at the inflow, `(ϑ̃_R, ũ_R)` at the
/// outflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub rho_left: f64,
    pub theta_left: f64,
    pub u_left: f64,
    pub theta_right: f64,
    pub u_right: f64,
}

impl BoundaryData {
    pub fn from_wave(wave: &RarefactionWave) -> Self {
        let (l, r) = (wave.ends.left, wave.ends.right);
        BoundaryData {
            rho_left: l.rho,
            theta_left: l.theta,
            u_left: l.u,
            theta_right: r.theta,
            u_right: r.u,
        }
    }

    pub fn uniform(state: PrimitiveState) -> Self {
        BoundaryData {
            rho_left: state.rho,
            theta_left: state.theta,
            u_left: state.u,
            theta_right: state.theta,
            u_right: state.u,
        }
    }

    pub fn left_state(&self) -> PrimitiveState {
        PrimitiveState::new(self.rho_left, self.theta_left, self.u_left)
    }

    fn matches(&self, wave: &RarefactionWave) -> bool {
        let w = Self::from_wave(wave);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        close(self.rho_left, w.rho_left)
            && close(self.theta_left, w.theta_left)
            && close(self.u_left, w.u_left)
            && close(self.theta_right, w.theta_right)
            && close(self.u_right, w.u_right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitMode {
    /// Riemann data smoothed by a cubic transition of total width `width`
    /// centred at `x₁ = 0`.
    MollifiedRiemann { width: f64 },
    /// The exact wave sampled at `t₀`; the run starts at `t₀`.
    ExactWaveAt { t0: f64 },
}

impl InitMode {
    /// `w = max(4h, 0.01 L)`.
    pub fn default_mollified(grid: &Grid) -> Self {
        InitMode::MollifiedRiemann {
            width: (4.0 * grid.h).max(0.01 * grid.halfwidth),
        }
    }

    pub fn start_time(&self) -> f64 {
        match *self {
            InitMode::MollifiedRiemann { .. } => 0.0,
            InitMode::ExactWaveAt { t0 } => t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    FirstOrder,
    Muscl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub eos: EosParams,
    pub boundary: BoundaryData,
    pub cfl: f64,
    pub final_time: f64,
    pub init: InitMode,
    /// Times strictly between the start time and `T` at which observers
    /// receive the field; `T` itself is always an output.
    pub output_times: Vec<f64>,
    pub reconstruction: Reconstruction,
}

pub const DEFAULT_CFL: f64 = 0.8;

impl SolverConfig {
    /// Configuration matching `wave` on its own domain, with default
    /// mollification, MUSCL and CFL 0.8.
    pub fn for_wave(wave: &RarefactionWave, cells: usize, eos: EosParams) -> Result<Self, SolverError> {
        let grid = Grid::new(wave.halfwidth, cells)?;
        let config = SolverConfig {
            grid,
            eos,
            boundary: BoundaryData::from_wave(wave),
            cfl: DEFAULT_CFL,
            final_time: wave.final_time,
            init: InitMode::default_mollified(&grid),
            output_times: Vec::new(),
            reconstruction: Reconstruction::Muscl,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.eos.validate()?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::Config(format!(
                "CFL = {} violates 0 < CFL <= 1",
                self.cfl
            )));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(SolverError::Config(format!(
                "T = {} violates T >= 0",
                self.final_time
            )));
        }
        if !(self.boundary.u_left > 0.0) {
            return Err(SolverError::Config(format!(
                "inflow velocity u_L = {} violates u_L > 0; reflect the wave first",
                self.boundary.u_left
            )));
        }
        let b = self.boundary;
        if !(b.rho_left > 0.0 && b.theta_left > 0.0 && b.theta_right > 0.0) {
            return Err(SolverError::Config(
                "boundary density and temperatures must be positive".into(),
            ));
        }
        match self.init {
            InitMode::MollifiedRiemann { width } if !(width > 0.0 && width < self.grid.halfwidth) => {
                return Err(SolverError::Config(format!(
                    "mollification width {width} violates 0 < w < L"
                )))
            }
            InitMode::ExactWaveAt { t0 } if !(t0 > 0.0 && t0 <= self.final_time) => {
                return Err(SolverError::Config(format!(
                    "t0 = {t0} violates 0 < t0 <= T = {}",
                    self.final_time
                )))
            }
            _ => {}
        }
        let start = self.init.start_time();
        if let Some(bad) = self
            .output_times
            .iter()
            .find(|&&t| !(t > start && t <= self.final_time))
        {
            return Err(SolverError::Config(format!(
                "output time {bad} outside ({start}, {}]",
                self.final_time
            )));
        }
        if self.output_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SolverError::Config(
                "output times must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// `3s² − 2s³` clamped to `[0, 1]`.
#[inline]
pub fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Initial field for `config`. The wave must carry the same boundary data.
pub fn initialize(config: &SolverConfig, wave: &RarefactionWave) -> Result<FluidField, SolverError> {
    config.validate()?;
    if !config.boundary.matches(wave) {
        return Err(SolverError::Config(format!(
            "boundary data {:?} do not match the wave end states {:?}",
            config.boundary, wave.ends
        )));
    }
    let grid = config.grid;
    if wave.halfwidth > grid.halfwidth * (1.0 + 1e-12) {
        return Err(SolverError::Config(format!(
            "grid half-width {} is smaller than the wave domain {}",
            grid.halfwidth, wave.halfwidth
        )));
    }
    match config.init {
        InitMode::MollifiedRiemann { width } => {
            let (l, r) = (wave.ends.left, wave.ends.right);
            FluidField::from_primitives(grid, &config.eos, |x| {
                let phi = smoothstep((x + 0.5 * width) / width);
                PrimitiveState::new(
                    l.rho + (r.rho - l.rho) * phi,
                    l.theta + (r.theta - l.theta) * phi,
                    l.u + (r.u - l.u) * phi,
                )
            })
        }
        InitMode::ExactWaveAt { t0 } => {
            FluidField::from_primitives(grid, &config.eos, |x| wave.at_xi(x / t0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rarefaction::{Family, DEFAULT_MARGIN};

    fn wave() -> RarefactionWave {
        RarefactionWave::from_left_state(
            PrimitiveState::new(1.0, 1.0, 1.0),
            Family::One,
            0.5,
            0.5,
            DEFAULT_MARGIN,
        )
        .unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::new(1.0, 20).unwrap();
        assert_eq!(g.h, 0.1);
        assert!((g.center(0) + 0.95).abs() < 1e-15);
        assert!((g.center(19) - 0.95).abs() < 1e-15);
        assert!(Grid::new(1.0, 15).is_err());
        assert!(Grid::new(0.0, 32).is_err());
    }

    #[test]
    fn zero_strength_wave_gives_uniform_field() {
        let left = PrimitiveState::new(1.0, 1.0, 1.0);
        let w = RarefactionWave::from_left_state(left, Family::One, 1.0, 0.5, 0.2).unwrap();
        let eos = EosParams::new(w.ztilde, 0.1).unwrap();
        let cfg = SolverConfig::for_wave(&w, 64, eos).unwrap();
        let f = initialize(&cfg, &w).unwrap();
        for i in 0..64 {
            let p = f.primitive(i);
            assert_eq!(p.rho, 1.0);
            assert_eq!(p.u, 1.0);
            assert!((p.theta - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mollified_data_is_left_state_at_left_edge() {
        let w = wave();
        let eos = EosParams::new(w.ztilde, 0.1).unwrap();
        let cfg = SolverConfig::for_wave(&w, 400, eos).unwrap();
        let f = initialize(&cfg, &w).unwrap();
        let p = f.primitive(0);
        assert!((p.rho - 1.0).abs() < 1e-12);
        assert!((p.u - 1.0).abs() < 1e-12);
        assert!((p.theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_boundary_is_rejected() {
        let w = wave();
        let eos = EosParams::new(w.ztilde, 0.1).unwrap();
        let mut cfg = SolverConfig::for_wave(&w, 64, eos).unwrap();
        cfg.boundary.theta_right *= 1.1;
        assert!(matches!(initialize(&cfg, &w), Err(SolverError::Config(_))));
    }

    #[test]
    fn config_validation() {
        let w = wave();
        let eos = EosParams::new(w.ztilde, 0.1).unwrap();
        let base = SolverConfig::for_wave(&w, 64, eos).unwrap();
        let mut c = base.clone();
        c.cfl = 1.5;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.boundary.u_left = -0.1;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.init = InitMode::ExactWaveAt { t0: 0.0 };
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.output_times = vec![0.2, 0.1];
        assert!(c.validate().is_err());
        let mut c = base;
        c.output_times = vec![0.1, 0.6];
        assert!(c.validate().is_err());
    }
}
