use super::{Grid, SolverError};
use crate::eos::{EosParams, ThermoState};
use crate::rarefaction::PrimitiveState;

/// Cell averages of `(ρ, ρu, E)` together with the recovered temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidField {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub energy: Vec<f64>,
    /// Temperature recovered from the conservative variables.
    pub theta: Vec<f64>,
}

impl FluidField {
    /// Samples primitives at cell centres.
    pub fn from_primitives<F>(grid: Grid, eos: &EosParams, mut f: F) -> Result<Self, SolverError>
    where
        F: FnMut(f64) -> PrimitiveState,
    {
        let n = grid.cells;
        let mut field = FluidField {
            grid,
            rho: Vec::with_capacity(n),
            mom: Vec::with_capacity(n),
            energy: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
        };
        for (i, x) in grid.centers().enumerate() {
            let p = f(x);
            ThermoState::new(p.rho, p.theta).map_err(|e| SolverError::Positivity {
                t: f64::NAN,
                cell: i,
                x,
                rho: p.rho,
                mom: p.rho * p.u,
                energy: f64::NAN,
                reason: e.to_string(),
            })?;
            let rho_e = eos.internal_energy(&p.thermo());
            field.rho.push(p.rho);
            field.mom.push(p.rho * p.u);
            field.energy.push(0.5 * p.rho * p.u * p.u + rho_e);
            field.theta.push(p.theta);
        }
        Ok(field)
    }

    pub fn uniform(grid: Grid, eos: &EosParams, state: PrimitiveState) -> Result<Self, SolverError> {
        Self::from_primitives(grid, eos, |_| state)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    #[inline]
    pub fn velocity(&self, i: usize) -> f64 {
        self.mom[i] / self.rho[i]
    }

    #[inline]
    pub fn primitive(&self, i: usize) -> PrimitiveState {
        PrimitiveState::new(self.rho[i], self.theta[i], self.velocity(i))
    }

    /// `∑ ρ_i h`.
    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.h
    }

    pub fn total_energy(&self) -> f64 {
        self.energy.iter().sum::<f64>() * self.grid.h
    }

    /// Recomputes every temperature from the conservative variables.
    pub fn recover_temperature(&mut self, eos: &EosParams, t: f64) -> Result<(), SolverError> {
        for i in 0..self.len() {
            self.theta[i] = recover_cell(eos, self.rho[i], self.mom[i], self.energy[i], self.theta[i])
                .map_err(|reason| SolverError::Positivity {
                    t,
                    cell: i,
                    x: self.grid.center(i),
                    rho: self.rho[i],
                    mom: self.mom[i],
                    energy: self.energy[i],
                    reason,
                })?;
        }
        Ok(())
    }
}

/// Temperature of one cell, seeded with `guess`.
#[inline]
pub(crate) fn recover_cell(
    eos: &EosParams,
    rho: f64,
    mom: f64,
    energy: f64,
    guess: f64,
) -> Result<f64, String> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(format!("non-positive density {rho}"));
    }
    let rho_e = energy - 0.5 * mom * mom / rho;
    eos.invert_energy_near(rho, rho_e, guess)
        .map_err(|e| e.to_string())
}
