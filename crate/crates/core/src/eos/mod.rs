//! Hybrid mono-atomic / radiative equation of state.
//!
//! The structural pressure follows the Boyle–Mariotte law `P(Z) = Z` up to
//! the junction value `Z̃` and a degenerate-gas branch above it:
//!
//! ```text
//! P(Z) = Z                                  Z <= Z̃
//! P(Z) = 3/5 Z^{5/3} Z̃^{-2/3} + 2/5 Z̃        Z >  Z̃
//! ```
//!
//! with `Z = ρ / ϑ^{3/2}`. Pressure, internal energy and entropy add a
//! radiation component scaled by `a`:
//!
//! ```text
//! p  = ϑ^{5/2} P(Z) + a ϑ⁴
//! ρe = 3/2 ϑ^{5/2} P(Z) + 3 a ϑ⁴
//! s  = S(Z) + 4 a ϑ³ / ρ
//! ```
//!
//! All quantities are nondimensional.

pub mod checks;

use thiserror::Error;

use crate::root::{self, RootError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EosError {
    #[error("{quantity} = {value} violates {constraint}")]
    Domain {
        quantity: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("internal energy {rho_e} at density {rho} is below the zero-temperature energy {cold}")]
    BelowColdEnergy { rho: f64, rho_e: f64, cold: f64 },
    #[error("temperature inversion failed: {0}")]
    Inversion(#[from] RootError),
}

fn domain(quantity: &'static str, value: f64, constraint: &'static str) -> EosError {
    EosError::Domain {
        quantity,
        value,
        constraint,
    }
}

/// Constitutive model: junction value, radiation coefficient, dissipation
/// scale and transport laws.
///
/// Transport coefficients are `μ(ϑ) = μ̄(1+ϑ)`, `η(ϑ) = η̄(1+ϑ)` and
/// `κ(ϑ) = κ̄(1+ϑ^β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    pub ztilde: f64,
    pub a_eps: f64,
    /// Dissipation scale. Zero selects the inviscid Euler limit.
    pub eps: f64,
    pub mu_bar: f64,
    pub eta_bar: f64,
    pub kappa_bar: f64,
    pub beta: f64,
}

pub const DEFAULT_BETA: f64 = 6.5;

impl EosParams {
    /// Default model at dissipation scale `eps`: `a = eps²`, `μ̄ = κ̄ = 1`,
    /// `η̄ = 0`, `β = 6.5`.
    pub fn new(ztilde: f64, eps: f64) -> Result<Self, EosError> {
        let params = EosParams {
            ztilde,
            a_eps: eps * eps,
            eps,
            mu_bar: 1.0,
            eta_bar: 0.0,
            kappa_bar: 1.0,
            beta: DEFAULT_BETA,
        };
        params.validate()?;
        Ok(params)
    }

    /// Pure Boyle–Mariotte / degenerate model without radiation or dissipation.
    pub fn inviscid(ztilde: f64) -> Result<Self, EosError> {
        Self::new(ztilde, 0.0)
    }

    pub fn with_radiation(mut self, a_eps: f64) -> Result<Self, EosError> {
        self.a_eps = a_eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_transport(
        mut self,
        mu_bar: f64,
        eta_bar: f64,
        kappa_bar: f64,
        beta: f64,
    ) -> Result<Self, EosError> {
        self.mu_bar = mu_bar;
        self.eta_bar = eta_bar;
        self.kappa_bar = kappa_bar;
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    /// The same model with the radiation component switched off.
    pub fn without_radiation(&self) -> Self {
        EosParams { a_eps: 0.0, ..*self }
    }

    pub fn validate(&self) -> Result<(), EosError> {
        if !(self.ztilde > 0.0 && self.ztilde.is_finite()) {
            return Err(domain("Ztilde", self.ztilde, "Ztilde > 0"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(domain("eps", self.eps, "eps >= 0"));
        }
        if !(self.a_eps >= 0.0 && self.a_eps.is_finite()) {
            return Err(domain("a_eps", self.a_eps, "a_eps >= 0"));
        }
        for (name, v) in [
            ("mu_bar", self.mu_bar),
            ("eta_bar", self.eta_bar),
            ("kappa_bar", self.kappa_bar),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(name, v, "transport prefactors >= 0"));
            }
        }
        if !(self.beta > 6.0 && self.beta.is_finite()) {
            return Err(domain("beta", self.beta, "beta > 6"));
        }
        Ok(())
    }

    // ---- structural functions of Z -------------------------------------

    /// `P(Z)`; rejects negative `Z`.
    pub fn p_structural(&self, z: f64) -> Result<f64, EosError> {
        if !(z >= 0.0) {
            return Err(domain("Z", z, "Z >= 0"));
        }
        Ok(self.p_of_z(z))
    }

    /// `S(Z)`; rejects non-positive `Z`.
    pub fn s_structural(&self, z: f64) -> Result<f64, EosError> {
        if !(z > 0.0) {
            return Err(domain("Z", z, "Z > 0"));
        }
        Ok(self.s_of_z(z))
    }

    #[inline]
    pub(crate) fn p_of_z(&self, z: f64) -> f64 {
        let zt = self.ztilde;
        if z <= zt {
            z
        } else {
            0.6 * z * two_thirds_power(z / zt) + 0.4 * zt
        }
    }

    /// `P'(Z)`, taking the left branch at the junction.
    #[inline]
    pub fn dp_of_z(&self, z: f64) -> f64 {
        if z <= self.ztilde {
            1.0
        } else {
            two_thirds_power(z / self.ztilde)
        }
    }

    #[inline]
    pub(crate) fn s_of_z(&self, z: f64) -> f64 {
        let zt = self.ztilde;
        if z <= zt {
            1.0 - (z / zt).ln()
        } else {
            zt / z
        }
    }

    /// `S'(Z)`, continuous at the junction where it equals `-1/Z̃`.
    #[inline]
    pub fn ds_of_z(&self, z: f64) -> f64 {
        if z <= self.ztilde {
            -1.0 / z
        } else {
            -self.ztilde / (z * z)
        }
    }

    /// `S''(Z)`, taking the left branch at the junction.
    #[inline]
    pub fn d2s_of_z(&self, z: f64) -> f64 {
        if z <= self.ztilde {
            1.0 / (z * z)
        } else {
            2.0 * self.ztilde / (z * z * z)
        }
    }

    // ---- thermodynamic functions of (ρ, ϑ) -----------------------------

    /// `ϑ^{5/2} P(Z)`, evaluated as `ρϑ` on the Boyle–Mariotte branch.
    #[inline]
    fn structural_pressure(&self, rho: f64, theta: f64) -> f64 {
        let sq = theta.sqrt();
        let z = rho / (theta * sq);
        if z <= self.ztilde {
            rho * theta
        } else {
            0.6 * rho * theta * two_thirds_power(z / self.ztilde) + 0.4 * self.ztilde * theta * theta * sq
        }
    }

    #[inline]
    pub fn pressure(&self, state: &ThermoState) -> f64 {
        let t = state.theta;
        let t2 = t * t;
        self.structural_pressure(state.rho, t) + self.a_eps * t2 * t2
    }

    /// Internal energy density `ρe`.
    #[inline]
    pub fn internal_energy(&self, state: &ThermoState) -> f64 {
        let t = state.theta;
        let t2 = t * t;
        1.5 * self.structural_pressure(state.rho, t) + 3.0 * self.a_eps * t2 * t2
    }

    pub fn entropy(&self, state: &ThermoState) -> Entropy {
        let specific = self.specific_entropy(state.rho, state.theta);
        Entropy {
            specific,
            density: state.rho * specific,
        }
    }

    #[inline]
    pub fn specific_entropy(&self, rho: f64, theta: f64) -> f64 {
        let z = rho / (theta * theta.sqrt());
        self.s_of_z(z) + 4.0 * self.a_eps * theta * theta * theta / rho
    }

    /// `∂(ρe)/∂ϑ` at fixed `ρ`; strictly positive on both branches.
    #[inline]
    pub fn heat_capacity(&self, state: &ThermoState) -> f64 {
        let t = state.theta;
        let z = state.rho / (t * t.sqrt());
        let bracket = if z <= self.ztilde { z } else { self.ztilde };
        // (5/2)P - (3/2) Z P' equals Z on the BM branch and Z̃ above it.
        1.5 * t * t.sqrt() * bracket + 12.0 * self.a_eps * t * t * t
    }

    /// `∂p/∂ρ` at fixed `ϑ`.
    pub fn dp_drho(&self, state: &ThermoState) -> f64 {
        let z = state.z();
        state.theta * self.dp_of_z(z)
    }

    /// `∂p/∂ϑ` at fixed `ρ`.
    pub fn dp_dtheta(&self, state: &ThermoState) -> f64 {
        let c = self.heat_capacity(state) - 12.0 * self.a_eps * state.theta.powi(3);
        // structural part is (2/3) of the structural heat capacity
        2.0 / 3.0 * c + 4.0 * self.a_eps * state.theta.powi(3)
    }

    /// Exact adiabatic sound speed `sqrt(p_ρ + ϑ p_ϑ² / (ρ² c_v))`.
    pub fn sound_speed(&self, state: &ThermoState) -> f64 {
        let p_rho = self.dp_drho(state);
        let p_theta = self.dp_dtheta(state);
        let cv = self.heat_capacity(state);
        (p_rho + state.theta * p_theta * p_theta / (state.rho * cv)).sqrt()
    }

    /// Upper bound on the acoustic speed used by the dissipative numerical
    /// flux: `1.2 sqrt(5/3 p / ρ)`.
    #[inline]
    pub fn wave_speed_bound(&self, state: &ThermoState) -> f64 {
        1.2 * (5.0 / 3.0 * self.pressure(state) / state.rho).sqrt()
    }

    /// `lim_{ϑ→0} ρe(ρ, ϑ) = 9/10 ρ^{5/3} Z̃^{-2/3}`; no state at density `ρ`
    /// has less internal energy.
    pub fn cold_energy(&self, rho: f64) -> f64 {
        0.9 * rho * two_thirds_power(rho / self.ztilde)
    }

    /// Recovers `ϑ` from `(ρ, ρe)` to relative tolerance `1e-13`.
    pub fn invert_energy(&self, rho: f64, rho_e: f64) -> Result<f64, EosError> {
        self.check_energy_inputs(rho, rho_e)?;
        let hi = 1e3 * rho_e / rho;
        let guess = (rho_e / (1.5 * rho)).clamp(THETA_FLOOR, hi);
        let theta = root::solve_increasing_checked(
            |t| self.energy_residual(rho, rho_e, t),
            THETA_FLOOR,
            hi,
            guess,
            INVERSION_RTOL,
        )?;
        Ok(theta)
    }

    /// [`invert_energy`](Self::invert_energy) starting from a nearby
    /// temperature; used in the time integrator where the previous step
    /// supplies an excellent guess.
    #[inline]
    pub fn invert_energy_near(&self, rho: f64, rho_e: f64, guess: f64) -> Result<f64, EosError> {
        self.check_energy_inputs(rho, rho_e)?;
        let hi = 1e3 * rho_e / rho;
        match root::solve_increasing(
            |t| self.energy_residual(rho, rho_e, t),
            THETA_FLOOR,
            hi,
            guess,
            INVERSION_RTOL,
        ) {
            Ok(t) => Ok(t),
            Err(_) => self.invert_energy(rho, rho_e),
        }
    }

    fn check_energy_inputs(&self, rho: f64, rho_e: f64) -> Result<(), EosError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(domain("rho", rho, "rho > 0"));
        }
        if !(rho_e > 0.0 && rho_e.is_finite()) {
            return Err(domain("rho_e", rho_e, "rho_e > 0"));
        }
        // ρe <= 0.9 ρ^{5/3} Z̃^{-2/3}, cubed to avoid a cube root.
        let ratio = rho_e / (0.9 * rho);
        let zr = rho / self.ztilde;
        if ratio * ratio * ratio <= zr * zr {
            return Err(EosError::BelowColdEnergy {
                rho,
                rho_e,
                cold: self.cold_energy(rho),
            });
        }
        Ok(())
    }

    #[inline]
    fn energy_residual(&self, rho: f64, rho_e: f64, theta: f64) -> (f64, f64) {
        let sq = theta.sqrt();
        let t15 = theta * sq;
        let z = rho / t15;
        let t3 = theta * theta * theta;
        let rad = self.a_eps * t3;
        let (structural, bracket) = if z <= self.ztilde {
            (rho * theta, z)
        } else {
            (0.6 * rho * theta * two_thirds_power(z / self.ztilde) + 0.4 * self.ztilde * theta * t15, self.ztilde)
        };
        (
            1.5 * structural + 3.0 * rad * theta - rho_e,
            1.5 * t15 * bracket + 12.0 * rad,
        )
    }

    /// Recovers `ϑ` from `(ρ, ρs)`. The specific entropy increases
    /// monotonically from 0 (as `ϑ → 0`) to infinity, so a solution exists
    /// iff `ρs > 0`. The solve runs in `log ϑ`.
    pub fn invert_entropy(&self, rho: f64, entropy_density: f64) -> Result<f64, EosError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(domain("rho", rho, "rho > 0"));
        }
        if !(entropy_density > 0.0 && entropy_density.is_finite()) {
            return Err(domain("entropy density", entropy_density, "rho*s > 0"));
        }
        let target = entropy_density / rho;
        let residual = |x: f64| {
            let theta = x.exp();
            let z = rho / (theta * theta.sqrt());
            let s = self.s_of_z(z) + 4.0 * self.a_eps * theta.powi(3) / rho;
            // d s / d log ϑ
            let ds = -1.5 * z * self.ds_of_z(z) + 12.0 * self.a_eps * theta.powi(3) / rho;
            (s - target, ds)
        };
        // Expand the bracket until it encloses the root.
        let mut lo = -10.0_f64;
        let mut hi = 10.0_f64;
        while residual(lo).0 >= 0.0 && lo > -700.0 {
            lo *= 2.0;
        }
        while residual(hi).0 <= 0.0 && hi < 700.0 {
            hi *= 2.0;
        }
        let guess = 0.5 * (lo + hi);
        let x = root::solve_increasing_checked(residual, lo, hi, guess, 1e-15)?;
        Ok(x.exp())
    }

    // ---- transport -----------------------------------------------------

    #[inline]
    pub fn viscosity(&self, theta: f64) -> f64 {
        self.mu_bar * (1.0 + theta)
    }

    #[inline]
    pub fn bulk_viscosity(&self, theta: f64) -> f64 {
        self.eta_bar * (1.0 + theta)
    }

    #[inline]
    pub fn conductivity(&self, theta: f64) -> f64 {
        let power = if self.beta == DEFAULT_BETA {
            let t3 = theta * theta * theta;
            t3 * t3 * theta.sqrt()
        } else {
            theta.powf(self.beta)
        };
        self.kappa_bar * (1.0 + power)
    }

    /// Planar (d = 3) reduction of the stress coefficient, `4/3 μ + η`.
    #[inline]
    pub fn planar_viscosity(&self, theta: f64) -> f64 {
        4.0 / 3.0 * self.viscosity(theta) + self.bulk_viscosity(theta)
    }
}

/// `x^{2/3}`. `powf` maps to the platform `pow`, which is several times
/// faster than the portable `cbrt` on targets without hardware FMA.
#[inline]
fn two_thirds_power(x: f64) -> f64 {
    x.powf(2.0 / 3.0)
}

pub(crate) const THETA_FLOOR: f64 = 1e-12;
const INVERSION_RTOL: f64 = 1e-13;

/// Pointwise `(ρ, ϑ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub rho: f64,
    pub theta: f64,
}

impl ThermoState {
    pub fn new(rho: f64, theta: f64) -> Result<Self, EosError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(domain("rho", rho, "rho > 0"));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain("theta", theta, "theta > 0"));
        }
        Ok(ThermoState { rho, theta })
    }

    /// `Z = ρ / ϑ^{3/2}`.
    #[inline]
    pub fn z(&self) -> f64 {
        self.rho / (self.theta * self.theta.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropy {
    /// `s`
    pub specific: f64,
    /// `ρs`
    pub density: f64,
}
