use crate::eos::{EosParams, ThermoState};
use crate::rarefaction::PrimitiveState;

/// Flux of `(ρ, ρu, E)` through a face.
pub type Flux = [f64; 3];

/// Conservative variables, exact Euler flux and `|u| + c_est` at a state.
#[inline]
pub(crate) fn euler_state(w: &PrimitiveState, eos: &EosParams) -> ([f64; 3], Flux, f64) {
    let st = ThermoState {
        rho: w.rho,
        theta: w.theta,
    };
    let p = eos.pressure(&st);
    let rho_e = eos.internal_energy(&st);
    let m = w.rho * w.u;
    let e = 0.5 * m * w.u + rho_e;
    let c = 1.2 * (5.0 / 3.0 * p / w.rho).sqrt();
    ([w.rho, m, e], [m, m * w.u + p, (e + p) * w.u], w.u.abs() + c)
}

/// Exact Euler flux `(ρu, ρu² + p, (E + p)u)`.
pub fn euler_flux(w: &PrimitiveState, eos: &EosParams) -> Flux {
    euler_state(w, eos).1
}

/// Rusanov flux `½(F(U_L) + F(U_R)) − ½λ(U_R − U_L)` with
/// `λ = max(|u| + c_est)` over both sides.
#[inline]
pub fn convective_flux(left: &PrimitiveState, right: &PrimitiveState, eos: &EosParams) -> Flux {
    let (ul, fl, sl) = euler_state(left, eos);
    let (ur, fr, sr) = euler_state(right, eos);
    let lambda = sl.max(sr);
    [
        0.5 * (fl[0] + fr[0]) - 0.5 * lambda * (ur[0] - ul[0]),
        0.5 * (fl[1] + fr[1]) - 0.5 * lambda * (ur[1] - ul[1]),
        0.5 * (fl[2] + fr[2]) - 0.5 * lambda * (ur[2] - ul[2]),
    ]
}

/// Viscous and heat-conduction flux between adjacent cell centres a
/// distance `h` apart. Transport coefficients are evaluated at the face
/// mean temperature.
#[inline]
pub fn dissipative_flux(left: &PrimitiveState, right: &PrimitiveState, h: f64, eos: &EosParams) -> Flux {
    if eos.eps == 0.0 {
        return [0.0; 3];
    }
    let theta_f = 0.5 * (left.theta + right.theta);
    let u_f = 0.5 * (left.u + right.u);
    let sigma = eos.eps * eos.planar_viscosity(theta_f) * (right.u - left.u) / h;
    let q = -eos.eps * eos.conductivity(theta_f) * (right.theta - left.theta) / h;
    [0.0, -sigma, -sigma * u_f + q]
}
