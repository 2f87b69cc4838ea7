//! Exact planar rarefaction waves of the isentropic γ = 5/3 Euler system.
//!
//! Both end states lie on the Boyle–Mariotte branch with `Z = Z̃`, so the
//! wave is the classical self-similar fan in `ξ = x₁/t`. For a 1-rarefaction
//! the Riemann invariant `u + 3c` is constant through the fan, which gives
//!
//! ```text
//! c(ξ) = (u_L + 3 c_L − ξ) / 4,   u = ξ + c,   ϑ = 3c²/5,   ρ = Z̃ ϑ^{3/2}
//! ```
//!
//! and the 3-family is its mirror image.

use thiserror::Error;

use crate::eos::ThermoState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("{0}")]
    Inadmissible(String),
    #[error("{quantity} = {value} violates {constraint}")]
    Domain {
        quantity: &'static str,
        value: f64,
        constraint: &'static str,
    },
}

/// `(ρ, ϑ, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub theta: f64,
    pub u: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, theta: f64, u: f64) -> Self {
        PrimitiveState { rho, theta, u }
    }

    pub fn thermo(&self) -> ThermoState {
        ThermoState {
            rho: self.rho,
            theta: self.theta,
        }
    }

    /// Sound speed of the γ = 5/3 Boyle–Mariotte gas, `sqrt(5ϑ/3)`.
    pub fn bm_sound_speed(&self) -> f64 {
        (5.0 * self.theta / 3.0).sqrt()
    }

    pub fn z(&self) -> f64 {
        self.thermo().z()
    }

    fn mirrored(&self) -> Self {
        PrimitiveState {
            u: -self.u,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    One,
    Three,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Three => 3,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Family::One),
            3 => Some(Family::Three),
            _ => None,
        }
    }

    fn mirrored(self) -> Self {
        match self {
            Family::One => Family::Three,
            Family::Three => Family::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannEndStates {
    pub left: PrimitiveState,
    pub right: PrimitiveState,
}

/// Connects `left` to the unique right state of density `rho_right` through
/// a rarefaction of the given family.
///
/// The junction value is taken from the left state, `Z̃ = ρ_L/ϑ_L^{3/2}`,
/// so both states sit on the Boyle–Mariotte branch. Family 1 requires
/// `rho_right <= ρ_L`, family 3 requires `rho_right >= ρ_L`.
pub fn connect_right_state(
    left: PrimitiveState,
    family: Family,
    rho_right: f64,
) -> Result<RiemannEndStates, WaveError> {
    if !(left.rho > 0.0 && left.theta > 0.0 && left.u.is_finite()) {
        return Err(WaveError::Inadmissible(format!(
            "left state must have positive density and temperature, got {left:?}"
        )));
    }
    if !(rho_right > 0.0 && rho_right.is_finite()) {
        return Err(WaveError::Domain {
            quantity: "rho_R",
            value: rho_right,
            constraint: "rho_R > 0",
        });
    }
    match family {
        Family::One if rho_right > left.rho => {
            return Err(WaveError::Inadmissible(format!(
                "a 1-rarefaction expands the gas: need rho_R <= rho_L = {}, got {rho_right}",
                left.rho
            )))
        }
        Family::Three if rho_right < left.rho => {
            return Err(WaveError::Inadmissible(format!(
                "a 3-rarefaction compresses towards the left: need rho_R >= rho_L = {}, got {rho_right}",
                left.rho
            )))
        }
        _ => {}
    }
    // Isentropic: ϑ ∝ ρ^{2/3}.
    let theta_r = left.theta * (rho_right / left.rho).powf(2.0 / 3.0);
    let c_l = left.bm_sound_speed();
    let c_r = (5.0 * theta_r / 3.0).sqrt();
    let u_r = match family {
        Family::One => left.u - 3.0 * (c_r - c_l),
        Family::Three => left.u + 3.0 * (c_r - c_l),
    };
    Ok(RiemannEndStates {
        left,
        right: PrimitiveState::new(rho_right, theta_r, u_r),
    })
}

/// Fan edges `(ξ_head, ξ_tail)` for the given family.
fn fan_speeds(ends: &RiemannEndStates, family: Family) -> (f64, f64) {
    let (l, r) = (ends.left, ends.right);
    match family {
        Family::One => (l.u - l.bm_sound_speed(), r.u - r.bm_sound_speed()),
        Family::Three => (l.u + l.bm_sound_speed(), r.u + r.bm_sound_speed()),
    }
}

/// Half-width `L` of `[-L, L]` keeping the fan and all acoustic signals
/// interior over `[0, T]`.
pub fn domain_halfwidth(
    ends: &RiemannEndStates,
    family: Family,
    final_time: f64,
    margin: f64,
) -> Result<f64, WaveError> {
    if !(final_time > 0.0) {
        return Err(WaveError::Domain {
            quantity: "T",
            value: final_time,
            constraint: "T > 0",
        });
    }
    if !(margin > 0.0) {
        return Err(WaveError::Domain {
            quantity: "margin",
            value: margin,
            constraint: "margin > 0",
        });
    }
    let (head, tail) = fan_speeds(ends, family);
    let (l, r) = (ends.left, ends.right);
    let speed = head
        .abs()
        .max(tail.abs())
        .max(l.u.abs() + l.bm_sound_speed())
        .max(r.u.abs() + r.bm_sound_speed());
    Ok((1.0 + margin) * speed * final_time)
}

pub const DEFAULT_MARGIN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RarefactionWave {
    pub family: Family,
    /// Constant Boyle–Mariotte entropy `3/2 log ϑ − log ρ = −log Z̃`.
    pub s_const: f64,
    pub ends: RiemannEndStates,
    pub xi_head: f64,
    pub xi_tail: f64,
    pub ztilde: f64,
    pub halfwidth: f64,
    pub final_time: f64,
}

impl RarefactionWave {
    pub fn new(
        ends: RiemannEndStates,
        family: Family,
        final_time: f64,
        margin: f64,
    ) -> Result<Self, WaveError> {
        let halfwidth = domain_halfwidth(&ends, family, final_time, margin)?;
        Self::with_halfwidth(ends, family, final_time, halfwidth)
    }

    /// Builds the wave on a caller-chosen domain; `L` must still contain the
    /// fan over `[0, T]`.
    pub fn with_halfwidth(
        ends: RiemannEndStates,
        family: Family,
        final_time: f64,
        halfwidth: f64,
    ) -> Result<Self, WaveError> {
        let (l, r) = (ends.left, ends.right);
        let ztilde = l.z();
        let z_gap = (r.z() - ztilde).abs() / ztilde;
        if z_gap > 1e-10 {
            return Err(WaveError::Inadmissible(format!(
                "end states must share Z = Z~ = {ztilde}; right state has Z = {}",
                r.z()
            )));
        }
        let (xi_head, xi_tail) = fan_speeds(&ends, family);
        if xi_head > xi_tail {
            return Err(WaveError::Inadmissible(format!(
                "characteristic speed must increase across the wave: head {xi_head} > tail {xi_tail}"
            )));
        }
        if !(l.u > 0.0 || r.u < 0.0) {
            return Err(WaveError::Inadmissible(format!(
                "boundary classification needs u_L > 0 or u_R < 0 (u_L = {}, u_R = {})",
                l.u, r.u
            )));
        }
        if !(xi_head.abs().max(xi_tail.abs()) * final_time < halfwidth) {
            return Err(WaveError::Inadmissible(format!(
                "the wave reaches the boundary before T = {final_time} on [-{halfwidth}, {halfwidth}]"
            )));
        }
        Ok(RarefactionWave {
            family,
            s_const: -ztilde.ln(),
            ends,
            xi_head,
            xi_tail,
            ztilde,
            halfwidth,
            final_time,
        })
    }

    /// Convenience constructor: connect, then size the domain.
    pub fn from_left_state(
        left: PrimitiveState,
        family: Family,
        rho_right: f64,
        final_time: f64,
        margin: f64,
    ) -> Result<Self, WaveError> {
        let ends = connect_right_state(left, family, rho_right)?;
        Self::new(ends, family, final_time, margin)
    }

    /// The same wave under `x₁ → −x₁`, `u → −u`. Maps a wave with `u_R < 0`
    /// onto one with inflow on the left.
    pub fn reflected(&self) -> Self {
        let ends = RiemannEndStates {
            left: self.ends.right.mirrored(),
            right: self.ends.left.mirrored(),
        };
        RarefactionWave {
            family: self.family.mirrored(),
            s_const: self.s_const,
            ends,
            xi_head: -self.xi_tail,
            xi_tail: -self.xi_head,
            ztilde: self.ztilde,
            halfwidth: self.halfwidth,
            final_time: self.final_time,
        }
    }

    /// State at `ξ = x₁/t`.
    pub fn at_xi(&self, xi: f64) -> PrimitiveState {
        let (l, r) = (self.ends.left, self.ends.right);
        if xi <= self.xi_head {
            return l;
        }
        if xi >= self.xi_tail {
            return r;
        }
        let c_l = l.bm_sound_speed();
        let (c, u) = match self.family {
            Family::One => {
                let c = (l.u + 3.0 * c_l - xi) / 4.0;
                (c, xi + c)
            }
            Family::Three => {
                let c = (xi - (l.u - 3.0 * c_l)) / 4.0;
                (c, xi - c)
            }
        };
        let theta = 0.6 * c * c;
        PrimitiveState {
            rho: self.ztilde * theta * theta.sqrt(),
            theta,
            u,
        }
    }

    /// Exact solution at `(t, x₁)`, `t > 0`.
    pub fn evaluate(&self, t: f64, x1: f64) -> Result<PrimitiveState, WaveError> {
        if !(t > 0.0) {
            return Err(WaveError::Domain {
                quantity: "t",
                value: t,
                constraint: "t > 0",
            });
        }
        Ok(self.at_xi(x1 / t))
    }

    /// Discontinuous Riemann datum at `t = 0`.
    pub fn riemann_datum(&self, x1: f64) -> PrimitiveState {
        if x1 < 0.0 {
            self.ends.left
        } else {
            self.ends.right
        }
    }

    /// Exact solution for `t > 0`, Riemann datum at `t = 0`.
    pub fn profile(&self, t: f64, x1: f64) -> PrimitiveState {
        if t > 0.0 {
            self.at_xi(x1 / t)
        } else {
            self.riemann_datum(x1)
        }
    }

    pub fn is_zero_strength(&self) -> bool {
        self.ends.left == self.ends.right
    }

    /// Closed-form `dϑ/du` inside the fan: `∓ 2/5 sqrt(5ϑ/3)`.
    pub fn fan_temperature_velocity_slope(&self, theta: f64) -> f64 {
        let c = (5.0 * theta / 3.0).sqrt();
        match self.family {
            Family::One => -0.4 * c,
            Family::Three => 0.4 * c,
        }
    }
}

/// Max-norm residuals of one set of balance laws.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ResidualNorms {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    /// `∂ₜs + u ∂ₓs`
    pub entropy: f64,
    /// `∂ₜϑ + u ∂ₓϑ + 2/3 ϑ ∂ₓu`
    pub temperature: f64,
}

impl ResidualNorms {
    fn absorb(&mut self, other: [f64; 5]) {
        self.mass = self.mass.max(other[0].abs());
        self.momentum = self.momentum.max(other[1].abs());
        self.energy = self.energy.max(other[2].abs());
        self.entropy = self.entropy.max(other[3].abs());
        self.temperature = self.temperature.max(other[4].abs());
    }

    pub fn max_conservation(&self) -> f64 {
        self.mass.max(self.momentum).max(self.energy)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EulerResidual {
    pub fan: ResidualNorms,
    pub constant: ResidualNorms,
    pub fan_samples: usize,
    pub constant_samples: usize,
}

const RESIDUAL_SAMPLES: usize = 201;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Left,
    Fan,
    Right,
}

impl RarefactionWave {
    fn region(&self, xi: f64) -> Region {
        if xi <= self.xi_head {
            Region::Left
        } else if xi >= self.xi_tail {
            Region::Right
        } else {
            Region::Fan
        }
    }

    /// Central-difference residuals of the Euler system (Boyle–Mariotte
    /// closure) at time `t`, with step `h` in both `t` and `x₁`.
    ///
    /// Samples are spread over `ξ ∈ [ξ_head − 1, ξ_tail + 1]`; a sample is
    /// kept only if its whole stencil lies in one smooth region, so the
    /// kinks at the fan edges never enter a difference quotient.
    pub fn euler_residual(&self, t: f64, h: f64) -> Result<EulerResidual, WaveError> {
        if !(t > h && h > 0.0) {
            return Err(WaveError::Domain {
                quantity: "t",
                value: t,
                constraint: "t > h > 0",
            });
        }
        let mut out = EulerResidual::default();
        let lo = self.xi_head - 1.0;
        let hi = self.xi_tail + 1.0;
        for k in 0..RESIDUAL_SAMPLES {
            let xi = lo + (hi - lo) * k as f64 / (RESIDUAL_SAMPLES - 1) as f64;
            let x = xi * t;
            let stencil = [(t, x), (t + h, x), (t - h, x), (t, x + h), (t, x - h)];
            let region = self.region(xi);
            if stencil.iter().any(|&(ts, xs)| self.region(xs / ts) != region) {
                continue;
            }
            let q = |ts: f64, xs: f64| conserved_bm(self.at_xi(xs / ts));
            let (qt_p, qt_m) = (q(t + h, x), q(t - h, x));
            let (qx_p, qx_m) = (q(t, x + h), q(t, x - h));
            let mut res = [0.0; 5];
            for e in 0..5 {
                res[e] = (qt_p[e] - qt_m[e]) / (2.0 * h) + (qx_p[e + 5] - qx_m[e + 5]) / (2.0 * h);
            }
            // Transport identities use the primitive fields.
            let w = self.at_xi(xi);
            let p = |ts: f64, xs: f64| self.at_xi(xs / ts);
            let (wt_p, wt_m, wx_p, wx_m) = (p(t + h, x), p(t - h, x), p(t, x + h), p(t, x - h));
            let s = |v: PrimitiveState| 1.5 * v.theta.ln() - v.rho.ln();
            let ds_dt = (s(wt_p) - s(wt_m)) / (2.0 * h);
            let ds_dx = (s(wx_p) - s(wx_m)) / (2.0 * h);
            let dth_dt = (wt_p.theta - wt_m.theta) / (2.0 * h);
            let dth_dx = (wx_p.theta - wx_m.theta) / (2.0 * h);
            let du_dx = (wx_p.u - wx_m.u) / (2.0 * h);
            let row = [
                res[0],
                res[1],
                res[2],
                ds_dt + w.u * ds_dx,
                dth_dt + w.u * dth_dx + 2.0 / 3.0 * w.theta * du_dx,
            ];
            if region == Region::Fan {
                out.fan.absorb(row);
                out.fan_samples += 1;
            } else {
                out.constant.absorb(row);
                out.constant_samples += 1;
            }
        }
        Ok(out)
    }
}

/// Conserved densities (first three) and fluxes (indices 5..8) of the
/// Boyle–Mariotte Euler system; slots 3, 4, 8, 9 are unused padding so the
/// residual loop can index densities and fluxes uniformly.
fn conserved_bm(w: PrimitiveState) -> [f64; 10] {
    let p = w.rho * w.theta;
    let energy = 0.5 * w.rho * w.u * w.u + 1.5 * p;
    [
        w.rho,
        w.rho * w.u,
        energy,
        0.0,
        0.0,
        w.rho * w.u,
        w.rho * w.u * w.u + p,
        (energy + p) * w.u,
        0.0,
        0.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_left() -> PrimitiveState {
        PrimitiveState::new(1.0, 1.0, 1.0)
    }

    fn default_wave() -> RarefactionWave {
        RarefactionWave::from_left_state(default_left(), Family::One, 0.5, 0.5, DEFAULT_MARGIN)
            .unwrap()
    }

    #[test]
    fn zero_strength_connection_is_identity() {
        let ends = connect_right_state(default_left(), Family::One, 1.0).unwrap();
        assert_eq!(ends.right, ends.left);
    }

    #[test]
    fn connect_example_values() {
        let ends = connect_right_state(default_left(), Family::One, 0.5).unwrap();
        let r = ends.right;
        // Frozen from direct evaluation: ϑ_R = 0.5^{2/3}, c_R = sqrt(5ϑ_R/3),
        // u_R = 1 − 3(c_R − sqrt(5/3)).
        assert!((r.theta - 0.629_960_524_947_436_6).abs() < 1e-12);
        assert!((r.bm_sound_speed() - 1.024_662_973_004_162).abs() < 1e-12);
        assert!((r.u - 1.798_994_427_194_931).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_densities_are_rejected() {
        assert!(matches!(
            connect_right_state(default_left(), Family::One, 1.5),
            Err(WaveError::Inadmissible(_))
        ));
        assert!(matches!(
            connect_right_state(default_left(), Family::Three, 0.5),
            Err(WaveError::Inadmissible(_))
        ));
        assert!(connect_right_state(default_left(), Family::One, -1.0).is_err());
    }

    #[test]
    fn evaluate_outside_and_inside_fan() {
        let w = default_wave();
        let t = 0.3;
        assert_eq!(w.evaluate(t, (w.xi_head - 1.0) * t).unwrap(), w.ends.left);
        assert_eq!(w.evaluate(t, (w.xi_tail + 1.0) * t).unwrap(), w.ends.right);
        let mid = w.evaluate(t, 0.0).unwrap();
        // c = (1 + 3 sqrt(5/3)) / 4, u = c, ϑ = 3c²/5, ρ = ϑ^{3/2}
        assert!((mid.u - 1.218_245_836_551_854).abs() < 1e-12);
        assert!((mid.theta - 0.890_473_750_965_556_4).abs() < 1e-12);
        assert!((mid.rho - 0.840_294_813_610_389_8).abs() < 1e-12);
        assert!(mid.rho > 0.5 && mid.rho < 1.0);
        assert!(w.evaluate(0.0, 0.1).is_err());
        assert!(w.evaluate(-1.0, 0.1).is_err());
    }

    #[test]
    fn fan_is_continuous_at_edges() {
        let w = default_wave();
        let eps = 1e-12;
        let a = w.at_xi(w.xi_head + eps);
        let b = w.at_xi(w.xi_tail - eps);
        assert!((a.rho - w.ends.left.rho).abs() < 1e-10);
        assert!((a.u - w.ends.left.u).abs() < 1e-10);
        assert!((b.rho - w.ends.right.rho).abs() < 1e-10);
        assert!((b.theta - w.ends.right.theta).abs() < 1e-10);
    }

    #[test]
    fn domain_halfwidth_examples() {
        let ends = connect_right_state(default_left(), Family::One, 0.5).unwrap();
        let l = domain_halfwidth(&ends, Family::One, 0.5, 0.2).unwrap();
        // 1.2 · (u_R + c_R) · 0.5
        assert!((l - 1.694_194_440_119_456).abs() < 1e-12);

        let rest = PrimitiveState::new(1.0, 1.0, 0.0);
        let still = RiemannEndStates {
            left: rest,
            right: rest,
        };
        let l0 = domain_halfwidth(&still, Family::One, 2.0, 0.3).unwrap();
        assert!((l0 - 1.3 * rest.bm_sound_speed() * 2.0).abs() < 1e-14);

        let mut prev = 0.0;
        for k in 1..20 {
            let lk = domain_halfwidth(&ends, Family::One, 0.1 * k as f64, 0.2).unwrap();
            assert!(lk >= prev);
            prev = lk;
        }
        assert!(domain_halfwidth(&ends, Family::One, 0.0, 0.2).is_err());
        assert!(domain_halfwidth(&ends, Family::One, 1.0, 0.0).is_err());
    }

    #[test]
    fn wave_invariants_hold() {
        let w = default_wave();
        assert!(w.xi_head < w.xi_tail);
        assert!(w.xi_head.abs().max(w.xi_tail.abs()) * w.final_time < w.halfwidth);
        assert!((w.s_const - 0.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_waves_without_inflow_side() {
        // u_L < 0 and u_R > 0: neither boundary classification applies.
        let left = PrimitiveState::new(1.0, 1.0, -0.2);
        let err = RarefactionWave::from_left_state(left, Family::One, 0.5, 0.5, 0.2).unwrap_err();
        assert!(matches!(err, WaveError::Inadmissible(_)));
    }

    #[test]
    fn family_three_fan() {
        let left = PrimitiveState::new(0.5, 0.5f64.powf(2.0 / 3.0), -2.0);
        let w = RarefactionWave::from_left_state(left, Family::Three, 1.0, 0.5, 0.2).unwrap();
        assert!(w.ends.right.u < 0.0);
        assert!(w.xi_head < w.xi_tail);
        let x = 0.5 * (w.xi_head + w.xi_tail);
        let s = w.at_xi(x);
        assert!((s.u + s.bm_sound_speed() - x).abs() < 1e-14);
        let r = w.reflected();
        assert_eq!(r.family, Family::One);
        assert!(r.ends.left.u > 0.0);
        for k in 0..50 {
            let xi = -3.0 + 0.12 * k as f64;
            let a = w.at_xi(xi);
            let b = r.at_xi(-xi);
            assert!((a.rho - b.rho).abs() < 1e-13);
            assert!((a.theta - b.theta).abs() < 1e-13);
            assert!((a.u + b.u).abs() < 1e-13);
        }
    }

    #[test]
    fn euler_residual_constant_regions_vanish() {
        let w = default_wave();
        let r = w.euler_residual(0.3, 1e-3).unwrap();
        assert!(r.constant_samples > 0 && r.fan_samples > 0);
        assert_eq!(r.constant.max_conservation(), 0.0);
        assert!(r.fan.entropy < 1e-9);
    }

    #[test]
    fn euler_residual_is_second_order_in_fan() {
        let w = default_wave();
        let coarse = w.euler_residual(0.3, 2e-3).unwrap();
        let fine = w.euler_residual(0.3, 1e-3).unwrap();
        for (a, b) in [
            (coarse.fan.mass, fine.fan.mass),
            (coarse.fan.momentum, fine.fan.momentum),
            (coarse.fan.energy, fine.fan.energy),
        ] {
            assert!(a / b >= 3.5, "ratio {}", a / b);
        }
    }
}
