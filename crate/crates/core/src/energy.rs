//! Relative energy, ballistic energy and the distances of the numerical
//! solution to the rarefaction wave.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::eos::EosParams;
use crate::rarefaction::{Family, PrimitiveState, RarefactionWave};
use crate::solver::{FluidField, Observer, SolverError};

/// `½ρ|u−ũ|² + ρe − ϑ̃ρs − (ẽ − ϑ̃s̃ + p̃/ρ̃)ρ + p̃`.
///
/// The radiation part collapses to `a(ϑ−ϑ̃)²(3ϑ² + 2ϑϑ̃ + ϑ̃²)`. When both
/// states share a branch the structural part is also rewritten as a sum of
/// non-negative terms (with `r = ϑ/ϑ̃`, `q = ρ/ρ̃`):
///
/// ```text
/// Boyle–Mariotte: ϑ̃[3/2 ρ(r − 1 − log r) + ρ log q − ρ + ρ̃]
/// degenerate:     9/10 Z̃^{-2/3} ρ̃^{5/3}(q^{5/3} − 1 − 5/3(q − 1))
///                 + Z̃ϑ̃^{5/2}(3/5 r^{5/2} − r^{3/2} + 2/5)
/// ```
///
/// so nearby states avoid the cancellation of the textbook expression.
pub fn relative_energy_density(state: &PrimitiveState, target: &PrimitiveState, eos: &EosParams) -> f64 {
    let (rho, theta) = (state.rho, state.theta);
    let (rho_t, theta_t) = (target.rho, target.theta);
    let du = state.u - target.u;
    let kinetic = 0.5 * rho * du * du;
    let dth = theta - theta_t;
    let radiation =
        eos.a_eps * dth * dth * (3.0 * theta * theta + 2.0 * theta * theta_t + theta_t * theta_t);
    let zt = eos.ztilde;
    let (z, z_t) = (state.z(), target.z());
    let structural = if z <= zt && z_t <= zt {
        let x = dth / theta_t;
        let thermal = 1.5 * rho * (x - x.ln_1p());
        let y = (rho - rho_t) / rho_t;
        let density = rho * y.ln_1p() - (rho - rho_t);
        theta_t * (thermal + density)
    } else if z > zt && z_t > zt {
        // Cold part 0.9 Z̃^{-2/3} ρ^{5/3} is a function of ρ alone; the rest
        // is Z̃ϑ̃^{5/2}(3/5 r^{5/2} − r^{3/2} + 2/5).
        let y = (rho - rho_t) / rho_t;
        let q53 = (5.0 / 3.0 * y.ln_1p()).exp_m1() - 5.0 / 3.0 * y;
        let cold = 0.9 * zt.powf(-2.0 / 3.0) * rho_t * rho_t.powf(2.0 / 3.0) * q53;
        let r = theta / theta_t;
        let x = dth / theta_t;
        // 3/5 r^{5/2} − r^{3/2} + 2/5 = r^{3/2}(3/5 x − 2/5) + 2/5
        let r32 = r * r.sqrt();
        let thermal = zt * theta_t * theta_t * theta_t.sqrt() * (r32 * (0.6 * x - 0.4) + 0.4);
        cold + thermal
    } else {
        let cold = eos.without_radiation();
        let (st, tg) = (state.thermo(), target.thermo());
        let e = cold.internal_energy(&st) / rho;
        let e_t = cold.internal_energy(&tg) / rho_t;
        let s = cold.specific_entropy(rho, theta);
        let s_t = cold.specific_entropy(rho_t, theta_t);
        rho * (e - e_t) - theta_t * rho * (s - s_t) - cold.pressure(&tg) * (rho - rho_t) / rho_t
    };
    kinetic + structural + radiation
}

/// The textbook form of [`relative_energy_density`], term by term.
pub fn relative_energy_density_direct(state: &PrimitiveState, target: &PrimitiveState, eos: &EosParams) -> f64 {
    let (st, tg) = (state.thermo(), target.thermo());
    let du = state.u - target.u;
    let e_t = eos.internal_energy(&tg) / tg.rho;
    let s_t = eos.specific_entropy(tg.rho, tg.theta);
    let p_t = eos.pressure(&tg);
    0.5 * st.rho * du * du + eos.internal_energy(&st)
        - tg.theta * eos.entropy(&st).density
        - (e_t - tg.theta * s_t + p_t / tg.rho) * st.rho
        + p_t
}

/// Midpoint-rule integral of the relative energy against the wave at `t`
/// (the Riemann datum at `t = 0`).
pub fn total_relative_energy(field: &FluidField, wave: &RarefactionWave, t: f64, eos: &EosParams) -> f64 {
    let g = field.grid;
    (0..field.len())
        .map(|i| relative_energy_density(&field.primitive(i), &wave.profile(t, g.center(i)), eos))
        .sum::<f64>()
        * g.h
}

/// `(∑|ρ−ρ̃|h, ∑|ϑ−ϑ̃|h, ∑|ρu−ρ̃ũ|h)`.
pub fn l1_distances(field: &FluidField, wave: &RarefactionWave, t: f64) -> (f64, f64, f64) {
    let g = field.grid;
    let mut d = (0.0, 0.0, 0.0);
    for i in 0..field.len() {
        let w = wave.profile(t, g.center(i));
        d.0 += (field.rho[i] - w.rho).abs();
        d.1 += (field.theta[i] - w.theta).abs();
        d.2 += (field.mom[i] - w.rho * w.u).abs();
    }
    (d.0 * g.h, d.1 * g.h, d.2 * g.h)
}

/// Boundary-compatible weights of the ballistic energy: a non-decreasing
/// velocity `u_B` and a convex temperature `ϑ_B` below the wave.
///
/// `u_B` is the cubic smoothstep between the boundary velocities. `ϑ_B` is
/// the maximum of the far-side boundary temperature and the steepest line
/// through the near-side boundary value that stays below
/// `m(x) = min(ϑ̃(T, x), ϑ̃(0, x))`. Along a single rarefaction `ϑ̃(t, x)`
/// is monotone in `t` on either side of `x = 0`, so `m` is the minimum over
/// `t ∈ [0, T]` and `ϑ_B ≤ ϑ̃` holds for all those times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallisticData {
    pub halfwidth: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub theta_left: f64,
    pub theta_right: f64,
    family: Family,
    slope: f64,
}

const ENVELOPE_SAMPLES: usize = 8193;

impl BallisticData {
    pub fn for_wave(wave: &RarefactionWave) -> Result<Self, String> {
        let l = wave.halfwidth;
        let (left, right) = (wave.ends.left, wave.ends.right);
        let envelope = |x: f64| {
            wave.profile(wave.final_time, x)
                .theta
                .min(wave.riemann_datum(x).theta)
        };
        let xs = (0..ENVELOPE_SAMPLES).map(|k| -l + 2.0 * l * k as f64 / (ENVELOPE_SAMPLES - 1) as f64);
        // Lines anchored at the hot boundary, sloping towards the cold one.
        let slope = match wave.family {
            Family::One => xs
                .skip(1)
                .map(|x| (envelope(x) - left.theta) / (x + l))
                .fold(0.0_f64, f64::min),
            Family::Three => xs
                .take(ENVELOPE_SAMPLES - 1)
                .map(|x| (envelope(x) - right.theta) / (l - x))
                .fold(0.0_f64, f64::min),
        };
        let data = BallisticData {
            halfwidth: l,
            u_left: left.u,
            u_right: right.u,
            theta_left: left.theta,
            theta_right: right.theta,
            family: wave.family,
            // Sampling can miss the exact tangency by O(Δx²); steepen slightly.
            slope: slope * (1.0 + 1e-6),
        };
        data.verify(wave)?;
        Ok(data)
    }

    #[inline]
    pub fn u_b(&self, x: f64) -> f64 {
        let s = ((x + self.halfwidth) / (2.0 * self.halfwidth)).clamp(0.0, 1.0);
        self.u_left + (self.u_right - self.u_left) * s * s * (3.0 - 2.0 * s)
    }

    #[inline]
    pub fn theta_b(&self, x: f64) -> f64 {
        let l = self.halfwidth;
        match self.family {
            Family::One => self.theta_right.max(self.theta_left + self.slope * (x + l)),
            Family::Three => self.theta_left.max(self.theta_right + self.slope * (l - x)),
        }
    }

    /// Boundary values, monotonicity of `u_B`, convexity, positivity and
    /// dominance `ϑ_B ≤ ϑ̃(t, ·)` on a sample of times.
    fn verify(&self, wave: &RarefactionWave) -> Result<(), String> {
        let l = self.halfwidth;
        let tol = 1e-12;
        if (self.theta_b(-l) - self.theta_left).abs() > tol || (self.theta_b(l) - self.theta_right).abs() > tol {
            return Err(format!(
                "theta_B misses the boundary temperatures: {} vs {}, {} vs {}",
                self.theta_b(-l),
                self.theta_left,
                self.theta_b(l),
                self.theta_right
            ));
        }
        let n = 2001;
        let xs: Vec<f64> = (0..n).map(|k| -l + 2.0 * l * k as f64 / (n - 1) as f64).collect();
        for w in xs.windows(3) {
            let (a, b, c) = (self.theta_b(w[0]), self.theta_b(w[1]), self.theta_b(w[2]));
            if a + c - 2.0 * b < -1e-12 {
                return Err(format!("theta_B not convex near x = {}", w[1]));
            }
            if self.u_b(w[1]) < self.u_b(w[0]) - 1e-15 {
                return Err(format!("u_B decreasing near x = {}", w[1]));
            }
        }
        for k in 0..=20 {
            let t = wave.final_time * k as f64 / 20.0;
            for &x in &xs {
                let tb = self.theta_b(x);
                if !(tb > 0.0) || tb > wave.profile(t, x).theta * (1.0 + 1e-12) {
                    return Err(format!(
                        "theta_B = {tb} exceeds the wave temperature {} at t = {t}, x = {x}",
                        wave.profile(t, x).theta
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `½ρ|u−u_B|² + ρe − ϑ_B ρs`.
pub fn ballistic_energy_density(state: &PrimitiveState, u_b: f64, theta_b: f64, eos: &EosParams) -> f64 {
    let st = state.thermo();
    let du = state.u - u_b;
    0.5 * state.rho * du * du + eos.internal_energy(&st) - theta_b * eos.entropy(&st).density
}

pub fn total_ballistic_energy(field: &FluidField, data: &BallisticData, eos: &EosParams) -> f64 {
    let g = field.grid;
    (0..field.len())
        .map(|i| {
            let x = g.center(i);
            ballistic_energy_density(&field.primitive(i), data.u_b(x), data.theta_b(x), eos)
        })
        .sum::<f64>()
        * g.h
}

/// `∫ (ϑ_B/ϑ)(S:∇u + εκ|∇ϑ|²/ϑ) dx` over interior faces, with
/// `S:∇u = ε(4/3 μ + η)|∂ₓu|²`. Every term is non-negative.
pub fn dissipation_rate(field: &FluidField, data: &BallisticData, eos: &EosParams) -> f64 {
    if eos.eps == 0.0 {
        return 0.0;
    }
    let g = field.grid;
    let mut total = 0.0;
    for i in 0..field.len() - 1 {
        let x_f = g.center(i) + 0.5 * g.h;
        let theta_f = 0.5 * (field.theta[i] + field.theta[i + 1]);
        let du = (field.velocity(i + 1) - field.velocity(i)) / g.h;
        let dth = (field.theta[i + 1] - field.theta[i]) / g.h;
        let viscous = eos.eps * eos.planar_viscosity(theta_f) * du * du;
        let thermal = eos.eps * eos.conductivity(theta_f) * dth * dth / theta_f;
        total += data.theta_b(x_f) / theta_f * (viscous + thermal);
    }
    total * g.h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub eps: f64,
    pub t: f64,
    #[serde(rename = "E_rel_total")]
    pub e_rel_total: f64,
    #[serde(rename = "L1_rho")]
    pub l1_rho: f64,
    #[serde(rename = "L1_theta")]
    pub l1_theta: f64,
    #[serde(rename = "L1_m")]
    pub l1_m: f64,
    pub ballistic_total: f64,
    pub dissipation_accum: f64,
}

pub const REPORT_COLUMNS: [&str; 8] = [
    "eps",
    "t",
    "E_rel_total",
    "L1_rho",
    "L1_theta",
    "L1_m",
    "ballistic_total",
    "dissipation_accum",
];

/// Observer that records an [`EnergyReport`] at every output and
/// accumulates the dissipation integral after every step.
pub struct EnergyProbe {
    wave: RarefactionWave,
    eos: EosParams,
    ballistic: BallisticData,
    dissipation: f64,
    pub reports: Vec<EnergyReport>,
}

impl EnergyProbe {
    pub fn new(wave: RarefactionWave, eos: EosParams) -> Result<Self, String> {
        Ok(EnergyProbe {
            ballistic: BallisticData::for_wave(&wave)?,
            wave,
            eos,
            dissipation: 0.0,
            reports: Vec::new(),
        })
    }

    pub fn ballistic(&self) -> &BallisticData {
        &self.ballistic
    }

    pub fn report(&self, field: &FluidField, t: f64) -> EnergyReport {
        let (l1_rho, l1_theta, l1_m) = l1_distances(field, &self.wave, t);
        EnergyReport {
            eps: self.eos.eps,
            t,
            e_rel_total: total_relative_energy(field, &self.wave, t, &self.eos),
            l1_rho,
            l1_theta,
            l1_m,
            ballistic_total: total_ballistic_energy(field, &self.ballistic, &self.eos),
            dissipation_accum: self.dissipation,
        }
    }
}

impl Observer for EnergyProbe {
    fn observe(&mut self, field: &FluidField, t: f64) -> Result<(), SolverError> {
        let r = self.report(field, t);
        self.reports.push(r);
        Ok(())
    }

    fn after_step(&mut self, field: &FluidField, _t: f64, dt: f64) {
        self.dissipation += dt * dissipation_rate(field, &self.ballistic, &self.eos);
    }
}

// ---- Bregman property suite ----------------------------------------------

pub const NONNEGATIVITY_TOL: f64 = 1e-12;
pub const INDISCERNIBLE_ENERGY: f64 = 1e-10;
pub const INDISCERNIBLE_DISTANCE: f64 = 1e-4;
pub const CONVEXITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BregmanReport {
    pub samples: usize,
    /// Smallest relative energy over random pairs.
    pub min_energy: f64,
    /// Pairs with `E ≤ 1e-10`, mostly from the near-identical family.
    pub small_energy_pairs: usize,
    /// Largest component-wise distance `max(|Δρ|, |Δϑ|, |Δu|)` among them.
    pub max_distance_at_small_energy: f64,
    /// Same, scale-free: `max(|Δρ|/ρ̃, |Δϑ|/ϑ̃, |Δu|/sqrt(ϑ̃))` among pairs
    /// with `E/(ρ̃ϑ̃) ≤ 1e-10`. The absolute version above cannot hold on
    /// the whole sampling box: at `ρ = 1e-2`, `E = ½ρ|Δu|² ≤ 1e-10` allows
    /// `|Δu| ≈ 1.4e-4`.
    pub max_scaled_distance_at_small_energy: f64,
    pub scaled_small_energy_pairs: usize,
    /// Largest `E(mid) − ½(E₁+E₂)` beyond rounding of the summands.
    pub worst_convexity_excess: f64,
    pub convexity_pairs: usize,
    pub skipped: usize,
}

fn random_state(rng: &mut ChaCha8Rng) -> PrimitiveState {
    let lr = |rng: &mut ChaCha8Rng| (rng.gen_range((1e-2f64).ln()..(1e2f64).ln())).exp();
    PrimitiveState::new(lr(rng), lr(rng), rng.gen_range(-5.0..5.0))
}

/// Perturbs every component by a relative amount up to `scale`.
fn nearby_state(rng: &mut ChaCha8Rng, base: &PrimitiveState, scale: f64) -> PrimitiveState {
    let mut f = || 1.0 + scale * rng.gen_range(-1.0..1.0);
    PrimitiveState::new(base.rho * f(), base.theta * f(), base.u + scale * rng.gen_range(-1.0..1.0))
}

/// Conservative entropy variables `(ρ, m, S = ρs)`.
fn entropy_variables(w: &PrimitiveState, eos: &EosParams) -> [f64; 3] {
    [w.rho, w.rho * w.u, eos.entropy(&w.thermo()).density]
}

fn from_entropy_variables(v: [f64; 3], eos: &EosParams) -> Option<PrimitiveState> {
    let theta = eos.invert_entropy(v[0], v[2]).ok()?;
    Some(PrimitiveState::new(v[0], theta, v[1] / v[0]))
}

/// Random-sample check of the Bregman structure of the relative energy:
/// non-negativity, identity of indiscernibles and midpoint convexity in
/// `(ρ, m, ρs)`. Half of the samples are near-identical pairs so that the
/// small-energy implication is actually exercised.
pub fn bregman_properties_check(eos: &EosParams, samples: usize, seed: u64) -> BregmanReport {
    assert!(samples >= 100, "bregman_properties_check needs at least 100 samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = BregmanReport {
        samples,
        min_energy: f64::INFINITY,
        small_energy_pairs: 0,
        max_distance_at_small_energy: 0.0,
        max_scaled_distance_at_small_energy: 0.0,
        scaled_small_energy_pairs: 0,
        worst_convexity_excess: f64::NEG_INFINITY,
        convexity_pairs: 0,
        skipped: 0,
    };
    for k in 0..samples {
        let target = random_state(&mut rng);
        let state = if k % 2 == 0 {
            random_state(&mut rng)
        } else {
            let scale = 10f64.powf(rng.gen_range(-9.0..-2.0));
            nearby_state(&mut rng, &target, scale)
        };
        let e = relative_energy_density(&state, &target, eos);
        rep.min_energy = rep.min_energy.min(e);
        let dist = (state.rho - target.rho)
            .abs()
            .max((state.theta - target.theta).abs())
            .max((state.u - target.u).abs());
        if e <= INDISCERNIBLE_ENERGY {
            rep.small_energy_pairs += 1;
            rep.max_distance_at_small_energy = rep.max_distance_at_small_energy.max(dist);
        }
        let scale = target.rho * target.theta;
        if e / scale <= INDISCERNIBLE_ENERGY {
            let scaled = ((state.rho - target.rho) / target.rho)
                .abs()
                .max(((state.theta - target.theta) / target.theta).abs())
                .max((state.u - target.u).abs() / target.theta.sqrt());
            rep.scaled_small_energy_pairs += 1;
            rep.max_scaled_distance_at_small_energy = rep.max_scaled_distance_at_small_energy.max(scaled);
        }

        // Convexity: a second state, midpoint in entropy variables.
        let other = if k % 4 == 1 {
            let scale = 10f64.powf(rng.gen_range(-6.0..-1.0));
            nearby_state(&mut rng, &state, scale)
        } else {
            random_state(&mut rng)
        };
        let (a, b) = (entropy_variables(&state, eos), entropy_variables(&other, eos));
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
        match from_entropy_variables(mid, eos) {
            Some(m) => {
                let e1 = e;
                let e2 = relative_energy_density(&other, &target, eos);
                let em = relative_energy_density(&m, &target, eos);
                // Rounding of the summands, dominated by the total energies.
                let total = |w: &PrimitiveState| {
                    0.5 * w.rho * w.u * w.u + eos.internal_energy(&w.thermo())
                        + target.theta * eos.entropy(&w.thermo()).density.abs()
                };
                let slack = 64.0 * f64::EPSILON * (total(&state) + total(&other) + total(&m));
                rep.worst_convexity_excess = rep
                    .worst_convexity_excess
                    .max(em - 0.5 * (e1 + e2) - slack);
                rep.convexity_pairs += 1;
            }
            None => rep.skipped += 1,
        }
    }
    rep
}

impl BregmanReport {
    /// Non-negativity, scale-free identity of indiscernibles and midpoint
    /// convexity.
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_least("relative energy non-negative", self.min_energy, -NONNEGATIVITY_TOL)
                .with_note(format!("{} samples", self.samples)),
            Check::at_most(
                "E/(rho~ theta~) <= 1e-10 implies relative distance <= 1e-4",
                self.max_scaled_distance_at_small_energy,
                INDISCERNIBLE_DISTANCE,
            )
            .with_note(format!("{} pairs", self.scaled_small_energy_pairs)),
            Check::at_most(
                "midpoint convexity in (rho, m, rho*s)",
                self.worst_convexity_excess,
                CONVEXITY_TOL,
            )
            .with_note(format!(
                "{} pairs, {} skipped inversions",
                self.convexity_pairs, self.skipped
            )),
        ]
    }

    /// The unscaled implication `E <= 1e-10 => max(|Δρ|, |Δϑ|, |Δu|) <= 1e-4`.
    /// Reported, not asserted: it fails where the state is dilute or hot.
    pub fn absolute_distance_check(&self) -> Check {
        Check::at_most(
            "E <= 1e-10 implies absolute component distance <= 1e-4",
            self.max_distance_at_small_energy,
            INDISCERNIBLE_DISTANCE,
        )
        .with_note(format!("{} pairs with E <= 1e-10", self.small_energy_pairs))
    }
}

// ---- uniform bound on the ballistic energy ---------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct UniformBoundVerdict {
    /// `(ε, C_ε)` in decreasing `ε`, where
    /// `C_ε = max(0, max_t (B(t) + D(t) − B(0))/t)`.
    pub per_eps: Vec<(f64, f64)>,
    /// The single constant valid across the sweep, `max_ε C_ε`.
    pub fitted_c: f64,
    /// `C_{k+1}/C_k` along decreasing `ε`; `0/0` counts as 1.
    pub ratios: Vec<f64>,
    pub with_dissipation: bool,
}

pub const UNIFORM_BOUND_RATIO: f64 = 1.1;

impl UniformBoundVerdict {
    pub fn worst_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.fitted_c.is_finite() && self.worst_ratio() <= UNIFORM_BOUND_RATIO
    }
}

/// Fits `B(t) ≤ B(0) + C t` per `ε`; with `with_dissipation` the left side
/// also carries the accumulated dissipation, as in the ballistic energy
/// inequality.
pub fn uniform_bound_probe(trajectories: &[Vec<EnergyReport>], with_dissipation: bool) -> UniformBoundVerdict {
    let mut per_eps: Vec<(f64, f64)> = trajectories
        .iter()
        .filter(|tr| !tr.is_empty())
        .map(|tr| {
            let b0 = tr[0].ballistic_total;
            let t0 = tr[0].t;
            let c = tr
                .iter()
                .filter(|r| r.t > t0)
                .map(|r| {
                    let d = if with_dissipation { r.dissipation_accum } else { 0.0 };
                    (r.ballistic_total + d - b0) / (r.t - t0)
                })
                .fold(0.0, f64::max);
            (tr[0].eps, c)
        })
        .collect();
    per_eps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let ratios = per_eps
        .windows(2)
        .map(|w| {
            if w[0].1 == 0.0 && w[1].1 == 0.0 {
                1.0
            } else {
                w[1].1 / w[0].1
            }
        })
        .collect();
    UniformBoundVerdict {
        fitted_c: per_eps.iter().map(|p| p.1).fold(0.0, f64::max),
        per_eps,
        ratios,
        with_dissipation,
    }
}
