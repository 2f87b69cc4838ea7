use proptest::prelude::*;
use rarefaction_nsf::energy::{
    bregman_properties_check, l1_distances, relative_energy_density, relative_energy_density_direct,
    total_relative_energy, EnergyProbe,
};
use rarefaction_nsf::eos::EosParams;
use rarefaction_nsf::rarefaction::{Family, PrimitiveState, RarefactionWave, DEFAULT_MARGIN};
use rarefaction_nsf::solver::{run, FluidField, SolverConfig};

fn default_wave() -> RarefactionWave {
    RarefactionWave::from_left_state(PrimitiveState::new(1.0, 1.0, 1.0), Family::One, 0.5, 0.5, DEFAULT_MARGIN).unwrap()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn state() -> impl Strategy<Value = PrimitiveState> {
    (log_uniform(1e-2, 1e2), log_uniform(1e-2, 1e2), -5.0f64..5.0).prop_map(|(r, t, u)| PrimitiveState::new(r, t, u))
}

fn eos() -> impl Strategy<Value = EosParams> {
    (log_uniform(0.1, 10.0), 0.0f64..0.2).prop_map(|(zt, eps)| EosParams::new(zt, eps).unwrap())
}

/// Magnitude of the largest term in the textbook expression.
fn term_scale(s: &PrimitiveState, t: &PrimitiveState, eos: &EosParams) -> f64 {
    let (a, b) = (s.thermo(), t.thermo());
    let e = eos.internal_energy(&a) + eos.internal_energy(&b);
    let kin = 0.5 * s.rho * (s.u * s.u + t.u * t.u);
    let ent = t.theta * (eos.entropy(&a).density.abs() + s.rho * eos.specific_entropy(t.rho, t.theta).abs());
    e + kin + ent + eos.pressure(&b) * (1.0 + s.rho / t.rho)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn split_form_agrees_with_textbook_form(s in state(), t in state(), eos in eos()) {
        let a = relative_energy_density(&s, &t, &eos);
        let b = relative_energy_density_direct(&s, &t, &eos);
        prop_assert!((a - b).abs() <= 1e-12 * term_scale(&s, &t, &eos), "{a} vs {b}");
    }

    #[test]
    fn relative_energy_is_non_negative(s in state(), t in state(), eos in eos()) {
        prop_assert!(relative_energy_density(&s, &t, &eos) >= -1e-12);
        prop_assert_eq!(relative_energy_density(&t, &t, &eos), 0.0);
    }
}

fn perturbed(wave: &RarefactionWave, t: f64, eos: &EosParams, amp: [f64; 3], k: f64) -> FluidField {
    let grid = rarefaction_nsf::solver::Grid::new(wave.halfwidth, 200).unwrap();
    FluidField::from_primitives(grid, eos, |x| {
        let w = wave.profile(t, x);
        let bump = (k * x).sin();
        PrimitiveState::new(w.rho * (1.0 + amp[0] * bump), w.theta * (1.0 + amp[1] * bump), w.u + amp[2] * bump)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn l1_triangle_inequality(a in prop::array::uniform3(-0.3f64..0.3), b in prop::array::uniform3(-0.3f64..0.3),
                              ka in 1.0f64..20.0, kb in 1.0f64..20.0, t in 0.05f64..0.5) {
        let wave = default_wave();
        let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
        let fa = perturbed(&wave, t, &eos, a, ka);
        let fb = perturbed(&wave, t, &eos, b, kb);
        let h = fa.grid.h;
        let mut ab = (0.0, 0.0, 0.0);
        for i in 0..fa.len() {
            ab.0 += (fa.rho[i] - fb.rho[i]).abs() * h;
            ab.1 += (fa.theta[i] - fb.theta[i]).abs() * h;
            ab.2 += (fa.mom[i] - fb.mom[i]).abs() * h;
        }
        let (da, db) = (l1_distances(&fa, &wave, t), l1_distances(&fb, &wave, t));
        let slack = 1e-12;
        prop_assert!(da.0 <= ab.0 + db.0 + slack);
        prop_assert!(da.1 <= ab.1 + db.1 + slack);
        prop_assert!(da.2 <= ab.2 + db.2 + slack);
    }
}

#[test]
fn midpoint_quadrature_matches_oversampled_reference() {
    let wave = default_wave();
    let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
    let mut config = SolverConfig::for_wave(&wave, 200, eos).unwrap();
    config.final_time = 0.3;
    let field = run(&config, &wave, &mut ()).unwrap().field;
    let t = 0.3;
    let midpoint = total_relative_energy(&field, &wave, t, &eos);
    let g = field.grid;
    let mut fine = 0.0;
    for i in 0..field.len() {
        let s = field.primitive(i);
        for k in 0..4 {
            let x = g.center(i) - 0.5 * g.h + (k as f64 + 0.5) * g.h / 4.0;
            fine += relative_energy_density(&s, &wave.profile(t, x), &eos) * g.h / 4.0;
        }
    }
    assert!(midpoint > 0.0);
    assert!((midpoint - fine).abs() <= 0.01 * fine, "{midpoint} vs {fine}");
}

#[test]
fn dissipation_accumulates_monotonically() {
    let wave = default_wave();
    let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
    let mut config = SolverConfig::for_wave(&wave, 200, eos).unwrap();
    config.output_times = vec![0.1, 0.2, 0.3, 0.4];
    let mut probe = EnergyProbe::new(wave, eos).unwrap();
    run(&config, &wave, &mut probe).unwrap();
    let d: Vec<f64> = probe.reports.iter().map(|r| r.dissipation_accum).collect();
    assert_eq!(d[0], 0.0);
    assert!(d.windows(2).all(|w| w[1] >= w[0]), "{d:?}");
    assert!(*d.last().unwrap() > 0.0);
}

#[test]
fn bregman_suite_on_several_models() {
    for (zt, eps) in [(1.0, 0.1), (1.0, 0.0), (0.1, 0.2), (10.0, 0.05)] {
        let eos = EosParams::new(zt, eps).unwrap();
        let report = bregman_properties_check(&eos, 2000, 11);
        for c in report.checks() {
            assert!(c.passed, "Ztilde {zt}, eps {eps}: {c}");
        }
        assert_eq!(report.skipped, 0);
    }
}
